// End-to-end checks of the benchmark executable: flag handling, exit codes,
// and emitted artifacts. The binary path arrives through MDBENCH_BIN.

#include <gtest/gtest.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "mdmin/io.hpp"
#include "mdmin/problem.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("MDBENCH_BIN");
  EXPECT_NE(p, nullptr) << "MDBENCH_BIN not set";
  return p ? p : "";
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir =
      fs::temp_directory_path() / ("mdbench-cli-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& dir) {
  const std::string cmd = cli_path() + " " + args + " > " + (dir / "stdout.txt").string() +
                          " 2> " + (dir / "stderr.txt").string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, GenerateAndRunPreset) {
  const auto dir = fresh_dir("smoke");
  const int rc = run("--generate --seed 42 --m 120 --n 100 --preset cg --out " +
                         (dir / "out").string(),
                     dir);
  EXPECT_EQ(rc, 0) << slurp(dir / "stderr.txt");
  ASSERT_TRUE(fs::exists(dir / "out" / "summary.json"));
  ASSERT_TRUE(fs::exists(dir / "out" / "cg.csv"));
  const auto summary = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  EXPECT_EQ(summary.at("runs").at(0).at("status"), "converged");
  fs::remove_all(dir);
}

TEST(Cli, RelaxedAndUnrelaxedBothComplete) {
  const auto dir = fresh_dir("relax");
  for (const char* omega : {"0.95", "1.0"}) {
    const int rc = run(std::string("--generate --seed 42 --m 60 --n 50 --preset forsythe2 "
                                   "--omega ") +
                           omega + " --out " + (dir / omega).string(),
                       dir);
    EXPECT_EQ(rc, 0);
    const auto summary = nlohmann::json::parse(slurp(dir / omega / "summary.json"));
    EXPECT_EQ(summary.at("runs").at(0).at("status"), "converged") << omega;
  }
  fs::remove_all(dir);
}

TEST(Cli, OutOfRangeOmegaIsConfigError) {
  const auto dir = fresh_dir("omega");
  const int rc =
      run("--generate --seed 1 --m 12 --n 10 --preset cg --omega 2.0 --out " + dir.string(), dir);
  EXPECT_EQ(rc, 2);
  fs::remove_all(dir);
}

TEST(Cli, UnknownPresetIsConfigError) {
  const auto dir = fresh_dir("preset");
  const int rc =
      run("--generate --seed 1 --m 12 --n 10 --preset bogus --out " + dir.string(), dir);
  EXPECT_EQ(rc, 2);
  fs::remove_all(dir);
}

TEST(Cli, MissingProblemSourceIsConfigError) {
  const auto dir = fresh_dir("noproblem");
  EXPECT_EQ(run("--preset cg --out " + dir.string(), dir), 2);
  fs::remove_all(dir);
}

TEST(Cli, MissingConfigFileIsConfigError) {
  const auto dir = fresh_dir("noconfig");
  EXPECT_EQ(run("--config /nonexistent/config.json", dir), 2);
  fs::remove_all(dir);
}

TEST(Cli, HelpExitsCleanly) {
  const auto dir = fresh_dir("help");
  EXPECT_EQ(run("--help", dir), 0);
  fs::remove_all(dir);
}

TEST(Cli, ConfigFileDrivesProblemFilesAndRuns) {
  const auto dir = fresh_dir("files");
  const auto problem = mdmin::generate_problem(9, 24, 20);
  mdmin::write_dense_matrix((dir / "A.txt").string(), problem.A);
  mdmin::write_dense_vector((dir / "b.txt").string(), problem.b);
  mdmin::write_dense_vector((dir / "x.txt").string(), *problem.known_solution);
  nlohmann::json cfg{
      {"problem",
       {{"matrix", (dir / "A.txt").string()},
        {"rhs", (dir / "b.txt").string()},
        {"solution", (dir / "x.txt").string()}}},
      {"out_dir", (dir / "out").string()},
      {"emit", {{"csv", true}, {"json", true}, {"bounds", true}}},
      {"runs", nlohmann::json::array({{{"preset", "cg"}}, {{"preset", "cr"}}})}};
  mdmin::write_text_file((dir / "cfg.json").string(), cfg.dump(2));
  const int rc = run("--config " + (dir / "cfg.json").string(), dir);
  EXPECT_EQ(rc, 0) << slurp(dir / "stderr.txt");
  const auto summary = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  EXPECT_EQ(summary.at("problem").at("source"), "files");
  EXPECT_EQ(summary.at("runs").size(), 2u);
  for (const auto& entry : summary.at("runs")) {
    EXPECT_EQ(entry.at("status"), "converged");
    EXPECT_TRUE(entry.at("verification").at("all_pass").get<bool>());
  }
  fs::remove_all(dir);
}

TEST(Cli, NormOverrideFlags) {
  const auto dir = fresh_dir("norms");
  int rc = run("--generate --seed 3 --m 24 --n 20 --preset cg --mu 0.5 --out " +
                   (dir / "mu").string(),
               dir);
  EXPECT_EQ(rc, 0);
  auto summary = nlohmann::json::parse(slurp(dir / "mu" / "summary.json"));
  EXPECT_EQ(summary.at("runs").at(0).at("config").at("norm").at("coeffs").at("-1"), 0.5);

  rc = run("--generate --seed 3 --m 24 --n 20 --preset forsythe2 --ell 0.5 --out " +
               (dir / "ell").string(),
           dir);
  EXPECT_EQ(rc, 0);
  summary = nlohmann::json::parse(slurp(dir / "ell" / "summary.json"));
  EXPECT_EQ(summary.at("runs").at(0).at("config").at("norm").at("ell"), 0.5);

  // the two overrides are mutually exclusive
  rc = run("--generate --seed 3 --m 24 --n 20 --preset cg --ell 0.5 --mu 0.5 --out " +
               (dir / "both").string(),
           dir);
  EXPECT_EQ(rc, 2);
  fs::remove_all(dir);
}

TEST(Cli, JacobiPrecondFlag) {
  const auto dir = fresh_dir("jacobi");
  const int rc = run("--generate --seed 3 --m 60 --n 50 --preset cg --precond jacobi "
                     "--bounds --out " +
                         (dir / "out").string(),
                     dir);
  EXPECT_EQ(rc, 0);
  const auto summary = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  EXPECT_EQ(summary.at("runs").at(0).at("config").at("precond"), "jacobi");
  EXPECT_TRUE(summary.at("runs").at(0).at("verification").at("all_pass").get<bool>());
  fs::remove_all(dir);
}
