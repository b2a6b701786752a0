// Benchmark harness for the multi-direction quadratic solvers: generates or
// loads a symmetric positive definite problem, runs the selected methods
// from a shared initial point, and writes per-run CSV traces plus a JSON
// summary.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mdmin/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string config_path;
  bool generate = false;
  std::optional<std::uint64_t> seed;
  std::optional<Eigen::Index> m, n;
  std::vector<std::string> preset_names;
  std::optional<double> omega, ell, mu, tol;
  std::optional<std::string> precond;
  std::optional<int> max_iter;
  std::optional<std::string> out_dir;
  bool bounds = false;
};

mdmin::ExperimentConfig build_config(const Flags& f) {
  mdmin::ExperimentConfig cfg;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw mdmin::config_error("cannot open config file: " + f.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw mdmin::config_error(std::string("config is not valid JSON: ") + e.what());
    }
    cfg = mdmin::experiment_from_json(j);
  }

  if (f.seed) cfg.seed = *f.seed;
  if (f.generate || f.m || f.n) {
    mdmin::GenerateSpec g;
    if (cfg.problem.generate)
      g = *cfg.problem.generate;
    else
      g.seed = cfg.seed;
    if (f.seed) g.seed = *f.seed;
    if (f.m) g.m = *f.m;
    if (f.n) g.n = *f.n;
    cfg.problem.generate = g;
    cfg.problem.files.reset();
  }

  // presets named on the command line replace any runs from the file
  if (!f.preset_names.empty()) {
    cfg.runs.clear();
    for (const auto& name : f.preset_names) {
      const mdmin::Preset* p = mdmin::find_preset(name);
      if (!p) throw mdmin::config_error("unknown preset: " + name);
      cfg.runs.push_back(mdmin::settings_from_preset(*p));
    }
  }
  if (cfg.runs.empty()) throw mdmin::config_error("nothing to run: give --preset or a config file");

  if (f.ell && f.mu) throw mdmin::config_error("--ell and --mu are mutually exclusive");
  for (auto& run : cfg.runs) {
    if (f.omega) run.omega = *f.omega;
    if (f.ell) run.norm = mdmin::NormSpec::from_ell(*f.ell);
    if (f.mu) run.norm = mdmin::NormSpec::gdwgm(*f.mu);
    if (f.tol) run.tol_grad_sq = *f.tol;
    if (f.max_iter) run.max_iter = *f.max_iter;
    if (f.precond) run.precond = mdmin::precond_choice_from_string(*f.precond);
    if (f.seed) run.seed.reset();  // inherit the experiment seed
  }

  if (f.out_dir) cfg.out_dir = *f.out_dir;
  if (f.bounds) cfg.emit.bounds = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark harness for multi-direction quadratic solvers"};
  Flags f;

  app.add_option("--config", f.config_path, "experiment config (JSON)");
  app.add_flag("--generate", f.generate, "generate a random test problem");
  app.add_option("--seed", f.seed, "generation / run seed");
  app.add_option("--m", f.m, "rows of the random factor (default 120)");
  app.add_option("--n", f.n, "problem dimension (default 100)");
  app.add_option("--preset", f.preset_names, "method preset, repeatable")->take_all();
  app.add_option("--omega", f.omega, "relaxation factor in (0, 2)");
  app.add_option("--ell", f.ell, "power-norm parameter (overrides preset norm)");
  app.add_option("--mu", f.mu, "merit-norm parameter in [0, 1] (overrides preset norm)");
  app.add_option("--precond", f.precond, "identity | jacobi | jacobi-sqrt");
  app.add_option("--tol", f.tol, "stopping tolerance on ||g||^2 (default 1e-6)");
  app.add_option("--max-iter", f.max_iter, "iteration cap (default 1000)");
  app.add_option("--out", f.out_dir, "output directory (default ./out)");
  app.add_flag("--bounds", f.bounds, "record and verify the rate bounds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const mdmin::ExperimentConfig cfg = build_config(f);
    mdmin::run_experiment(cfg, &std::cout);
    return kExitOk;
  } catch (const mdmin::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
