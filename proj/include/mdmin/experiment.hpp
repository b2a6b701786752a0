#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mdmin/config_json.hpp"
#include "mdmin/io.hpp"
#include "mdmin/presets.hpp"
#include "mdmin/runner.hpp"

namespace mdmin {

// Problem to benchmark against: either generation parameters or files in
// the dense text format.
struct GenerateSpec {
  std::uint64_t seed = 42;
  Eigen::Index m = 120;
  Eigen::Index n = 100;
};

struct FileSpec {
  std::string matrix;
  std::string rhs;
  std::optional<std::string> solution;
};

struct ProblemSource {
  std::optional<GenerateSpec> generate;
  std::optional<FileSpec> files;
};

struct EmitFlags {
  bool csv = true;
  bool json = true;
  bool bounds = false;  // spectrum, rate constants and per-run verification
};

// One named run of an experiment. A missing seed inherits the experiment
// seed, so every method starts from the same initial point.
struct RunSettings {
  std::string name;
  StrategySpec strategy;
  NormSpec norm = NormSpec::from_ell(0.0);
  PrecondChoice precond = PrecondChoice::Identity;
  double omega = 1.0;
  double tol_grad_sq = 1e-6;
  int max_iter = 1000;
  std::optional<std::uint64_t> seed;
  double rel_cutoff = 1e-12;
  bool baseline = false;  // fixed-step accelerated-gradient comparison run
};

struct ExperimentConfig {
  ProblemSource problem;
  std::vector<RunSettings> runs;
  std::string out_dir = "out";
  EmitFlags emit;
  std::uint64_t seed = 42;  // default run seed; also the generation seed
};

inline RunSettings settings_from_preset(const Preset& preset) {
  RunSettings s;
  s.name = preset.name;
  s.strategy = preset.strategy;
  s.norm = preset.norm;
  s.omega = preset.omega;
  s.baseline = preset.baseline;
  return s;
}

namespace detail {

inline void require_valid_name(const std::string& name) {
  if (name.empty()) throw config_error("run name must not be empty");
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
      throw config_error("run name may only contain [A-Za-z0-9_-]: " + name);
}

}  // namespace detail

inline void validate(const ExperimentConfig& cfg) {
  if (!cfg.problem.generate && !cfg.problem.files)
    throw config_error("no problem source: supply generation parameters or files");
  if (cfg.problem.generate && cfg.problem.files)
    throw config_error("ambiguous problem source: both generation parameters and files given");
  if (cfg.runs.empty()) throw config_error("experiment needs at least one run");
  for (std::size_t i = 0; i < cfg.runs.size(); ++i) {
    detail::require_valid_name(cfg.runs[i].name);
    for (std::size_t j = i + 1; j < cfg.runs.size(); ++j)
      if (cfg.runs[i].name == cfg.runs[j].name)
        throw config_error("duplicate run name: " + cfg.runs[i].name);
  }
}

inline ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("experiment config must be a JSON object");
  ExperimentConfig cfg;
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("emit")) {
    const auto& e = j.at("emit");
    if (e.contains("csv")) cfg.emit.csv = e.at("csv").get<bool>();
    if (e.contains("json")) cfg.emit.json = e.at("json").get<bool>();
    if (e.contains("bounds")) cfg.emit.bounds = e.at("bounds").get<bool>();
  }
  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    if (p.contains("matrix")) {
      FileSpec f;
      f.matrix = p.at("matrix").get<std::string>();
      if (!p.contains("rhs")) throw config_error("problem files need an \"rhs\" entry");
      f.rhs = p.at("rhs").get<std::string>();
      if (p.contains("solution")) f.solution = p.at("solution").get<std::string>();
      cfg.problem.files = std::move(f);
    } else {
      GenerateSpec g;
      g.seed = p.contains("seed") ? p.at("seed").get<std::uint64_t>() : cfg.seed;
      if (p.contains("m")) g.m = p.at("m").get<Eigen::Index>();
      if (p.contains("n")) g.n = p.at("n").get<Eigen::Index>();
      cfg.problem.generate = g;
    }
  }
  if (j.contains("runs")) {
    for (const auto& rj : j.at("runs")) {
      RunSettings s;
      if (rj.contains("preset")) {
        const Preset* p = find_preset(rj.at("preset").get<std::string>());
        if (!p) throw config_error("unknown preset: " + rj.at("preset").get<std::string>());
        s = settings_from_preset(*p);
      }
      if (rj.contains("name")) s.name = rj.at("name").get<std::string>();
      if (rj.contains("strategy")) s.strategy = strategy_from_json(rj.at("strategy"));
      if (rj.contains("norm")) s.norm = norm_from_json(rj.at("norm"));
      if (rj.contains("precond"))
        s.precond = precond_choice_from_string(rj.at("precond").get<std::string>());
      if (rj.contains("omega")) s.omega = rj.at("omega").get<double>();
      if (rj.contains("tol_grad_sq")) s.tol_grad_sq = rj.at("tol_grad_sq").get<double>();
      if (rj.contains("max_iter")) s.max_iter = rj.at("max_iter").get<int>();
      if (rj.contains("seed")) s.seed = rj.at("seed").get<std::uint64_t>();
      if (rj.contains("rel_cutoff")) s.rel_cutoff = rj.at("rel_cutoff").get<double>();
      cfg.runs.push_back(std::move(s));
    }
  }
  return cfg;
}

inline nlohmann::json settings_to_json(const RunSettings& s, std::uint64_t resolved_seed) {
  nlohmann::json j{{"name", s.name},
                   {"strategy", to_json(s.strategy)},
                   {"norm", to_json(s.norm)},
                   {"precond", to_string(s.precond)},
                   {"omega", s.omega},
                   {"tol_grad_sq", s.tol_grad_sq},
                   {"max_iter", s.max_iter},
                   {"seed", resolved_seed},
                   {"rel_cutoff", s.rel_cutoff}};
  if (s.baseline) j["baseline"] = true;
  return j;
}

inline ProblemInstance load_problem(const ExperimentConfig& cfg) {
  try {
    if (cfg.problem.generate) {
      const auto& g = *cfg.problem.generate;
      return generate_problem(g.seed, g.m, g.n);
    }
    const auto& f = *cfg.problem.files;
    Eigen::MatrixXd A = read_dense_matrix(f.matrix);
    Eigen::VectorXd b = read_dense_vector(f.rhs);
    std::optional<Eigen::VectorXd> sol;
    if (f.solution) sol = read_dense_vector(*f.solution);
    return make_problem(std::move(A), std::move(b), std::move(sol));
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error(std::string("problem setup failed: ") + e.what());
  }
}

// Runs every configured method against the shared problem (all runs default
// to the same seed and therefore the same initial point), writes one CSV
// trace per run plus a combined JSON summary, and returns the summary.
inline nlohmann::json run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr) {
  validate(cfg);
  const ProblemInstance problem = load_problem(cfg);
  const Eigen::Index n = problem.dim();

  // validate every run before starting any of them
  std::vector<RunConfig> run_configs;
  for (const auto& s : cfg.runs) {
    RunConfig rc;
    rc.strategy = s.strategy;
    rc.norm = s.norm;
    rc.precond = resolve_precond(s.precond, problem);
    rc.omega = s.omega;
    rc.tol_grad_sq = s.tol_grad_sq;
    rc.max_iter = s.max_iter;
    rc.seed = s.seed.value_or(cfg.seed);
    rc.record_bounds = cfg.emit.bounds;
    rc.rel_cutoff = s.rel_cutoff;
    try {
      validate(rc);
      if (!s.baseline) validate(rc.strategy, n);
      if (!rc.norm.trivially_positive())
        validate_norm_positive(rc.norm, extremal_eigenvalues(problem, rc.precond));
    } catch (const std::invalid_argument& e) {
      throw config_error("run \"" + s.name + "\": " + e.what());
    }
    run_configs.push_back(std::move(rc));
  }

  if (cfg.emit.csv || cfg.emit.json) std::filesystem::create_directories(cfg.out_dir);

  nlohmann::json summary;
  summary["problem"] = [&] {
    nlohmann::json p{{"n", n}};
    if (cfg.problem.generate) {
      p["m"] = cfg.problem.generate->m;
      p["seed"] = cfg.problem.generate->seed;
      p["source"] = "generated";
    } else {
      p["source"] = "files";
    }
    return p;
  }();
  summary["runs"] = nlohmann::json::array();

  for (std::size_t i = 0; i < cfg.runs.size(); ++i) {
    const auto& s = cfg.runs[i];
    const auto& rc = run_configs[i];

    RunResult result;
    if (s.baseline) {
      result = run_nagm(problem, initial_point(rc.seed, n), rc.tol_grad_sq, rc.max_iter);
    } else {
      result = run_multidir(problem, rc);
    }

    nlohmann::json entry = {{"name", s.name},
                            {"status", to_string(result.status)},
                            {"iterations", result.iterations},
                            {"final_f_gap", result.trace.back().f_gap},
                            {"final_grad_norm_sq", result.trace.back().grad_norm_sq},
                            {"config", settings_to_json(s, rc.seed)}};
    if (!result.note.empty()) entry["note"] = result.note;

    if (cfg.emit.bounds && !s.baseline) {
      const SpectrumInfo sp = extremal_eigenvalues(problem, rc.precond);
      const BoundReport bounds =
          compute_bounds(sp, rc.omega, rc.norm, result.trace.front().f_gap, rc.tol_grad_sq);
      const VerificationReport ver = verify_run(result, bounds, problem, rc);
      nlohmann::json bj{{"c_omega", bounds.c_omega},
                        {"corollary_rate", bounds.corollary_rate},
                        {"kappa_tilde", bounds.kappa_tilde}};
      if (bounds.K_bound) bj["K_bound"] = *bounds.K_bound;
      entry["bounds"] = bj;
      const auto check_json = [](const CheckResult& c) {
        nlohmann::json j{{"applicable", c.applicable}, {"pass", c.pass}};
        if (c.applicable) {
          j["worst_margin"] = c.worst_margin;
          j["worst_k"] = c.worst_k;
        }
        return j;
      };
      entry["verification"] = {{"contraction", check_json(ver.contraction)},
                               {"envelope", check_json(ver.envelope)},
                               {"domination", check_json(ver.domination)},
                               {"stationarity", check_json(ver.stationarity)},
                               {"distance_decay", check_json(ver.distance_decay)},
                               {"f_gap_bound", check_json(ver.f_gap_bound)},
                               {"complexity", check_json(ver.complexity)},
                               {"all_pass", ver.all_pass()}};
    }

    if (cfg.emit.csv) {
      const std::string path =
          (std::filesystem::path(cfg.out_dir) / (s.name + ".csv")).string();
      write_text_file(path, trace_to_csv(result));
      entry["csv"] = path;
    }
    summary["runs"].push_back(std::move(entry));

    if (log)
      (*log) << "run " << s.name << ": " << to_string(result.status) << " in "
             << result.iterations << " iterations (final f-gap "
             << result.trace.back().f_gap << ")\n";
  }

  if (cfg.emit.json) {
    const std::string path = (std::filesystem::path(cfg.out_dir) / "summary.json").string();
    write_text_file(path, summary.dump(2) + "\n");
  }
  return summary;
}

}  // namespace mdmin
