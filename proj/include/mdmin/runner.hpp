#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mdmin/directions.hpp"
#include "mdmin/errors.hpp"
#include "mdmin/norms.hpp"
#include "mdmin/preconditioner.hpp"
#include "mdmin/problem.hpp"
#include "mdmin/spectrum.hpp"
#include "mdmin/stepsolver.hpp"

namespace mdmin {

struct RunConfig {
  StrategySpec strategy;
  NormSpec norm = NormSpec::from_ell(0.0);
  Preconditioner precond = Preconditioner::identity();
  double omega = 1.0;           // relaxation, strictly inside (0, 2)
  double tol_grad_sq = 1e-6;    // stop when ||g||_2^2 falls below this
  int max_iter = 1000;
  std::uint64_t seed = 0;       // initial point and random directions
  bool record_bounds = false;   // per-iteration theory quantities
  bool record_iterates = false; // keep the full iterate sequence (tests)
  double rel_cutoff = 1e-12;    // Gram eigenvalue truncation threshold
};

inline void validate(const RunConfig& c) {
  if (!(c.omega > 0.0 && c.omega < 2.0))
    throw std::invalid_argument("RunConfig: omega must lie strictly inside (0, 2)");
  if (!(c.tol_grad_sq > 0.0)) throw std::invalid_argument("RunConfig: tol_grad_sq must be positive");
  if (c.max_iter < 1) throw std::invalid_argument("RunConfig: max_iter must be positive");
  if (!(c.rel_cutoff > 0.0 && c.rel_cutoff < 1.0))
    throw std::invalid_argument("RunConfig: rel_cutoff must lie in (0, 1)");
}

// One row of the convergence trace. Record k holds the state at iterate k
// plus the step taken from it; the final record has no step (m_k = 0).
struct TraceRecord {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  int k = 0;
  double f_gap = 0.0;
  double grad_norm_sq = 0.0;
  double weighted_gnorm_sq = 0.0;
  int m_k = 0;
  Eigen::VectorXd a;
  double contraction_ratio = kNaN;  // weighted norm ratio to the previous record

  // theory-check quantities (NaN when not recorded). The domination pair is
  // the two sides of the comparison-step inequality, both expanded in the
  // Gram moments of this iteration so the check is free of the rounding the
  // next gradient evaluation picks up.
  double theta = kNaN;
  double domination_lhs = kNaN;     // norm the computed step attains
  double domination_bound = kNaN;   // norm the single-direction comparison attains
  double stationarity = kNaN;
  double dist_sq_weighted = kNaN;   // ||x_k - x*||^2 in the shifted power norm
};

enum class RunStatus { Converged, MaxIterations, Degenerate };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIterations: return "max-iterations";
    case RunStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

struct RunResult {
  std::vector<TraceRecord> trace;
  RunStatus status = RunStatus::MaxIterations;
  Eigen::VectorXd z_final;
  int iterations = 0;  // steps taken; trace.size() == iterations + 1
  double f_star = 0.0;
  std::string note;    // reason for an early termination
  std::vector<Eigen::VectorXd> iterates;  // filled when requested
};

// Rate constants of the per-iteration contraction and the iteration
// complexity estimate. K_bound is only defined for the pure power norms.
struct BoundReport {
  double c_omega = 0.0;
  double corollary_rate = 0.0;  // ((kappa-1)/(kappa+1))^2, the omega = 1 value
  double kappa_tilde = 1.0;
  std::optional<double> K_bound;
  double eps = 0.0;  // f-gap target the complexity estimate refers to
};

inline BoundReport compute_bounds(const SpectrumInfo& spectrum, double omega,
                                  const NormSpec& norm, double f0_gap, double eps) {
  if (!(omega > 0.0 && omega < 2.0))
    throw std::invalid_argument("compute_bounds: omega must lie strictly inside (0, 2)");
  if (!(spectrum.kappa >= 1.0))
    throw std::invalid_argument("compute_bounds: condition number below one");
  const double kt = spectrum.kappa;
  BoundReport r;
  r.kappa_tilde = kt;
  // omega(2-omega) is positive on all of (0, 2), so the factor stays in
  // [0, 1) there; it reaches 0 exactly at kappa = 1, omega = 1.
  r.c_omega = 1.0 - omega * (2.0 - omega) * 4.0 * kt / ((kt + 1.0) * (kt + 1.0));
  const double ratio = (kt - 1.0) / (kt + 1.0);
  r.corollary_rate = ratio * ratio;
  r.eps = eps;
  if (norm.ell && f0_gap > 0.0 && eps > 0.0) {
    const double arg = std::pow(kt, 2.0 * (*norm.ell)) * f0_gap / eps;
    const double k = (1.0 / (omega * (2.0 - omega))) * ((kt + 1.0) * (kt + 1.0) / (4.0 * kt)) *
                     std::log(arg);
    r.K_bound = std::max(k, 0.0);
  }
  return r;
}

namespace detail {

// Weighted gradient norm along a run. The lambda^{-1} term uses the
// minimizer identity gtilde' Atilde^{-1} gtilde = g . (z - z*), so the loop
// never solves a system; nonnegative powers apply the operator directly.
inline double trace_weighted_gnorm_sq(const NormSpec& norm, const ProblemInstance& p,
                                      const Preconditioner& pc, const Eigen::VectorXd& z,
                                      const Eigen::VectorXd& g, const Eigen::VectorXd& gt,
                                      const Eigen::VectorXd& z_star) {
  double total = 0.0;
  if (norm.has_inverse_term()) total += norm.coeffs.at(-1) * g.dot(z - z_star);
  Eigen::VectorXd power = gt;
  for (int j = 0; j <= norm.max_power(); ++j) {
    if (j > 0) power = apply_atilde(p, pc, power);
    const auto it = norm.coeffs.find(j);
    if (it != norm.coeffs.end()) total += it->second * gt.dot(power);
  }
  return total;
}

// delta' A (P^{-T} P^{-1} A)^{2l} delta with delta = z - z*: the distance
// to optimality in the shifted power norm of the transformed variables,
// computed entirely in the original ones.
inline double weighted_dist_sq(const ProblemInstance& p, const Preconditioner& pc, int two_ell,
                               const Eigen::VectorXd& z, const Eigen::VectorXd& z_star) {
  const Eigen::VectorXd delta = z - z_star;
  Eigen::VectorXd v = p.A * delta;
  for (int t = 0; t < two_ell; ++t)
    v = p.A * apply_precond_inv(pc, apply_precond_inv(pc, v, false), true);
  return delta.dot(v);
}

}  // namespace detail

// Direction provider called once per iteration; the library strategies are
// wrapped through this, and tests can inject arbitrary direction sets.
using DirectionFn = std::function<Eigen::MatrixXd(
    StrategyState&, const ProblemInstance&, const Eigen::VectorXd&, const Eigen::VectorXd&)>;

// The multi-direction iteration with relaxation and preconditioning:
//   z_{k+1} = z_k - omega P^{-T} P^{-1} W_k a_k,
// which is the transformed-variable update x_{k+1} = x_k - omega P^{-1} W a
// written in the original variables via z = P^{-T} x. Stops when
// ||g||_2^2 < tol_grad_sq or at max_iter; numerical degeneracy ends the run
// with a status, never a crash. Deterministic in config.seed.
inline RunResult run_multidir_custom(const ProblemInstance& problem, const RunConfig& config,
                                     const DirectionFn& directions,
                                     std::optional<Eigen::VectorXd> z0 = std::nullopt) {
  validate(config);
  const Eigen::Index n = problem.dim();
  if (!config.norm.trivially_positive())
    validate_norm_positive(config.norm, extremal_eigenvalues(problem, config.precond));

  const Eigen::VectorXd z_star = minimizer(problem);
  const double f_star = objective(problem, z_star);
  const std::optional<double> pure_ell = config.norm.ell;

  Rng rng(config.seed);
  Eigen::VectorXd z = z0 ? *z0 : rng.uniform_vector(n);
  if (z.size() != n) throw std::invalid_argument("run: initial point has the wrong length");
  StrategyState state(std::move(rng));

  RunResult out;
  out.f_star = f_star;
  double prev_q = TraceRecord::kNaN;

  for (int k = 0;; ++k) {
    const Eigen::VectorXd g = problem.A * z - problem.b;
    const double grad_sq = g.squaredNorm();
    const Eigen::VectorXd gt = apply_precond_inv(config.precond, g, false);
    const double q =
        detail::trace_weighted_gnorm_sq(config.norm, problem, config.precond, z, g, gt, z_star);

    TraceRecord rec;
    rec.k = k;
    rec.f_gap = 0.5 * (z.dot(g) - z.dot(problem.b)) - f_star;
    rec.grad_norm_sq = grad_sq;
    rec.weighted_gnorm_sq = q;
    if (k > 0 && prev_q > 0.0) rec.contraction_ratio = q / prev_q;
    if (config.record_bounds && pure_ell)
      rec.dist_sq_weighted = detail::weighted_dist_sq(
          problem, config.precond, static_cast<int>(2.0 * (*pure_ell)), z, z_star);
    prev_q = q;
    if (config.record_iterates) out.iterates.push_back(z);

    if (!std::isfinite(grad_sq)) {
      out.status = RunStatus::Degenerate;
      out.note = "non-finite gradient";
      out.trace.push_back(std::move(rec));
      out.iterations = k;
      break;
    }
    if (grad_sq < config.tol_grad_sq) {
      out.status = RunStatus::Converged;
      out.trace.push_back(std::move(rec));
      out.iterations = k;
      break;
    }
    if (k == config.max_iter) {
      out.status = RunStatus::MaxIterations;
      out.trace.push_back(std::move(rec));
      out.iterations = k;
      break;
    }

    StepResult step;
    Eigen::MatrixXd W;
    try {
      W = directions(state, problem, z, g);
      step = multidir_step(problem, config.precond, config.norm, W, gt, config.rel_cutoff);
    } catch (const degenerate_system_error& e) {
      out.status = RunStatus::Degenerate;
      out.note = e.what();
      out.trace.push_back(std::move(rec));
      out.iterations = k;
      break;
    }

    rec.m_k = static_cast<int>(W.cols());
    rec.a = step.a;
    rec.theta = step.theta;
    rec.stationarity = step.stationarity;
    const double w = config.omega;
    rec.domination_lhs = q - 2.0 * w * step.a_dot_rhs + w * w * step.a_gram_a;
    rec.domination_bound =
        q - 2.0 * w * step.theta * step.rhs1 + w * w * step.theta * step.theta * step.gram11;
    out.trace.push_back(std::move(rec));

    const Eigen::VectorXd z_from = z;
    z -= config.omega * apply_precond_inv(config.precond, step.direction, true);
    update_state(state, z_from, g, -config.omega * (W * step.a));
  }

  out.z_final = z;
  return out;
}

inline RunResult run_multidir(const ProblemInstance& problem, const RunConfig& config,
                              std::optional<Eigen::VectorXd> z0 = std::nullopt) {
  validate(config.strategy, problem.dim());
  const StrategySpec spec = config.strategy;
  return run_multidir_custom(
      problem, config,
      [spec](StrategyState& state, const ProblemInstance& p, const Eigen::VectorXd& z,
             const Eigen::VectorXd& g) { return make_directions(spec, state, p, z, g); },
      std::move(z0));
}

namespace detail {

inline TraceRecord baseline_record(int k, double f_gap, double grad_sq) {
  TraceRecord rec;
  rec.k = k;
  rec.f_gap = f_gap;
  // the A^{-1} weight, under which the gap identity f - f* = 1/2 ||g||^2
  // holds exactly
  rec.weighted_gnorm_sq = 2.0 * f_gap;
  rec.grad_norm_sq = grad_sq;
  return rec;
}

inline void baseline_finish(RunResult& out, std::vector<TraceRecord>&& trace,
                            Eigen::VectorXd&& x, int iterations, RunStatus status) {
  out.trace = std::move(trace);
  for (std::size_t i = 1; i < out.trace.size(); ++i) {
    const double prev = out.trace[i - 1].weighted_gnorm_sq;
    if (prev > 0.0) out.trace[i].contraction_ratio = out.trace[i].weighted_gnorm_sq / prev;
  }
  out.z_final = std::move(x);
  out.iterations = iterations;
  out.status = status;
}

}  // namespace detail

// Classical conjugate gradients in its gradient form,
//   x_{k+1} = x_k + alpha_k d_k,   d_k = -g_k + beta_{k-1} d_{k-1},
// with the exact line-search alpha and the conjugacy beta. Implemented
// independently of the framework machinery so cross-checks between the two
// are genuine. restart_every = s discards the direction history at every
// s-th iteration; 0 never restarts.
inline RunResult run_textbook_cg(const ProblemInstance& problem, const Eigen::VectorXd& x0,
                                 double tol_grad_sq = 1e-6, int max_iter = 1000,
                                 int restart_every = 0) {
  RunResult out;
  const Eigen::VectorXd z_star = minimizer(problem);
  out.f_star = objective(problem, z_star);

  Eigen::VectorXd x = x0;
  Eigen::VectorXd d, ad;
  bool have_d = false;
  std::vector<TraceRecord> trace;

  for (int k = 0;; ++k) {
    const Eigen::VectorXd g = problem.A * x - problem.b;
    const double grad_sq = g.squaredNorm();
    TraceRecord rec =
        detail::baseline_record(k, 0.5 * (x.dot(g) - x.dot(problem.b)) - out.f_star, grad_sq);
    out.iterates.push_back(x);

    if (!std::isfinite(grad_sq)) {
      trace.push_back(rec);
      detail::baseline_finish(out, std::move(trace), std::move(x), k, RunStatus::Degenerate);
      out.note = "non-finite gradient";
      return out;
    }
    if (grad_sq < tol_grad_sq) {
      trace.push_back(rec);
      detail::baseline_finish(out, std::move(trace), std::move(x), k, RunStatus::Converged);
      return out;
    }
    if (k == max_iter) {
      trace.push_back(rec);
      detail::baseline_finish(out, std::move(trace), std::move(x), k, RunStatus::MaxIterations);
      return out;
    }

    if (restart_every > 0 && k % restart_every == 0) have_d = false;
    if (have_d) {
      const double beta = ad.dot(g) / ad.dot(d);
      d = -g + beta * d;
    } else {
      d = -g;
    }
    ad = problem.A * d;
    const double alpha = -d.dot(g) / d.dot(ad);
    x += alpha * d;
    have_d = true;

    rec.m_k = 1;
    rec.a = Eigen::VectorXd::Constant(1, alpha);
    trace.push_back(rec);
  }
}

// Conjugate residuals: short recurrences minimizing the 2-norm of the
// residual over the growing Krylov space.
inline RunResult run_textbook_cr(const ProblemInstance& problem, const Eigen::VectorXd& x0,
                                 double tol_grad_sq = 1e-6, int max_iter = 1000) {
  RunResult out;
  const Eigen::VectorXd z_star = minimizer(problem);
  out.f_star = objective(problem, z_star);

  Eigen::VectorXd x = x0;
  Eigen::VectorXd r = problem.b - problem.A * x;  // r = -g
  Eigen::VectorXd ar = problem.A * r;
  Eigen::VectorXd p = r;
  Eigen::VectorXd ap = ar;
  std::vector<TraceRecord> trace;

  for (int k = 0;; ++k) {
    const double grad_sq = r.squaredNorm();
    TraceRecord rec =
        detail::baseline_record(k, -0.5 * (x.dot(r) + x.dot(problem.b)) - out.f_star, grad_sq);
    out.iterates.push_back(x);

    if (!std::isfinite(grad_sq)) {
      trace.push_back(rec);
      detail::baseline_finish(out, std::move(trace), std::move(x), k, RunStatus::Degenerate);
      out.note = "non-finite residual";
      return out;
    }
    if (grad_sq < tol_grad_sq) {
      trace.push_back(rec);
      detail::baseline_finish(out, std::move(trace), std::move(x), k, RunStatus::Converged);
      return out;
    }
    if (k == max_iter) {
      trace.push_back(rec);
      detail::baseline_finish(out, std::move(trace), std::move(x), k, RunStatus::MaxIterations);
      return out;
    }

    const double r_ar = r.dot(ar);
    const double alpha = r_ar / ap.squaredNorm();
    x += alpha * p;
    r -= alpha * ap;
    const Eigen::VectorXd ar_next = problem.A * r;
    const double beta = r.dot(ar_next) / r_ar;
    p = r + beta * p;
    ap = ar_next + beta * ap;
    ar = ar_next;

    rec.m_k = 1;
    rec.a = Eigen::VectorXd::Constant(1, alpha);
    trace.push_back(rec);
  }
}

// Accelerated gradient baseline in its single-sequence form,
//   x_{k+1} = x_k - (1/L) g_k + beta (x_k - x_{k-1}) + (beta/L)(g_{k-1} - g_k),
// with L the largest eigenvalue and beta built from the extreme eigenvalue
// square roots. Constant steps: deliberately outside the framework, kept as
// a comparison point.
inline RunResult run_nagm(const ProblemInstance& problem, const Eigen::VectorXd& x0,
                          double tol_grad_sq = 1e-6, int max_iter = 1000) {
  RunResult out;
  const Eigen::VectorXd z_star = minimizer(problem);
  out.f_star = objective(problem, z_star);

  const SpectrumInfo sp = extremal_eigenvalues(problem, Preconditioner::identity(), problem.dim());
  const double L = sp.lambda_max;
  const double beta = (std::sqrt(sp.lambda_max) - std::sqrt(sp.lambda_min)) /
                      (std::sqrt(sp.lambda_max) + std::sqrt(sp.lambda_min));

  Eigen::VectorXd x = x0;
  Eigen::VectorXd x_prev = x0;
  Eigen::VectorXd g_prev = problem.A * x0 - problem.b;
  std::vector<TraceRecord> trace;

  for (int k = 0;; ++k) {
    const Eigen::VectorXd g = problem.A * x - problem.b;
    const double grad_sq = g.squaredNorm();
    TraceRecord rec =
        detail::baseline_record(k, 0.5 * (x.dot(g) - x.dot(problem.b)) - out.f_star, grad_sq);
    out.iterates.push_back(x);

    if (!std::isfinite(grad_sq)) {
      trace.push_back(rec);
      detail::baseline_finish(out, std::move(trace), std::move(x), k, RunStatus::Degenerate);
      out.note = "non-finite gradient";
      return out;
    }
    if (grad_sq < tol_grad_sq) {
      trace.push_back(rec);
      detail::baseline_finish(out, std::move(trace), std::move(x), k, RunStatus::Converged);
      return out;
    }
    if (k == max_iter) {
      trace.push_back(rec);
      detail::baseline_finish(out, std::move(trace), std::move(x), k, RunStatus::MaxIterations);
      return out;
    }

    const Eigen::VectorXd x_next =
        x - (1.0 / L) * g + beta * (x - x_prev) + (beta / L) * (g_prev - g);
    x_prev = x;
    g_prev = g;
    x = x_next;

    rec.m_k = 1;
    rec.a = Eigen::VectorXd::Constant(1, 1.0 / L);
    trace.push_back(rec);
  }
}

// --- per-run verification of the convergence theory -------------------------

struct CheckResult {
  bool applicable = false;
  bool pass = true;
  double worst_margin = -std::numeric_limits<double>::infinity();
  int worst_k = -1;
};

struct VerificationReport {
  static constexpr double kSlack = 1e-10;  // roundoff allowance on ratio checks

  CheckResult contraction;     // Q_{k+1}/Q_k <= c(omega) + slack
  CheckResult envelope;        // Q_k/Q_0 <= c^k + slack
  CheckResult domination;      // Q_{k+1} <= single-direction comparison + slack Q_k
  CheckResult stationarity;    // first-order residuals (omega = 1 runs only)
  CheckResult distance_decay;  // weighted distance contracts by c each step
  CheckResult f_gap_bound;     // f_k/f_0 <= kappa^{2l} c^k + slack
  CheckResult complexity;      // reaches the f-gap target within ceil(K_bound)

  bool all_pass() const {
    return contraction.pass && envelope.pass && domination.pass && stationarity.pass &&
           distance_decay.pass && f_gap_bound.pass && complexity.pass;
  }
};

namespace detail {

inline void track(CheckResult& c, double margin, int k, double slack) {
  c.applicable = true;
  if (margin > c.worst_margin) {
    c.worst_margin = margin;
    c.worst_k = k;
  }
  if (margin > slack) c.pass = false;
}

}  // namespace detail

// Replays the recorded trace against the proven per-iteration bounds.
// Margins are normalized excesses over each bound; a check that never saw
// data stays applicable = false and passing.
inline VerificationReport verify_run(const RunResult& result, const BoundReport& bounds,
                                     const ProblemInstance& problem, const RunConfig& config) {
  (void)problem;
  VerificationReport rep;
  const double slack = VerificationReport::kSlack;
  const auto& tr = result.trace;
  if (tr.empty()) return rep;

  const double c = bounds.c_omega;
  const double q0 = tr[0].weighted_gnorm_sq;
  const double f0 = tr[0].f_gap;

  double c_pow = 1.0;
  for (std::size_t k = 1; k < tr.size(); ++k) {
    const double q_prev = tr[k - 1].weighted_gnorm_sq;
    const double q = tr[k].weighted_gnorm_sq;
    if (q_prev > 0.0)
      detail::track(rep.contraction, q / q_prev - c, static_cast<int>(k), slack);
    c_pow *= c;
    if (q0 > 0.0) detail::track(rep.envelope, q / q0 - c_pow, static_cast<int>(k), slack);

    const double dom_lhs = tr[k - 1].domination_lhs;
    const double dom = tr[k - 1].domination_bound;
    if (std::isfinite(dom_lhs) && std::isfinite(dom) && q_prev > 0.0)
      detail::track(rep.domination, (dom_lhs - dom) / q_prev, static_cast<int>(k), slack);

    const double dist_prev = tr[k - 1].dist_sq_weighted;
    const double dist = tr[k].dist_sq_weighted;
    if (std::isfinite(dist) && std::isfinite(dist_prev) && dist_prev > 0.0)
      detail::track(rep.distance_decay, dist / dist_prev - c, static_cast<int>(k), slack);
  }

  if (config.omega == 1.0) {
    for (const auto& rec : tr)
      if (rec.m_k > 0 && std::isfinite(rec.stationarity))
        detail::track(rep.stationarity, rec.stationarity, rec.k, slack);
  }

  if (config.norm.ell && f0 > 0.0) {
    const double factor = std::pow(bounds.kappa_tilde, 2.0 * (*config.norm.ell));
    double cp = 1.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      detail::track(rep.f_gap_bound, tr[k].f_gap / f0 - factor * cp, static_cast<int>(k), slack);
      cp *= c;
    }
  }

  if (bounds.K_bound) {
    const double cap = std::ceil(*bounds.K_bound);
    int first = -1;
    for (const auto& rec : tr)
      if (rec.f_gap <= bounds.eps) {
        first = rec.k;
        break;
      }
    const double observed = (first >= 0) ? first : result.iterations;
    detail::track(rep.complexity, observed - cap, first >= 0 ? first : result.iterations, 0.0);
  }

  return rep;
}

}  // namespace mdmin
