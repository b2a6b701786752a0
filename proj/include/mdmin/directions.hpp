#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mdmin/problem.hpp"
#include "mdmin/rng.hpp"

namespace mdmin {

// The pluggable part of the framework: which sub-search directions make up
// the columns of W each iteration. The gradient is always column one.
enum class StrategyKind {
  GradientOnly,      // W = [g]
  GradPrevStep,      // W = [g, z - z_prev]
  Forsythe,          // W = [g, Ag, ..., A^{s-1} g]
  ForsytheMomentum,  // W = [g, Ag, z - z_prev]
  GradRandom,        // W = [g, r], r standard normal
  MomentumRandom,    // W = [g, z - z_prev, r]
  GradStepYdiff,     // W = [g, z - z_prev, g - g_prev]
};

struct StrategySpec {
  StrategyKind kind = StrategyKind::GradientOnly;
  int s = 1;  // Forsythe only: number of Krylov columns
};

inline void validate(const StrategySpec& spec, Eigen::Index n) {
  if (spec.kind == StrategyKind::Forsythe && (spec.s < 1 || spec.s > n))
    throw std::invalid_argument("StrategySpec: forsythe order must satisfy 1 <= s <= n");
}

// Per-run mutable state: the previous iterate, gradient and step (absent at
// k = 0) plus the generator behind the random directions. One owner per run;
// independent runs never share state.
//
// prev_step is the previous update expressed in direction-column space,
// -omega W_{k-1} a_{k-1}. Momentum strategies use it as their step-difference
// column: applying the preconditioner inside the step then turns it into the
// previous iterate difference of the transformed variables, which is what
// keeps the conjugate-direction structure intact under preconditioning.
// Without preconditioning it is exactly z_k - z_{k-1}.
struct StrategyState {
  std::optional<Eigen::VectorXd> prev_z;
  std::optional<Eigen::VectorXd> prev_g;
  std::optional<Eigen::VectorXd> prev_step;
  Rng rng;
  long iteration = 0;

  explicit StrategyState(Rng generator) : rng(std::move(generator)) {}
  explicit StrategyState(std::uint64_t seed) : rng(seed) {}
};

// Direction matrix for the current iterate. Candidates that add nothing to
// the span of the columns already kept are dropped (never fatal), so the
// result has full column rank and its width can vary from one iteration to
// the next. History-dependent strategies degrade to the available columns
// at k = 0.
inline Eigen::MatrixXd make_directions(const StrategySpec& spec, StrategyState& state,
                                       const ProblemInstance& problem, const Eigen::VectorXd& z,
                                       const Eigen::VectorXd& g) {
  const Eigen::Index n = problem.dim();
  if (g.size() != n || z.size() != n)
    throw std::invalid_argument("make_directions: dimension mismatch");
  if (g.squaredNorm() == 0.0)
    throw std::invalid_argument("make_directions: zero gradient");

  std::vector<Eigen::VectorXd> candidates;
  candidates.push_back(g);
  switch (spec.kind) {
    case StrategyKind::GradientOnly:
      break;
    case StrategyKind::GradPrevStep:
      if (state.prev_step) candidates.push_back(*state.prev_step);
      break;
    case StrategyKind::Forsythe: {
      Eigen::VectorXd v = g;
      for (int i = 1; i < spec.s; ++i) {
        v = problem.A * v;  // cumulative matvec, never explicit powers
        candidates.push_back(v);
      }
      break;
    }
    case StrategyKind::ForsytheMomentum:
      candidates.push_back(problem.A * g);
      if (state.prev_step) candidates.push_back(*state.prev_step);
      break;
    case StrategyKind::GradRandom:
      candidates.push_back(state.rng.normal_vector(n));
      break;
    case StrategyKind::MomentumRandom:
      if (state.prev_step) candidates.push_back(*state.prev_step);
      candidates.push_back(state.rng.normal_vector(n));
      break;
    case StrategyKind::GradStepYdiff:
      if (state.prev_step) candidates.push_back(*state.prev_step);
      if (state.prev_g) candidates.push_back(g - *state.prev_g);
      break;
  }

  // Dependence filter by modified Gram-Schmidt against the kept columns. A
  // candidate whose cosine to the current span exceeds 1 - 1e-12 leaves a
  // normalized residual below sqrt(2e-12); such columns are dropped. The
  // kept columns themselves stay unnormalized (the step is span-invariant).
  const double drop_tol = std::sqrt(2e-12);
  std::vector<Eigen::VectorXd> kept;
  std::vector<Eigen::VectorXd> basis;
  kept.push_back(candidates[0]);
  basis.push_back(candidates[0].normalized());
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    const double cn = candidates[c].norm();
    if (!(cn > 0.0) || !candidates[c].allFinite()) continue;
    Eigen::VectorXd res = candidates[c];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) res -= q.dot(res) * q;
    if (res.norm() <= drop_tol * cn) continue;
    kept.push_back(candidates[c]);
    basis.push_back(res.normalized());
  }

  Eigen::MatrixXd W(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) W.col(static_cast<Eigen::Index>(i)) = kept[i];
  return W;
}

// Records the point a step departed from and the step that was taken
// (in direction-column space), making them the history the next iteration
// sees.
inline void update_state(StrategyState& state, const Eigen::VectorXd& from_z,
                         const Eigen::VectorXd& from_g, const Eigen::VectorXd& step) {
  state.prev_z = from_z;
  state.prev_g = from_g;
  state.prev_step = step;
  ++state.iteration;
}

}  // namespace mdmin
