#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "mdmin/errors.hpp"
#include "mdmin/norms.hpp"

namespace mdmin {

namespace detail {

// Eigendecomposition-based solve of the small Gram system with a relative
// cutoff. The matrix is first equilibrated to unit diagonal so the cutoff
// measures genuine near-dependence of the directions rather than their
// scale disparity (power-basis columns span many orders of magnitude).
struct GramSolve {
  Eigen::VectorXd a;          // solution in the original scaling
  int rank = 0;               // eigenvalues kept
  Eigen::MatrixXd kept;       // kept eigenvectors of the equilibrated Gram
  Eigen::VectorXd equil;      // D with gram = D Ghat D
  Eigen::VectorXd rhs_equil;  // D^{-1} rhs
};

inline GramSolve solve_gram(const GramSystem& sys, double rel_cutoff) {
  if (!(rel_cutoff > 0.0 && rel_cutoff < 1.0))
    throw std::invalid_argument("solve_step: rel_cutoff must lie in (0, 1)");
  const Eigen::Index m = sys.gram.rows();
  if (sys.gram.cols() != m || sys.rhs.size() != m)
    throw std::invalid_argument("solve_step: inconsistent system dimensions");
  if (!sys.gram.allFinite() || !sys.rhs.allFinite())
    throw degenerate_system_error("solve_step: non-finite system");
  if (sys.gram.cwiseAbs().maxCoeff() < 1e-300)
    throw degenerate_system_error("solve_step: gram matrix is numerically zero");

  GramSolve out;
  out.equil.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double di = sys.gram(i, i);
    out.equil[i] = di > 0.0 ? std::sqrt(di) : 1.0;
  }
  const Eigen::MatrixXd ghat =
      out.equil.cwiseInverse().asDiagonal() * sys.gram * out.equil.cwiseInverse().asDiagonal();
  out.rhs_equil = sys.rhs.cwiseQuotient(out.equil);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ghat);
  if (es.info() != Eigen::Success)
    throw degenerate_system_error("solve_step: eigendecomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lam_max = lam.maxCoeff();
  if (!(lam_max > 0.0))
    throw degenerate_system_error("solve_step: gram matrix has no positive eigenvalue");

  const double cutoff = rel_cutoff * lam_max;
  Eigen::VectorXd ahat = Eigen::VectorXd::Zero(m);
  out.kept.resize(m, 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (lam[i] <= cutoff) continue;
    const Eigen::VectorXd v = es.eigenvectors().col(i);
    ahat += v * (v.dot(out.rhs_equil) / lam[i]);
    out.kept.conservativeResize(Eigen::NoChange, out.kept.cols() + 1);
    out.kept.col(out.kept.cols() - 1) = v;
    ++out.rank;
  }
  out.a = ahat.cwiseQuotient(out.equil);
  return out;
}

}  // namespace detail

// Pseudo-inverse solve of the step system: eigenvalues of the (equilibrated)
// Gram matrix below rel_cutoff times the largest are discarded and the
// solution lives on the kept eigenspace. For a well-conditioned system this
// is the plain solve.
struct GramSolution {
  Eigen::VectorXd a;
  int truncated_rank = 0;
};

inline GramSolution solve_step(const GramSystem& system, double rel_cutoff = 1e-12) {
  auto s = detail::solve_gram(system, rel_cutoff);
  return GramSolution{std::move(s.a), s.rank};
}

// One multi-direction step, before relaxation.
struct StepResult {
  Eigen::VectorXd a;          // sub-step sizes
  Eigen::VectorXd direction;  // P^{-1} W a; the loop applies omega and P^{-T}
  int truncated_rank = 0;
  double theta = 0.0;          // single-direction comparison step, rhs_1/gram_11
  double rhs1 = 0.0;           // gtilde' M(Atilde) gtilde
  double gram11 = 0.0;         // gtilde' M(Atilde) Atilde gtilde
  double a_dot_rhs = 0.0;      // a . rhs, for the achieved-reduction identity
  double a_gram_a = 0.0;       // a' G a
  double stationarity = 0.0;   // relative first-order residual on the kept subspace
};

// Assembles the Gram system for the given directions and solves for the
// sub-step sizes. Requires the gradient as column one of W; a vanishing
// preconditioned gradient short-circuits to a zero step.
//
// The stationarity diagnostic recomputes, from the updated gradient
// gtilde - AtU a, the first-order condition the solve is meant to zero out,
// projected onto the kept eigenspace of the Gram matrix.
inline StepResult multidir_step(const ProblemInstance& problem, const Preconditioner& pc,
                                const NormSpec& norm, const Eigen::MatrixXd& W,
                                const Eigen::VectorXd& gtilde, double rel_cutoff = 1e-12) {
  StepResult out;
  if (gtilde.squaredNorm() == 0.0) {
    out.a = Eigen::VectorXd::Zero(W.cols());
    out.direction = Eigen::VectorXd::Zero(problem.dim());
    return out;
  }

  const GramDetail d = assemble_gram_detail(norm, problem, pc, W, gtilde);
  const auto solve = detail::solve_gram(d.system, rel_cutoff);

  out.a = solve.a;
  out.direction = d.U * solve.a;
  out.truncated_rank = solve.rank;
  out.rhs1 = d.system.rhs(0);
  out.gram11 = d.system.gram(0, 0);
  if (!(out.gram11 > 0.0))
    throw degenerate_system_error("multidir_step: gradient direction carries no curvature");
  out.theta = out.rhs1 / out.gram11;
  out.a_dot_rhs = solve.a.dot(d.system.rhs);
  out.a_gram_a = solve.a.dot(d.system.gram * solve.a);

  const Eigen::VectorXd gplus = gtilde - d.AtU * solve.a;
  const Eigen::VectorXd residual =
      (d.Wbar.transpose() * gplus).cwiseQuotient(solve.equil);
  const double scale =
      solve.rhs_equil.cwiseAbs().maxCoeff() + solve.equil.cwiseProduct(solve.a).cwiseAbs().maxCoeff();
  double proj = 0.0;
  if (solve.kept.cols() > 0) proj = (solve.kept.transpose() * residual).cwiseAbs().maxCoeff();
  out.stationarity = proj / std::max(scale, std::numeric_limits<double>::min());
  return out;
}

}  // namespace mdmin
