#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mdmin/rng.hpp"

namespace mdmin {

// Strictly convex quadratic f(z) = 1/2 z'Az - z'b with A symmetric positive
// definite; the unique minimizer is z* = A^{-1} b. Immutable after
// construction, safe to share across threads.
struct ProblemInstance {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::optional<Eigen::VectorXd> known_solution;

  Eigen::Index dim() const { return b.size(); }
};

// Validating constructor. Asymmetry at the floating-point noise level
// (relative 1e-12) is symmetrized away; anything larger is rejected.
// Positive definiteness is established by a Cholesky factorization, and a
// supplied solution must satisfy the normal equations to 1e-10 relative.
inline ProblemInstance make_problem(Eigen::MatrixXd A, Eigen::VectorXd b,
                                    std::optional<Eigen::VectorXd> known_solution = std::nullopt) {
  if (A.rows() < 1 || A.rows() != A.cols())
    throw std::invalid_argument("make_problem: A must be square and nonempty");
  if (b.size() != A.rows())
    throw std::invalid_argument("make_problem: b does not match the matrix dimension");

  const double scale = A.cwiseAbs().maxCoeff();
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw std::invalid_argument("make_problem: matrix is not symmetric");
  A = (0.5 * (A + A.transpose())).eval();

  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("make_problem: matrix is not positive definite");

  if (known_solution) {
    if (known_solution->size() != b.size())
      throw std::invalid_argument("make_problem: known solution has the wrong length");
    const double residual = (A * (*known_solution) - b).norm();
    if (residual > 1e-10 * (1.0 + b.norm()))
      throw std::invalid_argument("make_problem: known solution does not solve A z = b");
  }
  return ProblemInstance{std::move(A), std::move(b), std::move(known_solution)};
}

inline Eigen::VectorXd gradient(const ProblemInstance& p, const Eigen::VectorXd& z) {
  if (z.size() != p.dim()) throw std::invalid_argument("gradient: dimension mismatch");
  return p.A * z - p.b;
}

inline double objective(const ProblemInstance& p, const Eigen::VectorXd& z) {
  if (z.size() != p.dim()) throw std::invalid_argument("objective: dimension mismatch");
  return 0.5 * z.dot(p.A * z) - z.dot(p.b);
}

// Stored solution when present, one dense symmetric solve otherwise.
inline Eigen::VectorXd minimizer(const ProblemInstance& p) {
  if (p.known_solution) return *p.known_solution;
  return Eigen::LLT<Eigen::MatrixXd>(p.A).solve(p.b);
}

// Random test problem: B (m x n) with uniform [0,1) entries, A = B'B, the
// minimizer x* drawn from the same distribution, b = A x*. Deterministic in
// the seed; B is filled row by row, then x*.
inline ProblemInstance generate_problem(std::uint64_t seed, Eigen::Index m, Eigen::Index n) {
  if (n < 1 || m < n) throw std::invalid_argument("generate_problem: requires m >= n >= 1");
  Rng rng(seed);
  const Eigen::MatrixXd B = rng.uniform_matrix(m, n);
  Eigen::MatrixXd A = B.transpose() * B;
  A = (0.5 * (A + A.transpose())).eval();
  Eigen::VectorXd x_star = rng.uniform_vector(n);
  Eigen::VectorXd b = A * x_star;
  return make_problem(std::move(A), std::move(b), std::move(x_star));
}

// The initial iterate every method in an experiment shares: the first n
// uniforms of the run's generator stream.
inline Eigen::VectorXd initial_point(std::uint64_t seed, Eigen::Index n) {
  return Rng(seed).uniform_vector(n);
}

}  // namespace mdmin
