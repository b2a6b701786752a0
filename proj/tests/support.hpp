#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "mdmin/problem.hpp"
#include "mdmin/rng.hpp"

namespace testsupport {

// SPD problem with a prescribed condition number: A = Q diag(lambda) Q' with
// log-spaced eigenvalues in [1, kappa] and a Haar-ish Q from the QR of a
// Gaussian matrix. The stored minimizer makes the f-gap exact.
inline mdmin::ProblemInstance conditioned_problem(std::uint64_t seed, Eigen::Index n,
                                                  double kappa) {
  mdmin::Rng rng(seed);
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) G(i, j) = rng.standard_normal();
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  Eigen::VectorXd lam(n);
  for (Eigen::Index i = 0; i < n; ++i)
    lam[i] = (n == 1) ? 1.0 : std::exp(std::log(kappa) * static_cast<double>(i) / (n - 1));
  Eigen::MatrixXd A = Q * lam.asDiagonal() * Q.transpose();
  A = (0.5 * (A + A.transpose())).eval();
  const Eigen::VectorXd x_star = rng.normal_vector(n);
  Eigen::VectorXd b = A * x_star;
  return mdmin::make_problem(std::move(A), std::move(b), x_star);
}

inline double rel_diff(const Eigen::VectorXd& x, const Eigen::VectorXd& ref) {
  return (x - ref).norm() / (1.0 + ref.norm());
}

}  // namespace testsupport
