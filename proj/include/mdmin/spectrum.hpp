#pragma once

#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "mdmin/errors.hpp"
#include "mdmin/preconditioner.hpp"
#include "mdmin/problem.hpp"

namespace mdmin {

// Extreme eigenvalues of the preconditioned operator and their ratio.
struct SpectrumInfo {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double kappa = 0.0;
};

// Dense assembly of P^{-1} A P^{-T}. Diagnostics only; the iteration itself
// never needs the transformed matrix.
inline Eigen::MatrixXd assemble_atilde(const ProblemInstance& p, const Preconditioner& pc) {
  switch (pc.kind) {
    case Preconditioner::Kind::Identity:
      return p.A;
    case Preconditioner::Kind::Diagonal:
      if (pc.diag.size() != p.dim())
        throw std::invalid_argument("assemble_atilde: dimension mismatch");
      return pc.diag.asDiagonal() * p.A * pc.diag.asDiagonal();
    case Preconditioner::Kind::DenseInverse:
      if (pc.inv.rows() != p.dim())
        throw std::invalid_argument("assemble_atilde: dimension mismatch");
      return pc.inv * p.A * pc.inv.transpose();
  }
  throw std::logic_error("assemble_atilde: unknown kind");
}

// Full dense symmetric eigendecomposition; exact extremes keep the rate
// bounds sharp. The cap guards against use at scales this path was never
// meant for.
inline SpectrumInfo extremal_eigenvalues(const ProblemInstance& p, const Preconditioner& pc,
                                         Eigen::Index dim_cap = 2000) {
  if (p.dim() > dim_cap)
    throw unsupported_size_error("extremal_eigenvalues: dimension exceeds the dense cap");
  Eigen::MatrixXd at = assemble_atilde(p, pc);
  at = (0.5 * (at + at.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(at, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("extremal_eigenvalues: eigendecomposition failed");
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0))
    throw std::runtime_error("extremal_eigenvalues: operator is numerically indefinite");
  return SpectrumInfo{hi, lo, hi / lo};
}

}  // namespace mdmin
