#pragma once

#include <stdexcept>
#include <utility>

#include <Eigen/Core>
#include <Eigen/LU>

#include "mdmin/problem.hpp"

namespace mdmin {

// Nonsingular symmetric-split preconditioner, stored as P^{-1} -- the only
// form the iteration ever applies. The transformed operator is
// P^{-1} A P^{-T}, which stays symmetric positive definite.
struct Preconditioner {
  enum class Kind { Identity, Diagonal, DenseInverse };

  Kind kind = Kind::Identity;
  Eigen::VectorXd diag;  // entries of P^{-1} when Kind::Diagonal
  Eigen::MatrixXd inv;   // P^{-1} when Kind::DenseInverse

  static Preconditioner identity() { return Preconditioner{}; }

  static Preconditioner diagonal(Eigen::VectorXd d) {
    if (d.size() < 1) throw std::invalid_argument("Preconditioner: empty diagonal");
    if ((d.array() == 0.0).any())
      throw std::invalid_argument("Preconditioner: diagonal entry is zero");
    Preconditioner p;
    p.kind = Kind::Diagonal;
    p.diag = std::move(d);
    return p;
  }

  static Preconditioner dense_inverse(Eigen::MatrixXd M) {
    if (M.rows() < 1 || M.rows() != M.cols())
      throw std::invalid_argument("Preconditioner: P^{-1} must be square");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible())
      throw std::invalid_argument("Preconditioner: P^{-1} is singular");
    Preconditioner p;
    p.kind = Kind::DenseInverse;
    p.inv = std::move(M);
    return p;
  }

  // Row/column i of the transformed operator is scaled by 1/A_ii.
  static Preconditioner jacobi(const ProblemInstance& problem) {
    return diagonal(problem.A.diagonal().cwiseInverse());
  }

  // Variant scaling by 1/sqrt(A_ii), which gives the transformed operator a
  // unit diagonal.
  static Preconditioner jacobi_sqrt(const ProblemInstance& problem) {
    return diagonal(problem.A.diagonal().cwiseSqrt().cwiseInverse());
  }
};

// P^{-1} v, or P^{-T} v when transposed is set.
inline Eigen::VectorXd apply_precond_inv(const Preconditioner& pc, const Eigen::VectorXd& v,
                                         bool transposed) {
  switch (pc.kind) {
    case Preconditioner::Kind::Identity:
      return v;
    case Preconditioner::Kind::Diagonal:
      if (v.size() != pc.diag.size())
        throw std::invalid_argument("apply_precond_inv: dimension mismatch");
      return pc.diag.cwiseProduct(v);
    case Preconditioner::Kind::DenseInverse:
      if (v.size() != pc.inv.rows())
        throw std::invalid_argument("apply_precond_inv: dimension mismatch");
      return transposed ? Eigen::VectorXd(pc.inv.transpose() * v) : Eigen::VectorXd(pc.inv * v);
  }
  throw std::logic_error("apply_precond_inv: unknown kind");
}

// The preconditioned operator P^{-1} A P^{-T} applied as three factors; the
// transformed matrix is never formed here.
inline Eigen::VectorXd apply_atilde(const ProblemInstance& p, const Preconditioner& pc,
                                    const Eigen::VectorXd& v) {
  if (v.size() != p.dim()) throw std::invalid_argument("apply_atilde: dimension mismatch");
  return apply_precond_inv(pc, p.A * apply_precond_inv(pc, v, true), false);
}

}  // namespace mdmin
