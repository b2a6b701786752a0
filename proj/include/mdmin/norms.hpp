#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mdmin/errors.hpp"
#include "mdmin/preconditioner.hpp"
#include "mdmin/problem.hpp"
#include "mdmin/spectrum.hpp"

namespace mdmin {

// Weight N(.) of the minimized gradient norm, held as Laurent coefficients
// {power -> coefficient}. The lowest admissible power is -1, so that
// lambda * N(lambda) is an ordinary polynomial and the step system assembles
// from operator applications alone.
//
// The classic family lambda^(2l-1) with l in {0, 1/2, 1, 3/2, ...} is one
// coefficient; mixed coefficients cover the delayed weighted gradient merit
// norms and similar constructions.
struct NormSpec {
  std::map<int, double> coeffs;
  // Set when the weight is a single (positively scaled) power, in which case
  // the power is 2*ell - 1. Bookkeeping only: the rate bounds that involve
  // condition-number powers need it.
  std::optional<double> ell;

  static NormSpec from_ell(double ell_value) {
    const double two_ell = 2.0 * ell_value;
    if (!(ell_value >= 0.0) || std::nearbyint(two_ell) != two_ell)
      throw std::invalid_argument("NormSpec: ell must be a nonnegative half-integer");
    NormSpec n;
    n.coeffs[static_cast<int>(two_ell) - 1] = 1.0;
    n.ell = ell_value;
    return n;
  }

  // (1-mu) lambda^{-1} + 2 mu: the merit weight of the generalized delayed
  // weighted gradient family. mu = 0 degenerates to the plain inverse weight.
  static NormSpec gdwgm(double mu) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("NormSpec: mu must lie in [0,1]");
    std::map<int, double> c;
    if (mu != 1.0) c[-1] = 1.0 - mu;
    if (mu != 0.0) c[0] = 2.0 * mu;
    return from_coeffs(std::move(c));
  }

  static NormSpec from_coeffs(std::map<int, double> c) {
    for (auto it = c.begin(); it != c.end();) {
      if (it->second == 0.0)
        it = c.erase(it);
      else
        ++it;
    }
    if (c.empty()) throw std::invalid_argument("NormSpec: no nonzero coefficients");
    if (c.begin()->first < -1)
      throw std::invalid_argument("NormSpec: powers below -1 are not representable");
    NormSpec n;
    n.coeffs = std::move(c);
    if (n.coeffs.size() == 1 && n.coeffs.begin()->second > 0.0)
      n.ell = 0.5 * (n.coeffs.begin()->first + 1);
    return n;
  }

  int min_power() const { return coeffs.begin()->first; }
  int max_power() const { return coeffs.rbegin()->first; }
  bool has_inverse_term() const { return coeffs.count(-1) > 0; }

  double evaluate(double lambda) const {
    double v = 0.0;
    for (const auto& [j, c] : coeffs) v += c * std::pow(lambda, j);
    return v;
  }

  // True when positivity on any positive spectrum holds by inspection
  // (all coefficients nonnegative, at least one positive).
  bool trivially_positive() const {
    for (const auto& [j, c] : coeffs)
      if (c < 0.0) return false;
    return true;
  }
};

// Definition-level admissibility: N must be strictly positive on the
// spectral interval of the preconditioned operator, checked on a 1000-point
// grid over [lambda_min, lambda_max].
inline void validate_norm_positive(const NormSpec& norm, const SpectrumInfo& spectrum) {
  constexpr int kGridPoints = 1000;
  const double lo = spectrum.lambda_min;
  const double hi = spectrum.lambda_max;
  for (int i = 0; i < kGridPoints; ++i) {
    const double t = (kGridPoints == 1) ? 0.0 : static_cast<double>(i) / (kGridPoints - 1);
    const double lambda = lo + t * (hi - lo);
    if (!(norm.evaluate(lambda) > 0.0))
      throw std::invalid_argument("NormSpec: weight is not positive on the spectrum");
  }
}

// M(Atilde) v where M(lambda) = lambda * N(lambda). Every power of M is
// nonnegative, so this is a chain of operator applications with a running
// accumulation; cost is max_power()+1 applications.
inline Eigen::VectorXd shifted_poly_apply(const NormSpec& norm, const ProblemInstance& p,
                                          const Preconditioner& pc, const Eigen::VectorXd& v) {
  const int top = norm.max_power() + 1;  // highest power of M
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd power = v;  // Atilde^q v, starting at q = 0
  for (int q = 0;; ++q) {
    const auto it = norm.coeffs.find(q - 1);
    if (it != norm.coeffs.end()) acc += it->second * power;
    if (q == top) break;
    power = apply_atilde(p, pc, power);
  }
  return acc;
}

// v' N(Atilde) v. The lambda^{-1} term takes one dense symmetric solve, so
// it is restricted to desk scale by dim_cap; nonnegative powers apply the
// operator directly.
inline double weighted_norm_sq(const NormSpec& norm, const ProblemInstance& p,
                               const Preconditioner& pc, const Eigen::VectorXd& v,
                               Eigen::Index dim_cap = 2000) {
  if (v.size() != p.dim()) throw std::invalid_argument("weighted_norm_sq: dimension mismatch");
  double total = 0.0;
  if (norm.has_inverse_term()) {
    if (p.dim() > dim_cap)
      throw unsupported_size_error("weighted_norm_sq: inverse term exceeds the dense cap");
    Eigen::MatrixXd at = assemble_atilde(p, pc);
    at = (0.5 * (at + at.transpose())).eval();
    const Eigen::LLT<Eigen::MatrixXd> llt(at);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("weighted_norm_sq: preconditioned operator is not definite");
    total += norm.coeffs.at(-1) * v.dot(llt.solve(v));
  }
  Eigen::VectorXd power = v;  // Atilde^j v
  for (int j = 0; j <= norm.max_power(); ++j) {
    if (j > 0) power = apply_atilde(p, pc, power);
    const auto it = norm.coeffs.find(j);
    if (it != norm.coeffs.end()) total += it->second * v.dot(power);
  }
  return total;
}

// Normal equations of the step minimization.
struct GramSystem {
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
};

// Assembly intermediates kept alive for the step diagnostics:
// U = P^{-1} W, AtU = Atilde U, Wbar = M(Atilde) U.
struct GramDetail {
  GramSystem system;
  Eigen::MatrixXd U;
  Eigen::MatrixXd AtU;
  Eigen::MatrixXd Wbar;
};

// With u_i = P^{-1} w_i and wbar_i = M(Atilde) u_i:
//   gram_ij = wbar_i . (Atilde u_j)  =  u_i' Atilde N(Atilde) Atilde u_j
//   rhs_i   = wbar_i . gtilde        =  u_i' N(Atilde) Atilde gtilde
// For the pure power N = Atilde^(2l-1) these are exactly the
// Atilde^(2l+1) / Atilde^(2l) moments of the step formula.
inline GramDetail assemble_gram_detail(const NormSpec& norm, const ProblemInstance& p,
                                       const Preconditioner& pc, const Eigen::MatrixXd& W,
                                       const Eigen::VectorXd& gtilde) {
  const Eigen::Index n = p.dim();
  if (W.rows() != n || gtilde.size() != n)
    throw std::invalid_argument("assemble_gram: dimension mismatch");
  if (W.cols() < 1) throw std::invalid_argument("assemble_gram: empty direction matrix");

  const Eigen::Index m = W.cols();
  GramDetail d;
  d.U.resize(n, m);
  d.AtU.resize(n, m);
  d.Wbar.resize(n, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    d.U.col(i) = apply_precond_inv(pc, W.col(i), false);
    d.AtU.col(i) = apply_atilde(p, pc, d.U.col(i));
    d.Wbar.col(i) = shifted_poly_apply(norm, p, pc, d.U.col(i));
  }
  Eigen::MatrixXd g = d.Wbar.transpose() * d.AtU;
  d.system.gram = 0.5 * (g + g.transpose());
  d.system.rhs = d.Wbar.transpose() * gtilde;
  return d;
}

inline GramSystem assemble_gram(const NormSpec& norm, const ProblemInstance& p,
                                const Preconditioner& pc, const Eigen::MatrixXd& W,
                                const Eigen::VectorXd& gtilde) {
  return assemble_gram_detail(norm, p, pc, W, gtilde).system;
}

}  // namespace mdmin
