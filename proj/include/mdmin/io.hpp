#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "mdmin/runner.hpp"

namespace mdmin {

// Dense text formats: a matrix file starts with a line holding n, followed
// by n lines of n whitespace-separated values; a vector file starts with n,
// followed by the n values.

inline Eigen::MatrixXd read_dense_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  Eigen::Index n = 0;
  if (!(in >> n) || n < 1) throw std::runtime_error("bad matrix header in " + path);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (!(in >> m(i, j))) throw std::runtime_error("truncated matrix file: " + path);
  return m;
}

inline Eigen::VectorXd read_dense_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file: " + path);
  Eigen::Index n = 0;
  if (!(in >> n) || n < 1) throw std::runtime_error("bad vector header in " + path);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(in >> v[i])) throw std::runtime_error("truncated vector file: " + path);
  return v;
}

namespace detail {

// Shortest exact decimal form; never locale-dependent in the "C" locale the
// tools run under.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_dense_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("write_dense_matrix: matrix not square");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix file: " + path);
  out << m.rows() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << detail::format_double(m(i, j));
    }
    out << '\n';
  }
}

inline void write_dense_vector(const std::string& path, const Eigen::VectorXd& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vector file: " + path);
  out << v.size() << "\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << detail::format_double(v[i]) << '\n';
}

// One row per trace record; identical configs must produce byte-identical
// output, so everything funnels through the fixed format above.
inline std::string trace_to_csv(const RunResult& result) {
  std::ostringstream out;
  out << "k,f_gap,grad_norm_sq,weighted_gnorm_sq,m_k,contraction_ratio\n";
  for (const auto& rec : result.trace) {
    out << rec.k << ',' << detail::format_double(rec.f_gap) << ','
        << detail::format_double(rec.grad_norm_sq) << ','
        << detail::format_double(rec.weighted_gnorm_sq) << ',' << rec.m_k << ','
        << detail::format_double(rec.contraction_ratio) << '\n';
  }
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace mdmin
