#pragma once

#include <Eigen/Dense>

#include "liftcurv/errors.hpp"
#include "liftcurv/tensor.hpp"

namespace liftcurv {

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(i, j);
  return out;
}

inline Matrix from_eigen(const Eigen::MatrixXd& m) {
  assert(m.rows() == m.cols());
  Matrix out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

// Inverse of a square matrix; throws DegenerateError when |det| <= min_abs_det.
inline Matrix inverse(const Matrix& m, double min_abs_det = 0.0) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(to_eigen(m));
  const double det = lu.determinant();
  if (!(std::abs(det) > min_abs_det)) throw DegenerateError("singular matrix (det = " + std::to_string(det) + ")");
  return from_eigen(lu.inverse());
}

inline double determinant(const Matrix& m) { return to_eigen(m).determinant(); }

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.dim();
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

// Condition number in the 2-norm.
inline double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

}  // namespace liftcurv
