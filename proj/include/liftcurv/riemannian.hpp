#pragma once

#include "liftcurv/errors.hpp"
#include "liftcurv/tensor.hpp"

// Coordinate-free textbook formulas on a (1,3) curvature tensor stored
// K(d, c, a, b) = [K(e_a, e_b) e_c]^d, in any frame and any dimension m.

namespace liftcurv {

// Ric(e_b, e_c) = Σ_a K(a, c, a, b)
inline Matrix ricci_from_riemann(const Tensor4& k) {
  const std::size_t m = k.dim();
  Matrix ric(m);
  for (std::size_t b = 0; b < m; ++b)
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t a = 0; a < m; ++a) ric(b, c) += k(a, c, a, b);
  return ric;
}

inline double scalar_from_ricci(const Matrix& ric, const Matrix& ginv) {
  double s = 0.0;
  for (std::size_t a = 0; a < ric.dim(); ++a)
    for (std::size_t b = 0; b < ric.dim(); ++b) s += ginv(a, b) * ric(a, b);
  return s;
}

// Schouten-type tensor L = -Ric/(m-2) + r g / (2(m-1)(m-2)).
inline Matrix brinkmann_tensor(const Matrix& ric, double scal, const Matrix& g) {
  const double m = static_cast<double>(g.dim());
  Matrix l(g.dim());
  for (std::size_t a = 0; a < g.dim(); ++a)
    for (std::size_t b = 0; b < g.dim(); ++b)
      l(a, b) = -ric(a, b) / (m - 2.0) + scal * g(a, b) / (2.0 * (m - 1.0) * (m - 2.0));
  return l;
}

// C(X,Y)Z = K(X,Y)Z + L(Y,Z)X - L(X,Z)Y + g(Y,Z)NX - g(X,Z)NY with g(NX, Y) = L(X, Y).
inline Tensor4 weyl_from_riemann(const Tensor4& k, const Matrix& g, const Matrix& ginv) {
  const std::size_t m = k.dim();
  if (m < 3) throw ConfigError("Weyl tensor needs dimension >= 3");
  const Matrix ric = ricci_from_riemann(k);
  const double scal = scalar_from_ricci(ric, ginv);
  const Matrix l = brinkmann_tensor(ric, scal, g);
  Matrix nmat(m);  // N(d, a) = [N e_a]^d
  for (std::size_t d = 0; d < m; ++d)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t e = 0; e < m; ++e) nmat(d, a) += l(a, e) * ginv(e, d);
  Tensor4 c(m);
  for (std::size_t d = 0; d < m; ++d)
    for (std::size_t cc = 0; cc < m; ++cc)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          c(d, cc, a, b) = k(d, cc, a, b) + l(b, cc) * kronecker(d, a) - l(a, cc) * kronecker(d, b) +
                           g(b, cc) * nmat(d, a) - g(a, cc) * nmat(d, b);
  return c;
}

// T(e, c, a, b) = g_ed T(d, c, a, b)
inline Tensor4 lower_first(const Tensor4& t, const Matrix& g) {
  const std::size_t m = t.dim();
  Tensor4 out(m);
  for (std::size_t e = 0; e < m; ++e)
    for (std::size_t d = 0; d < m; ++d) {
      const double ged = g(e, d);
      if (ged == 0.0) continue;
      for (std::size_t c = 0; c < m; ++c)
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b) out(e, c, a, b) += ged * t(d, c, a, b);
    }
  return out;
}

// Σ_a T(a, c, a, b): the contraction that vanishes for a Weyl tensor.
inline Matrix trace_first_third(const Tensor4& t) { return ricci_from_riemann(t); }

}  // namespace liftcurv
