#pragma once

#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "liftcurv/base_geometry.hpp"
#include "liftcurv/errors.hpp"
#include "liftcurv/lift_metric.hpp"
#include "liftcurv/linalg.hpp"
#include "liftcurv/riemannian.hpp"
#include "liftcurv/scalar_jets.hpp"
#include "liftcurv/tensor.hpp"

// Coordinate-frame pipeline on TM: the lifted metric written in induced
// coordinates z = (x, y), differentiated by finite differences, and fed to the
// textbook dimension-m formulas. Uses only block values of the lifted metric
// and the base geometry.

namespace liftcurv {

// Ĝ(z) in induced coordinates (∂x first, then ∂y).
class CoordMetric {
 public:
  CoordMetric(ParamFamily params, BaseGeometry base) : params_(std::move(params)), base_(std::move(base)) {}

  std::size_t base_dim() const { return base_.dim(); }
  std::size_t dim() const { return 2 * base_.dim(); }
  const ParamFamily& params() const { return params_; }
  const BaseGeometry& base() const { return base_; }

  bool evaluable(std::span<const double> z) const {
    const std::size_t n = base_dim();
    const auto x = z.first(n);
    if (!base_.in_domain(x)) return false;
    return params_.valid(energy_density(base_.metric(x), z.subspan(n, n)));
  }

  Matrix operator()(std::span<const double> z) const {
    const std::size_t n = base_dim();
    const auto x = z.first(n);
    const auto y = z.subspan(n, n);
    const Matrix g = base_.metric(x);
    const FiberPoint fp(g, inverse(g), y);
    const MetricBlocks mb = metric_blocks(params_(fp.t), fp);
    const Matrix g0 = christoffel_0(base_.christoffel(x), y);  // Γ^h_{0i} as [h][i]
    Matrix out(2 * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double xx = mb.G1(i, j);
        double xy = mb.G3(i, j);
        for (std::size_t k = 0; k < n; ++k) {
          xx += g0(k, i) * mb.G3(k, j) + g0(k, j) * mb.G3(i, k);
          xy += g0(k, i) * mb.G2(k, j);
          for (std::size_t l = 0; l < n; ++l) xx += g0(k, i) * g0(l, j) * mb.G2(k, l);
        }
        out(i, j) = xx;
        out(i, n + j) = xy;
        out(n + j, i) = xy;
        out(n + i, n + j) = mb.G2(i, j);
      }
    return out;
  }

 private:
  ParamFamily params_;
  BaseGeometry base_;
};

inline CoordMetric coordinate_metric(const ParamFamily& params, const BaseGeometry& base) { return {params, base}; }

// The base metric g(x) alone, for checks of the difference pipeline.
class BaseCoordMetric {
 public:
  explicit BaseCoordMetric(BaseGeometry base) : base_(std::move(base)) {}

  std::size_t dim() const { return base_.dim(); }
  bool evaluable(std::span<const double> x) const { return base_.in_domain(x); }
  Matrix operator()(std::span<const double> x) const { return base_.metric(x); }

 private:
  BaseGeometry base_;
};

template <typename M>
concept CoordinateMetric = requires(const M& m, std::span<const double> z) {
  { m.dim() } -> std::convertible_to<std::size_t>;
  { m.evaluable(z) } -> std::convertible_to<bool>;
  { m(z) } -> std::convertible_to<Matrix>;
};

struct FdOptions {
  double step = 1e-4;      // scaled by (1 + |z_a|) per coordinate
  bool richardson = true;  // one refinement (4 D(h/2) - D(h)) / 3
};

// Geometry of the coordinate metric at one point. Index layouts follow the base
// module: christoffel(c, a, b) = Γ^c_ab, riemann(d, c, a, b) = R^d_cab.
struct FdGeometry {
  Vector z;
  Matrix metric;
  Matrix metric_inv;
  Tensor3 christoffel;
  Tensor4 dchristoffel;
  Tensor4 riemann;
  Matrix ricci;
  double scalar = 0.0;
  Tensor4 weyl;
};

namespace detail {

// Central differences of Ĝ at steps h_a = scale * (1 + |z_a|).
template <CoordinateMetric M>
MetricDerivatives fd_metric_derivatives(const M& cm, std::span<const double> z, double scale) {
  const std::size_t m = cm.dim();
  Vector h(m);
  for (std::size_t a = 0; a < m; ++a) h[a] = scale * (1.0 + std::abs(z[a]));
  Vector w(z.begin(), z.end());
  auto at = [&](std::initializer_list<std::pair<std::size_t, double>> shifts) {
    for (auto [a, s] : shifts) w[a] = z[a] + s * h[a];
    if (!cm.evaluable(w)) throw DomainError("finite-difference stencil leaves the metric domain");
    Matrix v = cm(w);
    for (auto [a, s] : shifts) w[a] = z[a];
    return v;
  };
  MetricDerivatives md{cm(z), Tensor3(m), Tensor4(m)};
  for (std::size_t a = 0; a < m; ++a) {
    const Matrix p = at({{a, 1.0}});
    const Matrix q = at({{a, -1.0}});
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        md.dg(a, i, j) = (p(i, j) - q(i, j)) / (2.0 * h[a]);
        md.ddg(a, a, i, j) = (p(i, j) - 2.0 * md.g(i, j) + q(i, j)) / (h[a] * h[a]);
      }
  }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      const Matrix pp = at({{a, 1.0}, {b, 1.0}});
      const Matrix pm = at({{a, 1.0}, {b, -1.0}});
      const Matrix mp = at({{a, -1.0}, {b, 1.0}});
      const Matrix mm = at({{a, -1.0}, {b, -1.0}});
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const double v = (pp(i, j) - pm(i, j) - mp(i, j) + mm(i, j)) / (4.0 * h[a] * h[b]);
          md.ddg(a, b, i, j) = v;
          md.ddg(b, a, i, j) = v;
        }
    }
  return md;
}

template <std::size_t R>
Tensor<R> richardson(const Tensor<R>& coarse, const Tensor<R>& fine) {
  Tensor<R> out = fine;
  out *= 4.0;
  out -= coarse;
  out *= 1.0 / 3.0;
  return out;
}

}  // namespace detail

template <CoordinateMetric M>
FdGeometry fd_geometry(const M& cm, std::span<const double> z, const FdOptions& opt = {}) {
  if (z.size() != cm.dim()) throw ConfigError("point dimension does not match the metric");
  if (!cm.evaluable(z)) throw DomainError("point outside the metric domain");
  detail::MetricDerivatives md = detail::fd_metric_derivatives(cm, z, opt.step);
  if (opt.richardson) {
    const detail::MetricDerivatives fine = detail::fd_metric_derivatives(cm, z, 0.5 * opt.step);
    md.dg = detail::richardson(md.dg, fine.dg);
    md.ddg = detail::richardson(md.ddg, fine.ddg);
  }
  FdGeometry out;
  out.z.assign(z.begin(), z.end());
  out.metric = md.g;
  Tensor5 unused;
  detail::christoffel_from_metric(md, out.metric_inv, out.christoffel, out.dchristoffel, unused);
  out.riemann = detail::riemann_from_christoffel(out.christoffel, out.dchristoffel);
  out.ricci = ricci_from_riemann(out.riemann);
  out.scalar = scalar_from_ricci(out.ricci, out.metric_inv);
  out.weyl = cm.dim() >= 3 ? weyl_from_riemann(out.riemann, out.metric, out.metric_inv) : Tensor4(cm.dim());
  return out;
}

inline Vector join(std::span<const double> x, std::span<const double> y) {
  Vector z(x.begin(), x.end());
  z.insert(z.end(), y.begin(), y.end());
  return z;
}

// ---- exact change between the adapted frame and induced coordinates ----

// e_A = T(A, a) ∂_a and ∂_a = S(a, A) e_A, with X_i = ∂x_i - Γ^h_{0i} ∂y_h.
// dS(A, b, C) = e_A(S(b, C)), the only non-constant entries being S(i, n+h) = Γ^h_{0i}.
struct FrameChange {
  std::size_t n = 0;
  Matrix T;
  Matrix S;
  Tensor3 dS;
};

inline FrameChange frame_change(const BaseGeometry& base, std::span<const double> x, std::span<const double> y) {
  const std::size_t n = base.dim();
  const BasePoint p = base.evaluate(x);
  const Matrix n0 = christoffel_0(p.christoffel, y);  // [h][i]
  FrameChange fc{n, identity(2 * n), identity(2 * n), Tensor3(2 * n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t h = 0; h < n; ++h) {
      fc.T(i, n + h) = -n0(h, i);
      fc.S(i, n + h) = n0(h, i);
      for (std::size_t j = 0; j < n; ++j) {
        // X_j(Γ^h_{0i}) = y^k ∂_j Γ^h_ki - Γ^m_{0j} Γ^h_mi ;  Y_j(Γ^h_{0i}) = Γ^h_ji
        double xs = 0.0;
        for (std::size_t k = 0; k < n; ++k) xs += y[k] * p.dchristoffel(j, h, k, i) - n0(k, j) * p.christoffel(h, k, i);
        fc.dS(j, i, n + h) = xs;
        fc.dS(n + j, i, n + h) = p.christoffel(h, j, i);
      }
    }
  return fc;
}

namespace detail {

// out(.., a, ..) = Σ_A M(a, A) in(.., A, ..) on the given slot.
template <std::size_t R>
Tensor<R> apply_slot(const Tensor<R>& in, std::size_t slot, const Matrix& M) {
  const std::size_t m = in.dim();
  std::size_t stride = 1;
  for (std::size_t r = slot + 1; r < R; ++r) stride *= m;
  Tensor<R> out(m);
  auto src = in.data();
  auto dst = out.data();
  for (std::size_t o = 0; o < dst.size(); ++o) {
    const std::size_t a = (o / stride) % m;
    const std::size_t base = o - a * stride;
    double s = 0.0;
    for (std::size_t A = 0; A < m; ++A) s += M(a, A) * src[base + A * stride];
    dst[o] = s;
  }
  return out;
}

inline Matrix transpose(const Matrix& m) {
  Matrix t(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) t(i, j) = m(j, i);
  return t;
}

}  // namespace detail

// (1,3) tensor K(d, c, a, b) from the adapted frame to coordinates.
inline Tensor4 to_coordinates(const Tensor4& k, const FrameChange& fc) {
  Tensor4 out = detail::apply_slot(k, 0, detail::transpose(fc.T));
  for (std::size_t s = 1; s < 4; ++s) out = detail::apply_slot(out, s, fc.S);
  return out;
}

inline Tensor4 to_adapted(const Tensor4& k, const FrameChange& fc) {
  Tensor4 out = detail::apply_slot(k, 0, detail::transpose(fc.S));
  for (std::size_t s = 1; s < 4; ++s) out = detail::apply_slot(out, s, fc.T);
  return out;
}

// Bilinear form G(e_A, e_B) to coordinates and back.
inline Matrix to_coordinates(const Matrix& g, const FrameChange& fc) {
  return detail::apply_slot(detail::apply_slot(g, 0, fc.S), 1, fc.S);
}

inline Matrix to_adapted(const Matrix& g, const FrameChange& fc) {
  return detail::apply_slot(detail::apply_slot(g, 0, fc.T), 1, fc.T);
}

// ∇_{e_A} e_B = ω(C, A, B) e_C  →  Γ^c_ab = S(a,A) [e_A(S(b,C)) + S(b,B) ω(C,A,B)] T(C,c).
inline Tensor3 connection_to_coordinates(const Tensor3& omega, const FrameChange& fc) {
  const std::size_t m = omega.dim();
  Tensor3 inner(m);  // [C][A][b]
  for (std::size_t C = 0; C < m; ++C)
    for (std::size_t A = 0; A < m; ++A)
      for (std::size_t b = 0; b < m; ++b) {
        double s = fc.dS(A, b, C);
        for (std::size_t B = 0; B < m; ++B) s += fc.S(b, B) * omega(C, A, B);
        inner(C, A, b) = s;
      }
  Tensor3 out(m);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        double s = 0.0;
        for (std::size_t C = 0; C < m; ++C) {
          const double tc = fc.T(C, c);
          if (tc == 0.0) continue;
          for (std::size_t A = 0; A < m; ++A) s += fc.S(a, A) * inner(C, A, b) * tc;
        }
        out(c, a, b) = s;
      }
  return out;
}

// ---- comparison ----

// max|a - b| / max(|b|_∞, floor)
template <std::size_t R>
double relative_diff(const Tensor<R>& a, const Tensor<R>& b, double floor) {
  return max_abs_diff(a, b) / std::max(b.max_abs(), floor);
}

// log2(e_h / e_{h/2}); NaN when the finer error is already at round-off.
inline double convergence_order(double err_h, double err_half, double noise = 1e-11) {
  if (!(err_half > noise) || !(err_h > 0.0)) return std::nan("");
  return std::log2(err_h / err_half);
}

}  // namespace liftcurv
