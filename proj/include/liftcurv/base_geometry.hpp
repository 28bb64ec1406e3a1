#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liftcurv/errors.hpp"
#include "liftcurv/linalg.hpp"
#include "liftcurv/tensor.hpp"

namespace liftcurv {

enum class BaseKind { FlatCartesian, FlatCurvilinear, SpaceForm, Perturbed };

// Everything the lifted-metric formulas need from the base manifold at one chart point.
//
// Index layout: christoffel(h, i, j) = Γ^h_ij, dchristoffel(m, h, i, j) = ∂_m Γ^h_ij,
// riemann(h, k, i, j) = R^h_kij with R(∂_i, ∂_j)∂_k = R^h_kij ∂_h, and
// nabla_riemann(m, h, k, i, j) = ∇_m R^h_kij.
struct BasePoint {
  std::size_t n = 0;
  Vector x;
  Matrix g;
  Matrix ginv;
  Tensor3 christoffel;
  Tensor4 dchristoffel;
  Tensor4 riemann;
  Tensor5 nabla_riemann;
};

namespace detail {

// R^h_kij = ∂_i Γ^h_jk - ∂_j Γ^h_ik + Γ^h_il Γ^l_jk - Γ^h_jl Γ^l_ik
inline Tensor4 riemann_from_christoffel(const Tensor3& gam, const Tensor4& dgam) {
  const std::size_t n = gam.dim();
  Tensor4 r(n);
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double s = dgam(i, h, j, k) - dgam(j, h, i, k);
          for (std::size_t l = 0; l < n; ++l) s += gam(h, i, l) * gam(l, j, k) - gam(h, j, l) * gam(l, i, k);
          r(h, k, i, j) = s;
        }
  return r;
}

// Christoffels and their first two derivatives from a metric with derivatives up to order three.
struct MetricDerivatives {
  Matrix g;
  Tensor3 dg;    // [m][i][j]
  Tensor4 ddg;   // [l][m][i][j]
};

inline void christoffel_from_metric(const MetricDerivatives& md, Matrix& ginv, Tensor3& gam, Tensor4& dgam,
                                    Tensor5& ddgam) {
  const std::size_t n = md.g.dim();
  ginv = inverse(md.g);
  // first kind: Γ_{k,ij} = ½(∂_i g_jk + ∂_j g_ik - ∂_k g_ij); third derivatives of g vanish for our charts
  Tensor3 first(n);
  Tensor4 dfirst(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        first(k, i, j) = 0.5 * (md.dg(i, j, k) + md.dg(j, i, k) - md.dg(k, i, j));
        for (std::size_t m = 0; m < n; ++m)
          dfirst(m, k, i, j) = 0.5 * (md.ddg(m, i, j, k) + md.ddg(m, j, i, k) - md.ddg(m, k, i, j));
      }
  // ∂_m g^{-1} = -g^{-1} ∂_m g g^{-1};  ∂_l ∂_m g^{-1} = -(∂_l g^{-1} ∂_m g g^{-1} + g^{-1} ∂_l∂_m g g^{-1} + g^{-1} ∂_m g ∂_l g^{-1})
  Tensor3 dginv(n);
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = 0; q < n; ++q) s -= ginv(a, p) * md.dg(m, p, q) * ginv(q, b);
        dginv(m, a, b) = s;
      }
  Tensor4 ddginv(n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t m = 0; m < n; ++m)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          double s = 0.0;
          for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q)
              s -= dginv(l, a, p) * md.dg(m, p, q) * ginv(q, b) + ginv(a, p) * md.ddg(l, m, p, q) * ginv(q, b) +
                   ginv(a, p) * md.dg(m, p, q) * dginv(l, q, b);
          ddginv(l, m, a, b) = s;
        }
  gam = Tensor3(n);
  dgam = Tensor4(n);
  ddgam = Tensor5(n);
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          gam(h, i, j) += ginv(h, k) * first(k, i, j);
          for (std::size_t m = 0; m < n; ++m) {
            dgam(m, h, i, j) += dginv(m, h, k) * first(k, i, j) + ginv(h, k) * dfirst(m, k, i, j);
            for (std::size_t l = 0; l < n; ++l)
              ddgam(l, m, h, i, j) += ddginv(l, m, h, k) * first(k, i, j) + dginv(m, h, k) * dfirst(l, k, i, j) +
                                      dginv(l, h, k) * dfirst(m, k, i, j);
          }
        }
  // ∂_l ∂_m Γ_{k,ij} involves third derivatives of g, which vanish for the quadratic perturbation
}

// ∇_m R^h_kij from Γ, ∂Γ, ∂∂Γ (ddgam indexed [l][m][h][i][j] = ∂_l ∂_m Γ^h_ij).
inline Tensor5 nabla_riemann_from(const Tensor3& gam, const Tensor4& dgam, const Tensor5& ddgam, const Tensor4& r) {
  const std::size_t n = gam.dim();
  Tensor5 dr(n);
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t h = 0; h < n; ++h)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            double s = ddgam(m, i, h, j, k) - ddgam(m, j, h, i, k);
            for (std::size_t l = 0; l < n; ++l)
              s += dgam(m, h, i, l) * gam(l, j, k) + gam(h, i, l) * dgam(m, l, j, k) - dgam(m, h, j, l) * gam(l, i, k) -
                   gam(h, j, l) * dgam(m, l, i, k);
            // covariantize
            for (std::size_t a = 0; a < n; ++a)
              s += gam(h, m, a) * r(a, k, i, j) - gam(a, m, k) * r(h, a, i, j) - gam(a, m, i) * r(h, k, a, j) -
                   gam(a, m, j) * r(h, k, i, a);
            dr(m, h, k, i, j) = s;
          }
  return dr;
}

}  // namespace detail

// A single chart of a Riemannian manifold (M, g) with closed-form geometry.
class BaseGeometry {
 public:
  static constexpr double kCurvilinearAmplitude = 0.3;

  static BaseGeometry flat_cartesian(std::size_t n) { return BaseGeometry(BaseKind::FlatCartesian, n, 0.0); }
  static BaseGeometry flat_curvilinear(std::size_t n) {
    return BaseGeometry(BaseKind::FlatCurvilinear, n, kCurvilinearAmplitude);
  }
  static BaseGeometry space_form(std::size_t n, double c) { return BaseGeometry(BaseKind::SpaceForm, n, c); }
  static BaseGeometry perturbed(std::size_t n, double eps) { return BaseGeometry(BaseKind::Perturbed, n, eps); }

  // "flat" | "flat-curvilinear" | "sphere:<c>" | "perturbed:<eps>"
  static BaseGeometry parse(std::string_view spec, std::size_t n) {
    auto param = [&](std::string_view prefix) {
      const std::string rest(spec.substr(prefix.size()));
      try {
        std::size_t pos = 0;
        const double v = std::stod(rest, &pos);
        if (pos != rest.size()) throw ConfigError("");
        return v;
      } catch (const std::exception&) {
        throw ConfigError("invalid base parameter in '" + std::string(spec) + "'");
      }
    };
    if (spec == "flat" || spec == "flat-cartesian") return flat_cartesian(n);
    if (spec == "flat-curvilinear") return flat_curvilinear(n);
    if (spec.starts_with("sphere:")) return space_form(n, param("sphere:"));
    if (spec.starts_with("space-form:")) return space_form(n, param("space-form:"));
    if (spec.starts_with("perturbed:")) return perturbed(n, param("perturbed:"));
    throw ConfigError("unknown base '" + std::string(spec) + "' (expected flat, flat-curvilinear, sphere:c, perturbed:eps)");
  }

  BaseKind kind() const { return kind_; }
  std::size_t dim() const { return n_; }
  double parameter() const { return param_; }

  std::string label() const {
    switch (kind_) {
      case BaseKind::FlatCartesian: return "flat";
      case BaseKind::FlatCurvilinear: return "flat-curvilinear";
      case BaseKind::SpaceForm: return "sphere:" + format_param();
      case BaseKind::Perturbed: return "perturbed:" + format_param();
    }
    return "?";
  }

  // True when the Levi-Civita connection is known to have parallel curvature.
  bool parallel_curvature() const { return kind_ != BaseKind::Perturbed; }

  bool in_domain(std::span<const double> x) const {
    if (x.size() != n_) return false;
    if (kind_ == BaseKind::SpaceForm) return 1.0 + 0.25 * param_ * norm2(x) > 1e-6;
    return true;
  }

  Matrix metric(std::span<const double> x) const {
    check(x);
    switch (kind_) {
      case BaseKind::FlatCartesian: return identity(n_);
      case BaseKind::FlatCurvilinear: {
        const Matrix j = curvilinear_jacobian(x);
        Matrix g(n_);
        for (std::size_t a = 0; a < n_; ++a)
          for (std::size_t b = 0; b < n_; ++b)
            for (std::size_t k = 0; k < n_; ++k) g(a, b) += j(k, a) * j(k, b);
        return g;
      }
      case BaseKind::SpaceForm: {
        const double lam = space_form_lambda(x);
        Matrix g = identity(n_);
        g *= lam * lam;
        return g;
      }
      case BaseKind::Perturbed: return perturbed_metric(x).g;
    }
    return {};
  }

  Tensor3 christoffel(std::span<const double> x) const {
    check(x);
    switch (kind_) {
      case BaseKind::FlatCartesian: return Tensor3(n_);
      case BaseKind::FlatCurvilinear: {
        Tensor3 gam;
        Tensor4 dgam;
        curvilinear_christoffel(x, gam, dgam);
        return gam;
      }
      case BaseKind::SpaceForm: {
        Tensor3 gam;
        Tensor4 dgam;
        space_form_christoffel(x, gam, dgam);
        return gam;
      }
      case BaseKind::Perturbed: {
        Matrix ginv;
        Tensor3 gam;
        Tensor4 dgam;
        Tensor5 ddgam;
        detail::christoffel_from_metric(perturbed_metric(x), ginv, gam, dgam, ddgam);
        return gam;
      }
    }
    return {};
  }

  BasePoint evaluate(std::span<const double> x) const {
    check(x);
    BasePoint p;
    p.n = n_;
    p.x.assign(x.begin(), x.end());
    p.nabla_riemann = Tensor5(n_);
    switch (kind_) {
      case BaseKind::FlatCartesian:
        p.g = identity(n_);
        p.christoffel = Tensor3(n_);
        p.dchristoffel = Tensor4(n_);
        break;
      case BaseKind::FlatCurvilinear:
        p.g = metric(x);
        curvilinear_christoffel(x, p.christoffel, p.dchristoffel);
        break;
      case BaseKind::SpaceForm:
        p.g = metric(x);
        space_form_christoffel(x, p.christoffel, p.dchristoffel);
        break;
      case BaseKind::Perturbed: {
        Tensor5 ddgam;
        const auto md = perturbed_metric(x);
        p.g = md.g;
        detail::christoffel_from_metric(md, p.ginv, p.christoffel, p.dchristoffel, ddgam);
        p.riemann = detail::riemann_from_christoffel(p.christoffel, p.dchristoffel);
        p.nabla_riemann = detail::nabla_riemann_from(p.christoffel, p.dchristoffel, ddgam, p.riemann);
        return p;
      }
    }
    p.ginv = inverse(p.g);
    // flat charts and space forms have parallel curvature: ∇R = 0 exactly
    p.riemann = detail::riemann_from_christoffel(p.christoffel, p.dchristoffel);
    return p;
  }

 private:
  BaseGeometry(BaseKind kind, std::size_t n, double param) : kind_(kind), n_(n), param_(param) {
    if (n < 2) throw ConfigError("base dimension must be at least 2 (got " + std::to_string(n) + ")");
  }

  std::string format_param() const {
    std::string s = std::to_string(param_);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  static double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  }

  void check(std::span<const double> x) const {
    if (x.size() != n_) throw ConfigError("point dimension mismatch");
    if (!in_domain(x)) throw DomainError("point outside the chart domain of base " + label());
  }

  // λ = 1 / (1 + (c/4)|x|²)
  double space_form_lambda(std::span<const double> x) const { return 1.0 / (1.0 + 0.25 * param_ * norm2(x)); }

  // g = λ² δ = e^{2φ} δ:  Γ^h_ij = δ^h_i φ_j + δ^h_j φ_i - δ_ij φ_h
  void space_form_christoffel(std::span<const double> x, Tensor3& gam, Tensor4& dgam) const {
    const double c = param_;
    const double lam = space_form_lambda(x);
    Vector phi(n_);
    Matrix dphi(n_);  // [m][i] = ∂_m φ_i
    for (std::size_t i = 0; i < n_; ++i) phi[i] = -0.5 * c * lam * x[i];
    for (std::size_t m = 0; m < n_; ++m)
      for (std::size_t i = 0; i < n_; ++i)
        dphi(m, i) = -0.5 * c * lam * kronecker(m, i) + 0.25 * c * c * lam * lam * x[i] * x[m];
    gam = Tensor3(n_);
    dgam = Tensor4(n_);
    for (std::size_t h = 0; h < n_; ++h)
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
          gam(h, i, j) = kronecker(h, i) * phi[j] + kronecker(h, j) * phi[i] - kronecker(i, j) * phi[h];
          for (std::size_t m = 0; m < n_; ++m)
            dgam(m, h, i, j) =
                kronecker(h, i) * dphi(m, j) + kronecker(h, j) * dphi(m, i) - kronecker(i, j) * dphi(m, h);
        }
  }

  // Pullback of the Euclidean metric under x~_k = x_k + a sin(x_{k+1}), indices cyclic.
  Matrix curvilinear_jacobian(std::span<const double> x) const {
    Matrix j = identity(n_);
    for (std::size_t k = 0; k < n_; ++k) j(k, (k + 1) % n_) += param_ * std::cos(x[(k + 1) % n_]);
    return j;
  }

  // Γ^h_ij = (J^{-1})^h_k ∂_i ∂_j x~_k
  void curvilinear_christoffel(std::span<const double> x, Tensor3& gam, Tensor4& dgam) const {
    const double a = param_;
    const Matrix jac = curvilinear_jacobian(x);
    const Matrix jinv = inverse(jac);
    // ∂_i ∂_j x~_k = -a sin(x_{k+1}) δ_{i,k+1} δ_{j,k+1};  ∂_m J_{ki} = same pattern
    auto next = [&](std::size_t k) { return (k + 1) % n_; };
    Tensor3 hess(n_);  // [k][i][j]
    Tensor4 dhess(n_); // [m][k][i][j]
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t q = next(k);
      hess(k, q, q) = -a * std::sin(x[q]);
      dhess(q, k, q, q) = -a * std::cos(x[q]);
    }
    // ∂_m J^{-1} = -J^{-1} (∂_m J) J^{-1}, with (∂_m J)_{ki} = hess(k, m, i)
    Tensor3 djinv(n_);  // [m][h][k]
    for (std::size_t m = 0; m < n_; ++m)
      for (std::size_t h = 0; h < n_; ++h)
        for (std::size_t k = 0; k < n_; ++k) {
          double s = 0.0;
          for (std::size_t p = 0; p < n_; ++p)
            for (std::size_t q = 0; q < n_; ++q) s -= jinv(h, p) * hess(p, m, q) * jinv(q, k);
          djinv(m, h, k) = s;
        }
    gam = Tensor3(n_);
    dgam = Tensor4(n_);
    for (std::size_t h = 0; h < n_; ++h)
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
          for (std::size_t k = 0; k < n_; ++k) {
            gam(h, i, j) += jinv(h, k) * hess(k, i, j);
            for (std::size_t m = 0; m < n_; ++m)
              dgam(m, h, i, j) += djinv(m, h, k) * hess(k, i, j) + jinv(h, k) * dhess(m, k, i, j);
          }
  }

  // g_ii = 1 + ε x_{i+1}² (cyclic), off-diagonal zero. Not conformally flat for n >= 4.
  detail::MetricDerivatives perturbed_metric(std::span<const double> x) const {
    detail::MetricDerivatives md{identity(n_), Tensor3(n_), Tensor4(n_)};
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t q = (i + 1) % n_;
      md.g(i, i) += param_ * x[q] * x[q];
      md.dg(q, i, i) = 2.0 * param_ * x[q];
      md.ddg(q, q, i, i) = 2.0 * param_;
    }
    return md;
  }

  BaseKind kind_;
  std::size_t n_;
  double param_;
};

inline BaseGeometry make_base(BaseKind kind, std::size_t n, double param = 0.0) {
  switch (kind) {
    case BaseKind::FlatCartesian: return BaseGeometry::flat_cartesian(n);
    case BaseKind::FlatCurvilinear: return BaseGeometry::flat_curvilinear(n);
    case BaseKind::SpaceForm: return BaseGeometry::space_form(n, param);
    case BaseKind::Perturbed: return BaseGeometry::perturbed(n, param);
  }
  throw ConfigError("unknown base kind");
}

// ---- contractions with the fiber coordinate y ----

// Contract the lower index in position `slot` of a tensor with y.
template <std::size_t Rank>
  requires(Rank >= 2)
Tensor<Rank - 1> contract_y(const Tensor<Rank>& t, std::size_t slot, std::span<const double> y) {
  const std::size_t n = t.dim();
  assert(slot < Rank && y.size() == n);
  Tensor<Rank - 1> out(n);
  auto src = t.data();
  auto dst = out.data();
  // stride of `slot` in row-major layout
  std::size_t stride = 1;
  for (std::size_t r = slot + 1; r < Rank; ++r) stride *= n;
  for (std::size_t o = 0; o < dst.size(); ++o) {
    const std::size_t low = o % stride;
    const std::size_t high = o / stride;
    const std::size_t base = high * stride * n + low;
    double s = 0.0;
    for (std::size_t a = 0; a < n; ++a) s += src[base + a * stride] * y[a];
    dst[o] = s;
  }
  return out;
}

// g_{0i} = y^k g_ki
inline Vector contract_y(const Matrix& g, std::span<const double> y) {
  const std::size_t n = g.dim();
  Vector out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) out[i] += y[k] * g(k, i);
  return out;
}

// Γ^h_{0i} = y^k Γ^h_ki as a matrix [h][i]
inline Matrix christoffel_0(const Tensor3& gam, std::span<const double> y) { return contract_y(gam, 1, y); }

// R^l_{0jk} = y^m R^l_mjk, layout [l][j][k]
inline Tensor3 riemann_0(const Tensor4& r, std::span<const double> y) { return contract_y(r, 1, y); }

// R_{i0jk} = g_il R^l_{0jk}, layout [i][j][k]
inline Tensor3 riemann_lowered_0(const Matrix& g, const Tensor3& r0) {
  const std::size_t n = g.dim();
  Tensor3 out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) out(i, j, k) += g(i, l) * r0(l, j, k);
  return out;
}

// Sectional curvature of the coordinate plane (e_i, e_j).
inline double sectional_curvature(const BasePoint& p, std::size_t i, std::size_t j) {
  double num = 0.0;
  for (std::size_t h = 0; h < p.n; ++h) num += p.g(h, i) * p.riemann(h, j, i, j);
  return num / (p.g(i, i) * p.g(j, j) - p.g(i, j) * p.g(i, j));
}

// c (g_jk δ^h_i - g_ik δ^h_j)
inline Tensor4 constant_curvature_tensor(const Matrix& g, double c) {
  const std::size_t n = g.dim();
  Tensor4 r(n);
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(h, k, i, j) = c * (g(j, k) * kronecker(h, i) - g(i, k) * kronecker(h, j));
  return r;
}

struct ConstantCurvatureFit {
  bool constant = false;
  double c = 0.0;
  double residual = 0.0;  // max over samples of |R - c (g δ - g δ)|
};

// Least-squares fit of a single c over all samples, then a sup-norm residual test.
inline ConstantCurvatureFit is_constant_curvature(const BaseGeometry& base, const std::vector<Vector>& samples,
                                                  double tol = 1e-6) {
  if (samples.size() < 2) throw ConfigError("constant-curvature test needs at least two sample points");
  std::vector<BasePoint> pts;
  double num = 0.0;
  double den = 0.0;
  for (const auto& x : samples) {
    pts.push_back(base.evaluate(x));
    const Tensor4 unit = constant_curvature_tensor(pts.back().g, 1.0);
    auto r = pts.back().riemann.data();
    auto u = unit.data();
    for (std::size_t i = 0; i < r.size(); ++i) {
      num += r[i] * u[i];
      den += u[i] * u[i];
    }
  }
  ConstantCurvatureFit fit;
  fit.c = den > 0.0 ? num / den : 0.0;
  for (const auto& p : pts)
    fit.residual = std::max(fit.residual, max_abs_diff(p.riemann, constant_curvature_tensor(p.g, fit.c)));
  fit.constant = fit.residual < tol;
  return fit;
}

}  // namespace liftcurv
