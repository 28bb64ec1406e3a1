#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>

#include "liftcurv/base_geometry.hpp"
#include "liftcurv/errors.hpp"
#include "liftcurv/linalg.hpp"
#include "liftcurv/scalar_jets.hpp"
#include "liftcurv/tensor.hpp"

namespace liftcurv {

// Nondegeneracy gate for c1 c2 - c3², the radial determinant and the assembled 2n x 2n metric.
inline constexpr double kDegeneracyThreshold = 1e-12;

// t = ½ g_ik y^i y^k
inline double energy_density(const Matrix& g, std::span<const double> y) {
  double t = 0.0;
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t k = 0; k < g.dim(); ++k) t += g(i, k) * y[i] * y[k];
  return 0.5 * t;
}

inline double energy_density(const BaseGeometry& base, std::span<const double> x, std::span<const double> y) {
  return energy_density(base.metric(x), y);
}

// The fiber data every block formula is built from.
struct FiberPoint {
  Matrix g;
  Matrix ginv;
  Vector y;
  Vector g0;  // g_{0i}
  double t = 0.0;

  FiberPoint() = default;
  FiberPoint(Matrix g_, Matrix ginv_, std::span<const double> y_)
      : g(std::move(g_)), ginv(std::move(ginv_)), y(y_.begin(), y_.end()), g0(contract_y(g, y)),
        t(energy_density(g, y)) {}

  std::size_t dim() const { return g.dim(); }
};

// Assemble [[A, C], [C^T, B]] as a 2n x 2n matrix (horizontal block first).
inline Matrix assemble_blocks(const Matrix& a, const Matrix& b, const Matrix& c) {
  const std::size_t n = a.dim();
  Matrix m(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = a(i, j);
      m(n + i, n + j) = b(i, j);
      m(i, n + j) = c(i, j);
      m(n + j, i) = c(i, j);
    }
  return m;
}

// G(δ_i, δ_j) = G1, G(∂_i, ∂_j) = G2, G(∂_i, δ_j) = G(δ_i, ∂_j) = G3.
struct MetricBlocks {
  double t = 0.0;
  Matrix G1, G2, G3;

  const Matrix& block(int alpha) const { return alpha == 1 ? G1 : (alpha == 2 ? G2 : G3); }
  std::size_t dim() const { return G1.dim(); }
  Matrix assembled() const { return assemble_blocks(G1, G2, G3); }
};

// Blocks of the inverse metric, H_(α)^kl = p_α g^kl + q_α y^k y^l. The p, q
// are carried as jets in t so that their t-derivatives are exact.
struct InverseBlocks {
  std::array<Jet3, 3> p;
  std::array<Jet3, 3> q;
  Matrix H1, H2, H3;

  const Matrix& block(int alpha) const { return alpha == 1 ? H1 : (alpha == 2 ? H2 : H3); }
  const Jet3& p_of(int alpha) const { return p[static_cast<std::size_t>(alpha - 1)]; }
  const Jet3& q_of(int alpha) const { return q[static_cast<std::size_t>(alpha - 1)]; }
  Matrix assembled() const { return assemble_blocks(H1, H2, H3); }
};

// Derivatives with respect to the fiber coordinates y^i, for α = 1, 2, 3 at index α-1:
// dG[α](i, j, k) = ∂_i G^(α)_jk, ddG[α](i, j, k, l) = ∂_i ∂_j G^(α)_kl, dH[α](i, j, k) = ∂_i H_(α)^jk.
struct BlockDerivatives {
  std::array<Tensor3, 3> dG;
  std::array<Tensor4, 3> ddG;
  std::array<Tensor3, 3> dH;

  const Tensor3& dG_of(int alpha) const { return dG[static_cast<std::size_t>(alpha - 1)]; }
  const Tensor4& ddG_of(int alpha) const { return ddG[static_cast<std::size_t>(alpha - 1)]; }
  const Tensor3& dH_of(int alpha) const { return dH[static_cast<std::size_t>(alpha - 1)]; }
};

inline LiftCoefficients evaluate_family(const ParamFamily& params, double t) { return params(t); }

inline MetricBlocks metric_blocks(const LiftCoefficients& c, const FiberPoint& fp) {
  const std::size_t n = fp.dim();
  MetricBlocks mb;
  mb.t = fp.t;
  auto build = [&](const Jet3& cj, const Jet3& dj) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = cj.v() * fp.g(i, j) + dj.v() * fp.g0[i] * fp.g0[j];
    return m;
  };
  mb.G1 = build(c.c1, c.d1);
  mb.G2 = build(c.c2, c.d2);
  mb.G3 = build(c.c3, c.d3);
  return mb;
}

inline FiberPoint make_fiber_point(const BaseGeometry& base, std::span<const double> x, std::span<const double> y) {
  Matrix g = base.metric(x);
  Matrix ginv = inverse(g);
  return FiberPoint(std::move(g), std::move(ginv), y);
}

inline MetricBlocks metric_blocks(const ParamFamily& params, const BaseGeometry& base, std::span<const double> x,
                                  std::span<const double> y) {
  const FiberPoint fp = make_fiber_point(base, x, y);
  return metric_blocks(params(fp.t), fp);
}

// The inverse coefficients as jets in t.
//
// With e_α = c_α + 2 t d_α (the eigenvalue of G^(α) along y) and
// D = e1 e2 - e3², the y y^T parts of the four block-inverse identities give two
// 2x2 systems with the same matrix [[e1, e3], [e3, e2]]:
//   p1 = c2/Δ, p2 = c1/Δ, p3 = -c3/Δ, Δ = c1 c2 - c3²
//   q1 = -(e2 (d1 p1 + d3 p3) - e3 (d3 p1 + d2 p3)) / D
//   q2 = -(e1 (d3 p3 + d2 p2) - e3 (d1 p3 + d3 p2)) / D
//   q3 = -(e1 (d3 p1 + d2 p3) - e3 (d1 p1 + d3 p3)) / D
// The q2 form stays regular when e2 = 0 (antidiagonal metrics).
struct InverseCoefficients {
  std::array<Jet3, 3> p;
  std::array<Jet3, 3> q;
  Jet3 delta;         // c1 c2 - c3²
  Jet3 radial_delta;  // e1 e2 - e3²
};

inline InverseCoefficients inverse_coefficients(const LiftCoefficients& c, double t) {
  const Jet3 tj = Jet3::variable(t);
  InverseCoefficients ic;
  ic.delta = c.c1 * c.c2 - c.c3 * c.c3;
  const Jet3 e1 = c.c1 + 2.0 * tj * c.d1;
  const Jet3 e2 = c.c2 + 2.0 * tj * c.d2;
  const Jet3 e3 = c.c3 + 2.0 * tj * c.d3;
  ic.radial_delta = e1 * e2 - e3 * e3;
  if (!(std::abs(ic.delta.v()) > kDegeneracyThreshold))
    throw DegenerateError("degenerate lifted metric: |c1 c2 - c3^2| = " + std::to_string(std::abs(ic.delta.v())));
  if (!(std::abs(ic.radial_delta.v()) > kDegeneracyThreshold))
    throw DegenerateError("degenerate lifted metric along y: |(c1+2td1)(c2+2td2)-(c3+2td3)^2| = " +
                          std::to_string(std::abs(ic.radial_delta.v())));
  const Jet3 p1 = c.c2 / ic.delta;
  const Jet3 p2 = c.c1 / ic.delta;
  const Jet3 p3 = -c.c3 / ic.delta;
  ic.p = {p1, p2, p3};
  const Jet3& d1 = c.d1;
  const Jet3& d2 = c.d2;
  const Jet3& d3 = c.d3;
  const Jet3& D = ic.radial_delta;
  ic.q[0] = -(e2 * (d1 * p1 + d3 * p3) - e3 * (d3 * p1 + d2 * p3)) / D;
  ic.q[1] = -(e1 * (d3 * p3 + d2 * p2) - e3 * (d1 * p3 + d3 * p2)) / D;
  ic.q[2] = -(e1 * (d3 * p1 + d2 * p3) - e3 * (d1 * p1 + d3 * p3)) / D;
  return ic;
}

// q2 written with the (c2 + 2 t d2) denominator, singular for antidiagonal metrics. Kept for cross-checks.
inline Jet3 q2_with_vertical_denominator(const LiftCoefficients& c, double t) {
  const InverseCoefficients ic = inverse_coefficients(c, t);
  const Jet3 tj = Jet3::variable(t);
  const auto& [p1, p2, p3] = ic.p;
  const Jet3 e1 = c.c1 + 2.0 * tj * c.d1;
  const Jet3 e2 = c.c2 + 2.0 * tj * c.d2;
  const Jet3 e3 = c.c3 + 2.0 * tj * c.d3;
  return -(c.d2 * p2 + c.d3 * p3) / e2 +
         e3 * ((c.d3 * p1 + c.d2 * p3) * e1 - (c.d1 * p1 + c.d3 * p3) * e3) / (e2 * ic.radial_delta);
}

inline InverseBlocks inverse_blocks(const LiftCoefficients& c, const FiberPoint& fp) {
  const std::size_t n = fp.dim();
  const InverseCoefficients ic = inverse_coefficients(c, fp.t);
  InverseBlocks ib;
  ib.p = ic.p;
  ib.q = ic.q;
  auto build = [&](const Jet3& p, const Jet3& q) {
    Matrix m(n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) m(k, l) = p.v() * fp.ginv(k, l) + q.v() * fp.y[k] * fp.y[l];
    return m;
  };
  ib.H1 = build(ic.p[0], ic.q[0]);
  ib.H2 = build(ic.p[1], ic.q[1]);
  ib.H3 = build(ic.p[2], ic.q[2]);
  return ib;
}

inline InverseBlocks inverse_blocks(const ParamFamily& params, const BaseGeometry& base, std::span<const double> x,
                                    std::span<const double> y) {
  const FiberPoint fp = make_fiber_point(base, x, y);
  return inverse_blocks(params(fp.t), fp);
}

// Throws DegenerateError when the assembled 2n x 2n metric is numerically singular.
inline void check_nondegenerate(const MetricBlocks& mb) {
  const double det = determinant(mb.assembled());
  if (!(std::abs(det) > kDegeneracyThreshold))
    throw DegenerateError("degenerate lifted metric: |det G| = " + std::to_string(std::abs(det)));
}

// ∂_i G^(α)_jk = c' g0_i g_jk + d' g0_i g0_j g0_k + d (g_ij g0_k + g0_j g_ik)
// ∂_i ∂_j G^(α)_kl = c'' g0_i g0_j g_kl + c' g_ij g_kl + d'' g0_i g0_j g0_k g0_l
//                  + d' (g_ij g0_k g0_l + g0_j g_ik g0_l + g0_j g0_k g_il + g0_i g_jk g0_l + g0_i g0_k g_jl)
//                  + d (g_jk g_il + g_ik g_jl)
// ∂_i H_(α)^jk = p' g^jk g0_i + q' g0_i y^j y^k + q (δ^j_i y^k + y^j δ^k_i)
inline BlockDerivatives block_derivatives(const LiftCoefficients& c, const InverseBlocks& inv, const FiberPoint& fp) {
  const std::size_t n = fp.dim();
  const Matrix& g = fp.g;
  const Matrix& gi = fp.ginv;
  const Vector& y = fp.y;
  const Vector& g0 = fp.g0;
  BlockDerivatives bd;
  for (int alpha = 1; alpha <= 3; ++alpha) {
    const auto a = static_cast<std::size_t>(alpha - 1);
    const Jet3& ca = c.c(alpha);
    const Jet3& da = c.d(alpha);
    const double c1 = ca.d1(), c2 = ca.d2();
    const double d0 = da.v(), d1 = da.d1(), d2 = da.d2();
    Tensor3 dG(n);
    Tensor4 ddG(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          dG(i, j, k) = c1 * g0[i] * g(j, k) + d1 * g0[i] * g0[j] * g0[k] + d0 * (g(i, j) * g0[k] + g0[j] * g(i, k));
          for (std::size_t l = 0; l < n; ++l)
            ddG(i, j, k, l) = c2 * g0[i] * g0[j] * g(k, l) + c1 * g(i, j) * g(k, l) +
                              d2 * g0[i] * g0[j] * g0[k] * g0[l] +
                              d1 * (g(i, j) * g0[k] * g0[l] + g0[j] * g(i, k) * g0[l] + g0[j] * g0[k] * g(i, l) +
                                    g0[i] * g(j, k) * g0[l] + g0[i] * g0[k] * g(j, l)) +
                              d0 * (g(j, k) * g(i, l) + g(i, k) * g(j, l));
        }
    const double pp = inv.p[a].d1();
    const double q0 = inv.q[a].v();
    const double qp = inv.q[a].d1();
    Tensor3 dH(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          dH(i, j, k) = pp * gi(j, k) * g0[i] + qp * g0[i] * y[j] * y[k] +
                        q0 * (kronecker(i, j) * y[k] + y[j] * kronecker(i, k));
    bd.dG[a] = std::move(dG);
    bd.ddG[a] = std::move(ddG);
    bd.dH[a] = std::move(dH);
  }
  return bd;
}

inline BlockDerivatives block_derivatives(const ParamFamily& params, const BaseGeometry& base,
                                          std::span<const double> x, std::span<const double> y) {
  const FiberPoint fp = make_fiber_point(base, x, y);
  const LiftCoefficients c = params(fp.t);
  return block_derivatives(c, inverse_blocks(c, fp), fp);
}

}  // namespace liftcurv
