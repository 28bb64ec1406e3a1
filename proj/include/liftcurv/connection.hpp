#pragma once

#include <span>
#include <vector>

#include "liftcurv/base_geometry.hpp"
#include "liftcurv/lift_metric.hpp"
#include "liftcurv/tensor.hpp"

namespace liftcurv {

// All ingredients of the adapted-frame formulas at one point (x, y) of TM.
struct LiftPoint {
  BasePoint base;
  FiberPoint fiber;
  LiftCoefficients coeffs;
  MetricBlocks metric;
  InverseBlocks inverse;
  BlockDerivatives derivs;
  Tensor3 R0;        // R^l_{0jk}          [l][j][k]
  Tensor3 R0low;     // R_{i0jk}           [i][j][k]
  Tensor4 Rlow;      // R_{hkij} = g_hl R^l_kij
  Tensor4 nablaR0;     // ∇_m R^l_{0jk}    [m][l][j][k]
  Tensor4 nablaR0low;  // ∇_m R_{i0jk}     [m][i][j][k]

  std::size_t dim() const { return base.n; }
};

inline LiftPoint make_lift_point(const ParamFamily& params, const BaseGeometry& base, std::span<const double> x,
                                 std::span<const double> y) {
  LiftPoint lp;
  lp.base = base.evaluate(x);
  lp.fiber = FiberPoint(lp.base.g, lp.base.ginv, y);
  lp.coeffs = params(lp.fiber.t);
  lp.metric = metric_blocks(lp.coeffs, lp.fiber);
  lp.inverse = inverse_blocks(lp.coeffs, lp.fiber);
  check_nondegenerate(lp.metric);
  lp.derivs = block_derivatives(lp.coeffs, lp.inverse, lp.fiber);
  const std::size_t n = lp.dim();
  lp.R0 = riemann_0(lp.base.riemann, y);
  lp.R0low = riemann_lowered_0(lp.base.g, lp.R0);
  lp.Rlow = Tensor4(n);
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t l = 0; l < n; ++l) lp.Rlow(h, k, i, j) += lp.base.g(h, l) * lp.base.riemann(l, k, i, j);
  // ∇_m R^l_{0jk}: contract the second index of ∇_m R^l_{ajk} (slot 2 of the rank-5 array)
  lp.nablaR0 = contract_y(lp.base.nabla_riemann, 2, y);
  lp.nablaR0low = Tensor4(n);
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) lp.nablaR0low(m, i, j, k) += lp.base.g(i, l) * lp.nablaR0(m, l, j, k);
  return lp;
}

// Levi-Civita coefficients in the adapted frame, each stored [h][i][j]:
//   ∇_{∂y_i} ∂y_j = Q^h_ij ∂y_h + Qt^h_ij δx_h
//   ∇_{δx_i} ∂y_j = (Γ^h_ij + Pt^h_ji) ∂y_h + P^h_ji δx_h
//   ∇_{∂y_i} δx_j = P^h_ij δx_h + Pt^h_ij ∂y_h
//   ∇_{δx_i} δx_j = (Γ^h_ij + St^h_ij) δx_h + S^h_ij ∂y_h
struct ConnCoeffs {
  Tensor3 Q, Qt, P, Pt, S, St;
};

// ∂/∂y^i of each coefficient, stored [i][h][j][k].
struct ConnDerivs {
  Tensor4 dQ, dQt, dP, dPt, dS, dSt;
};

// Horizontal covariant derivative ∇̇_m of the coefficients, stored [m][h][i][j].
// Only the base-curvature terms contribute (∇̇ annihilates g, y and t), so Q and
// Qt have none.
struct ConnHorizontal {
  Tensor4 hP, hPt, hS, hSt;
};

inline ConnCoeffs conn_coeffs(const LiftPoint& lp) {
  const std::size_t n = lp.dim();
  const auto& dG1 = lp.derivs.dG_of(1);
  const auto& dG2 = lp.derivs.dG_of(2);
  const auto& dG3 = lp.derivs.dG_of(3);
  const auto& G2 = lp.metric.G2;
  const auto& H1 = lp.inverse.H1;
  const auto& H2 = lp.inverse.H2;
  const auto& H3 = lp.inverse.H3;
  const double c3 = lp.coeffs.c3.v();
  ConnCoeffs cc{Tensor3(n), Tensor3(n), Tensor3(n), Tensor3(n), Tensor3(n), Tensor3(n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double vq2 = 0.5 * (dG2(i, j, k) + dG2(j, i, k) - dG2(k, i, j));
        const double vq3 = 0.5 * (dG3(i, j, k) + dG3(j, i, k));
        const double vp3 = 0.5 * (dG3(i, j, k) - dG3(k, i, j));
        double rg_p = 0.0;  // R^l_{0jk} G2_li
        double rg_s = 0.0;  // R^l_{0ij} G2_lk
        for (std::size_t l = 0; l < n; ++l) {
          rg_p += lp.R0(l, j, k) * G2(l, i);
          rg_s += lp.R0(l, i, j) * G2(l, k);
        }
        const double vp1 = 0.5 * (dG1(i, j, k) + rg_p);
        const double vs = -0.5 * (dG1(k, i, j) + rg_s);
        const double rc = c3 * lp.R0low(i, j, k);
        for (std::size_t h = 0; h < n; ++h) {
          cc.Q(h, i, j) += vq2 * H2(k, h) + vq3 * H3(k, h);
          cc.Qt(h, i, j) += vq2 * H3(k, h) + vq3 * H1(k, h);
          cc.P(h, i, j) += vp3 * H3(k, h) + vp1 * H1(k, h);
          cc.Pt(h, i, j) += vp3 * H2(k, h) + vp1 * H3(k, h);
          cc.S(h, i, j) += vs * H2(k, h) + rc * H3(k, h);
          cc.St(h, i, j) += vs * H3(k, h) + rc * H1(k, h);
        }
      }
  return cc;
}

inline ConnCoeffs conn_coeffs(const ParamFamily& params, const BaseGeometry& base, std::span<const double> x,
                              std::span<const double> y) {
  return conn_coeffs(make_lift_point(params, base, x, y));
}

inline ConnDerivs conn_derivs(const LiftPoint& lp) {
  const std::size_t n = lp.dim();
  const auto& dG1 = lp.derivs.dG_of(1);
  const auto& dG2 = lp.derivs.dG_of(2);
  const auto& dG3 = lp.derivs.dG_of(3);
  const auto& ddG1 = lp.derivs.ddG_of(1);
  const auto& ddG2 = lp.derivs.ddG_of(2);
  const auto& ddG3 = lp.derivs.ddG_of(3);
  const auto& dH1 = lp.derivs.dH_of(1);
  const auto& dH2 = lp.derivs.dH_of(2);
  const auto& dH3 = lp.derivs.dH_of(3);
  const auto& G2 = lp.metric.G2;
  const auto& H1 = lp.inverse.H1;
  const auto& H2 = lp.inverse.H2;
  const auto& H3 = lp.inverse.H3;
  const auto& R = lp.base.riemann;
  const double c3 = lp.coeffs.c3.v();
  const double c3p = lp.coeffs.c3.d1();
  const Vector& g0 = lp.fiber.g0;

  ConnDerivs cd{Tensor4(n), Tensor4(n), Tensor4(n), Tensor4(n), Tensor4(n), Tensor4(n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          // bracket terms, all indexed by the summed l
          const double aq2 = 0.5 * (dG2(j, k, l) + dG2(k, j, l) - dG2(l, j, k));
          const double bq2 = 0.5 * (ddG2(i, j, k, l) + ddG2(i, k, j, l) - ddG2(i, l, j, k));
          const double aq3 = 0.5 * (dG3(j, k, l) + dG3(k, j, l));
          const double bq3 = 0.5 * (ddG3(i, j, k, l) + ddG3(i, k, j, l));
          const double ap3 = 0.5 * (dG3(j, k, l) - dG3(l, j, k));
          const double bp3 = 0.5 * (ddG3(i, j, k, l) - ddG3(i, l, j, k));
          double rg = 0.0, rg_i = 0.0, rdg = 0.0;
          for (std::size_t r = 0; r < n; ++r) {
            rg += lp.R0(r, k, l) * G2(r, j);
            rg_i += R(r, i, k, l) * G2(r, j);
            rdg += lp.R0(r, k, l) * dG2(i, r, j);
          }
          const double ap1 = 0.5 * (dG1(j, k, l) + rg);
          const double bp1 = 0.5 * (ddG1(i, j, k, l) + rg_i + rdg);
          // S terms with the summed index l playing the role of r
          double rg_s = 0.0, rg_si = 0.0, rdg_s = 0.0;
          for (std::size_t m = 0; m < n; ++m) {
            rg_s += lp.R0(m, j, k) * G2(m, l);
            rg_si += R(m, i, j, k) * G2(m, l);
            rdg_s += lp.R0(m, j, k) * dG2(i, m, l);
          }
          const double as = -0.5 * (dG1(l, j, k) + rg_s);
          const double bs = -0.5 * (ddG1(i, l, j, k) + rg_si + rdg_s);
          const double cs0 = c3p * g0[i] * lp.R0low(j, k, l);
          const double cs1 = c3 * lp.Rlow(j, i, k, l);
          const double cs2 = c3 * lp.R0low(j, k, l);
          for (std::size_t h = 0; h < n; ++h) {
            cd.dQ(i, h, j, k) += dH2(i, h, l) * aq2 + H2(h, l) * bq2 + dH3(i, h, l) * aq3 + H3(h, l) * bq3;
            cd.dQt(i, h, j, k) += dH3(i, h, l) * aq2 + H3(h, l) * bq2 + dH1(i, h, l) * aq3 + H1(h, l) * bq3;
            cd.dP(i, h, j, k) += dH3(i, h, l) * ap3 + H3(h, l) * bp3 + dH1(i, h, l) * ap1 + H1(h, l) * bp1;
            cd.dPt(i, h, j, k) += dH2(i, h, l) * ap3 + H2(h, l) * bp3 + dH3(i, h, l) * ap1 + H3(h, l) * bp1;
            cd.dS(i, h, j, k) += bs * H2(l, h) + as * dH2(i, l, h) + (cs0 + cs1) * H3(l, h) + cs2 * dH3(i, l, h);
            cd.dSt(i, h, j, k) += bs * H3(l, h) + as * dH3(i, l, h) + (cs0 + cs1) * H1(l, h) + cs2 * dH1(i, l, h);
          }
        }
  return cd;
}

inline ConnDerivs conn_derivs(const ParamFamily& params, const BaseGeometry& base, std::span<const double> x,
                              std::span<const double> y) {
  return conn_derivs(make_lift_point(params, base, x, y));
}

inline ConnHorizontal conn_horizontal(const LiftPoint& lp) {
  const std::size_t n = lp.dim();
  const auto& G2 = lp.metric.G2;
  const auto& H1 = lp.inverse.H1;
  const auto& H2 = lp.inverse.H2;
  const auto& H3 = lp.inverse.H3;
  const double c3 = lp.coeffs.c3.v();
  ConnHorizontal ch{Tensor4(n), Tensor4(n), Tensor4(n), Tensor4(n)};
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          double rg_p = 0.0, rg_s = 0.0;
          for (std::size_t l = 0; l < n; ++l) {
            rg_p += lp.nablaR0(m, l, j, k) * G2(l, i);
            rg_s += lp.nablaR0(m, l, i, j) * G2(l, k);
          }
          const double vp = 0.5 * rg_p;
          const double vs = -0.5 * rg_s;
          const double rc = c3 * lp.nablaR0low(m, i, j, k);
          for (std::size_t h = 0; h < n; ++h) {
            ch.hP(m, h, i, j) += vp * H1(k, h);
            ch.hPt(m, h, i, j) += vp * H3(k, h);
            ch.hS(m, h, i, j) += vs * H2(k, h) + rc * H3(k, h);
            ch.hSt(m, h, i, j) += vs * H3(k, h) + rc * H1(k, h);
          }
        }
  return ch;
}

// ---- full 2n adapted frame ----

// Frame vector of the adapted frame: horizontal δ/δx^i or vertical ∂/∂y^i.
struct FrameIndex {
  enum class Kind { Horizontal, Vertical };
  Kind kind;
  std::size_t index;

  static FrameIndex horizontal(std::size_t i) { return {Kind::Horizontal, i}; }
  static FrameIndex vertical(std::size_t i) { return {Kind::Vertical, i}; }

  // position in the 2n frame, horizontal block first
  std::size_t flat(std::size_t n) const { return kind == Kind::Horizontal ? index : n + index; }
};

// ω(c, a, b) with ∇_{E_a} E_b = ω^c_ab E_c over the 2n frame (δx_0..δx_{n-1}, ∂y_0..∂y_{n-1}).
inline Tensor3 adapted_connection(const ConnCoeffs& cc, const Tensor3& christoffel) {
  const std::size_t n = christoffel.dim();
  Tensor3 w(2 * n);
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t H = h, V = n + h;
        // ∇_{Y_i} Y_j
        w(V, n + i, n + j) = cc.Q(h, i, j);
        w(H, n + i, n + j) = cc.Qt(h, i, j);
        // ∇_{X_i} Y_j
        w(V, i, n + j) = christoffel(h, i, j) + cc.Pt(h, j, i);
        w(H, i, n + j) = cc.P(h, j, i);
        // ∇_{Y_i} X_j
        w(H, n + i, j) = cc.P(h, i, j);
        w(V, n + i, j) = cc.Pt(h, i, j);
        // ∇_{X_i} X_j
        w(H, i, j) = christoffel(h, i, j) + cc.St(h, i, j);
        w(V, i, j) = cc.S(h, i, j);
      }
  return w;
}

// Components of ∇_{dir} target in the adapted frame (horizontal block first).
inline std::vector<double> nabla(const Tensor3& omega, FrameIndex dir, FrameIndex target) {
  const std::size_t m = omega.dim();
  const std::size_t n = m / 2;
  std::vector<double> out(m);
  for (std::size_t c = 0; c < m; ++c) out[c] = omega(c, dir.flat(n), target.flat(n));
  return out;
}

}  // namespace liftcurv
