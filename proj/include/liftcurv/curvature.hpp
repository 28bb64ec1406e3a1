#pragma once

#include <span>

#include "liftcurv/adapted_blocks.hpp"
#include "liftcurv/connection.hpp"
#include "liftcurv/lift_metric.hpp"

namespace liftcurv {

// K(X, Y)Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_[X,Y] Z in the adapted frame.
using CurvBlocks = AdaptedBlocks;

// Ricci blocks Ric(E_j, E_k) by frame type of (j, k), and the scalar curvature.
struct RicciScalar {
  Matrix RicXX, RicXY, RicYX, RicYY;
  double scal = 0.0;

  Matrix assembled() const {
    const std::size_t n = RicXX.dim();
    Matrix m(2 * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) = RicXX(i, j);
        m(i, n + j) = RicXY(i, j);
        m(n + i, j) = RicYX(i, j);
        m(n + i, n + j) = RicYY(i, j);
      }
    return m;
  }
};

// The twelve curvature blocks from the connection coefficients, their fiber
// derivatives and (for non-parallel base curvature) their horizontal derivatives.
//
// Both variants share every commutator, bracket and fiber-derivative term.
// They differ only in the base-curvature derivative terms: Printed uses the
// reference transcription of the ∇R terms in XXXY, YXXX and YXXY and has none
// elsewhere; Corrected adds the horizontal derivatives of S, St, P, Pt wherever
// they occur. On bases with ∇R = 0 both variants coincide.
inline CurvBlocks curvature_blocks(const LiftPoint& lp, const ConnCoeffs& cc, const ConnDerivs& cd,
                                   const ConnHorizontal& ch, FormulaVariant variant = FormulaVariant::Corrected) {
  const std::size_t n = lp.dim();
  const auto& Q = cc.Q;
  const auto& Qt = cc.Qt;
  const auto& P = cc.P;
  const auto& Pt = cc.Pt;
  const auto& S = cc.S;
  const auto& St = cc.St;
  const auto& R = lp.base.riemann;
  const auto& R0 = lp.R0;
  const auto& G2 = lp.metric.G2;
  const auto& H1 = lp.inverse.H1;
  const auto& H3 = lp.inverse.H3;
  const double c3 = lp.coeffs.c3.v();
  const bool printed = variant == FormulaVariant::Printed;

  CurvBlocks kb(n);
  auto& XXXX = kb[Block::XXXX];
  auto& XXXY = kb[Block::XXXY];
  auto& XXYX = kb[Block::XXYX];
  auto& XXYY = kb[Block::XXYY];
  auto& YYXX = kb[Block::YYXX];
  auto& YYXY = kb[Block::YYXY];
  auto& YYYX = kb[Block::YYYX];
  auto& YYYY = kb[Block::YYYY];
  auto& YXXX = kb[Block::YXXX];
  auto& YXXY = kb[Block::YXXY];
  auto& YXYX = kb[Block::YXYX];
  auto& YXYY = kb[Block::YXYY];

  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double xxxx = R(h, k, i, j);
          double xxxy = 0.0;
          double xxyx = 0.0;
          double xxyy = R(h, k, i, j);
          double yyxx = cd.dP(i, h, j, k) - cd.dP(j, h, i, k);
          double yyxy = cd.dPt(i, h, j, k) - cd.dPt(j, h, i, k);
          double yyyx = cd.dQt(i, h, j, k) - cd.dQt(j, h, i, k);
          double yyyy = cd.dQ(i, h, j, k) - cd.dQ(j, h, i, k);
          double yxxx = cd.dSt(i, h, j, k);
          double yxxy = cd.dS(i, h, j, k);
          double yxyx = cd.dP(i, h, k, j);
          double yxyy = cd.dPt(i, h, k, j);
          for (std::size_t l = 0; l < n; ++l) {
            xxxx += St(h, i, l) * St(l, j, k) + P(h, l, i) * S(l, j, k) - St(h, j, l) * St(l, i, k) -
                    P(h, l, j) * S(l, i, k) + R0(l, i, j) * P(h, l, k);
            xxxy += St(l, j, k) * S(h, i, l) + Pt(h, l, i) * S(l, j, k) - St(l, i, k) * S(h, j, l) -
                    Pt(h, l, j) * S(l, i, k) + Pt(h, l, k) * R0(l, i, j);
            xxyx += Pt(l, k, j) * P(h, l, i) + P(l, k, j) * St(h, i, l) - Pt(l, k, i) * P(h, l, j) -
                    P(l, k, i) * St(h, j, l) + R0(l, i, j) * Qt(h, l, k);
            xxyy += Pt(l, k, j) * Pt(h, l, i) + P(l, k, j) * S(h, i, l) - Pt(l, k, i) * Pt(h, l, j) -
                    P(l, k, i) * S(h, j, l) + R0(l, i, j) * Q(h, l, k);
            yyxx += Pt(l, j, k) * Qt(h, i, l) + P(l, j, k) * P(h, i, l) - Pt(l, i, k) * Qt(h, j, l) -
                    P(l, i, k) * P(h, j, l);
            yyxy += Pt(l, j, k) * Q(h, i, l) + P(l, j, k) * Pt(h, i, l) - Pt(l, i, k) * Q(h, j, l) -
                    P(l, i, k) * Pt(h, j, l);
            yyyx += Q(l, j, k) * Qt(h, i, l) + Qt(l, j, k) * P(h, i, l) - Q(l, i, k) * Qt(h, j, l) -
                    Qt(l, i, k) * P(h, j, l);
            yyyy += Q(l, j, k) * Q(h, i, l) + Qt(l, j, k) * Pt(h, i, l) - Q(l, i, k) * Q(h, j, l) -
                    Qt(l, i, k) * Pt(h, j, l);
            yxxx += S(l, j, k) * Qt(h, i, l) + St(l, j, k) * P(h, i, l) - Pt(l, i, k) * P(h, l, j) -
                    P(l, i, k) * St(h, j, l);
            yxxy += S(l, j, k) * Q(h, i, l) + St(l, j, k) * Pt(h, i, l) - Pt(l, i, k) * Pt(h, l, j) -
                    P(l, i, k) * S(h, j, l);
            yxyx += Pt(l, k, j) * Qt(h, i, l) + P(l, k, j) * P(h, i, l) - Q(l, i, k) * P(h, l, j) -
                    Qt(l, i, k) * St(h, j, l);
            yxyy += Pt(l, k, j) * Q(h, i, l) + P(l, k, j) * Pt(h, i, l) - Q(l, i, k) * Pt(h, l, j) -
                    Qt(l, i, k) * S(h, j, l);
          }
          if (printed) {
            // -½ ∇_i R^r_{0jk} G2_rl H3^lh + c3 ∇_i R_{j0kh};  -∇_j R^r_{0ik} G2_rl H^lh with H3 / H1
            double a = 0.0, b3 = 0.0, b1 = 0.0;
            for (std::size_t r = 0; r < n; ++r)
              for (std::size_t l = 0; l < n; ++l) {
                a += lp.nablaR0(i, r, j, k) * G2(r, l) * H3(l, h);
                b3 += lp.nablaR0(j, r, i, k) * G2(r, l) * H3(l, h);
                b1 += lp.nablaR0(j, r, i, k) * G2(r, l) * H1(l, h);
              }
            xxxy += -0.5 * a + c3 * lp.nablaR0low(i, j, k, h);
            yxxx -= b3;
            yxxy -= b1;
          } else {
            xxxx += ch.hSt(i, h, j, k) - ch.hSt(j, h, i, k);
            xxxy += ch.hS(i, h, j, k) - ch.hS(j, h, i, k);
            xxyx += ch.hP(i, h, k, j) - ch.hP(j, h, k, i);
            xxyy += ch.hPt(i, h, k, j) - ch.hPt(j, h, k, i);
            yxxx -= ch.hP(j, h, i, k);
            yxxy -= ch.hPt(j, h, i, k);
          }
          XXXX(h, k, i, j) = xxxx;
          XXXY(h, k, i, j) = xxxy;
          XXYX(h, k, i, j) = xxyx;
          XXYY(h, k, i, j) = xxyy;
          YYXX(h, k, i, j) = yyxx;
          YYXY(h, k, i, j) = yyxy;
          YYYX(h, k, i, j) = yyyx;
          YYYY(h, k, i, j) = yyyy;
          YXXX(h, k, i, j) = yxxx;
          YXXY(h, k, i, j) = yxxy;
          YXYX(h, k, i, j) = yxyx;
          YXYY(h, k, i, j) = yxyy;
        }
  return kb;
}

inline CurvBlocks curvature_blocks(const LiftPoint& lp, FormulaVariant variant = FormulaVariant::Corrected) {
  return curvature_blocks(lp, conn_coeffs(lp), conn_derivs(lp), conn_horizontal(lp), variant);
}

inline CurvBlocks curvature_blocks(const ParamFamily& params, const BaseGeometry& base, std::span<const double> x,
                                   std::span<const double> y, FormulaVariant variant = FormulaVariant::Corrected) {
  return curvature_blocks(make_lift_point(params, base, x, y), variant);
}

// Ric(E_b, E_c) = Σ_a [K(E_a, E_b) E_c]^a over the whole 2n frame;
// scal = H1·RicXX + H3·(RicXY + RicYX) + H2·RicYY.
inline RicciScalar ricci_scalar(const CurvBlocks& kb, const MetricBlocks& /*metric*/, const InverseBlocks& inv) {
  const std::size_t n = kb.dim();
  RicciScalar rs{Matrix(n), Matrix(n), Matrix(n), Matrix(n), 0.0};
  const auto& XXXX = kb[Block::XXXX];
  const auto& YXXY = kb[Block::YXXY];
  const auto& XXYX = kb[Block::XXYX];
  const auto& YXYY = kb[Block::YXYY];
  const auto& YXXX = kb[Block::YXXX];
  const auto& YYXY = kb[Block::YYXY];
  const auto& YXYX = kb[Block::YXYX];
  const auto& YYYY = kb[Block::YYYY];
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        rs.RicXX(j, k) += XXXX(i, k, i, j) + YXXY(i, k, i, j);
        rs.RicXY(j, k) += XXYX(i, k, i, j) + YXYY(i, k, i, j);
        rs.RicYX(j, k) += -YXXX(i, k, j, i) + YYXY(i, k, i, j);
        rs.RicYY(j, k) += -YXYX(i, k, j, i) + YYYY(i, k, i, j);
      }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      rs.scal += inv.H1(j, k) * rs.RicXX(j, k) + inv.H3(j, k) * (rs.RicXY(j, k) + rs.RicYX(j, k)) +
                 inv.H2(j, k) * rs.RicYY(j, k);
  return rs;
}

}  // namespace liftcurv
