#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liftcurv/adapted_blocks.hpp"
#include "liftcurv/curvature.hpp"
#include "liftcurv/riemannian.hpp"
#include "liftcurv/sampler.hpp"

namespace liftcurv {

// L(X,Y) = -Ric(X,Y)/(2(n-1)) + scal G(X,Y) / (4(n-1)(2n-1)) in blocks, and N
// defined by G(NX, Y) = L(X, Y). N blocks are mixed, stored [h][j]:
// NAB^h_j is the B-component (along E_B^h) of N applied to E_A^j.
struct LNBlocks {
  Matrix LXX, LXY, LYX, LYY;
  Matrix NXX, NXY, NYX, NYY;

  Matrix assembled_L() const {
    const std::size_t n = LXX.dim();
    Matrix m(2 * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) = LXX(i, j);
        m(i, n + j) = LXY(i, j);
        m(n + i, j) = LYX(i, j);
        m(n + i, n + j) = LYY(i, j);
      }
    return m;
  }

  // N(d, a) = [N E_a]^d over the 2n frame
  Matrix assembled_N() const {
    const std::size_t n = LXX.dim();
    Matrix m(2 * n);
    for (std::size_t h = 0; h < n; ++h)
      for (std::size_t j = 0; j < n; ++j) {
        m(h, j) = NXX(h, j);
        m(n + h, j) = NXY(h, j);
        m(h, n + j) = NYX(h, j);
        m(n + h, n + j) = NYY(h, j);
      }
    return m;
  }
};

inline LNBlocks ln_blocks(const RicciScalar& ric, const MetricBlocks& metric, const InverseBlocks& inv, std::size_t n) {
  if (n < 2) throw ConfigError("Weyl blocks need n >= 2");
  const double f = -1.0 / (2.0 * (static_cast<double>(n) - 1.0));
  const double s = ric.scal / (2.0 * (2.0 * static_cast<double>(n) - 1.0));
  LNBlocks ln{Matrix(n), Matrix(n), Matrix(n), Matrix(n), Matrix(n), Matrix(n), Matrix(n), Matrix(n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ln.LXX(i, j) = f * (ric.RicXX(i, j) - s * metric.G1(i, j));
      ln.LXY(i, j) = f * (ric.RicXY(i, j) - s * metric.G3(i, j));
      ln.LYX(i, j) = f * (ric.RicYX(i, j) - s * metric.G3(i, j));
      ln.LYY(i, j) = f * (ric.RicYY(i, j) - s * metric.G2(i, j));
    }
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        ln.NXX(h, j) += ln.LXX(j, k) * inv.H1(k, h) + ln.LXY(j, k) * inv.H3(k, h);
        ln.NXY(h, j) += ln.LXX(j, k) * inv.H3(k, h) + ln.LXY(j, k) * inv.H2(k, h);
        ln.NYX(h, j) += ln.LYX(j, k) * inv.H1(k, h) + ln.LYY(j, k) * inv.H3(k, h);
        ln.NYY(h, j) += ln.LYX(j, k) * inv.H3(k, h) + ln.LYY(j, k) * inv.H2(k, h);
      }
  return ln;
}

struct WeylBlocks {
  AdaptedBlocks C;

  const Tensor4& operator[](Block b) const { return C[b]; }
  double sup_norm() const { return C.sup_norm(); }

  std::array<double, 12> block_norms() const {
    std::array<double, 12> out{};
    for (std::size_t b = 0; b < 12; ++b) out[b] = C.blocks[b].max_abs();
    return out;
  }
};

// C = K + L(·,Z)X - L(X,Z)· + G(·,Z)NX - G(X,Z)N· blockwise. The Printed variant
// uses NXY in the last term of CXXXX and NXX in the last term of CYXYY.
inline WeylBlocks weyl_blocks(const CurvBlocks& kb, const LNBlocks& ln, const MetricBlocks& metric,
                              FormulaVariant variant = FormulaVariant::Corrected) {
  const std::size_t n = kb.dim();
  const bool printed = variant == FormulaVariant::Printed;
  const auto& G1 = metric.G1;
  const auto& G2 = metric.G2;
  const auto& G3 = metric.G3;
  const Matrix& nxxxx = printed ? ln.NXY : ln.NXX;
  const Matrix& nyxyy = printed ? ln.NXX : ln.NXY;
  WeylBlocks wb{AdaptedBlocks(n)};
  auto& C = wb.C;
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double dhi = kronecker(h, i), dhj = kronecker(h, j);
          C[Block::XXXX](h, k, i, j) = kb[Block::XXXX](h, k, i, j) + ln.LXX(j, k) * dhi - ln.LXX(i, k) * dhj +
                                       G1(j, k) * ln.NXX(h, i) - G1(i, k) * nxxxx(h, j);
          C[Block::XXXY](h, k, i, j) =
              kb[Block::XXXY](h, k, i, j) + G1(j, k) * ln.NXY(h, i) - G1(i, k) * ln.NXY(h, j);
          C[Block::XXYX](h, k, i, j) = kb[Block::XXYX](h, k, i, j) + ln.LXY(j, k) * dhi - ln.LXY(i, k) * dhj +
                                       G3(j, k) * ln.NXX(h, i) - G3(i, k) * ln.NXX(h, j);
          C[Block::XXYY](h, k, i, j) =
              kb[Block::XXYY](h, k, i, j) + G3(j, k) * ln.NXY(h, i) - G3(i, k) * ln.NXY(h, j);
          C[Block::YXXX](h, k, i, j) =
              kb[Block::YXXX](h, k, i, j) - ln.LYX(i, k) * dhj + G1(j, k) * ln.NYX(h, i) - G3(i, k) * ln.NXX(h, j);
          C[Block::YXXY](h, k, i, j) =
              kb[Block::YXXY](h, k, i, j) + ln.LXX(j, k) * dhi + G1(j, k) * ln.NYY(h, i) - G3(i, k) * ln.NXY(h, j);
          C[Block::YXYX](h, k, i, j) =
              kb[Block::YXYX](h, k, i, j) - ln.LYY(i, k) * dhj + G3(j, k) * ln.NYX(h, i) - G2(i, k) * ln.NXX(h, j);
          C[Block::YXYY](h, k, i, j) =
              kb[Block::YXYY](h, k, i, j) + ln.LXY(j, k) * dhi + G3(j, k) * ln.NYY(h, i) - G2(i, k) * nyxyy(h, j);
          C[Block::YYXX](h, k, i, j) =
              kb[Block::YYXX](h, k, i, j) + G3(j, k) * ln.NYX(h, i) - G3(i, k) * ln.NYX(h, j);
          C[Block::YYXY](h, k, i, j) = kb[Block::YYXY](h, k, i, j) + ln.LYX(j, k) * dhi - ln.LYX(i, k) * dhj +
                                       G3(j, k) * ln.NYY(h, i) - G3(i, k) * ln.NYY(h, j);
          C[Block::YYYX](h, k, i, j) =
              kb[Block::YYYX](h, k, i, j) + G2(j, k) * ln.NYX(h, i) - G2(i, k) * ln.NYX(h, j);
          C[Block::YYYY](h, k, i, j) = kb[Block::YYYY](h, k, i, j) + ln.LYY(j, k) * dhi - ln.LYY(i, k) * dhj +
                                       G2(j, k) * ln.NYY(h, i) - G2(i, k) * ln.NYY(h, j);
        }
  return wb;
}

// Everything the Weyl pipeline produces at one point.
struct WeylEvaluation {
  LiftPoint lp;
  CurvBlocks curvature;
  RicciScalar ricci;
  LNBlocks ln;
  WeylBlocks weyl;
};

inline WeylEvaluation evaluate_weyl(const ParamFamily& params, const BaseGeometry& base, std::span<const double> x,
                                    std::span<const double> y, FormulaVariant variant = FormulaVariant::Corrected) {
  WeylEvaluation ev;
  ev.lp = make_lift_point(params, base, x, y);
  ev.curvature = curvature_blocks(ev.lp, variant);
  ev.ricci = ricci_scalar(ev.curvature, ev.lp.metric, ev.lp.inverse);
  ev.ln = ln_blocks(ev.ricci, ev.lp.metric, ev.lp.inverse, ev.lp.dim());
  ev.weyl = weyl_blocks(ev.curvature, ev.ln, ev.lp.metric, variant);
  return ev;
}

inline WeylBlocks weyl_blocks(const ParamFamily& params, const BaseGeometry& base, std::span<const double> x,
                              std::span<const double> y, FormulaVariant variant = FormulaVariant::Corrected) {
  return evaluate_weyl(params, base, x, y, variant).weyl;
}

// ---- base manifold ----

struct BaseWeyl {
  Tensor4 C;  // C^h_{kij} stored [h][k][i][j]
  bool discriminating = true;  // false for n = 3, where C vanishes identically
};

inline BaseWeyl base_weyl(const BaseGeometry& base, std::span<const double> x) {
  const std::size_t n = base.dim();
  if (n < 3) throw ConfigError("base Weyl tensor needs n >= 3");
  const BasePoint p = base.evaluate(x);
  return {weyl_from_riemann(p.riemann, p.g, p.ginv), n >= 4};
}

// ---- conformal flatness ----

enum class Verdict { Flat, NonFlat, Inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Flat:
      return "flat";
    case Verdict::NonFlat:
      return "non-flat";
    default:
      return "inconclusive";
  }
}

struct FlatnessTolerances {
  double flat = 1e-8;
  double non_flat = 1e-4;
};

inline Verdict classify(double sup, const FlatnessTolerances& tol) {
  if (sup <= tol.flat) return Verdict::Flat;
  if (sup > tol.non_flat) return Verdict::NonFlat;
  return Verdict::Inconclusive;
}

struct PointResult {
  TangentPoint point;
  std::array<double, 12> block_norms{};
  double sup = 0.0;
  Block worst = Block::XXXX;
};

struct FlatnessReport {
  std::string family;
  std::string base;
  FormulaVariant variant = FormulaVariant::Corrected;
  FlatnessTolerances tolerances;
  std::vector<PointResult> points;
  std::array<double, 12> block_norms{};
  double sup = 0.0;
  Verdict verdict = Verdict::Flat;
  std::optional<Block> worst_block;  // set for non-flat and inconclusive verdicts
};

inline PointResult evaluate_point(const ParamFamily& params, const BaseGeometry& base, const TangentPoint& pt,
                                  FormulaVariant variant) {
  PointResult r;
  r.point = pt;
  const WeylBlocks wb = weyl_blocks(params, base, pt.x, pt.y, variant);
  r.block_norms = wb.block_norms();
  for (std::size_t b = 0; b < 12; ++b)
    if (r.block_norms[b] > r.sup) {
      r.sup = r.block_norms[b];
      r.worst = static_cast<Block>(b);
    }
  return r;
}

// Aggregation is a per-block max, so the result does not depend on point order.
inline void aggregate(FlatnessReport& rep) {
  rep.block_norms.fill(0.0);
  for (const auto& p : rep.points)
    for (std::size_t b = 0; b < 12; ++b) rep.block_norms[b] = std::max(rep.block_norms[b], p.block_norms[b]);
  rep.sup = 0.0;
  std::size_t worst = 0;
  for (std::size_t b = 0; b < 12; ++b)
    if (rep.block_norms[b] > rep.sup) {
      rep.sup = rep.block_norms[b];
      worst = b;
    }
  rep.verdict = classify(rep.sup, rep.tolerances);
  rep.worst_block.reset();
  if (rep.verdict != Verdict::Flat) rep.worst_block = static_cast<Block>(worst);
}

inline FlatnessReport conformal_flatness_report(const ParamFamily& params, const BaseGeometry& base,
                                                const std::vector<TangentPoint>& samples,
                                                FlatnessTolerances tol = {},
                                                FormulaVariant variant = FormulaVariant::Corrected) {
  FlatnessReport rep;
  rep.family = params.name();
  rep.base = base.label();
  rep.variant = variant;
  rep.tolerances = tol;
  rep.points.reserve(samples.size());
  for (const auto& pt : samples) rep.points.push_back(evaluate_point(params, base, pt, variant));
  aggregate(rep);
  return rep;
}

inline FlatnessReport conformal_flatness_report(const ParamFamily& params, const BaseGeometry& base,
                                                const SamplerSpec& sampler, FlatnessTolerances tol = {},
                                                FormulaVariant variant = FormulaVariant::Corrected) {
  return conformal_flatness_report(params, base, sample_points(base, sampler), tol, variant);
}

}  // namespace liftcurv
