#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "liftcurv/adapted_blocks.hpp"
#include "liftcurv/connection.hpp"
#include "liftcurv/oracle.hpp"
#include "liftcurv/weyl.hpp"

// Analytic adapted-frame outputs checked against the coordinate oracle.

namespace liftcurv {

struct OracleTolerances {
  double rel = 1e-4;
  double floor = 1.0;  // denominator floor of the relative difference
  FdOptions fd;
};

// Everything the analytic path produces at one point, in the adapted frame.
struct AnalyticOutputs {
  TangentPoint point;
  FrameChange frame;
  Matrix metric;       // G(E_A, E_B)
  Tensor3 connection;  // ω(C, A, B)
  CurvBlocks curvature;
  RicciScalar ricci;
  WeylBlocks weyl;
};

inline AnalyticOutputs analytic_outputs(const ParamFamily& params, const BaseGeometry& base, std::span<const double> x,
                                        std::span<const double> y,
                                        FormulaVariant variant = FormulaVariant::Corrected) {
  WeylEvaluation ev = evaluate_weyl(params, base, x, y, variant);
  AnalyticOutputs a;
  a.point = {Vector(x.begin(), x.end()), Vector(y.begin(), y.end())};
  a.frame = frame_change(base, x, y);
  a.metric = ev.lp.metric.assembled();
  a.connection = adapted_connection(conn_coeffs(ev.lp), ev.lp.base.christoffel);
  a.curvature = std::move(ev.curvature);
  a.ricci = ev.ricci;
  a.weyl = std::move(ev.weyl);
  return a;
}

struct TensorDiff {
  std::string name;
  double abs = 0.0;
  double rel = 0.0;
  bool pass = true;
};

struct PointDiff {
  TangentPoint point;
  std::vector<TensorDiff> tensors;  // metric, christoffel, riemann, ricci, scalar, weyl
  std::array<double, 12> curvature_blocks{};  // per-block relative diffs in the adapted frame
  std::array<double, 12> weyl_blocks{};
  std::vector<std::string> flagged;  // "K:XXYY", "C:YXYY", ...
  bool pass = true;
};

namespace detail {

inline TensorDiff tensor_diff(std::string name, double abs, double scale, const OracleTolerances& tol) {
  TensorDiff d{std::move(name), abs, abs / std::max(scale, tol.floor), true};
  d.pass = d.rel <= tol.rel;
  return d;
}

// Block diffs share the whole-tensor scale, so small blocks are not over-weighted.
inline std::array<double, 12> block_diffs(const AdaptedBlocks& a, const AdaptedBlocks& b, double scale,
                                          const OracleTolerances& tol) {
  std::array<double, 12> out{};
  for (std::size_t k = 0; k < 12; ++k)
    out[k] = max_abs_diff(a.blocks[k], b.blocks[k]) / std::max(scale, tol.floor);
  return out;
}

}  // namespace detail

// Coordinate-frame comparison of the lowered tensors plus per-block diagnostics
// after moving the oracle tensors into the adapted frame.
inline PointDiff compare(const AnalyticOutputs& an, const FdGeometry& fd, const OracleTolerances& tol = {}) {
  PointDiff pd;
  pd.point = an.point;
  const FrameChange& fc = an.frame;
  const Matrix g = to_coordinates(an.metric, fc);
  pd.tensors.push_back(detail::tensor_diff("metric", max_abs_diff(g, fd.metric), fd.metric.max_abs(), tol));

  const Tensor3 gam = connection_to_coordinates(an.connection, fc);
  pd.tensors.push_back(
      detail::tensor_diff("christoffel", max_abs_diff(gam, fd.christoffel), fd.christoffel.max_abs(), tol));

  const Tensor4 k = to_coordinates(assemble_full(an.curvature), fc);
  const Tensor4 k_low = lower_first(k, g);
  const Tensor4 fd_low = lower_first(fd.riemann, fd.metric);
  pd.tensors.push_back(detail::tensor_diff("riemann", max_abs_diff(k_low, fd_low), fd_low.max_abs(), tol));

  const Matrix ric = to_coordinates(an.ricci.assembled(), fc);
  pd.tensors.push_back(detail::tensor_diff("ricci", max_abs_diff(ric, fd.ricci), fd.ricci.max_abs(), tol));
  pd.tensors.push_back(
      detail::tensor_diff("scalar", std::abs(an.ricci.scal - fd.scalar), std::abs(fd.scalar), tol));

  const Tensor4 c = to_coordinates(assemble_full(an.weyl.C), fc);
  const Tensor4 c_low = lower_first(c, g);
  const Tensor4 fdc_low = lower_first(fd.weyl, fd.metric);
  pd.tensors.push_back(detail::tensor_diff("weyl", max_abs_diff(c_low, fdc_low), fdc_low.max_abs(), tol));

  const AdaptedBlocks fd_k = split_full(to_adapted(fd.riemann, fc));
  const AdaptedBlocks fd_c = split_full(to_adapted(fd.weyl, fc));
  pd.curvature_blocks = detail::block_diffs(an.curvature, fd_k, fd_k.sup_norm(), tol);
  pd.weyl_blocks = detail::block_diffs(an.weyl.C, fd_c, fd_c.sup_norm(), tol);
  for (std::size_t b = 0; b < 12; ++b) {
    if (pd.curvature_blocks[b] > tol.rel) pd.flagged.push_back("K:" + std::string(kBlockNames[b]));
    if (pd.weyl_blocks[b] > tol.rel) pd.flagged.push_back("C:" + std::string(kBlockNames[b]));
  }
  for (const auto& t : pd.tensors) pd.pass = pd.pass && t.pass;
  pd.pass = pd.pass && pd.flagged.empty();
  return pd;
}

inline PointDiff oracle_diff(const ParamFamily& params, const BaseGeometry& base, const TangentPoint& pt,
                             const OracleTolerances& tol = {}, FormulaVariant variant = FormulaVariant::Corrected) {
  const AnalyticOutputs an = analytic_outputs(params, base, pt.x, pt.y, variant);
  const FdGeometry fd = fd_geometry(coordinate_metric(params, base), join(pt.x, pt.y), tol.fd);
  return compare(an, fd, tol);
}

// Observed order of the plain central-difference Riemann tensor: error against
// the analytic value at step h and h/2.
struct ConvergenceEstimate {
  double err_h = 0.0;
  double err_half = 0.0;
  double order = 0.0;  // NaN when the error is at round-off level
};

inline ConvergenceEstimate riemann_convergence(const ParamFamily& params, const BaseGeometry& base,
                                               const TangentPoint& pt, double step = 1e-3) {
  const AnalyticOutputs an = analytic_outputs(params, base, pt.x, pt.y);
  const Tensor4 k = to_coordinates(assemble_full(an.curvature), an.frame);
  const CoordMetric cm = coordinate_metric(params, base);
  const Vector z = join(pt.x, pt.y);
  ConvergenceEstimate ce;
  ce.err_h = max_abs_diff(fd_geometry(cm, z, {step, false}).riemann, k);
  ce.err_half = max_abs_diff(fd_geometry(cm, z, {0.5 * step, false}).riemann, k);
  ce.order = convergence_order(ce.err_h, ce.err_half);
  return ce;
}

}  // namespace liftcurv
