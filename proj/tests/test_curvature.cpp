#include <gtest/gtest.h>

#include "liftcurv/curvature.hpp"
#include "liftcurv/oracle_compare.hpp"
#include "liftcurv/riemannian.hpp"
#include "support.hpp"

using namespace liftcurv;

namespace {

bool argument_pair_antisymmetric(std::string_view name) {
  return (name[0] == 'X' && name[1] == 'X') || (name[0] == 'Y' && name[1] == 'Y');
}

}  // namespace

TEST(Curvature, SasakiOnFlatVanishes) {
  const BaseGeometry base = BaseGeometry::flat_curvilinear(3);
  for (const auto& pt : fixtures::points(base, 3, 1)) {
    const LiftPoint lp = make_lift_point(fixtures::sasaki(), base, pt.x, pt.y);
    const CurvBlocks kb = curvature_blocks(lp);
    EXPECT_LE(kb.sup_norm(), 1e-12);
    const RicciScalar rs = ricci_scalar(kb, lp.metric, lp.inverse);
    EXPECT_LE(rs.assembled().max_abs(), 1e-12);
    EXPECT_LE(std::abs(rs.scal), 1e-12);
  }
}

TEST(Curvature, ArgumentPairAntisymmetry) {
  const ParamFamily fam = fixtures::generic_family();
  const BaseGeometry base = BaseGeometry::perturbed(3, 0.1);
  for (const auto& pt : fixtures::points(base, 3, 2)) {
    const CurvBlocks kb = curvature_blocks(fam, base, pt.x, pt.y);
    for (std::size_t b = 0; b < 12; ++b) {
      if (!argument_pair_antisymmetric(kBlockNames[b])) continue;
      const Tensor4& t = kb.blocks[b];
      for (std::size_t h = 0; h < 3; ++h)
        for (std::size_t k = 0; k < 3; ++k)
          for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(t(h, k, i, j), -t(h, k, j, i), 1e-10) << kBlockNames[b];
    }
  }
}

TEST(Curvature, LoweredTensorSymmetries) {
  const ParamFamily fam = fixtures::generic_family();
  for (const auto& base : {BaseGeometry::space_form(3, 1.0), BaseGeometry::perturbed(3, 0.1)})
    for (const auto& pt : fixtures::points(base, 3, 3)) {
      const LiftPoint lp = make_lift_point(fam, base, pt.x, pt.y);
      const Tensor4 low = lower_first(assemble_full(curvature_blocks(lp)), lp.metric.assembled());
      const std::size_t m = low.dim();
      const double tol = 1e-8 * std::max(1.0, low.max_abs());
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          for (std::size_t c = 0; c < m; ++c)
            for (std::size_t d = 0; d < m; ++d) {
              // low(a, b, c, d) = G(R(E_c, E_d) E_b, E_a)
              EXPECT_NEAR(low(a, b, c, d), -low(b, a, c, d), tol);
              EXPECT_NEAR(low(a, b, c, d), low(c, d, a, b), tol);
              EXPECT_NEAR(low(a, b, c, d) + low(a, c, d, b) + low(a, d, b, c), 0.0, tol);
            }
    }
}

TEST(Curvature, RicciSymmetric) {
  const ParamFamily fam = fixtures::generic_family();
  const BaseGeometry base = BaseGeometry::perturbed(3, 0.1);
  for (const auto& pt : fixtures::points(base, 5, 4)) {
    const LiftPoint lp = make_lift_point(fam, base, pt.x, pt.y);
    const Matrix ric = ricci_scalar(curvature_blocks(lp), lp.metric, lp.inverse).assembled();
    for (std::size_t a = 0; a < ric.dim(); ++a)
      for (std::size_t b = 0; b < ric.dim(); ++b) EXPECT_NEAR(ric(a, b), ric(b, a), 1e-8);
  }
}

TEST(Curvature, SasakiScalarOverConstantCurvatureSurface) {
  // scal = 2c - (c²/2) |y|²_g
  for (double c : {1.0, -1.0, 0.5}) {
    const BaseGeometry base = BaseGeometry::space_form(2, c);
    for (const auto& pt : fixtures::points(base, 5, 5)) {
      const LiftPoint lp = make_lift_point(fixtures::sasaki(), base, pt.x, pt.y);
      const RicciScalar rs = ricci_scalar(curvature_blocks(lp), lp.metric, lp.inverse);
      const double y2 = 2.0 * lp.fiber.t;
      EXPECT_NEAR(rs.scal, 2 * c - 0.5 * c * c * y2, 1e-11);
    }
  }
}

TEST(Curvature, MatchesOracleRiemann) {
  const OracleTolerances tol;
  const std::vector<std::pair<ParamFamily, BaseGeometry>> cases = {
      {fixtures::sasaki(), BaseGeometry::space_form(2, 1.0)},
      {fixtures::generic_family(), BaseGeometry::space_form(3, -1.0)},
      {fixtures::generic_family(), BaseGeometry::flat_curvilinear(2)},
      {fixtures::generic_family(), BaseGeometry::perturbed(3, 0.1)}};
  for (const auto& [fam, base] : cases)
    for (const auto& pt : fixtures::points(base, 2, 6)) {
      const PointDiff d = oracle_diff(fam, base, pt, tol);
      for (const auto& t : d.tensors) EXPECT_LE(t.rel, 1e-4) << base.label() << " " << t.name;
      EXPECT_TRUE(d.flagged.empty()) << base.label();
    }
}

TEST(Curvature, VariantsAgreeOnParallelBases) {
  const ParamFamily fam = fixtures::generic_family();
  for (const auto& base : {BaseGeometry::space_form(3, 1.0), BaseGeometry::flat_curvilinear(3)})
    for (const auto& pt : fixtures::points(base, 2, 7)) {
      const LiftPoint lp = make_lift_point(fam, base, pt.x, pt.y);
      const Tensor4 a = assemble_full(curvature_blocks(lp, FormulaVariant::Corrected));
      const Tensor4 b = assemble_full(curvature_blocks(lp, FormulaVariant::Printed));
      EXPECT_LE(max_abs_diff(a, b), 1e-12);
    }
}

TEST(Curvature, PrintedVariantMissesGradientTerms) {
  const ParamFamily fam = fixtures::generic_family();
  const BaseGeometry base = BaseGeometry::perturbed(3, 0.3);
  const auto pt = fixtures::points(base, 1, 8).front();
  const PointDiff corrected = oracle_diff(fam, base, pt, {}, FormulaVariant::Corrected);
  const PointDiff printed = oracle_diff(fam, base, pt, {}, FormulaVariant::Printed);
  EXPECT_TRUE(corrected.pass);
  EXPECT_FALSE(printed.pass);
}
