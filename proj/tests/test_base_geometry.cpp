#include <gtest/gtest.h>

#include "liftcurv/base_geometry.hpp"
#include "liftcurv/linalg.hpp"
#include "support.hpp"

using namespace liftcurv;

namespace {

std::vector<BaseGeometry> all_bases(std::size_t n) {
  return {BaseGeometry::flat_cartesian(n), BaseGeometry::flat_curvilinear(n), BaseGeometry::space_form(n, 1.0),
          BaseGeometry::space_form(n, -1.0), BaseGeometry::perturbed(n, 0.1)};
}

// Central difference of a tensor-valued function of x along x_m.
template <typename F>
auto central(F f, Vector x, std::size_t m, double h) {
  Vector xp = x, xm = x;
  xp[m] += h;
  xm[m] -= h;
  auto d = f(xp);
  d -= f(xm);
  d *= 1.0 / (2.0 * h);
  return d;
}

}  // namespace

TEST(BaseGeometry, SpaceFormOriginIsEuclidean) {
  const BaseGeometry b = BaseGeometry::space_form(3, 1.0);
  const BasePoint p = b.evaluate(Vector{0, 0, 0});
  fixtures::expect_near(p.g, identity(3), 0.0);
  EXPECT_EQ(p.christoffel.max_abs(), 0.0);
}

TEST(BaseGeometry, FlatCartesianHasZeroCurvature) {
  const BaseGeometry b = BaseGeometry::flat_cartesian(3);
  const BasePoint p = b.evaluate(Vector{0.3, -0.2, 0.1});
  EXPECT_EQ(p.riemann.max_abs(), 0.0);
  EXPECT_EQ(p.nabla_riemann.max_abs(), 0.0);
}

TEST(BaseGeometry, FlatCurvilinearHasZeroCurvature) {
  const BaseGeometry b = BaseGeometry::flat_curvilinear(3);
  for (const auto& pt : fixtures::points(b, 10, 3)) {
    const BasePoint p = b.evaluate(pt.x);
    EXPECT_GT(p.christoffel.max_abs(), 1e-3);
    EXPECT_LE(p.riemann.max_abs(), 1e-12);
  }
}

TEST(BaseGeometry, SpaceFormSectionalCurvature) {
  for (double c : {1.0, -1.0, 0.5}) {
    const BaseGeometry b = BaseGeometry::space_form(3, c);
    for (const auto& pt : fixtures::points(b, 10, 11)) {
      const BasePoint p = b.evaluate(pt.x);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
          if (i != j) {
            EXPECT_NEAR(sectional_curvature(p, i, j), c, 1e-8);
          }
    }
  }
}

TEST(BaseGeometry, MetricSymmetricPositiveDefinite) {
  for (std::size_t n : {2u, 3u, 4u})
    for (const auto& b : all_bases(n))
      for (const auto& pt : fixtures::points(b, 10, 5)) {
        const Matrix g = b.metric(pt.x);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(g(i, j), g(j, i));
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(g));
        EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << b.label();
      }
}

TEST(BaseGeometry, CurvatureSymmetriesAndBianchi) {
  for (const auto& b : all_bases(3))
    for (const auto& pt : fixtures::points(b, 10, 7)) {
      const BasePoint p = b.evaluate(pt.x);
      const std::size_t n = 3;
      for (std::size_t h = 0; h < n; ++h)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            EXPECT_NEAR(p.christoffel(h, i, j), p.christoffel(h, j, i), 1e-14);
            for (std::size_t k = 0; k < n; ++k) {
              EXPECT_NEAR(p.riemann(h, k, i, j), -p.riemann(h, k, j, i), 1e-12);
              EXPECT_NEAR(p.riemann(h, k, i, j) + p.riemann(h, i, j, k) + p.riemann(h, j, k, i), 0.0, 1e-9);
            }
          }
    }
}

TEST(BaseGeometry, ChristoffelMatchesMetricDifferences) {
  const double h = 1e-5;
  for (const auto& b : all_bases(3))
    for (const auto& pt : fixtures::points(b, 5, 13)) {
      const std::size_t n = 3;
      const BasePoint p = b.evaluate(pt.x);
      std::vector<Matrix> dg;
      for (std::size_t m = 0; m < n; ++m) dg.push_back(central([&](const Vector& x) { return b.metric(x); }, pt.x, m, h));
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            double want = 0.0;
            for (std::size_t k = 0; k < n; ++k)
              want += 0.5 * p.ginv(l, k) * (dg[i](k, j) + dg[j](k, i) - dg[k](i, j));
            EXPECT_NEAR(p.christoffel(l, i, j), want, 1e-7) << b.label();
          }
    }
}

TEST(BaseGeometry, NablaRiemannMatchesDifferences) {
  const double step = 1e-5;
  for (const auto& b : all_bases(3))
    for (const auto& pt : fixtures::points(b, 3, 17)) {
      const std::size_t n = 3;
      const BasePoint p = b.evaluate(pt.x);
      const auto& G = p.christoffel;
      const auto& R = p.riemann;
      for (std::size_t m = 0; m < n; ++m) {
        const Tensor4 dR = central([&](const Vector& x) { return b.evaluate(x).riemann; }, pt.x, m, step);
        for (std::size_t h = 0; h < n; ++h)
          for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t j = 0; j < n; ++j) {
                double want = dR(h, k, i, j);
                for (std::size_t l = 0; l < n; ++l)
                  want += G(h, m, l) * R(l, k, i, j) - G(l, m, k) * R(h, l, i, j) - G(l, m, i) * R(h, k, l, j) -
                          G(l, m, j) * R(h, k, i, l);
                EXPECT_NEAR(p.nabla_riemann(m, h, k, i, j), want, 1e-6) << b.label();
              }
      }
      if (b.parallel_curvature()) {
        EXPECT_LE(p.nabla_riemann.max_abs(), 1e-10) << b.label();
      }
    }
}

TEST(BaseGeometry, PerturbedCurvatureIsNotParallel) {
  const BaseGeometry b = BaseGeometry::perturbed(3, 0.1);
  const BasePoint p = b.evaluate(Vector{0.3, -0.2, 0.4});
  EXPECT_GT(p.nabla_riemann.max_abs(), 1e-3);
}

TEST(BaseGeometry, ZeroContractionsAtZeroFiber) {
  const BaseGeometry b = BaseGeometry::space_form(3, 1.0);
  const BasePoint p = b.evaluate(Vector{0.2, 0.1, -0.3});
  const Vector y{0, 0, 0};
  for (double v : contract_y(p.g, y)) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(christoffel_0(p.christoffel, y).max_abs(), 0.0);
  EXPECT_EQ(riemann_0(p.riemann, y).max_abs(), 0.0);
}

TEST(BaseGeometry, IdentityMetricContraction) {
  const Vector g0 = contract_y(identity(2), Vector{3, 4});
  EXPECT_EQ(g0, (Vector{3, 4}));
}

TEST(BaseGeometry, ChristoffelZeroContractionMatchesLoop) {
  const BaseGeometry b = BaseGeometry::flat_curvilinear(3);
  for (const auto& pt : fixtures::points(b, 5, 19)) {
    const Tensor3 gam = b.christoffel(pt.x);
    const Matrix g0 = christoffel_0(gam, pt.y);
    for (std::size_t h = 0; h < 3; ++h)
      for (std::size_t i = 0; i < 3; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < 3; ++k) s += pt.y[k] * gam(h, k, i);
        EXPECT_NEAR(g0(h, i), s, 1e-15);
      }
  }
}

TEST(BaseGeometry, ConstantCurvatureDetection) {
  std::vector<Vector> xs;
  for (const auto& pt : fixtures::points(BaseGeometry::flat_cartesian(3), 6, 23)) xs.push_back(pt.x);
  const auto flat = is_constant_curvature(BaseGeometry::flat_cartesian(3), xs);
  EXPECT_TRUE(flat.constant);
  EXPECT_EQ(flat.c, 0.0);
  const auto sphere = is_constant_curvature(BaseGeometry::space_form(3, 1.0), xs);
  EXPECT_TRUE(sphere.constant);
  EXPECT_NEAR(sphere.c, 1.0, 1e-6);
  const auto pert = is_constant_curvature(BaseGeometry::perturbed(3, 0.1), xs);
  EXPECT_FALSE(pert.constant);
  EXPECT_GT(pert.residual, 1e-3);
}

TEST(BaseGeometry, ParseLabels) {
  EXPECT_EQ(BaseGeometry::parse("flat", 2).kind(), BaseKind::FlatCartesian);
  EXPECT_EQ(BaseGeometry::parse("flat-curvilinear", 2).kind(), BaseKind::FlatCurvilinear);
  EXPECT_EQ(BaseGeometry::parse("sphere:1", 2).parameter(), 1.0);
  EXPECT_EQ(BaseGeometry::parse("perturbed:0.1", 3).label(), "perturbed:0.1");
  EXPECT_THROW(BaseGeometry::parse("torus", 2), ConfigError);
  EXPECT_THROW(BaseGeometry::parse("sphere:abc", 2), ConfigError);
}

TEST(BaseGeometry, OutsideDomainThrows) {
  const BaseGeometry b = BaseGeometry::space_form(2, -1.0);
  EXPECT_FALSE(b.in_domain(Vector{2.0, 0.0}));
  EXPECT_THROW(b.metric(Vector{2.0, 0.0}), DomainError);
}
