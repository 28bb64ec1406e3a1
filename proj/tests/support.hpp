#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "liftcurv/families.hpp"
#include "liftcurv/sampler.hpp"
#include "liftcurv/tensor.hpp"

namespace liftcurv::fixtures {

inline ParamFamily sasaki() { return build_family("sasaki"); }

inline ParamFamily constant_family(double c1, double c2, double c3, double d1 = 0, double d2 = 0, double d3 = 0) {
  return ParamFamily::from_polynomials("custom", {{{c1}, {c2}, {c3}, {d1}, {d2}, {d3}}});
}

// A generic family with all six coefficients t-dependent and nondegenerate on t in [0, 3].
inline ParamFamily generic_family() {
  return ParamFamily::from_polynomials("custom", {{{2.0, 0.3}, {1.0, 0.2, 0.05}, {0.4, -0.1}, {0.1, 0.02}, {0.2, -0.03}, {0.05, 0.01}}});
}

inline std::vector<TangentPoint> points(const BaseGeometry& base, std::size_t count, std::uint64_t seed,
                                        double y_lo = 0.5, double y_hi = 1.5) {
  SamplerSpec s;
  s.count = count;
  s.seed = seed;
  s.y_lo = y_lo;
  s.y_hi = y_hi;
  return sample_points(base, s);
}

template <std::size_t R>
void expect_near(const Tensor<R>& a, const Tensor<R>& b, double tol) {
  ASSERT_EQ(a.dim(), b.dim());
  EXPECT_LE(max_abs_diff(a, b), tol);
}

}  // namespace liftcurv::fixtures
