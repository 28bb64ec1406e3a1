#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "liftcurv/base_geometry.hpp"
#include "liftcurv/errors.hpp"
#include "liftcurv/tensor.hpp"

namespace liftcurv {

struct TangentPoint {
  Vector x;
  Vector y;
};

// Points (x, y) of TM drawn from a seeded mt19937_64. Uniform draws are built
// from raw engine output so the sample set is identical across standard libraries.
struct SamplerSpec {
  std::size_t count = 100;
  std::uint64_t seed = 1;
  double x_range = 0.5;  // x uniform in [-x_range, x_range]^n
  double y_lo = 0.5;     // |y| uniform in [y_lo, y_hi]
  double y_hi = 2.0;
  double y_min = 0.0;    // hard floor on |y| (TM0 families need > 0)
  bool zero_fiber = false;  // sample y at the smallest admissible norm instead
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Standard normal by Box-Muller on the portable uniforms.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Vector unit_vector(std::size_t n) {
    for (;;) {
      Vector v(n);
      double s = 0.0;
      for (auto& e : v) {
        e = normal();
        s += e * e;
      }
      if (s < 1e-12) continue;
      s = std::sqrt(s);
      for (auto& e : v) e /= s;
      return v;
    }
  }

  // A^T A + I with A entries uniform in [-1, 1].
  Matrix spd_matrix(std::size_t n) {
    Matrix a(n);
    for (auto& e : a.data()) e = uniform(-1.0, 1.0);
    Matrix g = identity(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) g(i, j) += a(k, i) * a(k, j);
    return g;
  }

 private:
  std::mt19937_64 eng_;
};

inline void validate(const SamplerSpec& s) {
  if (s.count == 0) throw ConfigError("sampler count must be positive");
  if (!(s.x_range >= 0.0)) throw ConfigError("sampler x_range must be non-negative");
  if (!(s.y_lo > 0.0) || !(s.y_hi >= s.y_lo)) throw ConfigError("sampler needs 0 < y_lo <= y_hi");
  if (s.y_min < 0.0) throw ConfigError("sampler y_min must be non-negative");
}

// Euclidean |y| is rescaled so that |y|_g lands in [y_lo, y_hi]; points outside
// the base chart domain are redrawn.
inline std::vector<TangentPoint> sample_points(const BaseGeometry& base, const SamplerSpec& spec) {
  validate(spec);
  const std::size_t n = base.dim();
  Rng rng(spec.seed);
  std::vector<TangentPoint> pts;
  pts.reserve(spec.count);
  std::size_t attempts = 0;
  while (pts.size() < spec.count) {
    if (++attempts > 1000 * spec.count) throw ConfigError("sampler cannot find points inside the base domain");
    TangentPoint p{Vector(n), Vector(n)};
    for (auto& e : p.x) e = rng.uniform(-spec.x_range, spec.x_range);
    const Vector dir = rng.unit_vector(n);
    double r = rng.uniform(spec.y_lo, spec.y_hi);
    if (spec.zero_fiber || r < spec.y_min) r = spec.y_min;
    if (!base.in_domain(p.x)) continue;
    const Matrix g = base.metric(p.x);
    double gn = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) gn += g(i, j) * dir[i] * dir[j];
    gn = std::sqrt(gn);
    for (std::size_t i = 0; i < n; ++i) p.y[i] = r * dir[i] / gn;
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace liftcurv
