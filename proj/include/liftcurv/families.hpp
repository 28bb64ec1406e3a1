#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liftcurv/base_geometry.hpp"
#include "liftcurv/errors.hpp"
#include "liftcurv/lift_metric.hpp"
#include "liftcurv/sampler.hpp"
#include "liftcurv/scalar_jets.hpp"

// Conformally flat lifted-metric families on flat bases, with the constant
// curvature family and Sasaki for comparison.

namespace liftcurv {

inline constexpr std::array<std::string_view, 8> kFamilyNames = {"thm41_form1", "thm41_form2", "thm42", "cor43",
                                                                 "thm44",       "remark",      "sasaki", "custom"};

// Families that carry the conformal-flatness claim on flat bases.
inline constexpr std::array<std::string_view, 5> kTheoremFamilies = {"thm41_form1", "thm41_form2", "thm42", "cor43",
                                                                     "thm44"};

// coeffs[i] multiplies t^i
struct Polynomial {
  std::vector<double> coeffs;

  Jet3 operator()(double t) const { return ClosedForm::polynomial(coeffs).evaluate<3>(t); }

  Polynomial derivative() const {
    Polynomial d;
    for (std::size_t i = 1; i < coeffs.size(); ++i) d.coeffs.push_back(static_cast<double>(i) * coeffs[i]);
    return d;
  }
};

struct FamilySpec {
  std::string name = "sasaki";
  std::optional<double> k;  // family default when unset
  double eps = 0.0;
  Polynomial alpha{{1.0, 1.0}};
  Polynomial beta{{1.0}};
  Polynomial gamma{{0.0}};
  std::array<Polynomial, 6> custom{};  // c1, c2, c3, d1, d2, d3
  // energy densities on which the constraints are checked
  double t_min = 0.0;
  double t_max = 2.0;
  std::size_t grid = 64;
};

// Nonzero default k keeps kα - β² and kα - 4e^{2ε}/t away from zero for the default α, β.
inline double default_k(std::string_view name) {
  if (name == "thm42" || name == "cor43") return -1.0;
  if (name == "thm41_form2" || name == "remark") return 2.0;
  return 0.0;
}

inline bool is_known_family(std::string_view name) {
  for (auto n : kFamilyNames)
    if (n == name) return true;
  return false;
}

// Families singular at y = 0 live on TM0.
inline bool needs_nonzero_fiber(std::string_view name) { return name == "thm42" || name == "cor43"; }

namespace detail {

struct Constraint {
  std::string predicate;
  std::function<double(double)> value;  // must stay away from zero
};

inline void check_constraints(const FamilySpec& spec, const std::vector<Constraint>& cs, bool open_at_zero) {
  if (!(spec.t_max >= spec.t_min) || spec.t_min < 0.0) throw ConfigError("family t-range must satisfy 0 <= t_min <= t_max");
  const std::size_t m = std::max<std::size_t>(spec.grid, 2);
  // a sign change between grid points means a zero in between
  std::vector<double> previous(cs.size(), 0.0);
  double previous_t = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    double t = spec.t_min + (spec.t_max - spec.t_min) * static_cast<double>(s) / static_cast<double>(m - 1);
    if (open_at_zero && t <= 0.0) {
      if (spec.t_max <= 0.0) throw ConfigError(spec.name + ": constraint t > 0 violated on the whole t-range");
      continue;
    }
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const double v = cs[i].value(t);
      if (!std::isfinite(v) || std::abs(v) <= kDegeneracyThreshold)
        throw ConfigError(spec.name + ": constraint " + cs[i].predicate + " violated at t = " + std::to_string(t));
      if (previous[i] * v < 0.0)
        throw ConfigError(spec.name + ": constraint " + cs[i].predicate + " violated between t = " +
                          std::to_string(previous_t) + " and t = " + std::to_string(t));
      previous[i] = v;
    }
    previous_t = t;
  }
}

// Nondegeneracy of the lifted metric: c1c2 - c3² and (c1+2td1)(c2+2td2) - (c3+2td3)².
inline std::vector<Constraint> nondegeneracy(const ParamFamily& f) {
  return {{"c1*c2 - c3^2 != 0",
           [f](double t) {
             const auto c = f(t);
             return c.c1.v() * c.c2.v() - c.c3.v() * c.c3.v();
           }},
          {"(c1+2t d1)(c2+2t d2) - (c3+2t d3)^2 != 0", [f](double t) {
             const auto c = f(t);
             const double e1 = c.c1.v() + 2 * t * c.d1.v(), e2 = c.c2.v() + 2 * t * c.d2.v();
             const double e3 = c.c3.v() + 2 * t * c.d3.v();
             return e1 * e2 - e3 * e3;
           }}};
}

inline Jet3 jet_t(double t) { return Jet3::variable(t); }

}  // namespace detail

inline ParamFamily build_family(const FamilySpec& spec) {
  using detail::Constraint;
  const std::string& name = spec.name;
  if (!is_known_family(name)) throw ConfigError("unknown family '" + name + "'");
  const double k = spec.k.value_or(default_k(name));
  const Polynomial alpha = spec.alpha, beta = spec.beta, gamma = spec.gamma;
  const Polynomial dalpha = alpha.derivative(), dbeta = beta.derivative();
  const Jet3 zero = Jet3::constant(0.0);
  std::vector<Constraint> cs;
  std::optional<ParamFamily> fam;
  bool tm0 = false;

  if (name == "sasaki") {
    fam = ParamFamily::from_polynomials(name, {{{1.0}, {1.0}, {0.0}, {0.0}, {0.0}, {0.0}}});
  } else if (name == "custom") {
    std::array<std::vector<double>, 6> c;
    for (std::size_t i = 0; i < 6; ++i) c[i] = spec.custom[i].coeffs;
    fam = ParamFamily::from_polynomials(name, c);
  } else if (name == "thm41_form1") {
    cs.push_back({"beta != 0", [beta](double t) { return beta(t).v(); }});
    fam = ParamFamily(name, [=](double t) {
      const Jet3 T = detail::jet_t(t), a = alpha(t), da = dalpha(t), b = beta(t), db = dbeta(t), g = gamma(t);
      const Jet3 d2 = da + (a * (g - db) + 2.0 * da * g * T) / b - 2.0 * a * db * g * T / (b * b);
      return LiftCoefficients{zero, a, b, zero, d2, g};
    });
  } else if (name == "thm41_form2" || name == "remark") {
    if (name == "thm41_form2" && k == 0.0) throw ConfigError(name + ": constraint k != 0 violated");
    cs.push_back({"beta != 0", [beta](double t) { return beta(t).v(); }});
    if (name == "thm41_form2")
      cs.push_back({"k*alpha - beta^2 != 0", [=](double t) {
                      const double b = beta(t).v();
                      return k * alpha(t).v() - b * b;
                    }});
    const bool form2 = name == "thm41_form2";
    fam = ParamFamily(name, [=](double t) {
      const Jet3 T = detail::jet_t(t), a = alpha(t), da = dalpha(t), b = beta(t), db = dbeta(t);
      Jet3 d2;
      if (form2)
        d2 = (k * da * (2.0 * a + da * T) - 2.0 * da * b * (b + 2.0 * db * T) + 4.0 * a * db * db * T) /
             (2.0 * (k * a - b * b));
      else
        d2 = (da * b * b + 2.0 * da * b * db * T - 2.0 * a * db * db * T) / (b * b);
      return LiftCoefficients{Jet3::constant(k), a, b, zero, d2, db};
    });
  } else if (name == "thm42" || name == "cor43") {
    if (k == 0.0) throw ConfigError(name + ": constraint k != 0 violated");
    tm0 = true;
    const double e = std::exp(spec.eps);
    const bool diagonal = name == "cor43";
    cs.push_back({"alpha != 4e^{2eps}/(k t)", [=](double t) { return k * alpha(t).v() - 4.0 * e * e / t; }});
    fam = ParamFamily(
        name,
        [=](double t) {
          const Jet3 T = detail::jet_t(t), a = alpha(t), da = dalpha(t);
          const Jet3 d2 =
              (k * da * (2.0 * a + da * T) + 4.0 * a * e * e / (T * T)) / (2.0 * (k * a - 4.0 * e * e / T));
          const Jet3 d3 = diagonal ? zero : e * pow(T, -1.5);
          const Jet3 c3 = diagonal ? zero : -2.0 * T * d3;
          return LiftCoefficients{Jet3::constant(k), a, c3, zero, d2, d3};
        },
        [](double t) { return t > 0.0; });
  } else if (name == "thm44") {
    fam = ParamFamily(name, [=](double t) { return LiftCoefficients{zero, zero, beta(t), zero, zero, gamma(t)}; });
  }

  for (auto& c : detail::nondegeneracy(*fam)) cs.push_back(std::move(c));
  detail::check_constraints(spec, cs, tm0);
  return *fam;
}

inline ParamFamily build_family(std::string_view name) {
  FamilySpec spec;
  spec.name = std::string(name);
  return build_family(spec);
}

// ---- self check ----

struct FamilySelfcheck {
  std::string family;
  std::size_t points = 0;
  double singular_identity = 0.0;  // max |c3+2t d3| (thm42) or |c2+2t d2| (thm44), 0 otherwise
  bool singular_identity_applies = false;
  double d1_residual = 0.0;  // max |d1 - c c2| with c the fitted base curvature
  bool d1_applies = false;
  double base_curvature = 0.0;
  std::size_t degenerate = 0;  // points failing the nondegeneracy gate
  bool pass = true;
};

inline FamilySelfcheck family_selfcheck(const ParamFamily& fam, const BaseGeometry& base,
                                        const std::vector<TangentPoint>& samples) {
  FamilySelfcheck r;
  r.family = fam.name();
  r.points = samples.size();
  r.singular_identity_applies = fam.name() == "thm42" || fam.name() == "thm44";
  std::vector<Vector> xs;
  for (const auto& p : samples) xs.push_back(p.x);
  if (xs.size() >= 2) {
    const ConstantCurvatureFit fit = is_constant_curvature(base, xs);
    r.d1_applies = fit.constant;
    r.base_curvature = fit.c;
  }
  for (const auto& p : samples) {
    const double t = energy_density(base, p.x, p.y);
    const LiftCoefficients c = fam(t);
    if (fam.name() == "thm42")
      r.singular_identity = std::max(r.singular_identity, std::abs(c.c3.v() + 2.0 * t * c.d3.v()));
    if (fam.name() == "thm44")
      r.singular_identity = std::max(r.singular_identity, std::abs(c.c2.v() + 2.0 * t * c.d2.v()));
    if (r.d1_applies) r.d1_residual = std::max(r.d1_residual, std::abs(c.d1.v() - r.base_curvature * c.c2.v()));
    try {
      check_nondegenerate(metric_blocks(fam, base, p.x, p.y));
      inverse_coefficients(c, t);
    } catch (const DegenerateError&) {
      ++r.degenerate;
    }
  }
  r.pass = r.degenerate == 0 && r.singular_identity <= 1e-9 && (!r.d1_applies || r.d1_residual <= 1e-9);
  return r;
}

}  // namespace liftcurv
