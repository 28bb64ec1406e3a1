#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "liftcurv/errors.hpp"

namespace liftcurv {

// Truncated Taylor jet of a scalar function of one variable.
//
// Internally the jet keeps normalized Taylor coefficients c_k = f^(k)(t)/k!, so
// products are Cauchy products and quotients, powers and exponentials follow
// the usual power-series recurrences. derivative(k) converts back to f^(k)(t).
template <std::size_t Order>
class Jet {
 public:
  static constexpr std::size_t order = Order;

  constexpr Jet() = default;

  static constexpr Jet constant(double value) {
    Jet j;
    j.c_[0] = value;
    return j;
  }

  // The identity function s -> s, expanded at s = t.
  static constexpr Jet variable(double t) {
    Jet j;
    j.c_[0] = t;
    if constexpr (Order >= 1) j.c_[1] = 1.0;
    return j;
  }

  // From the value and derivatives (f, f', f'', ...).
  static constexpr Jet from_derivatives(const std::array<double, Order + 1>& d) {
    Jet j;
    double fact = 1.0;
    for (std::size_t k = 0; k <= Order; ++k) {
      if (k > 0) fact *= static_cast<double>(k);
      j.c_[k] = d[k] / fact;
    }
    return j;
  }

  constexpr double value() const { return c_[0]; }

  constexpr double derivative(std::size_t k) const {
    double fact = 1.0;
    for (std::size_t i = 2; i <= k; ++i) fact *= static_cast<double>(i);
    return c_[k] * fact;
  }

  constexpr double v() const { return derivative(0); }
  constexpr double d1() const requires(Order >= 1) { return derivative(1); }
  constexpr double d2() const requires(Order >= 2) { return derivative(2); }
  constexpr double d3() const requires(Order >= 3) { return derivative(3); }

  constexpr double coefficient(std::size_t k) const { return c_[k]; }

  // Jet of f' (one order lower, all channels exact).
  constexpr Jet<Order - 1> derivative() const requires(Order >= 1) {
    std::array<double, Order> d{};
    for (std::size_t k = 0; k < Order; ++k) d[k] = derivative(k + 1);
    return Jet<Order - 1>::from_derivatives(d);
  }

  template <std::size_t Lower>
  constexpr Jet<Lower> truncate() const requires(Lower <= Order) {
    std::array<double, Lower + 1> d{};
    for (std::size_t k = 0; k <= Lower; ++k) d[k] = derivative(k);
    return Jet<Lower>::from_derivatives(d);
  }

  constexpr Jet operator-() const {
    Jet r;
    for (std::size_t k = 0; k <= Order; ++k) r.c_[k] = -c_[k];
    return r;
  }

  constexpr Jet& operator+=(const Jet& b) {
    for (std::size_t k = 0; k <= Order; ++k) c_[k] += b.c_[k];
    return *this;
  }
  constexpr Jet& operator-=(const Jet& b) {
    for (std::size_t k = 0; k <= Order; ++k) c_[k] -= b.c_[k];
    return *this;
  }
  constexpr Jet& operator*=(double s) {
    for (double& c : c_) c *= s;
    return *this;
  }

  friend constexpr Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend constexpr Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend constexpr Jet operator+(Jet a, double s) { return a += constant(s); }
  friend constexpr Jet operator+(double s, Jet a) { return a += constant(s); }
  friend constexpr Jet operator-(Jet a, double s) { return a -= constant(s); }
  friend constexpr Jet operator-(double s, const Jet& a) { return constant(s) - a; }
  friend constexpr Jet operator*(Jet a, double s) { return a *= s; }
  friend constexpr Jet operator*(double s, Jet a) { return a *= s; }

  friend constexpr Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (std::size_t k = 0; k <= Order; ++k)
      for (std::size_t j = 0; j <= k; ++j) r.c_[k] += a.c_[j] * b.c_[k - j];
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.c_[0] == 0.0) throw DegenerateError("jet division by a function with zero value");
    Jet r;
    for (std::size_t k = 0; k <= Order; ++k) {
      double s = a.c_[k];
      for (std::size_t j = 1; j <= k; ++j) s -= b.c_[j] * r.c_[k - j];
      r.c_[k] = s / b.c_[0];
    }
    return r;
  }
  friend Jet operator/(const Jet& a, double s) {
    if (s == 0.0) throw DegenerateError("jet division by zero");
    return a * (1.0 / s);
  }
  friend Jet operator/(double s, const Jet& b) { return constant(s) / b; }

  friend constexpr bool operator==(const Jet&, const Jet&) = default;

 private:
  template <std::size_t>
  friend class Jet;
  template <std::size_t O>
  friend Jet<O> pow(const Jet<O>&, double);
  template <std::size_t O>
  friend Jet<O> exp(const Jet<O>&);

  std::array<double, Order + 1> c_{};
};

// a^p for real p. Requires a.value() > 0 unless p is a nonnegative integer.
template <std::size_t Order>
Jet<Order> pow(const Jet<Order>& a, double p) {
  const double a0 = a.c_[0];
  const bool integral = p >= 0.0 && std::floor(p) == p;
  if (a0 == 0.0 && !integral) throw DomainError("jet power of zero with non-integral or negative exponent");
  if (a0 < 0.0 && std::floor(p) != p) throw DomainError("jet fractional power of a negative value");
  if (a0 == 0.0) {
    // small integer power of a jet vanishing at the expansion point
    Jet<Order> r = Jet<Order>::constant(1.0);
    for (int i = 0; i < static_cast<int>(p); ++i) r = r * a;
    return r;
  }
  Jet<Order> r;
  r.c_[0] = std::pow(a0, p);
  for (std::size_t k = 1; k <= Order; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j)
      s += ((p + 1.0) * static_cast<double>(j) - static_cast<double>(k)) * a.c_[j] * r.c_[k - j];
    r.c_[k] = s / (static_cast<double>(k) * a0);
  }
  return r;
}

template <std::size_t Order>
Jet<Order> exp(const Jet<Order>& a) {
  Jet<Order> r;
  r.c_[0] = std::exp(a.c_[0]);
  for (std::size_t k = 1; k <= Order; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a.c_[j] * r.c_[k - j];
    r.c_[k] = s / static_cast<double>(k);
  }
  return r;
}

template <std::size_t Order>
Jet<Order> sqrt(const Jet<Order>& a) {
  return pow(a, 0.5);
}

using Jet3 = Jet<3>;

// Sum of terms coef * t^power. Covers the closed forms the lifted-metric
// families need: constants (including e^eps), polynomials, t^-1 and t^-3/2.
class ClosedForm {
 public:
  struct Term {
    double coef;
    double power;
  };

  ClosedForm() = default;
  explicit ClosedForm(std::vector<Term> terms) : terms_(std::move(terms)) {}

  static ClosedForm constant(double k) { return ClosedForm({{k, 0.0}}); }

  // coeffs[i] multiplies t^i
  static ClosedForm polynomial(const std::vector<double>& coeffs) {
    std::vector<Term> terms;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (coeffs[i] != 0.0) terms.push_back({coeffs[i], static_cast<double>(i)});
    return ClosedForm(std::move(terms));
  }

  static ClosedForm power(double coef, double p) { return ClosedForm({{coef, p}}); }

  // True when every term is regular at t = 0.
  bool defined_at_zero() const {
    for (const auto& term : terms_)
      if (term.power < 0.0 || std::floor(term.power) != term.power) return false;
    return true;
  }

  bool valid(double t) const { return defined_at_zero() ? true : t > 0.0; }

  template <std::size_t Order = 3>
  Jet<Order> evaluate(double t) const {
    if (!valid(t)) throw DomainError("closed form evaluated outside its domain (t = " + std::to_string(t) + ")");
    std::array<double, Order + 1> d{};
    for (const auto& term : terms_) {
      // d^k/dt^k t^p = p (p-1) ... (p-k+1) t^(p-k)
      double falling = 1.0;
      for (std::size_t k = 0; k <= Order; ++k) {
        if (falling == 0.0) break;
        const double e = term.power - static_cast<double>(k);
        d[k] += term.coef * falling * (e == 0.0 ? 1.0 : std::pow(t, e));
        falling *= e;
      }
    }
    return Jet<Order>::from_derivatives(d);
  }

  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

// The six coefficient functions of the lifted metric evaluated at one energy density.
struct LiftCoefficients {
  Jet3 c1, c2, c3, d1, d2, d3;

  const Jet3& c(int alpha) const { return alpha == 1 ? c1 : (alpha == 2 ? c2 : c3); }
  const Jet3& d(int alpha) const { return alpha == 1 ? d1 : (alpha == 2 ? d2 : d3); }
};

// A lifted-metric parameter family: t -> (c1, c2, c3, d1, d2, d3) as jets, plus
// the set of energy densities on which it is defined. Nondegeneracy is not
// checked here.
class ParamFamily {
 public:
  using Evaluator = std::function<LiftCoefficients(double)>;
  using Validity = std::function<bool(double)>;

  ParamFamily(std::string name, Evaluator eval, Validity valid = [](double t) { return t >= 0.0; })
      : name_(std::move(name)), eval_(std::move(eval)), valid_(std::move(valid)) {}

  // Six user polynomials, in the order c1, c2, c3, d1, d2, d3.
  static ParamFamily from_polynomials(std::string name, const std::array<std::vector<double>, 6>& coeffs) {
    std::array<ClosedForm, 6> f;
    for (std::size_t i = 0; i < 6; ++i) f[i] = ClosedForm::polynomial(coeffs[i]);
    return from_closed_forms(std::move(name), f);
  }

  static ParamFamily from_closed_forms(std::string name, const std::array<ClosedForm, 6>& f) {
    bool regular = true;
    for (const auto& fi : f) regular = regular && fi.defined_at_zero();
    Validity valid = regular ? Validity([](double t) { return t >= 0.0; }) : Validity([](double t) { return t > 0.0; });
    return ParamFamily(
        std::move(name),
        [f](double t) {
          return LiftCoefficients{f[0].evaluate(t), f[1].evaluate(t), f[2].evaluate(t),
                                  f[3].evaluate(t), f[4].evaluate(t), f[5].evaluate(t)};
        },
        std::move(valid));
  }

  const std::string& name() const { return name_; }
  bool valid(double t) const { return valid_(t); }

  LiftCoefficients operator()(double t) const {
    if (!valid_(t)) throw DomainError("family '" + name_ + "' is not defined at t = " + std::to_string(t));
    return eval_(t);
  }

  // Every coefficient multiplied by the same constant.
  ParamFamily scaled(double lambda) const {
    auto inner = eval_;
    return ParamFamily(
        name_,
        [inner, lambda](double t) {
          auto c = inner(t);
          return LiftCoefficients{lambda * c.c1, lambda * c.c2, lambda * c.c3,
                                  lambda * c.d1, lambda * c.d2, lambda * c.d3};
        },
        valid_);
  }

 private:
  std::string name_;
  Evaluator eval_;
  Validity valid_;
};

}  // namespace liftcurv
