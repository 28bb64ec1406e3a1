#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace liftcurv {

// Dense tensor of fixed rank with every index ranging over [0, n).
// Storage is row-major: the last index varies fastest.
template <std::size_t Rank>
class Tensor {
 public:
  static_assert(Rank >= 1);
  static constexpr std::size_t rank = Rank;

  Tensor() = default;
  explicit Tensor(std::size_t n, double fill = 0.0) : n_(n), data_(size_for(n), fill) {}

  std::size_t dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }

  template <class... I>
    requires(sizeof...(I) == Rank)
  double& operator()(I... idx) noexcept {
    return data_[offset(static_cast<std::size_t>(idx)...)];
  }

  template <class... I>
    requires(sizeof...(I) == Rank)
  double operator()(I... idx) const noexcept {
    return data_[offset(static_cast<std::size_t>(idx)...)];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  Tensor& operator+=(const Tensor& o) {
    assert(o.n_ == n_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    assert(o.n_ == n_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Tensor& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  static std::size_t size_for(std::size_t n) {
    std::size_t s = 1;
    for (std::size_t r = 0; r < Rank; ++r) s *= n;
    return s;
  }

  template <class... I>
  std::size_t offset(I... idx) const noexcept {
    std::size_t off = 0;
    ((assert(idx < n_), off = off * n_ + idx), ...);
    return off;
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

using Vector = std::vector<double>;
using Matrix = Tensor<2>;
using Tensor3 = Tensor<3>;
using Tensor4 = Tensor<4>;
using Tensor5 = Tensor<5>;

inline Matrix identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

inline double kronecker(std::size_t i, std::size_t j) { return i == j ? 1.0 : 0.0; }

// max |a - b| over all components
template <std::size_t R>
double max_abs_diff(const Tensor<R>& a, const Tensor<R>& b) {
  assert(a.dim() == b.dim());
  double m = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) m = std::max(m, std::abs(da[i] - db[i]));
  return m;
}

}  // namespace liftcurv
