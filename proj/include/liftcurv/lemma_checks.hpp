#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liftcurv/base_geometry.hpp"
#include "liftcurv/errors.hpp"
#include "liftcurv/sampler.hpp"
#include "liftcurv/tensor.hpp"

// Linear independence of the tensor monomials in g, g0 = g(y, ·), y and δ that
// the coefficient-extraction arguments rely on.

namespace liftcurv {

enum class LemmaKind { Lemma1, Lemma1Remark, Lemma2 };

inline std::string_view to_string(LemmaKind k) {
  switch (k) {
    case LemmaKind::Lemma1:
      return "lemma1";
    case LemmaKind::Lemma1Remark:
      return "lemma1_remark";
    default:
      return "lemma2";
  }
}

inline std::optional<LemmaKind> lemma_from_name(std::string_view s) {
  if (s == "lemma1") return LemmaKind::Lemma1;
  if (s == "lemma1_remark") return LemmaKind::Lemma1Remark;
  if (s == "lemma2") return LemmaKind::Lemma2;
  return std::nullopt;
}

inline std::size_t lemma_columns(LemmaKind k) { return k == LemmaKind::Lemma2 ? 10 : 2; }

// Flattened monomials as matrix columns.
struct MonomialSystem {
  std::size_t rows = 0;
  std::vector<Vector> columns;

  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd m(rows, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c)
      for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
    return m;
  }
};

inline MonomialSystem monomial_system(LemmaKind kind, const Matrix& g, std::span<const double> y) {
  const std::size_t n = g.dim();
  if (y.size() != n) throw ConfigError("fiber vector dimension does not match the metric");
  const Vector g0 = contract_y(g, y);
  MonomialSystem s;
  if (kind == LemmaKind::Lemma1 || kind == LemmaKind::Lemma1Remark) {
    // u g_ij + v g0_i g0_j   or   u δ^i_j + v g0_j y^i
    s.rows = n * n;
    s.columns.assign(2, Vector(n * n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t r = i * n + j;
        if (kind == LemmaKind::Lemma1) {
          s.columns[0][r] = g(i, j);
          s.columns[1][r] = g0[i] * g0[j];
        } else {
          s.columns[0][r] = kronecker(i, j);
          s.columns[1][r] = g0[j] * y[i];
        }
      }
    return s;
  }
  s.rows = n * n * n * n;
  s.columns.assign(10, Vector(s.rows));
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t r = ((h * n + i) * n + j) * n + k;
          const double dhi = kronecker(h, i), dhj = kronecker(h, j), dhk = kronecker(h, k);
          s.columns[0][r] = dhi * g(j, k);
          s.columns[1][r] = dhj * g(i, k);
          s.columns[2][r] = dhk * g(i, j);
          s.columns[3][r] = dhk * g0[i] * g0[j];
          s.columns[4][r] = dhj * g0[i] * g0[k];
          s.columns[5][r] = dhi * g0[j] * g0[k];
          s.columns[6][r] = g(j, k) * g0[i] * y[h];
          s.columns[7][r] = g(i, k) * g0[j] * y[h];
          s.columns[8][r] = g(i, j) * g0[k] * y[h];
          s.columns[9][r] = g0[i] * g0[j] * g0[k] * y[h];
        }
  return s;
}

struct RankResult {
  LemmaKind kind = LemmaKind::Lemma1;
  std::size_t n = 0;
  std::size_t rank = 0;
  std::size_t columns = 0;
  std::vector<double> singular_values;
  bool full_rank = false;
};

inline constexpr double kRankThreshold = 1e-10;

// Numerical rank: singular values above kRankThreshold * σ_max.
inline RankResult lemma_rank(LemmaKind kind, const Matrix& g, std::span<const double> y) {
  const MonomialSystem s = monomial_system(kind, g, y);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.matrix());
  const Eigen::VectorXd sv = svd.singularValues();
  RankResult r;
  r.kind = kind;
  r.n = g.dim();
  r.columns = s.columns.size();
  r.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (smax > 0.0 && sv(i) > kRankThreshold * smax) ++r.rank;
  r.full_rank = r.rank == r.columns;
  return r;
}

inline RankResult lemma_rank(LemmaKind kind, const BaseGeometry& base, std::span<const double> x,
                             std::span<const double> y) {
  return lemma_rank(kind, base.metric(x), y);
}

struct RankSuite {
  LemmaKind kind = LemmaKind::Lemma1;
  std::size_t n = 0;
  std::size_t draws = 0;
  std::size_t full_rank = 0;
  std::size_t min_rank = 0;
  std::size_t max_rank = 0;
};

// Random g = AᵀA + I and y on the unit sphere scaled by [0.5, 2]. Dimension 1 is allowed.
inline RankSuite lemma_rank_suite(LemmaKind kind, std::size_t n, std::size_t draws, std::uint64_t seed) {
  if (n == 0) throw ConfigError("dimension must be positive");
  Rng rng(seed);
  RankSuite s{kind, n, draws, 0, lemma_columns(kind), 0};
  for (std::size_t d = 0; d < draws; ++d) {
    const Matrix g = rng.spd_matrix(n);
    Vector y = rng.unit_vector(n);
    const double r = rng.uniform(0.5, 2.0);
    for (auto& e : y) e *= r;
    const RankResult rr = lemma_rank(kind, g, y);
    s.full_rank += rr.full_rank ? 1 : 0;
    s.min_rank = std::min(s.min_rank, rr.rank);
    s.max_rank = std::max(s.max_rank, rr.rank);
  }
  return s;
}

}  // namespace liftcurv
