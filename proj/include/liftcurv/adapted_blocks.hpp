#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "liftcurv/tensor.hpp"

namespace liftcurv {

// Which published-formula transcription to evaluate. Printed reproduces the
// reference formulas literally; Corrected applies the fixes listed in
// FORMULA_NOTES.md and is what every default code path uses.
enum class FormulaVariant { Printed, Corrected };

inline std::string_view to_string(FormulaVariant v) { return v == FormulaVariant::Printed ? "printed" : "corrected"; }

// The twelve adapted-frame components of a (1,3) curvature-type tensor T.
//
// Block "ABCD" holds [T(E_A^i, E_B^j) E_C^k] along E_D^h, stored [h][k][i][j],
// where X stands for δ/δx and Y for ∂/∂y. The argument pair XY is not stored;
// it follows from antisymmetry in the argument pair.
enum class Block : std::size_t { XXXX, XXXY, XXYX, XXYY, YYXX, YYXY, YYYX, YYYY, YXXX, YXXY, YXYX, YXYY };

inline constexpr std::array<std::string_view, 12> kBlockNames = {"XXXX", "XXXY", "XXYX", "XXYY", "YYXX", "YYXY",
                                                                 "YYYX", "YYYY", "YXXX", "YXXY", "YXYX", "YXYY"};

inline std::optional<Block> block_from_name(std::string_view name) {
  if (name.size() == 5 && name.front() == 'C') name.remove_prefix(1);
  for (std::size_t b = 0; b < kBlockNames.size(); ++b)
    if (kBlockNames[b] == name) return static_cast<Block>(b);
  return std::nullopt;
}

struct AdaptedBlocks {
  std::array<Tensor4, 12> blocks;

  AdaptedBlocks() = default;
  explicit AdaptedBlocks(std::size_t n) { blocks.fill(Tensor4(n)); }

  Tensor4& operator[](Block b) { return blocks[static_cast<std::size_t>(b)]; }
  const Tensor4& operator[](Block b) const { return blocks[static_cast<std::size_t>(b)]; }
  std::size_t dim() const { return blocks[0].dim(); }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& t : blocks) m = std::max(m, t.max_abs());
    return m;
  }
};

namespace detail {
inline std::size_t block_offset(char letter, std::size_t n) { return letter == 'X' ? 0 : n; }
}  // namespace detail

// Full 2n-frame tensor T(d, c, a, b) = [T(E_a, E_b) E_c]^d, horizontal frame first.
inline Tensor4 assemble_full(const AdaptedBlocks& ab) {
  const std::size_t n = ab.dim();
  Tensor4 full(2 * n);
  for (std::size_t b = 0; b < kBlockNames.size(); ++b) {
    const auto name = kBlockNames[b];
    const std::size_t oa = detail::block_offset(name[0], n), ob = detail::block_offset(name[1], n);
    const std::size_t oc = detail::block_offset(name[2], n), od = detail::block_offset(name[3], n);
    const Tensor4& t = ab.blocks[b];
    for (std::size_t h = 0; h < n; ++h)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            full(od + h, oc + k, oa + i, ob + j) = t(h, k, i, j);
            if (name[0] == 'Y' && name[1] == 'X') full(od + h, oc + k, ob + j, oa + i) = -t(h, k, i, j);
          }
  }
  return full;
}

inline AdaptedBlocks split_full(const Tensor4& full) {
  const std::size_t n = full.dim() / 2;
  AdaptedBlocks ab(n);
  for (std::size_t b = 0; b < kBlockNames.size(); ++b) {
    const auto name = kBlockNames[b];
    const std::size_t oa = detail::block_offset(name[0], n), ob = detail::block_offset(name[1], n);
    const std::size_t oc = detail::block_offset(name[2], n), od = detail::block_offset(name[3], n);
    for (std::size_t h = 0; h < n; ++h)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) ab.blocks[b](h, k, i, j) = full(od + h, oc + k, oa + i, ob + j);
  }
  return ab;
}

}  // namespace liftcurv
