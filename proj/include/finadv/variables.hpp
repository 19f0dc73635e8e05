#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace finadv {

/// Accounting variables extracted from a 10-K, followed by the structural
/// placeholders of the dependency tree that no filing reports directly.
///
/// The first `kNumReported` codes are the closed reporting vocabulary; the
/// trailing placeholders only exist so that the hierarchy keeps its shape.
enum class Var : std::uint8_t {
  AT,
  ACT,
  RECT,
  INVT,
  PPENT,
  PPEGT,
  LT,
  LCT,
  DLTT,
  NI,
  SALE,
  COGS,
  DP,
  AM,
  XSGA,
  OANCF,
  DVP,
  XSTF,
  CSHO,
  XAGT,
  XEQO,
  XOPR,
  // placeholders
  REVT,
  OPRO,
  PI,
  PVO,
};

inline constexpr std::size_t kNumReported = 22;
inline constexpr std::size_t kNumNodes = 26;

constexpr std::size_t index(Var v) noexcept { return static_cast<std::size_t>(v); }
constexpr Var var_at(std::size_t i) noexcept { return static_cast<Var>(i); }
constexpr bool is_placeholder(Var v) noexcept { return index(v) >= kNumReported; }

std::string_view code(Var v) noexcept;
std::optional<Var> parse_code(std::string_view text) noexcept;

/// Reported variables in their canonical column order.
const std::array<Var, kNumReported>& reported_variables() noexcept;

/// One year of values indexed by `Var`.
template <typename Scalar>
using YearRow = std::array<Scalar, kNumNodes>;

template <typename Scalar>
constexpr const Scalar& at(const YearRow<Scalar>& row, Var v) noexcept {
  return row[index(v)];
}

}  // namespace finadv
