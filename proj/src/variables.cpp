#include "finadv/variables.hpp"

namespace finadv {

namespace {

constexpr std::array<std::string_view, kNumNodes> kCodes = {
    "AT",   "ACT",  "RECT", "INVT", "PPENT", "PPEGT", "LT",   "LCT",  "DLTT",
    "NI",   "SALE", "COGS", "DP",   "AM",    "XSGA",  "OANCF", "DVP", "XSTF",
    "CSHO", "XAGT", "XEQO", "XOPR", "REVT",  "OPRO",  "PI",   "PVO",
};

constexpr std::array<Var, kNumReported> make_reported() {
  std::array<Var, kNumReported> out{};
  for (std::size_t i = 0; i < kNumReported; ++i) out[i] = var_at(i);
  return out;
}

constexpr std::array<Var, kNumReported> kReported = make_reported();

}  // namespace

std::string_view code(Var v) noexcept { return kCodes[index(v)]; }

std::optional<Var> parse_code(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kNumNodes; ++i) {
    if (kCodes[i] == text) return var_at(i);
  }
  // RECV is used interchangeably with RECT for receivables.
  if (text == "RECV") return Var::RECT;
  return std::nullopt;
}

const std::array<Var, kNumReported>& reported_variables() noexcept { return kReported; }

}  // namespace finadv
