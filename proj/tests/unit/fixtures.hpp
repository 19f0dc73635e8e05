#pragma once

#include <map>
#include <random>
#include <vector>

#include "finadv/panel.hpp"

namespace finadv::testing {

// A plausible single year. Reported parents are not the sum of their
// children, so residuals are nonzero.
inline std::map<Var, double> base_year() {
  return {{Var::AT, 1000},  {Var::ACT, 400},  {Var::RECT, 100},  {Var::INVT, 80},
          {Var::PPENT, 300}, {Var::PPEGT, 500}, {Var::LT, 600},    {Var::LCT, 200},
          {Var::DLTT, 300},  {Var::NI, 50},     {Var::SALE, 1000}, {Var::COGS, 600},
          {Var::DP, 40},     {Var::AM, 10},     {Var::XSGA, 150},  {Var::OANCF, 50},
          {Var::DVP, 5},     {Var::XSTF, 30},   {Var::CSHO, 20},   {Var::XAGT, 30},
          {Var::XEQO, 20},   {Var::XOPR, 750}};
}

inline std::vector<YearRecord> identical_years(std::size_t n, int first = 2000) {
  std::vector<YearRecord> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back({first + static_cast<int>(i), base_year()});
  return rows;
}

inline FinancialPanel identity_panel(std::size_t n = 2) {
  return build_panel("ID", identical_years(n));
}

// Every value scaled by an independent factor in [lo, hi].
inline FinancialPanel random_panel(std::mt19937_64& rng, std::size_t years, double lo = 0.7,
                                   double hi = 1.3) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<YearRecord> rows;
  for (std::size_t t = 0; t < years; ++t) {
    auto y = base_year();
    for (auto& [v, x] : y) x *= u(rng);
    rows.push_back({2000 + static_cast<int>(t), y});
  }
  return build_panel("RND", rows);
}

}  // namespace finadv::testing
