#pragma once

// Score formulas written once over a generic scalar so the same code serves
// plain evaluation (double) and reverse-mode differentiation (ad::Real).

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "finadv/autodiff.hpp"
#include "finadv/errors.hpp"
#include "finadv/variables.hpp"

namespace finadv {

enum class ScoreName { EPS, MSCORE, SSCORE };

template <typename S>
struct Ratios {
  S dsri, gmi, aqi, sgi, depi, sgai, lvgi, tata;
};

namespace mscore {
inline constexpr double kIntercept = -4.84;
inline constexpr double kDsri = 0.92;
inline constexpr double kGmi = 0.528;
inline constexpr double kAqi = 0.404;
inline constexpr double kSgi = 0.892;
inline constexpr double kDepi = 0.115;
inline constexpr double kSgai = -0.172;
inline constexpr double kTata = 4.679;
inline constexpr double kLvgi = -0.327;
/// Scores strictly above this flag a likely manipulator.
inline constexpr double kManipulatorThreshold = -1.78;
}  // namespace mscore

namespace sscore {
inline constexpr double kIntercept = 1.250;
inline constexpr double kInventoryToSales = 2.252;
inline constexpr double kIncomeToAssets = -33.029;
inline constexpr double kWorkingCapitalToAssets = -6.878;
}  // namespace sscore

/// Knobs shared by every score evaluation.
struct ScoreConfig {
  /// Working capital is `wc_assets - wc_liabilities`.
  Var wc_assets = Var::ACT;
  Var wc_liabilities = Var::LCT;
};

/// Decides when a ratio denominator is unusable.
///
/// `relative == 0` rejects only exact zeros (plain scoring). A positive value
/// rejects |den| <= relative * scale for currency-valued denominators and
/// |den| <= relative for dimensionless ones (gradient evaluation).
struct DenominatorGuard {
  double relative = 0.0;
  double scale = 1.0;

  static DenominatorGuard exact() { return {}; }
  static DenominatorGuard banded(double panel_scale, double relative = 1e-12) {
    return {relative, panel_scale};
  }

  template <typename S>
  void check(const S& den, bool currency, const char* ratio, int year) const {
    const double limit = relative * (currency ? scale : 1.0);
    if (std::abs(ad::value_of(den)) <= limit) {
      if (relative > 0.0) throw NearSingularDenominator(ratio, year);
      throw ZeroDenominator(ratio, year);
    }
  }
};

template <typename S>
Ratios<S> ratio_kernel(const YearRow<S>& cur, const YearRow<S>& prev, const DenominatorGuard& g,
                       int year) {
  auto v = [&](Var x) -> const S& { return cur[index(x)]; };
  auto p = [&](Var x) -> const S& { return prev[index(x)]; };

  Ratios<S> r;
  g.check(v(Var::SALE), true, "DSRI", year);
  g.check(p(Var::SALE), true, "DSRI", year);
  g.check(p(Var::RECT), true, "DSRI", year);
  r.dsri = (v(Var::RECT) / v(Var::SALE)) / (p(Var::RECT) / p(Var::SALE));

  const S margin = v(Var::SALE) - v(Var::COGS);
  g.check(margin, true, "GMI", year);
  r.gmi = ((p(Var::SALE) - p(Var::COGS)) / p(Var::SALE)) / (margin / v(Var::SALE));

  g.check(v(Var::AT), true, "AQI", year);
  g.check(p(Var::AT), true, "AQI", year);
  const S prev_soft = 1.0 - (p(Var::ACT) + p(Var::PPENT)) / p(Var::AT);
  g.check(prev_soft, false, "AQI", year);
  r.aqi = (1.0 - (v(Var::ACT) + v(Var::PPENT)) / v(Var::AT)) / prev_soft;

  r.sgi = v(Var::SALE) / p(Var::SALE);

  const S prev_base = p(Var::DP) + p(Var::AM) + p(Var::PPENT);
  const S cur_base = v(Var::DP) + v(Var::AM) + v(Var::PPENT);
  const S cur_dep = v(Var::DP) + v(Var::AM);
  g.check(prev_base, true, "DEPI", year);
  g.check(cur_base, true, "DEPI", year);
  g.check(cur_dep, true, "DEPI", year);
  r.depi = ((p(Var::DP) + p(Var::AM)) / prev_base) / (cur_dep / cur_base);

  g.check(p(Var::XSGA), true, "SGAI", year);
  r.sgai = (v(Var::XSGA) / v(Var::SALE)) / (p(Var::XSGA) / p(Var::SALE));

  const S prev_debt = p(Var::DLTT) + p(Var::LCT);
  g.check(prev_debt, true, "LVGI", year);
  r.lvgi = ((v(Var::DLTT) + v(Var::LCT)) / v(Var::AT)) / (prev_debt / p(Var::AT));

  r.tata = (v(Var::NI) - v(Var::OANCF)) / v(Var::AT);
  return r;
}

template <typename S>
S m_score_of(const Ratios<S>& r) {
  using namespace mscore;
  return kIntercept + kDsri * r.dsri + kGmi * r.gmi + kAqi * r.aqi + kSgi * r.sgi +
         kDepi * r.depi + kSgai * r.sgai + kTata * r.tata + kLvgi * r.lvgi;
}

template <typename S>
S s_score_kernel(const YearRow<S>& row, const DenominatorGuard& g, const ScoreConfig& cfg,
                 int year) {
  auto v = [&](Var x) -> const S& { return row[index(x)]; };
  g.check(v(Var::SALE), true, "S-Score", year);
  g.check(v(Var::AT), true, "S-Score", year);
  const S wc = v(cfg.wc_assets) - v(cfg.wc_liabilities);
  using namespace sscore;
  return kIntercept + kInventoryToSales * (v(Var::INVT) / v(Var::SALE)) +
         kIncomeToAssets * (v(Var::NI) / v(Var::AT)) +
         kWorkingCapitalToAssets * (wc / v(Var::AT));
}

template <typename S>
S eps_kernel(const YearRow<S>& row, int year) {
  const S& shares = row[index(Var::CSHO)];
  if (!(ad::value_of(shares) > 0.0)) throw NonPositiveShareCount(year);
  return (row[index(Var::NI)] - row[index(Var::DVP)]) / shares;
}

/// Per-year values of one score: EPS and S-Score for every year, M-score for
/// every adjacent year pair (entry i belongs to year index i + 1).
template <typename S>
std::vector<S> score_values(ScoreName name, std::span<const YearRow<S>> rows,
                            std::span<const int> years, const DenominatorGuard& g,
                            const ScoreConfig& cfg) {
  std::vector<S> out;
  switch (name) {
    case ScoreName::EPS:
      out.reserve(rows.size());
      for (std::size_t t = 0; t < rows.size(); ++t) out.push_back(eps_kernel(rows[t], years[t]));
      break;
    case ScoreName::MSCORE:
      out.reserve(rows.size() > 0 ? rows.size() - 1 : 0);
      for (std::size_t t = 1; t < rows.size(); ++t) {
        out.push_back(m_score_of(ratio_kernel(rows[t], rows[t - 1], g, years[t])));
      }
      break;
    case ScoreName::SSCORE:
      out.reserve(rows.size());
      for (std::size_t t = 0; t < rows.size(); ++t) {
        out.push_back(s_score_kernel(rows[t], g, cfg, years[t]));
      }
      break;
  }
  return out;
}

}  // namespace finadv
