#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "finadv/panel.hpp"
#include "finadv/score_kernels.hpp"

namespace finadv {

using RatioVector = Ratios<double>;

std::string_view score_label(ScoreName name) noexcept;
std::optional<ScoreName> parse_score(std::string_view text) noexcept;

/// Beneish ratios for year index `t` against `t - 1`. Throws ZeroDenominator.
RatioVector ratio_indices(const FinancialPanel& panel, std::size_t t);

double m_score(const FinancialPanel& panel, std::size_t t);
double s_score(const FinancialPanel& panel, std::size_t t, const ScoreConfig& cfg = {});
/// Throws NonPositiveShareCount when CSHO <= 0.
double eps(const FinancialPanel& panel, std::size_t t);

inline bool flags_manipulator(double m) noexcept { return m > mscore::kManipulatorThreshold; }

/// Relative percent difference (a - b) / ((|a| + |b|) / 2), as a fraction.
/// Throws BothZero.
double rpd(double a, double b);

struct ScoreSeries {
  ScoreName score_name = ScoreName::EPS;
  std::vector<std::pair<int, double>> per_year;  // (fiscal year, value)
  double aggregate = 0.0;                        // mean over listed years
};

ScoreSeries score_series(ScoreName name, const FinancialPanel& panel, const ScoreConfig& cfg = {});

enum class Direction { Minimize, Maximize };
enum class Aggregation { Mean, MaxViolator };

struct ObjectiveSpec {
  ScoreName score = ScoreName::EPS;
  Direction direction = Direction::Minimize;
  Aggregation aggregation = Aggregation::Mean;

  /// Throws std::invalid_argument for MaxViolator with Maximize.
  void validate() const;
  std::string label() const;

  friend bool operator==(const ObjectiveSpec&, const ObjectiveSpec&) = default;
};

std::string_view direction_label(Direction d) noexcept;
std::string_view aggregation_label(Aggregation a) noexcept;

/// Aggregated raw score (no sign flip for Maximize; callers negate).
double evaluate_objective(const ObjectiveSpec& spec, const FinancialPanel& panel,
                          const ScoreConfig& cfg = {});

/// Mean of the per-year values, or the largest one for MaxViolator (earliest
/// year wins ties).
template <typename S>
S aggregate_values(const std::vector<S>& values, Aggregation how) {
  if (values.empty()) throw ScoreError("cannot aggregate an empty score series");
  if (how == Aggregation::MaxViolator) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (ad::value_of(values[i]) > ad::value_of(values[best])) best = i;
    }
    return values[best];
  }
  S sum = values.front();
  for (std::size_t i = 1; i < values.size(); ++i) sum = sum + values[i];
  return sum / static_cast<double>(values.size());
}

}  // namespace finadv
