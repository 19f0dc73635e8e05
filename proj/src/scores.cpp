#include "finadv/scores.hpp"

#include <cmath>
#include <stdexcept>

namespace finadv {

std::string_view score_label(ScoreName name) noexcept {
  switch (name) {
    case ScoreName::EPS: return "EPS";
    case ScoreName::MSCORE: return "MSCORE";
    case ScoreName::SSCORE: return "SSCORE";
  }
  return "?";
}

std::optional<ScoreName> parse_score(std::string_view text) noexcept {
  if (text == "EPS") return ScoreName::EPS;
  if (text == "MSCORE") return ScoreName::MSCORE;
  if (text == "SSCORE") return ScoreName::SSCORE;
  return std::nullopt;
}

RatioVector ratio_indices(const FinancialPanel& panel, std::size_t t) {
  if (t == 0 || t >= panel.num_years()) {
    throw std::out_of_range("ratio_indices needs 1 <= t < T");
  }
  return ratio_kernel(panel.row(t), panel.row(t - 1), DenominatorGuard::exact(), panel.year(t));
}

double m_score(const FinancialPanel& panel, std::size_t t) {
  return m_score_of(ratio_indices(panel, t));
}

double s_score(const FinancialPanel& panel, std::size_t t, const ScoreConfig& cfg) {
  return s_score_kernel(panel.row(t), DenominatorGuard::exact(), cfg, panel.year(t));
}

double eps(const FinancialPanel& panel, std::size_t t) {
  return eps_kernel(panel.row(t), panel.year(t));
}

double rpd(double a, double b) {
  if (a == 0.0 && b == 0.0) throw BothZero();
  return (a - b) / ((std::abs(a) + std::abs(b)) / 2.0);
}

ScoreSeries score_series(ScoreName name, const FinancialPanel& panel, const ScoreConfig& cfg) {
  const auto values = score_values<double>(name, panel.rows(), panel.years(),
                                           DenominatorGuard::exact(), cfg);
  ScoreSeries s;
  s.score_name = name;
  const std::size_t offset = name == ScoreName::MSCORE ? 1 : 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.per_year.emplace_back(panel.year(i + offset), values[i]);
  }
  s.aggregate = aggregate_values(values, Aggregation::Mean);
  return s;
}

void ObjectiveSpec::validate() const {
  if (aggregation == Aggregation::MaxViolator && direction != Direction::Minimize) {
    throw std::invalid_argument("max-violator aggregation requires a minimized score");
  }
}

std::string_view direction_label(Direction d) noexcept {
  return d == Direction::Minimize ? "minimize" : "maximize";
}

std::string_view aggregation_label(Aggregation a) noexcept {
  return a == Aggregation::Mean ? "mean" : "max_violator";
}

std::string ObjectiveSpec::label() const {
  return std::string(direction_label(direction)) + ":" + std::string(score_label(score)) + ":" +
         std::string(aggregation_label(aggregation));
}

double evaluate_objective(const ObjectiveSpec& spec, const FinancialPanel& panel,
                          const ScoreConfig& cfg) {
  spec.validate();
  const auto values = score_values<double>(spec.score, panel.rows(), panel.years(),
                                           DenominatorGuard::exact(), cfg);
  return aggregate_values(values, spec.aggregation);
}

}  // namespace finadv
