#include "finadv/panel.hpp"

#include <algorithm>
#include <cmath>

#include "finadv/errors.hpp"

namespace finadv {

namespace {

constexpr double kValidationTolerance = 1e-9;

double signed_children(const Hierarchy& h, const YearRow<double>& row, Var parent) {
  double sum = 0.0;
  for (const auto& e : h.children(parent)) sum += e.sign * row[index(e.child)];
  return sum;
}

}  // namespace

std::vector<std::size_t> FinancialPanel::gaps() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t < years_.size(); ++t) {
    if (years_[t] != years_[t - 1] + 1) out.push_back(t);
  }
  return out;
}

FinancialPanel FinancialPanel::with_value(std::size_t t, Var v, double value) const {
  FinancialPanel copy = *this;
  copy.values_.at(t)[index(v)] = value;
  return copy;
}

const std::vector<Var>& required_variables() {
  static const std::vector<Var> vars = [] {
    std::vector<Var> out;
    for (Var v : reported_variables()) {
      if (v != Var::XSTF) out.push_back(v);
    }
    return out;
  }();
  return vars;
}

FinancialPanel build_panel(std::string company_id, std::vector<YearRecord> rows,
                           std::shared_ptr<const Hierarchy> hierarchy) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const YearRecord& a, const YearRecord& b) { return a.year < b.year; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].year == rows[i - 1].year) throw DuplicateYear(rows[i].year);
  }
  if (rows.size() < 2) throw InsufficientYears(rows.size());

  FinancialPanel panel;
  panel.company_id_ = std::move(company_id);
  panel.hierarchy_ = std::move(hierarchy);
  const Hierarchy& h = *panel.hierarchy_;

  double scale = 1.0;
  for (const auto& rec : rows) {
    YearRow<double> row{};
    for (const auto& [v, x] : rec.values) {
      if (!std::isfinite(x)) throw NonFiniteValue(rec.year, v);
    }
    for (Var v : required_variables()) {
      auto it = rec.values.find(v);
      if (it == rec.values.end()) throw MissingVariable(rec.year, v);
      row[index(v)] = it->second;
    }
    if (auto it = rec.values.find(Var::XSTF); it != rec.values.end()) {
      row[index(Var::XSTF)] = it->second;
    }
    for (Var v : reported_variables()) scale = std::max(scale, std::abs(row[index(v)]));

    // Placeholders are never reported: leaves stay at zero, derived ones are
    // the exact sum of their children.
    YearRow<double> residual{};
    for (Var p : h.bottom_up_parents()) {
      const double children = signed_children(h, row, p);
      if (is_placeholder(p)) {
        row[index(p)] = children;
      } else {
        residual[index(p)] = row[index(p)] - children;
      }
    }
    panel.years_.push_back(rec.year);
    panel.values_.push_back(row);
    panel.residuals_.push_back(residual);
  }
  panel.scale_ = scale;
  return panel;
}

FinancialPanel recompute_derived(const FinancialPanel& panel, std::span<const AtomDelta> deltas) {
  if (deltas.empty()) return panel;

  const Hierarchy& h = panel.hierarchy();
  std::vector<YearRow<double>> shift(panel.num_years(), YearRow<double>{});
  for (const auto& d : deltas) {
    if (!h.is_atom(d.variable)) throw NotAnAtom(d.variable);
    auto& row = shift.at(d.year_index);
    row[index(d.variable)] += d.delta;
    for (const auto& link : h.ancestors(d.variable)) {
      row[index(link.ancestor)] += link.sign * d.delta;
    }
  }

  FinancialPanel out = panel;
  for (std::size_t t = 0; t < out.values_.size(); ++t) {
    for (std::size_t i = 0; i < kNumNodes; ++i) {
      if (shift[t][i] == 0.0) continue;
      out.values_[t][i] += shift[t][i];
      if (!std::isfinite(out.values_[t][i])) throw NonFiniteResult(var_at(i));
    }
  }
  return out;
}

ValidationReport validate_panel(const FinancialPanel& panel) {
  ValidationReport report;
  const Hierarchy& h = panel.hierarchy();
  for (std::size_t t = 0; t < panel.num_years(); ++t) {
    const auto& row = panel.row(t);
    for (Var p : h.bottom_up_parents()) {
      const double reported = row[index(p)];
      const double expected = panel.residual(t, p) + signed_children(h, row, p);
      const double diff = reported - expected;
      if (!(std::abs(diff) <= kValidationTolerance * std::max(1.0, std::abs(reported)))) {
        report.violations.push_back({panel.year(t), p, diff});
      }
    }
  }
  return report;
}

}  // namespace finadv
