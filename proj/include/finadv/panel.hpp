#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "finadv/hierarchy.hpp"
#include "finadv/variables.hpp"

namespace finadv {

/// One fiscal year as supplied by a data source.
struct YearRecord {
  int year = 0;
  std::map<Var, double> values;
};

/// Dollar shift of one atom in one year.
struct AtomDelta {
  std::size_t year_index = 0;
  Var variable = Var::SALE;
  double delta = 0.0;
};

/// A hierarchy equation that no longer balances.
struct Violation {
  int year = 0;
  Var parent = Var::AT;
  double magnitude = 0.0;  // reported minus (residual + signed children)
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// A company's multi-year statements.
///
/// Every parent in the hierarchy satisfies
///   value(t, p) == residual(t, p) + sum(sign * value(t, child))
/// where the residual is frozen when the panel is built, so reported totals
/// need not equal the sum of the modeled children. Panels are immutable.
class FinancialPanel {
 public:
  const std::string& company_id() const noexcept { return company_id_; }
  std::size_t num_years() const noexcept { return years_.size(); }
  const std::vector<int>& years() const noexcept { return years_; }
  int year(std::size_t t) const { return years_.at(t); }

  double value(std::size_t t, Var v) const { return values_.at(t)[index(v)]; }
  const YearRow<double>& row(std::size_t t) const { return values_.at(t); }
  const std::vector<YearRow<double>>& rows() const noexcept { return values_; }
  double residual(std::size_t t, Var parent) const { return residuals_.at(t)[index(parent)]; }

  const Hierarchy& hierarchy() const noexcept { return *hierarchy_; }
  const std::shared_ptr<const Hierarchy>& hierarchy_ptr() const noexcept { return hierarchy_; }
  bool is_atom(Var v) const noexcept { return hierarchy_->is_atom(v); }

  /// Year indices t >= 1 whose predecessor is not the previous calendar year.
  std::vector<std::size_t> gaps() const;

  /// Largest absolute reported value; sets the scale for denominator guards.
  double scale() const noexcept { return scale_; }

  /// Overwrites one stored value without propagating it.
  FinancialPanel with_value(std::size_t t, Var v, double value) const;

 private:
  friend FinancialPanel build_panel(std::string, std::vector<YearRecord>,
                                    std::shared_ptr<const Hierarchy>);
  friend FinancialPanel recompute_derived(const FinancialPanel&, std::span<const AtomDelta>);

  std::string company_id_;
  std::vector<int> years_;
  std::vector<YearRow<double>> values_;
  std::vector<YearRow<double>> residuals_;
  std::shared_ptr<const Hierarchy> hierarchy_;
  double scale_ = 1.0;
};

/// Variables every usable year must supply. XSTF is optional (defaults to 0)
/// since no score or hierarchy equation reads it.
const std::vector<Var>& required_variables();

/// Throws DuplicateYear, InsufficientYears, MissingVariable, NonFiniteValue.
FinancialPanel build_panel(std::string company_id, std::vector<YearRecord> rows,
                           std::shared_ptr<const Hierarchy> hierarchy = Hierarchy::standard());

/// Shifts each targeted atom by its delta and every ancestor by the signed sum
/// of its descendants' deltas. Residuals are untouched.
/// Throws NotAnAtom, NonFiniteResult.
FinancialPanel recompute_derived(const FinancialPanel& panel, std::span<const AtomDelta> deltas);

/// Lists every hierarchy equation off by more than 1e-9 * max(1, |parent|).
ValidationReport validate_panel(const FinancialPanel& panel);

}  // namespace finadv
