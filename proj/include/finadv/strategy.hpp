#pragma once

#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "finadv/hierarchy.hpp"
#include "finadv/variables.hpp"

namespace finadv {

struct StrategyImpact {
  Var atom;
  int sign;  // +1 or -1
};

/// One perturbation maneuver: a relative move of one or two atoms with fixed
/// signs. An inactive row keeps its slot in the plan but moves nothing.
struct StrategyRow {
  std::string name;
  std::vector<StrategyImpact> impacts;
  bool active = true;
};

/// Sparse L x D map from maneuvers to signed atom impacts.
class StrategyMatrix {
 public:
  /// Throws std::invalid_argument for rows without 1 or 2 impacts or with
  /// signs other than +-1.
  explicit StrategyMatrix(std::vector<StrategyRow> rows);

  std::size_t size() const noexcept { return rows_.size(); }
  const StrategyRow& row(std::size_t l) const { return rows_.at(l); }
  const std::vector<StrategyRow>& rows() const noexcept { return rows_; }
  std::size_t find(std::string_view name) const;  // throws std::out_of_range

  /// Signed coefficient M[l, v]; zero for inactive rows.
  double coefficient(std::size_t l, Var v) const;
  /// Dense L x kNumNodes form.
  Eigen::MatrixXd dense() const;

  /// Copy with row `l` deactivated.
  StrategyMatrix with_row_disabled(std::size_t l) const;

  /// Throws NotAnAtom if any impact targets a non-atom of `h`.
  void check_atoms(const Hierarchy& h) const;

 private:
  std::vector<StrategyRow> rows_;
};

/// The seven default maneuvers in plan-column order. Rows 0-2 move an expense
/// into COGS; the rest each stand alone.
StrategyMatrix default_strategies();

/// Reads `strategy_name,atom_code,sign` rows (header optional, `#` comments).
/// Rows with the same name are merged in order of first appearance.
StrategyMatrix parse_strategy_catalog(std::istream& in);

}  // namespace finadv
