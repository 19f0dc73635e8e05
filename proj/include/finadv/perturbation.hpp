#pragma once

#include <vector>

#include <Eigen/Dense>

#include "finadv/panel.hpp"
#include "finadv/strategy.hpp"

namespace finadv {

/// T x L relative perturbation magnitudes with their box budget.
struct PerturbationPlan {
  Eigen::MatrixXd entries;
  double epsilon = 0.0;

  static PerturbationPlan zeros(std::size_t years, std::size_t strategies, double epsilon) {
    return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(years),
                                  static_cast<Eigen::Index>(strategies)),
            epsilon};
  }
  std::size_t years() const noexcept { return static_cast<std::size_t>(entries.rows()); }
  std::size_t strategies() const noexcept { return static_cast<std::size_t>(entries.cols()); }
  double max_abs() const { return entries.size() == 0 ? 0.0 : entries.cwiseAbs().maxCoeff(); }
  bool feasible() const { return max_abs() <= epsilon; }
};

/// How a strategy entry turns into dollar moves.
enum class ApplyMode {
  /// Each impacted atom moves by its own value times the entry.
  Relative,
  /// Both impacted atoms move by the first-listed atom's value times the
  /// entry, so paired maneuvers transfer equal dollars.
  DollarBalanced,
};

/// Clamps every entry to [-epsilon, epsilon].
PerturbationPlan project_plan(const PerturbationPlan& plan);

/// Atom moves implied by a plan, one per nonzero (year, atom).
std::vector<AtomDelta> plan_deltas(const FinancialPanel& panel, const PerturbationPlan& plan,
                                   const StrategyMatrix& strategies,
                                   ApplyMode mode = ApplyMode::Relative);

/// X + X (.) P M, with every ancestor of a moved atom recomputed.
/// Throws NotAnAtom, NonFiniteResult, std::invalid_argument on shape mismatch.
FinancialPanel apply_plan(const FinancialPanel& panel, const PerturbationPlan& plan,
                          const StrategyMatrix& strategies, ApplyMode mode = ApplyMode::Relative);

/// d value(t, node) / d P[t, l] for a fixed base panel. The map from plan to
/// values is affine, so this is exact everywhere.
class PlanJacobian {
 public:
  struct Term {
    Var node;
    double weight;
  };

  PlanJacobian(const FinancialPanel& panel, const StrategyMatrix& strategies,
               ApplyMode mode = ApplyMode::Relative);

  std::size_t years() const noexcept { return years_; }
  std::size_t strategies() const noexcept { return strategies_; }
  const std::vector<Term>& terms(std::size_t t, std::size_t l) const {
    return cells_[t * strategies_ + l];
  }

 private:
  std::size_t years_;
  std::size_t strategies_;
  std::vector<std::vector<Term>> cells_;
};

}  // namespace finadv
