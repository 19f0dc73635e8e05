#include "finadv/perturbation.hpp"

#include <map>
#include <stdexcept>

namespace finadv {

namespace {

void check_shape(const FinancialPanel& panel, const PerturbationPlan& plan,
                 const StrategyMatrix& strategies) {
  if (plan.years() != panel.num_years() || plan.strategies() != strategies.size()) {
    throw std::invalid_argument("plan shape does not match panel years x strategies");
  }
}

double base_value(const FinancialPanel& panel, std::size_t t, const StrategyRow& row,
                  const StrategyImpact& impact, ApplyMode mode) {
  const Var anchor = mode == ApplyMode::Relative ? impact.atom : row.impacts.front().atom;
  return panel.value(t, anchor);
}

}  // namespace

PerturbationPlan project_plan(const PerturbationPlan& plan) {
  PerturbationPlan out = plan;
  out.entries = plan.entries.cwiseMax(-plan.epsilon).cwiseMin(plan.epsilon);
  return out;
}

std::vector<AtomDelta> plan_deltas(const FinancialPanel& panel, const PerturbationPlan& plan,
                                   const StrategyMatrix& strategies, ApplyMode mode) {
  check_shape(panel, plan, strategies);
  strategies.check_atoms(panel.hierarchy());

  std::vector<AtomDelta> out;
  for (std::size_t t = 0; t < plan.years(); ++t) {
    YearRow<double> per_atom{};
    for (std::size_t l = 0; l < plan.strategies(); ++l) {
      const double p = plan.entries(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(l));
      const auto& row = strategies.row(l);
      if (p == 0.0 || !row.active) continue;
      for (const auto& imp : row.impacts) {
        per_atom[index(imp.atom)] += base_value(panel, t, row, imp, mode) * p * imp.sign;
      }
    }
    for (std::size_t i = 0; i < kNumNodes; ++i) {
      if (per_atom[i] != 0.0) out.push_back({t, var_at(i), per_atom[i]});
    }
  }
  return out;
}

FinancialPanel apply_plan(const FinancialPanel& panel, const PerturbationPlan& plan,
                          const StrategyMatrix& strategies, ApplyMode mode) {
  const auto deltas = plan_deltas(panel, plan, strategies, mode);
  return recompute_derived(panel, deltas);
}

PlanJacobian::PlanJacobian(const FinancialPanel& panel, const StrategyMatrix& strategies,
                           ApplyMode mode)
    : years_(panel.num_years()), strategies_(strategies.size()) {
  strategies.check_atoms(panel.hierarchy());
  const Hierarchy& h = panel.hierarchy();
  cells_.resize(years_ * strategies_);
  for (std::size_t t = 0; t < years_; ++t) {
    for (std::size_t l = 0; l < strategies_; ++l) {
      const auto& row = strategies.row(l);
      if (!row.active) continue;
      std::map<Var, double> weights;
      for (const auto& imp : row.impacts) {
        const double w = base_value(panel, t, row, imp, mode) * imp.sign;
        weights[imp.atom] += w;
        for (const auto& link : h.ancestors(imp.atom)) weights[link.ancestor] += link.sign * w;
      }
      auto& cell = cells_[t * strategies_ + l];
      for (const auto& [node, w] : weights) {
        if (w != 0.0) cell.push_back({node, w});
      }
    }
  }
}

}  // namespace finadv
