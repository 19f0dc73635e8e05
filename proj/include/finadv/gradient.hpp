#pragma once

#include <functional>
#include <memory>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "finadv/perturbation.hpp"
#include "finadv/scores.hpp"

namespace finadv {

/// d objective / d P[t, l], same shape as the plan.
struct PlanGradient {
  Eigen::MatrixXd entries;
};

/// A scalar function of a perturbation plan applied to a base panel, with an
/// exact gradient.
class DifferentiableObjective {
 public:
  virtual ~DifferentiableObjective() = default;

  virtual double evaluate(const FinancialPanel& panel, const PerturbationPlan& plan) const = 0;
  virtual PlanGradient gradient(const FinancialPanel& panel, const PerturbationPlan& plan) const = 0;

  /// Value and gradient from one pass. The value is computed under the same
  /// denominator guard as the gradient.
  virtual std::pair<double, PlanGradient> value_and_gradient(const FinancialPanel& panel,
                                                             const PerturbationPlan& plan) const;
};

/// Aggregated score of the perturbed panel, differentiated by one reverse
/// sweep from the aggregate back to the plan.
class ScoreObjective final : public DifferentiableObjective {
 public:
  static constexpr double kGuardBand = 1e-12;

  ScoreObjective(ObjectiveSpec spec, StrategyMatrix strategies,
                 ApplyMode mode = ApplyMode::Relative, ScoreConfig config = {});

  const ObjectiveSpec& spec() const noexcept { return spec_; }
  const StrategyMatrix& strategies() const noexcept { return strategies_; }

  /// Raw aggregate; Maximize is not negated here.
  double evaluate(const FinancialPanel& panel, const PerturbationPlan& plan) const override;
  /// Throws NearSingularDenominator inside the guard band.
  PlanGradient gradient(const FinancialPanel& panel, const PerturbationPlan& plan) const override;
  std::pair<double, PlanGradient> value_and_gradient(const FinancialPanel& panel,
                                                     const PerturbationPlan& plan) const override;

 private:
  ObjectiveSpec spec_;
  StrategyMatrix strategies_;
  ApplyMode mode_;
  ScoreConfig config_;
};

/// An objective framed so that decreasing it is always the goal: Maximize
/// specs are negated on entry.
class DirectedObjective final : public DifferentiableObjective {
 public:
  DirectedObjective(ObjectiveSpec spec, std::shared_ptr<const DifferentiableObjective> raw);

  /// Convenience: wraps a ScoreObjective for `spec`.
  static DirectedObjective for_score(ObjectiveSpec spec, const StrategyMatrix& strategies,
                                     ApplyMode mode = ApplyMode::Relative,
                                     const ScoreConfig& config = {});

  const ObjectiveSpec& spec() const noexcept { return spec_; }
  double sign() const noexcept { return spec_.direction == Direction::Maximize ? -1.0 : 1.0; }

  double evaluate(const FinancialPanel& panel, const PerturbationPlan& plan) const override;
  PlanGradient gradient(const FinancialPanel& panel, const PerturbationPlan& plan) const override;
  std::pair<double, PlanGradient> value_and_gradient(const FinancialPanel& panel,
                                                     const PerturbationPlan& plan) const override;

 private:
  ObjectiveSpec spec_;
  std::shared_ptr<const DifferentiableObjective> raw_;
};

PlanGradient objective_gradient(const DifferentiableObjective& obj, const FinancialPanel& panel,
                                const PerturbationPlan& plan);

/// Central differences (f(P + h e) - f(P - h e)) / 2h per entry. Probes are
/// not projected onto the budget box.
PlanGradient finite_diff_gradient(const DifferentiableObjective& obj, const FinancialPanel& panel,
                                  const PerturbationPlan& plan, double step);

/// (f(x + h) - 2 f(x) + f(x - h)) / h^2
double second_difference(const std::function<double(double)>& f, double x, double h);

/// sum_{t >= 1} alpha[t] * beta[t - 1] / beta[t]; alpha[0] is unused.
double ratio_sum(std::span<const double> alpha, std::span<const double> beta);

/// Closed-form d^2/d beta[i]^2 of ratio_sum: 2 alpha[i] beta[i - 1] / beta[i]^3.
double ratio_sum_curvature(std::span<const double> alpha, std::span<const double> beta,
                           std::size_t i);

}  // namespace finadv
