#include "finadv/gradient.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "finadv/autodiff.hpp"

namespace finadv {

std::pair<double, PlanGradient> DifferentiableObjective::value_and_gradient(
    const FinancialPanel& panel, const PerturbationPlan& plan) const {
  return {evaluate(panel, plan), gradient(panel, plan)};
}

ScoreObjective::ScoreObjective(ObjectiveSpec spec, StrategyMatrix strategies, ApplyMode mode,
                               ScoreConfig config)
    : spec_(spec), strategies_(std::move(strategies)), mode_(mode), config_(config) {
  spec_.validate();
}

double ScoreObjective::evaluate(const FinancialPanel& panel, const PerturbationPlan& plan) const {
  return evaluate_objective(spec_, apply_plan(panel, plan, strategies_, mode_), config_);
}

PlanGradient ScoreObjective::gradient(const FinancialPanel& panel,
                                      const PerturbationPlan& plan) const {
  return value_and_gradient(panel, plan).second;
}

std::pair<double, PlanGradient> ScoreObjective::value_and_gradient(
    const FinancialPanel& panel, const PerturbationPlan& plan) const {
  const FinancialPanel perturbed = apply_plan(panel, plan, strategies_, mode_);
  const std::size_t years = perturbed.num_years();

  thread_local ad::Tape tape;
  tape.clear();
  std::vector<YearRow<ad::Real>> rows(years);
  for (std::size_t t = 0; t < years; ++t) {
    for (std::size_t i = 0; i < kNumNodes; ++i) rows[t][i] = tape.variable(perturbed.row(t)[i]);
  }

  const auto guard = DenominatorGuard::banded(panel.scale(), kGuardBand);
  const auto values = score_values<ad::Real>(spec_.score, rows, perturbed.years(), guard, config_);
  const ad::Real out = aggregate_values(values, spec_.aggregation);
  const auto adj = tape.adjoints(out);

  const PlanJacobian jac(panel, strategies_, mode_);
  PlanGradient g{Eigen::MatrixXd::Zero(plan.entries.rows(), plan.entries.cols())};
  for (std::size_t t = 0; t < years; ++t) {
    for (std::size_t l = 0; l < jac.strategies(); ++l) {
      double acc = 0.0;
      for (const auto& term : jac.terms(t, l)) {
        const auto slot = static_cast<std::size_t>(rows[t][index(term.node)].slot());
        acc += term.weight * adj[slot];
      }
      g.entries(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(l)) = acc;
    }
  }
  if (!std::isfinite(out.value()) || !g.entries.allFinite()) {
    throw ScoreError("non-finite objective or gradient for " + spec_.label());
  }
  return {out.value(), std::move(g)};
}

DirectedObjective::DirectedObjective(ObjectiveSpec spec,
                                     std::shared_ptr<const DifferentiableObjective> raw)
    : spec_(spec), raw_(std::move(raw)) {
  spec_.validate();
  if (!raw_) throw std::invalid_argument("directed objective needs an underlying objective");
}

DirectedObjective DirectedObjective::for_score(ObjectiveSpec spec, const StrategyMatrix& strategies,
                                               ApplyMode mode, const ScoreConfig& config) {
  return DirectedObjective(spec, std::make_shared<ScoreObjective>(spec, strategies, mode, config));
}

double DirectedObjective::evaluate(const FinancialPanel& panel,
                                   const PerturbationPlan& plan) const {
  return sign() * raw_->evaluate(panel, plan);
}

PlanGradient DirectedObjective::gradient(const FinancialPanel& panel,
                                         const PerturbationPlan& plan) const {
  PlanGradient g = raw_->gradient(panel, plan);
  g.entries *= sign();
  return g;
}

std::pair<double, PlanGradient> DirectedObjective::value_and_gradient(
    const FinancialPanel& panel, const PerturbationPlan& plan) const {
  auto [v, g] = raw_->value_and_gradient(panel, plan);
  g.entries *= sign();
  return {sign() * v, std::move(g)};
}

PlanGradient objective_gradient(const DifferentiableObjective& obj, const FinancialPanel& panel,
                                const PerturbationPlan& plan) {
  return obj.gradient(panel, plan);
}

PlanGradient finite_diff_gradient(const DifferentiableObjective& obj, const FinancialPanel& panel,
                                  const PerturbationPlan& plan, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite difference step must be positive");
  PlanGradient g{Eigen::MatrixXd::Zero(plan.entries.rows(), plan.entries.cols())};
  PerturbationPlan probe = plan;
  for (Eigen::Index t = 0; t < plan.entries.rows(); ++t) {
    for (Eigen::Index l = 0; l < plan.entries.cols(); ++l) {
      const double x = plan.entries(t, l);
      probe.entries(t, l) = x + step;
      const double up = obj.evaluate(panel, probe);
      probe.entries(t, l) = x - step;
      const double down = obj.evaluate(panel, probe);
      probe.entries(t, l) = x;
      g.entries(t, l) = (up - down) / (2.0 * step);
    }
  }
  return g;
}

double second_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

double ratio_sum(std::span<const double> alpha, std::span<const double> beta) {
  if (alpha.size() != beta.size()) throw std::invalid_argument("alpha and beta differ in length");
  double sum = 0.0;
  for (std::size_t t = 1; t < beta.size(); ++t) sum += alpha[t] * beta[t - 1] / beta[t];
  return sum;
}

double ratio_sum_curvature(std::span<const double> alpha, std::span<const double> beta,
                           std::size_t i) {
  if (i == 0 || i >= beta.size()) throw std::out_of_range("curvature index must be in [1, T)");
  return 2.0 * alpha[i] * beta[i - 1] / (beta[i] * beta[i] * beta[i]);
}

}  // namespace finadv
