#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "finadv/gradient.hpp"
#include "finadv/perturbation.hpp"
#include "finadv/scores.hpp"
#include "finadv/strategy.hpp"

namespace finadv {

enum class AttackMethod {
  Mvmo,        // softmax-gated log-change loss over K >= 2 objectives
  PgdSingle,   // plain projected descent on one objective
  PgdAverage,  // projected descent on the unweighted mean of K objectives
};

struct AttackConfig {
  double epsilon = 0.20;
  int max_iterations = 500;
  double step_size = 0.01;
  double exaggeration_c = 1.0;
  std::uint64_t seed = 0;
  AttackMethod method = AttackMethod::Mvmo;
  /// Start from a uniform draw inside the box instead of the zero plan.
  bool random_start = false;
  /// Retries (each halving the step) before a singular step aborts the run.
  int max_step_halvings = 10;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// K directed objectives (decrease is always the goal) sharing one strategy
/// catalog.
struct ObjectiveBundle {
  std::vector<DirectedObjective> objectives;
  StrategyMatrix strategies = default_strategies();
  ApplyMode mode = ApplyMode::Relative;
  ScoreConfig score_config{};

  static ObjectiveBundle from_specs(const std::vector<ObjectiveSpec>& specs,
                                    StrategyMatrix strategies = default_strategies(),
                                    ApplyMode mode = ApplyMode::Relative,
                                    ScoreConfig score_config = {});
  std::size_t size() const noexcept { return objectives.size(); }
};

/// sign(delta) * ln(|delta| + 1)
double g_transform(double delta);
/// d g / d delta = 1 / (|delta| + 1)
double g_transform_slope(double delta);

std::vector<double> softmax(std::span<const double> x);

/// chi^T softmax(c * chi)
double mvmo_loss(std::span<const double> chi, double c);

struct IterationRecord {
  int iteration = 0;
  double loss = 0.0;
  std::vector<double> chi;
  int satisfied = 0;  // objectives strictly below their reference value
};

/// Three reporting scores of a panel; a score is absent when it cannot be
/// evaluated (for example a zero denominator).
struct ScoreCard {
  std::optional<ScoreSeries> eps;
  std::optional<ScoreSeries> mscore;
  std::optional<ScoreSeries> sscore;

  static ScoreCard of(const FinancialPanel& panel, const ScoreConfig& cfg = {});
  const std::optional<ScoreSeries>& get(ScoreName name) const;
};

struct ObjectiveOutcome {
  ObjectiveSpec spec;
  double pre = 0.0;   // mean of the score before the attack
  double post = 0.0;  // mean after
  double rpd = 0.0;   // rpd(post, pre)
  bool satisfied = false;
};

struct AttackResult {
  PerturbationPlan final_plan;
  ScoreCard pre_scores;
  ScoreCard post_scores;
  std::vector<ObjectiveOutcome> objectives;
  bool joint_satisfied = false;
  std::vector<IterationRecord> trace;
  int iterations_used = 0;
  int best_iteration = 0;
};

/// Called after every accepted update with the iteration number (1-based)
/// and the projected plan.
using IterationObserver = std::function<void(int, const PerturbationPlan&)>;

/// Runs the multi-objective gated attack. Requires K >= 2.
AttackResult mvmo_attack(const FinancialPanel& panel, const ObjectiveBundle& bundle,
                         const AttackConfig& cfg, const IterationObserver& observer = {});
/// Projected descent on a bundle holding exactly one objective.
AttackResult pgd_single(const FinancialPanel& panel, const ObjectiveBundle& bundle,
                        const AttackConfig& cfg, const IterationObserver& observer = {});
/// Projected descent on the mean of K >= 2 directed objectives.
AttackResult pgd_average(const FinancialPanel& panel, const ObjectiveBundle& bundle,
                         const AttackConfig& cfg, const IterationObserver& observer = {});
/// Dispatches on cfg.method.
AttackResult run_attack(const FinancialPanel& panel, const ObjectiveBundle& bundle,
                        const AttackConfig& cfg, const IterationObserver& observer = {});

/// The gated loss as a function of the plan, with references taken at the
/// zero plan of the same panel.
class MvmoLossObjective final : public DifferentiableObjective {
 public:
  MvmoLossObjective(ObjectiveBundle bundle, double c);

  double evaluate(const FinancialPanel& panel, const PerturbationPlan& plan) const override;
  PlanGradient gradient(const FinancialPanel& panel, const PerturbationPlan& plan) const override;
  std::pair<double, PlanGradient> value_and_gradient(const FinancialPanel& panel,
                                                     const PerturbationPlan& plan) const override;

 private:
  ObjectiveBundle bundle_;
  double c_;
};

/// Strict improvement of `post` over `pre` in the direction of `spec`.
bool improved(Direction direction, double pre, double post) noexcept;

/// rpd(post, pre) with two zeros mapped to 0 (no change).
double change_rpd(double post, double pre) noexcept;

}  // namespace finadv
