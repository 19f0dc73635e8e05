#include "finadv/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace finadv {

namespace {

struct BundleEvaluation {
  std::vector<double> values;
  std::vector<Eigen::MatrixXd> gradients;
};

BundleEvaluation evaluate_bundle(const FinancialPanel& panel, const ObjectiveBundle& bundle,
                                 const PerturbationPlan& plan) {
  BundleEvaluation out;
  out.values.reserve(bundle.size());
  out.gradients.reserve(bundle.size());
  for (const auto& obj : bundle.objectives) {
    auto [v, g] = obj.value_and_gradient(panel, plan);
    out.values.push_back(v);
    out.gradients.push_back(std::move(g.entries));
  }
  return out;
}

struct Combined {
  double loss = 0.0;
  Eigen::MatrixXd direction;
  double scale = 1.0;  // true loss gradient = scale * direction
  std::vector<double> chi;
};

Combined combine(AttackMethod method, const BundleEvaluation& eval,
                 const std::vector<double>& reference, double c) {
  const std::size_t k = eval.values.size();
  Combined out;
  out.chi.resize(k);
  std::vector<double> delta(k);
  for (std::size_t i = 0; i < k; ++i) {
    delta[i] = eval.values[i] - reference[i];
    out.chi[i] = g_transform(delta[i]);
  }
  out.direction = Eigen::MatrixXd::Zero(eval.gradients.front().rows(), eval.gradients.front().cols());

  switch (method) {
    case AttackMethod::Mvmo: {
      std::vector<double> scaled(k);
      for (std::size_t i = 0; i < k; ++i) scaled[i] = c * out.chi[i];
      const auto weights = softmax(scaled);
      double loss = 0.0;
      for (std::size_t i = 0; i < k; ++i) loss += weights[i] * out.chi[i];
      out.loss = loss;
      // Per-objective coefficients of the chain rule. The step is normalized
      // afterwards, so scaling them to unit l1 mass changes nothing in exact
      // arithmetic; it keeps duplicated objectives bit-identical to the
      // plain average.
      std::vector<double> coef(k);
      double mass = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double dchi = weights[i] * (1.0 + c * (out.chi[i] - loss));
        coef[i] = dchi * g_transform_slope(delta[i]);
        mass += std::abs(coef[i]);
      }
      if (mass > 0.0) {
        for (std::size_t i = 0; i < k; ++i) out.direction += (coef[i] / mass) * eval.gradients[i];
      }
      out.scale = mass;
      break;
    }
    case AttackMethod::PgdSingle:
      out.loss = eval.values.front();
      out.direction = eval.gradients.front();
      break;
    case AttackMethod::PgdAverage: {
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        sum += eval.values[i];
        out.direction += eval.gradients[i];
      }
      out.loss = sum / static_cast<double>(k);
      out.direction /= static_cast<double>(k);
      break;
    }
  }
  return out;
}

int count_satisfied(const std::vector<double>& values, const std::vector<double>& reference) {
  int n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) n += values[i] < reference[i] ? 1 : 0;
  return n;
}

AttackResult finish(const FinancialPanel& panel, const ObjectiveBundle& bundle,
                    PerturbationPlan best_plan) {
  AttackResult r;
  const FinancialPanel post = apply_plan(panel, best_plan, bundle.strategies, bundle.mode);
  r.final_plan = std::move(best_plan);
  r.pre_scores = ScoreCard::of(panel, bundle.score_config);
  r.post_scores = ScoreCard::of(post, bundle.score_config);
  r.joint_satisfied = true;
  for (const auto& obj : bundle.objectives) {
    ObjectiveOutcome o;
    o.spec = obj.spec();
    const auto& pre = r.pre_scores.get(o.spec.score);
    const auto& after = r.post_scores.get(o.spec.score);
    if (pre && after) {
      o.pre = pre->aggregate;
      o.post = after->aggregate;
      o.rpd = change_rpd(o.post, o.pre);
      o.satisfied = improved(o.spec.direction, o.pre, o.post);
    }
    r.joint_satisfied = r.joint_satisfied && o.satisfied;
    r.objectives.push_back(o);
  }
  return r;
}

AttackResult projected_descent(const FinancialPanel& panel, const ObjectiveBundle& bundle,
                               const AttackConfig& cfg, AttackMethod method,
                               const IterationObserver& observer) {
  cfg.validate();
  if (bundle.size() == 0) throw std::invalid_argument("objective bundle is empty");
  const std::size_t years = panel.num_years();
  const std::size_t strategies = bundle.strategies.size();

  const PerturbationPlan zero = PerturbationPlan::zeros(years, strategies, cfg.epsilon);
  PerturbationPlan plan = zero;
  if (cfg.random_start) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-cfg.epsilon, cfg.epsilon);
    for (Eigen::Index i = 0; i < plan.entries.size(); ++i) plan.entries(i) = u(rng);
    plan = project_plan(plan);
  }

  std::vector<double> reference;
  BundleEvaluation current;
  try {
    reference = evaluate_bundle(panel, bundle, zero).values;
    current = cfg.random_start ? evaluate_bundle(panel, bundle, plan)
                               : evaluate_bundle(panel, bundle, zero);
  } catch (const Error& e) {
    throw EvaluationFailure(std::string("cannot evaluate objectives at the start plan: ") + e.what());
  }

  std::vector<IterationRecord> trace;
  trace.reserve(static_cast<std::size_t>(cfg.max_iterations) + 1);
  PerturbationPlan best_plan = plan;
  int best_iteration = -1;
  int best_satisfied = -1;
  double best_loss = std::numeric_limits<double>::infinity();

  int iteration = 0;
  for (;; ++iteration) {
    const Combined comb = combine(method, current, reference, cfg.exaggeration_c);
    const int satisfied = count_satisfied(current.values, reference);
    trace.push_back({iteration, comb.loss, comb.chi, satisfied});
    if (satisfied > best_satisfied || (satisfied == best_satisfied && comb.loss < best_loss)) {
      best_satisfied = satisfied;
      best_loss = comb.loss;
      best_plan = plan;
      best_iteration = iteration;
    }
    if (iteration >= cfg.max_iterations) break;

    const double norm = comb.direction.size() == 0 ? 0.0 : comb.direction.cwiseAbs().maxCoeff();
    double step = cfg.step_size;
    bool accepted = false;
    PerturbationPlan trial;
    BundleEvaluation next;
    for (int attempt = 0; attempt <= cfg.max_step_halvings; ++attempt) {
      trial = plan;
      if (norm > 0.0) trial.entries -= (step / norm) * comb.direction;
      trial = project_plan(trial);
      try {
        next = evaluate_bundle(panel, bundle, trial);
        accepted = true;
        break;
      } catch (const ScoreError&) {
        step *= 0.5;
      } catch (const PanelError&) {
        step *= 0.5;
      }
    }
    if (!accepted) {
      throw EvaluationFailure("step-halving retries exhausted at iteration " +
                              std::to_string(iteration + 1));
    }
    plan = std::move(trial);
    current = std::move(next);
    if (observer) observer(iteration + 1, plan);
  }

  AttackResult r = finish(panel, bundle, std::move(best_plan));
  r.trace = std::move(trace);
  r.iterations_used = iteration;
  r.best_iteration = best_iteration;
  return r;
}

}  // namespace

void AttackConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in (0, 1]");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be > 0");
  if (!std::isfinite(exaggeration_c)) throw std::invalid_argument("exaggeration constant must be finite");
  if (max_step_halvings < 0) throw std::invalid_argument("max_step_halvings must be >= 0");
}

ObjectiveBundle ObjectiveBundle::from_specs(const std::vector<ObjectiveSpec>& specs,
                                            StrategyMatrix strategies, ApplyMode mode,
                                            ScoreConfig score_config) {
  ObjectiveBundle b{{}, std::move(strategies), mode, score_config};
  for (const auto& spec : specs) {
    b.objectives.push_back(DirectedObjective::for_score(spec, b.strategies, mode, score_config));
  }
  return b;
}

double g_transform(double delta) {
  if (delta == 0.0) return 0.0;
  const double mag = std::log1p(std::abs(delta));
  return delta < 0.0 ? -mag : mag;
}

double g_transform_slope(double delta) { return 1.0 / (std::abs(delta) + 1.0); }

std::vector<double> softmax(std::span<const double> x) {
  std::vector<double> out(x.size());
  if (x.empty()) return out;
  const double top = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - top);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

double mvmo_loss(std::span<const double> chi, double c) {
  std::vector<double> scaled(chi.begin(), chi.end());
  for (double& v : scaled) v *= c;
  const auto w = softmax(scaled);
  double loss = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) loss += w[i] * chi[i];
  return loss;
}

const std::optional<ScoreSeries>& ScoreCard::get(ScoreName name) const {
  switch (name) {
    case ScoreName::EPS: return eps;
    case ScoreName::MSCORE: return mscore;
    case ScoreName::SSCORE: return sscore;
  }
  return eps;
}

ScoreCard ScoreCard::of(const FinancialPanel& panel, const ScoreConfig& cfg) {
  auto attempt = [&](ScoreName name) -> std::optional<ScoreSeries> {
    try {
      return score_series(name, panel, cfg);
    } catch (const ScoreError&) {
      return std::nullopt;
    }
  };
  return {attempt(ScoreName::EPS), attempt(ScoreName::MSCORE), attempt(ScoreName::SSCORE)};
}

bool improved(Direction direction, double pre, double post) noexcept {
  return direction == Direction::Maximize ? post > pre : post < pre;
}

double change_rpd(double post, double pre) noexcept {
  if (post == 0.0 && pre == 0.0) return 0.0;
  return rpd(post, pre);
}

AttackResult mvmo_attack(const FinancialPanel& panel, const ObjectiveBundle& bundle,
                         const AttackConfig& cfg, const IterationObserver& observer) {
  if (bundle.size() < 2) throw std::invalid_argument("MVMO needs at least two objectives");
  return projected_descent(panel, bundle, cfg, AttackMethod::Mvmo, observer);
}

AttackResult pgd_single(const FinancialPanel& panel, const ObjectiveBundle& bundle,
                        const AttackConfig& cfg, const IterationObserver& observer) {
  if (bundle.size() != 1) throw std::invalid_argument("single-objective PGD needs exactly one objective");
  return projected_descent(panel, bundle, cfg, AttackMethod::PgdSingle, observer);
}

AttackResult pgd_average(const FinancialPanel& panel, const ObjectiveBundle& bundle,
                         const AttackConfig& cfg, const IterationObserver& observer) {
  if (bundle.size() < 2) throw std::invalid_argument("averaged PGD needs at least two objectives");
  return projected_descent(panel, bundle, cfg, AttackMethod::PgdAverage, observer);
}

AttackResult run_attack(const FinancialPanel& panel, const ObjectiveBundle& bundle,
                        const AttackConfig& cfg, const IterationObserver& observer) {
  switch (cfg.method) {
    case AttackMethod::Mvmo: return mvmo_attack(panel, bundle, cfg, observer);
    case AttackMethod::PgdSingle: return pgd_single(panel, bundle, cfg, observer);
    case AttackMethod::PgdAverage: return pgd_average(panel, bundle, cfg, observer);
  }
  throw std::invalid_argument("unknown attack method");
}

MvmoLossObjective::MvmoLossObjective(ObjectiveBundle bundle, double c)
    : bundle_(std::move(bundle)), c_(c) {
  if (bundle_.size() < 2) throw std::invalid_argument("MVMO loss needs at least two objectives");
}

double MvmoLossObjective::evaluate(const FinancialPanel& panel,
                                   const PerturbationPlan& plan) const {
  const auto zero = PerturbationPlan::zeros(plan.years(), plan.strategies(), plan.epsilon);
  std::vector<double> chi;
  for (const auto& obj : bundle_.objectives) {
    chi.push_back(g_transform(obj.evaluate(panel, plan) - obj.evaluate(panel, zero)));
  }
  return mvmo_loss(chi, c_);
}

PlanGradient MvmoLossObjective::gradient(const FinancialPanel& panel,
                                         const PerturbationPlan& plan) const {
  return value_and_gradient(panel, plan).second;
}

std::pair<double, PlanGradient> MvmoLossObjective::value_and_gradient(
    const FinancialPanel& panel, const PerturbationPlan& plan) const {
  const auto zero = PerturbationPlan::zeros(plan.years(), plan.strategies(), plan.epsilon);
  const auto reference = evaluate_bundle(panel, bundle_, zero).values;
  const auto eval = evaluate_bundle(panel, bundle_, plan);
  Combined comb = combine(AttackMethod::Mvmo, eval, reference, c_);
  return {comb.loss, PlanGradient{comb.scale * comb.direction}};
}

}  // namespace finadv
