#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finadv/attack.hpp"
#include "finadv/dataset.hpp"
#include "finadv/results_io.hpp"

namespace finadv {

enum class Method { MVMO, PGD_M, PGD_EPS, PGD_AVG, MVMO_MS };

/// Display name, e.g. "PGD-EPS".
std::string_view method_label(Method m) noexcept;
/// Command-line name, e.g. "pgd_eps".
std::string_view method_key(Method m) noexcept;
/// Accepts either spelling, case-insensitive.
std::optional<Method> parse_method(std::string_view text) noexcept;

const std::vector<Method>& all_methods();
const std::vector<double>& default_epsilons();

/// Objectives each method optimizes. MVMO and PGD-Avg use the EPS mean;
/// the PGD baselines attack the M-score through its worst year.
std::vector<ObjectiveSpec> method_objectives(Method m);
AttackMethod method_attack(Method m) noexcept;

/// Called after each accepted update of any attack in a sweep. Must be
/// thread-safe when jobs > 1.
using SweepAudit = std::function<void(const FinancialPanel& base, Method method, double epsilon,
                                      int iteration, const PerturbationPlan& plan)>;

struct SweepSpec {
  std::vector<Method> methods = all_methods();
  std::vector<double> epsilons = default_epsilons();
  AttackConfig attack{};  // epsilon and method are set per run
  StrategyMatrix strategies = default_strategies();
  ApplyMode mode = ApplyMode::Relative;
  ScoreConfig score_config{};
  int jobs = 1;
  SweepAudit audit;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct SatisfyFlags {
  bool joint = false;
  std::vector<bool> per_objective;
};

/// Strict improvement of each objective's mean in its goal direction.
SatisfyFlags satisfy(const AttackResult& result, const std::vector<ObjectiveSpec>& objectives);

/// Percentages in [0, 100].
struct RateSet {
  double eps = 0.0;
  double mscore = 0.0;
  double sscore = 0.0;
  double joint2 = 0.0;  // EPS up and M-score down
  double joint3 = 0.0;  // additionally S-Score down
};

/// Mean RPDs in percent.
struct RpdSet {
  double eps = 0.0;
  double mscore = 0.0;
  double sscore = 0.0;
};

struct SummaryRow {
  Method method = Method::MVMO;
  double epsilon = 0.0;
  std::size_t companies = 0;
  std::size_t year_pairs = 0;
  std::size_t failures = 0;

  RateSet company_rates;
  RateSet year_rates;
  /// Joint rate over the objectives this method optimized, per company.
  double objective_joint = 0.0;

  /// Averages over every company (failures count as 0).
  RpdSet company_rpd;
  /// Averages over every year pair (failures count as 0).
  RpdSet year_rpd;
  /// Averages over companies meeting the EPS and M-score goals jointly.
  RpdSet satisfying_rpd;
};

/// Runs one method at one budget on one company. Errors become failure
/// records.
ResultRecord run_company(const FinancialPanel& panel, Method method, double epsilon,
                         const SweepSpec& spec);

SummaryRow summarize(Method method, double epsilon, std::span<const ResultRecord> records);

struct SweepOutput {
  std::vector<SummaryRow> rows;
  std::vector<ResultRecord> records;  // method-major, then epsilon, then company
};

/// One row per (method, epsilon) in the order the sweep lists them. Throws EmptyDataset.
SweepOutput run_sweep(const Dataset& data, const SweepSpec& spec);

void print_summary(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace finadv
