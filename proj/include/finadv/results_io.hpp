#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finadv/attack.hpp"

namespace finadv {

/// Mean-level change of one score, regardless of whether it was optimized.
struct ScoreChange {
  double pre = 0.0;
  double post = 0.0;
  double rpd = 0.0;
  bool satisfied = false;  // moved in the attacker's direction

  friend bool operator==(const ScoreChange&, const ScoreChange&) = default;
};

/// Per-year scores before and after. The M-score of the first listed year is
/// absent since it has no predecessor.
struct YearChange {
  int year = 0;
  std::optional<double> eps_pre, eps_post;
  std::optional<double> m_pre, m_post;
  std::optional<double> s_pre, s_post;

  friend bool operator==(const YearChange&, const YearChange&) = default;
};

struct ObjectiveRecord {
  ObjectiveSpec spec;
  double pre = 0.0;
  double post = 0.0;
  double rpd = 0.0;
  bool satisfied = false;

  friend bool operator==(const ObjectiveRecord&, const ObjectiveRecord&) = default;
};

/// One (company, method, epsilon) attack outcome as persisted.
struct ResultRecord {
  std::string company_id;
  std::string method;
  double epsilon = 0.0;
  std::vector<ObjectiveRecord> objectives;
  bool joint_satisfied = false;
  /// Indexed by ScoreName; absent when a score cannot be evaluated.
  std::array<std::optional<ScoreChange>, 3> scores;
  std::vector<YearChange> years;
  int iterations_used = 0;
  int best_iteration = 0;
  bool failed = false;
  std::string error;

  const std::optional<ScoreChange>& score(ScoreName name) const {
    return scores[static_cast<std::size_t>(name)];
  }

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

/// Attacker goal per score: EPS up, fraud scores down.
Direction goal_direction(ScoreName name) noexcept;

ResultRecord make_record(const std::string& company_id, const std::string& method, double epsilon,
                         const AttackResult& result);

/// A run that aborted: nothing is satisfied and every RPD is zero.
ResultRecord failure_record(const std::string& company_id, const std::string& method,
                            double epsilon, const std::vector<ObjectiveSpec>& specs,
                            const std::vector<int>& years, const std::string& error);

/// One JSON object per line.
void write_results(std::span<const ResultRecord> records, std::ostream& out);
std::vector<ResultRecord> read_results(std::istream& in);

/// company_id,year,mscore_rpd,eps_rpd with one row per year pair.
void write_rpd_pairs(std::span<const ResultRecord> records, std::ostream& out);

/// Writes `results` and, when given, the pair file. Each file is written to a
/// `.partial` sibling first and renamed into place. Throws IoError.
void write_results(std::span<const ResultRecord> records, const std::filesystem::path& results,
                   const std::optional<std::filesystem::path>& pairs = std::nullopt);
std::vector<ResultRecord> read_results(const std::filesystem::path& path);

/// Atomic text write through a `.partial` sibling. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace finadv
