#include "finadv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "finadv/errors.hpp"

namespace finadv {

namespace {

ObjectiveSpec eps_up() { return {ScoreName::EPS, Direction::Maximize, Aggregation::Mean}; }
ObjectiveSpec m_down(Aggregation a) { return {ScoreName::MSCORE, Direction::Minimize, a}; }
ObjectiveSpec s_down() { return {ScoreName::SSCORE, Direction::Minimize, Aggregation::Mean}; }

double pct(std::size_t n, std::size_t d) { return d == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(d); }

bool year_improved(const std::optional<double>& pre, const std::optional<double>& post,
                   Direction d) {
  return pre && post && improved(d, *pre, *post);
}

double year_rpd(const std::optional<double>& pre, const std::optional<double>& post) {
  return pre && post ? change_rpd(*post, *pre) : 0.0;
}

bool score_ok(const ResultRecord& r, ScoreName s) {
  const auto& c = r.score(s);
  return !r.failed && c && c->satisfied;
}

double score_rpd(const ResultRecord& r, ScoreName s) {
  const auto& c = r.score(s);
  return !r.failed && c ? c->rpd : 0.0;
}

}  // namespace

std::string_view method_label(Method m) noexcept {
  switch (m) {
    case Method::MVMO: return "MVMO";
    case Method::PGD_M: return "PGD-M";
    case Method::PGD_EPS: return "PGD-EPS";
    case Method::PGD_AVG: return "PGD-Avg";
    case Method::MVMO_MS: return "MVMO-MS";
  }
  return "?";
}

std::string_view method_key(Method m) noexcept {
  switch (m) {
    case Method::MVMO: return "mvmo";
    case Method::PGD_M: return "pgd_m";
    case Method::PGD_EPS: return "pgd_eps";
    case Method::PGD_AVG: return "pgd_avg";
    case Method::MVMO_MS: return "mvmo_ms";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) noexcept {
  std::string low(text);
  for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::replace(low.begin(), low.end(), '-', '_');
  for (Method m : all_methods()) {
    if (low == method_key(m)) return m;
  }
  return std::nullopt;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> m{Method::MVMO, Method::PGD_M, Method::PGD_EPS, Method::PGD_AVG,
                                     Method::MVMO_MS};
  return m;
}

const std::vector<double>& default_epsilons() {
  static const std::vector<double> e{0.05, 0.10, 0.20, 0.40};
  return e;
}

std::vector<ObjectiveSpec> method_objectives(Method m) {
  switch (m) {
    case Method::MVMO: return {eps_up(), m_down(Aggregation::Mean)};
    case Method::PGD_M: return {m_down(Aggregation::MaxViolator)};
    case Method::PGD_EPS: return {eps_up()};
    case Method::PGD_AVG: return {eps_up(), m_down(Aggregation::MaxViolator)};
    case Method::MVMO_MS: return {eps_up(), m_down(Aggregation::Mean), s_down()};
  }
  return {};
}

AttackMethod method_attack(Method m) noexcept {
  switch (m) {
    case Method::MVMO:
    case Method::MVMO_MS: return AttackMethod::Mvmo;
    case Method::PGD_M:
    case Method::PGD_EPS: return AttackMethod::PgdSingle;
    case Method::PGD_AVG: return AttackMethod::PgdAverage;
  }
  return AttackMethod::Mvmo;
}

void SweepSpec::validate() const {
  if (methods.empty()) throw std::invalid_argument("sweep needs at least one method");
  if (epsilons.empty()) throw std::invalid_argument("sweep needs at least one epsilon");
  for (double e : epsilons) {
    if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("epsilon must be in (0, 1]");
  }
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  AttackConfig probe = attack;
  probe.epsilon = epsilons.front();
  probe.validate();
}

SatisfyFlags satisfy(const AttackResult& result, const std::vector<ObjectiveSpec>& objectives) {
  SatisfyFlags out;
  out.joint = !objectives.empty();
  for (const auto& spec : objectives) {
    const auto& pre = result.pre_scores.get(spec.score);
    const auto& post = result.post_scores.get(spec.score);
    const bool ok = pre && post && improved(spec.direction, pre->aggregate, post->aggregate);
    out.per_objective.push_back(ok);
    out.joint = out.joint && ok;
  }
  return out;
}

ResultRecord run_company(const FinancialPanel& panel, Method method, double epsilon,
                         const SweepSpec& spec) {
  const auto objectives = method_objectives(method);
  const std::string key(method_key(method));
  try {
    AttackConfig cfg = spec.attack;
    cfg.epsilon = epsilon;
    cfg.method = method_attack(method);
    const auto bundle =
        ObjectiveBundle::from_specs(objectives, spec.strategies, spec.mode, spec.score_config);
    IterationObserver observer;
    if (spec.audit) {
      observer = [&](int it, const PerturbationPlan& plan) { spec.audit(panel, method, epsilon, it, plan); };
    }
    return make_record(panel.company_id(), key, epsilon, run_attack(panel, bundle, cfg, observer));
  } catch (const Error& e) {
    return failure_record(panel.company_id(), key, epsilon, objectives, panel.years(), e.what());
  }
}

SummaryRow summarize(Method method, double epsilon, std::span<const ResultRecord> records) {
  SummaryRow row;
  row.method = method;
  row.epsilon = epsilon;
  row.companies = records.size();

  std::size_t c_eps = 0, c_m = 0, c_s = 0, c_j2 = 0, c_j3 = 0, c_obj = 0;
  std::size_t y_eps = 0, y_m = 0, y_s = 0, y_j2 = 0, y_j3 = 0;
  RpdSet c_sum, y_sum, sat_sum;
  for (const auto& r : records) {
    if (r.failed) ++row.failures;
    const bool e = score_ok(r, ScoreName::EPS);
    const bool m = score_ok(r, ScoreName::MSCORE);
    const bool s = score_ok(r, ScoreName::SSCORE);
    c_eps += e;
    c_m += m;
    c_s += s;
    c_j2 += e && m;
    c_j3 += e && m && s;
    c_obj += !r.failed && r.joint_satisfied;

    c_sum.eps += score_rpd(r, ScoreName::EPS);
    c_sum.mscore += score_rpd(r, ScoreName::MSCORE);
    c_sum.sscore += score_rpd(r, ScoreName::SSCORE);
    if (e && m) {
      sat_sum.eps += score_rpd(r, ScoreName::EPS);
      sat_sum.mscore += score_rpd(r, ScoreName::MSCORE);
      sat_sum.sscore += score_rpd(r, ScoreName::SSCORE);
    }

    for (std::size_t i = 1; i < r.years.size(); ++i) {
      ++row.year_pairs;
      if (r.failed) continue;
      const auto& y = r.years[i];
      const bool ye = year_improved(y.eps_pre, y.eps_post, Direction::Maximize);
      const bool ym = year_improved(y.m_pre, y.m_post, Direction::Minimize);
      const bool ys = year_improved(y.s_pre, y.s_post, Direction::Minimize);
      y_eps += ye;
      y_m += ym;
      y_s += ys;
      y_j2 += ye && ym;
      y_j3 += ye && ym && ys;
      y_sum.eps += year_rpd(y.eps_pre, y.eps_post);
      y_sum.mscore += year_rpd(y.m_pre, y.m_post);
      y_sum.sscore += year_rpd(y.s_pre, y.s_post);
    }
  }

  const std::size_t n = row.companies;
  row.company_rates = {pct(c_eps, n), pct(c_m, n), pct(c_s, n), pct(c_j2, n), pct(c_j3, n)};
  row.year_rates = {pct(y_eps, row.year_pairs), pct(y_m, row.year_pairs), pct(y_s, row.year_pairs),
                    pct(y_j2, row.year_pairs), pct(y_j3, row.year_pairs)};
  row.objective_joint = pct(c_obj, n);
  auto mean_pct = [](double sum, std::size_t d) { return d == 0 ? 0.0 : 100.0 * sum / static_cast<double>(d); };
  row.company_rpd = {mean_pct(c_sum.eps, n), mean_pct(c_sum.mscore, n), mean_pct(c_sum.sscore, n)};
  row.year_rpd = {mean_pct(y_sum.eps, row.year_pairs), mean_pct(y_sum.mscore, row.year_pairs),
                  mean_pct(y_sum.sscore, row.year_pairs)};
  row.satisfying_rpd = {mean_pct(sat_sum.eps, c_j2), mean_pct(sat_sum.mscore, c_j2),
                        mean_pct(sat_sum.sscore, c_j2)};
  return row;
}

SweepOutput run_sweep(const Dataset& data, const SweepSpec& spec) {
  spec.validate();
  if (data.companies.empty()) throw EmptyDataset();

  struct Task {
    Method method;
    double epsilon;
    std::size_t company;
  };
  std::vector<Task> tasks;
  for (Method m : spec.methods) {
    for (double e : spec.epsilons) {
      for (std::size_t c = 0; c < data.companies.size(); ++c) tasks.push_back({m, e, c});
    }
  }

  std::vector<ResultRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& t = tasks[i];
      records[i] = run_company(data.companies[t.company], t.method, t.epsilon, spec);
    }
  };
  const int jobs = std::min<int>(spec.jobs, static_cast<int>(tasks.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepOutput out;
  const std::size_t n = data.companies.size();
  std::size_t offset = 0;
  for (Method m : spec.methods) {
    for (double e : spec.epsilons) {
      out.rows.push_back(summarize(m, e, std::span<const ResultRecord>(records).subspan(offset, n)));
      offset += n;
    }
  }
  out.records = std::move(records);
  return out;
}

void print_summary(std::ostream& out, std::span<const SummaryRow> rows) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%-8s %6s %5s %5s | %9s %8s %8s %7s | %9s %9s %9s | %9s %8s | %8s %8s\n", "Method",
                "eps%", "N", "Fail", "Satisfy%", "EPS-up%", "M-down%", "S-down%", "M-RPD%",
                "EPS-RPD%", "S-RPD%", "Joint3%", "Obj%", "YrSat%", "YrJ3%");
  out << buf;
  out << std::string(std::char_traits<char>::length(buf) - 1, '-') << '\n';
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%-8s %6.1f %5zu %5zu | %9.2f %8.2f %8.2f %7.2f | %9.2f %9.2f %9.2f | %9.2f %8.2f | "
                  "%8.2f %8.2f\n",
                  std::string(method_label(r.method)).c_str(), 100.0 * r.epsilon, r.companies,
                  r.failures, r.company_rates.joint2, r.company_rates.eps, r.company_rates.mscore,
                  r.company_rates.sscore, r.company_rpd.mscore, r.company_rpd.eps,
                  r.company_rpd.sscore, r.company_rates.joint3, r.objective_joint,
                  r.year_rates.joint2, r.year_rates.joint3);
    out << buf;
  }
}

}  // namespace finadv
