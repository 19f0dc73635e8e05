#include "finadv/results_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "finadv/errors.hpp"

namespace finadv {

using nlohmann::json;

namespace {

constexpr std::array<ScoreName, 3> kScores{ScoreName::EPS, ScoreName::MSCORE, ScoreName::SSCORE};

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Direction parse_direction(const std::string& s) {
  if (s == direction_label(Direction::Minimize)) return Direction::Minimize;
  if (s == direction_label(Direction::Maximize)) return Direction::Maximize;
  throw DataError("unknown direction '" + s + "'");
}

Aggregation parse_aggregation(const std::string& s) {
  if (s == aggregation_label(Aggregation::Mean)) return Aggregation::Mean;
  if (s == aggregation_label(Aggregation::MaxViolator)) return Aggregation::MaxViolator;
  throw DataError("unknown aggregation '" + s + "'");
}

ScoreName parse_score_or_throw(const std::string& s) {
  auto name = parse_score(s);
  if (!name) throw DataError("unknown score '" + s + "'");
  return *name;
}

json to_json(const ResultRecord& r) {
  json objectives = json::array();
  for (const auto& o : r.objectives) {
    objectives.push_back({{"score", score_label(o.spec.score)},
                          {"direction", direction_label(o.spec.direction)},
                          {"aggregation", aggregation_label(o.spec.aggregation)},
                          {"pre", o.pre},
                          {"post", o.post},
                          {"rpd", o.rpd},
                          {"satisfied", o.satisfied}});
  }
  json scores = json::object();
  for (ScoreName s : kScores) {
    const auto& c = r.score(s);
    if (!c) {
      scores[std::string(score_label(s))] = nullptr;
      continue;
    }
    scores[std::string(score_label(s))] = {
        {"pre", c->pre}, {"post", c->post}, {"rpd", c->rpd}, {"satisfied", c->satisfied}};
  }
  json years = json::array();
  for (const auto& y : r.years) {
    years.push_back({{"year", y.year},
                     {"eps_pre", optional_number(y.eps_pre)},
                     {"eps_post", optional_number(y.eps_post)},
                     {"m_pre", optional_number(y.m_pre)},
                     {"m_post", optional_number(y.m_post)},
                     {"s_pre", optional_number(y.s_pre)},
                     {"s_post", optional_number(y.s_post)}});
  }
  json out = {{"company_id", r.company_id},
              {"method", r.method},
              {"epsilon", r.epsilon},
              {"objectives", objectives},
              {"joint_satisfied", r.joint_satisfied},
              {"scores", scores},
              {"years", years},
              {"iterations_used", r.iterations_used},
              {"best_iteration", r.best_iteration},
              {"failed", r.failed}};
  if (r.failed) out["error"] = r.error;
  return out;
}

ResultRecord from_json(const json& j) {
  ResultRecord r;
  r.company_id = j.at("company_id").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.epsilon = j.at("epsilon").get<double>();
  for (const auto& o : j.at("objectives")) {
    ObjectiveRecord rec;
    rec.spec.score = parse_score_or_throw(o.at("score").get<std::string>());
    rec.spec.direction = parse_direction(o.at("direction").get<std::string>());
    rec.spec.aggregation = parse_aggregation(o.at("aggregation").get<std::string>());
    rec.pre = o.at("pre").get<double>();
    rec.post = o.at("post").get<double>();
    rec.rpd = o.at("rpd").get<double>();
    rec.satisfied = o.at("satisfied").get<bool>();
    r.objectives.push_back(rec);
  }
  r.joint_satisfied = j.at("joint_satisfied").get<bool>();
  const auto& scores = j.at("scores");
  for (ScoreName s : kScores) {
    const auto& c = scores.at(std::string(score_label(s)));
    if (c.is_null()) continue;
    r.scores[static_cast<std::size_t>(s)] =
        ScoreChange{c.at("pre").get<double>(), c.at("post").get<double>(),
                    c.at("rpd").get<double>(), c.at("satisfied").get<bool>()};
  }
  for (const auto& y : j.at("years")) {
    YearChange yc;
    yc.year = y.at("year").get<int>();
    yc.eps_pre = read_optional(y, "eps_pre");
    yc.eps_post = read_optional(y, "eps_post");
    yc.m_pre = read_optional(y, "m_pre");
    yc.m_post = read_optional(y, "m_post");
    yc.s_pre = read_optional(y, "s_pre");
    yc.s_post = read_optional(y, "s_post");
    r.years.push_back(yc);
  }
  r.iterations_used = j.at("iterations_used").get<int>();
  r.best_iteration = j.at("best_iteration").get<int>();
  r.failed = j.at("failed").get<bool>();
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
  return r;
}

std::map<int, double> by_year(const std::optional<ScoreSeries>& s) {
  std::map<int, double> out;
  if (s) {
    for (const auto& [y, v] : s->per_year) out[y] = v;
  }
  return out;
}

std::optional<double> lookup(const std::map<int, double>& m, int year) {
  auto it = m.find(year);
  return it == m.end() ? std::nullopt : std::optional<double>(it->second);
}

}  // namespace

Direction goal_direction(ScoreName name) noexcept {
  return name == ScoreName::EPS ? Direction::Maximize : Direction::Minimize;
}

ResultRecord make_record(const std::string& company_id, const std::string& method, double epsilon,
                         const AttackResult& result) {
  ResultRecord r;
  r.company_id = company_id;
  r.method = method;
  r.epsilon = epsilon;
  for (const auto& o : result.objectives) r.objectives.push_back({o.spec, o.pre, o.post, o.rpd, o.satisfied});
  r.joint_satisfied = result.joint_satisfied;
  for (ScoreName s : kScores) {
    const auto& pre = result.pre_scores.get(s);
    const auto& post = result.post_scores.get(s);
    if (!pre || !post) continue;
    r.scores[static_cast<std::size_t>(s)] =
        ScoreChange{pre->aggregate, post->aggregate, change_rpd(post->aggregate, pre->aggregate),
                    improved(goal_direction(s), pre->aggregate, post->aggregate)};
  }
  const auto e0 = by_year(result.pre_scores.eps), e1 = by_year(result.post_scores.eps);
  const auto m0 = by_year(result.pre_scores.mscore), m1 = by_year(result.post_scores.mscore);
  const auto s0 = by_year(result.pre_scores.sscore), s1 = by_year(result.post_scores.sscore);
  std::map<int, bool> years;
  for (const auto* m : {&e0, &e1, &m0, &m1, &s0, &s1}) {
    for (const auto& kv : *m) years[kv.first] = true;
  }
  for (const auto& [y, _] : years) {
    r.years.push_back({y, lookup(e0, y), lookup(e1, y), lookup(m0, y), lookup(m1, y), lookup(s0, y),
                       lookup(s1, y)});
  }
  r.iterations_used = result.iterations_used;
  r.best_iteration = result.best_iteration;
  return r;
}

ResultRecord failure_record(const std::string& company_id, const std::string& method,
                            double epsilon, const std::vector<ObjectiveSpec>& specs,
                            const std::vector<int>& years, const std::string& error) {
  ResultRecord r;
  r.company_id = company_id;
  r.method = method;
  r.epsilon = epsilon;
  for (const auto& s : specs) r.objectives.push_back({s, 0.0, 0.0, 0.0, false});
  for (int y : years) r.years.push_back({y, {}, {}, {}, {}, {}, {}});
  r.failed = true;
  r.error = error;
  return r;
}

void write_results(std::span<const ResultRecord> records, std::ostream& out) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<ResultRecord> read_results(std::istream& in) {
  std::vector<ResultRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

void write_rpd_pairs(std::span<const ResultRecord> records, std::ostream& out) {
  out << "company_id,year,mscore_rpd,eps_rpd\n";
  out.precision(17);
  for (const auto& r : records) {
    for (std::size_t i = 1; i < r.years.size(); ++i) {
      const auto& y = r.years[i];
      double m = 0.0, e = 0.0;
      if (!r.failed && y.m_pre && y.m_post) m = change_rpd(*y.m_post, *y.m_pre);
      if (!r.failed && y.eps_pre && y.eps_post) e = change_rpd(*y.eps_post, *y.eps_pre);
      out << r.company_id << ',' << y.year << ',' << m << ',' << e << '\n';
    }
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto partial = path;
  partial += ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + partial.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for " + partial.string());
  }
  std::error_code ec;
  std::filesystem::rename(partial, path, ec);
  if (ec) throw IoError("cannot move " + partial.string() + " into place: " + ec.message());
}

void write_results(std::span<const ResultRecord> records, const std::filesystem::path& results,
                   const std::optional<std::filesystem::path>& pairs) {
  std::ostringstream body;
  write_results(records, body);
  write_file_atomic(results, body.str());
  if (pairs) {
    std::ostringstream p;
    write_rpd_pairs(records, p);
    write_file_atomic(*pairs, p.str());
  }
}

std::vector<ResultRecord> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_results(in);
}

}  // namespace finadv
