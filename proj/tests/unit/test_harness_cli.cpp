#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "finadv/cli.hpp"
#include "finadv/harness.hpp"
#include "finadv/results_io.hpp"
#include "fixtures.hpp"

using namespace finadv;
namespace fs = std::filesystem;

namespace {

SynthParams tiny(std::uint64_t seed = 1) {
  SynthParams p;
  p.n_companies = 6;
  p.seed = seed;
  return p;
}

SweepSpec quick_spec() {
  SweepSpec s;
  s.attack.max_iterations = 30;
  s.epsilons = {0.1};
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Cli {
  std::ostringstream out, err;
  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "finadv");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  }
};

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("finadv_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("method names") {
  CHECK(all_methods().size() == 5);
  CHECK(method_label(Method::PGD_AVG) == "PGD-Avg");
  CHECK(parse_method("pgd-avg") == Method::PGD_AVG);
  CHECK(parse_method("MVMO_MS") == Method::MVMO_MS);
  CHECK_FALSE(parse_method("nope").has_value());
  CHECK(method_objectives(Method::MVMO_MS).size() == 3);
  CHECK(method_objectives(Method::PGD_M).front().aggregation == Aggregation::MaxViolator);
  CHECK(method_attack(Method::PGD_EPS) == AttackMethod::PgdSingle);
}

TEST_CASE("satisfaction follows each objective's direction") {
  auto series = [](ScoreName name, double mean) {
    ScoreSeries s;
    s.score_name = name;
    s.per_year = {{2001, mean}};
    s.aggregate = mean;
    return s;
  };
  AttackResult r;
  r.pre_scores.eps = series(ScoreName::EPS, 1.0);
  r.post_scores.eps = series(ScoreName::EPS, 1.2);
  r.pre_scores.mscore = series(ScoreName::MSCORE, -2.0);
  r.post_scores.mscore = series(ScoreName::MSCORE, -1.9);
  const std::vector<ObjectiveSpec> specs{{ScoreName::EPS, Direction::Maximize, Aggregation::Mean},
                                         {ScoreName::MSCORE, Direction::Minimize, Aggregation::Mean},
                                         {ScoreName::SSCORE, Direction::Minimize, Aggregation::Mean}};
  const auto f = satisfy(r, specs);
  REQUIRE(f.per_objective.size() == 3);
  CHECK(f.per_objective[0]);
  CHECK_FALSE(f.per_objective[1]);
  CHECK_FALSE(f.per_objective[2]);  // unavailable score never counts
  CHECK_FALSE(f.joint);
  CHECK(satisfy(r, {specs[0]}).joint);
}

TEST_CASE("sweep summaries are consistent and deterministic") {
  const auto data = generate_synthetic(tiny());
  auto spec = quick_spec();
  const auto a = run_sweep(data, spec);
  spec.jobs = 3;
  const auto b = run_sweep(data, spec);
  REQUIRE(a.rows.size() == 5);
  CHECK(a.records == b.records);
  CHECK(a.records.size() == 5 * data.companies.size());

  for (const auto& row : a.rows) {
    CHECK(row.companies == data.companies.size());
    const auto& r = row.company_rates;
    CHECK(r.joint2 <= std::min(r.eps, r.mscore) + 1e-12);
    CHECK(r.joint3 <= std::min(r.joint2, r.sscore) + 1e-12);
    CHECK(row.year_rates.joint3 <= row.year_rates.joint2 + 1e-12);
    for (double v : {r.eps, r.mscore, r.sscore, r.joint2, r.joint3}) {
      CHECK(v >= 0.0);
      CHECK(v <= 100.0);
    }
  }

  std::ostringstream table;
  print_summary(table, a.rows);
  CHECK(table.str().find("PGD-Avg") != std::string::npos);
}

TEST_CASE("sweep audit sees feasible plans") {
  const auto data = generate_synthetic(tiny(2));
  auto spec = quick_spec();
  spec.methods = {Method::MVMO};
  std::mutex mu;
  std::size_t calls = 0;
  bool all_ok = true;
  spec.audit = [&](const FinancialPanel&, Method, double eps, int, const PerturbationPlan& plan) {
    std::lock_guard lock(mu);
    ++calls;
    all_ok = all_ok && plan.max_abs() <= eps;
  };
  run_sweep(data, spec);
  CHECK(calls == 30 * data.companies.size());
  CHECK(all_ok);
}

TEST_CASE("sweep settings validation") {
  auto s = quick_spec();
  s.epsilons = {1.5};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = quick_spec();
  s.methods.clear();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = quick_spec();
  s.jobs = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch("codes");
  const auto data = (dir / "panel.csv").string();
  Cli ok;
  REQUIRE(ok.run({"synth", "--companies", "4", "--seed", "3", "--out", data}) == kExitOk);

  Cli zero;
  CHECK(zero.run({"synth", "--companies", "0", "--out", (dir / "z.csv").string()}) == kExitUsage);
  Cli big;
  CHECK(big.run({"attack", "--data", data, "--epsilon", "1.5", "--out", (dir / "r.jsonl").string()}) == kExitUsage);
  Cli method;
  CHECK(method.run({"attack", "--data", data, "--method", "magic", "--out", (dir / "r.jsonl").string()}) == kExitUsage);
  Cli missing;
  CHECK(missing.run({"validate", "--data", (dir / "absent.csv").string()}) == kExitIo);
  Cli valid;
  CHECK(valid.run({"validate", "--data", data}) == kExitOk);
  Cli none;
  CHECK(none.run({}) == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("cli with zero iterations reports no change") {
  const auto dir = scratch("zero");
  const auto data = (dir / "panel.csv").string();
  Cli s;
  REQUIRE(s.run({"synth", "--companies", "3", "--seed", "8", "--out", data}) == kExitOk);
  Cli a;
  const auto out = dir / "r.jsonl";
  REQUIRE(a.run({"attack", "--data", data, "--method", "mvmo", "--epsilon", "0.1", "--iterations", "0", "--out",
                 out.string()}) == kExitOk);
  const auto records = read_results(out);
  REQUIRE(records.size() == 3);
  for (const auto& r : records) {
    for (const auto& o : r.objectives) CHECK(o.rpd == 0.0);
    CHECK_FALSE(r.joint_satisfied);
  }
  CHECK(fs::exists(dir / "r.pairs.csv"));
  CHECK(fs::exists(dir / "r.manifest.json"));
  fs::remove_all(dir);
}

TEST_CASE("cli synth output and sweep are reproducible") {
  const auto dir = scratch("repro");
  Cli a, b;
  REQUIRE(a.run({"synth", "--companies", "5", "--seed", "11", "--out", (dir / "a.csv").string()}) == kExitOk);
  REQUIRE(b.run({"synth", "--companies", "5", "--seed", "11", "--out", (dir / "b.csv").string()}) == kExitOk);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

  Cli sweep;
  const auto out = dir / "s.jsonl";
  REQUIRE(sweep.run({"sweep", "--data", (dir / "a.csv").string(), "--methods", "mvmo,pgd_m", "--epsilons", "0.1",
                     "--iterations", "10", "--out", out.string()}) == kExitOk);
  CHECK(read_results(out).size() == 2 * 5);
  CHECK(sweep.out.str().find("PGD-M") != std::string::npos);

  // key=value config file, overridden by a flag
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "methods=mvmo\nepsilons=0.2\niterations=5\n";
  }
  Cli configured;
  const auto out2 = dir / "c.jsonl";
  REQUIRE(configured.run({"sweep", "--config", (dir / "run.cfg").string(), "--data", (dir / "a.csv").string(),
                          "--iterations", "3", "--out", out2.string()}) == kExitOk);
  const auto recs = read_results(out2);
  REQUIRE(recs.size() == 5);
  CHECK(recs[0].epsilon == 0.2);
  CHECK(recs[0].iterations_used <= 3);

  // a manifest replays its run
  Cli replay;
  const auto out3 = dir / "replay.jsonl";
  REQUIRE(replay.run({"sweep", "--config", (dir / "c.manifest.json").string(), "--out", out3.string(), "--pairs",
                      (dir / "replay.pairs.csv").string(), "--manifest", (dir / "replay.manifest.json").string()}) ==
          kExitOk);
  CHECK(slurp(out3) == slurp(out2));

  {
    std::ofstream bad(dir / "bad.cfg");
    bad << "colour=blue\n";
  }
  Cli unknown;
  CHECK(unknown.run({"sweep", "--config", (dir / "bad.cfg").string(), "--data", (dir / "a.csv").string()}) ==
        kExitUsage);
  Cli no_data;
  CHECK(no_data.run({"sweep", "--out", out2.string()}) == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("sha256 of a known file") {
  const auto dir = scratch("sha");
  {
    std::ofstream f(dir / "abc.txt", std::ios::binary);
    f << "abc";
  }
  CHECK(sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove_all(dir);
}
