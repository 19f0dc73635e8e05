#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "finadv/attack.hpp"
#include "finadv/dataset.hpp"
#include "finadv/errors.hpp"
#include "finadv/results_io.hpp"
#include "fixtures.hpp"

using namespace finadv;

namespace {

std::string header_line() {
  std::string out;
  for (const auto& h : csv_header()) out += (out.empty() ? "" : ",") + h;
  return out + "\n";
}

std::string row_line(const std::string& id, int year, std::map<Var, double> edits = {},
                     std::optional<Var> blank = std::nullopt) {
  auto values = finadv::testing::base_year();
  for (auto [v, x] : edits) values[v] = x;
  std::ostringstream out;
  out << id << "," << year;
  for (Var v : reported_variables()) {
    out << ",";
    if (blank && *blank == v) continue;
    out << values.at(v);
  }
  out << "\n";
  return out.str();
}

Dataset ingest(const std::string& text) {
  std::istringstream in(text);
  return ingest_csv(in, "test");
}

SynthParams small_params(std::uint64_t seed, std::size_t n = 30) {
  SynthParams p;
  p.n_companies = n;
  p.seed = seed;
  return p;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("finadv_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("ingest keeps usable companies in file order") {
  const auto d = ingest(header_line() + row_line("B", 2000) + row_line("B", 2001) + row_line("A", 2005) +
                        row_line("A", 2006) + row_line("A", 2007));
  REQUIRE(d.companies.size() == 2);
  CHECK(d.companies[0].company_id() == "B");
  CHECK(d.companies[1].num_years() == 3);
  CHECK(d.drops.empty());
  CHECK(std::holds_alternative<CsvSource>(d.provenance));
  CHECK(d.companies[0].value(0, Var::SALE) == 1000.0);
}

TEST_CASE("ingest drops bad years and thin companies") {
  SUBCASE("single-year company") {
    const auto d = ingest(header_line() + row_line("A", 2000) + row_line("A", 2001) + row_line("ONE", 2003));
    CHECK(d.companies.size() == 1);
    REQUIRE(d.drops.size() == 1);
    CHECK(d.drops[0].company_id == "ONE");
    CHECK(d.drops[0].year == 0);
  }
  SUBCASE("missing value drops the year") {
    const auto d = ingest(header_line() + row_line("A", 2000) + row_line("A", 2001) + row_line("A", 2002, {}, Var::SALE));
    REQUIRE(d.companies.size() == 1);
    CHECK(d.companies[0].num_years() == 2);
    REQUIRE_FALSE(d.drops.empty());
    CHECK(d.drops[0].year == 2002);
  }
  SUBCASE("non-positive share count drops the year") {
    const auto d = ingest(header_line() + row_line("A", 2000) + row_line("A", 2001) +
                          row_line("A", 2002, {{Var::CSHO, 0}}));
    CHECK(d.companies[0].num_years() == 2);
  }
  SUBCASE("nothing left") {
    CHECK_THROWS_AS(ingest(header_line() + row_line("ONE", 2003)), EmptyDataset);
  }
}

TEST_CASE("ingest rejects malformed files") {
  std::string bad = header_line();
  const auto pos = bad.find(",SALE");
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, 5, ",SALES");
  try {
    ingest(bad + row_line("A", 2000));
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("SALE") != std::string::npos);
  }
  CHECK_THROWS_AS(ingest(header_line() + "A,2000,1,2\n"), ParseError);
  std::string garbled = row_line("A", 2001);
  garbled.replace(garbled.find(",1000"), 5, ",12x4");
  CHECK_THROWS_AS(ingest(header_line() + row_line("A", 2000) + garbled), ParseError);
  CHECK_THROWS_AS(ingest(""), SchemaError);
}

TEST_CASE("synthetic generator is deterministic and round-trips through CSV") {
  const auto a = generate_synthetic(small_params(4));
  const auto b = generate_synthetic(small_params(4));
  std::ostringstream sa, sb;
  write_dataset_csv(a, sa);
  write_dataset_csv(b, sb);
  CHECK(sa.str() == sb.str());

  std::ostringstream sc;
  write_dataset_csv(generate_synthetic(small_params(5)), sc);
  CHECK(sa.str() != sc.str());

  const auto back = ingest(sa.str());
  REQUIRE(back.companies.size() == a.companies.size());
  for (std::size_t i = 0; i < a.companies.size(); ++i) {
    CHECK(back.companies[i].company_id() == a.companies[i].company_id());
    CHECK(back.companies[i].rows() == a.companies[i].rows());
  }
}

TEST_CASE("synthetic panels look like the target population") {
  const auto d = generate_synthetic(small_params(2024, 200));
  REQUIRE(d.companies.size() == 200);
  double years = 0.0;
  std::size_t finite = 0, total = 0;
  for (const auto& c : d.companies) {
    years += static_cast<double>(c.num_years());
    CHECK(c.num_years() >= 2);
    CHECK(c.num_years() <= 14);
    CHECK(validate_panel(c).ok());
    const auto card = ScoreCard::of(c);
    for (ScoreName s : {ScoreName::EPS, ScoreName::MSCORE, ScoreName::SSCORE}) {
      ++total;
      if (card.get(s) && std::isfinite(card.get(s)->aggregate)) ++finite;
    }
  }
  CHECK(years / 200.0 == doctest::Approx(7.9).epsilon(1.5 / 7.9));
  CHECK(static_cast<double>(finite) >= 0.99 * static_cast<double>(total));
}

TEST_CASE("synthetic parameters are validated") {
  SynthParams p;
  p.n_companies = 0;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  p = {};
  p.min_years = 1;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  p = {};
  p.distress_fraction = 1.5;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
}

TEST_CASE("result records round-trip through JSON lines") {
  std::mt19937_64 rng(3);
  const auto panel = finadv::testing::random_panel(rng, 3);
  AttackConfig cfg;
  cfg.max_iterations = 20;
  const ObjectiveSpec eps_up{ScoreName::EPS, Direction::Maximize, Aggregation::Mean};
  const ObjectiveSpec m_down{ScoreName::MSCORE, Direction::Minimize, Aggregation::Mean};
  const auto result = mvmo_attack(panel, ObjectiveBundle::from_specs({eps_up, m_down}), cfg);

  std::vector<ResultRecord> records{
      make_record("RND", "MVMO", 0.2, result),
      failure_record("BAD", "PGD-M", 0.05, {m_down}, {2000, 2001, 2002}, "no luck"),
  };
  CHECK(records[0].years.size() == 3);
  CHECK(records[0].score(ScoreName::EPS).has_value());
  CHECK(records[1].failed);

  std::stringstream io;
  write_results(records, io);
  CHECK(read_results(io) == records);

  std::stringstream empty;
  write_results(std::vector<ResultRecord>{}, empty);
  CHECK(empty.str().empty());
  CHECK(read_results(empty).empty());

  std::ostringstream pairs;
  write_rpd_pairs(records, pairs);
  std::istringstream lines(pairs.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) ++n;
  CHECK(n == 1 + 2 + 2);  // header plus two pairs per company
}

TEST_CASE("atomic writes leave no partial files") {
  const auto dir = temp_dir("atomic");
  write_file_atomic(dir / "a.txt", "hello\n");
  std::ifstream in(dir / "a.txt");
  std::string s;
  std::getline(in, s);
  CHECK(s == "hello");
  CHECK_FALSE(std::filesystem::exists(dir / "a.txt.partial"));
  CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "b.txt", "x"), IoError);
  std::filesystem::remove_all(dir);
}
