#include <doctest.h>

#include <random>
#include <sstream>

#include "finadv/errors.hpp"
#include "finadv/panel.hpp"
#include "fixtures.hpp"

using namespace finadv;
using finadv::testing::base_year;
using finadv::testing::identical_years;

namespace {

std::vector<YearRecord> debt_rows(double lt) {
  auto rows = identical_years(2);
  for (auto& r : rows) {
    r.values[Var::DLTT] = 10;
    r.values[Var::LCT] = 5;
    r.values[Var::LT] = lt;
  }
  return rows;
}

}  // namespace

TEST_CASE("variable vocabulary is closed and round-trips through its codes") {
  CHECK(reported_variables().size() == 22);
  for (Var v : reported_variables()) {
    auto back = parse_code(code(v));
    REQUIRE(back.has_value());
    CHECK(*back == v);
    CHECK_FALSE(is_placeholder(v));
  }
  CHECK(parse_code("RECV") == Var::RECT);
  CHECK_FALSE(parse_code("FOO").has_value());
  CHECK(is_placeholder(Var::REVT));
  CHECK(is_placeholder(Var::PI));
}

TEST_CASE("standard hierarchy encodes the signed edges and atoms") {
  const auto& h = *Hierarchy::standard();
  CHECK(h.is_atom(Var::DLTT));
  CHECK(h.is_atom(Var::COGS));
  CHECK(h.is_atom(Var::XSTF));
  CHECK(h.is_atom(Var::CSHO));
  CHECK_FALSE(h.is_atom(Var::LT));
  CHECK_FALSE(h.is_atom(Var::NI));
  CHECK_FALSE(h.is_atom(Var::REVT));
  CHECK_FALSE(h.is_atom(Var::PI));

  // COGS -> XOPR (+) -> NI (-)
  const auto& anc = h.ancestors(Var::COGS);
  REQUIRE(anc.size() == 2);
  CHECK(anc[0].ancestor == Var::XOPR);
  CHECK(anc[0].sign == 1);
  CHECK(anc[1].ancestor == Var::NI);
  CHECK(anc[1].sign == -1);

  // RECT -> ACT -> AT, all additive
  const auto& rect = h.ancestors(Var::RECT);
  REQUIRE(rect.size() == 2);
  CHECK(rect[1].ancestor == Var::AT);
  CHECK(rect[1].sign == 1);
}

TEST_CASE("hierarchy rejects non-forests") {
  CHECK_THROWS_AS(Hierarchy({{Var::LT, Var::DLTT, 1}, {Var::AT, Var::DLTT, 1}}), HierarchyError);
  CHECK_THROWS_AS(Hierarchy({{Var::LT, Var::AT, 1}, {Var::AT, Var::LT, 1}}), HierarchyError);
  CHECK_THROWS_AS(Hierarchy({{Var::LT, Var::LT, 1}}), HierarchyError);
  CHECK_THROWS_AS(Hierarchy({{Var::LT, Var::DLTT, 2}}), HierarchyError);
}

TEST_CASE("edge catalog parses comments and signs") {
  std::istringstream in("# parent,child,sign\nLT,DLTT,+1\nNI,DP,-1\n\n");
  const auto edges = parse_edge_catalog(in);
  REQUIRE(edges.size() == 2);
  CHECK(edges[1] == DependencyEdge{Var::NI, Var::DP, -1});
}

TEST_CASE("build_panel freezes residuals") {
  SUBCASE("children sum to parent") {
    const auto p = build_panel("A", debt_rows(15));
    CHECK(p.residual(0, Var::LT) == 0.0);
    CHECK(p.residual(1, Var::LT) == 0.0);
  }
  SUBCASE("imbalance goes to the residual") {
    const auto p = build_panel("A", debt_rows(18));
    CHECK(p.residual(0, Var::LT) == 3.0);
    CHECK(p.residual(1, Var::LT) == 3.0);
  }
  SUBCASE("placeholders are summed from their children") {
    const auto p = build_panel("A", identical_years(2));
    CHECK(p.value(0, Var::REVT) == p.value(0, Var::SALE));
    CHECK(p.value(0, Var::PI) == 0.0);
    CHECK(p.value(0, Var::PVO) == 0.0);
  }
}

TEST_CASE("build_panel rejects bad inputs") {
  CHECK_THROWS_AS(build_panel("A", identical_years(1)), InsufficientYears);

  auto dup = identical_years(2);
  dup[1].year = dup[0].year;
  CHECK_THROWS_AS(build_panel("A", dup), DuplicateYear);

  auto missing = identical_years(2);
  missing[1].values.erase(Var::SALE);
  try {
    build_panel("A", missing);
    FAIL("expected MissingVariable");
  } catch (const MissingVariable& e) {
    CHECK(e.variable() == Var::SALE);
    CHECK(e.year() == 2001);
  }

  auto nan = identical_years(2);
  nan[0].values[Var::NI] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(build_panel("A", nan), NonFiniteValue);
}

TEST_CASE("XSTF is optional and defaults to zero") {
  auto rows = identical_years(2);
  for (auto& r : rows) r.values.erase(Var::XSTF);
  const auto p = build_panel("A", rows);
  CHECK(p.value(0, Var::XSTF) == 0.0);
}

TEST_CASE("years are sorted and gaps recorded") {
  auto rows = identical_years(3);
  rows[2].year = 2005;
  std::swap(rows[0], rows[2]);
  const auto p = build_panel("A", rows);
  CHECK(p.years() == std::vector<int>{2000, 2001, 2005});
  CHECK(p.gaps() == std::vector<std::size_t>{2});
}

TEST_CASE("recompute_derived propagates along signed paths") {
  const auto p = build_panel("A", identical_years(2));

  SUBCASE("debt raises total liabilities only") {
    const AtomDelta d{0, Var::DLTT, 7.0};
    const auto q = recompute_derived(p, std::span(&d, 1));
    CHECK(q.value(0, Var::LT) == p.value(0, Var::LT) + 7.0);
    CHECK(q.value(0, Var::AT) == p.value(0, Var::AT));
    CHECK(q.value(1, Var::LT) == p.value(1, Var::LT));
  }
  SUBCASE("empty delta list is the identity") {
    const auto q = recompute_derived(p, {});
    CHECK(q.rows() == p.rows());
  }
  SUBCASE("offsetting operating costs cancel in XOPR and NI") {
    const std::vector<AtomDelta> d{{1, Var::COGS, 1.0}, {1, Var::XSGA, -1.0}};
    const auto q = recompute_derived(p, d);
    CHECK(q.value(1, Var::XOPR) == p.value(1, Var::XOPR));
    CHECK(q.value(1, Var::NI) == p.value(1, Var::NI));
    CHECK(q.value(1, Var::COGS) == p.value(1, Var::COGS) + 1.0);
  }
  SUBCASE("depreciation is subtracted from income") {
    const AtomDelta d{0, Var::DP, 5.0};
    const auto q = recompute_derived(p, std::span(&d, 1));
    CHECK(q.value(0, Var::NI) == p.value(0, Var::NI) - 5.0);
  }
  SUBCASE("derived targets are rejected") {
    const AtomDelta d{0, Var::LT, 1.0};
    CHECK_THROWS_AS(recompute_derived(p, std::span(&d, 1)), NotAnAtom);
  }
  SUBCASE("non-finite results are rejected") {
    const AtomDelta d{0, Var::DLTT, std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(recompute_derived(p, std::span(&d, 1)), NonFiniteResult);
  }
}

TEST_CASE("validate_panel reports edits that break the hierarchy") {
  const auto p = build_panel("A", identical_years(2));
  CHECK(validate_panel(p).ok());

  const auto edited = p.with_value(0, Var::LT, p.value(0, Var::LT) + 1.0);
  const auto report = validate_panel(edited);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].parent == Var::LT);
  CHECK(report.violations[0].magnitude == doctest::Approx(1.0));

  const AtomDelta d{1, Var::PPEGT, 12.5};
  CHECK(validate_panel(recompute_derived(p, std::span(&d, 1))).ok());
}

TEST_CASE("property: propagation is additive, conserves ancestors and freezes residuals") {
  std::mt19937_64 rng(11);
  const auto atoms = Hierarchy::standard()->atoms();
  std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
  std::uniform_real_distribution<double> amount(-50.0, 50.0);

  for (int trial = 0; trial < 200; ++trial) {
    const auto p = finadv::testing::random_panel(rng, 3);
    auto draw = [&] {
      std::vector<AtomDelta> d;
      for (int k = 0; k < 4; ++k) d.push_back({static_cast<std::size_t>(trial % 3), atoms[pick(rng)], amount(rng)});
      return d;
    };
    const auto d1 = draw();
    const auto d2 = draw();
    auto both = d1;
    both.insert(both.end(), d2.begin(), d2.end());

    const auto joint = recompute_derived(p, both);
    const auto chained = recompute_derived(recompute_derived(p, d1), d2);
    for (std::size_t t = 0; t < p.num_years(); ++t) {
      for (std::size_t i = 0; i < kNumNodes; ++i) {
        CHECK(joint.row(t)[i] == doctest::Approx(chained.row(t)[i]).epsilon(1e-12));
        CHECK(joint.residual(t, var_at(i)) == p.residual(t, var_at(i)));
      }
    }
    CHECK(validate_panel(joint).ok());

    // single-atom conservation
    const Var a = atoms[pick(rng)];
    const double delta = amount(rng);
    const AtomDelta single{1, a, delta};
    const auto q = recompute_derived(p, std::span(&single, 1));
    std::array<double, kNumNodes> expected{};
    expected[index(a)] = delta;
    for (const auto& link : p.hierarchy().ancestors(a)) expected[index(link.ancestor)] = link.sign * delta;
    for (std::size_t i = 0; i < kNumNodes; ++i) {
      CHECK(q.value(1, var_at(i)) - p.value(1, var_at(i)) == doctest::Approx(expected[i]).epsilon(1e-9).scale(1000));
      CHECK(q.value(0, var_at(i)) == p.value(0, var_at(i)));
    }
  }
}
