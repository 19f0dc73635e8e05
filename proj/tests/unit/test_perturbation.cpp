#include <doctest.h>

#include <random>
#include <sstream>

#include "finadv/errors.hpp"
#include "finadv/perturbation.hpp"
#include "fixtures.hpp"

using namespace finadv;
using finadv::testing::identical_years;

namespace {

constexpr std::size_t kDebtTerm = 3;

FinancialPanel debt_panel() {
  auto rows = identical_years(2);
  for (auto& r : rows) {
    r.values[Var::DLTT] = 100;
    r.values[Var::LCT] = 40;
  }
  return build_panel("D", rows);
}

PerturbationPlan random_plan(std::mt19937_64& rng, std::size_t years, double eps) {
  std::uniform_real_distribution<double> u(-eps, eps);
  auto plan = PerturbationPlan::zeros(years, 7, eps);
  for (Eigen::Index i = 0; i < plan.entries.size(); ++i) plan.entries.data()[i] = u(rng);
  return plan;
}

}  // namespace

TEST_CASE("default strategy catalog") {
  const auto m = default_strategies();
  REQUIRE(m.size() == 7);
  CHECK(m.find("debt-term") == kDebtTerm);
  CHECK(m.coefficient(kDebtTerm, Var::DLTT) == 1.0);
  CHECK(m.coefficient(kDebtTerm, Var::LCT) == -1.0);
  CHECK(m.coefficient(m.find("depreciation"), Var::DP) == 1.0);
  CHECK(m.dense().rows() == 7);
  CHECK_NOTHROW(m.check_atoms(*Hierarchy::standard()));
  CHECK_THROWS_AS(m.find("nope"), std::out_of_range);

  const auto off = m.with_row_disabled(0);
  CHECK(off.coefficient(0, Var::COGS) == 0.0);
  CHECK(off.size() == 7);
}

TEST_CASE("strategy rows are validated") {
  CHECK_THROWS_AS(StrategyMatrix(std::vector<StrategyRow>{{"empty", {}}}), std::invalid_argument);
  CHECK_THROWS_AS(StrategyMatrix(std::vector<StrategyRow>{{"bad", {{Var::DP, 2}}}}), std::invalid_argument);
  const StrategyMatrix derived(std::vector<StrategyRow>{{"lt", {{Var::LT, 1}}}});
  CHECK_THROWS_AS(derived.check_atoms(*Hierarchy::standard()), NotAnAtom);
}

TEST_CASE("strategy catalog parsing merges rows by name") {
  std::istringstream in("strategy_name,atom_code,sign\n# swap\nswap,DLTT,+1\nswap,LCT,-1\ndep,DP,1\n");
  const auto m = parse_strategy_catalog(in);
  REQUIRE(m.size() == 2);
  CHECK(m.row(0).impacts.size() == 2);
  CHECK(m.coefficient(1, Var::DP) == 1.0);
}

TEST_CASE("debt-term swap moves both atoms and their parent") {
  const auto p = debt_panel();
  auto plan = PerturbationPlan::zeros(2, 7, 0.2);
  plan.entries(1, kDebtTerm) = 0.1;
  const auto q = apply_plan(p, plan, default_strategies());
  CHECK(q.value(1, Var::DLTT) == doctest::Approx(110.0));
  CHECK(q.value(1, Var::LCT) == doctest::Approx(36.0));
  CHECK(q.value(1, Var::LT) == doctest::Approx(p.value(1, Var::LT) + 6.0));
  CHECK(q.value(0, Var::DLTT) == 100.0);
  CHECK(validate_panel(q).ok());

  SUBCASE("dollar-balanced mode transfers equal amounts") {
    const auto b = apply_plan(p, plan, default_strategies(), ApplyMode::DollarBalanced);
    CHECK(b.value(1, Var::DLTT) == doctest::Approx(110.0));
    CHECK(b.value(1, Var::LCT) == doctest::Approx(30.0));
    CHECK(b.value(1, Var::LT) == doctest::Approx(p.value(1, Var::LT)));
  }
}

TEST_CASE("a zero atom cannot be moved relatively") {
  auto rows = identical_years(2);
  for (auto& r : rows) r.values[Var::XSTF] = 0;
  const auto p = build_panel("Z", rows);
  auto plan = PerturbationPlan::zeros(2, 7, 0.4);
  plan.entries.setConstant(0.0);
  plan.entries(0, 1) = 0.4;  // cogs-xstf
  const auto q = apply_plan(p, plan, default_strategies());
  CHECK(q.value(0, Var::XSTF) == 0.0);
  CHECK(q.value(0, Var::COGS) == doctest::Approx(p.value(0, Var::COGS) * 1.4));
}

TEST_CASE("projection clamps to the budget box") {
  auto plan = PerturbationPlan::zeros(1, 3, 0.1);
  plan.entries << 0.3, -0.05, -0.7;
  CHECK_FALSE(plan.feasible());
  const auto p = project_plan(plan);
  CHECK(p.entries(0, 0) == 0.1);
  CHECK(p.entries(0, 1) == -0.05);
  CHECK(p.entries(0, 2) == -0.1);
  CHECK(p.feasible());
  CHECK(project_plan(p).entries == p.entries);
}

TEST_CASE("plan shape must match") {
  const auto p = debt_panel();
  CHECK_THROWS_AS(apply_plan(p, PerturbationPlan::zeros(3, 7, 0.1), default_strategies()),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_plan(p, PerturbationPlan::zeros(2, 6, 0.1), default_strategies()),
                  std::invalid_argument);
}

TEST_CASE("zero plan is the identity") {
  const auto p = finadv::testing::identity_panel(3);
  const auto q = apply_plan(p, PerturbationPlan::zeros(3, 7, 0.1), default_strategies());
  CHECK(q.rows() == p.rows());
}

TEST_CASE("property: the plan map is affine and the Jacobian is exact") {
  std::mt19937_64 rng(21);
  const auto m = default_strategies();
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = finadv::testing::random_panel(rng, 3);
    const auto a = random_plan(rng, 3, 0.2);
    const auto b = random_plan(rng, 3, 0.2);
    auto sum = a;
    sum.entries += b.entries;
    sum.epsilon = 0.4;

    const auto qa = apply_plan(p, a, m);
    const auto qb = apply_plan(p, b, m);
    const auto qs = apply_plan(p, sum, m);
    const PlanJacobian jac(p, m);
    for (std::size_t t = 0; t < 3; ++t) {
      YearRow<double> predicted = p.row(t);
      for (std::size_t l = 0; l < 7; ++l) {
        for (const auto& term : jac.terms(t, l)) {
          predicted[index(term.node)] += term.weight * a.entries(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(l));
        }
      }
      for (std::size_t i = 0; i < kNumNodes; ++i) {
        const double base = p.row(t)[i];
        CHECK(qs.row(t)[i] - base ==
              doctest::Approx((qa.row(t)[i] - base) + (qb.row(t)[i] - base)).epsilon(1e-9).scale(1e3));
        CHECK(qa.row(t)[i] == doctest::Approx(predicted[i]).epsilon(1e-12));
      }
    }
    CHECK(validate_panel(qs).ok());
  }
}

TEST_CASE("property: paired expense moves of equal size leave operating cost unchanged") {
  auto rows = identical_years(2);
  for (auto& r : rows) {
    r.values[Var::COGS] = 300;
    r.values[Var::XSGA] = 300;
    r.values[Var::XOPR] = 600;
  }
  const auto p = build_panel("C", rows);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int i = 0; i < 50; ++i) {
    auto plan = PerturbationPlan::zeros(2, 7, 0.4);
    plan.entries(0, 0) = u(rng);
    plan.entries(1, 0) = u(rng);
    const auto q = apply_plan(p, plan, default_strategies());
    for (std::size_t t = 0; t < 2; ++t) {
      CHECK(q.value(t, Var::XOPR) == doctest::Approx(600.0));
      CHECK(q.value(t, Var::NI) == doctest::Approx(p.value(t, Var::NI)));
    }
  }
}
