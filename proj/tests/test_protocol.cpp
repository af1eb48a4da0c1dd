#include "doctest.h"

#include "support.hpp"
#include "upf/errors.hpp"
#include "upf/oracle.hpp"
#include "upf/protocol.hpp"

using namespace upf;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values)
    v[i++] = x;
  return v;
}

StageConfig comm_config(double budget, double delta = 1e-3) {
  StageConfig c;
  c.stage = Stage::Comm;
  c.budget = budget;
  c.delta = delta;
  return c;
}

} // namespace

TEST_CASE("shadow price is the bid total over the budget") {
  CHECK(shadow_price(vec({1.0, 2.0, 3.0}), 12.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(shadow_price(vec({0.0, 0.0}), 10.0), DegeneratePrice);
  CHECK_THROWS_AS(shadow_price(vec({1.0, -1.0}), 10.0), DomainError);
  CHECK_THROWS_AS(shadow_price(vec({1.0}), 0.0), DomainError);
}

TEST_CASE("MME splits the budget in proportion to eligible bids") {
  const std::vector<bool> mask{false, false, true};
  const VectorXd split = mme_split_budget(100.0, vec({1.0, 3.0, 5.0}), mask);
  CHECK(split[0] == doctest::Approx(25.0));
  CHECK(split[1] == doctest::Approx(75.0));
  CHECK(split[2] == 0.0);

  const VectorXd even = mme_split_budget(100.0, vec({0.0, 0.0, 0.0}), mask);
  CHECK(even[0] == doctest::Approx(50.0));
  CHECK(even[1] == doctest::Approx(50.0));
  CHECK(even[2] == 0.0);

  CHECK_THROWS_AS(mme_split_budget(100.0, vec({1.0, 1.0}), {true, true}), NoEligibleGroup);
  CHECK_THROWS_AS(mme_split_budget(100.0, vec({1.0, 1.0}), {false}), DomainError);
  CHECK_THROWS_AS(mme_split_budget(0.0, vec({1.0}), {false}), DomainError);
}

TEST_CASE("identical UEs split the budget evenly") {
  const auto s = test::small_scenario({{1, LogParams(1.0, 100.0)}, {1, LogParams(1.0, 100.0)}}, 1);
  const auto out = run_stage(s, comm_config(20.0, 1e-9), VectorXd::Zero(2));
  REQUIRE(out.trace.converged());
  CHECK(out.rates[0] == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(out.rates[1] == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("radar stage gives masked sectors exactly zero") {
  const auto s = builtin_table1();
  StageConfig c;
  c.budget = s.r_radar_total;
  const auto out = run_stage(s, c, VectorXd::Zero(static_cast<Eigen::Index>(s.ues.size())));
  for (std::size_t i = 0; i < s.ues.size(); ++i) {
    if (s.ues[i].sector != 3)
      continue;
    CHECK(out.rates[static_cast<Eigen::Index>(i)] == 0.0);
    CHECK_FALSE(out.participating[i]);
  }
  CHECK(out.group_budgets[2] == 0.0);
  CHECK(out.group_totals[2] == 0.0);
}

TEST_CASE("table1 conserves budgets and satisfies KKT in both stages") {
  const auto s = builtin_table1();
  const auto result = run_two_stage(s);
  REQUIRE(result.converged());
  CHECK(result.radar_trace.iterations() <= 10000);
  CHECK(result.r_radar.sum() == doctest::Approx(s.r_radar_total).epsilon(1e-9));
  CHECK(result.r_comm.sum() == doctest::Approx(s.r_comm_total).epsilon(1e-9));
  CHECK((result.r_radar.array() >= 0.0).all());
  CHECK((result.r_comm.array() >= 0.0).all());
  CHECK(result.r_aggregate.isApprox(result.r_radar + result.r_comm));

  const auto n = static_cast<Eigen::Index>(s.ues.size());
  StageConfig radar;
  radar.budget = s.r_radar_total;
  const auto first = run_stage(s, radar, VectorXd::Zero(n));
  CHECK(test::kkt_gap(s, first, VectorXd::Zero(n), radar.budget) < 0.01);
  const auto second = run_stage(s, comm_config(s.r_comm_total), first.rates);
  CHECK(test::kkt_gap(s, second, first.rates, s.r_comm_total) < 0.01);
}

TEST_CASE("repeated runs are bitwise identical") {
  const auto s = builtin_table1();
  const auto a = run_two_stage(s);
  const auto b = run_two_stage(s);
  CHECK(a.r_radar == b.r_radar);
  CHECK(a.r_comm == b.r_comm);
  CHECK(a.comm_trace.iterations() == b.comm_trace.iterations());
}

TEST_CASE("a zero radar budget reduces to a single comm stage") {
  auto s = builtin_table1();
  s.r_radar_total = 0.0;
  const auto result = run_two_stage(s);
  CHECK(result.r_radar.isZero(0.0));
  CHECK(result.radar_trace.iterations() == 0);
  CHECK(result.radar_trace.converged());

  const auto alone =
      run_stage(s, comm_config(s.r_comm_total),
                VectorXd::Zero(static_cast<Eigen::Index>(s.ues.size())));
  CHECK(result.r_comm == alone.rates);
}

TEST_CASE("groups end on one pooled price that matches the centralized optimum") {
  const auto s = test::small_scenario({{1, SigmoidParams(2.0, 8.0)},
                                       {1, LogParams(3.0, 100.0)},
                                       {2, SigmoidParams(1.0, 12.0)},
                                       {2, LogParams(0.5, 100.0)}},
                                      2);
  const auto out = run_stage(s, comm_config(25.0, 1e-9), VectorXd::Zero(4));
  REQUIRE(out.trace.converged());
  CHECK(out.group_prices[0] == doctest::Approx(out.group_prices[1]).epsilon(1e-6));

  const auto problem = stage_problem(s, Stage::Comm, 25.0, VectorXd::Zero(4));
  const auto best = oracle_ascent_solve(problem.problem);
  for (Eigen::Index i = 0; i < 4; ++i)
    CHECK(out.rates[i] == doctest::Approx(best.rates[i]).epsilon(1e-4));
}

TEST_CASE("oscillating sigmoid groups still settle") {
  const auto s = test::small_scenario(
      {{1, SigmoidParams(1.28, 11.68)}, {2, SigmoidParams(1.68, 5.80)}, {1, SigmoidParams(1.19, 12.56)}},
      2);
  const auto out = run_stage(s, comm_config(15.82, 1e-6), VectorXd::Zero(3));
  REQUIRE(out.trace.converged());
  CHECK(test::kkt_gap(s, out, VectorXd::Zero(3), 15.82) < 0.01);
}

TEST_CASE("a stage where every UE first bids zero still spends its budget") {
  auto s = builtin_table1();
  s.interference.assign(3, false);
  const auto n = static_cast<Eigen::Index>(s.ues.size());
  StageConfig radar;
  radar.budget = 200.0;
  const auto first = run_stage(s, radar, VectorXd::Zero(n));
  const auto second = run_stage(s, comm_config(20.0), first.rates);
  REQUIRE(second.trace.converged());
  CHECK(second.rates.sum() == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(second.trace.iterations() > 2);
}

TEST_CASE("trace records every iteration") {
  const auto s = builtin_table1();
  const auto result = run_two_stage(s);
  const auto &snaps = result.comm_trace.snapshots;
  REQUIRE_FALSE(snaps.empty());
  for (std::size_t n = 0; n < snaps.size(); ++n) {
    CHECK(snaps[n].iteration == n + 1);
    CHECK(snaps[n].prices.size() == 3);
    CHECK(snaps[n].budgets.sum() == doctest::Approx(s.r_comm_total));
  }
}

TEST_CASE("iteration cap reports max_iters and still conserves the budget") {
  const auto s = builtin_table1();
  StageConfig c = comm_config(s.r_comm_total);
  c.max_iters = 2;
  const auto out = run_stage(s, c, VectorXd::Zero(static_cast<Eigen::Index>(s.ues.size())));
  CHECK(out.trace.stop_reason == StopReason::MaxIters);
  CHECK(out.trace.iterations() == 2);
  CHECK(out.rates.sum() == doctest::Approx(s.r_comm_total).epsilon(1e-9));
  CHECK(std::string(to_string(out.trace.stop_reason)) == "max_iters");
}

TEST_CASE("stage configuration errors") {
  const auto s = builtin_table1();
  const VectorXd zeros = VectorXd::Zero(static_cast<Eigen::Index>(s.ues.size()));
  StageConfig c = comm_config(100.0);

  c.delta = 0.0;
  CHECK_THROWS_AS(run_stage(s, c, zeros), DomainError);
  c = comm_config(100.0);
  c.max_iters = 0;
  CHECK_THROWS_AS(run_stage(s, c, zeros), DomainError);
  c = comm_config(-1.0);
  CHECK_THROWS_AS(run_stage(s, c, zeros), DomainError);
  c = comm_config(100.0);
  c.initial_bid = 0.0;
  CHECK_THROWS_AS(run_stage(s, c, zeros), DomainError);
  CHECK_THROWS_AS(run_stage(s, comm_config(100.0), VectorXd::Zero(3)), DomainError);
  CHECK_THROWS_AS(run_two_stage(s, comm_config(1.0), comm_config(1.0)), DomainError);
}

TEST_CASE("every sector masked in the radar stage") {
  auto s = test::small_scenario({{1, LogParams(1.0, 100.0)}}, 1, {true});
  StageConfig c;
  c.budget = 10.0;
  CHECK_THROWS_AS(run_stage(s, c, VectorXd::Zero(1)), NoEligibleGroup);
}
