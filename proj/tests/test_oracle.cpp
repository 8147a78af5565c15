#include "instances.hpp"
#include "sced/oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sced;
using namespace sced::testing;

TEST(Oracle, NoStorageEqualsRelaxation) {
  for (const auto& c : {one_bus(), two_bus_congested(), three_bus_ring()}) {
    const auto gsf = compute_gsf(c);
    const auto rp = solve_qp(build_rp(c, gsf));
    const auto op = solve_op_exact(c, gsf);
    ASSERT_TRUE(op.complete());
    EXPECT_EQ(op.optimum, rp.objective);
    EXPECT_EQ(op.gap_to_rp, 0.0);
    const auto v = verify_exactness(c, gsf, rp, op);
    EXPECT_TRUE(v.exact);
    EXPECT_EQ(v.relative_gap, 0.0);
  }
}

TEST(Oracle, MatchesFourModeBruteForce) {
  auto c = pinned_price_case(-3.0, 2.0, 2);
  const auto gsf = compute_gsf(c);
  // Independent path: equality-row restriction, one QP per mode map.
  double best = std::numeric_limits<double>::infinity();
  for (int code = 0; code < 4; ++code) {
    ModeMap m(1, 2);
    for (int t = 0; t < 2; ++t) m.set(0, t, (code >> t) & 1 ? StorageMode::Discharge : StorageMode::Charge);
    const auto sol = solve_qp(build_mode_restricted(c, gsf, m));
    if (sol.optimal()) best = std::min(best, sol.objective);
  }
  const auto op = solve_op_exact(c, gsf);
  ASSERT_TRUE(op.complete());
  EXPECT_NEAR(op.optimum, best, 1e-7 * (1 + std::abs(best)));
  for (int t = 0; t < 2; ++t) EXPECT_EQ(op.schedule.charge[0][t] * op.schedule.discharge[0][t], 0.0);
}

TEST(Oracle, EnumerationEquivalenceOnRandomInstances) {
  std::mt19937 rng(2024);
  int checked = 0;
  for (int k = 0; k < 60; ++k) {
    const auto c = random_micro(rng);
    if (c.storages.empty() || c.storages.size() * static_cast<std::size_t>(c.horizon) > 8) continue;
    const auto gsf = compute_gsf(c);
    const auto best_first = solve_op_exact(c, gsf);
    const auto exhaustive = solve_op_exhaustive(c, gsf);
    ASSERT_EQ(best_first.status, exhaustive.status) << k;
    if (!exhaustive.complete()) continue;
    EXPECT_NEAR(best_first.optimum, exhaustive.optimum, 1e-6 * (1 + std::abs(exhaustive.optimum))) << k;
    EXPECT_GE(best_first.gap_to_rp, -1e-6 * (1 + std::abs(best_first.optimum))) << k;
    EXPECT_EQ(best_first.bound_violations, 0) << k;
    ++checked;
  }
  EXPECT_GE(checked, 15);
}

TEST(Oracle, ParallelSearchIsDeterministic) {
  std::mt19937 rng(99);
  for (int k = 0; k < 10; ++k) {
    const auto c = random_micro(rng);
    const auto gsf = compute_gsf(c);
    OracleSettings serial, parallel;
    parallel.threads = 4;
    const auto a = solve_op_exact(c, gsf, serial);
    const auto b = solve_op_exact(c, gsf, parallel);
    ASSERT_EQ(a.status, b.status);
    if (a.complete()) EXPECT_NEAR(a.optimum, b.optimum, 1e-9 * (1 + std::abs(a.optimum)));
  }
}

TEST(Oracle, RefusesOversizedInstances) {
  auto c = pinned_price_case(2.0, 2.0, 25);
  EXPECT_THROW(solve_op_exact(c, compute_gsf(c)), OracleTooLarge);
  OracleSettings wide;
  wide.node_budget = std::uint64_t{1} << 26;
  EXPECT_NO_THROW(solve_op_exact(c, compute_gsf(c), wide));
}

TEST(Oracle, GuardSuggestsReduction) {
  auto c = pinned_price_case(2.0, 2.0, 48);
  try {
    solve_op_exact(c, compute_gsf(c));
    FAIL() << "expected OracleTooLarge";
  } catch (const OracleTooLarge& e) {
    EXPECT_NE(std::string(e.what()).find("shorten the horizon"), std::string::npos);
  }
}

TEST(VerifyExactness, HighPriceInstanceIsExact) {
  const auto c = pinned_price_case(2.0, 2.0, 3);
  const auto gsf = compute_gsf(c);
  const auto rp = solve_qp(build_rp(c, gsf));
  ASSERT_TRUE(check_cond1(c, rp, gsf).empty());
  const auto v = verify_exactness(c, gsf, rp, solve_op_exact(c, gsf));
  EXPECT_TRUE(v.exact);
  EXPECT_LE(v.complementarity, 1e-7);
}

TEST(VerifyExactness, NegativePriceWithTightCapacityIsNotExact) {
  const auto c = pinned_price_case(-3.0, 2.0, 3);
  const auto gsf = compute_gsf(c);
  const auto rp = solve_qp(build_rp(c, gsf));
  const auto op = solve_op_exact(c, gsf);
  const auto v = verify_exactness(c, gsf, rp, op);
  EXPECT_FALSE(v.exact);
  EXPECT_GT(op.gap_to_rp, 1e-6);
  EXPECT_GT(v.complementarity, 1e-4);
}

TEST(VerifyExactness, NegativePriceAboveBoundIsExact) {
  // LMP -1 lies above the bound -2.76: exact even though the price is negative.
  const auto c = pinned_price_case(-1.0, 2.0, 3);
  const auto gsf = compute_gsf(c);
  const auto rp = solve_qp(build_rp(c, gsf));
  const auto lmp = lmp_all(rp, gsf);
  EXPECT_NEAR(lmp[0][0], -1.0, 1e-6);
  EXPECT_TRUE(check_cond1(c, rp, gsf).empty());
  EXPECT_TRUE(verify_exactness(c, gsf, rp, solve_op_exact(c, gsf)).exact);
}

TEST(VerifyExactness, RejectsIncompleteOracle) {
  const auto c = one_bus();
  const auto gsf = compute_gsf(c);
  OracleResult r;
  r.status = OracleStatus::Incomplete;
  EXPECT_THROW(verify_exactness(c, gsf, solve_qp(build_rp(c, gsf)), r), std::invalid_argument);
}
