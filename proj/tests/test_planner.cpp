#include "fixtures.hpp"
#include "sced/planner.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sced;
using namespace sced::testing;

namespace {

NetworkCase planning_case(int T, double delta_t, double energy_max) {
  NetworkCase c;
  c.buses = {1};
  c.reference_bus = 1;
  c.horizon = T;
  c.delta_t = delta_t;
  c.generators = {make_generator("G1", 1, 100.0, 0.0, 2.0)};
  auto s = make_storage("S1", 1);
  s.energy_max = energy_max;
  c.storages = {s};
  c.demand = {std::vector<double>(static_cast<std::size_t>(T), 10.0)};
  return c;
}

LmpForecast uniform(const NetworkCase& c, double price) {
  LmpForecast f;
  f.source = "uniform";
  f.values[1] = std::vector<double>(static_cast<std::size_t>(c.horizon), price);
  return f;
}

}  // namespace

TEST(EstimateCapacity, ChargingRunAccumulates) {
  auto c = planning_case(6, 0.5, 100.0);
  auto& s = c.storages[0];
  s.charge_max = 10.0;
  s.energy_initial = 2.0;
  LmpForecast f;
  f.values[1] = {1.0, 1.0, 1.0, 1.0, 2.0, 2.0};  // below f' = 1.5 for four slots
  const auto e = estimate_capacity(c, f);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_NEAR(e[0].needed_capacity, 20.0, 1e-12);
  EXPECT_EQ(e[0].peak_time, 4);
  EXPECT_TRUE(e[0].sufficient);
}

TEST(EstimateCapacity, DeadBandIdles) {
  const auto c = planning_case(4, 1.0, 2.0);
  const auto e = estimate_capacity(c, uniform(c, 2.0));
  EXPECT_EQ(e[0].needed_capacity, c.storages[0].energy_initial);
  EXPECT_EQ(e[0].peak_time, 0);
  for (double s : e[0].trajectory) EXPECT_EQ(s, c.storages[0].energy_initial);
}

TEST(EstimateCapacity, EmptyStorageCannotDischarge) {
  auto c = planning_case(4, 1.0, 2.0);
  c.storages[0].energy_min = 0.5;
  c.storages[0].energy_initial = 0.5;
  const auto e = estimate_capacity(c, uniform(c, 10.0));
  EXPECT_EQ(e[0].needed_capacity, 0.5);
  for (double s : e[0].trajectory) EXPECT_EQ(s, 0.5);
}

TEST(EstimateCapacity, TrajectoryRespectsEnergyMinimum) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> price(-5.0, 6.0), u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    auto c = planning_case(12, 0.5, 50.0);
    auto& s = c.storages[0];
    s.self_discharge = 0.05 * u(rng);
    s.energy_min = 0.5 * u(rng);
    s.energy_initial = s.energy_min + 3.0 * u(rng);
    s.discharge_max = 1.0 + 5.0 * u(rng);
    LmpForecast f;
    for (int t = 0; t < 12; ++t) f.values[1].push_back(price(rng));
    const auto est = estimate_capacity(c, f);
    for (double e : est[0].trajectory) EXPECT_GE(e, s.energy_min - 1e-12);
  }
}

TEST(EstimateCapacity, LoweringAPriceNeverReducesNeed) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> price(-5.0, 6.0), u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    auto c = planning_case(10, 0.5, 50.0);
    c.storages[0].self_discharge = 0.05 * u(rng);
    LmpForecast f;
    for (int t = 0; t < 10; ++t) f.values[1].push_back(price(rng));
    const double before = estimate_capacity(c, f)[0].needed_capacity;
    f.values[1][rng() % 10] = c.storages[0].charge_fee_rate - 1.0 - u(rng);
    EXPECT_GE(estimate_capacity(c, f)[0].needed_capacity, before - 1e-12);
  }
}

TEST(AprioriCheck, HighForecastPassesAtFirstStep) {
  const auto c = planning_case(4, 0.5, 2.0);
  const auto r = a_priori_check(c, uniform(c, 2.0));
  EXPECT_EQ(r.verdict, PlannerVerdict::PredictedExact);
  EXPECT_EQ(r.decided_at_step, 1);
  EXPECT_TRUE(r.violations.empty());
}

TEST(AprioriCheck, LargeCapacityPassesAtThirdStep) {
  const auto c = planning_case(4, 0.5, 10.0);
  const auto r = a_priori_check(c, uniform(c, -3.0));
  EXPECT_EQ(r.verdict, PlannerVerdict::PredictedExact);
  EXPECT_EQ(r.decided_at_step, 3);
  EXPECT_EQ(r.violations.size(), 4u);
  EXPECT_NEAR(r.estimates[0].needed_capacity, 1.0 + 4 * 0.9 * 2.0 * 0.5, 1e-12);
}

TEST(AprioriCheck, SmallCapacityIsUnknown) {
  const auto c = planning_case(4, 0.5, 2.0);
  const auto r = a_priori_check(c, uniform(c, -3.0));
  EXPECT_EQ(r.verdict, PlannerVerdict::Unknown);
  EXPECT_FALSE(r.estimates[0].sufficient);
}

TEST(AprioriCheck, QuadraticDischargeUsesSmallestMarginal) {
  auto c = planning_case(2, 1.0, 2.0);
  c.storages[0].discharge_cost_quadratic = 0.5;
  const auto r = a_priori_check(c, uniform(c, 2.0));
  EXPECT_NEAR(r.bound[0][0], cond1_bound(1.5, 2.5, 0.9, 0.9), 1e-12);
}

TEST(AprioriCheck, IncompleteForecastRejected) {
  const auto c = planning_case(4, 0.5, 2.0);
  LmpForecast f;
  f.values[1] = {2.0, 2.0};
  EXPECT_THROW(a_priori_check(c, f), CaseError);
  EXPECT_THROW(a_priori_check(c, LmpForecast{}), CaseError);
}

TEST(ForecastCsv, ParsesBusRows) {
  const auto f = parse_forecast_csv("bus,t1,t2\n1,2.0,-3\n2,1,1\n", 2);
  EXPECT_EQ(f.values.size(), 2u);
  EXPECT_EQ(f.at(1, 1), -3.0);
}
