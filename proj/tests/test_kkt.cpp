#include "fixtures.hpp"
#include "sced/kkt.hpp"

#include <gtest/gtest.h>

using namespace sced;
using namespace sced::testing;

namespace {

NetworkCase storage_ring() {
  auto c = three_bus_ring();
  c.horizon = 4;
  c.delta_t = 0.5;
  c.lines[1].flow_min = -30.0;
  c.lines[1].flow_max = 30.0;
  c.generators.push_back(make_generator("G2", 2, 60.0, 0.2, 8.0));
  c.demand = {{0, 0, 0, 0}, {10, 30, 45, 20}, {20, 35, 50, 15}};
  auto s1 = make_storage("S1", 3);
  s1.self_discharge = 0.02;
  s1.discharge_cost_quadratic = 0.1;
  auto s2 = make_storage("S2", 2);
  s2.energy_max = 1.2;
  c.storages = {s1, s2};
  return c;
}

}  // namespace

TEST(KktResidual, OptimalSolutionsAreStationary) {
  for (const auto& c : {one_bus(), two_bus_congested(), one_storage_two_slots(), storage_ring()}) {
    const auto gsf = compute_gsf(c);
    const auto p = build_rp(c, gsf);
    const auto sol = solve_qp(p);
    ASSERT_TRUE(sol.optimal()) << c.name;
    const auto r = kkt_residual(p, sol, c, gsf);
    EXPECT_LE(r.max(), 1e-6) << c.name;
  }
}

TEST(KktResidual, ModeRestrictedProblemsIncludeFixingDuals) {
  const auto c = storage_ring();
  const auto gsf = compute_gsf(c);
  ModeMap m = ModeMap::uniform(2, 4, StorageMode::Charge);
  m.set(0, 2, StorageMode::Discharge);
  m.set(1, 3, StorageMode::Discharge);
  for (auto fixing : {ModeFixing::EqualityRow, ModeFixing::Eliminate}) {
    const auto p = build_problem(c, gsf, m, fixing);
    const auto sol = solve_qp(p);
    ASSERT_TRUE(sol.optimal());
    EXPECT_LE(kkt_residual(p, sol, c, gsf).max(), 1e-6);
  }
}

TEST(KktResidual, PerturbedChargeDualShowsInStationarity) {
  const auto c = one_storage_two_slots();
  const auto gsf = compute_gsf(c);
  const auto p = build_rp(c, gsf);
  auto sol = solve_qp(p);
  ASSERT_TRUE(sol.optimal());
  sol.duals[{MultiplierName::Alpha2, 0, 1}] += 0.1;
  const auto r = kkt_residual(p, sol, c, gsf);
  EXPECT_NEAR(r.charge_stationarity, 0.1, 1e-6);
  EXPECT_LE(r.discharge_stationarity, 1e-6);
}

TEST(KktResidual, NoStorageMeansEmptyGamma) {
  const auto c = two_bus_congested();
  const auto gsf = compute_gsf(c);
  const auto p = build_rp(c, gsf);
  const auto sol = solve_qp(p);
  const auto r = kkt_residual(p, sol, c, gsf);
  EXPECT_TRUE(r.gamma.empty());
  EXPECT_EQ(r.charge_stationarity, 0.0);
  EXPECT_EQ(r.discharge_stationarity, 0.0);
}

TEST(KktResidual, GammaAccumulatesDiscountedEnergyDuals) {
  const auto c = storage_ring();
  const auto sol = solve_qp(build_rp(c, compute_gsf(c)));
  const auto gamma = gamma_series(c, sol);
  for (std::size_t s = 0; s < c.storages.size(); ++s) {
    const double keep = 1.0 - c.storages[s].self_discharge;
    for (int t = 0; t < c.horizon; ++t) {
      double expected = 0.0;
      for (int tau = t; tau < c.horizon; ++tau)
        expected += std::pow(keep, tau - t) * (sol.dual(MultiplierName::Beta1, static_cast<int>(s), tau) -
                                               sol.dual(MultiplierName::Beta2, static_cast<int>(s), tau));
      EXPECT_NEAR(gamma[s][static_cast<std::size_t>(t)], expected, 1e-12 * (1 + std::abs(expected)));
    }
  }
}
