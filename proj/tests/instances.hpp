#pragma once

// Instance generators for property and acceptance tests.

#include "fixtures.hpp"
#include "sced/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sced::testing {

// Random desk-scale instance: at most 3 buses, 2 storages, 4 slots. Feasible
// by construction (limits are set around a chosen idle-storage dispatch) and
// every storage satisfies f' < g'(p) for all p >= 0.
inline NetworkCase random_micro(std::mt19937& rng) {
  const auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  NetworkCase c;
  c.name = "micro";
  const int nb = pick(1, 3);
  for (int b = 1; b <= nb; ++b) c.buses.push_back(b);
  c.reference_bus = pick(1, nb);
  c.horizon = pick(1, 4);
  c.delta_t = pick(0, 1) ? 1.0 : 0.5;
  const int T = c.horizon;
  const auto Ts = static_cast<std::size_t>(T);

  if (nb >= 2) c.lines.push_back(make_line("L12", 1, 2, 0.0, uni(0.5, 1.5)));
  if (nb == 3) {
    c.lines.push_back(make_line("L23", 2, 3, 0.0, uni(0.5, 1.5)));
    if (pick(0, 1)) c.lines.push_back(make_line("L13", 1, 3, 0.0, uni(0.5, 1.5)));
  }

  c.demand.assign(static_cast<std::size_t>(nb), std::vector<double>(Ts, 0.0));
  for (auto& row : c.demand)
    for (auto& d : row) d = uni(0.0, 30.0);

  // Generators with a chosen feasible dispatch that covers the demand.
  const int ng = pick(1, 3);
  std::vector<std::vector<double>> share(static_cast<std::size_t>(ng), std::vector<double>(Ts));
  for (int t = 0; t < T; ++t) {
    double sum = 0.0;
    for (auto& s : share) sum += (s[static_cast<std::size_t>(t)] = uni(0.1, 1.0));
    for (auto& s : share) s[static_cast<std::size_t>(t)] *= c.total_demand(t) / sum;
  }
  for (int g = 0; g < ng; ++g) {
    const auto& p = share[static_cast<std::size_t>(g)];
    auto gen = make_generator("G" + std::to_string(g + 1), pick(1, nb), 0.0, pick(0, 2) ? uni(0.0, 0.3) : 0.0,
                              uni(-5.0, 20.0));
    gen.p_min = std::max(0.0, *std::min_element(p.begin(), p.end()) - uni(0.0, 10.0));
    gen.p_max = *std::max_element(p.begin(), p.end()) + uni(0.5, 30.0);
    double ramp = 0.0;
    for (int t = 0; t + 1 < T; ++t) ramp = std::max(ramp, std::abs(p[t + 1] - p[t]) / c.delta_t);
    gen.ramp_up_rate = ramp * uni(1.0, 2.0) + uni(0.5, 20.0);
    gen.ramp_down_rate = -(ramp * uni(1.0, 2.0) + uni(0.5, 20.0));
    c.generators.push_back(gen);
  }

  // Line limits around the flows of the chosen dispatch.
  if (!c.lines.empty()) {
    auto probe = c;
    for (auto& l : probe.lines) {
      l.flow_min = -1e9;
      l.flow_max = 1e9;
    }
    const auto gsf = compute_gsf(probe);
    for (std::size_t j = 0; j < c.lines.size(); ++j) {
      double worst = 0.0;
      for (int t = 0; t < T; ++t) {
        double flow = 0.0;
        for (std::size_t b = 0; b < c.buses.size(); ++b) {
          double inj = -c.demand[b][static_cast<std::size_t>(t)];
          for (int g = 0; g < ng; ++g)
            if (c.bus_position(c.generators[static_cast<std::size_t>(g)].bus) == b)
              inj += share[static_cast<std::size_t>(g)][static_cast<std::size_t>(t)];
          flow += gsf(j, b) * inj;
        }
        worst = std::max(worst, std::abs(flow));
      }
      const double limit = worst * uni(1.0, 1.6) + uni(0.5, 5.0);
      c.lines[j].flow_min = -limit;
      c.lines[j].flow_max = limit;
    }
  }

  // Storages, idle in the chosen dispatch.
  std::vector<BusId> free_buses = c.buses;
  std::shuffle(free_buses.begin(), free_buses.end(), rng);
  const int ns = std::min(pick(0, 2), nb);
  for (int s = 0; s < ns; ++s) {
    auto st = make_storage("S" + std::to_string(s + 1), free_buses[static_cast<std::size_t>(s)]);
    st.eta_c = uni(0.8, 0.98);
    st.eta_d = uni(0.8, 0.98);
    st.self_discharge = pick(0, 1) ? uni(0.0, 0.05) : 0.0;
    st.charge_max = uni(1.0, 8.0);
    st.discharge_max = uni(1.0, 8.0);
    st.energy_max = uni(1.0, 8.0);
    st.energy_initial = uni(0.0, st.energy_max);
    st.energy_min = std::pow(1.0 - st.self_discharge, T) * st.energy_initial * uni(0.0, 0.8);
    st.charge_fee_rate = uni(-2.0, 3.0);
    st.discharge_cost_linear = st.charge_fee_rate + uni(0.1, 3.0);
    st.discharge_cost_quadratic = pick(0, 2) ? 0.0 : uni(0.0, 0.3);
    c.storages.push_back(st);
  }
  validate(c);
  return c;
}

// One bus whose price is pinned by a linear-cost generator: LMP = lmp in
// every slot as long as that generator stays between its limits. One storage
// with prices (1.5, 2.5) and eta_c = eta_d = 0.9.
inline NetworkCase pinned_price_case(double lmp, double energy_max, int T = 3, double delta_t = 1.0) {
  NetworkCase c;
  c.name = "pinned";
  c.buses = {1};
  c.reference_bus = 1;
  c.horizon = T;
  c.delta_t = delta_t;
  c.generators = {make_generator("G1", 1, 500.0, 0.0, lmp)};
  auto s = make_storage("S1", 1);
  s.energy_max = energy_max;
  c.storages = {s};
  c.demand = {std::vector<double>(static_cast<std::size_t>(T), 50.0)};
  return c;
}

}  // namespace sced::testing
