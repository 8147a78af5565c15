#pragma once

// Small hand-built cases shared by the test binaries.

#include "sced/network.hpp"

#include <string>
#include <vector>

namespace sced::testing {

inline Generator make_generator(std::string id, BusId bus, double p_max, double a, double b,
                                double p_min = 0.0) {
  Generator g;
  g.id = std::move(id);
  g.bus = bus;
  g.p_min = p_min;
  g.p_max = p_max;
  g.ramp_down_rate = -1e4;
  g.ramp_up_rate = 1e4;
  g.cost_quadratic = a;
  g.cost_linear = b;
  return g;
}

inline Storage make_storage(std::string id, BusId bus) {
  Storage s;
  s.id = std::move(id);
  s.bus = bus;
  s.charge_max = 2.0;
  s.discharge_max = 2.0;
  s.energy_min = 0.0;
  s.energy_max = 2.0;
  s.energy_initial = 1.0;
  s.eta_c = 0.9;
  s.eta_d = 0.9;
  s.charge_fee_rate = 1.5;
  s.discharge_cost_linear = 2.5;
  return s;
}

inline Line make_line(std::string id, BusId from, BusId to, double limit, double x = 1.0) {
  return {std::move(id), from, to, x, -limit, limit};
}

// One bus, h(p) = 0.5 p^2 + 2 p, demand 10.
inline NetworkCase one_bus() {
  NetworkCase c;
  c.name = "one-bus";
  c.buses = {1};
  c.reference_bus = 1;
  c.generators = {make_generator("G1", 1, 100.0, 0.5, 2.0)};
  c.demand = {{10.0}};
  return c;
}

// Cheap generator at bus 1 ($10), expensive at bus 2 ($30), demand 100 at
// bus 2 over a 60 MW line.
inline NetworkCase two_bus_congested() {
  NetworkCase c;
  c.name = "two-bus";
  c.buses = {1, 2};
  c.reference_bus = 2;
  c.lines = {make_line("L12", 1, 2, 60.0)};
  c.generators = {make_generator("G1", 1, 200.0, 0.0, 10.0), make_generator("G2", 2, 200.0, 0.0, 30.0)};
  c.demand = {{0.0}, {100.0}};
  return c;
}

// Ring 1-2-3 with unit reactances, reference bus 3.
inline NetworkCase three_bus_ring() {
  NetworkCase c;
  c.name = "three-bus";
  c.buses = {1, 2, 3};
  c.reference_bus = 3;
  c.lines = {make_line("L12", 1, 2, 100.0), make_line("L13", 1, 3, 100.0), make_line("L23", 2, 3, 100.0)};
  c.generators = {make_generator("G1", 1, 200.0, 0.01, 5.0)};
  c.demand = {{0.0}, {20.0}, {30.0}};
  return c;
}

// One bus, one generator, one storage, T = 2.
inline NetworkCase one_storage_two_slots() {
  NetworkCase c;
  c.name = "one-storage";
  c.buses = {1};
  c.reference_bus = 1;
  c.horizon = 2;
  c.delta_t = 0.5;
  c.generators = {make_generator("G1", 1, 100.0, 0.05, 1.0)};
  auto s = make_storage("S1", 1);
  s.self_discharge = 0.05;
  c.storages = {s};
  c.demand = {{5.0, 20.0}};
  return c;
}

}  // namespace sced::testing
