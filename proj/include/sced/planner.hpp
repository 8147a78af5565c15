#pragma once

// A-priori exactness check from forecast LMPs, run before the relaxation is
// solved:
//   1. evaluate the LMP bound at every storage bus and slot;
//   2. collect the (storage, slot) pairs that violate it;
//   3. estimate the energy capacity each violating storage could need and
//      compare it with the installed capacity.

#include "sced/case_io.hpp"
#include "sced/exactness.hpp"
#include "sced/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace sced {

struct LmpForecast {
  std::map<BusId, std::vector<double>> values;  // $/MWh per bus and slot
  std::string source;

  double at(BusId bus, int t) const { return values.at(bus)[static_cast<std::size_t>(t)]; }
};

// Throws CaseError when a storage bus or slot is missing.
inline void check_coverage(const NetworkCase& c, const LmpForecast& f) {
  for (const auto& st : c.storages) {
    auto it = f.values.find(st.bus);
    if (it == f.values.end())
      throw CaseError("forecast." + std::to_string(st.bus), "no forecast for storage bus");
    if (it->second.size() != static_cast<std::size_t>(c.horizon))
      throw CaseError("forecast." + std::to_string(st.bus), "forecast does not cover the horizon");
  }
}

inline LmpForecast parse_forecast_csv(std::string_view text, int horizon, std::string source = "csv") {
  return {parse_bus_series_csv(text, horizon), std::move(source)};
}

inline LmpForecast forecast_from(const NetworkCase& c, const BusSeries& lmp, std::string source) {
  LmpForecast f;
  f.source = std::move(source);
  for (std::size_t b = 0; b < c.buses.size(); ++b) f.values[c.buses[b]] = lmp[b];
  return f;
}

struct CapacityEstimate {
  std::string storage_id;
  double needed_capacity = 0.0;  // MWh
  int peak_time = 0;             // slot of the peak, 0 = initial energy
  std::vector<double> trajectory;  // s(1..T)
  bool sufficient = false;       // energy_max strictly above the need
};

// Simulates the threshold policy: charge at full rate below f', discharge as
// far as energy_min allows above g'(0), idle otherwise. Charging is not
// clamped at energy_max, the peak is the capacity the policy would use.
inline std::vector<CapacityEstimate> estimate_capacity(const NetworkCase& c, const LmpForecast& f) {
  check_coverage(c, f);
  std::vector<CapacityEstimate> out;
  const double dt = c.delta_t;
  for (const auto& st : c.storages) {
    CapacityEstimate e;
    e.storage_id = st.id;
    const double keep = 1.0 - st.self_discharge;
    const double g0 = st.discharge_marginal(0.0);
    double energy = st.energy_initial;
    e.needed_capacity = energy;
    for (int t = 0; t < c.horizon; ++t) {
      const double price = f.at(st.bus, t);
      const double carried = keep * energy;
      if (price < st.charge_fee_rate) {
        energy = carried + st.eta_c * st.charge_max * dt;
      } else if (price > g0) {
        const double drop = std::min(st.discharge_max * dt / st.eta_d, std::max(0.0, carried - st.energy_min));
        energy = carried - drop;
      } else {
        energy = carried;
      }
      // Self-discharge cannot take a feasible dispatch below energy_min.
      energy = std::max(energy, st.energy_min);
      e.trajectory.push_back(energy);
      if (energy > e.needed_capacity) {
        e.needed_capacity = energy;
        e.peak_time = t + 1;
      }
    }
    e.sufficient = st.energy_max - e.needed_capacity > strict_margin(st.energy_max);
    out.push_back(std::move(e));
  }
  return out;
}

enum class PlannerVerdict { PredictedExact, Unknown };

inline const char* to_string(PlannerVerdict v) {
  return v == PlannerVerdict::PredictedExact ? "PredictedExact" : "Unknown";
}

struct PlannerReport {
  PlannerVerdict verdict = PlannerVerdict::Unknown;
  int decided_at_step = 1;  // 1: bound check, 3: capacity estimate
  std::vector<std::vector<double>> bound;  // [storage][t], g' at its smallest value
  std::vector<StorageSlot> violations;
  std::vector<CapacityEstimate> estimates;
  std::vector<int> violating_storages;
  bool assumption1_ok = true;  // f' < g'(0) on every violating storage
};

inline PlannerReport a_priori_check(const NetworkCase& c, const LmpForecast& f) {
  check_coverage(c, f);
  PlannerReport r;
  for (std::size_t s = 0; s < c.storages.size(); ++s) {
    const auto& st = c.storages[s];
    r.bound.emplace_back();
    // g' is smallest at zero discharge, which gives the largest bound.
    const double bound = cond1_bound(st.charge_fee_rate, st.discharge_marginal(0.0), st.eta_c, st.eta_d);
    for (int t = 0; t < c.horizon; ++t) {
      r.bound[s].push_back(bound);
      if (!(f.at(st.bus, t) - bound > strict_margin(bound))) r.violations.push_back({static_cast<int>(s), t});
    }
  }
  if (r.violations.empty()) {
    r.verdict = PlannerVerdict::PredictedExact;
    r.decided_at_step = 1;
    return r;
  }

  r.decided_at_step = 3;
  for (const auto& v : r.violations)
    if (r.violating_storages.empty() || r.violating_storages.back() != v.storage)
      r.violating_storages.push_back(v.storage);
  r.estimates = estimate_capacity(c, f);
  bool all_sufficient = true;
  for (int s : r.violating_storages) {
    const auto& st = c.storages[static_cast<std::size_t>(s)];
    if (!(st.charge_fee_rate < st.discharge_marginal(0.0))) r.assumption1_ok = false;
    if (!r.estimates[static_cast<std::size_t>(s)].sufficient) all_sufficient = false;
  }
  r.verdict = (all_sufficient && r.assumption1_ok) ? PlannerVerdict::PredictedExact : PlannerVerdict::Unknown;
  return r;
}

}  // namespace sced
