#pragma once

// Assembly of the relaxed dispatch problem (complementarity dropped) and of
// its mode-restricted variants.

#include "sced/network.hpp"
#include "sced/qp.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace sced {

enum class StorageMode { Charge, Discharge };

// Assignment of a mode to some or all (storage, slot) pairs.
class ModeMap {
 public:
  ModeMap() = default;
  ModeMap(int num_storages, int horizon)
      : horizon_(horizon),
        modes_(static_cast<std::size_t>(num_storages) * static_cast<std::size_t>(horizon)) {}

  static ModeMap uniform(int num_storages, int horizon, StorageMode m) {
    ModeMap map(num_storages, horizon);
    for (auto& v : map.modes_) v = m;
    return map;
  }

  std::optional<StorageMode> get(int storage, int t) const { return modes_[pos(storage, t)]; }
  void set(int storage, int t, StorageMode m) { modes_[pos(storage, t)] = m; }
  void clear(int storage, int t) { modes_[pos(storage, t)].reset(); }
  bool complete() const {
    for (const auto& m : modes_)
      if (!m) return false;
    return true;
  }
  std::size_t fixed_count() const {
    std::size_t n = 0;
    for (const auto& m : modes_) n += m.has_value();
    return n;
  }
  int num_storages() const { return horizon_ == 0 ? 0 : static_cast<int>(modes_.size()) / horizon_; }
  int horizon() const { return horizon_; }
  bool operator==(const ModeMap&) const = default;

 private:
  std::size_t pos(int storage, int t) const {
    return static_cast<std::size_t>(storage) * static_cast<std::size_t>(horizon_) +
           static_cast<std::size_t>(t);
  }
  int horizon_ = 0;
  std::vector<std::optional<StorageMode>> modes_;
};

// How a fixed mode is imposed on the opposite variable.
enum class ModeFixing { EqualityRow, Eliminate };

namespace detail {

inline std::string slot_name(const char* prefix, long id, int t) {
  return std::string(prefix) + "[" + std::to_string(id) + "," + std::to_string(t + 1) + "]";
}

}  // namespace detail

// Relaxed problem with the given (possibly partial) mode restrictions.
inline QpProblem build_problem(const NetworkCase& c, const GsfMatrix& gsf, const ModeMap& modes,
                               ModeFixing fixing) {
  validate(c);
  if (gsf.num_lines() != c.lines.size() || gsf.num_buses() != c.buses.size())
    throw std::invalid_argument("build_problem: GSF matrix does not match the case");
  const int T = c.horizon;
  const int ns = static_cast<int>(c.storages.size());
  const int ng = static_cast<int>(c.generators.size());
  const double dt = c.delta_t;
  const bool restricted = modes.horizon() != 0;
  if (restricted && (modes.horizon() != T || modes.num_storages() != ns))
    throw std::invalid_argument("build_problem: mode map shape does not match the case");

  const auto mode_of = [&](int s, int t) -> std::optional<StorageMode> {
    return restricted ? modes.get(s, t) : std::nullopt;
  };
  const auto eliminated = [&](VarKind kind, int s, int t) {
    if (fixing != ModeFixing::Eliminate) return false;
    const auto m = mode_of(s, t);
    if (!m) return false;
    return (kind == VarKind::Charge && *m == StorageMode::Discharge) ||
           (kind == VarKind::Discharge && *m == StorageMode::Charge);
  };

  VariableIndex index(ns, ng, T);
  std::vector<std::string> names;
  for (int s = 0; s < ns; ++s)
    for (int t = 0; t < T; ++t)
      if (!eliminated(VarKind::Charge, s, t)) {
        index.add({VarKind::Charge, s, t});
        names.push_back(detail::slot_name("pc", c.storages[s].bus, t));
      }
  for (int s = 0; s < ns; ++s)
    for (int t = 0; t < T; ++t)
      if (!eliminated(VarKind::Discharge, s, t)) {
        index.add({VarKind::Discharge, s, t});
        names.push_back(detail::slot_name("pd", c.storages[s].bus, t));
      }
  for (int g = 0; g < ng; ++g)
    for (int t = 0; t < T; ++t) {
      index.add({VarKind::Generation, g, t});
      names.push_back("pg[" + c.generators[g].id + "," + std::to_string(t + 1) + "]");
    }

  QpProblem p = QpProblem::with_vars(index.size());
  p.var_index = std::move(index);
  p.var_names = std::move(names);
  p.dual_scale = 1.0 / dt;
  const auto& vi = p.var_index;

  const auto ineq = [&](LinearRow row) { p.inequalities.push_back(std::move(row)); };

  // Storage bounds, costs, and mode rows.
  for (int s = 0; s < ns; ++s) {
    const auto& st = c.storages[s];
    const auto sid = static_cast<long>(st.bus);
    for (int t = 0; t < T; ++t) {
      if (int k = vi.find({VarKind::Charge, s, t}); k >= 0) {
        p.linear[k] += -st.charge_fee_rate * dt;
        ineq({{k}, {-1.0}, 0.0, {MultiplierName::Alpha1, s, t}, detail::slot_name("a1", sid, t)});
        ineq({{k}, {1.0}, st.charge_max, {MultiplierName::Alpha2, s, t}, detail::slot_name("a2", sid, t)});
      }
      if (int k = vi.find({VarKind::Discharge, s, t}); k >= 0) {
        p.quadratic(k, k) += st.discharge_cost_quadratic * dt;
        p.linear[k] += st.discharge_cost_linear * dt;
        ineq({{k}, {-1.0}, 0.0, {MultiplierName::Alpha3, s, t}, detail::slot_name("a3", sid, t)});
        ineq({{k}, {1.0}, st.discharge_max, {MultiplierName::Alpha4, s, t}, detail::slot_name("a4", sid, t)});
      }
      if (fixing == ModeFixing::EqualityRow) {
        if (const auto m = mode_of(s, t)) {
          const VarKind off = *m == StorageMode::Charge ? VarKind::Discharge : VarKind::Charge;
          p.equalities.push_back({{vi.find({off, s, t})}, {1.0}, 0.0,
                                  {MultiplierName::ModeFix, s, t}, detail::slot_name("fix", sid, t)});
        }
      }
    }
  }

  // Generator bounds, costs, ramps.
  for (int g = 0; g < ng; ++g) {
    const auto& gen = c.generators[g];
    for (int t = 0; t < T; ++t) {
      const int k = vi.find({VarKind::Generation, g, t});
      p.quadratic(k, k) += gen.cost_quadratic * dt;
      p.linear[k] += gen.cost_linear * dt;
      p.constant += gen.cost_constant * dt;
      ineq({{k}, {-1.0}, -gen.p_min, {}, "gmin[" + gen.id + "," + std::to_string(t + 1) + "]"});
      ineq({{k}, {1.0}, gen.p_max, {}, "gmax[" + gen.id + "," + std::to_string(t + 1) + "]"});
    }
    for (int t = 0; t + 1 < T; ++t) {
      const int now = vi.find({VarKind::Generation, g, t});
      const int next = vi.find({VarKind::Generation, g, t + 1});
      const auto tag = std::to_string(t + 1);
      ineq({{next, now}, {1.0, -1.0}, gen.ramp_up_rate * dt, {}, "rup[" + gen.id + "," + tag + "]"});
      ineq({{next, now}, {-1.0, 1.0}, -gen.ramp_down_rate * dt, {}, "rdn[" + gen.id + "," + tag + "]"});
    }
  }

  // Energy bounds with s(t) expanded into the charge/discharge history.
  for (int s = 0; s < ns; ++s) {
    const auto& st = c.storages[s];
    const double keep = 1.0 - st.self_discharge;
    const auto sid = static_cast<long>(st.bus);
    for (int t = 0; t < T; ++t) {
      LinearRow upper;
      for (int tau = 0; tau <= t; ++tau) {
        const double decay = std::pow(keep, t - tau) * dt;
        if (int k = vi.find({VarKind::Charge, s, tau}); k >= 0) {
          upper.cols.push_back(k);
          upper.vals.push_back(st.eta_c * decay);
        }
        if (int k = vi.find({VarKind::Discharge, s, tau}); k >= 0) {
          upper.cols.push_back(k);
          upper.vals.push_back(-decay / st.eta_d);
        }
      }
      const double carried = std::pow(keep, t + 1) * st.energy_initial;
      LinearRow lower = upper;
      for (auto& v : lower.vals) v = -v;
      lower.rhs = carried - st.energy_min;
      lower.tag = {MultiplierName::Beta1, s, t};
      lower.label = detail::slot_name("b1", sid, t);
      upper.rhs = st.energy_max - carried;
      upper.tag = {MultiplierName::Beta2, s, t};
      upper.label = detail::slot_name("b2", sid, t);
      ineq(std::move(lower));
      ineq(std::move(upper));
    }
  }

  // Power balance: sum(pg + pd - pc) = sum(D).
  for (int t = 0; t < T; ++t) {
    LinearRow row;
    for (int s = 0; s < ns; ++s) {
      if (int k = vi.find({VarKind::Charge, s, t}); k >= 0) {
        row.cols.push_back(k);
        row.vals.push_back(-1.0);
      }
      if (int k = vi.find({VarKind::Discharge, s, t}); k >= 0) {
        row.cols.push_back(k);
        row.vals.push_back(1.0);
      }
    }
    for (int g = 0; g < ng; ++g) {
      row.cols.push_back(vi.find({VarKind::Generation, g, t}));
      row.vals.push_back(1.0);
    }
    row.rhs = c.total_demand(t);
    row.tag = {MultiplierName::Lambda, -1, t};
    row.label = "bal[" + std::to_string(t + 1) + "]";
    p.equalities.push_back(std::move(row));
  }

  // Line limits as two one-sided rows on sum_i GSF(j,i) * net injection(i).
  for (std::size_t j = 0; j < c.lines.size(); ++j) {
    const int line = static_cast<int>(j);
    for (int t = 0; t < T; ++t) {
      LinearRow flow;
      double demand_flow = 0.0;
      for (std::size_t b = 0; b < c.buses.size(); ++b) demand_flow += gsf(j, b) * c.demand[b][t];
      const auto add = [&](int k, double v) {
        if (k < 0 || v == 0.0) return;
        flow.cols.push_back(k);
        flow.vals.push_back(v);
      };
      for (int s = 0; s < ns; ++s) {
        const double f = gsf(j, c.bus_position(c.storages[s].bus));
        add(vi.find({VarKind::Charge, s, t}), -f);
        add(vi.find({VarKind::Discharge, s, t}), f);
      }
      for (int g = 0; g < ng; ++g)
        add(vi.find({VarKind::Generation, g, t}), gsf(j, c.bus_position(c.generators[g].bus)));

      LinearRow lower = flow;
      for (auto& v : lower.vals) v = -v;
      lower.rhs = -c.lines[j].flow_min - demand_flow;
      lower.tag = {MultiplierName::Mu1, line, t};
      lower.label = "m1[" + c.lines[j].id + "," + std::to_string(t + 1) + "]";
      flow.rhs = c.lines[j].flow_max + demand_flow;
      flow.tag = {MultiplierName::Mu2, line, t};
      flow.label = "m2[" + c.lines[j].id + "," + std::to_string(t + 1) + "]";
      ineq(std::move(lower));
      ineq(std::move(flow));
    }
  }
  return p;
}

// Convex relaxation: constraints of the dispatch model without complementarity.
inline QpProblem build_rp(const NetworkCase& c, const GsfMatrix& gsf) {
  return build_problem(c, gsf, ModeMap{}, ModeFixing::EqualityRow);
}

// Relaxation plus pd = 0 in Charge slots and pc = 0 in Discharge slots.
inline QpProblem build_mode_restricted(const NetworkCase& c, const GsfMatrix& gsf,
                                       const ModeMap& modes) {
  if (modes.horizon() != c.horizon || modes.num_storages() != static_cast<int>(c.storages.size()) ||
      !modes.complete())
    throw std::invalid_argument("build_mode_restricted: mode map must cover every storage and slot");
  return build_problem(c, gsf, modes, ModeFixing::EqualityRow);
}

}  // namespace sced
