#pragma once

// Grid and horizon data model for storage-concerned economic dispatch.
//
// Units: power in MW, energy in MWh, time in hours. Cost coefficients are
// quoted per hour ($/MWh, $/MW^2h) and scaled by the slot length when the
// optimization problem is assembled.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sced {

using BusId = int;

// Raised when a case violates a structural or numeric invariant. `field`
// holds a path such as "storages[2].eta_c".
class CaseError : public std::runtime_error {
 public:
  CaseError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct Line {
  std::string id;
  BusId from_bus = 0;
  BusId to_bus = 0;
  double reactance = 1.0;  // p.u., > 0
  double flow_min = 0.0;   // MW, <= 0
  double flow_max = 0.0;   // MW, >= 0
  bool operator==(const Line&) const = default;
};

struct Generator {
  std::string id;
  BusId bus = 0;
  double p_min = 0.0;
  double p_max = 0.0;
  double ramp_down_rate = 0.0;  // MW/h, <= 0
  double ramp_up_rate = 0.0;    // MW/h, >= 0
  double cost_quadratic = 0.0;  // $/MW^2h
  double cost_linear = 0.0;     // $/MWh
  double cost_constant = 0.0;   // $/h

  double marginal_cost(double p) const { return 2.0 * cost_quadratic * p + cost_linear; }
  bool operator==(const Generator&) const = default;
};

struct Storage {
  std::string id;
  BusId bus = 0;
  double charge_max = 0.0;
  double discharge_max = 0.0;
  double energy_min = 0.0;
  double energy_max = 0.0;
  double energy_initial = 0.0;
  double eta_c = 1.0;
  double eta_d = 1.0;
  double self_discharge = 0.0;  // per slot
  double charge_fee_rate = 0.0;  // f', $/MWh
  double discharge_cost_quadratic = 0.0;
  double discharge_cost_linear = 0.0;

  double round_trip() const { return eta_c * eta_d; }
  // g'(p) of the discharging cost.
  double discharge_marginal(double p) const {
    return 2.0 * discharge_cost_quadratic * p + discharge_cost_linear;
  }
  bool operator==(const Storage&) const = default;
};

struct NetworkCase {
  std::string name;
  std::vector<BusId> buses;
  BusId reference_bus = 0;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<Storage> storages;
  // demand[bus position][t], wind already folded in as negative demand.
  std::vector<std::vector<double>> demand;
  int horizon = 1;
  double delta_t = 1.0;

  std::size_t bus_position(BusId bus) const {
    auto it = std::find(buses.begin(), buses.end(), bus);
    if (it == buses.end()) throw std::out_of_range("unknown bus " + std::to_string(bus));
    return static_cast<std::size_t>(it - buses.begin());
  }
  bool has_bus(BusId bus) const {
    return std::find(buses.begin(), buses.end(), bus) != buses.end();
  }
  double demand_at(BusId bus, int t) const { return demand[bus_position(bus)][t]; }
  double total_demand(int t) const {
    double sum = 0.0;
    for (const auto& row : demand) sum += row[t];
    return sum;
  }
  // Storage attached to `bus`, if any.
  std::optional<std::size_t> storage_at(BusId bus) const {
    for (std::size_t k = 0; k < storages.size(); ++k)
      if (storages[k].bus == bus) return k;
    return std::nullopt;
  }

  bool operator==(const NetworkCase&) const = default;
};

namespace detail {

inline std::string indexed(const char* list, std::size_t k, const char* field) {
  return std::string(list) + "[" + std::to_string(k) + "]." + field;
}

inline bool connected(const NetworkCase& c) {
  if (c.buses.empty()) return false;
  std::vector<std::vector<std::size_t>> adj(c.buses.size());
  for (const auto& l : c.lines) {
    auto a = c.bus_position(l.from_bus), b = c.bus_position(l.to_bus);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(c.buses.size(), false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
  }
  return count == c.buses.size();
}

}  // namespace detail

// Throws CaseError naming the first offending field.
inline void validate(const NetworkCase& c) {
  using detail::indexed;
  if (c.buses.empty()) throw CaseError("buses", "at least one bus required");
  {
    auto sorted = c.buses;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw CaseError("buses", "duplicate bus id");
  }
  if (!c.has_bus(c.reference_bus)) throw CaseError("reference_bus", "not a listed bus");
  if (c.horizon < 1) throw CaseError("horizon_T", "must be >= 1");
  if (!(c.delta_t > 0.0) || !std::isfinite(c.delta_t)) throw CaseError("delta_t", "must be > 0");

  for (std::size_t k = 0; k < c.lines.size(); ++k) {
    const auto& l = c.lines[k];
    if (!c.has_bus(l.from_bus)) throw CaseError(indexed("lines", k, "from_bus"), "unknown bus");
    if (!c.has_bus(l.to_bus)) throw CaseError(indexed("lines", k, "to_bus"), "unknown bus");
    if (l.from_bus == l.to_bus) throw CaseError(indexed("lines", k, "to_bus"), "self loop");
    if (!(l.reactance > 0.0)) throw CaseError(indexed("lines", k, "reactance"), "must be > 0");
    if (!(l.flow_min <= 0.0)) throw CaseError(indexed("lines", k, "flow_min"), "must be <= 0");
    if (!(l.flow_max >= 0.0)) throw CaseError(indexed("lines", k, "flow_max"), "must be >= 0");
  }
  if (!detail::connected(c)) throw CaseError("lines", "network is not connected");

  for (std::size_t k = 0; k < c.generators.size(); ++k) {
    const auto& g = c.generators[k];
    if (!c.has_bus(g.bus)) throw CaseError(indexed("generators", k, "bus"), "unknown bus");
    if (!(g.p_min <= g.p_max)) throw CaseError(indexed("generators", k, "p_min"), "exceeds p_max");
    if (!(g.ramp_down_rate <= 0.0))
      throw CaseError(indexed("generators", k, "ramp_down_rate"), "must be <= 0");
    if (!(g.ramp_up_rate >= 0.0))
      throw CaseError(indexed("generators", k, "ramp_up_rate"), "must be >= 0");
    if (!(g.cost_quadratic >= 0.0))
      throw CaseError(indexed("generators", k, "cost_quadratic"), "must be >= 0 (convex cost)");
  }

  for (std::size_t k = 0; k < c.storages.size(); ++k) {
    const auto& s = c.storages[k];
    if (!c.has_bus(s.bus)) throw CaseError(indexed("storages", k, "bus"), "unknown bus");
    for (std::size_t j = 0; j < k; ++j)
      if (c.storages[j].bus == s.bus)
        throw CaseError(indexed("storages", k, "bus"), "more than one storage on bus");
    if (!(s.eta_c > 0.0 && s.eta_c <= 1.0))
      throw CaseError(indexed("storages", k, "eta_c"), "must lie in (0,1]");
    if (!(s.eta_d > 0.0 && s.eta_d <= 1.0))
      throw CaseError(indexed("storages", k, "eta_d"), "must lie in (0,1]");
    if (!(s.round_trip() < 1.0))
      throw CaseError(indexed("storages", k, "eta_d"), "eta_c*eta_d must be < 1");
    if (!(s.self_discharge >= 0.0 && s.self_discharge < 1.0))
      throw CaseError(indexed("storages", k, "self_discharge"), "must lie in [0,1)");
    if (!(s.charge_max >= 0.0)) throw CaseError(indexed("storages", k, "charge_max"), "must be >= 0");
    if (!(s.discharge_max >= 0.0))
      throw CaseError(indexed("storages", k, "discharge_max"), "must be >= 0");
    if (!(s.energy_min <= s.energy_initial))
      throw CaseError(indexed("storages", k, "energy_initial"), "below energy_min");
    if (!(s.energy_initial <= s.energy_max))
      throw CaseError(indexed("storages", k, "energy_initial"), "above energy_max");
    if (!(s.discharge_cost_quadratic >= 0.0))
      throw CaseError(indexed("storages", k, "discharge_cost_quadratic"), "must be >= 0");
  }

  if (c.demand.size() != c.buses.size()) throw CaseError("demand", "one row per bus required");
  for (std::size_t b = 0; b < c.demand.size(); ++b) {
    if (c.demand[b].size() != static_cast<std::size_t>(c.horizon))
      throw CaseError("demand." + std::to_string(c.buses[b]), "length differs from horizon_T");
    for (double d : c.demand[b])
      if (!std::isfinite(d)) throw CaseError("demand." + std::to_string(c.buses[b]), "not finite");
  }
}

// Generation shift factors: sensitivity of the flow on each line (from_bus ->
// to_bus positive) to one MW injected at a bus and withdrawn at the reference bus.
class GsfMatrix {
 public:
  GsfMatrix() = default;
  GsfMatrix(Eigen::MatrixXd entries, std::vector<std::string> line_ids, std::vector<BusId> buses,
            BusId reference_bus)
      : entries_(std::move(entries)),
        line_ids_(std::move(line_ids)),
        buses_(std::move(buses)),
        reference_bus_(reference_bus) {}

  double operator()(std::size_t line, std::size_t bus_pos) const { return entries_(line, bus_pos); }
  double at(const std::string& line_id, BusId bus) const {
    auto li = std::find(line_ids_.begin(), line_ids_.end(), line_id);
    auto bi = std::find(buses_.begin(), buses_.end(), bus);
    if (li == line_ids_.end() || bi == buses_.end()) throw std::out_of_range("gsf lookup");
    return entries_(li - line_ids_.begin(), bi - buses_.begin());
  }
  std::size_t num_lines() const { return line_ids_.size(); }
  std::size_t num_buses() const { return buses_.size(); }
  BusId reference_bus() const { return reference_bus_; }
  const Eigen::MatrixXd& entries() const { return entries_; }
  const std::vector<BusId>& buses() const { return buses_; }
  const std::vector<std::string>& line_ids() const { return line_ids_; }

  // Line flows for a vector of net injections ordered like buses().
  Eigen::VectorXd flows(const Eigen::VectorXd& injection) const { return entries_ * injection; }

 private:
  Eigen::MatrixXd entries_;
  std::vector<std::string> line_ids_;
  std::vector<BusId> buses_;
  BusId reference_bus_ = 0;
};

// Bus susceptance matrix (per-unit reactances, flat start angles).
inline Eigen::MatrixXd susceptance_matrix(const NetworkCase& c) {
  const auto n = static_cast<Eigen::Index>(c.buses.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (const auto& l : c.lines) {
    const auto i = static_cast<Eigen::Index>(c.bus_position(l.from_bus));
    const auto j = static_cast<Eigen::Index>(c.bus_position(l.to_bus));
    const double y = 1.0 / l.reactance;
    b(i, i) += y;
    b(j, j) += y;
    b(i, j) -= y;
    b(j, i) -= y;
  }
  return b;
}

inline GsfMatrix compute_gsf(const NetworkCase& c) {
  if (!detail::connected(c)) throw CaseError("lines", "network is not connected");
  for (std::size_t k = 0; k < c.lines.size(); ++k)
    if (!(c.lines[k].reactance > 0.0))
      throw CaseError(detail::indexed("lines", k, "reactance"), "must be > 0");

  const auto n = static_cast<Eigen::Index>(c.buses.size());
  const auto ref = static_cast<Eigen::Index>(c.bus_position(c.reference_bus));
  std::vector<std::string> ids;
  for (const auto& l : c.lines) ids.push_back(l.id);

  Eigen::MatrixXd gsf = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c.lines.size()), n);
  if (n == 1) return GsfMatrix(gsf, ids, c.buses, c.reference_bus);

  // Reduced susceptance matrix without the reference row/column.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (i != ref) keep.push_back(i);
  const auto full = susceptance_matrix(c);
  Eigen::MatrixXd reduced(n - 1, n - 1);
  for (Eigen::Index r = 0; r < n - 1; ++r)
    for (Eigen::Index k = 0; k < n - 1; ++k) reduced(r, k) = full(keep[r], keep[k]);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(reduced);
  if (!lu.isInvertible()) throw CaseError("lines", "reduced susceptance matrix is singular");
  const Eigen::MatrixXd x_red = lu.inverse();

  // Angle sensitivities with the reference bus pinned at zero.
  Eigen::MatrixXd x_full = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < n - 1; ++r)
    for (Eigen::Index k = 0; k < n - 1; ++k) x_full(keep[r], keep[k]) = x_red(r, k);

  for (std::size_t j = 0; j < c.lines.size(); ++j) {
    const auto& l = c.lines[j];
    const auto a = static_cast<Eigen::Index>(c.bus_position(l.from_bus));
    const auto b = static_cast<Eigen::Index>(c.bus_position(l.to_bus));
    gsf.row(static_cast<Eigen::Index>(j)) = (x_full.row(a) - x_full.row(b)) / l.reactance;
  }
  gsf.col(ref).setZero();
  return GsfMatrix(std::move(gsf), std::move(ids), c.buses, c.reference_bus);
}

// Stored energy after slot t (1-based) under the closed-form expansion
//   s(t) = (1-eps)^t s0 + sum_{tau<=t} (1-eps)^(t-tau) (eta_c pc(tau) - pd(tau)/eta_d) dt.
inline double storage_energy(const Storage& s, std::span<const double> charge,
                             std::span<const double> discharge, int t, double delta_t) {
  if (t < 1 || static_cast<std::size_t>(t) > charge.size() ||
      static_cast<std::size_t>(t) > discharge.size())
    throw std::out_of_range("storage_energy: slot " + std::to_string(t) + " out of range");
  const double keep = 1.0 - s.self_discharge;
  double energy = std::pow(keep, t) * s.energy_initial;
  for (int tau = 1; tau <= t; ++tau) {
    const double net = s.eta_c * charge[tau - 1] - discharge[tau - 1] / s.eta_d;
    energy += std::pow(keep, t - tau) * net * delta_t;
  }
  return energy;
}

// Full trajectory s(1..T) by the one-step recursion.
inline std::vector<double> storage_trajectory(const Storage& s, std::span<const double> charge,
                                              std::span<const double> discharge, double delta_t) {
  std::vector<double> out;
  out.reserve(charge.size());
  double energy = s.energy_initial;
  for (std::size_t t = 0; t < charge.size(); ++t) {
    energy = (1.0 - s.self_discharge) * energy +
             (s.eta_c * charge[t] - discharge[t] / s.eta_d) * delta_t;
    out.push_back(energy);
  }
  return out;
}

}  // namespace sced
