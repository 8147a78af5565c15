#pragma once

// Exact solution of the dispatch problem with complementarity, by best-first
// search over charge/discharge mode maps. Each node fixes the modes of some
// (storage, slot) pairs and solves the relaxation over the rest; its optimum
// bounds every completion of the node from below.

#include "sced/exactness.hpp"
#include "sced/formulation.hpp"
#include "sced/solver.hpp"

#include <cmath>
#include <cstdint>
#include <future>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace sced {

class OracleTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleSettings {
  std::uint64_t node_budget = std::uint64_t{1} << 24;
  double prune_abs_tol = 1e-9;
  // Node bounds carry the solver's relative accuracy.
  double prune_rel_tol = 1e-8;
  int threads = 1;
  SolverSettings solver;
};

enum class OracleStatus { Optimal, Incomplete, Infeasible };

inline const char* to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::Optimal: return "Optimal";
    case OracleStatus::Incomplete: return "Incomplete";
    case OracleStatus::Infeasible: return "Infeasible";
  }
  return "?";
}

struct OracleResult {
  OracleStatus status = OracleStatus::Infeasible;
  double optimum = 0.0;
  Schedule schedule;
  ModeMap modes;
  std::uint64_t nodes_explored = 0;
  std::uint64_t pruned = 0;
  double rp_optimum = 0.0;
  double gap_to_rp = 0.0;
  bool near_tie = false;
  int bound_violations = 0;  // child relaxations found below their parent's bound

  bool complete() const { return status == OracleStatus::Optimal; }
};

namespace detail {

inline double schedule_distance(const Schedule& a, const Schedule& b) {
  double d = 0.0;
  const auto cmp = [&](const auto& x, const auto& y) {
    for (std::size_t u = 0; u < x.size() && u < y.size(); ++u)
      for (std::size_t t = 0; t < x[u].size() && t < y[u].size(); ++t)
        d = std::max(d, std::abs(x[u][t] - y[u][t]));
  };
  cmp(a.charge, b.charge);
  cmp(a.discharge, b.discharge);
  cmp(a.generation, b.generation);
  return d;
}

inline StorageMode suggested_mode(const Schedule& s, int storage, int t) {
  const double pc = s.charge[static_cast<std::size_t>(storage)][static_cast<std::size_t>(t)];
  const double pd = s.discharge[static_cast<std::size_t>(storage)][static_cast<std::size_t>(t)];
  return pd > pc ? StorageMode::Discharge : StorageMode::Charge;
}

struct Node {
  ModeMap modes;
  double bound = 0.0;  // parent's relaxation value
  std::uint64_t seq = 0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

}  // namespace detail

// Solves the restricted relaxation for a (partial) mode map.
inline Solution solve_restricted(const NetworkCase& c, const GsfMatrix& gsf, const ModeMap& modes,
                                 const SolverSettings& settings = {}) {
  return solve_qp(build_problem(c, gsf, modes, ModeFixing::Eliminate), settings);
}

inline OracleResult solve_op_exact(const NetworkCase& c, const GsfMatrix& gsf,
                                   const OracleSettings& settings = {}) {
  const int ns = static_cast<int>(c.storages.size());
  const int T = c.horizon;
  const int pairs = ns * T;
  if (pairs >= 63 || (std::uint64_t{1} << pairs) > settings.node_budget) {
    throw OracleTooLarge("oracle: " + std::to_string(ns) + " storages x " + std::to_string(T) +
                         " slots = " + std::to_string(pairs) +
                         " mode pairs exceeds the node budget; shorten the horizon or drop storages");
  }

  OracleResult result;
  const auto root_sol = solve_qp(build_rp(c, gsf), settings.solver);
  if (root_sol.status == SolveStatus::Infeasible) {
    result.status = OracleStatus::Infeasible;
    return result;
  }
  if (!root_sol.optimal()) throw std::runtime_error("oracle: relaxation did not solve to optimality");
  result.rp_optimum = root_sol.objective;

  double incumbent = std::numeric_limits<double>::infinity();
  const auto prune_tol = [&]() {
    return settings.prune_abs_tol + settings.prune_rel_tol * (1.0 + std::abs(incumbent));
  };
  const auto tie_tol = [&](double v) { return 1e-7 * (1.0 + std::abs(v)); };

  const auto consider_leaf = [&](const ModeMap& modes, const Solution& sol) {
    if (!sol.optimal()) return;
    if (sol.objective < incumbent) {
      if (std::isfinite(incumbent) && incumbent - sol.objective <= tie_tol(incumbent) &&
          detail::schedule_distance(sol.schedule, result.schedule) > 1e-6)
        result.near_tie = true;
      incumbent = sol.objective;
      result.optimum = sol.objective;
      result.schedule = sol.schedule;
      result.modes = modes;
    } else if (sol.objective - incumbent <= tie_tol(incumbent) &&
               detail::schedule_distance(sol.schedule, result.schedule) > 1e-6) {
      result.near_tie = true;
    }
  };

  // Completes a node by the mode its relaxation suggests and evaluates the leaf.
  const auto round_leaf = [&](const ModeMap& modes, const Solution& sol) {
    ModeMap leaf = modes;
    for (int s = 0; s < ns; ++s)
      for (int t = 0; t < T; ++t)
        if (!leaf.get(s, t)) leaf.set(s, t, detail::suggested_mode(sol.schedule, s, t));
    ++result.nodes_explored;
    consider_leaf(leaf, solve_restricted(c, gsf, leaf, settings.solver));
  };

  std::priority_queue<detail::Node, std::vector<detail::Node>, detail::NodeOrder> open;
  std::uint64_t seq = 0;
  open.push({ModeMap(ns, T), -std::numeric_limits<double>::infinity(), seq++});
  bool exhausted = false;

  while (!open.empty()) {
    // Take up to `threads` nodes, solve them together, then process in order.
    std::vector<detail::Node> batch;
    while (!open.empty() && batch.size() < static_cast<std::size_t>(std::max(1, settings.threads))) {
      auto node = open.top();
      open.pop();
      if (node.bound >= incumbent - prune_tol()) {
        ++result.pruned;
        continue;
      }
      batch.push_back(std::move(node));
    }
    if (batch.empty()) break;
    if (result.nodes_explored + batch.size() > settings.node_budget) {
      exhausted = true;
      break;
    }

    std::vector<Solution> solved(batch.size());
    if (batch.size() == 1) {
      solved[0] = batch[0].modes.fixed_count() == 0 ? root_sol
                                                    : solve_restricted(c, gsf, batch[0].modes, settings.solver);
    } else {
      std::vector<std::future<Solution>> jobs;
      for (const auto& node : batch)
        jobs.push_back(std::async(std::launch::async, [&, modes = node.modes] {
          return modes.fixed_count() == 0 ? root_sol : solve_restricted(c, gsf, modes, settings.solver);
        }));
      for (std::size_t k = 0; k < jobs.size(); ++k) solved[k] = jobs[k].get();
    }

    for (std::size_t k = 0; k < batch.size(); ++k) {
      const auto& node = batch[k];
      const auto& sol = solved[k];
      ++result.nodes_explored;
      if (!sol.optimal()) {
        if (sol.status != SolveStatus::Infeasible)
          throw std::runtime_error(std::string("oracle: node solve ended with ") + to_string(sol.status));
        ++result.pruned;
        continue;
      }
      if (std::isfinite(node.bound) && sol.objective < node.bound - tie_tol(node.bound))
        ++result.bound_violations;
      if (node.modes.complete()) {
        consider_leaf(node.modes, sol);
        continue;
      }
      if (sol.objective >= incumbent - prune_tol()) {
        ++result.pruned;
        continue;
      }

      // Branch on the most simultaneous unfixed pair; when none, try the
      // rounded leaf first and branch on the first unfixed pair if needed.
      int bs = -1, bt = -1;
      double worst = 1e-9;
      for (int s = 0; s < ns; ++s)
        for (int t = 0; t < T; ++t) {
          if (node.modes.get(s, t)) continue;
          const double v = sol.schedule.charge[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] *
                           sol.schedule.discharge[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
          if (v > worst) {
            worst = v;
            bs = s;
            bt = t;
          }
        }
      if (bs < 0) {
        round_leaf(node.modes, sol);
        if (sol.objective >= incumbent - prune_tol()) {
          ++result.pruned;
          continue;
        }
        for (int s = 0; s < ns && bs < 0; ++s)
          for (int t = 0; t < T; ++t)
            if (!node.modes.get(s, t)) {
              bs = s;
              bt = t;
              break;
            }
      }
      const auto first = detail::suggested_mode(sol.schedule, bs, bt);
      const auto second = first == StorageMode::Charge ? StorageMode::Discharge : StorageMode::Charge;
      for (auto mode : {first, second}) {
        ModeMap child = node.modes;
        child.set(bs, bt, mode);
        open.push({std::move(child), sol.objective, seq++});
      }
    }
  }

  if (!std::isfinite(incumbent)) {
    result.status = exhausted ? OracleStatus::Incomplete : OracleStatus::Infeasible;
    return result;
  }
  result.status = exhausted ? OracleStatus::Incomplete : OracleStatus::Optimal;
  result.gap_to_rp = result.optimum - result.rp_optimum;
  return result;
}

// Reference enumeration of every complete mode map, without pruning.
inline OracleResult solve_op_exhaustive(const NetworkCase& c, const GsfMatrix& gsf,
                                        const SolverSettings& solver = {}) {
  const int ns = static_cast<int>(c.storages.size());
  const int T = c.horizon;
  const int pairs = ns * T;
  if (pairs > 20) throw OracleTooLarge("exhaustive enumeration limited to 20 mode pairs");
  OracleResult result;
  result.optimum = std::numeric_limits<double>::infinity();
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << pairs); ++code) {
    ModeMap modes(ns, T);
    for (int k = 0; k < pairs; ++k)
      modes.set(k / T, k % T, (code >> k) & 1U ? StorageMode::Discharge : StorageMode::Charge);
    const auto sol = solve_restricted(c, gsf, modes, solver);
    ++result.nodes_explored;
    if (sol.optimal() && sol.objective < result.optimum) {
      result.optimum = sol.objective;
      result.schedule = sol.schedule;
      result.modes = modes;
    }
  }
  result.status = std::isfinite(result.optimum) ? OracleStatus::Optimal : OracleStatus::Infeasible;
  const auto rp = solve_qp(build_rp(c, gsf), solver);
  if (rp.optimal()) {
    result.rp_optimum = rp.objective;
    result.gap_to_rp = result.optimum - rp.objective;
  }
  return result;
}

struct ExactnessVerification {
  double relative_gap = 0.0;       // |v1 - v0| / (1 + |v0|)
  double schedule_distance = 0.0;  // max-norm between relaxed and exact schedules
  double complementarity = 0.0;    // max |pc*pd| of the relaxed schedule
  bool schedules_comparable = true;
  bool exact = false;
};

inline ExactnessVerification verify_exactness(const NetworkCase& /*c*/, const GsfMatrix& /*gsf*/,
                                              const Solution& rp, const OracleResult& oracle) {
  if (!rp.optimal() || !oracle.complete())
    throw std::invalid_argument("verify_exactness: both solutions must be optimal and complete");
  ExactnessVerification v;
  v.relative_gap = std::abs(rp.objective - oracle.optimum) / (1.0 + std::abs(oracle.optimum));
  v.schedule_distance = detail::schedule_distance(rp.schedule, oracle.schedule);
  v.complementarity = complementarity_violation(rp).value;
  v.schedules_comparable = !oracle.near_tie;
  v.exact = v.relative_gap <= 1e-6 && v.complementarity <= 1e-7;
  return v;
}

}  // namespace sced
