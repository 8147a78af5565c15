#pragma once

// Dual-based certificates that the relaxed dispatch is exact, i.e. that its
// optimum never charges and discharges the same storage in the same slot.

#include "sced/network.hpp"
#include "sced/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sced {

using BusSeries = std::vector<std::vector<double>>;  // [bus position][t]

struct StorageSlot {
  int storage = 0;
  int t = 0;  // 0-based
  bool operator==(const StorageSlot&) const = default;
};

// Strict-inequality margins used by the condition checks.
inline double strict_margin(double reference) { return 1e-6 * (1.0 + std::abs(reference)); }

// LMP_i(t) = lambda(t) + sum_j GSF(j,i) (mu1_j(t) - mu2_j(t)).
inline BusSeries lmp_all(const Solution& solution, const GsfMatrix& gsf) {
  if (!solution.optimal()) throw std::invalid_argument("lmp_all: solution is not optimal, duals missing");
  const int T = solution.horizon;
  BusSeries lmp(gsf.num_buses(), std::vector<double>(static_cast<std::size_t>(T), 0.0));
  for (int t = 0; t < T; ++t) {
    const auto lambda = solution.duals.find({MultiplierName::Lambda, -1, t});
    if (lambda == solution.duals.end()) throw std::invalid_argument("lmp_all: balance multiplier missing");
    for (std::size_t b = 0; b < gsf.num_buses(); ++b) {
      double price = lambda->second;
      for (std::size_t j = 0; j < gsf.num_lines(); ++j) {
        const int line = static_cast<int>(j);
        price += gsf(j, b) * (solution.dual(MultiplierName::Mu1, line, t) -
                              solution.dual(MultiplierName::Mu2, line, t));
      }
      lmp[b][static_cast<std::size_t>(t)] = price;
    }
  }
  return lmp;
}

// Lower LMP bound (f' - eta_c eta_d g') / (1 - eta_c eta_d) above which a
// storage never charges and discharges simultaneously.
inline double cond1_bound(double f_prime, double g_prime, double eta_c, double eta_d) {
  const double rt = eta_c * eta_d;
  if (!(rt < 1.0)) throw std::invalid_argument("cond1_bound: eta_c*eta_d must be < 1");
  return (f_prime - rt * g_prime) / (1.0 - rt);
}

inline std::vector<std::vector<bool>> check_assumption1(const NetworkCase& c, const Solution& sol) {
  std::vector<std::vector<bool>> ok(c.storages.size(),
                                    std::vector<bool>(static_cast<std::size_t>(c.horizon), true));
  for (std::size_t s = 0; s < c.storages.size(); ++s) {
    const auto& st = c.storages[s];
    for (int t = 0; t < c.horizon; ++t) {
      const double pd = sol.schedule.discharge.empty() ? 0.0 : sol.schedule.discharge[s][static_cast<std::size_t>(t)];
      ok[s][static_cast<std::size_t>(t)] = st.charge_fee_rate < st.discharge_marginal(pd);
    }
  }
  return ok;
}

namespace detail {

inline double storage_lmp(const NetworkCase& c, const BusSeries& lmp, std::size_t s, int t) {
  return lmp[c.bus_position(c.storages[s].bus)][static_cast<std::size_t>(t)];
}

}  // namespace detail

// Bound per (storage, t) evaluated at the solution's discharge level.
inline std::vector<std::vector<double>> cond1_bounds(const NetworkCase& c, const Solution& sol) {
  std::vector<std::vector<double>> out(c.storages.size());
  for (std::size_t s = 0; s < c.storages.size(); ++s) {
    const auto& st = c.storages[s];
    for (int t = 0; t < c.horizon; ++t) {
      const double pd = sol.schedule.discharge[s][static_cast<std::size_t>(t)];
      out[s].push_back(cond1_bound(st.charge_fee_rate, st.discharge_marginal(pd), st.eta_c, st.eta_d));
    }
  }
  return out;
}

inline std::vector<StorageSlot> check_cond1(const NetworkCase& c, const Solution& sol,
                                            const GsfMatrix& gsf) {
  std::vector<StorageSlot> violations;
  if (c.storages.empty()) return violations;
  const auto lmp = lmp_all(sol, gsf);
  const auto bounds = cond1_bounds(c, sol);
  for (std::size_t s = 0; s < c.storages.size(); ++s)
    for (int t = 0; t < c.horizon; ++t) {
      const double bound = bounds[s][static_cast<std::size_t>(t)];
      if (!(detail::storage_lmp(c, lmp, s, t) - bound > strict_margin(bound)))
        violations.push_back({static_cast<int>(s), t});
    }
  return violations;
}

struct Cond2Check {
  StorageSlot slot;
  int scan_from = 0;  // 0-based, inclusive
  int scan_to = 0;    // 0-based, inclusive
  double min_slack = 0.0;  // min over scanned tau of energy_max - s(tau)
  std::optional<int> failed_at;
  bool passed = false;
};

inline std::vector<Cond2Check> check_cond2(const NetworkCase& c, const Solution& sol,
                                           const std::vector<StorageSlot>& violations) {
  std::vector<Cond2Check> out;
  for (const auto& v : violations) {
    const auto& st = c.storages[static_cast<std::size_t>(v.storage)];
    const auto& pc = sol.schedule.charge[static_cast<std::size_t>(v.storage)];
    const auto& pd = sol.schedule.discharge[static_cast<std::size_t>(v.storage)];
    Cond2Check check{v, v.t, c.horizon - 1, std::numeric_limits<double>::infinity(), std::nullopt, true};
    for (int tau = v.t; tau < c.horizon; ++tau) {
      const double slack = st.energy_max - storage_energy(st, pc, pd, tau + 1, c.delta_t);
      if (slack < check.min_slack) check.min_slack = slack;
      if (!(slack > strict_margin(st.energy_max)) && !check.failed_at) {
        check.failed_at = tau;
        check.passed = false;
      }
    }
    out.push_back(check);
  }
  return out;
}

struct ComplementarityViolation {
  double value = 0.0;  // MW^2
  StorageSlot at;
};

inline ComplementarityViolation complementarity_violation(const Solution& sol) {
  ComplementarityViolation out;
  const auto& pc = sol.schedule.charge;
  const auto& pd = sol.schedule.discharge;
  for (std::size_t s = 0; s < pc.size(); ++s)
    for (std::size_t t = 0; t < pc[s].size(); ++t) {
      const double v = std::abs(pc[s][t] * pd[s][t]);
      if (v > out.value) out = {v, {static_cast<int>(s), static_cast<int>(t)}};
    }
  return out;
}

// Prior-work style rule: exactness guaranteed only while LMP > f'.
inline std::vector<StorageSlot> check_prior_baseline(const NetworkCase& c, const Solution& sol,
                                                     const GsfMatrix& gsf) {
  std::vector<StorageSlot> violations;
  if (c.storages.empty()) return violations;
  const auto lmp = lmp_all(sol, gsf);
  for (std::size_t s = 0; s < c.storages.size(); ++s)
    for (int t = 0; t < c.horizon; ++t)
      if (!(detail::storage_lmp(c, lmp, s, t) > c.storages[s].charge_fee_rate))
        violations.push_back({static_cast<int>(s), t});
  return violations;
}

enum class Verdict { ExactByCond1, ExactByCond2, NotCertified };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ExactByCond1: return "ExactByCond1";
    case Verdict::ExactByCond2: return "ExactByCond2";
    case Verdict::NotCertified: return "NotCertified";
  }
  return "?";
}

inline bool certified(Verdict v) { return v != Verdict::NotCertified; }

struct ExactnessReport {
  BusSeries lmp;
  std::vector<std::vector<double>> cond1_bound;  // [storage][t]
  std::vector<StorageSlot> cond1_violations;
  std::vector<Cond2Check> cond2_checks;
  std::vector<std::vector<bool>> assumption1_ok;  // [storage][t]
  std::vector<StorageSlot> baseline_violations;
  ComplementarityViolation max_complementarity;
  Verdict verdict = Verdict::NotCertified;
  bool degenerate_dual = false;

  bool assumption1_everywhere() const {
    for (const auto& row : assumption1_ok)
      for (bool b : row)
        if (!b) return false;
    return true;
  }
  bool cond2_all_pass() const {
    return std::all_of(cond2_checks.begin(), cond2_checks.end(), [](const auto& c) { return c.passed; });
  }
};

inline ExactnessReport certify(const NetworkCase& c, const GsfMatrix& gsf, const Solution& sol) {
  if (!sol.optimal()) throw std::invalid_argument("certify: solution is not optimal");
  ExactnessReport r;
  r.lmp = lmp_all(sol, gsf);
  r.cond1_bound = cond1_bounds(c, sol);
  r.cond1_violations = check_cond1(c, sol, gsf);
  r.assumption1_ok = check_assumption1(c, sol);
  r.baseline_violations = check_prior_baseline(c, sol, gsf);
  r.max_complementarity = complementarity_violation(sol);
  r.degenerate_dual = sol.degenerate_dual;
  if (r.cond1_violations.empty()) {
    r.verdict = Verdict::ExactByCond1;
    return r;
  }
  r.cond2_checks = check_cond2(c, sol, r.cond1_violations);
  r.verdict = (r.assumption1_everywhere() && r.cond2_all_pass()) ? Verdict::ExactByCond2
                                                                  : Verdict::NotCertified;
  return r;
}

}  // namespace sced
