#pragma once

// KKT residuals of a dispatch solution, including the storage stationarity
// rows written in terms of LMP and the discounted energy-bound multiplier sum
//   Gamma(t) = sum_{tau >= t} (1-eps)^(tau-t) (beta1(tau) - beta2(tau)).

#include "sced/exactness.hpp"
#include "sced/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace sced {

struct KktReport {
  double charge_stationarity = 0.0;      // max |residual| of the pc rows
  double discharge_stationarity = 0.0;   // max |residual| of the pd rows
  double generation_stationarity = 0.0;  // max |residual| of the pg rows
  double stationarity = 0.0;             // all variables, scaled units
  double complementary_slackness = 0.0;  // max |dual*slack| / (1+|rhs|)
  double primal_infeasibility = 0.0;
  std::vector<std::vector<double>> gamma;  // [storage][t]

  double max() const {
    return std::max({charge_stationarity, discharge_stationarity, generation_stationarity,
                     stationarity, complementary_slackness, primal_infeasibility});
  }
};

inline std::vector<std::vector<double>> gamma_series(const NetworkCase& c, const Solution& sol) {
  std::vector<std::vector<double>> gamma(c.storages.size(),
                                         std::vector<double>(static_cast<std::size_t>(c.horizon), 0.0));
  for (std::size_t s = 0; s < c.storages.size(); ++s) {
    const double keep = 1.0 - c.storages[s].self_discharge;
    double acc = 0.0;
    for (int t = c.horizon - 1; t >= 0; --t) {
      const int si = static_cast<int>(s);
      acc = keep * acc + sol.dual(MultiplierName::Beta1, si, t) - sol.dual(MultiplierName::Beta2, si, t);
      gamma[s][static_cast<std::size_t>(t)] = acc;
    }
  }
  return gamma;
}

inline KktReport kkt_residual(const QpProblem& problem, const Solution& sol, const NetworkCase& c,
                              const GsfMatrix& gsf) {
  if (!sol.optimal()) throw std::invalid_argument("kkt_residual: solution is not optimal");
  KktReport r;
  const auto& vi = problem.var_index;
  const double dt = c.delta_t;

  // Generic stationarity from the raw problem data.
  Eigen::VectorXd grad = 2.0 * problem.quadratic * sol.x + problem.linear;
  for (std::size_t k = 0; k < problem.equalities.size(); ++k) {
    const auto& row = problem.equalities[k];
    for (std::size_t e = 0; e < row.cols.size(); ++e)
      grad[row.cols[e]] += row.vals[e] * sol.eq_duals[static_cast<Eigen::Index>(k)];
    r.primal_infeasibility = std::max(r.primal_infeasibility, std::abs(row.dot(sol.x) - row.rhs));
  }
  for (std::size_t k = 0; k < problem.inequalities.size(); ++k) {
    const auto& row = problem.inequalities[k];
    const double z = sol.ineq_duals[static_cast<Eigen::Index>(k)];
    for (std::size_t e = 0; e < row.cols.size(); ++e) grad[row.cols[e]] += row.vals[e] * z;
    const double slack = row.rhs - row.dot(sol.x);
    r.primal_infeasibility = std::max(r.primal_infeasibility, -slack);
    r.complementary_slackness =
        std::max(r.complementary_slackness,
                 std::abs(z * problem.dual_scale * slack) / (1.0 + std::abs(row.rhs)));
  }
  grad *= problem.dual_scale;
  for (int k = 0; k < vi.size(); ++k) {
    r.stationarity = std::max(r.stationarity, std::abs(grad[k]));
    if (vi.key(k).kind == VarKind::Generation)
      r.generation_stationarity = std::max(r.generation_stationarity, std::abs(grad[k]));
  }

  // Storage rows in price form.
  r.gamma = gamma_series(c, sol);
  if (c.storages.empty()) return r;
  const auto lmp = lmp_all(sol, gsf);
  // Which side, if any, a ModeFix row pins for each (storage, t).
  std::map<std::pair<int, int>, VarKind> fixed;
  for (const auto& row : problem.equalities)
    if (row.tag.name == MultiplierName::ModeFix)
      fixed[{row.tag.unit, row.tag.t}] = vi.key(row.cols.front()).kind;
  const auto fix_dual = [&](int s, int t, VarKind kind) {
    auto it = fixed.find({s, t});
    return it != fixed.end() && it->second == kind ? sol.dual(MultiplierName::ModeFix, s, t) : 0.0;
  };

  for (std::size_t s = 0; s < c.storages.size(); ++s) {
    const auto& st = c.storages[s];
    const int si = static_cast<int>(s);
    const auto& price = lmp[c.bus_position(st.bus)];
    for (int t = 0; t < c.horizon; ++t) {
      const auto ts = static_cast<std::size_t>(t);
      const double gamma = r.gamma[s][ts];
      if (vi.find({VarKind::Charge, si, t}) >= 0) {
        const double res = -st.charge_fee_rate - sol.dual(MultiplierName::Alpha1, si, t) +
                           sol.dual(MultiplierName::Alpha2, si, t) - st.eta_c * gamma * dt +
                           price[ts] + fix_dual(si, t, VarKind::Charge);
        r.charge_stationarity = std::max(r.charge_stationarity, std::abs(res));
      }
      if (vi.find({VarKind::Discharge, si, t}) >= 0) {
        const double pd = sol.schedule.discharge[s][ts];
        const double res = st.discharge_marginal(pd) - sol.dual(MultiplierName::Alpha3, si, t) +
                           sol.dual(MultiplierName::Alpha4, si, t) + gamma * dt / st.eta_d -
                           price[ts] + fix_dual(si, t, VarKind::Discharge);
        r.discharge_stationarity = std::max(r.discharge_stationarity, std::abs(res));
      }
    }
  }
  return r;
}

}  // namespace sced
