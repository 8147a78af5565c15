#pragma once

// Primal-dual interior-point method (Mehrotra predictor-corrector) for
//   minimize x'Qx + c'x + k  s.t.  A x = b,  G x <= h.
//
// Lagrangian convention: L = f(x) + y'(Ax - b) + z'(Gx - h), z >= 0.
// Named multipliers are extracted as dual_scale * (y or z), with the balance
// multiplier negated so that it reads as a marginal price.

#include "sced/qp.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <vector>

namespace sced {

struct SolverSettings {
  double feasibility_tol = 1e-8;
  double duality_gap_tol = 1e-8;
  int max_iterations = 200;
  double static_regularization = 1e-10;
  std::ostream* log = nullptr;  // CSV iteration log when set

  void check() const {
    if (!(feasibility_tol > 0 && duality_gap_tol > 0 && static_regularization > 0 && max_iterations > 0))
      throw std::invalid_argument("SolverSettings: tolerances and iteration limit must be positive");
  }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterLimit: return "IterLimit";
  }
  return "?";
}

// Decoded dispatch, [unit][t]. Eliminated variables read as zero.
struct Schedule {
  std::vector<std::vector<double>> charge;
  std::vector<std::vector<double>> discharge;
  std::vector<std::vector<double>> generation;

  int horizon() const {
    if (!generation.empty()) return static_cast<int>(generation.front().size());
    if (!charge.empty()) return static_cast<int>(charge.front().size());
    return 0;
  }
};

struct Solution {
  SolveStatus status = SolveStatus::IterLimit;
  Eigen::VectorXd x;
  Eigen::VectorXd eq_duals;    // raw y
  Eigen::VectorXd ineq_duals;  // raw z
  Eigen::VectorXd slacks;      // h - Gx
  Schedule schedule;
  std::map<MultiplierTag, double> duals;  // named, scaled
  double objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  int horizon = 0;
  bool degenerate_dual = false;

  bool optimal() const { return status == SolveStatus::Optimal; }
  // Named multiplier; zero when the row does not exist (eliminated variable).
  double dual(MultiplierName name, int unit, int t) const {
    auto it = duals.find({name, unit, t});
    return it == duals.end() ? 0.0 : it->second;
  }
};

namespace detail {

using SpMat = Eigen::SparseMatrix<double>;

inline SpMat rows_to_sparse(const std::vector<LinearRow>& rows, int n) {
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t k = 0; k < rows[r].cols.size(); ++k)
      trips.emplace_back(static_cast<int>(r), rows[r].cols[k], rows[r].vals[k]);
  SpMat m(static_cast<Eigen::Index>(rows.size()), n);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

inline double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Largest step in (0, 1] keeping v + step*dv >= 0.
inline double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double step = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) step = std::min(step, -v[i] / dv[i]);
  return step;
}

struct IpmData {
  Eigen::MatrixXd H;  // 2Q
  Eigen::VectorXd c;
  SpMat A, G;
  Eigen::VectorXd b, h;
};

struct IpmResult {
  SolveStatus status = SolveStatus::IterLimit;
  Eigen::VectorXd x, y, z, s;
  int iterations = 0;
};

// Factorization of the reduced Newton system for one scaling W = Z/S.
class NewtonSystem {
 public:
  NewtonSystem(const IpmData& d, const Eigen::VectorXd& w, double reg) : d_(d), w_(w) {
    k0_ = d.H;
    if (d.G.rows() > 0) {
      SpMat gw = d.G.transpose() * w.asDiagonal();
      SpMat gwg = gw * d.G;
      k0_ += Eigen::MatrixXd(gwg);
    }
    // Scaled by H only: W grows without bound near the solution and a
    // W-scaled shift would bias the directions of lightly weighted variables.
    double delta = reg * std::max(1.0, d.H.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd k = k0_;
      k.diagonal().array() += delta;
      llt_.compute(k);
      if (llt_.info() == Eigen::Success) break;
      delta *= 100.0;
    }
    if (d.A.rows() > 0) {
      kinv_at_ = llt_.solve(Eigen::MatrixXd(d.A.transpose()));
      Eigen::MatrixXd schur = d.A * kinv_at_;
      double dual_reg = reg * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      for (int attempt = 0; attempt < 12; ++attempt) {
        Eigen::MatrixXd m = schur;
        m.diagonal().array() += dual_reg;
        schur_llt_.compute(m);
        if (schur_llt_.info() == Eigen::Success) break;
        dual_reg *= 100.0;
      }
    }
  }

  // Solves [K A'; A 0][dx; dy] = [r1; r2] with two refinement sweeps.
  void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dx,
             Eigen::VectorXd& dy) const {
    solve_once(r1, r2, dx, dy);
    for (int sweep = 0; sweep < 2; ++sweep) {
      // Residual against the unassembled operator H + G'WG, which keeps the
      // precision that forming G'WG loses once W spans many magnitudes.
      Eigen::VectorXd e1 = r1 - d_.H * dx;
      if (d_.G.rows() > 0) e1 -= d_.G.transpose() * (w_.cwiseProduct(d_.G * dx));
      if (d_.A.rows() > 0) e1 -= d_.A.transpose() * dy;
      Eigen::VectorXd e2 = d_.A.rows() > 0 ? Eigen::VectorXd(r2 - d_.A * dx) : Eigen::VectorXd();
      Eigen::VectorXd cx, cy;
      solve_once(e1, e2, cx, cy);
      dx += cx;
      if (d_.A.rows() > 0) dy += cy;
    }
  }

 private:
  void solve_once(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dx,
                  Eigen::VectorXd& dy) const {
    Eigen::VectorXd kr1 = llt_.solve(r1);
    if (d_.A.rows() == 0) {
      dx = kr1;
      dy = Eigen::VectorXd();
      return;
    }
    dy = schur_llt_.solve(d_.A * kr1 - r2);
    dx = kr1 - kinv_at_ * dy;
  }

  const IpmData& d_;
  Eigen::VectorXd w_;
  Eigen::MatrixXd k0_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd kinv_at_;
  Eigen::LLT<Eigen::MatrixXd> schur_llt_;
};

inline IpmResult run_ipm(const IpmData& d, const SolverSettings& settings) {
  const auto n = d.H.rows();
  const auto me = d.A.rows();
  const auto mi = d.G.rows();
  IpmResult out;

  // Least-squares style start, then shift slacks and duals into the interior.
  {
    NewtonSystem sys(d, Eigen::VectorXd::Ones(mi), settings.static_regularization);
    Eigen::VectorXd r1 = -d.c;
    if (mi > 0) r1 += d.G.transpose() * d.h;
    Eigen::VectorXd dy;
    sys.solve(r1, d.b, out.x, dy);
    out.y = me > 0 ? dy : Eigen::VectorXd();
    out.s = mi > 0 ? Eigen::VectorXd(d.h - d.G * out.x) : Eigen::VectorXd();
    out.z = -out.s;
    if (mi > 0) {
      const double sm = out.s.minCoeff();
      const double zm = out.z.minCoeff();
      out.s.array() += (sm < 0.0 ? 1.0 - sm : 0.0) + 1.0;
      out.z.array() += (zm < 0.0 ? 1.0 - zm : 0.0) + 1.0;
    }
  }

  const double b_norm = std::max(inf_norm(d.b), inf_norm(d.h));
  const double c_norm = inf_norm(d.c);
  Eigen::VectorXd prev_dx = Eigen::VectorXd::Zero(n);

  if (settings.log) *settings.log << "iter,pobj,dobj,gap,pres,dres,step\n";

  for (int iter = 0; iter <= settings.max_iterations; ++iter) {
    out.iterations = iter;
    const Eigen::VectorXd hx = d.H * out.x;
    Eigen::VectorXd rd = hx + d.c;
    if (me > 0) rd += d.A.transpose() * out.y;
    if (mi > 0) rd += d.G.transpose() * out.z;
    const Eigen::VectorXd re = me > 0 ? Eigen::VectorXd(d.A * out.x - d.b) : Eigen::VectorXd();
    const Eigen::VectorXd ri = mi > 0 ? Eigen::VectorXd(d.G * out.x + out.s - d.h) : Eigen::VectorXd();
    const double sz = mi > 0 ? out.s.dot(out.z) : 0.0;
    const double mu = mi > 0 ? sz / static_cast<double>(mi) : 0.0;

    const double pobj = 0.5 * out.x.dot(hx) + d.c.dot(out.x);
    double lag = pobj - sz;
    if (me > 0) lag += out.y.dot(re);
    if (mi > 0) lag += out.z.dot(ri);
    const double pres = std::max(inf_norm(re), inf_norm(ri)) / (1.0 + b_norm);
    const double dres = inf_norm(rd) / (1.0 + c_norm);
    const double gap_scale = 1.0 + std::abs(pobj);

    // Each pair separately as well: a small total gap on a large objective
    // can still leave individual slack products far from zero.
    double pair_gap = 0.0;
    for (Eigen::Index i = 0; i < mi; ++i)
      pair_gap = std::max(pair_gap, out.s[i] * out.z[i] / (1.0 + std::abs(d.h[i])));

    if (pres <= settings.feasibility_tol && dres <= settings.feasibility_tol &&
        sz <= settings.duality_gap_tol * gap_scale && pair_gap <= settings.duality_gap_tol &&
        std::abs(pobj - lag) <= settings.duality_gap_tol * gap_scale) {
      out.status = SolveStatus::Optimal;
      return out;
    }

    // Farkas certificate: z >= 0, A'y + G'z ~ 0, b'y + h'z < 0.
    if (mi + me > 0) {
      double certificate = 0.0;
      if (me > 0) certificate += d.b.dot(out.y);
      if (mi > 0) certificate += d.h.dot(out.z);
      Eigen::VectorXd ray = Eigen::VectorXd::Zero(n);
      if (me > 0) ray += d.A.transpose() * out.y;
      if (mi > 0) ray += d.G.transpose() * out.z;
      if (certificate < 0.0 && inf_norm(ray) * (1.0 + b_norm) <= 1e-6 * -certificate &&
          -certificate > 1e6 * (1.0 + std::abs(pobj))) {
        out.status = SolveStatus::Infeasible;
        return out;
      }
    }
    // Recession direction: Hd ~ 0, Ad ~ 0, Gd <= 0, c'd < 0 for d along the
    // iterate once it has grown without bound.
    if (iter > 0 && inf_norm(out.x) > 1e8) {
      for (const Eigen::VectorXd* cand : {&out.x, &prev_dx}) {
        const double dn = inf_norm(*cand);
        if (dn == 0.0) continue;
        const Eigen::VectorXd dir = *cand / dn;
        const double tol = 1e-7 * (1.0 + c_norm);
        bool ray = d.c.dot(dir) < -tol && inf_norm(d.H * dir) <= tol;
        if (ray && me > 0) ray = inf_norm(d.A * dir) <= tol;
        if (ray && mi > 0) ray = (d.G * dir).maxCoeff() <= tol;
        if (ray) {
          out.status = SolveStatus::Unbounded;
          return out;
        }
      }
    }
    if (iter == settings.max_iterations) break;

    Eigen::VectorXd w = mi > 0 ? Eigen::VectorXd(out.z.cwiseQuotient(out.s)) : Eigen::VectorXd();
    NewtonSystem sys(d, w, settings.static_regularization);

    const auto direction = [&](const Eigen::VectorXd& rsz, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                               Eigen::VectorXd& dz, Eigen::VectorXd& ds) {
      Eigen::VectorXd r1 = -rd;
      Eigen::VectorXd tmp;
      if (mi > 0) {
        tmp = (out.z.cwiseProduct(ri) - rsz).cwiseQuotient(out.s);
        r1 -= d.G.transpose() * tmp;
      }
      Eigen::VectorXd r2 = me > 0 ? Eigen::VectorXd(-re) : Eigen::VectorXd();
      sys.solve(r1, r2, dx, dy);
      if (mi > 0) {
        Eigen::VectorXd gdx = d.G * dx;
        dz = tmp + w.cwiseProduct(gdx);
        ds = -ri - gdx;
      }
    };

    Eigen::VectorXd dx, dy, dz, ds;
    double step = 1.0;
    if (mi > 0) {
      Eigen::VectorXd rsz = out.s.cwiseProduct(out.z);
      direction(rsz, dx, dy, dz, ds);
      const double a_aff = std::min(max_step(out.s, ds), max_step(out.z, dz));
      const double mu_aff =
          (out.s + a_aff * ds).dot(out.z + a_aff * dz) / static_cast<double>(mi);
      const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
      rsz += ds.cwiseProduct(dz);
      rsz.array() -= sigma * mu;
      direction(rsz, dx, dy, dz, ds);
      step = std::min(1.0, 0.99 * std::min(max_step(out.s, ds), max_step(out.z, dz)));
    } else {
      direction(Eigen::VectorXd(), dx, dy, dz, ds);
    }

    out.x += step * dx;
    if (me > 0) out.y += step * dy;
    if (mi > 0) {
      out.z += step * dz;
      out.s += step * ds;
    }
    prev_dx = step * dx;
    if (settings.log)
      *settings.log << iter << ',' << pobj << ',' << lag << ',' << sz << ',' << pres << ',' << dres
                    << ',' << step << '\n';
  }
  out.status = SolveStatus::IterLimit;
  return out;
}

inline IpmData to_ipm(const QpProblem& p) {
  IpmData d;
  d.H = 2.0 * p.quadratic;
  d.c = p.linear;
  d.A = rows_to_sparse(p.equalities, p.num_vars);
  d.G = rows_to_sparse(p.inequalities, p.num_vars);
  d.b.resize(static_cast<Eigen::Index>(p.equalities.size()));
  for (std::size_t r = 0; r < p.equalities.size(); ++r) d.b[static_cast<Eigen::Index>(r)] = p.equalities[r].rhs;
  d.h.resize(static_cast<Eigen::Index>(p.inequalities.size()));
  for (std::size_t r = 0; r < p.inequalities.size(); ++r) d.h[static_cast<Eigen::Index>(r)] = p.inequalities[r].rhs;
  return d;
}

// Minimum violation: one shared elastic variable for all inequality rows and a
// split elastic per equality row. A positive optimum proves infeasibility.
inline bool phase_one_infeasible(const IpmData& d, const SolverSettings& settings) {
  const auto n = d.H.rows(), me = d.A.rows(), mi = d.G.rows();
  const auto tau = n + 2 * me;
  const auto nv = tau + 1;
  IpmData p1;
  p1.H = Eigen::MatrixXd::Zero(nv, nv);
  p1.c = Eigen::VectorXd::Zero(nv);
  p1.c.tail(2 * me + 1).setOnes();
  std::vector<Eigen::Triplet<double>> ta, tg;
  for (int k = 0; k < d.A.outerSize(); ++k)
    for (SpMat::InnerIterator it(d.A, k); it; ++it) ta.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index r = 0; r < me; ++r) {
    ta.emplace_back(r, n + r, 1.0);
    ta.emplace_back(r, n + me + r, -1.0);
  }
  for (int k = 0; k < d.G.outerSize(); ++k)
    for (SpMat::InnerIterator it(d.G, k); it; ++it) tg.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index r = 0; r < mi; ++r) tg.emplace_back(r, tau, -1.0);
  for (Eigen::Index r = 0; r < 2 * me + 1; ++r) tg.emplace_back(mi + r, n + r, -1.0);
  p1.A.resize(me, nv);
  p1.A.setFromTriplets(ta.begin(), ta.end());
  p1.G.resize(mi + 2 * me + 1, nv);
  p1.G.setFromTriplets(tg.begin(), tg.end());
  p1.b = d.b;
  p1.h = Eigen::VectorXd::Zero(mi + 2 * me + 1);
  p1.h.head(mi) = d.h;
  SolverSettings s1 = settings;
  s1.log = nullptr;
  s1.max_iterations = std::max(settings.max_iterations, 100);
  const auto r = run_ipm(p1, s1);
  if (r.status != SolveStatus::Optimal) return false;
  const double violation = p1.c.dot(r.x);
  return violation > 1e-6 * (1.0 + std::max(inf_norm(d.b), inf_norm(d.h)));
}

}  // namespace detail

inline Schedule decode_schedule(const VariableIndex& vi, const Eigen::VectorXd& x) {
  Schedule s;
  const auto T = static_cast<std::size_t>(vi.horizon());
  s.charge.assign(static_cast<std::size_t>(vi.num_storages()), std::vector<double>(T, 0.0));
  s.discharge = s.charge;
  s.generation.assign(static_cast<std::size_t>(vi.num_generators()), std::vector<double>(T, 0.0));
  for (int k = 0; k < vi.size(); ++k) {
    const auto& key = vi.key(k);
    auto& target = key.kind == VarKind::Charge      ? s.charge
                   : key.kind == VarKind::Discharge ? s.discharge
                                                    : s.generation;
    target[static_cast<std::size_t>(key.unit)][static_cast<std::size_t>(key.t)] = x[k];
  }
  return s;
}

inline Solution solve_qp(const QpProblem& problem, const SolverSettings& settings = {}) {
  settings.check();
  check_problem(problem);
  const auto data = detail::to_ipm(problem);
  auto r = detail::run_ipm(data, settings);
  if (r.status == SolveStatus::IterLimit && detail::phase_one_infeasible(data, settings))
    r.status = SolveStatus::Infeasible;

  Solution sol;
  sol.status = r.status;
  sol.iterations = r.iterations;
  sol.x = r.x;
  sol.eq_duals = r.y;
  sol.ineq_duals = r.z;
  sol.horizon = problem.var_index.horizon();
  sol.slacks = problem.inequalities.empty() ? Eigen::VectorXd()
                                            : Eigen::VectorXd(data.h - data.G * r.x);
  sol.objective = objective_value(problem, r.x);
  {
    double lag = sol.objective;
    if (data.A.rows() > 0) lag += r.y.dot(data.A * r.x - data.b);
    if (data.G.rows() > 0) lag -= r.z.dot(sol.slacks);
    sol.dual_objective = lag;
  }
  if (problem.var_index.horizon() > 0) sol.schedule = decode_schedule(problem.var_index, r.x);

  const double scale = problem.dual_scale;
  for (std::size_t k = 0; k < problem.equalities.size(); ++k) {
    const auto& tag = problem.equalities[k].tag;
    if (!tag.named()) continue;
    const double raw = r.y[static_cast<Eigen::Index>(k)];
    sol.duals[tag] = (tag.name == MultiplierName::Lambda ? -raw : raw) * scale;
  }
  for (std::size_t k = 0; k < problem.inequalities.size(); ++k) {
    const auto& row = problem.inequalities[k];
    const double dual = r.z[static_cast<Eigen::Index>(k)] * scale;
    if (row.tag.named()) sol.duals[row.tag] = dual;
    if (sol.optimal()) {
      const double slack = sol.slacks[static_cast<Eigen::Index>(k)];
      if (slack <= 1e-6 * (1.0 + std::abs(row.rhs)) && dual <= 1e-6) sol.degenerate_dual = true;
    }
  }
  return sol;
}

}  // namespace sced
