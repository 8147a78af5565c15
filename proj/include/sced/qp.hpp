#pragma once

// Standard-form convex QP:
//   minimize  x'Qx + c'x + k   subject to  A x = b,  G x <= h
// with every constraint row optionally tagged by the multiplier it carries.

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sced {

// Multipliers of the dispatch model. Index 1 is always the lower-bound side,
// index 2 the upper-bound side:
//   Alpha1/Alpha2  0 <= pc <= charge_max
//   Alpha3/Alpha4  0 <= pd <= discharge_max
//   Beta1/Beta2    energy_min <= s(t) <= energy_max
//   Lambda         system power balance
//   Mu1/Mu2        flow_min <= line flow <= flow_max
// ModeFix marks rows pinning one side of a storage to zero; Anonymous rows
// (generator limits, ramps) carry no named multiplier.
enum class MultiplierName { Alpha1, Alpha2, Alpha3, Alpha4, Beta1, Beta2, Lambda, Mu1, Mu2, ModeFix, Anonymous };

inline const char* to_string(MultiplierName n) {
  switch (n) {
    case MultiplierName::Alpha1: return "alpha1";
    case MultiplierName::Alpha2: return "alpha2";
    case MultiplierName::Alpha3: return "alpha3";
    case MultiplierName::Alpha4: return "alpha4";
    case MultiplierName::Beta1: return "beta1";
    case MultiplierName::Beta2: return "beta2";
    case MultiplierName::Lambda: return "lambda";
    case MultiplierName::Mu1: return "mu1";
    case MultiplierName::Mu2: return "mu2";
    case MultiplierName::ModeFix: return "modefix";
    case MultiplierName::Anonymous: return "anon";
  }
  return "?";
}

struct MultiplierTag {
  MultiplierName name = MultiplierName::Anonymous;
  int unit = -1;  // storage position (alpha, beta, modefix) or line position (mu)
  int t = 0;      // 0-based slot

  bool named() const { return name != MultiplierName::Anonymous; }
  auto operator<=>(const MultiplierTag&) const = default;
};

struct LinearRow {
  std::vector<int> cols;
  std::vector<double> vals;
  double rhs = 0.0;
  MultiplierTag tag;
  std::string label;

  double dot(const Eigen::VectorXd& x) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) sum += vals[k] * x[cols[k]];
    return sum;
  }
};

enum class VarKind { Charge, Discharge, Generation };

struct VarKey {
  VarKind kind = VarKind::Generation;
  int unit = 0;  // storage or generator position
  int t = 0;     // 0-based slot
  auto operator<=>(const VarKey&) const = default;
};

// Bijection between flat variable positions and (kind, unit, slot).
class VariableIndex {
 public:
  VariableIndex() = default;
  VariableIndex(int num_storages, int num_generators, int horizon)
      : storages_(num_storages), generators_(num_generators), horizon_(horizon) {}

  int add(VarKey key) {
    if (lookup_.count(key)) throw std::logic_error("duplicate variable");
    const int pos = static_cast<int>(keys_.size());
    keys_.push_back(key);
    lookup_.emplace(key, pos);
    return pos;
  }
  // -1 when the variable was eliminated.
  int find(VarKey key) const {
    auto it = lookup_.find(key);
    return it == lookup_.end() ? -1 : it->second;
  }
  const VarKey& key(int pos) const { return keys_.at(static_cast<std::size_t>(pos)); }
  int size() const { return static_cast<int>(keys_.size()); }
  int num_storages() const { return storages_; }
  int num_generators() const { return generators_; }
  int horizon() const { return horizon_; }
  bool empty() const { return keys_.empty() && horizon_ == 0; }

 private:
  std::vector<VarKey> keys_;
  std::map<VarKey, int> lookup_;
  int storages_ = 0;
  int generators_ = 0;
  int horizon_ = 0;
};

struct QpProblem {
  int num_vars = 0;
  Eigen::MatrixXd quadratic;  // symmetric PSD, objective term x'Qx
  Eigen::VectorXd linear;
  double constant = 0.0;
  std::vector<LinearRow> equalities;
  std::vector<LinearRow> inequalities;  // row.x <= rhs
  VariableIndex var_index;
  // Named duals are multiplied by this on extraction (1/delta_t for dispatch
  // problems, turning per-slot prices into $/MWh).
  double dual_scale = 1.0;
  std::vector<std::string> var_names;

  static QpProblem with_vars(int n) {
    QpProblem p;
    p.num_vars = n;
    p.quadratic = Eigen::MatrixXd::Zero(n, n);
    p.linear = Eigen::VectorXd::Zero(n);
    return p;
  }

  std::size_t named_tag_count() const {
    std::size_t count = 0;
    for (const auto* rows : {&equalities, &inequalities})
      for (const auto& r : *rows)
        if (r.tag.named() && r.tag.name != MultiplierName::ModeFix) ++count;
    return count;
  }
};

inline double objective_value(const QpProblem& p, const Eigen::VectorXd& x) {
  if (x.size() != p.num_vars)
    throw std::invalid_argument("objective_value: expected " + std::to_string(p.num_vars) +
                                " entries, got " + std::to_string(x.size()));
  return x.dot(p.quadratic * x) + p.linear.dot(x) + p.constant;
}

// Structural checks: symmetry, PSD (eigenvalues >= -1e-10 scaled), valid columns.
inline void check_problem(const QpProblem& p) {
  if (p.quadratic.rows() != p.num_vars || p.quadratic.cols() != p.num_vars ||
      p.linear.size() != p.num_vars)
    throw std::invalid_argument("QpProblem: objective dimensions disagree with num_vars");
  if (!p.quadratic.isApprox(p.quadratic.transpose(), 1e-12) &&
      (p.quadratic - p.quadratic.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("QpProblem: quadratic term not symmetric");
  if (p.num_vars > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.quadratic, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, p.quadratic.cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
      throw std::invalid_argument("QpProblem: quadratic term not positive semidefinite");
  }
  for (const auto* rows : {&p.equalities, &p.inequalities})
    for (const auto& r : *rows) {
      if (r.cols.size() != r.vals.size()) throw std::invalid_argument("QpProblem: ragged row");
      for (int c : r.cols)
        if (c < 0 || c >= p.num_vars) throw std::invalid_argument("QpProblem: column out of range");
    }
}

// Plain-text LP-style dump for debugging.
inline void write_lp(std::ostream& os, const QpProblem& p) {
  const auto name = [&](int c) {
    return c < static_cast<int>(p.var_names.size()) ? p.var_names[static_cast<std::size_t>(c)]
                                                    : "x" + std::to_string(c);
  };
  const auto row_text = [&](const LinearRow& r) {
    std::ostringstream ss;
    for (std::size_t k = 0; k < r.cols.size(); ++k) {
      const double v = r.vals[k];
      ss << (v < 0 ? " - " : (k == 0 ? " " : " + ")) << std::abs(v) << " " << name(r.cols[k]);
    }
    if (r.cols.empty()) ss << " 0";
    return ss.str();
  };
  os << "minimize\n obj:";
  for (int i = 0; i < p.num_vars; ++i)
    if (p.linear[i] != 0.0) os << (p.linear[i] < 0 ? " - " : " + ") << std::abs(p.linear[i]) << " " << name(i);
  bool any_quad = false;
  for (int i = 0; i < p.num_vars; ++i)
    for (int j = i; j < p.num_vars; ++j) {
      double q = (i == j) ? p.quadratic(i, i) : 2.0 * p.quadratic(i, j);
      if (q == 0.0) continue;
      os << (any_quad ? " + " : " + [ ") << q << " " << name(i);
      os << (i == j ? "^2" : " * " + name(j));
      any_quad = true;
    }
  if (any_quad) os << " ]";
  os << " + " << p.constant << "\nsubject to\n";
  for (const auto& r : p.equalities) os << " " << r.label << ":" << row_text(r) << " = " << r.rhs << "\n";
  for (const auto& r : p.inequalities) os << " " << r.label << ":" << row_text(r) << " <= " << r.rhs << "\n";
  os << "end\n";
}

}  // namespace sced
