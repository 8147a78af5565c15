#pragma once

// Experiment scenarios: a base case plus named variants (storage price pair,
// generator cost overrides, capacity override, demand scaling), each solved
// and certified independently.
//
// {
//   "base_case": "ieee30_storage.json",
//   "variants": [
//     {"label": "row1", "f_prime": 1.5, "g_prime": 2.5, "target_lmp": 2.0,
//      "generator_linear_cost": {"G1": 2.0}, "energy_max": 2.0, "demand_scale": 1.0}
//   ]
// }

#include "sced/report.hpp"

#include <chrono>
#include <future>
#include <optional>

namespace sced {

struct Variant {
  std::string label;
  double f_prime = 0.0;
  double g_prime = 0.0;
  std::optional<double> target_lmp;
  std::map<std::string, double> generator_linear_cost;
  std::optional<double> energy_max;
  double demand_scale = 1.0;
};

struct Scenario {
  NetworkCase base;
  std::vector<Variant> variants;
};

inline Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = ".") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(line, column, e.what());
  }
  if (!doc.is_object()) throw CaseError("", "scenario must be a JSON object");
  Scenario s;
  s.base = load_case(base_dir / detail::field<std::string>(doc, "base_case", ""));
  const auto variants = doc.value("variants", nlohmann::json::array());
  if (!variants.is_array()) throw CaseError("variants", "expected an array");
  for (std::size_t k = 0; k < variants.size(); ++k) {
    const auto& v = variants[k];
    const std::string path = "variants[" + std::to_string(k) + "].";
    Variant out;
    out.label = detail::field_or<std::string>(v, "label", path, "v" + std::to_string(k + 1));
    out.f_prime = detail::field<double>(v, "f_prime", path);
    out.g_prime = detail::field<double>(v, "g_prime", path);
    if (v.contains("target_lmp")) out.target_lmp = detail::field<double>(v, "target_lmp", path);
    if (v.contains("energy_max")) out.energy_max = detail::field<double>(v, "energy_max", path);
    out.demand_scale = detail::field_or<double>(v, "demand_scale", path, 1.0);
    if (v.contains("generator_linear_cost")) {
      for (const auto& [id, cost] : v["generator_linear_cost"].items()) {
        if (!cost.is_number()) throw CaseError(path + "generator_linear_cost." + id, "expected a number");
        out.generator_linear_cost[id] = cost.get<double>();
      }
    }
    s.variants.push_back(std::move(out));
  }
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(detail::read_file(path), path.parent_path());
}

// The base case with the variant's overrides applied to every storage.
inline NetworkCase apply_variant(const NetworkCase& base, const Variant& v) {
  NetworkCase c = base;
  if (!v.label.empty()) c.name = base.name + "/" + v.label;
  for (auto& st : c.storages) {
    st.charge_fee_rate = v.f_prime;
    st.discharge_cost_linear = v.g_prime;
    if (v.energy_max) {
      st.energy_max = *v.energy_max;
      st.energy_initial = std::min(st.energy_initial, st.energy_max);
    }
  }
  for (const auto& [id, cost] : v.generator_linear_cost) {
    auto it = std::find_if(c.generators.begin(), c.generators.end(), [&](const auto& g) { return g.id == id; });
    if (it == c.generators.end()) throw CaseError("generator_linear_cost." + id, "unknown generator");
    it->cost_linear = cost;
  }
  for (auto& row : c.demand)
    for (auto& d : row) d *= v.demand_scale;
  validate(c);
  return c;
}

struct TableRow {
  Variant variant;
  bool ok = false;
  std::string error;
  double lmp = 0.0;  // lowest storage-bus LMP over the horizon
  ExactnessReport exactness;
  double kkt_max = 0.0;
  double solve_ms = 0.0;

  std::string cond2_cell() const {
    if (exactness.cond1_violations.empty()) return "/";
    return exactness.cond2_all_pass() ? "yes" : "no";
  }
};

inline double lowest_storage_lmp(const NetworkCase& c, const BusSeries& lmp) {
  double lo = std::numeric_limits<double>::infinity();
  if (c.storages.empty()) {
    for (const auto& series : lmp)
      for (double v : series) lo = std::min(lo, v);
    return lo;
  }
  for (std::size_t s = 0; s < c.storages.size(); ++s)
    for (int t = 0; t < c.horizon; ++t) lo = std::min(lo, detail::storage_lmp(c, lmp, s, t));
  return lo;
}

inline TableRow run_variant(const NetworkCase& base, const Variant& v, const SolverSettings& settings) {
  TableRow row;
  row.variant = v;
  try {
    const auto c = apply_variant(base, v);
    const auto gsf = compute_gsf(c);
    const auto start = std::chrono::steady_clock::now();
    const auto p = build_rp(c, gsf);
    const auto sol = solve_qp(p, settings);
    row.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!sol.optimal()) {
      row.error = std::string("relaxed dispatch ") + to_string(sol.status);
      return row;
    }
    row.exactness = certify(c, gsf, sol);
    row.lmp = lowest_storage_lmp(c, row.exactness.lmp);
    row.kkt_max = kkt_residual(p, sol, c, gsf).max();
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

// Variants run concurrently; rows come back in scenario order.
inline std::vector<TableRow> run_table(const Scenario& s, const SolverSettings& settings) {
  std::vector<std::future<TableRow>> jobs;
  for (const auto& v : s.variants)
    jobs.push_back(std::async(std::launch::async, [&s, &settings, v] { return run_variant(s.base, v, settings); }));
  std::vector<TableRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

inline nlohmann::json table_row_json(const TableRow& r) {
  nlohmann::json j = {{"label", r.variant.label},
                      {"f_prime", r.variant.f_prime},
                      {"g_prime", r.variant.g_prime},
                      {"status", r.ok ? "ok" : "failed"}};
  if (r.variant.target_lmp) j["target_lmp"] = *r.variant.target_lmp;
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  j["lmp"] = r.lmp;
  j["cond1"] = detail::yes_no(r.exactness.cond1_violations.empty());
  j["cond2"] = r.cond2_cell();
  j["baseline"] = detail::yes_no(r.exactness.baseline_violations.empty());
  j["max_complementarity"] = r.exactness.max_complementarity.value;
  j["verdict"] = to_string(r.exactness.verdict);
  j["kkt_max"] = r.kkt_max;
  j["solve_ms"] = r.solve_ms;
  return j;
}

inline nlohmann::json table_report(const Scenario& s, const std::vector<TableRow>& rows, const RunSettings& settings) {
  auto doc = report_header("table", s.base, settings);
  auto out = nlohmann::json::array();
  for (const auto& r : rows) out.push_back(table_row_json(r));
  doc["rows"] = std::move(out);
  return doc;
}

}  // namespace sced
