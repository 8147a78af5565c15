#pragma once

// Run reports. Every command builds one JSON document; the text and CSV
// renderings read only that document, so a saved report re-renders to the
// same bytes.

#include "sced/case_io.hpp"
#include "sced/kkt.hpp"
#include "sced/oracle.hpp"
#include "sced/planner.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace sced {

inline constexpr int kReportSchemaVersion = 1;

// FNV-1a, 64 bit, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

// Checksum of the canonical serialization, so formatting of the source file
// does not matter.
inline std::string case_checksum(const NetworkCase& c) { return fnv1a_hex(case_to_json(c).dump()); }

struct RunSettings {
  SolverSettings solver;
  OracleSettings oracle;
};

inline nlohmann::json settings_json(const RunSettings& s) {
  return {{"tol", s.solver.feasibility_tol},
          {"max_iter", s.solver.max_iterations},
          {"budget", s.oracle.node_budget},
          {"threads", s.oracle.threads}};
}

inline nlohmann::json case_summary_json(const NetworkCase& c) {
  return {{"name", c.name},
          {"checksum", case_checksum(c)},
          {"buses", c.buses.size()},
          {"generators", c.generators.size()},
          {"storages", c.storages.size()},
          {"horizon_T", c.horizon},
          {"delta_t", c.delta_t}};
}

inline nlohmann::json report_header(const std::string& command, const NetworkCase& c, const RunSettings& s) {
  return {{"schema_version", kReportSchemaVersion},
          {"command", command},
          {"case", case_summary_json(c)},
          {"settings", settings_json(s)},
          {"timings_ms", nlohmann::json::object()}};
}

inline nlohmann::json lmp_json(const NetworkCase& c, const BusSeries& lmp) {
  auto out = nlohmann::json::object();
  for (std::size_t b = 0; b < c.buses.size(); ++b) out[std::to_string(c.buses[b])] = lmp[b];
  return out;
}

inline nlohmann::json solution_json(const NetworkCase& c, const GsfMatrix& gsf, const QpProblem& p,
                                    const Solution& sol) {
  nlohmann::json j = {{"status", to_string(sol.status)}, {"iterations", sol.iterations}};
  if (!sol.optimal()) return j;
  j["objective"] = sol.objective;
  j["kkt_max"] = kkt_residual(p, sol, c, gsf).max();
  j["lmp"] = lmp_json(c, lmp_all(sol, gsf));
  auto storages = nlohmann::json::array();
  for (std::size_t s = 0; s < c.storages.size(); ++s) {
    const auto& st = c.storages[s];
    storages.push_back({{"id", st.id},
                        {"bus", st.bus},
                        {"charge", sol.schedule.charge[s]},
                        {"discharge", sol.schedule.discharge[s]},
                        {"energy", storage_trajectory(st, sol.schedule.charge[s], sol.schedule.discharge[s],
                                                      c.delta_t)}});
  }
  j["storages"] = std::move(storages);
  return j;
}

inline nlohmann::json slot_json(const NetworkCase& c, const StorageSlot& v) {
  return {{"storage", c.storages[static_cast<std::size_t>(v.storage)].id}, {"t", v.t}};
}

inline nlohmann::json exactness_json(const NetworkCase& c, const ExactnessReport& r) {
  auto c1 = nlohmann::json::array();
  for (const auto& v : r.cond1_violations) c1.push_back(slot_json(c, v));
  auto c2 = nlohmann::json::array();
  for (const auto& k : r.cond2_checks) {
    nlohmann::json e = slot_json(c, k.slot);
    e["passed"] = k.passed;
    e["min_slack"] = k.min_slack;
    e["failed_at"] = k.failed_at ? nlohmann::json(*k.failed_at) : nlohmann::json(nullptr);
    c2.push_back(std::move(e));
  }
  nlohmann::json j = {{"verdict", to_string(r.verdict)},
                      {"cond1_holds", r.cond1_violations.empty()},
                      {"cond1_violations", std::move(c1)},
                      {"cond2_checks", std::move(c2)},
                      {"assumption1_everywhere", r.assumption1_everywhere()},
                      {"baseline_holds", r.baseline_violations.empty()},
                      {"baseline_violations", r.baseline_violations.size()},
                      {"max_complementarity", r.max_complementarity.value},
                      {"degenerate_dual", r.degenerate_dual}};
  if (!c.storages.empty()) j["max_complementarity_at"] = slot_json(c, r.max_complementarity.at);
  return j;
}

inline nlohmann::json oracle_json(const OracleResult& r) {
  nlohmann::json j = {{"status", to_string(r.status)},
                      {"nodes_explored", r.nodes_explored},
                      {"pruned", r.pruned},
                      {"near_tie", r.near_tie}};
  if (r.complete()) {
    j["op_optimum"] = r.optimum;
    j["rp_optimum"] = r.rp_optimum;
    j["gap"] = r.gap_to_rp;
  }
  return j;
}

inline nlohmann::json verification_json(const ExactnessVerification& v) {
  return {{"relative_gap", v.relative_gap},
          {"schedule_distance", v.schedule_distance},
          {"complementarity", v.complementarity},
          {"schedules_comparable", v.schedules_comparable},
          {"exact", v.exact}};
}

inline nlohmann::json planner_json(const NetworkCase& c, const LmpForecast& f, const PlannerReport& r) {
  auto violations = nlohmann::json::array();
  for (const auto& v : r.violations) violations.push_back(slot_json(c, v));
  auto estimates = nlohmann::json::array();
  for (std::size_t k = 0; k < r.estimates.size(); ++k) {
    const auto& e = r.estimates[k];
    estimates.push_back({{"storage", e.storage_id},
                         {"energy_max", c.storages[k].energy_max},
                         {"needed_capacity", e.needed_capacity},
                         {"peak_time", e.peak_time},
                         {"sufficient", e.sufficient},
                         {"trajectory", e.trajectory}});
  }
  auto bounds = nlohmann::json::array();
  for (std::size_t s = 0; s < c.storages.size(); ++s)
    bounds.push_back({{"storage", c.storages[s].id}, {"bound", r.bound[s].empty() ? 0.0 : r.bound[s].front()}});
  return {{"forecast_source", f.source},
          {"verdict", to_string(r.verdict)},
          {"decided_at_step", r.decided_at_step},
          {"bounds", std::move(bounds)},
          {"violations", std::move(violations)},
          {"assumption1_ok", r.assumption1_ok},
          {"estimates", std::move(estimates)}};
}

// ---------------------------------------------------------------------------
// Rendering. Reads only the document.

namespace detail {

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline void render_timings(std::string& out, const nlohmann::json& doc) {
  if (!doc.contains("timings_ms") || doc["timings_ms"].empty()) return;
  out += "timings (ms):";
  for (const auto& [stage, ms] : doc["timings_ms"].items()) out += fmt::format(" {}={:.1f}", stage, ms.get<double>());
  out += "\n";
}

inline void render_case(std::string& out, const nlohmann::json& doc) {
  const auto& c = doc["case"];
  out += fmt::format("case {} [{}]: {} buses, {} generators, {} storages, T={} x {} h\n",
                     c["name"].get<std::string>(), c["checksum"].get<std::string>(), c["buses"].get<int>(),
                     c["generators"].get<int>(), c["storages"].get<int>(), c["horizon_T"].get<int>(),
                     c["delta_t"].get<double>());
}

inline void render_solution(std::string& out, const nlohmann::json& s) {
  out += fmt::format("relaxed dispatch: {} after {} iterations\n", s["status"].get<std::string>(),
                     s["iterations"].get<int>());
  if (!s.contains("objective")) return;
  out += fmt::format("objective {:.6f}, max KKT residual {:.3e}\n", s["objective"].get<double>(),
                     s["kkt_max"].get<double>());
  for (const auto& [bus, series] : s["lmp"].items()) {
    double lo = series[0].get<double>(), hi = lo;
    for (const auto& v : series) {
      lo = std::min(lo, v.get<double>());
      hi = std::max(hi, v.get<double>());
    }
    out += fmt::format("  LMP bus {:>4}: min {:9.4f}  max {:9.4f}\n", bus, lo, hi);
  }
}

inline void render_exactness(std::string& out, const nlohmann::json& e) {
  out += fmt::format("verdict: {}\n", e["verdict"].get<std::string>());
  out += fmt::format("  price bound holds: {} ({} violating slots)\n", yes_no(e["cond1_holds"].get<bool>()),
                     e["cond1_violations"].size());
  if (!e["cond2_checks"].empty()) {
    std::size_t passed = 0;
    for (const auto& k : e["cond2_checks"]) passed += k["passed"].get<bool>() ? 1 : 0;
    out += fmt::format("  capacity headroom: {}/{} violating slots covered\n", passed, e["cond2_checks"].size());
  }
  out += fmt::format("  f' < g' everywhere: {}\n", yes_no(e["assumption1_everywhere"].get<bool>()));
  out += fmt::format("  baseline (LMP > f'): {}\n", yes_no(e["baseline_holds"].get<bool>()));
  out += fmt::format("  max |pc*pd|: {:.3e}\n", e["max_complementarity"].get<double>());
}

inline void render_oracle(std::string& out, const nlohmann::json& o) {
  out += fmt::format("exact search: {} ({} nodes, {} pruned)\n", o["status"].get<std::string>(),
                     o["nodes_explored"].get<std::uint64_t>(), o["pruned"].get<std::uint64_t>());
  if (o.contains("op_optimum"))
    out += fmt::format("  v0* = {:.9f}\n  v1* = {:.9f}\n  gap = {:.3e}\n", o["op_optimum"].get<double>(),
                       o["rp_optimum"].get<double>(), o["gap"].get<double>());
  if (o.contains("verification")) {
    const auto& v = o["verification"];
    out += fmt::format("  exact: {} (relative gap {:.3e}, max |pc*pd| {:.3e})\n", yes_no(v["exact"].get<bool>()),
                       v["relative_gap"].get<double>(), v["complementarity"].get<double>());
  }
  if (o.contains("message")) out += fmt::format("  {}\n", o["message"].get<std::string>());
}

inline void render_planner(std::string& out, const nlohmann::json& p) {
  out += fmt::format("forecast: {}\n", p["forecast_source"].get<std::string>());
  out += p["violations"].empty() ? "step 1: price bound holds at every storage bus and slot\n"
                                  : "step 1: price bound fails\n";
  if (!p["violations"].empty()) {
    out += fmt::format("step 2: {} violating slots\n", p["violations"].size());
    out += "step 3: capacity estimate\n";
    out += fmt::format("  {:<10} {:>10} {:>10} {:>6} {:>10}\n", "storage", "S_max", "needed", "peak", "sufficient");
    for (const auto& e : p["estimates"])
      out += fmt::format("  {:<10} {:>10.4f} {:>10.4f} {:>6} {:>10}\n", e["storage"].get<std::string>(),
                         e["energy_max"].get<double>(), e["needed_capacity"].get<double>(),
                         e["peak_time"].get<int>(), yes_no(e["sufficient"].get<bool>()));
  }
  out += fmt::format("verdict: {} (step {})\n", p["verdict"].get<std::string>(), p["decided_at_step"].get<int>());
}

inline std::string format_prices(const nlohmann::json& row) {
  return fmt::format("({},{})", row["f_prime"].get<double>(), row["g_prime"].get<double>());
}

inline void render_table(std::string& out, const nlohmann::json& doc) {
  out += fmt::format("{:<12} {:<12} {:>9} {:>7} {:>7} {:>9} {:>14}\n", "variant", "(f',g')", "LMP", "Cond.1",
                     "Cond.2", "Baseline", "max|pc*pd|");
  for (const auto& row : doc["rows"]) {
    const auto label = row["label"].get<std::string>();
    if (row["status"] != "ok") {
      out += fmt::format("{:<12} {:<12} FAILED: {}\n", label, format_prices(row), row["error"].get<std::string>());
      continue;
    }
    out += fmt::format("{:<12} {:<12} {:>9.3f} {:>7} {:>7} {:>9} {:>14.3e}\n", label, format_prices(row),
                       row["lmp"].get<double>(), row["cond1"].get<std::string>(), row["cond2"].get<std::string>(),
                       row["baseline"].get<std::string>(), row["max_complementarity"].get<double>());
  }
}

inline void render_lmp_csv(std::string& out, const nlohmann::json& lmp) {
  std::size_t T = 0;
  for (const auto& [bus, series] : lmp.items()) T = series.size();
  out += "bus";
  for (std::size_t t = 1; t <= T; ++t) out += fmt::format(",t{}", t);
  out += "\n";
  for (const auto& [bus, series] : lmp.items()) {
    out += bus;
    for (const auto& v : series) out += fmt::format(",{}", v.get<double>());
    out += "\n";
  }
}

}  // namespace detail

inline std::string render_text(const nlohmann::json& doc) {
  std::string out;
  const auto command = doc.at("command").get<std::string>();
  if (command == "table") {
    detail::render_table(out, doc);
    detail::render_timings(out, doc);
    return out;
  }
  detail::render_case(out, doc);
  if (doc.contains("solution")) detail::render_solution(out, doc["solution"]);
  if (doc.contains("exactness")) detail::render_exactness(out, doc["exactness"]);
  if (doc.contains("oracle")) detail::render_oracle(out, doc["oracle"]);
  if (doc.contains("planner")) detail::render_planner(out, doc["planner"]);
  if (doc.contains("error")) out += fmt::format("error: {}\n", doc["error"].get<std::string>());
  detail::render_timings(out, doc);
  return out;
}

// CSV: table rows for `table`, capacity estimates for `plan`, and the LMP
// matrix (same layout as a forecast file) otherwise.
inline std::string render_csv(const nlohmann::json& doc) {
  std::string out;
  const auto command = doc.at("command").get<std::string>();
  if (command == "table") {
    out += "variant,f_prime,g_prime,lmp,cond1,cond2,baseline,max_complementarity,status\n";
    for (const auto& row : doc["rows"]) {
      if (row["status"] != "ok") {
        out += fmt::format("{},{},{},,,,,,FAILED\n", row["label"].get<std::string>(), row["f_prime"].get<double>(),
                           row["g_prime"].get<double>());
        continue;
      }
      out += fmt::format("{},{},{},{},{},{},{},{},ok\n", row["label"].get<std::string>(),
                         row["f_prime"].get<double>(), row["g_prime"].get<double>(), row["lmp"].get<double>(),
                         row["cond1"].get<std::string>(), row["cond2"].get<std::string>(),
                         row["baseline"].get<std::string>(), row["max_complementarity"].get<double>());
    }
    return out;
  }
  if (command == "plan") {
    out += "storage,energy_max,needed_capacity,peak_time,sufficient\n";
    for (const auto& e : doc["planner"]["estimates"])
      out += fmt::format("{},{},{},{},{}\n", e["storage"].get<std::string>(), e["energy_max"].get<double>(),
                         e["needed_capacity"].get<double>(), e["peak_time"].get<int>(),
                         detail::yes_no(e["sufficient"].get<bool>()));
    return out;
  }
  if (doc.contains("solution") && doc["solution"].contains("lmp")) detail::render_lmp_csv(out, doc["solution"]["lmp"]);
  return out;
}

enum class ReportFormat { Text, Json, Csv };

inline std::string render(const nlohmann::json& doc, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return doc.dump(2) + "\n";
    case ReportFormat::Csv: return render_csv(doc);
    case ReportFormat::Text: break;
  }
  return render_text(doc);
}

}  // namespace sced
