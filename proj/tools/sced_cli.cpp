// sced: storage-concerned economic dispatch with relaxation exactness checks.
//
// Exit codes:
//   0  success (optimal, certified, search complete, predicted exact)
//   1  parse, validation or I/O error
//   2  solver failure (relaxed dispatch not optimal, or a table row failed)
//   3  relaxation not certified exact (check), or exactness unknown (plan)
//   4  exact search refused by the node budget or left incomplete

#include "sced/sced.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <chrono>
#include <fstream>
#include <iostream>

namespace {

using sced::ReportFormat;
using Clock = std::chrono::steady_clock;

enum Exit { kOk = 0, kInputError = 1, kSolverFailure = 2, kNotCertified = 3, kOracleBudget = 4 };

struct Options {
  double tol = 1e-8;
  int max_iter = 200;
  std::uint64_t budget = std::uint64_t{1} << 24;
  int threads = 1;
  std::string out;
  ReportFormat format = ReportFormat::Text;
  std::string case_path;
  std::string forecast_path;
  std::string scenario_path;

  sced::RunSettings settings() const {
    sced::RunSettings s;
    s.solver.feasibility_tol = tol;
    s.solver.duality_gap_tol = tol;
    s.solver.max_iterations = max_iter;
    s.solver.check();
    s.oracle.node_budget = budget;
    s.oracle.threads = threads;
    s.oracle.solver = s.solver;
    return s;
  }
};

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void emit(const nlohmann::json& doc, const Options& o) {
  const auto text = sced::render(doc, o.format);
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + o.out);
  f << text;
}

// Shared front half of solve/check/oracle: parse, build, relaxed solve.
struct Solved {
  sced::NetworkCase c;
  sced::GsfMatrix gsf;
  sced::QpProblem problem;
  sced::Solution sol;
  nlohmann::json doc;
};

Solved solve_case(const std::string& command, const Options& o) {
  const auto settings = o.settings();
  auto t = Clock::now();
  Solved s;
  s.c = sced::load_case(o.case_path);
  s.doc = sced::report_header(command, s.c, settings);
  s.doc["timings_ms"]["parse"] = elapsed_ms(t);
  t = Clock::now();
  s.gsf = sced::compute_gsf(s.c);
  s.problem = sced::build_rp(s.c, s.gsf);
  s.doc["timings_ms"]["build"] = elapsed_ms(t);
  t = Clock::now();
  s.sol = sced::solve_qp(s.problem, settings.solver);
  s.doc["timings_ms"]["solve"] = elapsed_ms(t);
  s.doc["solution"] = sced::solution_json(s.c, s.gsf, s.problem, s.sol);
  return s;
}

int cmd_solve(const Options& o) {
  auto s = solve_case("solve", o);
  emit(s.doc, o);
  return s.sol.optimal() ? kOk : kSolverFailure;
}

int cmd_check(const Options& o) {
  auto s = solve_case("check", o);
  if (!s.sol.optimal()) {
    emit(s.doc, o);
    return kSolverFailure;
  }
  const auto t = Clock::now();
  const auto report = sced::certify(s.c, s.gsf, s.sol);
  s.doc["timings_ms"]["certify"] = elapsed_ms(t);
  s.doc["exactness"] = sced::exactness_json(s.c, report);
  emit(s.doc, o);
  return sced::certified(report.verdict) ? kOk : kNotCertified;
}

int cmd_oracle(const Options& o) {
  auto s = solve_case("oracle", o);
  if (!s.sol.optimal()) {
    emit(s.doc, o);
    return kSolverFailure;
  }
  const auto t = Clock::now();
  int code = kOk;
  try {
    const auto result = sced::solve_op_exact(s.c, s.gsf, o.settings().oracle);
    s.doc["oracle"] = sced::oracle_json(result);
    if (result.complete()) {
      s.doc["oracle"]["verification"] =
          sced::verification_json(sced::verify_exactness(s.c, s.gsf, s.sol, result));
    } else {
      code = result.status == sced::OracleStatus::Incomplete ? kOracleBudget : kSolverFailure;
    }
  } catch (const sced::OracleTooLarge& e) {
    s.doc["oracle"] = {{"status", "Refused"}, {"nodes_explored", 0}, {"pruned", 0}, {"message", e.what()}};
    code = kOracleBudget;
  }
  s.doc["timings_ms"]["oracle"] = elapsed_ms(t);
  emit(s.doc, o);
  return code;
}

int cmd_plan(const Options& o) {
  const auto settings = o.settings();
  auto t = Clock::now();
  const auto c = sced::load_case(o.case_path);
  const auto forecast =
      sced::parse_forecast_csv(sced::detail::read_file(o.forecast_path), c.horizon, o.forecast_path);
  auto doc = sced::report_header("plan", c, settings);
  doc["timings_ms"]["parse"] = elapsed_ms(t);
  t = Clock::now();
  const auto report = sced::a_priori_check(c, forecast);
  doc["timings_ms"]["plan"] = elapsed_ms(t);
  doc["planner"] = sced::planner_json(c, forecast, report);
  emit(doc, o);
  return report.verdict == sced::PlannerVerdict::PredictedExact ? kOk : kNotCertified;
}

int cmd_table(const Options& o) {
  const auto settings = o.settings();
  auto t = Clock::now();
  const auto scenario = sced::load_scenario(o.scenario_path);
  const double parse_ms = elapsed_ms(t);
  t = Clock::now();
  const auto rows = sced::run_table(scenario, settings.solver);
  auto doc = sced::table_report(scenario, rows, settings);
  doc["timings_ms"]["parse"] = parse_ms;
  doc["timings_ms"]["rows"] = elapsed_ms(t);
  emit(doc, o);
  const bool all_ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.ok; });
  return all_ok ? kOk : kSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Storage-concerned economic dispatch: relaxed solve, exactness certificates, exact search"};
  app.set_config("--config", "", "TOML/INI file with default option values")->envname("SCED_CONFIG");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  const std::map<std::string, ReportFormat> formats{
      {"text", ReportFormat::Text}, {"json", ReportFormat::Json}, {"csv", ReportFormat::Csv}};
  app.add_option("--tol", o.tol, "Solver feasibility and gap tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", o.max_iter, "Solver iteration limit")->check(CLI::PositiveNumber);
  app.add_option("--budget", o.budget, "Exact search node budget");
  app.add_option("--threads", o.threads, "Exact search worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "Write the report here instead of stdout");
  app.add_option("--format", o.format, "Report format")->transform(CLI::CheckedTransformer(formats));

  auto* solve = app.add_subcommand("solve", "Solve the relaxed dispatch and report LMPs");
  solve->add_option("case", o.case_path, "Case file")->required();
  auto* check = app.add_subcommand("check", "Solve and certify exactness of the relaxation");
  check->add_option("case", o.case_path, "Case file")->required();
  auto* oracle = app.add_subcommand("oracle", "Compare the relaxation against exact mode search");
  oracle->add_option("case", o.case_path, "Case file")->required();
  auto* plan = app.add_subcommand("plan", "Predict exactness from forecast LMPs before solving");
  plan->add_option("case", o.case_path, "Case file")->required();
  plan->add_option("forecast", o.forecast_path, "Forecast CSV, header bus,t1..tT")->required();
  auto* table = app.add_subcommand("table", "Run a scenario file and print the exactness table");
  table->add_option("scenario", o.scenario_path, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*check) return cmd_check(o);
    if (*oracle) return cmd_oracle(o);
    if (*plan) return cmd_plan(o);
    return cmd_table(o);
  } catch (const std::exception& e) {
    // ParseError carries line/column, CaseError the field path.
    fmt::print(stderr, "error: {}\n", e.what());
  }
  return kInputError;
}
