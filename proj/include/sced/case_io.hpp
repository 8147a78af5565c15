#pragma once

// Reading and writing case documents.
//
// A case document is a JSON object:
//   buses, reference_bus, lines[], generators[], storages[], demand, horizon_T, delta_t
// with optional `name` and `wind`. `demand` is either an object mapping bus id
// to an array of horizon_T values, or a path (relative to the case file) to a
// CSV with header `bus,t1,...,tT`. `wind` uses the same shapes and is
// subtracted from demand.

#include "sced/network.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace sced {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T field(const nlohmann::json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw CaseError(path + key, "missing");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw CaseError(path + key, "wrong type");
  }
}

template <typename T>
T field_or(const nlohmann::json& obj, const std::string& key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  return field<T>(obj, key, path);
}

inline std::vector<std::string> split_csv_row(const std::string& row) {
  std::vector<std::string> cells;
  std::stringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace detail

// Per-bus time series in the `bus,t1,...,tT` CSV layout. Rows keyed by bus id.
inline std::map<BusId, std::vector<double>> parse_bus_series_csv(std::string_view text,
                                                                 int horizon) {
  std::map<BusId, std::vector<double>> out;
  std::istringstream in{std::string(text)};
  std::string row;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, row)) {
    ++line_no;
    if (row.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = detail::split_csv_row(row);
    if (header) {
      header = false;
      if (cells.empty() || cells[0] != "bus")
        throw ParseError(line_no, 1, "expected header starting with 'bus'");
      if (cells.size() != static_cast<std::size_t>(horizon) + 1)
        throw ParseError(line_no, 1,
                         "header has " + std::to_string(cells.size() - 1) + " slots, expected " +
                             std::to_string(horizon));
      continue;
    }
    if (cells.size() != static_cast<std::size_t>(horizon) + 1)
      throw ParseError(line_no, 1, "row has wrong number of cells");
    BusId bus = 0;
    std::vector<double> values;
    try {
      bus = std::stoi(cells[0]);
      for (std::size_t k = 1; k < cells.size(); ++k) values.push_back(std::stod(cells[k]));
    } catch (const std::exception&) {
      throw ParseError(line_no, 1, "non-numeric cell");
    }
    if (!out.emplace(bus, std::move(values)).second)
      throw ParseError(line_no, 1, "duplicate bus " + std::to_string(bus));
  }
  if (header) throw ParseError(1, 1, "empty CSV");
  return out;
}

namespace detail {

inline std::map<BusId, std::vector<double>> bus_series(const nlohmann::json& node,
                                                       const std::string& key, int horizon,
                                                       const std::filesystem::path& base_dir) {
  if (node.is_string()) {
    const auto path = base_dir / node.get<std::string>();
    try {
      return parse_bus_series_csv(read_file(path), horizon);
    } catch (const ParseError& e) {
      throw CaseError(key, path.string() + ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw CaseError(key, e.what());
    }
  }
  if (!node.is_object()) throw CaseError(key, "expected object or CSV path");
  std::map<BusId, std::vector<double>> out;
  for (const auto& [bus_key, values] : node.items()) {
    BusId bus = 0;
    try {
      std::size_t used = 0;
      bus = std::stoi(bus_key, &used);
      if (used != bus_key.size()) throw std::invalid_argument(bus_key);
    } catch (const std::exception&) {
      throw CaseError(key + "." + bus_key, "bus key is not an integer");
    }
    if (!values.is_array()) throw CaseError(key + "." + bus_key, "expected array");
    std::vector<double> series;
    for (const auto& v : values) {
      if (!v.is_number()) throw CaseError(key + "." + bus_key, "non-numeric entry");
      series.push_back(v.get<double>());
    }
    if (series.size() != static_cast<std::size_t>(horizon))
      throw CaseError(key + "." + bus_key, "length differs from horizon_T");
    out.emplace(bus, std::move(series));
  }
  return out;
}

}  // namespace detail

inline NetworkCase case_from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir = ".") {
  using detail::field;
  using detail::field_or;
  if (!doc.is_object()) throw CaseError("<root>", "expected a JSON object");

  NetworkCase c;
  c.name = field_or<std::string>(doc, "name", "", "");
  c.buses = field<std::vector<BusId>>(doc, "buses", "");
  c.reference_bus = field<BusId>(doc, "reference_bus", "");
  c.horizon = field<int>(doc, "horizon_T", "");
  c.delta_t = field<double>(doc, "delta_t", "");
  if (c.horizon < 1) throw CaseError("horizon_T", "must be >= 1");

  const auto list = [&](const char* key) {
    if (!doc.contains(key)) return nlohmann::json::array();
    if (!doc.at(key).is_array()) throw CaseError(key, "expected array");
    return doc.at(key);
  };

  std::size_t k = 0;
  for (const auto& l : list("lines")) {
    const auto p = "lines[" + std::to_string(k++) + "].";
    Line line;
    line.id = field<std::string>(l, "id", p);
    line.from_bus = field<BusId>(l, "from_bus", p);
    line.to_bus = field<BusId>(l, "to_bus", p);
    line.reactance = field<double>(l, "reactance", p);
    line.flow_min = field<double>(l, "flow_min", p);
    line.flow_max = field<double>(l, "flow_max", p);
    c.lines.push_back(std::move(line));
  }
  k = 0;
  for (const auto& g : list("generators")) {
    const auto p = "generators[" + std::to_string(k++) + "].";
    Generator gen;
    gen.id = field<std::string>(g, "id", p);
    gen.bus = field<BusId>(g, "bus", p);
    gen.p_min = field<double>(g, "p_min", p);
    gen.p_max = field<double>(g, "p_max", p);
    gen.ramp_down_rate = field<double>(g, "ramp_down_rate", p);
    gen.ramp_up_rate = field<double>(g, "ramp_up_rate", p);
    gen.cost_quadratic = field_or<double>(g, "cost_quadratic", p, 0.0);
    gen.cost_linear = field_or<double>(g, "cost_linear", p, 0.0);
    gen.cost_constant = field_or<double>(g, "cost_constant", p, 0.0);
    c.generators.push_back(std::move(gen));
  }
  k = 0;
  for (const auto& s : list("storages")) {
    const auto p = "storages[" + std::to_string(k++) + "].";
    Storage st;
    st.id = field<std::string>(s, "id", p);
    st.bus = field<BusId>(s, "bus", p);
    st.charge_max = field<double>(s, "charge_max", p);
    st.discharge_max = field<double>(s, "discharge_max", p);
    st.energy_min = field<double>(s, "energy_min", p);
    st.energy_max = field<double>(s, "energy_max", p);
    st.energy_initial = field<double>(s, "energy_initial", p);
    st.eta_c = field<double>(s, "eta_c", p);
    st.eta_d = field<double>(s, "eta_d", p);
    st.self_discharge = field_or<double>(s, "self_discharge", p, 0.0);
    st.charge_fee_rate = field<double>(s, "charge_fee_rate", p);
    st.discharge_cost_quadratic = field_or<double>(s, "discharge_cost_quadratic", p, 0.0);
    st.discharge_cost_linear = field<double>(s, "discharge_cost_linear", p);
    c.storages.push_back(std::move(st));
  }

  c.demand.assign(c.buses.size(), std::vector<double>(static_cast<std::size_t>(c.horizon), 0.0));
  const auto fold = [&](const char* key, double sign) {
    if (!doc.contains(key)) return;
    for (const auto& [bus, series] : detail::bus_series(doc.at(key), key, c.horizon, base_dir)) {
      if (!c.has_bus(bus)) throw CaseError(std::string(key) + "." + std::to_string(bus), "unknown bus");
      auto& row = c.demand[c.bus_position(bus)];
      for (std::size_t t = 0; t < row.size(); ++t) row[t] += sign * series[t];
    }
  };
  if (!doc.contains("demand")) throw CaseError("demand", "missing");
  fold("demand", 1.0);
  fold("wind", -1.0);

  validate(c);
  return c;
}

// Parses a case document. Syntax errors raise ParseError with line/column;
// semantic errors raise CaseError with a field path.
inline NetworkCase parse_case(std::string_view text, const std::filesystem::path& base_dir = ".") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto byte = e.byte == 0 ? 0 : e.byte - 1;
    const auto [line, column] = detail::line_column(text, byte);
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(line, column, msg);
  }
  return case_from_json(doc, base_dir);
}

inline NetworkCase load_case(const std::filesystem::path& path) {
  return parse_case(detail::read_file(path), path.parent_path());
}

inline nlohmann::json case_to_json(const NetworkCase& c) {
  nlohmann::json doc;
  if (!c.name.empty()) doc["name"] = c.name;
  doc["buses"] = c.buses;
  doc["reference_bus"] = c.reference_bus;
  doc["horizon_T"] = c.horizon;
  doc["delta_t"] = c.delta_t;
  doc["lines"] = nlohmann::json::array();
  for (const auto& l : c.lines)
    doc["lines"].push_back({{"id", l.id},
                            {"from_bus", l.from_bus},
                            {"to_bus", l.to_bus},
                            {"reactance", l.reactance},
                            {"flow_min", l.flow_min},
                            {"flow_max", l.flow_max}});
  doc["generators"] = nlohmann::json::array();
  for (const auto& g : c.generators)
    doc["generators"].push_back({{"id", g.id},
                                 {"bus", g.bus},
                                 {"p_min", g.p_min},
                                 {"p_max", g.p_max},
                                 {"ramp_down_rate", g.ramp_down_rate},
                                 {"ramp_up_rate", g.ramp_up_rate},
                                 {"cost_quadratic", g.cost_quadratic},
                                 {"cost_linear", g.cost_linear},
                                 {"cost_constant", g.cost_constant}});
  doc["storages"] = nlohmann::json::array();
  for (const auto& s : c.storages)
    doc["storages"].push_back({{"id", s.id},
                               {"bus", s.bus},
                               {"charge_max", s.charge_max},
                               {"discharge_max", s.discharge_max},
                               {"energy_min", s.energy_min},
                               {"energy_max", s.energy_max},
                               {"energy_initial", s.energy_initial},
                               {"eta_c", s.eta_c},
                               {"eta_d", s.eta_d},
                               {"self_discharge", s.self_discharge},
                               {"charge_fee_rate", s.charge_fee_rate},
                               {"discharge_cost_quadratic", s.discharge_cost_quadratic},
                               {"discharge_cost_linear", s.discharge_cost_linear}});
  nlohmann::json demand = nlohmann::json::object();
  for (std::size_t b = 0; b < c.buses.size(); ++b) demand[std::to_string(c.buses[b])] = c.demand[b];
  doc["demand"] = std::move(demand);
  return doc;
}

inline std::string serialize_case(const NetworkCase& c) { return case_to_json(c).dump(2); }

}  // namespace sced
