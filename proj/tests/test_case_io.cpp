#include "fixtures.hpp"
#include "sced/case_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace sced;
using namespace sced::testing;

namespace {

const char* kMinimal = R"({
  "buses": [1],
  "reference_bus": 1,
  "horizon_T": 1,
  "delta_t": 1.0,
  "generators": [{"id": "G1", "bus": 1, "p_min": 0, "p_max": 50,
                  "ramp_down_rate": -10, "ramp_up_rate": 10, "cost_linear": 3}],
  "demand": {"1": [10]}
})";

}  // namespace

TEST(ParseCase, MinimalOneBus) {
  const auto c = parse_case(kMinimal);
  EXPECT_EQ(c.buses.size(), 1u);
  EXPECT_TRUE(c.lines.empty());
  EXPECT_EQ(c.generators.size(), 1u);
  EXPECT_DOUBLE_EQ(c.demand_at(1, 0), 10.0);
}

TEST(ParseCase, StorageEfficiencyAboveOneNamesField) {
  auto doc = case_to_json(one_storage_two_slots());
  doc["storages"][0]["eta_c"] = 1.2;
  try {
    parse_case(doc.dump());
    FAIL() << "expected CaseError";
  } catch (const CaseError& e) {
    EXPECT_EQ(e.field(), "storages[0].eta_c");
  }
}

TEST(ParseCase, ThreeBusRing) {
  const auto c = parse_case(serialize_case(three_bus_ring()));
  EXPECT_EQ(c.lines.size(), 3u);
}

TEST(ParseCase, SyntaxErrorReportsLineAndColumn) {
  const std::string text = "{\n  \"buses\": [1,\n  \"reference_bus\" 1\n}";
  try {
    parse_case(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(ParseCase, DanglingBusReference) {
  auto doc = case_to_json(two_bus_congested());
  doc["generators"][1]["bus"] = 7;
  try {
    parse_case(doc.dump());
    FAIL() << "expected CaseError";
  } catch (const CaseError& e) {
    EXPECT_EQ(e.field(), "generators[1].bus");
  }
}

TEST(ParseCase, MissingFieldNamesPath) {
  auto doc = case_to_json(three_bus_ring());
  doc["lines"][2].erase("reactance");
  try {
    parse_case(doc.dump());
    FAIL() << "expected CaseError";
  } catch (const CaseError& e) {
    EXPECT_EQ(e.field(), "lines[2].reactance");
  }
}

TEST(ParseCase, WindIsNegativeDemand) {
  auto doc = case_to_json(two_bus_congested());
  doc["wind"] = {{"2", {25.0}}};
  const auto c = parse_case(doc.dump());
  EXPECT_DOUBLE_EQ(c.demand_at(2, 0), 75.0);
}

TEST(ParseCase, DemandFromCsv) {
  const auto dir = std::filesystem::temp_directory_path() / "sced_case_io_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "demand.csv");
    csv << "bus,t1,t2\n1,5,20\n";
  }
  auto doc = case_to_json(one_storage_two_slots());
  doc["demand"] = "demand.csv";
  {
    std::ofstream out(dir / "case.json");
    out << doc.dump(2);
  }
  const auto c = load_case(dir / "case.json");
  EXPECT_EQ(c, one_storage_two_slots());
  std::filesystem::remove_all(dir);
}

TEST(ParseBusSeriesCsv, RejectsShortRow) {
  EXPECT_THROW(parse_bus_series_csv("bus,t1,t2\n1,5\n", 2), ParseError);
}

TEST(ParseBusSeriesCsv, RejectsWrongHeader) {
  EXPECT_THROW(parse_bus_series_csv("node,t1\n1,5\n", 1), ParseError);
}

TEST(RoundTrip, SerializeThenParseIsIdentity) {
  for (const auto& c : {one_bus(), two_bus_congested(), three_bus_ring(), one_storage_two_slots()})
    EXPECT_EQ(parse_case(serialize_case(c)), c) << c.name;
}
