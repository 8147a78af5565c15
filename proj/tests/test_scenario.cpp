#include "fixtures.hpp"
#include "sced/scenario.hpp"

#include <gtest/gtest.h>

using namespace sced;
using namespace sced::testing;

namespace {

const std::filesystem::path kData = SCED_DATA_DIR;

Variant pinned(const std::string& label, double lmp, double energy_max) {
  Variant v;
  v.label = label;
  v.f_prime = 1.5;
  v.g_prime = 2.5;
  v.target_lmp = lmp;
  v.generator_linear_cost["G1"] = lmp;
  v.energy_max = energy_max;
  return v;
}

}  // namespace

TEST(Scenario, ParsesBundledTable) {
  const auto s = load_scenario(kData / "table_scenario.json");
  ASSERT_EQ(s.variants.size(), 5u);
  EXPECT_EQ(s.base.storages.size(), 5u);
  EXPECT_EQ(s.variants[4].energy_max, 10.0);
  EXPECT_EQ(s.variants[3].generator_linear_cost.at("G1"), -3.0);
}

TEST(Scenario, MissingFieldNamesVariant) {
  const auto text = R"({"base_case": "one_bus.json", "variants": [{"label": "a", "f_prime": 1}]})";
  try {
    parse_scenario(text, kData);
    FAIL();
  } catch (const CaseError& e) {
    EXPECT_EQ(e.field(), "variants[0].g_prime");
  }
}

TEST(ApplyVariant, OverridesEveryStorageAndGenerator) {
  auto base = one_storage_two_slots();
  base.generators = {make_generator("G1", 1, 100.0, 0.0, 2.0)};
  auto v = pinned("x", -3.0, 10.0);
  v.demand_scale = 2.0;
  const auto c = apply_variant(base, v);
  EXPECT_EQ(c.storages[0].charge_fee_rate, 1.5);
  EXPECT_EQ(c.storages[0].discharge_cost_linear, 2.5);
  EXPECT_EQ(c.storages[0].energy_max, 10.0);
  EXPECT_EQ(c.generators[0].cost_linear, -3.0);
  EXPECT_EQ(c.demand[0][1], 2.0 * base.demand[0][1]);
  v.generator_linear_cost["nope"] = 1.0;
  EXPECT_THROW(apply_variant(base, v), CaseError);
}

TEST(RunTable, EmptyScenarioGivesHeaderOnly) {
  Scenario s{one_bus(), {}};
  const auto rows = run_table(s, {});
  const auto doc = table_report(s, rows, {});
  const auto text = render_text(doc);
  EXPECT_EQ(text.substr(0, 7), "variant");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
}

TEST(RunTable, FailedVariantDoesNotAbortOthers) {
  Scenario s{one_bus(), {}};
  s.base.generators[0].cost_linear = 2.0;
  Variant bad;
  bad.label = "bad";
  bad.demand_scale = 1e6;  // beyond generator capacity
  Variant good;
  good.label = "good";
  s.variants = {bad, good};
  const auto rows = run_table(s, {});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].ok);
  EXPECT_TRUE(rows[1].ok);
  const auto text = render_text(table_report(s, rows, {}));
  EXPECT_NE(text.find("FAILED"), std::string::npos);
  EXPECT_EQ(text.find("good"), text.rfind("good"));
}

TEST(RunTable, CapacityOverrideFlipsCertification) {
  Scenario s{one_bus(), {}};
  s.base.horizon = 3;
  s.base.demand = {{50.0, 50.0, 50.0}};
  s.base.generators = {make_generator("G1", 1, 500.0, 0.0, 2.0)};
  s.base.storages = {make_storage("S1", 1)};
  s.variants = {pinned("small", -3.0, 2.0), pinned("large", -3.0, 10.0)};
  const auto rows = run_table(s, {});
  ASSERT_TRUE(rows[0].ok && rows[1].ok);
  EXPECT_EQ(rows[0].exactness.verdict, Verdict::NotCertified);
  EXPECT_EQ(rows[0].cond2_cell(), "no");
  EXPECT_EQ(rows[1].exactness.verdict, Verdict::ExactByCond2);
  EXPECT_EQ(rows[1].cond2_cell(), "yes");
  EXPECT_NEAR(rows[1].lmp, -3.0, 1e-6);
}

TEST(RunTable, RowsKeepScenarioOrder) {
  Scenario s{one_bus(), {}};
  for (int k = 0; k < 8; ++k) {
    Variant v;
    v.label = "v" + std::to_string(k);
    v.demand_scale = 1.0 + k;
    s.variants.push_back(v);
  }
  const auto rows = run_table(s, {});
  for (int k = 0; k < 8; ++k) EXPECT_EQ(rows[static_cast<std::size_t>(k)].variant.label, "v" + std::to_string(k));
  // h = 0.5 p^2 + 2 p, so LMP = p + 2 with p = 10 (1 + k).
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(rows[static_cast<std::size_t>(k)].lmp, 10.0 * (1 + k) + 2.0, 1e-6);
}
