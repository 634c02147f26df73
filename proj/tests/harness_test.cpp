// Copyright 2026 The gridsec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>

#include "gridsec/bundled_scenarios.hpp"
#include "gridsec/cost_model.hpp"
#include "gridsec/registry.hpp"
#include "gridsec/repository.hpp"
#include "gridsec/scenario.hpp"

namespace gridsec {
namespace {

std::string bundled(std::string_view name) {
  for (const auto& [n, text] : kBundledScenarios) {
    if (n == name) return std::string(text);
  }
  ADD_FAILURE() << "no bundled scenario " << name;
  return {};
}

RunOptions seeded(std::uint64_t seed) {
  RunOptions o;
  o.seed = seed;
  return o;
}

TEST(Registry, SeededUniverseHasSixCategories) {
  auto r = AttributeRegistry::seeded_default();
  EXPECT_EQ(r.universe_size(), 18u);
  EXPECT_EQ(r.category("solar"), "energy_source");
  EXPECT_EQ(r.category("phev"), "consumer_type");
  EXPECT_EQ(r.category("policy_maker"), "user_type");
  EXPECT_FALSE(r.category("plutonium").has_value());
}

TEST(Registry, AttributesBelongToOneKdc) {
  AttributeRegistry r;
  r.claim("D1", "A1");
  r.claim("D2", "A1");
  r.claim("D1", "A1");
  r.claim("E1", "A2");
  EXPECT_THROW(r.claim("D1", "A2"), InvalidArgument);
  EXPECT_EQ(r.owner("D1"), "A1");
  EXPECT_EQ(r.owned_by("A1"), (std::vector<std::string>{"D1", "D2"}));
  EXPECT_EQ(r.category("E1"), "custom");
  EXPECT_THROW(r.add(""), InvalidArgument);
}

class RepositoryTest : public ::testing::Test {
 protected:
  RepositoryTest() : ctx_("reference", mpz_class(1000003)), rng_(5) {
    kdc_ = kdc_setup(ctx_, "A1", {"x", "y"}, rng_);
    kdc_->publish_to(dir_);
  }

  AbeCiphertext encrypt(const std::string& text) {
    auto program = compile_lsss(parse_policy("x | y"), ctx_.field());
    return abe_encrypt(ctx_, dir_, program, to_bytes(text), rng_).ciphertext;
  }

  PairingContext ctx_;
  SeededRandom rng_;
  std::optional<KdcKeyring> kdc_;
  PublicKeyDirectory dir_;
};

TEST_F(RepositoryTest, StoreIsAppendOnly) {
  Repository repo;
  auto first = encrypt("v1");
  repo.store("r", first);
  EXPECT_THROW(repo.store("r", first), InvalidArgument);
  EXPECT_THROW(repo.store_revision("missing", first), InvalidArgument);
  EXPECT_THROW(repo.fetch("missing"), InvalidArgument);
  auto second = encrypt("v2");
  repo.store_revision("r", second);
  EXPECT_EQ(repo.versions("r"), 2u);
  EXPECT_EQ(repo.versions("missing"), 0u);
  EXPECT_EQ(repo.fetch("r").encode(ctx_), second.encode(ctx_));
  EXPECT_TRUE(repo.contains("r"));
  EXPECT_EQ(repo.record_ids(), std::vector<std::string>{"r"});
}

TEST_F(RepositoryTest, DeliveriesMergePerRow) {
  Repository repo;
  GtElement e = ctx_.pair(ctx_.generator(), ctx_.generator());
  GtElement a = ctx_.gt_exp(e, ctx_.field().from(2));
  GtElement b = ctx_.gt_exp(e, ctx_.field().from(3));
  repo.deliver("r", "u", {{0, a}});
  repo.deliver("r", "u", {{0, b}, {2, a}});
  auto got = repo.updates_for("r", "u");
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got.at(0), b);
  EXPECT_EQ(got.at(2), a);
  EXPECT_TRUE(repo.updates_for("r", "v").empty());
}

TEST(CostModel, DefaultConstants) {
  CostModel m;
  EXPECT_DOUBLE_EQ(predict_cost(m, 10), 124.5);
  EXPECT_DOUBLE_EQ(predict_cost(m, 1), 16.5);
  for (long k = 1; k < 30; ++k) {
    EXPECT_DOUBLE_EQ(predict_cost(m, k + 1) - predict_cost(m, k), 2 * 4.5 + 5 * 0.6);
  }
  EXPECT_THROW(predict_cost(m, 0), InvalidArgument);
  EXPECT_THROW(predict_cost(m, -3), InvalidArgument);
  EXPECT_DOUBLE_EQ(price_counts(m, {2, 5}), 12.0);
}

TEST(CostModel, CommOverhead) {
  EXPECT_EQ(estimate_comm_overhead({6, 160, 160, 8, 1024}), 4103u);
  EXPECT_EQ(estimate_comm_overhead({0, 160, 160, 1, 0}), 160u);
  EXPECT_EQ(estimate_comm_overhead({1, 1, 1, 9, 0}), 1u + 3u + 1u + 4u);
  EXPECT_EQ(ceil_log2(1), 0u);
  EXPECT_EQ(ceil_log2(2), 1u);
  EXPECT_EQ(ceil_log2(19), 5u);
  EXPECT_THROW(ceil_log2(0), InvalidArgument);
  PairingContext ctx("reference", PairingContext::default_order(160));
  auto in = comm_input_for(ctx, 3, 19, 256);
  EXPECT_EQ(in.g_bits, ctx.element_bits(GroupKind::g));
  EXPECT_EQ(in.gt_bits, ctx.element_bits(GroupKind::gt));
}

TEST(CostModel, MeasureCountersReportsDelta) {
  PairingContext ctx("reference", mpz_class(1000003));
  ctx.g_exp(ctx.generator(), ctx.field().from(3));
  auto c = measure_counters(ctx, [&] {
    auto g = ctx.g_exp(ctx.generator(), ctx.field().from(5));
    ctx.pair(g, g);
    ctx.pair(g, g);
  });
  EXPECT_EQ(c, (OperationCounts{2, 1}));
}

void expect_path(const std::string& text, const std::string& path) {
  try {
    parse_scenario_text(text);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), path) << e.what();
  }
}

TEST(Scenario, ValidationNamesTheField) {
  expect_path(R"({"bogus": 1})", "bogus");
  expect_path(R"({"schema": "other/1"})", "schema");
  expect_path(R"({"paillier": {"bits": 8}})", "paillier.bits");
  expect_path(R"({"kdcs": [{"id": "A", "attributes": ["x"]}],
                  "records": [{"id": "r", "policy": "x &", "payload": "p"}]})",
              "records[0].policy");
  expect_path(R"({"kdcs": [{"id": "A", "attributes": ["x"]}, {"id": "B", "attributes": ["x"]}]})",
              "kdcs[1].attributes[0]");
  expect_path(R"({"kdcs": [{"id": "A", "attributes": ["x"]}],
                  "users": [{"id": "u", "attributes": ["y"]}]})",
              "users[0].attributes[0]");
  EXPECT_THROW(parse_scenario_text("{not json"), ValidationError);
}

TEST(Scenario, EmptyScenarioCompletes) {
  auto report = run_scenario(parse_scenario_text("{}"), seeded(1));
  EXPECT_EQ(report["status"], "complete");
  EXPECT_EQ(report["summary"]["denials"], 0);
  EXPECT_EQ(report["schema"], kReportSchema);
}

TEST(Scenario, NeighbourhoodAggregationTotals) {
  auto report = run_scenario(parse_scenario_text(bundled("neighbourhood_aggregation")), seeded(3));
  ASSERT_EQ(report["status"], "complete");
  const auto& agg = report["aggregation"]["aggregates"];
  ASSERT_EQ(agg.size(), 1u);
  EXPECT_EQ(agg[0]["total_wh"], 8128);
  EXPECT_TRUE(agg[0]["matches_plaintext_sum"].get<bool>());
  EXPECT_EQ(report["aggregation"]["meters"], 5);
}

TEST(Scenario, FossilLoadAccessMeetsExpectations) {
  auto report = run_scenario(parse_scenario_text(bundled("fossil_load_access")), seeded(3));
  ASSERT_EQ(report["status"], "complete");
  EXPECT_TRUE(report["summary"]["expectations_met"].get<bool>());
  EXPECT_TRUE(report["summary"]["counter_law_holds"].get<bool>());
  EXPECT_EQ(report["summary"]["denials"], 2);
  std::set<std::string> denied;
  for (const auto& a : report["attempts"]) {
    if (a["outcome"] == "denied") denied.insert(a["user"].get<std::string>() + "/" + a["phase"].get<std::string>());
  }
  EXPECT_EQ(denied, (std::set<std::string>{"solar_engineer/initial", "researcher/after_revocation"}));
}

TEST(Scenario, UnmetExpectationIsReported) {
  auto report = run_scenario(parse_scenario_text(R"({
    "kdcs": [{"id": "A", "attributes": ["x", "y"]}],
    "users": [{"id": "u", "attributes": ["y"]}],
    "records": [{"id": "r", "policy": "x", "payload": "p"}],
    "attempts": [{"user": "u", "record": "r", "expect": "granted"}]})"),
                             seeded(2));
  EXPECT_EQ(report["status"], "complete");
  EXPECT_FALSE(report["summary"]["expectations_met"].get<bool>());
}

TEST(Scenario, ReportsAreDeterministicUnderASeed) {
  for (const auto& [name, text] : kBundledScenarios) {
    Scenario s = parse_scenario_text(text);
    EXPECT_EQ(render_report(run_scenario(s, seeded(11))), render_report(run_scenario(s, seeded(11)))) << name;
  }
  Scenario s = parse_scenario_text(bundled("fossil_load_access"));
  EXPECT_NE(render_report(run_scenario(s, seeded(11))), render_report(run_scenario(s, seeded(12))));
}

}  // namespace
}  // namespace gridsec
