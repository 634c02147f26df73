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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace gridsec::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

Json slurp(const fs::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gridsec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST(Cli, RunIsDeterministicUnderASeed) {
  auto a = cli({"run", "neighbourhood_aggregation", "--seed", "7"});
  auto b = cli({"--seed", "7", "run", "neighbourhood_aggregation"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(Json::parse(a.out)["aggregation"]["aggregates"][0]["total_wh"], 8128);
}

TEST(Cli, RunWithDenialsExitsOne) {
  auto r = cli({"run", "fossil_load_access", "--seed", "1"});
  EXPECT_EQ(r.code, kExitDenied);
  EXPECT_TRUE(Json::parse(r.out)["summary"]["expectations_met"].get<bool>());
}

TEST(Cli, AggregateOnly) {
  auto r = cli({"aggregate", "neighbourhood_aggregation", "--seed", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto doc = Json::parse(r.out);
  EXPECT_TRUE(doc["records"].empty());
  EXPECT_EQ(doc["aggregation"]["meters"], 5);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"run"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "no_such_scenario"}).code, kExitUsage);
  EXPECT_EQ(cli({"bench", "--m", "0"}).code, kExitUsage);
  EXPECT_EQ(cli({"--hash", "md5", "bench"}).code, kExitUsage);
  auto r = cli({"encrypt", "--policy", "x &", "--kdc", "missing.json", "--payload", "p"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(cli({"--help"}).code, kExitOk); }

TEST(Cli, BenchReportsModelAndCounts) {
  auto r = cli({"bench", "--m", "10", "--seed", "4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto doc = Json::parse(r.out);
  EXPECT_DOUBLE_EQ(doc["predicted_decryption_ms"].get<double>(), 124.5);
  EXPECT_EQ(doc["encryption"]["counts"]["scalar_muls"], 40);
  EXPECT_EQ(doc["encryption"]["counts"]["pairings"], 1);
  EXPECT_EQ(doc["decryption"]["counts"]["pairings"], 20);
}

TEST(Cli, KeygenPaillier) {
  auto r = cli({"keygen-paillier", "--bits", "128", "--seed", "9"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, cli({"keygen-paillier", "--bits", "128", "--seed", "9"}).out);
}

TEST_F(CliFiles, FullAccessControlFlow) {
  const std::vector<std::string> g = {"--q-bits", "64", "--seed", "21"};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.begin(), g.begin(), g.end());
    return cli(a);
  };
  ASSERT_EQ(with({"kdc-setup", "--id", "A1", "--attributes", "D1,D2,D3,D4", "--out", path("a1.json")}).code, 0);
  ASSERT_EQ(with({"kdc-setup", "--id", "A3", "--attributes", "S1,S2", "--out", path("a3.json")}).code, 0);

  auto issue = [&](const std::string& kdc, const std::string& user, const std::string& attr) {
    std::vector<std::string> a = {"issue-key", "--kdc", path(kdc), "--user", user, "--attribute", attr,
                                  "--out", path(user + ".json")};
    if (fs::exists(path(user + ".json"))) {
      a.push_back("--keyring");
      a.push_back(path(user + ".json"));
    }
    auto r = with(a);
    ASSERT_EQ(r.code, 0) << r.err;
  };
  issue("a1.json", "user3", "D4");
  issue("a3.json", "user3", "S1");
  issue("a3.json", "solar", "S2");
  issue("a1.json", "researcher", "D1");
  EXPECT_EQ(with({"issue-key", "--kdc", path("a3.json"), "--user", "x", "--attribute", "D1"}).code, kExitUsage);

  auto enc = with({"encrypt", "--policy", "(D4 & S1) | D1", "--kdc", path("a1.json"), "--kdc", path("a3.json"),
                   "--payload", "feeder 12 load", "--out", path("ct.json"), "--secrets-out", path("sec.json")});
  ASSERT_EQ(enc.code, 0) << enc.err;

  auto dec = [&](const std::string& user, const std::string& ct, const std::string& updates = "") {
    std::vector<std::string> a = {"decrypt", "--keyring", path(user + ".json"), "--ciphertext", path(ct)};
    if (!updates.empty()) {
      a.push_back("--updates");
      a.push_back(path(updates));
    }
    return with(a);
  };
  auto ok = dec("user3", "ct.json");
  ASSERT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_EQ(Json::parse(ok.out)["value"], "feeder 12 load");
  EXPECT_EQ(dec("researcher", "ct.json").code, kExitOk);
  auto denied = dec("solar", "ct.json");
  EXPECT_EQ(denied.code, kExitDenied);
  EXPECT_EQ(Json::parse(denied.out)["outcome"], "denied");

  auto rev = with({"revoke", "--ciphertext", path("ct.json"), "--secrets", path("sec.json"), "--kdc", path("a1.json"),
                   "--kdc", path("a3.json"), "--revoked", path("researcher.json"), "--out", path("ct2.json"),
                   "--updates-out", path("upd.json")});
  ASSERT_EQ(rev.code, 0) << rev.err;
  EXPECT_EQ(dec("researcher", "ct2.json").code, kExitDenied);
  auto after = dec("user3", "ct2.json", "upd.json");
  EXPECT_EQ(after.code, kExitOk) << after.err;
  EXPECT_EQ(dec("user3", "ct.json").code, kExitOk);
  EXPECT_EQ(slurp(path("sec.json"))["schema"], "gridsec.encryption-secrets/1");

  // Files are bound to the group they were made in.
  auto other = cli({"--q-bits", "80", "decrypt", "--keyring", path("user3.json"), "--ciphertext", path("ct2.json")});
  EXPECT_EQ(other.code, kExitUsage);
}

TEST_F(CliFiles, DirectModeRejectsOversizedPayload) {
  ASSERT_EQ(cli({"--q-bits", "64", "kdc-setup", "--id", "A", "--attributes", "x", "--out", path("a.json")}).code, 0);
  auto r = cli({"--q-bits", "64", "encrypt", "--policy", "x", "--kdc", path("a.json"), "--mode", "direct",
                "--payload", std::string(64, 'z')});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("payload too large"), std::string::npos);
}

}  // namespace
}  // namespace gridsec::cli
