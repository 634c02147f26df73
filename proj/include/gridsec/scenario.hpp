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

// Scenario files: a JSON document describing a whole deployment (Paillier
// key, gateway tree and readings, KDCs, users, records, decryption attempts
// and revocations) and the runner that plays it end to end.
//
//   {
//     "schema": "gridsec.scenario/1",
//     "paillier": {"bits": 512} | {"primes": ["5", "7"]},
//     "topology": {"nodes": [{"id": "nan", "role": "nan"},
//                            {"id": "h1", "role": "han", "parent": "nan"}],
//                  "readings": [{"meter": "h1", "tags": ["solar"], "wh": 10}]},
//     "kdcs": [{"id": "A1", "attributes": ["D1", "D2"]}],
//     "users": [{"id": "u1", "attributes": ["D1"]}],
//     "records": [{"id": "r1", "policy": "D1 | D2", "payload": "...",
//                  "mode": "kem" | "direct"}],
//     "attempts": [{"user": "u1", "record": "r1", "expect": "granted"}],
//     "revocations": [{"record": "r1", "users": ["u1"], "attempts": [...]}]
//   }
//
// Every key is optional. There is deliberately no way to ask the repository
// to decrypt: attempts always name a user.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "gridsec/abe.hpp"
#include "gridsec/aggregation.hpp"
#include "gridsec/cost_model.hpp"
#include "gridsec/registry.hpp"
#include "gridsec/repository.hpp"

namespace gridsec {

using Json = nlohmann::json;

inline constexpr const char* kScenarioSchema = "gridsec.scenario/1";
inline constexpr const char* kReportSchema = "gridsec.report/1";

struct PaillierSpec {
  std::optional<std::size_t> bits;
  std::optional<std::pair<mpz_class, mpz_class>> primes;
};

struct ReadingSpec {
  std::string meter;
  AttributeTag tag;
  std::uint64_t wh;
};

struct TopologySpec {
  std::vector<AggregationTopology::Node> nodes;
  std::vector<ReadingSpec> readings;
};

struct KdcSpec {
  std::string id;
  std::vector<std::string> attributes;
};

struct UserSpec {
  std::string id;
  std::vector<std::string> attributes;
};

struct RecordSpec {
  std::string id;
  std::string policy;
  AccessTree tree;
  PayloadMode mode = PayloadMode::kem;
  std::string payload;
};

struct AttemptSpec {
  std::string user;
  std::string record;
  std::optional<bool> expect_granted;
};

struct RevocationSpec {
  std::string record;
  std::vector<std::string> users;
  std::vector<AttemptSpec> attempts;
};

struct Scenario {
  std::optional<std::string> name;
  std::optional<PaillierSpec> paillier;
  std::optional<TopologySpec> topology;
  std::vector<KdcSpec> kdcs;
  std::vector<UserSpec> users;
  std::vector<RecordSpec> records;
  std::vector<AttemptSpec> attempts;
  std::vector<RevocationSpec> revocations;
  AttributeRegistry registry = AttributeRegistry::seeded_default();
};

namespace detail {

inline std::string at(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline void only_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ValidationError(path.empty() ? "$" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(at(path, key), "unknown field");
  }
}

inline const Json& array_at(const Json& obj, const std::string& path, const char* key) {
  static const Json empty = Json::array();
  if (!obj.contains(key)) return empty;
  const Json& v = obj.at(key);
  if (!v.is_array()) throw ValidationError(at(path, key), "expected an array");
  return v;
}

inline std::string string_at(const Json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ValidationError(at(path, key), "missing required field");
  const Json& v = obj.at(key);
  if (!v.is_string()) throw ValidationError(at(path, key), "expected a string");
  return v.get<std::string>();
}

inline std::string id_at(const Json& obj, const std::string& path, const char* key) {
  std::string s = string_at(obj, path, key);
  if (s.empty()) throw ValidationError(at(path, key), "must not be empty");
  return s;
}

inline std::vector<std::string> strings_at(const Json& obj, const std::string& path, const char* key) {
  std::vector<std::string> out;
  const Json& arr = array_at(obj, path, key);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) throw ValidationError(at(at(path, key), i), "expected a string");
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

inline mpz_class integer_string(const Json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError(path, "expected a decimal string");
  mpz_class out;
  if (v.get<std::string>().empty() || out.set_str(v.get<std::string>(), 10) != 0 || out < 0) {
    throw ValidationError(path, "not a non-negative decimal integer");
  }
  return out;
}

inline AttemptSpec parse_attempt(const Json& a, const std::string& path) {
  only_keys(a, path, {"user", "record", "expect"});
  AttemptSpec out{id_at(a, path, "user"), id_at(a, path, "record"), std::nullopt};
  if (a.contains("expect")) {
    std::string e = string_at(a, path, "expect");
    if (e == "granted") {
      out.expect_granted = true;
    } else if (e == "denied") {
      out.expect_granted = false;
    } else {
      throw ValidationError(at(path, "expect"), "must be \"granted\" or \"denied\"");
    }
  }
  return out;
}

}  // namespace detail

// Structural and referential validation. Errors carry the JSON path of the
// offending field.
inline Scenario parse_scenario(const Json& doc) {
  using namespace detail;
  only_keys(doc, "", {"schema", "name", "paillier", "topology", "kdcs", "users", "records", "attempts",
                      "revocations"});
  Scenario s;
  if (doc.contains("schema") && string_at(doc, "", "schema") != kScenarioSchema) {
    throw ValidationError("schema", std::string("unsupported schema, expected ") + kScenarioSchema);
  }
  if (doc.contains("name")) s.name = string_at(doc, "", "name");

  if (doc.contains("paillier")) {
    const Json& p = doc.at("paillier");
    only_keys(p, "paillier", {"bits", "primes"});
    PaillierSpec spec;
    if (p.contains("bits") == p.contains("primes")) {
      throw ValidationError("paillier", "give exactly one of \"bits\" or \"primes\"");
    }
    if (p.contains("bits")) {
      const Json& b = p.at("bits");
      if (!b.is_number_unsigned() || b.get<std::uint64_t>() < kMinPaillierBits || b.get<std::uint64_t>() > 16384) {
        throw ValidationError("paillier.bits", "expected an integer in [16, 16384]");
      }
      spec.bits = b.get<std::size_t>();
    } else {
      const Json& pr = p.at("primes");
      if (!pr.is_array() || pr.size() != 2) throw ValidationError("paillier.primes", "expected two decimal strings");
      mpz_class q1 = integer_string(pr[0], "paillier.primes[0]");
      mpz_class q2 = integer_string(pr[1], "paillier.primes[1]");
      try {
        paillier_keypair_from_primes(q1, q2);
      } catch (const Error& e) {
        throw ValidationError("paillier.primes", e.what());
      }
      spec.primes = std::make_pair(q1, q2);
    }
    s.paillier = spec;
  }

  if (doc.contains("topology")) {
    const Json& t = doc.at("topology");
    only_keys(t, "topology", {"nodes", "readings"});
    TopologySpec spec;
    const Json& nodes = array_at(t, "topology", "nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      std::string path = at("topology.nodes", i);
      only_keys(nodes[i], path, {"id", "role", "parent"});
      AggregationTopology::Node n;
      n.id = id_at(nodes[i], path, "id");
      try {
        n.role = parse_role(string_at(nodes[i], path, "role"));
      } catch (const InvalidArgument& e) {
        throw ValidationError(at(path, "role"), e.what());
      }
      if (nodes[i].contains("parent")) n.parent = id_at(nodes[i], path, "parent");
      spec.nodes.push_back(std::move(n));
    }
    std::optional<AggregationTopology> topo;
    try {
      topo.emplace(spec.nodes);
    } catch (const InvalidArgument& e) {
      throw ValidationError("topology.nodes", e.what());
    }
    const Json& readings = array_at(t, "topology", "readings");
    for (std::size_t i = 0; i < readings.size(); ++i) {
      std::string path = at("topology.readings", i);
      only_keys(readings[i], path, {"meter", "tags", "wh"});
      std::string meter = id_at(readings[i], path, "meter");
      auto node = topo->find(meter);
      if (!node) throw ValidationError(at(path, "meter"), "unknown gateway '" + meter + "'");
      if (topo->nodes()[*node].role != GatewayRole::han) {
        throw ValidationError(at(path, "meter"), "readings attach to HAN gateways only");
      }
      std::vector<std::string> tags = strings_at(readings[i], path, "tags");
      std::optional<AttributeTag> tag;
      try {
        tag = AttributeTag::make(tags);
      } catch (const InvalidArgument& e) {
        throw ValidationError(at(path, "tags"), e.what());
      }
      if (!readings[i].contains("wh") || !readings[i].at("wh").is_number_unsigned()) {
        throw ValidationError(at(path, "wh"), "expected a non-negative integer");
      }
      spec.readings.push_back({meter, *tag, readings[i].at("wh").get<std::uint64_t>()});
    }
    s.topology = std::move(spec);
  }

  std::set<std::string> kdc_ids;
  const Json& kdcs = array_at(doc, "", "kdcs");
  for (std::size_t i = 0; i < kdcs.size(); ++i) {
    std::string path = at("kdcs", i);
    only_keys(kdcs[i], path, {"id", "attributes"});
    KdcSpec k{id_at(kdcs[i], path, "id"), strings_at(kdcs[i], path, "attributes")};
    if (!kdc_ids.insert(k.id).second) throw ValidationError(at(path, "id"), "duplicate KDC id");
    if (k.attributes.empty()) throw ValidationError(at(path, "attributes"), "a KDC needs at least one attribute");
    for (std::size_t j = 0; j < k.attributes.size(); ++j) {
      try {
        s.registry.claim(k.attributes[j], k.id);
      } catch (const InvalidArgument& e) {
        throw ValidationError(at(at(path, "attributes"), j), e.what());
      }
    }
    s.kdcs.push_back(std::move(k));
  }

  std::set<std::string> user_ids;
  const Json& users = array_at(doc, "", "users");
  for (std::size_t i = 0; i < users.size(); ++i) {
    std::string path = at("users", i);
    only_keys(users[i], path, {"id", "attributes"});
    UserSpec u{id_at(users[i], path, "id"), strings_at(users[i], path, "attributes")};
    if (!user_ids.insert(u.id).second) throw ValidationError(at(path, "id"), "duplicate user id");
    std::set<std::string> seen;
    for (std::size_t j = 0; j < u.attributes.size(); ++j) {
      std::string ap = at(at(path, "attributes"), j);
      if (!seen.insert(u.attributes[j]).second) throw ValidationError(ap, "duplicate attribute");
      if (!s.registry.owner(u.attributes[j])) {
        throw ValidationError(ap, "attribute '" + u.attributes[j] + "' is not owned by any KDC");
      }
    }
    s.users.push_back(std::move(u));
  }

  std::set<std::string> record_ids;
  const Json& records = array_at(doc, "", "records");
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string path = at("records", i);
    only_keys(records[i], path, {"id", "policy", "payload", "mode"});
    std::string id = id_at(records[i], path, "id");
    if (!record_ids.insert(id).second) throw ValidationError(at(path, "id"), "duplicate record id");
    std::string policy = string_at(records[i], path, "policy");
    std::optional<AccessTree> tree;
    try {
      tree = parse_policy(policy);
    } catch (const PolicySyntaxError& e) {
      throw ValidationError(at(path, "policy"), e.what());
    }
    for (const auto& leaf : tree->leaves()) {
      if (!s.registry.owner(leaf)) {
        throw ValidationError(at(path, "policy"), "attribute '" + leaf + "' is not owned by any KDC");
      }
    }
    PayloadMode mode = PayloadMode::kem;
    if (records[i].contains("mode")) {
      std::string m = string_at(records[i], path, "mode");
      if (m == "direct") {
        mode = PayloadMode::direct;
      } else if (m != "kem") {
        throw ValidationError(at(path, "mode"), "must be \"kem\" or \"direct\"");
      }
    }
    s.records.push_back({id, policy, std::move(*tree), mode, string_at(records[i], path, "payload")});
  }

  auto check_attempt = [&](const AttemptSpec& a, const std::string& path) {
    if (!user_ids.count(a.user)) throw ValidationError(at(path, "user"), "undeclared user '" + a.user + "'");
    if (!record_ids.count(a.record)) {
      throw ValidationError(at(path, "record"), "undeclared record '" + a.record + "'");
    }
  };
  const Json& attempts = array_at(doc, "", "attempts");
  for (std::size_t i = 0; i < attempts.size(); ++i) {
    auto a = parse_attempt(attempts[i], at("attempts", i));
    check_attempt(a, at("attempts", i));
    s.attempts.push_back(std::move(a));
  }

  const Json& revocations = array_at(doc, "", "revocations");
  for (std::size_t i = 0; i < revocations.size(); ++i) {
    std::string path = at("revocations", i);
    only_keys(revocations[i], path, {"record", "users", "attempts"});
    RevocationSpec r{id_at(revocations[i], path, "record"), strings_at(revocations[i], path, "users"), {}};
    if (!record_ids.count(r.record)) {
      throw ValidationError(at(path, "record"), "undeclared record '" + r.record + "'");
    }
    if (r.users.empty()) throw ValidationError(at(path, "users"), "revocation needs at least one user");
    for (std::size_t j = 0; j < r.users.size(); ++j) {
      if (!user_ids.count(r.users[j])) {
        throw ValidationError(at(at(path, "users"), j), "undeclared user '" + r.users[j] + "'");
      }
    }
    const Json& after = array_at(revocations[i], path, "attempts");
    for (std::size_t j = 0; j < after.size(); ++j) {
      auto a = parse_attempt(after[j], at(at(path, "attempts"), j));
      check_attempt(a, at(at(path, "attempts"), j));
      r.attempts.push_back(std::move(a));
    }
    s.revocations.push_back(std::move(r));
  }
  return s;
}

inline Scenario parse_scenario_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("$", std::string("not valid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

struct RunOptions {
  std::string backend = "reference";
  mpz_class q = PairingContext::default_order(160);
  HashAlgorithm hash = HashAlgorithm::sha256;
  // Absent: system randomness, and the report is not reproducible.
  std::optional<std::uint64_t> seed;
  bool aggregation_only = false;
  bool parallel_aggregation = false;
};

namespace detail {

inline Json big_number(const mpz_class& v) {
  if (v >= 0 && v.fits_ulong_p()) return Json(static_cast<std::uint64_t>(v.get_ui()));
  return Json(v.get_str());
}

inline Json counts_json(const OperationCounts& c) {
  return Json{{"pairings", c.pairings}, {"scalar_muls", c.scalar_muls}};
}

class ScenarioRun {
 public:
  ScenarioRun(const Scenario& s, const RunOptions& o)
      : s_(s), opts_(o), rng_(make_random(o.seed)) {
    report_ = Json{{"schema", kReportSchema},
                   {"scenario", s.name ? Json(*s.name) : Json(nullptr)},
                   {"seed", o.seed ? Json(*o.seed) : Json(nullptr)},
                   {"aggregation", nullptr},
                   {"kdcs", Json::array()},
                   {"users", Json::array()},
                   {"records", Json::array()},
                   {"attempts", Json::array()},
                   {"revocations", Json::array()},
                   {"notes", Json::array({"user-to-RTU commands are not modelled"})}};
  }

  Json run() {
    std::string phase = "aggregate";
    try {
      aggregate();
      if (!opts_.aggregation_only) {
        phase = "pairing";
        ctx_.emplace(opts_.backend, opts_.q, opts_.hash);
        report_["pairing"] = Json{{"backend", opts_.backend},
                                  {"q_bits", ctx_->q_bits()},
                                  {"hash", opts_.hash == HashAlgorithm::sha1 ? "sha1" : "sha256"}};
        phase = "setup";
        setup_kdcs();
        phase = "issue";
        issue_keys();
        phase = "encrypt";
        encrypt_records();
        phase = "attempt";
        for (const auto& a : s_.attempts) report_["attempts"].push_back(attempt(a, "initial"));
        phase = "revoke";
        for (std::size_t i = 0; i < s_.revocations.size(); ++i) revoke_round(i);
      }
      report_["status"] = "complete";
    } catch (const std::exception& e) {
      report_["status"] = "aborted";
      report_["error"] = Json{{"phase", phase}, {"message", e.what()}};
    }
    summarize();
    return report_;
  }

 private:
  void aggregate() {
    if (!s_.topology || s_.topology->nodes.empty()) return;
    const TopologySpec& t = *s_.topology;
    PaillierKeyPair kp = s_.paillier && s_.paillier->primes
                             ? paillier_keypair_from_primes(s_.paillier->primes->first, s_.paillier->primes->second)
                             : paillier_keygen(s_.paillier && s_.paillier->bits ? *s_.paillier->bits
                                                                                : kDefaultPaillierBits,
                                               *rng_);
    AggregationTopology topo(t.nodes);
    std::vector<MeterReading> readings;
    std::map<AttributeTag, mpz_class> oracle;
    for (const auto& r : t.readings) {
      readings.push_back({r.meter, r.tag, r.wh});
      oracle[r.tag] += mpz_class(std::to_string(r.wh));
    }
    std::uint64_t max_wh = 0;
    for (const auto& r : t.readings) max_wh = std::max(max_wh, r.wh);
    if (!aggregate_headroom_ok(kp.public_key, max_wh, readings.size())) {
      throw InvalidArgument("Paillier modulus too small for these readings");
    }
    auto packets = run_pipeline(topo, readings, kp.public_key, *rng_, {opts_.parallel_aggregation});
    Json aggregates = Json::array();
    for (const auto& p : packets) {
      auto opened = rtu_open(kp.secret_key, kp.public_key, p);
      bool ok = opened.total_wh == oracle[p.tag];
      all_sums_match_ = all_sums_match_ && ok;
      aggregates.push_back(Json{{"tag", p.tag.attributes()},
                                {"total_wh", big_number(opened.total_wh)},
                                {"matches_plaintext_sum", ok},
                                {"packet_sha256", to_hex(sha256(p.encode()))}});
    }
    report_["aggregation"] = Json{{"modulus_bits", kp.public_key.bits()},
                                  {"gateways", t.nodes.size()},
                                  {"meters", readings.size()},
                                  {"aggregates", aggregates}};
  }

  void setup_kdcs() {
    for (const auto& k : s_.kdcs) {
      kdcs_.emplace(k.id, kdc_setup(*ctx_, k.id, k.attributes, *rng_));
      kdcs_.at(k.id).publish_to(directory_);
      report_["kdcs"].push_back(Json{{"id", k.id}, {"attributes", kdcs_.at(k.id).attributes()}});
    }
  }

  void issue_keys() {
    for (const auto& u : s_.users) {
      UserKeyring ring(u.id);
      for (const auto& a : u.attributes) {
        const KdcKeyring& kdc = kdcs_.at(*s_.registry.owner(a));
        GElement key = issue_key(kdc, *ctx_, u.id, a);
        if (!verify_user_key(*ctx_, directory_.at(a), u.id, key)) {
          throw Error("issued key for '" + u.id + "', '" + a + "' failed verification");
        }
        ring.add(a, key);
      }
      keyrings_.emplace(u.id, std::move(ring));
      std::vector<std::string> attrs(u.attributes);
      std::sort(attrs.begin(), attrs.end());
      report_["users"].push_back(Json{{"id", u.id}, {"attributes", attrs}});
    }
  }

  void encrypt_records() {
    for (const auto& r : s_.records) {
      LsssProgram program = compile_lsss(r.tree, ctx_->field());
      std::optional<AbeEncryption> enc;
      OperationCounts c = measure_counters(*ctx_, [&] {
        enc = abe_encrypt(*ctx_, directory_, program, to_bytes(r.payload), *rng_, r.mode);
      });
      bool law = c.pairings == 1 && c.scalar_muls == 4 * program.row_count();
      counter_law_ = counter_law_ && law;
      Bytes stored = enc->ciphertext.encode(*ctx_);
      repository_.store(r.id, std::move(enc->ciphertext));
      sealed_.emplace(r.id, std::move(enc->secrets));
      report_["records"].push_back(Json{{"id", r.id},
                                        {"policy", r.tree.to_string()},
                                        {"mode", r.mode == PayloadMode::kem ? "kem" : "direct"},
                                        {"rows", program.row_count()},
                                        {"cols", program.col_count()},
                                        {"ciphertext_bytes", stored.size()},
                                        {"ciphertext_sha256", to_hex(sha256(stored))},
                                        {"encryption_counts", counts_json(c)},
                                        {"counter_law", law}});
    }
  }

  Json attempt(const AttemptSpec& a, const std::string& phase) {
    Json out{{"phase", phase}, {"user", a.user}, {"record", a.record}};
    AbeCiphertext ct = repository_.fetch(a.record);
    RowUpdates updates = repository_.updates_for(a.record, a.user);
    DecryptOutcome result;
    std::string reason;
    bool integrity_failure = false;
    OperationCounts c = measure_counters(*ctx_, [&] {
      try {
        result = abe_decrypt(*ctx_, keyrings_.at(a.user), ct, updates);
      } catch (const IntegrityError&) {
        integrity_failure = true;
      }
    });
    if (result.granted()) {
      out["outcome"] = "value";
      out["value"] = to_string(*result.payload);
    } else {
      out["outcome"] = "denied";
      out["reason"] = integrity_failure ? "integrity check failed" : "no authorized row set";
      ++denials_;
    }
    bool law = c.pairings == 2 * result.rows_used;
    counter_law_ = counter_law_ && law;
    out["rows_used"] = result.rows_used;
    out["counts"] = counts_json(c);
    out["counter_law"] = law;
    if (a.expect_granted) {
      bool ok = *a.expect_granted == result.granted();
      out["as_expected"] = ok;
      all_expected_ = all_expected_ && ok;
    }
    return out;
  }

  void revoke_round(std::size_t i) {
    const RevocationSpec& r = s_.revocations[i];
    std::vector<UserKeyring> revoked;
    for (const auto& u : r.users) {
      revoked.push_back(keyrings_.at(u));
      revoked_users_[r.record].insert(u);
    }
    AbeCiphertext ct = repository_.fetch(r.record);
    RevocationResult res = revoke(*ctx_, directory_, ct, sealed_.at(r.record), revoked, *rng_);
    Json withheld = Json::array();
    for (const auto& [row, c1] : res.out_of_band) withheld.push_back(row);
    Json deliveries = Json::array();
    for (const auto& [uid, ring] : keyrings_) {
      if (revoked_users_[r.record].count(uid)) continue;
      RowUpdates mine;
      for (const auto& [row, c1] : res.out_of_band) {
        if (ring.has(res.stored.program.attribute(row))) mine.insert_or_assign(row, c1);
      }
      if (mine.empty()) continue;
      repository_.deliver(r.record, uid, mine);
      Json rows = Json::array();
      for (const auto& [row, c1] : mine) rows.push_back(row);
      deliveries.push_back(Json{{"user", uid}, {"rows", rows}});
    }
    Bytes stored = res.stored.encode(*ctx_);
    repository_.store_revision(r.record, std::move(res.stored));
    Json attempts = Json::array();
    for (const auto& a : r.attempts) {
      Json out = attempt(a, "after_revocation");
      out["revocation"] = i;
      report_["attempts"].push_back(out);
    }
    std::vector<std::string> users(r.users);
    std::sort(users.begin(), users.end());
    report_["revocations"].push_back(Json{{"record", r.record},
                                          {"revoked", users},
                                          {"rows_withheld", withheld},
                                          {"deliveries", deliveries},
                                          {"ciphertext_sha256", to_hex(sha256(stored))},
                                          {"version", repository_.versions(r.record)}});
  }

  void summarize() {
    OperationCounts total = ctx_ ? ctx_->counts() : OperationCounts{};
    report_["summary"] = Json{{"counters", counts_json(total)},
                              {"counter_law_holds", counter_law_},
                              {"aggregates_match", all_sums_match_},
                              {"expectations_met", all_expected_},
                              {"denials", denials_}};
  }

  const Scenario& s_;
  const RunOptions& opts_;
  std::unique_ptr<RandomSource> rng_;
  std::optional<PairingContext> ctx_;
  std::map<std::string, KdcKeyring> kdcs_;
  PublicKeyDirectory directory_;
  std::map<std::string, UserKeyring> keyrings_;
  Repository repository_;
  // The authoring RTU's sealed store of encryption-time randomness.
  std::map<std::string, EncryptionSecrets> sealed_;
  std::map<std::string, std::set<std::string>> revoked_users_;
  Json report_;
  bool counter_law_ = true;
  bool all_sums_match_ = true;
  bool all_expected_ = true;
  std::size_t denials_ = 0;
};

}  // namespace detail

// Plays the scenario phase by phase: aggregate, set up KDCs, issue keys,
// encrypt, attempt decryptions, then each revocation with its re-attempts.
// A failing phase stops the run; the report then has status "aborted" and
// everything produced before the failure.
inline Json run_scenario(const Scenario& scenario, const RunOptions& options = {}) {
  return detail::ScenarioRun(scenario, options).run();
}

// Canonical report bytes: sorted keys, two-space indent, trailing newline.
inline std::string render_report(const Json& report) {
  return report.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

}  // namespace gridsec
