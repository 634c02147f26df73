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

// Hierarchical aggregation of encrypted meter readings.
//
// Meters encrypt readings under the substation RTU's Paillier key and tag
// them with an attribute set. HAN, BAN and NAN gateways multiply together the
// ciphertexts that carry the same tag and forward one packet per tag; only
// the RTU holds the secret key. No gateway function takes a secret key.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridsec/bytes.hpp"
#include "gridsec/error.hpp"
#include "gridsec/paillier.hpp"
#include "gridsec/random.hpp"

namespace gridsec {

// Canonical attribute set: trimmed identifiers, sorted, no duplicates.
class AttributeTag {
 public:
  static AttributeTag make(std::vector<std::string> attributes) {
    for (auto& a : attributes) a = trim(a);
    if (attributes.empty()) throw InvalidArgument("attribute tag must be non-empty");
    std::sort(attributes.begin(), attributes.end());
    for (std::size_t i = 0; i < attributes.size(); ++i) {
      if (attributes[i].empty()) throw InvalidArgument("empty attribute identifier in tag");
      if (i > 0 && attributes[i] == attributes[i - 1]) {
        throw InvalidArgument("duplicate attribute '" + attributes[i] + "' in tag");
      }
    }
    return AttributeTag(std::move(attributes));
  }

  const std::vector<std::string>& attributes() const { return attributes_; }

  // 2-byte count, then per attribute a 2-byte length and UTF-8 bytes.
  void encode_to(ByteWriter& w) const {
    if (attributes_.size() > UINT16_MAX) throw InvalidArgument("too many attributes in tag");
    w.u16(static_cast<std::uint16_t>(attributes_.size()));
    for (const auto& a : attributes_) w.short_blob(a);
  }

  static AttributeTag decode_from(ByteReader& r) {
    std::uint16_t count = r.u16();
    std::vector<std::string> attrs;
    attrs.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) attrs.push_back(r.short_blob_string());
    AttributeTag tag = make(attrs);
    if (tag.attributes_ != attrs) throw DecodeError("tag block is not in canonical form");
    return tag;
  }

  std::string to_string() const {
    std::string out;
    for (const auto& a : attributes_) {
      if (!out.empty()) out += ',';
      out += a;
    }
    return out;
  }

  friend auto operator<=>(const AttributeTag&, const AttributeTag&) = default;
  friend bool operator==(const AttributeTag&, const AttributeTag&) = default;

 private:
  explicit AttributeTag(std::vector<std::string> attrs) : attributes_(std::move(attrs)) {}

  static std::string trim(const std::string& s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    auto b = std::find_if(s.begin(), s.end(), not_space);
    auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
    return b < e ? std::string(b, e) : std::string();
  }

  std::vector<std::string> attributes_;
};

struct MeterPacket {
  AttributeTag tag;
  PaillierCiphertext ciphertext;

  // tag-block || enc(c)
  Bytes encode() const {
    ByteWriter w;
    tag.encode_to(w);
    w.integer(ciphertext.value());
    return std::move(w).bytes();
  }

  static MeterPacket decode(const PaillierPublicKey& pk, std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    AttributeTag tag = AttributeTag::decode_from(r);
    mpz_class c = r.integer();
    r.expect_done();
    return MeterPacket{std::move(tag), PaillierCiphertext(pk, std::move(c))};
  }
};

inline MeterPacket make_packet(const PaillierPublicKey& pk, AttributeTag tag,
                               std::uint64_t reading_wh, RandomSource& rng) {
  mpz_class m(std::to_string(reading_wh));
  if (m >= pk.n()) throw InvalidArgument("reading does not fit in Z_N");
  return MeterPacket{std::move(tag), paillier_encrypt(pk, m, rng)};
}

// One output packet per distinct tag, ordered by tag. Each output ciphertext
// is the product mod N^2 of all inputs with that tag; a tag seen once is
// forwarded unchanged (no re-randomization).
inline std::vector<MeterPacket> gateway_aggregate(std::span<const MeterPacket> packets,
                                                  const PaillierPublicKey& pk) {
  std::map<AttributeTag, PaillierCiphertext> by_tag;
  for (const auto& p : packets) {
    if (p.ciphertext.modulus() != pk.n()) {
      throw ModulusMismatch("packet ciphertext not under the aggregation key");
    }
    auto it = by_tag.find(p.tag);
    if (it == by_tag.end()) {
      by_tag.emplace(p.tag, p.ciphertext);
    } else {
      it->second = paillier_add(pk, it->second, p.ciphertext);
    }
  }
  std::vector<MeterPacket> out;
  out.reserve(by_tag.size());
  for (auto& [tag, c] : by_tag) out.push_back(MeterPacket{tag, c});
  return out;
}

enum class GatewayRole { han, ban, nan };

inline std::string_view role_name(GatewayRole role) {
  switch (role) {
    case GatewayRole::han: return "HAN";
    case GatewayRole::ban: return "BAN";
    case GatewayRole::nan: return "NAN";
  }
  return "?";
}

inline GatewayRole parse_role(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  if (u == "HAN") return GatewayRole::han;
  if (u == "BAN") return GatewayRole::ban;
  if (u == "NAN") return GatewayRole::nan;
  throw InvalidArgument("unknown gateway role '" + std::string(s) + "'");
}

// Rooted gateway tree: a single NAN root, BAN interior nodes (which may nest)
// and HAN leaves. Readings attach to HAN leaves only.
class AggregationTopology {
 public:
  struct Node {
    std::string id;
    GatewayRole role;
    std::optional<std::string> parent;
  };

  // Validates the whole tree; throws InvalidArgument describing the defect.
  explicit AggregationTopology(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].id.empty()) throw InvalidArgument("gateway with empty id");
      if (!index.emplace(nodes_[i].id, i).second) {
        throw InvalidArgument("duplicate gateway id '" + nodes_[i].id + "'");
      }
    }
    children_.assign(nodes_.size(), {});
    std::optional<std::size_t> root;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      if (!n.parent) {
        if (n.role != GatewayRole::nan) {
          throw InvalidArgument("gateway '" + n.id + "' has no parent but is not NAN");
        }
        if (root) throw InvalidArgument("topology has more than one root");
        root = i;
        continue;
      }
      if (n.role == GatewayRole::nan) {
        throw InvalidArgument("NAN gateway '" + n.id + "' must be the root");
      }
      auto p = index.find(*n.parent);
      if (p == index.end()) {
        throw InvalidArgument("gateway '" + n.id + "' names unknown parent '" + *n.parent + "'");
      }
      if (nodes_[p->second].role == GatewayRole::han) {
        throw InvalidArgument("HAN gateway '" + *n.parent + "' cannot have children");
      }
      children_[p->second].push_back(i);
    }
    if (nodes_.empty()) return;
    if (!root) throw InvalidArgument("topology has no NAN root");
    root_ = *root;
    // Reachability from the root rules out cycles among the non-root nodes.
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::size_t> stack{root_};
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      seen[i] = true;
      for (auto c : children_[i]) stack.push_back(c);
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!seen[i]) throw InvalidArgument("gateway '" + nodes_[i].id + "' is on a cycle");
      if (children_[i].empty() && nodes_[i].role != GatewayRole::han) {
        throw InvalidArgument("leaf gateway '" + nodes_[i].id + "' must be a HAN");
      }
    }
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }
  std::size_t root() const { return root_; }
  const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }

  std::optional<std::size_t> find(const std::string& id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].id == id) return i;
    }
    return std::nullopt;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<std::vector<std::size_t>> children_;
  std::size_t root_ = 0;
};

struct MeterReading {
  std::string han_id;
  AttributeTag tag;
  std::uint64_t value_wh;
};

struct PipelineOptions {
  // Evaluate sibling subtrees on separate threads. Results are identical to
  // sequential evaluation.
  bool parallel = false;
};

namespace detail {

inline std::vector<MeterPacket> aggregate_subtree(
    const AggregationTopology& topo, std::size_t node,
    const std::vector<std::vector<MeterPacket>>& meter_packets, const PaillierPublicKey& pk,
    bool parallel) {
  std::vector<MeterPacket> inbound = meter_packets[node];
  const auto& kids = topo.children(node);
  if (parallel && kids.size() > 1) {
    std::vector<std::future<std::vector<MeterPacket>>> futures;
    for (auto c : kids) {
      futures.push_back(std::async(std::launch::async, [&, c] {
        return aggregate_subtree(topo, c, meter_packets, pk, false);
      }));
    }
    for (auto& f : futures) {
      auto part = f.get();
      inbound.insert(inbound.end(), part.begin(), part.end());
    }
  } else {
    for (auto c : kids) {
      auto part = aggregate_subtree(topo, c, meter_packets, pk, parallel);
      inbound.insert(inbound.end(), part.begin(), part.end());
    }
  }
  return gateway_aggregate(inbound, pk);
}

}  // namespace detail

// Encrypts every reading (in input order, so a seeded source reproduces the
// same ciphertexts), then folds gateway_aggregate from the HAN leaves up to
// the NAN root. Returns the packets the root forwards to the RTU.
inline std::vector<MeterPacket> run_pipeline(const AggregationTopology& topology,
                                             std::span<const MeterReading> readings,
                                             const PaillierPublicKey& pk, RandomSource& rng,
                                             PipelineOptions options = {}) {
  if (topology.empty()) {
    if (!readings.empty()) throw InvalidArgument("readings given for an empty topology");
    return {};
  }
  std::vector<std::vector<MeterPacket>> meter_packets(topology.nodes().size());
  for (const auto& r : readings) {
    auto i = topology.find(r.han_id);
    if (!i) throw InvalidArgument("reading attached to unknown gateway '" + r.han_id + "'");
    if (topology.nodes()[*i].role != GatewayRole::han) {
      throw InvalidArgument("reading attached to non-HAN gateway '" + r.han_id + "'");
    }
    meter_packets[*i].push_back(make_packet(pk, r.tag, r.value_wh, rng));
  }
  return detail::aggregate_subtree(topology, topology.root(), meter_packets, pk, options.parallel);
}

struct OpenedAggregate {
  AttributeTag tag;
  mpz_class total_wh;
};

inline OpenedAggregate rtu_open(const PaillierSecretKey& sk, const PaillierPublicKey& pk,
                                const MeterPacket& packet) {
  return OpenedAggregate{packet.tag, paillier_decrypt(sk, pk, packet.ciphertext)};
}

// False when max_reading * meter_count could wrap modulo N.
inline bool aggregate_headroom_ok(const PaillierPublicKey& pk, std::uint64_t max_reading_wh,
                                  std::size_t meter_count) {
  mpz_class worst = mpz_class(std::to_string(max_reading_wh)) * mpz_class(std::to_string(meter_count));
  return worst < pk.n();
}

}  // namespace gridsec
