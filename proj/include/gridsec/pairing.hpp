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

// Symmetric bilinear group (G, G_T, e, g) of prime order q behind a
// swappable backend.
//
// A PairingBackend works on canonical element encodings; PairingContext wraps
// it with typed elements, domain checks and operation counters. Counter
// semantics: every exponentiation in G or G_T (including one simultaneous
// multi-exponentiation) counts as one scalar multiplication; products,
// inverses and hashing are free; every pairing evaluation counts as one
// pairing.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridsec/bytes.hpp"
#include "gridsec/digest.hpp"
#include "gridsec/error.hpp"
#include "gridsec/field.hpp"
#include "gridsec/random.hpp"

namespace gridsec {

enum class GroupKind : std::uint8_t { g, gt };

// Stable one-byte backend identifiers used in element encodings.
enum class BackendId : std::uint8_t { none = 0, reference = 1 };

// The boundary a pairing-curve provider implements. All element arguments
// and results are canonical encodings; equality of encodings is equality of
// elements.
class PairingBackend {
 public:
  virtual ~PairingBackend() = default;

  virtual BackendId id() const = 0;
  virtual std::string name() const = 0;
  virtual const mpz_class& order() const = 0;

  virtual Bytes generator() const = 0;  // g in G
  virtual Bytes identity(GroupKind kind) const = 0;
  virtual Bytes mul(GroupKind kind, const Bytes& a, const Bytes& b) const = 0;
  virtual Bytes inverse(GroupKind kind, const Bytes& a) const = 0;
  virtual Bytes exp(GroupKind kind, const Bytes& base, const mpz_class& k) const = 0;
  virtual Bytes pair(const Bytes& p, const Bytes& q) const = 0;
  virtual Bytes hash_to_g(std::span<const std::uint8_t> id, HashAlgorithm algorithm) const = 0;

  // True iff `bytes` is the canonical encoding of an element of `kind`.
  virtual bool is_canonical(GroupKind kind, std::span<const std::uint8_t> bytes) const = 0;

  // Wire size of an element, used by the communication-cost estimate.
  virtual std::size_t element_bits(GroupKind kind) const = 0;

  // Injective embedding of a short message into G_T, if the backend has one.
  virtual std::optional<Bytes> embed_in_gt(std::span<const std::uint8_t> message) const {
    (void)message;
    return std::nullopt;
  }
};

template <GroupKind Kind>
class GroupElement {
 public:
  // Detached placeholder; every context operation rejects it.
  GroupElement() = default;

  const Bytes& bytes() const { return repr_; }
  const PairingBackend* backend() const { return backend_; }

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.backend_ == b.backend_ && a.repr_ == b.repr_;
  }

 private:
  friend class PairingContext;
  GroupElement(const PairingBackend* backend, Bytes repr) : backend_(backend), repr_(std::move(repr)) {}

  const PairingBackend* backend_ = nullptr;
  Bytes repr_;
};

using GElement = GroupElement<GroupKind::g>;
using GtElement = GroupElement<GroupKind::gt>;

struct OperationCounts {
  std::uint64_t pairings = 0;
  std::uint64_t scalar_muls = 0;

  friend OperationCounts operator-(const OperationCounts& a, const OperationCounts& b) {
    return {a.pairings - b.pairings, a.scalar_muls - b.scalar_muls};
  }
  friend OperationCounts operator+(const OperationCounts& a, const OperationCounts& b) {
    return {a.pairings + b.pairings, a.scalar_muls + b.scalar_muls};
  }
  friend bool operator==(const OperationCounts&, const OperationCounts&) = default;
};

using BackendFactory = std::function<std::shared_ptr<const PairingBackend>(const mpz_class& q)>;

// Process-wide table of backend factories keyed by name ("reference", or a
// curve provider that registers itself).
class BackendRegistry {
 public:
  static BackendRegistry& instance() {
    static BackendRegistry registry;
    return registry;
  }

  void add(const std::string& name, BackendFactory factory) {
    std::lock_guard lock(mu_);
    factories_[name] = std::move(factory);
  }

  std::shared_ptr<const PairingBackend> create(const std::string& name, const mpz_class& q) const {
    std::lock_guard lock(mu_);
    auto it = factories_.find(name);
    if (it == factories_.end()) throw InvalidArgument("unknown pairing backend '" + name + "'");
    return it->second(q);
  }

  std::vector<std::string> names() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [name, f] : factories_) out.push_back(name);
    return out;
  }

 private:
  BackendRegistry();

  mutable std::mutex mu_;
  std::map<std::string, BackendFactory> factories_;
};

class PairingContext {
 public:
  // Validates q, builds the backend and runs a randomized bilinearity and
  // non-degeneracy self-test (counters are zero afterwards).
  PairingContext(const std::string& backend_name, const mpz_class& q,
                 HashAlgorithm hash = HashAlgorithm::sha256, int self_test_rounds = 100)
      : field_(q), hash_(hash), counters_(std::make_unique<Counters>()) {
    backend_ = BackendRegistry::instance().create(backend_name, q);
    if (backend_->order() != q) throw Error("backend order does not match requested q");
    generator_ = backend_->generator();
    self_test(self_test_rounds);
  }

  // Smallest prime >= 2^(bits-1): a deterministic q of exactly `bits` bits,
  // so independent processes agree on the group.
  static mpz_class default_order(std::size_t bits) {
    if (bits < 2) throw InvalidArgument("group order needs at least 2 bits");
    mpz_class start;
    mpz_ui_pow_ui(start.get_mpz_t(), 2, bits - 1);
    if (is_probable_prime(start)) return start;
    mpz_class q;
    mpz_nextprime(q.get_mpz_t(), start.get_mpz_t());
    while (!is_probable_prime(q)) mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
    return q;
  }

  PairingContext(PairingContext&&) noexcept = default;
  PairingContext& operator=(PairingContext&&) noexcept = default;

  const PrimeField& field() const { return field_; }
  const mpz_class& order() const { return field_.order(); }
  std::size_t q_bits() const { return field_.bits(); }
  HashAlgorithm hash_algorithm() const { return hash_; }
  const PairingBackend& backend() const { return *backend_; }
  BackendId backend_id() const { return backend_->id(); }

  GElement generator() const { return GElement(backend_.get(), generator_); }
  GElement g_identity() const { return GElement(backend_.get(), backend_->identity(GroupKind::g)); }
  GtElement gt_identity() const {
    return GtElement(backend_.get(), backend_->identity(GroupKind::gt));
  }

  GElement g_exp(const GElement& base, const Scalar& k) const {
    check(base);
    counters_->scalar_muls.fetch_add(1, std::memory_order_relaxed);
    return GElement(backend_.get(), backend_->exp(GroupKind::g, base.bytes(), k.value()));
  }

  GtElement gt_exp(const GtElement& base, const Scalar& k) const {
    check(base);
    counters_->scalar_muls.fetch_add(1, std::memory_order_relaxed);
    return GtElement(backend_.get(), backend_->exp(GroupKind::gt, base.bytes(), k.value()));
  }

  GElement g_mul(const GElement& a, const GElement& b) const {
    check(a);
    check(b);
    return GElement(backend_.get(), backend_->mul(GroupKind::g, a.bytes(), b.bytes()));
  }

  GtElement gt_mul(const GtElement& a, const GtElement& b) const {
    check(a);
    check(b);
    return GtElement(backend_.get(), backend_->mul(GroupKind::gt, a.bytes(), b.bytes()));
  }

  GElement g_inv(const GElement& a) const {
    check(a);
    return GElement(backend_.get(), backend_->inverse(GroupKind::g, a.bytes()));
  }

  GtElement gt_inv(const GtElement& a) const {
    check(a);
    return GtElement(backend_.get(), backend_->inverse(GroupKind::gt, a.bytes()));
  }

  GtElement gt_div(const GtElement& a, const GtElement& b) const { return gt_mul(a, gt_inv(b)); }

  // prod_i base_i^k_i in G, counted as a single scalar multiplication.
  GElement g_multi_exp(std::span<const std::pair<GElement, Scalar>> terms) const {
    Bytes acc = backend_->identity(GroupKind::g);
    for (const auto& [base, k] : terms) {
      check(base);
      acc = backend_->mul(GroupKind::g, acc, backend_->exp(GroupKind::g, base.bytes(), k.value()));
    }
    counters_->scalar_muls.fetch_add(1, std::memory_order_relaxed);
    return GElement(backend_.get(), std::move(acc));
  }

  GtElement pair(const GElement& p, const GElement& q) const {
    check(p);
    check(q);
    counters_->pairings.fetch_add(1, std::memory_order_relaxed);
    return GtElement(backend_.get(), backend_->pair(p.bytes(), q.bytes()));
  }

  GElement hash_to_g(std::span<const std::uint8_t> id) const {
    return GElement(backend_.get(), backend_->hash_to_g(id, hash_));
  }
  GElement hash_to_g(std::string_view id) const { return hash_to_g(to_bytes(id)); }

  std::optional<GtElement> embed_in_gt(std::span<const std::uint8_t> message) const {
    auto repr = backend_->embed_in_gt(message);
    if (!repr) return std::nullopt;
    return GtElement(backend_.get(), std::move(*repr));
  }

  // Backend id byte, then the length-prefixed canonical element bytes.
  template <GroupKind Kind>
  void encode(ByteWriter& w, const GroupElement<Kind>& e) const {
    check(e);
    w.u8(static_cast<std::uint8_t>(backend_->id()));
    w.blob(e.bytes());
  }

  template <GroupKind Kind>
  Bytes encode(const GroupElement<Kind>& e) const {
    ByteWriter w;
    encode(w, e);
    return std::move(w).bytes();
  }

  template <GroupKind Kind>
  GroupElement<Kind> decode(ByteReader& r) const {
    auto id = r.u8();
    if (id != static_cast<std::uint8_t>(backend_->id())) {
      throw BackendMismatch("element encoded for a different pairing backend");
    }
    Bytes repr = r.blob_bytes();
    if (!backend_->is_canonical(Kind, repr)) throw DecodeError("non-canonical group element");
    return GroupElement<Kind>(backend_.get(), std::move(repr));
  }

  GElement decode_g(std::span<const std::uint8_t> bytes) const {
    ByteReader r(bytes);
    auto e = decode<GroupKind::g>(r);
    r.expect_done();
    return e;
  }

  GtElement decode_gt(std::span<const std::uint8_t> bytes) const {
    ByteReader r(bytes);
    auto e = decode<GroupKind::gt>(r);
    r.expect_done();
    return e;
  }

  std::size_t element_bits(GroupKind kind) const { return backend_->element_bits(kind); }

  OperationCounts counts() const {
    return {counters_->pairings.load(std::memory_order_relaxed),
            counters_->scalar_muls.load(std::memory_order_relaxed)};
  }

  void reset_counters() const {
    counters_->pairings.store(0, std::memory_order_relaxed);
    counters_->scalar_muls.store(0, std::memory_order_relaxed);
  }

  // Bilinearity e(aP, bQ) = e(P, Q)^(ab) and e(g, g) != 1 on random inputs.
  bool check_axioms(int rounds, RandomSource& rng) const {
    if (pair(generator(), generator()) == gt_identity()) return false;
    for (int i = 0; i < rounds; ++i) {
      Scalar a = field_.random(rng);
      Scalar b = field_.random(rng);
      GElement p = g_exp(generator(), field_.random(rng));
      GElement q = g_exp(generator(), field_.random(rng));
      GtElement lhs = pair(g_exp(p, a), g_exp(q, b));
      GtElement rhs = gt_exp(pair(p, q), field_.mul(a, b));
      if (!(lhs == rhs)) return false;
    }
    return true;
  }

 private:
  struct Counters {
    std::atomic<std::uint64_t> pairings{0};
    std::atomic<std::uint64_t> scalar_muls{0};
  };

  template <GroupKind Kind>
  void check(const GroupElement<Kind>& e) const {
    if (e.backend() != backend_.get()) {
      throw BackendMismatch("group element belongs to another pairing context");
    }
  }

  void self_test(int rounds) {
    SeededRandom rng(0x5e1f7e57);
    if (!check_axioms(rounds, rng)) throw Error("pairing backend failed its bilinearity self-test");
    reset_counters();
  }

  std::shared_ptr<const PairingBackend> backend_;
  PrimeField field_;
  HashAlgorithm hash_;
  Bytes generator_;
  std::unique_ptr<Counters> counters_;
};

}  // namespace gridsec

#include "gridsec/reference_backend.hpp"
