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

// Transparent discrete-log pairing group.
//
// An element of G is stored as its exponent a (standing for g^a) and an
// element of G_T as its exponent b (standing for e(g,g)^b), both in Z_q. The
// group law is exponent addition, exponentiation is exponent multiplication
// and e(g^a, g^b) = e(g,g)^(ab). Every algebraic axiom holds exactly, which
// makes protocol algebra testable, but discrete logs are public: this
// backend provides no security whatsoever.

#pragma once

#include "gridsec/pairing.hpp"

namespace gridsec {

class ReferenceBackend final : public PairingBackend {
 public:
  explicit ReferenceBackend(mpz_class q) : q_(std::move(q)) {
    if (!is_probable_prime(q_)) throw InvalidArgument("group order " + q_.get_str() + " is not prime");
  }

  BackendId id() const override { return BackendId::reference; }
  std::string name() const override { return "reference"; }
  const mpz_class& order() const override { return q_; }

  Bytes generator() const override { return integer_magnitude(1); }
  Bytes identity(GroupKind) const override { return {}; }

  Bytes mul(GroupKind, const Bytes& a, const Bytes& b) const override {
    return reduce(exponent(a) + exponent(b));
  }

  Bytes inverse(GroupKind, const Bytes& a) const override { return reduce(-exponent(a)); }

  Bytes exp(GroupKind, const Bytes& base, const mpz_class& k) const override {
    return reduce(exponent(base) * k);
  }

  Bytes pair(const Bytes& p, const Bytes& q) const override {
    return reduce(exponent(p) * exponent(q));
  }

  // g^(digest(id) mod q)
  Bytes hash_to_g(std::span<const std::uint8_t> id, HashAlgorithm algorithm) const override {
    return reduce(integer_from_magnitude(digest(algorithm, id)));
  }

  bool is_canonical(GroupKind, std::span<const std::uint8_t> bytes) const override {
    if (!bytes.empty() && bytes[0] == 0) return false;
    return integer_from_magnitude(bytes) < q_;
  }

  std::size_t element_bits(GroupKind) const override {
    return mpz_sizeinbase(q_.get_mpz_t(), 2);
  }

  // Message bytes read as a big-endian integer; must be canonical and < q.
  std::optional<Bytes> embed_in_gt(std::span<const std::uint8_t> message) const override {
    if (!is_canonical(GroupKind::gt, message)) return std::nullopt;
    return Bytes(message.begin(), message.end());
  }

  // Exponent carried by an element encoding (test introspection only).
  static mpz_class exponent(std::span<const std::uint8_t> bytes) {
    return integer_from_magnitude(bytes);
  }

 private:
  Bytes reduce(const mpz_class& v) const {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), v.get_mpz_t(), q_.get_mpz_t());
    return integer_magnitude(r);
  }

  mpz_class q_;
};

inline BackendRegistry::BackendRegistry() {
  factories_["reference"] = [](const mpz_class& q) {
    return std::make_shared<const ReferenceBackend>(q);
  };
}

}  // namespace gridsec
