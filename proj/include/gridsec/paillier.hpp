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

// Paillier additively homomorphic encryption.
//
//   E(m) = g^m * r^N mod N^2
//   D(c) = L(c^lambda mod N^2) * mu mod N,  L(u) = (u - 1) / N,
//   mu   = L(g^lambda mod N^2)^-1 mod N
//
// Multiplying ciphertexts adds plaintexts modulo N. Keys and ciphertexts are
// immutable values; randomness is always passed in.

#pragma once

#include <gmpxx.h>

#include <span>

#include "gridsec/bytes.hpp"
#include "gridsec/error.hpp"
#include "gridsec/random.hpp"

namespace gridsec {

inline constexpr std::size_t kDefaultPaillierBits = 2048;
inline constexpr std::size_t kMinPaillierBits = 16;

// 40 Miller-Rabin rounds: false-prime probability <= 4^-40 = 2^-80.
inline constexpr int kPrimalityReps = 40;

inline bool is_probable_prime(const mpz_class& n) {
  return n > 1 && mpz_probab_prime_p(n.get_mpz_t(), kPrimalityReps) != 0;
}

class PaillierPublicKey {
 public:
  PaillierPublicKey(mpz_class n, mpz_class g) : n_(std::move(n)), g_(std::move(g)) {
    if (n_ <= 1) throw InvalidArgument("Paillier modulus must exceed 1");
    n_squared_ = n_ * n_;
    if (g_ <= 0 || g_ >= n_squared_) throw InvalidArgument("Paillier generator out of range");
    mpz_class d;
    mpz_gcd(d.get_mpz_t(), g_.get_mpz_t(), n_.get_mpz_t());
    if (d != 1) throw InvalidArgument("Paillier generator not a unit mod N^2");
  }

  const mpz_class& n() const { return n_; }
  const mpz_class& g() const { return g_; }
  const mpz_class& n_squared() const { return n_squared_; }
  std::size_t bits() const { return mpz_sizeinbase(n_.get_mpz_t(), 2); }

  // enc(N) || enc(g)
  Bytes encode() const {
    ByteWriter w;
    w.integer(n_);
    w.integer(g_);
    return std::move(w).bytes();
  }

  static PaillierPublicKey decode(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    mpz_class n = r.integer();
    mpz_class g = r.integer();
    r.expect_done();
    return PaillierPublicKey(std::move(n), std::move(g));
  }

  friend bool operator==(const PaillierPublicKey& a, const PaillierPublicKey& b) {
    return a.n_ == b.n_ && a.g_ == b.g_;
  }

 private:
  mpz_class n_;
  mpz_class g_;
  mpz_class n_squared_;
};

// L(u) = (u - 1) / N, defined only for u = 1 mod N.
inline mpz_class paillier_l(const mpz_class& u, const mpz_class& n) {
  mpz_class t = u - 1;
  if (!mpz_divisible_p(t.get_mpz_t(), n.get_mpz_t())) {
    throw MalformedCiphertext("L-function input is not 1 mod N");
  }
  return t / n;
}

class PaillierSecretKey {
 public:
  // Caches mu. Fails if g does not produce an invertible L(g^lambda).
  PaillierSecretKey(const PaillierPublicKey& pk, mpz_class lambda)
      : n_(pk.n()), lambda_(std::move(lambda)) {
    if (lambda_ <= 0) throw InvalidArgument("lambda must be positive");
    mpz_class u;
    mpz_powm(u.get_mpz_t(), pk.g().get_mpz_t(), lambda_.get_mpz_t(), pk.n_squared().get_mpz_t());
    mpz_class denom;
    try {
      denom = paillier_l(u, n_);
    } catch (const MalformedCiphertext&) {
      throw InvalidArgument("g^lambda is not 1 mod N; lambda does not match key");
    }
    if (mpz_invert(mu_.get_mpz_t(), denom.get_mpz_t(), n_.get_mpz_t()) == 0) {
      throw InvalidArgument("L(g^lambda) not invertible mod N; g has wrong order");
    }
  }

  const mpz_class& lambda() const { return lambda_; }
  const mpz_class& mu() const { return mu_; }
  const mpz_class& n() const { return n_; }

 private:
  mpz_class n_;
  mpz_class lambda_;
  mpz_class mu_;
};

class PaillierCiphertext {
 public:
  PaillierCiphertext(const PaillierPublicKey& pk, mpz_class c) : n_(pk.n()), value_(std::move(c)) {
    if (value_ <= 0 || value_ >= pk.n_squared()) {
      throw MalformedCiphertext("ciphertext outside (0, N^2)");
    }
    mpz_class d;
    mpz_gcd(d.get_mpz_t(), value_.get_mpz_t(), n_.get_mpz_t());
    if (d != 1) throw MalformedCiphertext("ciphertext shares a factor with N");
  }

  const mpz_class& value() const { return value_; }
  const mpz_class& modulus() const { return n_; }

  Bytes encode() const {
    ByteWriter w;
    w.integer(value_);
    return std::move(w).bytes();
  }

  static PaillierCiphertext decode(const PaillierPublicKey& pk, std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    mpz_class c = r.integer();
    r.expect_done();
    return PaillierCiphertext(pk, std::move(c));
  }

  friend bool operator==(const PaillierCiphertext& a, const PaillierCiphertext& b) {
    return a.n_ == b.n_ && a.value_ == b.value_;
  }

 private:
  mpz_class n_;
  mpz_class value_;
};

struct PaillierKeyPair {
  PaillierPublicKey public_key;
  PaillierSecretKey secret_key;
};

// Deterministic key pair from chosen primes, g = N + 1. Used for test
// vectors and for scenario files that pin their primes.
inline PaillierKeyPair paillier_keypair_from_primes(const mpz_class& q1, const mpz_class& q2) {
  if (!is_probable_prime(q1) || !is_probable_prime(q2)) {
    throw InvalidArgument("Paillier factors must be prime");
  }
  if (q1 == q2) throw InvalidArgument("Paillier factors must be distinct");
  mpz_class n = q1 * q2;
  mpz_class lambda;
  mpz_class a = q1 - 1;
  mpz_class b = q2 - 1;
  mpz_lcm(lambda.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  PaillierPublicKey pk(n, n + 1);
  PaillierSecretKey sk(pk, lambda);
  return {std::move(pk), std::move(sk)};
}

namespace detail {

// Random prime with exactly `bits` bits and the top two bits set, so that
// the product of two such primes has exactly bits_a + bits_b bits.
inline mpz_class random_prime_top2(std::size_t bits, RandomSource& rng, int budget) {
  for (int attempt = 0; attempt < budget; ++attempt) {
    mpz_class c = rng.random_bits(bits);
    mpz_setbit(c.get_mpz_t(), bits - 1);
    mpz_setbit(c.get_mpz_t(), bits - 2);
    mpz_setbit(c.get_mpz_t(), 0);
    if (is_probable_prime(c)) return c;
  }
  throw Error("prime generation exceeded retry budget");
}

}  // namespace detail

inline PaillierKeyPair paillier_keygen(std::size_t bits, RandomSource& rng) {
  if (bits < kMinPaillierBits) throw InvalidArgument("Paillier modulus needs at least 16 bits");
  const std::size_t bits_a = (bits + 1) / 2;
  const std::size_t bits_b = bits - bits_a;
  // Generous: prime density near 2^1024 is ~1/710 per odd candidate.
  const int budget = 100 * static_cast<int>(bits) + 1000;
  for (int attempt = 0; attempt < 64; ++attempt) {
    mpz_class q1 = detail::random_prime_top2(bits_a, rng, budget);
    mpz_class q2 = detail::random_prime_top2(bits_b, rng, budget);
    if (q1 == q2) continue;
    // gcd(N, (q1-1)(q2-1)) = 1 keeps lambda well-defined for g = N + 1.
    mpz_class phi = (q1 - 1) * (q2 - 1);
    mpz_class n = q1 * q2;
    mpz_class d;
    mpz_gcd(d.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
    if (d != 1) continue;
    return paillier_keypair_from_primes(q1, q2);
  }
  throw Error("prime generation exceeded retry budget");
}

// Deterministic encryption with a caller-chosen randomizer r in Z_N^*.
inline PaillierCiphertext paillier_encrypt_with(const PaillierPublicKey& pk, const mpz_class& m,
                                                const mpz_class& r) {
  if (m < 0 || m >= pk.n()) throw InvalidArgument("plaintext outside Z_N");
  mpz_class d;
  mpz_gcd(d.get_mpz_t(), r.get_mpz_t(), pk.n().get_mpz_t());
  if (r <= 0 || r >= pk.n() || d != 1) throw InvalidArgument("randomizer not in Z_N^*");
  const mpz_class& nn = pk.n_squared();
  mpz_class gm;
  if (pk.g() == pk.n() + 1) {
    gm = (1 + m * pk.n()) % nn;  // (1+N)^m = 1 + mN mod N^2
  } else {
    mpz_powm(gm.get_mpz_t(), pk.g().get_mpz_t(), m.get_mpz_t(), nn.get_mpz_t());
  }
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.n().get_mpz_t(), nn.get_mpz_t());
  return PaillierCiphertext(pk, (gm * rn) % nn);
}

inline PaillierCiphertext paillier_encrypt(const PaillierPublicKey& pk, const mpz_class& m,
                                           RandomSource& rng) {
  if (m < 0 || m >= pk.n()) throw InvalidArgument("plaintext outside Z_N");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    mpz_class r = rng.between(1, pk.n());
    mpz_class d;
    mpz_gcd(d.get_mpz_t(), r.get_mpz_t(), pk.n().get_mpz_t());
    if (d == 1) return paillier_encrypt_with(pk, m, r);
  }
  throw Error("randomness exhausted while sampling r in Z_N^*");
}

inline mpz_class paillier_decrypt(const PaillierSecretKey& sk, const PaillierPublicKey& pk,
                                  const PaillierCiphertext& c) {
  if (sk.n() != pk.n() || c.modulus() != pk.n()) {
    throw ModulusMismatch("ciphertext or secret key not under this public key");
  }
  mpz_class u;
  mpz_powm(u.get_mpz_t(), c.value().get_mpz_t(), sk.lambda().get_mpz_t(),
           pk.n_squared().get_mpz_t());
  mpz_class m = (paillier_l(u, pk.n()) * sk.mu()) % pk.n();
  return m;
}

inline PaillierCiphertext paillier_add(const PaillierPublicKey& pk, const PaillierCiphertext& c1,
                                       const PaillierCiphertext& c2) {
  if (c1.modulus() != pk.n() || c2.modulus() != pk.n()) {
    throw ModulusMismatch("ciphertexts under different Paillier moduli");
  }
  return PaillierCiphertext(pk, (c1.value() * c2.value()) % pk.n_squared());
}

}  // namespace gridsec
