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

#pragma once

#include <gmpxx.h>
#include <openssl/rand.h>

#include <cstdint>
#include <memory>
#include <optional>

#include "gridsec/bytes.hpp"
#include "gridsec/error.hpp"

namespace gridsec {

// Source of randomness passed explicitly to every probabilistic operation.
// Implementations are not thread-safe; give each thread its own source.
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  // Uniform integer in [0, 2^bits).
  virtual mpz_class random_bits(std::size_t bits) = 0;

  // Uniform integer in [0, bound). Rejection sampling, so no modulo bias.
  mpz_class below(const mpz_class& bound) {
    if (bound <= 0) throw InvalidArgument("random bound must be positive");
    if (bound == 1) return 0;
    std::size_t bits = mpz_sizeinbase(mpz_class(bound - 1).get_mpz_t(), 2);
    for (;;) {
      mpz_class candidate = random_bits(bits);
      if (candidate < bound) return candidate;
    }
  }

  // Uniform integer in [low, high).
  mpz_class between(const mpz_class& low, const mpz_class& high) {
    if (high <= low) throw InvalidArgument("empty random range");
    return low + below(high - low);
  }

  Bytes bytes(std::size_t count) {
    Bytes out(count);
    mpz_class v = random_bits(count * 8);
    Bytes mag = integer_magnitude(v);
    std::copy(mag.begin(), mag.end(), out.end() - static_cast<std::ptrdiff_t>(mag.size()));
    return out;
  }

  std::uint64_t next_u64() { return random_bits(64).get_ui(); }
};

// Deterministic stream for reproducible runs (--seed). Not for production keys.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : state_(gmp_randinit_mt) {
    state_.seed(mpz_class(std::to_string(seed)));
  }

  mpz_class random_bits(std::size_t bits) override {
    if (bits == 0) return 0;
    return state_.get_z_bits(static_cast<mp_bitcnt_t>(bits));
  }

 private:
  gmp_randclass state_;
};

// Operating-system randomness through OpenSSL.
class SystemRandom final : public RandomSource {
 public:
  mpz_class random_bits(std::size_t bits) override {
    if (bits == 0) return 0;
    Bytes buf((bits + 7) / 8);
    if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) {
      throw Error("system randomness unavailable");
    }
    std::size_t excess = buf.size() * 8 - bits;
    buf[0] &= static_cast<std::uint8_t>(0xff >> excess);
    return integer_from_magnitude(buf);
  }
};

inline std::unique_ptr<RandomSource> make_random(std::optional<std::uint64_t> seed) {
  if (seed) return std::make_unique<SeededRandom>(*seed);
  return std::make_unique<SystemRandom>();
}

}  // namespace gridsec
