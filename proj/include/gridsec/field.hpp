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

#include <string>

#include "gridsec/error.hpp"
#include "gridsec/paillier.hpp"
#include "gridsec/random.hpp"

namespace gridsec {

// Element of Z_q. Always reduced into [0, q); only a PrimeField makes them.
class Scalar {
 public:
  Scalar() = default;

  const mpz_class& value() const { return value_; }
  bool is_zero() const { return value_ == 0; }
  std::string to_string() const { return value_.get_str(); }

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.value_ == b.value_; }

 private:
  friend class PrimeField;
  explicit Scalar(mpz_class v) : value_(std::move(v)) {}

  mpz_class value_;
};

// Arithmetic in Z_q for a prime q.
class PrimeField {
 public:
  explicit PrimeField(mpz_class q) : q_(std::move(q)) {
    if (!is_probable_prime(q_)) throw InvalidArgument("field order " + q_.get_str() + " is not prime");
  }

  const mpz_class& order() const { return q_; }
  std::size_t bits() const { return mpz_sizeinbase(q_.get_mpz_t(), 2); }

  Scalar from(const mpz_class& v) const {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), v.get_mpz_t(), q_.get_mpz_t());
    return Scalar(std::move(r));
  }
  Scalar from(long v) const { return from(mpz_class(v)); }

  Scalar zero() const { return Scalar(0); }
  Scalar one() const { return Scalar(1); }
  Scalar minus_one() const { return Scalar(q_ - 1); }

  Scalar add(const Scalar& a, const Scalar& b) const { return from(a.value() + b.value()); }
  Scalar sub(const Scalar& a, const Scalar& b) const { return from(a.value() - b.value()); }
  Scalar mul(const Scalar& a, const Scalar& b) const { return from(a.value() * b.value()); }
  Scalar neg(const Scalar& a) const { return from(-a.value()); }

  Scalar inverse(const Scalar& a) const {
    if (a.is_zero()) throw InvalidArgument("zero has no inverse in Z_q");
    mpz_class r;
    mpz_invert(r.get_mpz_t(), a.value().get_mpz_t(), q_.get_mpz_t());
    return Scalar(std::move(r));
  }

  Scalar random(RandomSource& rng) const { return Scalar(rng.below(q_)); }

  bool contains(const mpz_class& v) const { return v >= 0 && v < q_; }

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.q_ == b.q_; }

 private:
  mpz_class q_;
};

}  // namespace gridsec
