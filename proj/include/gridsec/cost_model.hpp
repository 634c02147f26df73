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

// Operation-count cost accounting for decryption and ciphertext size.

#pragma once

#include <cstdint>
#include <utility>

#include "gridsec/error.hpp"
#include "gridsec/pairing.hpp"

namespace gridsec {

struct CostModel {
  double pairing_ms = 4.5;     // T_p
  double scalar_mul_ms = 0.6;  // T_m
};

// (2m + 1) T_p + 5m T_m for an m-attribute policy.
inline double predict_cost(const CostModel& model, long m) {
  if (m < 1) throw InvalidArgument("attribute count must be at least 1");
  return static_cast<double>(2 * m + 1) * model.pairing_ms + static_cast<double>(5 * m) * model.scalar_mul_ms;
}

// Counts priced under the model: pairings T_p each, scalar muls T_m each.
inline double price_counts(const CostModel& model, const OperationCounts& counts) {
  return static_cast<double>(counts.pairings) * model.pairing_ms +
         static_cast<double>(counts.scalar_muls) * model.scalar_mul_ms;
}

struct CommOverheadInput {
  std::uint64_t m = 0;              // rows of R
  std::uint64_t g_bits = 0;         // |G|
  std::uint64_t gt_bits = 0;        // |G_T|
  std::uint64_t universe_size = 1;  // w
  std::uint64_t data_bits = 0;      // |Data|
};

// ceil(log2 w), with w = 1 giving 0.
inline std::uint64_t ceil_log2(std::uint64_t w) {
  if (w == 0) throw InvalidArgument("universe size must be positive");
  std::uint64_t bits = 0;
  while ((std::uint64_t{1} << bits) < w) ++bits;
  return bits;
}

// m^2 + m(|G_T| + 2|G|) + |G_T| + ceil(log2 w) + |Data| bits.
inline std::uint64_t estimate_comm_overhead(const CommOverheadInput& in) {
  return in.m * in.m + in.m * (in.gt_bits + 2 * in.g_bits) + in.gt_bits + ceil_log2(in.universe_size) +
         in.data_bits;
}

inline CommOverheadInput comm_input_for(const PairingContext& ctx, std::uint64_t m, std::uint64_t universe_size,
                                        std::uint64_t data_bits) {
  return {m, ctx.element_bits(GroupKind::g), ctx.element_bits(GroupKind::gt), universe_size, data_bits};
}

// Counter deltas across run(). Assumes nothing else uses ctx meanwhile.
template <class F>
OperationCounts measure_counters(const PairingContext& ctx, F&& run) {
  OperationCounts before = ctx.counts();
  std::forward<F>(run)();
  return ctx.counts() - before;
}

}  // namespace gridsec
