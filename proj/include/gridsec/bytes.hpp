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

// Wire encoding helpers shared by every module.
//
// Integers are written as a 4-byte big-endian length followed by the
// big-endian magnitude (no sign byte; zero has an empty magnitude). Strings
// use the same length prefix unless a caller needs the 2-byte form used by
// the packet tag block.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridsec/error.hpp"

namespace gridsec {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline std::string to_string(std::span<const std::uint8_t> b) {
  return std::string(b.begin(), b.end());
}

// Big-endian magnitude with no leading zero bytes.
inline Bytes integer_magnitude(const mpz_class& value) {
  if (sgn(value) < 0) throw InvalidArgument("negative integers are not encodable");
  if (value == 0) return {};
  std::size_t count = (mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8;
  Bytes out(count);
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, value.get_mpz_t());
  out.resize(written);
  return out;
}

inline mpz_class integer_from_magnitude(std::span<const std::uint8_t> bytes) {
  mpz_class value;
  if (!bytes.empty()) mpz_import(value.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return value;
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

inline Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw DecodeError("hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }

  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }

  void u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
      out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
  }

  void raw(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  // 4-byte length prefix + payload.
  void blob(std::span<const std::uint8_t> b) {
    if (b.size() > UINT32_MAX) throw InvalidArgument("blob too large to encode");
    u32(static_cast<std::uint32_t>(b.size()));
    raw(b);
  }

  void blob(std::string_view s) {
    blob(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  }

  void integer(const mpz_class& v) { blob(integer_magnitude(v)); }

  // 2-byte length prefix + payload.
  void short_blob(std::string_view s) {
    if (s.size() > UINT16_MAX) throw InvalidArgument("string too long for 2-byte length");
    u16(static_cast<std::uint16_t>(s.size()));
    raw(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  }

  const Bytes& bytes() const& { return out_; }
  Bytes bytes() && { return std::move(out_); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return take(1)[0]; }

  std::uint16_t u16() {
    auto b = take(2);
    return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
  }

  std::uint32_t u32() {
    auto b = take(4);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
           (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
  }

  std::span<const std::uint8_t> blob() { return take(u32()); }

  Bytes blob_bytes() {
    auto b = blob();
    return Bytes(b.begin(), b.end());
  }

  std::string blob_string() { return to_string(blob()); }

  std::string short_blob_string() { return to_string(take(u16())); }

  mpz_class integer() { return integer_from_magnitude(blob()); }

  bool done() const { return pos_ == in_.size(); }

  void expect_done() const {
    if (!done()) throw DecodeError("trailing bytes after encoded value");
  }

 private:
  std::span<const std::uint8_t> take(std::size_t n) {
    if (in_.size() - pos_ < n) throw DecodeError("unexpected end of input");
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace gridsec
