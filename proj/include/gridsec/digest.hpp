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

// Thin RAII wrappers over OpenSSL for hashing and the AEAD used by the
// key-encapsulation payload mode.

#pragma once

#include <openssl/evp.h>

#include <memory>
#include <span>

#include "gridsec/bytes.hpp"
#include "gridsec/error.hpp"

namespace gridsec {

enum class HashAlgorithm : std::uint8_t { sha256 = 0, sha1 = 1 };

inline Bytes digest(HashAlgorithm algorithm, std::span<const std::uint8_t> data) {
  const EVP_MD* md = algorithm == HashAlgorithm::sha1 ? EVP_sha1() : EVP_sha256();
  Bytes out(static_cast<std::size_t>(EVP_MD_size(md)));
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr) != 1) {
    throw Error("digest computation failed");
  }
  out.resize(len);
  return out;
}

inline Bytes sha256(std::span<const std::uint8_t> data) {
  return digest(HashAlgorithm::sha256, data);
}

struct SealedBox {
  Bytes nonce;
  Bytes body;
  Bytes tag;
};

namespace detail {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

inline CipherCtx new_cipher_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw Error("EVP_CIPHER_CTX_new failed");
  return ctx;
}

}  // namespace detail

inline constexpr std::size_t kAeadKeySize = 32;
inline constexpr std::size_t kAeadNonceSize = 12;
inline constexpr std::size_t kAeadTagSize = 16;

// ChaCha20-Poly1305 (RFC 8439). `key` must be 32 bytes, `nonce` 12 bytes.
inline SealedBox aead_seal(std::span<const std::uint8_t> key, Bytes nonce,
                           std::span<const std::uint8_t> plaintext) {
  if (key.size() != kAeadKeySize || nonce.size() != kAeadNonceSize) {
    throw InvalidArgument("bad AEAD key or nonce size");
  }
  auto ctx = detail::new_cipher_ctx();
  SealedBox box{std::move(nonce), Bytes(plaintext.size()), Bytes(kAeadTagSize)};
  int len = 0;
  bool ok = EVP_EncryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, key.data(),
                               box.nonce.data()) == 1;
  if (ok && !plaintext.empty()) {
    ok = EVP_EncryptUpdate(ctx.get(), box.body.data(), &len, plaintext.data(),
                           static_cast<int>(plaintext.size())) == 1;
  }
  ok = ok && EVP_EncryptFinal_ex(ctx.get(), box.body.data() + len, &len) == 1;
  ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, kAeadTagSize,
                                 box.tag.data()) == 1;
  if (!ok) throw Error("AEAD seal failed");
  return box;
}

inline Bytes aead_open(std::span<const std::uint8_t> key, const SealedBox& box) {
  if (key.size() != kAeadKeySize || box.nonce.size() != kAeadNonceSize ||
      box.tag.size() != kAeadTagSize) {
    throw IntegrityError("bad AEAD key, nonce or tag size");
  }
  auto ctx = detail::new_cipher_ctx();
  Bytes plain(box.body.size());
  Bytes tag = box.tag;
  int len = 0;
  bool ok = EVP_DecryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, key.data(),
                               box.nonce.data()) == 1;
  if (ok && !box.body.empty()) {
    ok = EVP_DecryptUpdate(ctx.get(), plain.data(), &len, box.body.data(),
                           static_cast<int>(box.body.size())) == 1;
  }
  ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, kAeadTagSize, tag.data()) == 1;
  if (!ok) throw Error("AEAD open failed");
  if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + len, &len) != 1) {
    throw IntegrityError("authentication tag mismatch");
  }
  return plain;
}

}  // namespace gridsec
