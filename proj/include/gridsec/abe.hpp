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

// Decentralized multi-authority ciphertext-policy ABE.
//
// Each key distribution center (KDC) owns a disjoint set of attributes and,
// per attribute i, secrets (alpha_i, y_i) with public shares
// (e(g,g)^alpha_i, g^y_i). A user u holding attribute i gets
// sk_{i,u} = g^alpha_i * H(u)^y_i.
//
// Encryption under an LSSS program (R, pi) with v = (s, ...), w = (0, ...):
//   lambda_x = R_x . v,  omega_x = R_x . w,  fresh rho_x per row
//   C0   = M * e(g,g)^s
//   C1,x = e(g,g)^lambda_x * e(g,g)^(alpha_pi(x) rho_x)
//   C2,x = g^rho_x
//   C3,x = g^(y_pi(x) rho_x) * g^omega_x
// Decryption over an authorized row set X' with sum k_x R_x = (1,0,...,0):
//   dec(x) = C1,x * e(H(u), C3,x) / e(sk_{pi(x),u}, C2,x)
//          = e(g,g)^lambda_x * e(H(u),g)^omega_x
//   e(g,g)^s = prod dec(x)^k_x
// The H(u) factors cancel only when every key carries the same identity,
// which is what stops users from pooling keys.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gridsec/bytes.hpp"
#include "gridsec/digest.hpp"
#include "gridsec/error.hpp"
#include "gridsec/lsss.hpp"
#include "gridsec/pairing.hpp"
#include "gridsec/random.hpp"

namespace gridsec {

struct AttributeSecret {
  Scalar alpha;
  Scalar y;
};

// Published per-attribute share: (e(g,g)^alpha, g^y).
struct AttributePublicKey {
  GtElement e_gg_alpha;
  GElement g_y;
};

// Attribute -> public share, gathered from every KDC's publication.
using PublicKeyDirectory = std::map<std::string, AttributePublicKey>;

class KdcKeyring {
 public:
  KdcKeyring(std::string id, std::map<std::string, AttributeSecret> secrets,
             std::map<std::string, AttributePublicKey> public_keys)
      : id_(std::move(id)), secrets_(std::move(secrets)), public_keys_(std::move(public_keys)) {}

  const std::string& id() const { return id_; }
  const std::map<std::string, AttributeSecret>& secrets() const { return secrets_; }
  const std::map<std::string, AttributePublicKey>& public_keys() const { return public_keys_; }

  bool owns(const std::string& attribute) const { return secrets_.count(attribute) != 0; }

  std::vector<std::string> attributes() const {
    std::vector<std::string> out;
    for (const auto& [a, s] : secrets_) out.push_back(a);
    return out;
  }

  // Recomputes every public share from its secret.
  bool consistent(const PairingContext& ctx) const {
    if (secrets_.size() != public_keys_.size()) return false;
    GtElement e_gg = ctx.pair(ctx.generator(), ctx.generator());
    for (const auto& [attr, secret] : secrets_) {
      auto it = public_keys_.find(attr);
      if (it == public_keys_.end()) return false;
      if (!(ctx.gt_exp(e_gg, secret.alpha) == it->second.e_gg_alpha)) return false;
      if (!(ctx.g_exp(ctx.generator(), secret.y) == it->second.g_y)) return false;
    }
    return true;
  }

  void publish_to(PublicKeyDirectory& directory) const {
    for (const auto& [attr, pk] : public_keys_) directory.insert_or_assign(attr, pk);
  }

 private:
  std::string id_;
  std::map<std::string, AttributeSecret> secrets_;
  std::map<std::string, AttributePublicKey> public_keys_;
};

inline KdcKeyring kdc_setup(const PairingContext& ctx, std::string kdc_id,
                            const std::vector<std::string>& attributes, RandomSource& rng) {
  if (attributes.empty()) throw InvalidArgument("KDC '" + kdc_id + "' needs at least one attribute");
  GtElement e_gg = ctx.pair(ctx.generator(), ctx.generator());
  std::map<std::string, AttributeSecret> secrets;
  std::map<std::string, AttributePublicKey> publics;
  for (const auto& attr : attributes) {
    if (attr.empty()) throw InvalidArgument("empty attribute name");
    if (secrets.count(attr) != 0) throw InvalidArgument("attribute '" + attr + "' listed twice");
    AttributeSecret s{ctx.field().random(rng), ctx.field().random(rng)};
    publics.emplace(attr, AttributePublicKey{ctx.gt_exp(e_gg, s.alpha),
                                             ctx.g_exp(ctx.generator(), s.y)});
    secrets.emplace(attr, std::move(s));
  }
  return KdcKeyring(std::move(kdc_id), std::move(secrets), std::move(publics));
}

// sk_{i,u} = g^alpha_i * H(u)^y_i. Deterministic in (kdc, user, attribute).
inline GElement issue_key(const KdcKeyring& kdc, const PairingContext& ctx,
                          const std::string& user_id, const std::string& attribute) {
  auto it = kdc.secrets().find(attribute);
  if (it == kdc.secrets().end()) {
    throw InvalidArgument("KDC '" + kdc.id() + "' does not own attribute '" + attribute + "'");
  }
  GElement hu = ctx.hash_to_g(user_id);
  return ctx.g_mul(ctx.g_exp(ctx.generator(), it->second.alpha), ctx.g_exp(hu, it->second.y));
}

// e(sk, g) == e(g,g)^alpha * e(H(u), g^y)
inline bool verify_user_key(const PairingContext& ctx, const AttributePublicKey& share,
                            const std::string& user_id, const GElement& key) {
  GtElement lhs = ctx.pair(key, ctx.generator());
  GtElement rhs = ctx.gt_mul(share.e_gg_alpha, ctx.pair(ctx.hash_to_g(user_id), share.g_y));
  return lhs == rhs;
}

class UserKeyring {
 public:
  explicit UserKeyring(std::string user_id) : user_id_(std::move(user_id)) {}

  const std::string& user_id() const { return user_id_; }
  const std::map<std::string, GElement>& keys() const { return keys_; }

  void add(const std::string& attribute, GElement key) { keys_.insert_or_assign(attribute, std::move(key)); }

  bool has(const std::string& attribute) const { return keys_.count(attribute) != 0; }

  std::set<std::string> attributes() const {
    std::set<std::string> out;
    for (const auto& [a, k] : keys_) out.insert(a);
    return out;
  }

 private:
  std::string user_id_;
  std::map<std::string, GElement> keys_;
};

enum class PayloadMode : std::uint8_t {
  // C0 = M * e(g,g)^s with M an element of G_T.
  direct = 0,
  // AEAD body keyed by SHA-256 of the encoded e(g,g)^s. C0 is the G_T
  // identity: publishing e(g,g)^s would publish the key.
  kem = 1,
};

struct RowCiphertext {
  // Absent after a revocation moved this row's value to out-of-band delivery.
  std::optional<GtElement> c1;
  GElement c2;
  GElement c3;
};

struct AbeCiphertext {
  LsssProgram program;
  PayloadMode mode = PayloadMode::kem;
  GtElement c0;
  std::vector<RowCiphertext> rows;
  SealedBox box;  // kem mode only

  // LSSS block, mode byte, C0, per-row (C1, C2, C3), then for kem mode the
  // length-prefixed nonce, body and tag. An absent C1 is written as backend
  // id 0 with an empty body.
  Bytes encode(const PairingContext& ctx) const {
    ByteWriter w;
    program.encode_to(w);
    w.u8(static_cast<std::uint8_t>(mode));
    ctx.encode(w, c0);
    for (const auto& row : rows) {
      if (row.c1) {
        ctx.encode(w, *row.c1);
      } else {
        w.u8(static_cast<std::uint8_t>(BackendId::none));
        w.u32(0);
      }
      ctx.encode(w, row.c2);
      ctx.encode(w, row.c3);
    }
    if (mode == PayloadMode::kem) {
      w.blob(box.nonce);
      w.blob(box.body);
      w.blob(box.tag);
    }
    return std::move(w).bytes();
  }

  static AbeCiphertext decode(const PairingContext& ctx, std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    LsssProgram program = LsssProgram::decode_from(r, ctx.field());
    std::uint8_t mode = r.u8();
    if (mode > static_cast<std::uint8_t>(PayloadMode::kem)) throw DecodeError("unknown payload mode");
    GtElement c0 = ctx.decode<GroupKind::gt>(r);
    std::vector<RowCiphertext> rows;
    rows.reserve(program.row_count());
    for (std::size_t x = 0; x < program.row_count(); ++x) {
      RowCiphertext row;
      ByteReader probe = r;
      if (probe.u8() == static_cast<std::uint8_t>(BackendId::none)) {
        if (probe.u32() != 0) throw DecodeError("absent C1 marker carries data");
        r = probe;
      } else {
        row.c1 = ctx.decode<GroupKind::gt>(r);
      }
      row.c2 = ctx.decode<GroupKind::g>(r);
      row.c3 = ctx.decode<GroupKind::g>(r);
      rows.push_back(std::move(row));
    }
    SealedBox box;
    if (mode == static_cast<std::uint8_t>(PayloadMode::kem)) {
      box.nonce = r.blob_bytes();
      box.body = r.blob_bytes();
      box.tag = r.blob_bytes();
    }
    r.expect_done();
    return AbeCiphertext{std::move(program), static_cast<PayloadMode>(mode), std::move(c0),
                         std::move(rows), std::move(box)};
  }
};

// Encryption-time randomness the authoring RTU keeps in its sealed store so
// it can later revoke. v[0] is the current secret s; w[0] is 0.
struct EncryptionSecrets {
  std::vector<Scalar> v;
  std::vector<Scalar> w;
  std::vector<Scalar> rho;
};

struct AbeEncryption {
  AbeCiphertext ciphertext;
  EncryptionSecrets secrets;
};

// Row index -> replacement C1,x delivered out of band after a revocation.
using RowUpdates = std::map<std::size_t, GtElement>;

namespace detail {

inline Scalar dot(const PrimeField& f, const std::vector<Scalar>& row, const std::vector<Scalar>& v) {
  Scalar acc = f.zero();
  for (std::size_t j = 0; j < row.size(); ++j) acc = f.add(acc, f.mul(row[j], v[j]));
  return acc;
}

// prod base_x^k_x where k_x = 1 and k_x = -1 cost only a product or an
// inverse; any other coefficient costs a counted exponentiation.
inline GtElement combine(const PairingContext& ctx, const ReconstructionCoefficients& coefficients,
                         const std::function<GtElement(std::size_t)>& base) {
  const PrimeField& f = ctx.field();
  GtElement acc = ctx.gt_identity();
  for (const auto& term : coefficients) {
    GtElement b = base(term.row);
    if (term.coefficient == f.one()) {
      acc = ctx.gt_mul(acc, b);
    } else if (term.coefficient == f.minus_one()) {
      acc = ctx.gt_div(acc, b);
    } else {
      acc = ctx.gt_mul(acc, ctx.gt_exp(b, term.coefficient));
    }
  }
  return acc;
}

// e(g,g)^s rebuilt from the per-row e(g,g)^lambda_x over a minimal
// authorized row set; falls back to exponentiating e(g,g) when the program
// has no +-1 reconstruction.
inline GtElement blinding_from_shares(const PairingContext& ctx, const LsssProgram& program,
                                      const std::vector<GtElement>& lambda_powers,
                                      const GtElement& e_gg, const Scalar& s) {
  std::vector<std::size_t> all(program.row_count());
  for (std::size_t x = 0; x < all.size(); ++x) all[x] = x;
  auto k = solve_reconstruction_rows(program, all);
  const PrimeField& f = ctx.field();
  bool unit = k.has_value();
  if (unit) {
    for (const auto& term : *k) {
      if (!(term.coefficient == f.one() || term.coefficient == f.minus_one())) unit = false;
    }
  }
  if (!unit) return ctx.gt_exp(e_gg, s);
  return combine(ctx, *k, [&](std::size_t x) { return lambda_powers[x]; });
}

inline Bytes kem_key(const PairingContext& ctx, const GtElement& blinding) {
  return sha256(ctx.encode(blinding));
}

}  // namespace detail

// Core encryption. Costs one pairing (e(g,g)) and 4 scalar multiplications
// per row: e(g,g)^lambda_x, (e(g,g)^alpha)^rho_x, g^rho_x and the
// two-base multi-exponentiation (g^y)^rho_x * g^omega_x.
inline AbeEncryption abe_encrypt_element(const PairingContext& ctx,
                                         const PublicKeyDirectory& directory,
                                         const LsssProgram& program, PayloadMode mode,
                                         const GtElement& message, std::span<const std::uint8_t> body,
                                         RandomSource& rng) {
  const PrimeField& f = ctx.field();
  if (!(program.field() == f)) throw InvalidArgument("LSSS program built over a different Z_q");
  if (program.row_count() == 0) throw InvalidArgument("LSSS program has no rows");
  std::vector<const AttributePublicKey*> shares;
  for (const auto& attr : program.attributes()) {
    auto it = directory.find(attr);
    if (it == directory.end()) throw InvalidArgument("no published key for attribute '" + attr + "'");
    shares.push_back(&it->second);
  }

  const std::size_t h = program.col_count();
  EncryptionSecrets secrets;
  secrets.v.reserve(h);
  secrets.w.reserve(h);
  for (std::size_t j = 0; j < h; ++j) {
    secrets.v.push_back(f.random(rng));
    secrets.w.push_back(j == 0 ? f.zero() : f.random(rng));
  }

  GElement g = ctx.generator();
  GtElement e_gg = ctx.pair(g, g);
  AbeCiphertext ct{program, mode, ctx.gt_identity(), {}, {}};
  ct.rows.reserve(program.row_count());
  std::vector<GtElement> lambda_powers;
  lambda_powers.reserve(program.row_count());
  for (std::size_t x = 0; x < program.row_count(); ++x) {
    Scalar lambda = detail::dot(f, program.row(x), secrets.v);
    Scalar omega = detail::dot(f, program.row(x), secrets.w);
    Scalar rho = f.random(rng);
    secrets.rho.push_back(rho);

    lambda_powers.push_back(ctx.gt_exp(e_gg, lambda));
    RowCiphertext row;
    row.c1 = ctx.gt_mul(lambda_powers.back(), ctx.gt_exp(shares[x]->e_gg_alpha, rho));
    row.c2 = ctx.g_exp(g, rho);
    const std::pair<GElement, Scalar> terms[] = {{shares[x]->g_y, rho}, {g, omega}};
    row.c3 = ctx.g_multi_exp(terms);
    ct.rows.push_back(std::move(row));
  }

  GtElement blinding = detail::blinding_from_shares(ctx, program, lambda_powers, e_gg, secrets.v[0]);
  if (mode == PayloadMode::direct) {
    ct.c0 = ctx.gt_mul(message, blinding);
  } else {
    ct.box = aead_seal(detail::kem_key(ctx, blinding), rng.bytes(kAeadNonceSize), body);
  }
  return AbeEncryption{std::move(ct), std::move(secrets)};
}

// Direct mode: the payload is a G_T element.
inline AbeEncryption abe_encrypt_direct(const PairingContext& ctx, const PublicKeyDirectory& directory,
                                        const LsssProgram& program, const GtElement& message,
                                        RandomSource& rng) {
  return abe_encrypt_element(ctx, directory, program, PayloadMode::direct, message, {}, rng);
}

// Encrypts arbitrary bytes. Direct mode embeds them into G_T and fails when
// they do not fit; kem mode seals them under an AEAD.
inline AbeEncryption abe_encrypt(const PairingContext& ctx, const PublicKeyDirectory& directory,
                                 const LsssProgram& program, std::span<const std::uint8_t> payload,
                                 RandomSource& rng, PayloadMode mode = PayloadMode::kem) {
  if (mode == PayloadMode::direct) {
    auto m = ctx.embed_in_gt(payload);
    if (!m) throw InvalidArgument("payload too large for direct mode");
    return abe_encrypt_direct(ctx, directory, program, *m, rng);
  }
  return abe_encrypt_element(ctx, directory, program, PayloadMode::kem, ctx.gt_identity(), payload,
                             rng);
}

struct DecryptOutcome {
  // Direct mode: canonical bytes of the recovered G_T element. Kem mode: the
  // payload. Empty when access is denied.
  std::optional<Bytes> payload;
  // |X'|: rows whose dec(x) entered the reconstruction (2 pairings each).
  std::size_t rows_used = 0;

  bool granted() const { return payload.has_value(); }
};

// e(g,g)^s from the keyring, or nothing when the usable rows do not span
// (1,0,...,0). Rows count as usable when the keyring holds the row's
// attribute and a C1 value is available (stored or in `updates`).
inline std::optional<GtElement> recover_blinding(const PairingContext& ctx, const UserKeyring& keyring,
                                                 const AbeCiphertext& ct, const RowUpdates& updates,
                                                 std::size_t* rows_used = nullptr) {
  if (rows_used) *rows_used = 0;
  const LsssProgram& program = ct.program;
  if (ct.rows.size() != program.row_count()) throw MalformedCiphertext("row count does not match R");
  auto c1_for = [&](std::size_t x) -> const GtElement* {
    auto it = updates.find(x);
    if (it != updates.end()) return &it->second;
    return ct.rows[x].c1 ? &*ct.rows[x].c1 : nullptr;
  };
  std::vector<std::size_t> usable;
  for (std::size_t x = 0; x < program.row_count(); ++x) {
    if (keyring.has(program.attribute(x)) && c1_for(x) != nullptr) usable.push_back(x);
  }
  auto k = solve_reconstruction_rows(program, usable);
  if (!k) return std::nullopt;
  if (!verify_reconstruction(program, *k)) throw Error("reconstruction coefficients failed to verify");
  if (rows_used) *rows_used = k->size();

  GElement hu = ctx.hash_to_g(keyring.user_id());
  return detail::combine(ctx, *k, [&](std::size_t x) {
    const RowCiphertext& row = ct.rows[x];
    const GElement& sk = keyring.keys().at(program.attribute(x));
    GtElement numerator = ctx.gt_mul(*c1_for(x), ctx.pair(hu, row.c3));
    return ctx.gt_div(numerator, ctx.pair(sk, row.c2));
  });
}

// Throws IntegrityError when a kem-mode tag does not verify.
inline DecryptOutcome abe_decrypt(const PairingContext& ctx, const UserKeyring& keyring,
                                  const AbeCiphertext& ct, const RowUpdates& updates = {}) {
  DecryptOutcome out;
  auto blinding = recover_blinding(ctx, keyring, ct, updates, &out.rows_used);
  if (!blinding) return out;
  if (ct.mode == PayloadMode::direct) {
    out.payload = ctx.gt_div(ct.c0, *blinding).bytes();
  } else {
    out.payload = aead_open(detail::kem_key(ctx, *blinding), ct.box);
  }
  return out;
}

// Two users pool their keys under the first user's identity. Returns what
// that pooled decryption yields: denial, an integrity failure reported as
// denial, or (direct mode) an element that is not the payload.
inline DecryptOutcome combine_keyrings_attack(const PairingContext& ctx, const UserKeyring& first,
                                              const UserKeyring& second, const AbeCiphertext& ct) {
  UserKeyring pooled(first.user_id());
  for (const auto& [attr, key] : second.keys()) pooled.add(attr, key);
  for (const auto& [attr, key] : first.keys()) pooled.add(attr, key);
  try {
    return abe_decrypt(ctx, pooled, ct);
  } catch (const IntegrityError&) {
    return DecryptOutcome{};
  }
}

struct RevocationResult {
  // New C0 (or re-sealed body); revoked-attribute rows have no stored C1.
  AbeCiphertext stored;
  // Fresh C1,x for the revoked-attribute rows, for non-revoked holders only.
  RowUpdates out_of_band;
};

// Refreshes s. Rows whose attribute a revoked user holds (or that an
// earlier revocation already withheld) get a new C1 that is only delivered
// out of band; every other row whose share depends on s
// (R_x1 != 0) is refreshed in place. `secrets` is updated to the new s.
inline RevocationResult revoke(const PairingContext& ctx, const PublicKeyDirectory& directory,
                               const AbeCiphertext& ct, EncryptionSecrets& secrets,
                               std::span<const UserKeyring> revoked, RandomSource& rng) {
  if (revoked.empty()) throw InvalidArgument("revocation needs at least one user");
  const PrimeField& f = ctx.field();
  const LsssProgram& program = ct.program;
  if (secrets.v.size() != program.col_count() || secrets.rho.size() != program.row_count()) {
    throw InvalidArgument("encryption secrets do not match this ciphertext");
  }
  std::set<std::string> revoked_attrs;
  for (const auto& k : revoked) {
    auto a = k.attributes();
    revoked_attrs.insert(a.begin(), a.end());
  }

  GElement g = ctx.generator();
  GtElement e_gg = ctx.pair(g, g);
  Scalar s_old = secrets.v[0];
  Scalar s_new = f.random(rng);
  while (s_new == s_old) s_new = f.random(rng);
  GtElement old_blinding = ctx.gt_exp(e_gg, s_old);
  GtElement new_blinding = ctx.gt_exp(e_gg, s_new);
  secrets.v[0] = s_new;

  RevocationResult result{ct, {}};
  for (std::size_t x = 0; x < program.row_count(); ++x) {
    // A row already withheld by an earlier revocation stays withheld.
    bool revoked_row = revoked_attrs.count(program.attribute(x)) != 0 || !ct.rows[x].c1;
    bool depends_on_s = !program.entry(x, 0).is_zero();
    if (!revoked_row && !depends_on_s) continue;
    const AttributePublicKey& share = directory.at(program.attribute(x));
    Scalar lambda = detail::dot(f, program.row(x), secrets.v);
    GtElement c1 = ctx.gt_mul(ctx.gt_exp(e_gg, lambda), ctx.gt_exp(share.e_gg_alpha, secrets.rho[x]));
    if (revoked_row) {
      result.out_of_band.insert_or_assign(x, c1);
      result.stored.rows[x].c1.reset();
    } else {
      result.stored.rows[x].c1 = c1;
    }
  }

  if (ct.mode == PayloadMode::direct) {
    result.stored.c0 = ctx.gt_mul(ctx.gt_div(ct.c0, old_blinding), new_blinding);
  } else {
    Bytes body = aead_open(detail::kem_key(ctx, old_blinding), ct.box);
    result.stored.box = aead_seal(detail::kem_key(ctx, new_blinding), rng.bytes(kAeadNonceSize), body);
  }
  return result;
}

}  // namespace gridsec
