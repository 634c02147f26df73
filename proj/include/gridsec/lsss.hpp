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

// Monotone access policies and their linear secret-sharing programs.
//
//   parse_policy          text -> binary AND/OR access tree
//   compile_lsss          access tree -> share-generating matrix R with a
//                         row-to-attribute map
//   solve_reconstruction  attribute set -> coefficients k_x with
//                         sum k_x R_x = (1, 0, ..., 0) over Z_q, if any

#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridsec/bytes.hpp"
#include "gridsec/error.hpp"
#include "gridsec/field.hpp"

namespace gridsec {

enum class GateKind : std::uint8_t { leaf, and_gate, or_gate };

// Binary tree of AND/OR gates over attribute leaves, stored as a flat node
// array so it copies and compares like a value.
class AccessTree {
 public:
  struct Node {
    GateKind kind = GateKind::leaf;
    std::string attribute;  // leaves only
    std::size_t left = 0;   // gates only
    std::size_t right = 0;
  };

  static AccessTree leaf(std::string attribute) {
    if (attribute.empty()) throw InvalidArgument("empty attribute in access tree");
    AccessTree t;
    t.nodes_.push_back(Node{GateKind::leaf, std::move(attribute), 0, 0});
    t.root_ = 0;
    return t;
  }

  static AccessTree gate(GateKind kind, const AccessTree& left, const AccessTree& right) {
    if (kind == GateKind::leaf) throw InvalidArgument("gate kind must be AND or OR");
    AccessTree t;
    std::size_t l = t.graft(left, left.root_);
    std::size_t r = t.graft(right, right.root_);
    t.nodes_.push_back(Node{kind, {}, l, r});
    t.root_ = t.nodes_.size() - 1;
    return t;
  }

  static AccessTree make_and(const AccessTree& l, const AccessTree& r) {
    return gate(GateKind::and_gate, l, r);
  }
  static AccessTree make_or(const AccessTree& l, const AccessTree& r) {
    return gate(GateKind::or_gate, l, r);
  }

  std::size_t root() const { return root_; }
  const Node& node(std::size_t i) const { return nodes_.at(i); }

  std::size_t leaf_count() const { return count(GateKind::leaf); }
  std::size_t and_count() const { return count(GateKind::and_gate); }

  // Leaf attributes in depth-first, left-to-right order.
  std::vector<std::string> leaves() const {
    std::vector<std::string> out;
    visit(root_, [&](const Node& n) {
      if (n.kind == GateKind::leaf) out.push_back(n.attribute);
    });
    return out;
  }

  bool evaluate(const std::set<std::string>& attributes) const { return eval(root_, attributes); }

  // Fully parenthesized form, e.g. "((a & b) | c)"; reparses to an equal tree.
  std::string to_string() const { return print(root_); }

  friend bool operator==(const AccessTree& a, const AccessTree& b) {
    return same(a, a.root_, b, b.root_);
  }

 private:
  AccessTree() = default;

  std::size_t graft(const AccessTree& other, std::size_t i) {
    const Node& n = other.nodes_[i];
    if (n.kind == GateKind::leaf) {
      nodes_.push_back(n);
      return nodes_.size() - 1;
    }
    std::size_t l = graft(other, n.left);
    std::size_t r = graft(other, n.right);
    nodes_.push_back(Node{n.kind, {}, l, r});
    return nodes_.size() - 1;
  }

  template <class F>
  void visit(std::size_t i, F&& f) const {
    const Node& n = nodes_[i];
    if (n.kind != GateKind::leaf) {
      visit(n.left, f);
      visit(n.right, f);
    }
    f(n);
  }

  std::size_t count(GateKind kind) const {
    std::size_t c = 0;
    visit(root_, [&](const Node& n) { c += n.kind == kind ? 1 : 0; });
    return c;
  }

  bool eval(std::size_t i, const std::set<std::string>& attrs) const {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case GateKind::leaf: return attrs.count(n.attribute) != 0;
      case GateKind::and_gate: return eval(n.left, attrs) && eval(n.right, attrs);
      case GateKind::or_gate: return eval(n.left, attrs) || eval(n.right, attrs);
    }
    return false;
  }

  std::string print(std::size_t i) const {
    const Node& n = nodes_[i];
    if (n.kind == GateKind::leaf) return n.attribute;
    const char* op = n.kind == GateKind::and_gate ? " & " : " | ";
    return "(" + print(n.left) + op + print(n.right) + ")";
  }

  static bool same(const AccessTree& a, std::size_t i, const AccessTree& b, std::size_t j) {
    const Node& x = a.nodes_[i];
    const Node& y = b.nodes_[j];
    if (x.kind != y.kind) return false;
    if (x.kind == GateKind::leaf) return x.attribute == y.attribute;
    return same(a, x.left, b, y.left) && same(a, x.right, b, y.right);
  }

  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

namespace detail {

class PolicyParser {
 public:
  explicit PolicyParser(std::string_view text) : text_(text) { tokenize(); }

  AccessTree parse() {
    if (tokens_.size() == 1) throw PolicySyntaxError("empty policy", 0);
    AccessTree t = parse_or();
    if (peek().kind != Tok::end) throw PolicySyntaxError("unexpected token", peek().offset);
    return t;
  }

 private:
  enum class Tok { ident, and_op, or_op, lparen, rparen, end };
  struct Token {
    Tok kind;
    std::size_t offset;
    std::string text;
  };

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == ':' || c == '@' || c == '/';
  }

  void tokenize() {
    std::size_t i = 0;
    while (i < text_.size()) {
      char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '&') {
        tokens_.push_back({Tok::and_op, i, "&"});
        i += (i + 1 < text_.size() && text_[i + 1] == '&') ? 2 : 1;
      } else if (c == '|') {
        tokens_.push_back({Tok::or_op, i, "|"});
        i += (i + 1 < text_.size() && text_[i + 1] == '|') ? 2 : 1;
      } else if (c == '(') {
        tokens_.push_back({Tok::lparen, i++, "("});
      } else if (c == ')') {
        tokens_.push_back({Tok::rparen, i++, ")"});
      } else if (c == '!' || c == '~') {
        throw PolicySyntaxError("negation is not allowed in monotone policies", i);
      } else if (ident_char(c)) {
        std::size_t start = i;
        while (i < text_.size() && ident_char(text_[i])) ++i;
        std::string word(text_.substr(start, i - start));
        if (word == "AND" || word == "and") {
          tokens_.push_back({Tok::and_op, start, word});
        } else if (word == "OR" || word == "or") {
          tokens_.push_back({Tok::or_op, start, word});
        } else if (word == "NOT" || word == "not") {
          throw PolicySyntaxError("negation is not allowed in monotone policies", start);
        } else {
          tokens_.push_back({Tok::ident, start, std::move(word)});
        }
      } else {
        throw PolicySyntaxError(std::string("unexpected character '") + c + "'", i);
      }
    }
    tokens_.push_back({Tok::end, text_.size(), ""});
  }

  const Token& peek() const { return tokens_[pos_]; }

  // Position reported for a premature end of input: the last real token.
  std::size_t error_offset(const Token& t) const {
    if (t.kind == Tok::end && pos_ > 0) return tokens_[pos_ - 1].offset;
    return t.offset;
  }

  AccessTree parse_or() {
    AccessTree left = parse_and();
    while (peek().kind == Tok::or_op) {
      ++pos_;
      left = AccessTree::make_or(left, parse_and());
    }
    return left;
  }

  AccessTree parse_and() {
    AccessTree left = parse_operand();
    while (peek().kind == Tok::and_op) {
      ++pos_;
      left = AccessTree::make_and(left, parse_operand());
    }
    return left;
  }

  AccessTree parse_operand() {
    const Token& t = peek();
    if (t.kind == Tok::ident) {
      ++pos_;
      return AccessTree::leaf(t.text);
    }
    if (t.kind == Tok::lparen) {
      ++pos_;
      AccessTree inner = parse_or();
      if (peek().kind != Tok::rparen) {
        throw PolicySyntaxError("expected ')'", error_offset(peek()));
      }
      ++pos_;
      return inner;
    }
    if (t.kind == Tok::end) throw PolicySyntaxError("expected attribute or '('", error_offset(t));
    throw PolicySyntaxError("unexpected '" + t.text + "'", t.offset);
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Grammar: identifiers, '&'/'AND', '|'/'OR', parentheses. AND binds tighter
// than OR; chains fold left-associatively into binary gates.
inline AccessTree parse_policy(std::string_view text) { return detail::PolicyParser(text).parse(); }

// How AND gates allocate matrix columns.
enum class LsssConvention : std::uint8_t {
  // Each AND gate opens a fresh column (h = 1 + #AND). A valid LSSS for the
  // tree: a row set spans (1,0,...,0) iff its attributes satisfy the tree.
  standard,
  // The child vector is the parent's vector extended by one entry, so AND
  // gates at the same depth in different OR branches share a column. This
  // reproduces hand-built example matrices but is NOT a valid LSSS when
  // AND gates sit in different OR branches: rows from those branches can be
  // mixed. Never use it to protect data.
  path_length,
};

// Share-generating matrix R (rows x cols over Z_q) and the row-to-attribute
// map. Rows appear in depth-first leaf order.
class LsssProgram {
 public:
  LsssProgram(PrimeField field, std::size_t cols, std::vector<std::vector<Scalar>> rows,
              std::vector<std::string> row_attributes)
      : field_(std::move(field)), cols_(cols), rows_(std::move(rows)),
        attributes_(std::move(row_attributes)) {
    if (rows_.size() != attributes_.size()) {
      throw InvalidArgument("LSSS row count does not match attribute map");
    }
    if (cols_ == 0 && !rows_.empty()) throw InvalidArgument("LSSS matrix needs a column");
    for (const auto& r : rows_) {
      if (r.size() != cols_) throw InvalidArgument("ragged LSSS matrix");
    }
  }

  const PrimeField& field() const { return field_; }
  std::size_t row_count() const { return rows_.size(); }
  std::size_t col_count() const { return cols_; }
  const std::vector<Scalar>& row(std::size_t x) const { return rows_.at(x); }
  const Scalar& entry(std::size_t x, std::size_t j) const { return rows_.at(x).at(j); }
  const std::string& attribute(std::size_t x) const { return attributes_.at(x); }
  const std::vector<std::string>& attributes() const { return attributes_; }

  // 4-byte n, 4-byte h, n*h length-prefixed entries (row-major), then n
  // length-prefixed attribute strings.
  void encode_to(ByteWriter& w) const {
    w.u32(static_cast<std::uint32_t>(rows_.size()));
    w.u32(static_cast<std::uint32_t>(cols_));
    for (const auto& r : rows_) {
      for (const auto& e : r) w.integer(e.value());
    }
    for (const auto& a : attributes_) w.blob(a);
  }

  Bytes encode() const {
    ByteWriter w;
    encode_to(w);
    return std::move(w).bytes();
  }

  static LsssProgram decode_from(ByteReader& r, const PrimeField& field) {
    std::uint32_t n = r.u32();
    std::uint32_t h = r.u32();
    std::vector<std::vector<Scalar>> rows(n);
    for (auto& row : rows) {
      row.reserve(h);
      for (std::uint32_t j = 0; j < h; ++j) {
        mpz_class v = r.integer();
        if (!field.contains(v)) throw DecodeError("LSSS entry outside Z_q");
        row.push_back(field.from(v));
      }
    }
    std::vector<std::string> attrs(n);
    for (auto& a : attrs) a = r.blob_string();
    return LsssProgram(field, h, std::move(rows), std::move(attrs));
  }

  friend bool operator==(const LsssProgram& a, const LsssProgram& b) {
    return a.field_ == b.field_ && a.cols_ == b.cols_ && a.rows_ == b.rows_ &&
           a.attributes_ == b.attributes_;
  }

 private:
  PrimeField field_;
  std::size_t cols_;
  std::vector<std::vector<Scalar>> rows_;
  std::vector<std::string> attributes_;
};

// Root vector (1). AND: left child (v | 1), right child (0, ..., 0, -1).
// OR: both children keep v. Rows are zero-padded at the end to a common
// width, so column 1 carries the shared secret. -1 is stored as q - 1.
inline LsssProgram compile_lsss(const AccessTree& tree, const PrimeField& field,
                                LsssConvention convention = LsssConvention::standard) {
  std::vector<std::vector<int>> vectors;
  std::vector<std::string> attrs;
  std::size_t counter = 1;

  std::function<void(std::size_t, std::vector<int>)> walk = [&](std::size_t i, std::vector<int> v) {
    const auto& n = tree.node(i);
    switch (n.kind) {
      case GateKind::leaf:
        vectors.push_back(std::move(v));
        attrs.push_back(n.attribute);
        return;
      case GateKind::or_gate:
        walk(n.left, v);
        walk(n.right, std::move(v));
        return;
      case GateKind::and_gate: {
        std::size_t width = convention == LsssConvention::standard ? counter : v.size();
        v.resize(width, 0);
        std::vector<int> left = v;
        left.push_back(1);
        std::vector<int> right(width, 0);
        right.push_back(-1);
        if (convention == LsssConvention::standard) ++counter;
        walk(n.left, std::move(left));
        walk(n.right, std::move(right));
        return;
      }
    }
  };
  walk(tree.root(), {1});

  std::size_t cols = 0;
  for (const auto& v : vectors) cols = std::max(cols, v.size());
  std::vector<std::vector<Scalar>> rows;
  rows.reserve(vectors.size());
  for (auto& v : vectors) {
    v.resize(cols, 0);
    std::vector<Scalar> row;
    row.reserve(cols);
    for (int e : v) row.push_back(field.from(static_cast<long>(e)));
    rows.push_back(std::move(row));
  }
  return LsssProgram(field, cols, std::move(rows), std::move(attrs));
}

struct ReconstructionTerm {
  std::size_t row;
  Scalar coefficient;

  friend bool operator==(const ReconstructionTerm&, const ReconstructionTerm&) = default;
};

using ReconstructionCoefficients = std::vector<ReconstructionTerm>;

namespace detail {

// Solves sum_{x in rows} k_x R_x = (1, 0, ..., 0) by Gaussian elimination
// on the transposed system. Free variables are set to zero.
inline std::optional<std::vector<Scalar>> solve_rows(const LsssProgram& program,
                                                     std::span<const std::size_t> rows) {
  const PrimeField& f = program.field();
  const std::size_t h = program.col_count();
  const std::size_t m = rows.size();
  if (h == 0) return std::nullopt;
  // Augmented h x (m + 1) matrix; column x is row rows[x] of R.
  std::vector<std::vector<Scalar>> a(h, std::vector<Scalar>(m + 1, f.zero()));
  for (std::size_t j = 0; j < h; ++j) {
    for (std::size_t x = 0; x < m; ++x) a[j][x] = program.entry(rows[x], j);
    a[j][m] = j == 0 ? f.one() : f.zero();
  }
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m && r < h; ++c) {
    std::size_t p = r;
    while (p < h && a[p][c].is_zero()) ++p;
    if (p == h) continue;
    std::swap(a[p], a[r]);
    Scalar inv = f.inverse(a[r][c]);
    for (auto& e : a[r]) e = f.mul(e, inv);
    for (std::size_t i = 0; i < h; ++i) {
      if (i == r || a[i][c].is_zero()) continue;
      Scalar factor = a[i][c];
      for (std::size_t k = c; k <= m; ++k) a[i][k] = f.sub(a[i][k], f.mul(factor, a[r][k]));
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < h; ++i) {
    if (!a[i][m].is_zero()) return std::nullopt;
  }
  std::vector<Scalar> k(m, f.zero());
  for (std::size_t i = 0; i < r; ++i) k[pivot_col[i]] = a[i][m];
  return k;
}

}  // namespace detail

// Coefficients over the given candidate rows, with inclusion-minimal
// support (rows whose coefficient would be zero are omitted). For programs
// compiled from AND/OR trees every returned coefficient is 1.
inline std::optional<ReconstructionCoefficients> solve_reconstruction_rows(
    const LsssProgram& program, std::vector<std::size_t> rows) {
  auto k = detail::solve_rows(program, rows);
  if (!k) return std::nullopt;
  std::vector<std::size_t> support;
  for (std::size_t x = 0; x < rows.size(); ++x) {
    if (!(*k)[x].is_zero()) support.push_back(rows[x]);
  }
  for (std::size_t i = 0; i < support.size();) {
    std::vector<std::size_t> without = support;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
    if (detail::solve_rows(program, without)) {
      support = std::move(without);
    } else {
      ++i;
    }
  }
  auto final_k = detail::solve_rows(program, support);
  if (!final_k) return std::nullopt;  // unreachable: support was solvable
  ReconstructionCoefficients out;
  for (std::size_t x = 0; x < support.size(); ++x) {
    if (!(*final_k)[x].is_zero()) out.push_back({support[x], (*final_k)[x]});
  }
  return out;
}

// Rows usable by the holder of `attributes`, then solve. Absence means the
// set is unauthorized.
inline std::optional<ReconstructionCoefficients> solve_reconstruction(
    const LsssProgram& program, const std::set<std::string>& attributes) {
  std::vector<std::size_t> rows;
  for (std::size_t x = 0; x < program.row_count(); ++x) {
    if (attributes.count(program.attribute(x)) != 0) rows.push_back(x);
  }
  return solve_reconstruction_rows(program, std::move(rows));
}

// Re-substitutes the coefficients: true iff sum k_x R_x = (1, 0, ..., 0).
inline bool verify_reconstruction(const LsssProgram& program,
                                  const ReconstructionCoefficients& coefficients) {
  const PrimeField& f = program.field();
  std::vector<Scalar> acc(program.col_count(), f.zero());
  for (const auto& term : coefficients) {
    if (term.row >= program.row_count()) return false;
    for (std::size_t j = 0; j < acc.size(); ++j) {
      acc[j] = f.add(acc[j], f.mul(term.coefficient, program.entry(term.row, j)));
    }
  }
  for (std::size_t j = 0; j < acc.size(); ++j) {
    if (!(acc[j] == (j == 0 ? f.one() : f.zero()))) return false;
  }
  return !acc.empty();
}

}  // namespace gridsec
