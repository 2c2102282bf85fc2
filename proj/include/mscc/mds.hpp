#pragma once

// Systematic (n, k) MDS erasure code over GF(256).

#include <algorithm>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mscc/combinatorics.hpp"
#include "mscc/errors.hpp"
#include "mscc/gf256.hpp"

namespace mscc {

using Bytes = std::vector<std::uint8_t>;

class GeneratorMatrix {
 public:
  GeneratorMatrix() = default;

  // rows.size() == n, each row of length k. No structural checks beyond shape;
  // use is_mds() / is_systematic() to validate.
  explicit GeneratorMatrix(std::vector<std::vector<gf256::Symbol>> rows) : rows_(std::move(rows)) {
    if (rows_.empty() || rows_.front().empty()) throw Error(ErrorCode::shape, "empty generator matrix");
    for (const auto& r : rows_) {
      if (r.size() != rows_.front().size()) throw Error(ErrorCode::shape, "ragged generator matrix");
    }
    if (rows_.size() < rows_.front().size()) throw Error(ErrorCode::shape, "generator needs n >= k");
  }

  int n() const { return static_cast<int>(rows_.size()); }
  int k() const { return rows_.empty() ? 0 : static_cast<int>(rows_.front().size()); }

  gf256::Symbol at(int row, int col) const {
    return rows_[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
  }
  gf256::Symbol& at(int row, int col) {
    return rows_[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
  }
  const std::vector<gf256::Symbol>& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }

  bool operator==(const GeneratorMatrix&) const = default;

 private:
  std::vector<std::vector<gf256::Symbol>> rows_;
};

struct CodedChunk {
  int code_index = 0;  // 0-based row of the generator
  Bytes payload;

  std::size_t length_bits() const { return payload.size() * 8; }
  bool operator==(const CodedChunk&) const = default;
};

namespace detail {

using Matrix = std::vector<std::vector<gf256::Symbol>>;

// Gauss-Jordan inverse; returns false if singular.
inline bool invert(Matrix m, Matrix& out) {
  const std::size_t k = m.size();
  out.assign(k, std::vector<gf256::Symbol>(k, 0));
  for (std::size_t i = 0; i < k; ++i) out[i][i] = 1;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    while (pivot < k && m[pivot][col] == 0) ++pivot;
    if (pivot == k) return false;
    std::swap(m[pivot], m[col]);
    std::swap(out[pivot], out[col]);
    const gf256::Symbol scale = gf256::inv(m[col][col]);
    for (std::size_t j = 0; j < k; ++j) {
      m[col][j] = gf256::mul(m[col][j], scale);
      out[col][j] = gf256::mul(out[col][j], scale);
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const gf256::Symbol f = m[r][col];
      for (std::size_t j = 0; j < k; ++j) {
        m[r][j] ^= gf256::mul(f, m[col][j]);
        out[r][j] ^= gf256::mul(f, out[col][j]);
      }
    }
  }
  return true;
}

inline Matrix select_rows(const GeneratorMatrix& g, const std::vector<int>& rows) {
  Matrix m;
  m.reserve(rows.size());
  for (int r : rows) m.push_back(g.row(r));
  return m;
}

}  // namespace detail

inline bool is_systematic(const GeneratorMatrix& g) {
  for (int i = 0; i < g.k(); ++i)
    for (int j = 0; j < g.k(); ++j)
      if (g.at(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

// Exhaustive check that every k-row submatrix is invertible.
inline bool is_mds(const GeneratorMatrix& g) {
  const int n = g.n(), k = g.k();
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  bool ok = true;
  for_each_lex_combination(all, k, [&](Subset rows) {
    detail::Matrix inverse;
    ok = detail::invert(detail::select_rows(g, elements(rows)), inverse);
    return ok;
  });
  return ok;
}

// Vandermonde rows at the distinct points 0, 1, ..., n-1, right-multiplied by
// the inverse of the top k x k block so the code is systematic.
inline GeneratorMatrix build_generator(int n, int k) {
  if (n > 255) throw Error(ErrorCode::field_too_small, "GF(256) supports at most 255 code symbols");
  if (k < 1 || n < k) throw Error(ErrorCode::contract, "need 1 <= k <= n");
  detail::Matrix vander(static_cast<std::size_t>(n), std::vector<gf256::Symbol>(static_cast<std::size_t>(k)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j)
      vander[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          gf256::pow(static_cast<gf256::Symbol>(i), static_cast<unsigned>(j));
  detail::Matrix top(vander.begin(), vander.begin() + k);
  detail::Matrix top_inv;
  if (!detail::invert(top, top_inv)) throw Error(ErrorCode::singular, "Vandermonde block singular");
  detail::Matrix rows(static_cast<std::size_t>(n), std::vector<gf256::Symbol>(static_cast<std::size_t>(k), 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) {
      gf256::Symbol acc = 0;
      for (int m = 0; m < k; ++m)
        acc ^= gf256::mul(vander[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)],
                          top_inv[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)]);
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
    }
  return GeneratorMatrix(std::move(rows));
}

// Coded symbol for one generator row: sum_j G[row][j] * data[j].
inline Bytes encode_row(const GeneratorMatrix& g, int row, std::span<const Bytes> data) {
  if (static_cast<int>(data.size()) != g.k()) throw Error(ErrorCode::shape, "expected k data blocks");
  const std::size_t len = data.front().size();
  Bytes out(len, 0);
  for (int j = 0; j < g.k(); ++j) {
    const Bytes& block = data[static_cast<std::size_t>(j)];
    if (block.size() != len) throw Error(ErrorCode::shape, "data blocks differ in length");
    gf256::mul_add(out, block, g.at(row, j));
  }
  return out;
}

inline std::vector<CodedChunk> mds_encode(std::span<const Bytes> data, const GeneratorMatrix& g) {
  if (static_cast<int>(data.size()) != g.k()) throw Error(ErrorCode::shape, "expected k data blocks");
  for (const auto& d : data)
    if (d.size() != data.front().size()) throw Error(ErrorCode::shape, "data blocks differ in length");
  std::vector<CodedChunk> out;
  out.reserve(static_cast<std::size_t>(g.n()));
  for (int l = 0; l < g.n(); ++l) out.push_back(CodedChunk{l, encode_row(g, l, data)});
  return out;
}

// Uses the first k shares (in the given order) after validation.
inline std::vector<Bytes> mds_decode(std::span<const CodedChunk> shares, const GeneratorMatrix& g) {
  const int k = g.k();
  if (static_cast<int>(shares.size()) < k)
    throw Error(ErrorCode::insufficient_shares,
                "have " + std::to_string(shares.size()) + " shares, need " + std::to_string(k));
  std::set<int> seen;
  for (const auto& s : shares) {
    if (s.code_index < 0 || s.code_index >= g.n()) throw Error(ErrorCode::shape, "code index out of range");
    if (!seen.insert(s.code_index).second)
      throw Error(ErrorCode::duplicate_index, "code index " + std::to_string(s.code_index) + " repeated");
    if (s.payload.size() != shares.front().payload.size())
      throw Error(ErrorCode::shape, "shares differ in length");
  }
  std::vector<int> rows;
  for (int i = 0; i < k; ++i) rows.push_back(shares[static_cast<std::size_t>(i)].code_index);
  detail::Matrix inverse;
  if (!detail::invert(detail::select_rows(g, rows), inverse))
    throw Error(ErrorCode::singular, "generator rows not invertible");
  const std::size_t len = shares.front().payload.size();
  std::vector<Bytes> out(static_cast<std::size_t>(k), Bytes(len, 0));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i)
      gf256::mul_add(out[static_cast<std::size_t>(j)], shares[static_cast<std::size_t>(i)].payload,
                     inverse[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace mscc
