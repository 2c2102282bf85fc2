#pragma once

// Binomials and subset enumeration over small ground sets. Subsets are
// bitmasks (bit i set <=> element i present), so ground sets are limited to
// 64 elements.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "mscc/errors.hpp"

namespace mscc {

using Subset = std::uint64_t;

inline constexpr int kMaxGround = 64;

// C(n, r) with the convention C(n, r) = 0 whenever r < 0, n < 0 or n < r.
inline std::int64_t binomial(std::int64_t n, std::int64_t r) {
  if (r < 0 || n < 0 || n < r) return 0;
  if (r > n - r) r = n - r;
  __int128 result = 1;
  for (std::int64_t i = 1; i <= r; ++i) {
    result = result * (n - r + i) / i;
    if (result > INT64_MAX) throw Error(ErrorCode::too_large, "binomial overflow");
  }
  return static_cast<std::int64_t>(result);
}

inline int popcount(Subset s) { return std::popcount(s); }

inline bool contains(Subset s, int element) { return (s >> element) & 1U; }

inline Subset singleton(int element) { return Subset{1} << element; }

inline Subset full_set(int n) { return n >= 64 ? ~Subset{0} : (Subset{1} << n) - 1; }

// Elements of s in increasing order.
inline std::vector<int> elements(Subset s) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(popcount(s)));
  while (s) {
    out.push_back(std::countr_zero(s));
    s &= s - 1;
  }
  return out;
}

inline Subset from_elements(const std::vector<int>& xs) {
  Subset s = 0;
  for (int x : xs) s |= singleton(x);
  return s;
}

// All r-subsets of {0..n-1} in colexicographic order, which is increasing
// order of the bitmask value (Gosper's hack).
inline std::vector<Subset> colex_subsets(int n, int r) {
  if (n < 0 || n > kMaxGround) throw Error(ErrorCode::contract, "ground set too large");
  std::vector<Subset> out;
  if (r < 0 || r > n) return out;
  out.reserve(static_cast<std::size_t>(binomial(n, r)));
  if (r == 0) {
    out.push_back(0);
    return out;
  }
  const Subset limit_bit = n == 64 ? 0 : Subset{1} << n;
  Subset s = full_set(r);
  while (true) {
    out.push_back(s);
    const Subset c = s & (~s + 1);
    const Subset ripple = s + c;
    if (ripple == 0) break;  // overflow past bit 63
    s = (((ripple ^ s) >> 2) / c) | ripple;
    if (limit_bit != 0 && s >= limit_bit) break;
  }
  return out;
}

// Rank of s among the popcount(s)-subsets in colex order (combinatorial
// number system).
inline std::int64_t colex_rank(Subset s) {
  std::int64_t rank = 0;
  int i = 1;
  for (int e : elements(s)) rank += binomial(e, i++);
  return rank;
}

inline Subset colex_unrank(std::int64_t rank, int r) {
  Subset s = 0;
  for (int i = r; i >= 1; --i) {
    int e = i - 1;
    while (binomial(e + 1, i) <= rank) ++e;
    rank -= binomial(e, i);
    s |= singleton(e);
  }
  return s;
}

// Visits the r-subsets of `pool` (given as sorted elements) in lexicographic
// order of their sorted element tuples. Stops when `visit` returns false.
template <typename Visitor>
void for_each_lex_combination(const std::vector<int>& pool, int r, Visitor&& visit) {
  const int n = static_cast<int>(pool.size());
  if (r < 0 || r > n) return;
  std::vector<int> idx(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    Subset s = 0;
    for (int i : idx) s |= singleton(pool[static_cast<std::size_t>(i)]);
    if (!visit(s)) return;
    int i = r - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - r + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Lexicographic comparison of two subsets as sorted element tuples.
inline bool lex_less(Subset a, Subset b) {
  const auto ea = elements(a);
  const auto eb = elements(b);
  return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
}

}  // namespace mscc
