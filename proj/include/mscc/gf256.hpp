#pragma once

// GF(2^8) with reduction polynomial x^8 + x^4 + x^3 + x + 1 (0x11B).
// 0x03 generates the multiplicative group, so products go through
// log/antilog tables built at compile time.

#include <array>
#include <cstdint>
#include <span>

#include "mscc/errors.hpp"

namespace mscc::gf256 {

using Symbol = std::uint8_t;

inline constexpr unsigned kPolynomial = 0x11B;

// Shift-and-add product, used to build the tables and as a test oracle.
constexpr Symbol mul_slow(Symbol a, Symbol b) {
  unsigned x = a, y = b, acc = 0;
  while (y) {
    if (y & 1U) acc ^= x;
    y >>= 1;
    x <<= 1;
    if (x & 0x100U) x ^= kPolynomial;
  }
  return static_cast<Symbol>(acc);
}

struct Tables {
  std::array<Symbol, 512> exp{};
  std::array<int, 256> log{};
};

constexpr Tables make_tables() {
  Tables t{};
  Symbol x = 1;
  for (int i = 0; i < 255; ++i) {
    t.exp[static_cast<std::size_t>(i)] = x;
    t.log[x] = i;
    x = mul_slow(x, 0x03);
  }
  for (int i = 255; i < 512; ++i) t.exp[static_cast<std::size_t>(i)] = t.exp[static_cast<std::size_t>(i - 255)];
  t.log[0] = -1;
  return t;
}

inline constexpr Tables kTables = make_tables();

constexpr Symbol add(Symbol a, Symbol b) { return a ^ b; }

constexpr Symbol mul(Symbol a, Symbol b) {
  if (a == 0 || b == 0) return 0;
  return kTables.exp[static_cast<std::size_t>(kTables.log[a] + kTables.log[b])];
}

inline Symbol inv(Symbol a) {
  if (a == 0) throw Error(ErrorCode::domain, "zero has no multiplicative inverse in GF(256)");
  return kTables.exp[static_cast<std::size_t>(255 - kTables.log[a])];
}

inline Symbol div(Symbol a, Symbol b) { return mul(a, inv(b)); }

constexpr Symbol pow(Symbol a, unsigned e) {
  if (e == 0) return 1;
  if (a == 0) return 0;
  return kTables.exp[static_cast<std::size_t>((static_cast<unsigned>(kTables.log[a]) * e) % 255U)];
}

// dst ^= coeff * src, symbol-wise.
inline void mul_add(std::span<Symbol> dst, std::span<const Symbol> src, Symbol coeff) {
  if (dst.size() != src.size()) throw Error(ErrorCode::shape, "mul_add on buffers of different length");
  if (coeff == 0) return;
  if (coeff == 1) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
    return;
  }
  const int lc = kTables.log[coeff];
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (src[i]) dst[i] ^= kTables.exp[static_cast<std::size_t>(kTables.log[src[i]] + lc)];
  }
}

}  // namespace mscc::gf256
