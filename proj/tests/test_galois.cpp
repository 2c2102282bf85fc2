#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "mscc/gf256.hpp"
#include "mscc/mds.hpp"

using namespace mscc;
using gf256::Symbol;

namespace {

// Carry-less product into 16 bits, then polynomial long division by 0x11B.
Symbol oracle_mul(Symbol a, Symbol b) {
  unsigned prod = 0;
  for (int i = 0; i < 8; ++i)
    if ((b >> i) & 1U) prod ^= static_cast<unsigned>(a) << i;
  for (int bit = 15; bit >= 8; --bit)
    if ((prod >> bit) & 1U) prod ^= 0x11BU << (bit - 8);
  return static_cast<Symbol>(prod);
}

Symbol oracle_inv(Symbol a) {
  for (unsigned c = 1; c < 256; ++c)
    if (oracle_mul(a, static_cast<Symbol>(c)) == 1) return static_cast<Symbol>(c);
  return 0;
}

// Determinant by cofactor expansion (characteristic 2: signs vanish).
Symbol oracle_det(const std::vector<std::vector<Symbol>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  Symbol acc = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<Symbol>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Symbol> row;
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) row.push_back(m[r][j]);
      minor.push_back(row);
    }
    acc ^= oracle_mul(m[0][c], oracle_det(minor));
  }
  return acc;
}

bool oracle_all_minors_invertible(const GeneratorMatrix& g) {
  const int n = g.n(), k = g.k();
  bool ok = true;
  std::vector<int> rows;
  std::function<void(int)> rec = [&](int start) {
    if (!ok) return;
    if (static_cast<int>(rows.size()) == k) {
      std::vector<std::vector<Symbol>> m;
      for (int r : rows) m.push_back(g.row(r));
      if (oracle_det(m) == 0) ok = false;
      return;
    }
    for (int r = start; r < n; ++r) {
      rows.push_back(r);
      rec(r + 1);
      rows.pop_back();
    }
  };
  rec(0);
  return ok;
}

}  // namespace

TEST(GfMul, Examples) {
  EXPECT_EQ(gf256::mul(0x00, 0x57), 0x00);
  EXPECT_EQ(gf256::mul(0x01, 0x57), 0x57);
  EXPECT_EQ(oracle_mul(0x02, 0x80), 0x1B);
  EXPECT_EQ(gf256::mul(0x02, 0x80), 0x1B);
}

TEST(GfMul, AgreesWithCarrylessOracleEverywhere) {
  for (unsigned a = 0; a < 256; ++a)
    for (unsigned b = 0; b < 256; ++b)
      ASSERT_EQ(gf256::mul(static_cast<Symbol>(a), static_cast<Symbol>(b)),
                oracle_mul(static_cast<Symbol>(a), static_cast<Symbol>(b)));
}

TEST(GfMul, FieldAxiomsOnRandomTriples) {
  std::mt19937 rng(7);
  for (int i = 0; i < 20000; ++i) {
    const auto a = static_cast<Symbol>(rng()), b = static_cast<Symbol>(rng()), c = static_cast<Symbol>(rng());
    ASSERT_EQ(gf256::mul(a, b), gf256::mul(b, a));
    ASSERT_EQ(gf256::mul(gf256::mul(a, b), c), gf256::mul(a, gf256::mul(b, c)));
    ASSERT_EQ(gf256::mul(a, gf256::add(b, c)), gf256::add(gf256::mul(a, b), gf256::mul(a, c)));
  }
}

TEST(GfInv, Examples) {
  EXPECT_EQ(gf256::inv(0x01), 0x01);
  const Symbol r = gf256::inv(0x02);
  EXPECT_EQ(r, oracle_inv(0x02));
  EXPECT_EQ(gf256::mul(0x02, r), 0x01);
  try {
    gf256::inv(0x00);
    FAIL() << "expected domain error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::domain);
  }
}

TEST(GfInv, AllNonzeroRoundTrip) {
  for (unsigned a = 1; a < 256; ++a) {
    const auto s = static_cast<Symbol>(a);
    ASSERT_EQ(gf256::mul(s, gf256::inv(s)), 1);
    ASSERT_EQ(gf256::inv(s), oracle_inv(s));
  }
}

TEST(BuildGenerator, SquareIsIdentity) {
  const auto g = build_generator(2, 2);
  EXPECT_EQ(g, GeneratorMatrix({{1, 0}, {0, 1}}));
}

TEST(BuildGenerator, ThreeTwo) {
  const auto g = build_generator(3, 2);
  EXPECT_TRUE(is_systematic(g));
  EXPECT_NE(g.at(2, 0), 0);
  EXPECT_NE(g.at(2, 1), 0);
  EXPECT_TRUE(oracle_all_minors_invertible(g));
}

TEST(BuildGenerator, MdsForAllSmallShapes) {
  for (int n = 1; n <= 12; ++n) {
    for (int k = 1; k <= n; ++k) {
      const auto g = build_generator(n, k);
      ASSERT_TRUE(is_systematic(g)) << n << "," << k;
      ASSERT_TRUE(is_mds(g)) << n << "," << k;
      if (k <= 6) {
        ASSERT_TRUE(oracle_all_minors_invertible(g)) << n << "," << k;
      }
    }
  }
}

TEST(BuildGenerator, SevenTwoAllPairs) {
  const auto g = build_generator(7, 2);
  int pairs = 0;
  for (int a = 0; a < 7; ++a)
    for (int b = a + 1; b < 7; ++b) {
      ++pairs;
      EXPECT_NE(oracle_det({g.row(a), g.row(b)}), 0);
    }
  EXPECT_EQ(pairs, 21);
}

TEST(BuildGenerator, Errors) {
  EXPECT_THROW(build_generator(256, 2), Error);
  try {
    build_generator(300, 3);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::field_too_small);
  }
  EXPECT_THROW(build_generator(3, 4), Error);
  EXPECT_THROW(build_generator(3, 0), Error);
  EXPECT_NO_THROW(build_generator(255, 2));
}

TEST(MdsEncode, RepetitionCode) {
  const GeneratorMatrix g({{1}, {1}, {1}});
  const std::vector<Bytes> data{{0xDE, 0xAD}};
  const auto chunks = mds_encode(data, g);
  ASSERT_EQ(chunks.size(), 3U);
  for (int l = 0; l < 3; ++l) {
    EXPECT_EQ(chunks[static_cast<std::size_t>(l)].code_index, l);
    EXPECT_EQ(chunks[static_cast<std::size_t>(l)].payload, data[0]);
  }
}

TEST(MdsEncode, XorParity) {
  const GeneratorMatrix g({{1, 0}, {0, 1}, {1, 1}});
  const std::vector<Bytes> data{{0x01}, {0x02}};
  const auto chunks = mds_encode(data, g);
  EXPECT_EQ(chunks[0].payload, Bytes{0x01});
  EXPECT_EQ(chunks[1].payload, Bytes{0x02});
  EXPECT_EQ(chunks[2].payload, Bytes{0x03});
}

TEST(MdsEncode, LengthMismatch) {
  const auto g = build_generator(3, 2);
  const std::vector<Bytes> data{{0x01, 0x02}, {0x03}};
  try {
    mds_encode(data, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::shape);
  }
}

TEST(MdsDecode, Examples) {
  const GeneratorMatrix g({{1, 0}, {0, 1}, {1, 1}});
  const std::vector<CodedChunk> systematic{{0, {0x01}}, {1, {0x02}}};
  EXPECT_EQ(mds_decode(systematic, g), (std::vector<Bytes>{{0x01}, {0x02}}));
  const std::vector<CodedChunk> parity{{1, {0x02}}, {2, {0x03}}};
  EXPECT_EQ(mds_decode(parity, g), (std::vector<Bytes>{{0x01}, {0x02}}));
}

TEST(MdsDecode, Errors) {
  const GeneratorMatrix g({{1, 0}, {0, 1}, {1, 1}});
  const std::vector<CodedChunk> one{{2, {0x03}}};
  try {
    mds_decode(one, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::insufficient_shares);
  }
  const std::vector<CodedChunk> dup{{1, {0x02}}, {1, {0x02}}};
  try {
    mds_decode(dup, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::duplicate_index);
  }
  const GeneratorMatrix bad({{1, 0}, {0, 1}, {1, 0}});
  const std::vector<CodedChunk> singular{{0, {0x01}}, {2, {0x01}}};
  try {
    mds_decode(singular, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::singular);
  }
}

TEST(MdsRoundTrip, EveryKSubsetSmallCodes) {
  std::mt19937 rng(11);
  for (int n = 1; n <= 7; ++n) {
    for (int k = 1; k <= n; ++k) {
      const auto g = build_generator(n, k);
      std::vector<Bytes> data(static_cast<std::size_t>(k), Bytes(5));
      for (auto& d : data)
        for (auto& b : d) b = static_cast<std::uint8_t>(rng());
      const auto chunks = mds_encode(data, g);
      for (int i = 0; i < k; ++i) EXPECT_EQ(chunks[static_cast<std::size_t>(i)].payload, data[static_cast<std::size_t>(i)]);
      std::vector<int> all;
      for (int i = 0; i < n; ++i) all.push_back(i);
      for_each_lex_combination(all, k, [&](Subset rows) {
        std::vector<CodedChunk> shares;
        for (int r : elements(rows)) shares.push_back(chunks[static_cast<std::size_t>(r)]);
        EXPECT_EQ(mds_decode(shares, g), data);
        return true;
      });
    }
  }
}

TEST(MdsRoundTrip, RandomizedLargerCodes) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 8 + static_cast<int>(rng() % 40);
    const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    const auto g = build_generator(n, k);
    std::vector<Bytes> data(static_cast<std::size_t>(k), Bytes(3));
    for (auto& d : data)
      for (auto& b : d) b = static_cast<std::uint8_t>(rng());
    auto chunks = mds_encode(data, g);
    std::shuffle(chunks.begin(), chunks.end(), rng);
    chunks.resize(static_cast<std::size_t>(k));
    EXPECT_EQ(mds_decode(chunks, g), data);
  }
}
