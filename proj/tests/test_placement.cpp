#include <gtest/gtest.h>

#include <random>

#include "mscc/placement.hpp"

using namespace mscc;

namespace {

std::vector<Bytes> random_library(int N, std::int64_t bytes, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<Bytes> lib(static_cast<std::size_t>(N), Bytes(static_cast<std::size_t>(bytes)));
  for (auto& f : lib)
    for (auto& b : f) b = static_cast<std::uint8_t>(rng());
  return lib;
}

SystemConfig small_config() {
  SystemConfig c;
  c.P = 3;
  c.K = 4;
  c.N = 4;
  c.F = 8 * 64;
  c.M_U = 1;
  c.M_S = 2;
  c.rho = 2;
  return c;
}

Bytes concat(const std::vector<Segment>& segs) {
  Bytes out;
  for (const auto& s : segs) out.insert(out.end(), s.data.begin(), s.data.end());
  return out;
}

}  // namespace

TEST(PartitionFile, TZeroIsWholeFile) {
  const Bytes file{1, 2, 3, 4, 5};
  const auto segs = partition_file(file, 4, 0);
  ASSERT_EQ(segs.size(), 1U);
  EXPECT_EQ(segs[0].subset, 0U);
  EXPECT_EQ(segs[0].data, file);
}

TEST(PartitionFile, SingletonSegments) {
  Bytes file(32);
  for (std::size_t i = 0; i < file.size(); ++i) file[i] = static_cast<std::uint8_t>(i);
  const auto segs = partition_file(file, 4, 1);
  ASSERT_EQ(segs.size(), 4U);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(segs[static_cast<std::size_t>(k)].subset, singleton(k));
    EXPECT_EQ(segs[static_cast<std::size_t>(k)].data.size(), 8U);
  }
  EXPECT_EQ(concat(segs), file);
}

TEST(PartitionFile, TEqualsKIsWholeFile) {
  const Bytes file{9, 8, 7};
  const auto segs = partition_file(file, 4, 4);
  ASSERT_EQ(segs.size(), 1U);
  EXPECT_EQ(segs[0].subset, full_set(4));
}

TEST(PartitionFile, PaddingIsTransparent) {
  const Bytes file{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto segs = partition_file(file, 4, 2);
  ASSERT_EQ(segs.size(), 6U);
  Bytes joined = concat(segs);
  EXPECT_EQ(joined.size(), 12U);
  joined.resize(file.size());
  EXPECT_EQ(joined, file);
  EXPECT_THROW(partition_file(file, 4, 5), Error);
}

TEST(Place, CapacityAccountingSmallInstance) {
  const auto cfg = small_config();
  const auto lib = random_library(cfg.N, cfg.file_bytes(), 1);
  const auto st = place(lib, cfg);
  ASSERT_EQ(st.scheme.kind, SchemeKind::coded);
  EXPECT_EQ(st.scheme.coded.t, 1);
  EXPECT_EQ(st.scheme.coded.z, 0);
  for (const auto& store : st.server_store) {
    EXPECT_EQ(store.size(), 16U);  // N * C(K, t)
    std::int64_t bits = 0;
    for (const auto& [id, chunk] : store) {
      EXPECT_EQ(chunk.length_bits(), static_cast<std::size_t>(cfg.F / 8));  // F / (rho C(K, t))
      bits += static_cast<std::int64_t>(chunk.length_bits());
    }
    EXPECT_EQ(bits, 2 * cfg.F);
  }
  for (int k = 0; k < cfg.K; ++k) {
    const auto& cache = st.user_cache[static_cast<std::size_t>(k)];
    EXPECT_EQ(static_cast<std::int64_t>(cache.size()), cfg.N * binomial(cfg.K - 1, 0));
    for (const auto& [id, bytes] : cache) EXPECT_TRUE(contains(id.subset, k));
  }
  EXPECT_TRUE(storage_audit(st, cfg).all_at_capacity());
}

TEST(Place, CacheCountIdentityAcrossT) {
  for (int m_u = 0; m_u <= 4; ++m_u) {
    auto cfg = small_config();
    cfg.M_U = m_u;
    const int t = m_u;
    const auto st = place(random_library(cfg.N, cfg.file_bytes(), 2), cfg);
    for (const auto& cache : st.user_cache)
      EXPECT_EQ(static_cast<std::int64_t>(cache.size()), cfg.N * binomial(cfg.K - 1, t - 1));
    EXPECT_TRUE(storage_audit(st, cfg).all_at_capacity()) << "t=" << t;
  }
}

TEST(Place, FullCacheHoldsEverything) {
  auto cfg = small_config();
  cfg.M_U = cfg.N;
  const auto lib = random_library(cfg.N, cfg.file_bytes(), 3);
  const auto st = place(lib, cfg);
  for (const auto& cache : st.user_cache) {
    ASSERT_EQ(cache.size(), static_cast<std::size_t>(cfg.N));
    for (int j = 0; j < cfg.N; ++j) EXPECT_EQ(cache.at(SegmentId{j, full_set(cfg.K)}), lib[static_cast<std::size_t>(j)]);
  }
}

TEST(Place, RedundantStorageUsesShorterCode) {
  SystemConfig cfg;
  cfg.P = 7;
  cfg.K = 5;
  cfg.N = 5;
  cfg.F = 8 * 40;
  cfg.M_U = 1;
  cfg.M_S = ratio(5, 2);
  cfg.rho = 4;
  EXPECT_EQ(cfg.z(), 2);
  const auto st = place(random_library(cfg.N, cfg.file_bytes(), 4), cfg);
  EXPECT_EQ(st.scheme.coded.z, 2);
  EXPECT_EQ(st.generator.n(), 7);
  EXPECT_EQ(st.generator.k(), 2);
  EXPECT_TRUE(storage_audit(st, cfg).all_at_capacity());
}

TEST(Place, Errors) {
  auto cfg = small_config();
  cfg.M_S = 1;  // 1 + 2 * 1 < 4
  try {
    place(random_library(cfg.N, cfg.file_bytes(), 5), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::infeasible);
  }
  cfg = small_config();
  cfg.M_U = ratio(3, 2);
  try {
    place(random_library(cfg.N, cfg.file_bytes(), 5), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::contract);
  }
  cfg = small_config();
  EXPECT_THROW(place(random_library(cfg.N - 1, cfg.file_bytes(), 5), cfg), Error);
}

TEST(Place, Deterministic) {
  const auto cfg = small_config();
  const auto lib = random_library(cfg.N, cfg.file_bytes(), 6);
  const auto a = place(lib, cfg);
  const auto b = place(lib, cfg);
  EXPECT_EQ(a.server_store, b.server_store);
  EXPECT_EQ(a.user_cache, b.user_cache);
  EXPECT_EQ(a.generator, b.generator);
}

// Any file from one user's cache plus any rho - z server stores.
TEST(Place, ReconstructFromCachePlusAnyServers) {
  for (int z = 0; z <= 1; ++z) {
    auto cfg = small_config();
    cfg.F = 8 * 24;
    cfg.M_S = Rational(cfg.N, cfg.rho - z);
    const auto lib = random_library(cfg.N, cfg.file_bytes(), 7);
    const auto st = place(lib, cfg);
    const int k = cfg.rho - z;
    std::vector<int> servers{0, 1, 2};
    for_each_lex_combination(servers, k, [&](Subset chosen) {
      for (int user = 0; user < cfg.K; ++user) {
        for (int j = 0; j < cfg.N; ++j) {
          Bytes file;
          for (Subset a : colex_subsets(cfg.K, 1)) {
            const SegmentId id{j, a};
            const auto& cache = st.user_cache[static_cast<std::size_t>(user)];
            if (cache.count(id)) {
              file.insert(file.end(), cache.at(id).begin(), cache.at(id).end());
              continue;
            }
            std::vector<CodedChunk> shares;
            for (int p : elements(chosen)) shares.push_back(st.server_store[static_cast<std::size_t>(p)].at(id));
            for (const auto& piece : mds_decode(shares, st.generator)) file.insert(file.end(), piece.begin(), piece.end());
          }
          file.resize(static_cast<std::size_t>(cfg.file_bytes()));
          EXPECT_EQ(file, lib[static_cast<std::size_t>(j)]);
        }
      }
      return true;
    });
  }
}

TEST(StorageAudit, FlagsMissingChunk) {
  const auto cfg = small_config();
  auto st = place(random_library(cfg.N, cfg.file_bytes(), 8), cfg);
  st.server_store[1].erase(st.server_store[1].begin());
  const auto audit = storage_audit(st, cfg);
  EXPECT_FALSE(audit.all_at_capacity());
  EXPECT_TRUE(audit.servers[0].at_capacity());
  EXPECT_FALSE(audit.servers[1].at_capacity());
  EXPECT_LT(Rational(audit.servers[1].bits), audit.servers[1].expected_bits);
}

TEST(StorageAudit, NoUserCache) {
  auto cfg = small_config();
  cfg.M_U = 0;
  const auto st = place(random_library(cfg.N, cfg.file_bytes(), 9), cfg);
  const auto audit = storage_audit(st, cfg);
  for (const auto& u : audit.users) EXPECT_EQ(u.bits, 0);
  EXPECT_TRUE(audit.all_at_capacity());
}

TEST(MinStoragePlacement, ExactCapacities) {
  SystemConfig cfg;
  cfg.P = 7;
  cfg.K = 5;
  cfg.N = 5;
  cfg.F = 8 * 40;
  cfg.M_U = 1;
  cfg.rho = 4;
  cfg.M_S = cfg.min_storage();
  EXPECT_EQ(cfg.M_S, 1);
  const auto st = place(random_library(cfg.N, cfg.file_bytes(), 10), cfg);
  EXPECT_EQ(st.scheme.kind, SchemeKind::min_storage);
  EXPECT_TRUE(storage_audit(st, cfg).all_at_capacity());
}
