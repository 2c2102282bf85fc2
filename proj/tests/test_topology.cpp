#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "mscc/topology.hpp"

using namespace mscc;

namespace {

SystemConfig cfg_of(int P, int K, int rho) {
  SystemConfig c;
  c.P = P;
  c.K = K;
  c.N = K;
  c.rho = rho;
  c.M_S = Rational(c.N, rho);
  return c;
}

Topology from_json_text(const std::string& text, int P) { return topology_from_json(parse_json_text(text), P); }

}  // namespace

TEST(SampleTopology, FullConnectivity) {
  const auto cfg = cfg_of(3, 4, 3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto topo = sample_topology(cfg, seed);
    for (const auto& row : topo.incidence())
      for (int v : row) EXPECT_EQ(v, 1);
  }
}

TEST(SampleTopology, Deterministic) {
  const auto cfg = cfg_of(3, 4, 2);
  EXPECT_EQ(sample_topology(cfg, 42), sample_topology(cfg, 42));
  bool any_diff = false;
  for (std::uint64_t s = 0; s < 20; ++s) any_diff |= !(sample_topology(cfg, s) == sample_topology(cfg, s + 1));
  EXPECT_TRUE(any_diff);
}

TEST(SampleTopology, DegreeDistributionMatchesExact) {
  const auto cfg = cfg_of(3, 4, 2);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (degree_vector(sample_topology(cfg, static_cast<std::uint64_t>(i)))[0] == 2) ++hits;
  const double p = 24.0 / 81.0;
  EXPECT_EQ(prob_degree(cfg, 2), ratio(24, 81));
  const double sigma = std::sqrt(p * (1 - p) / n);
  EXPECT_NEAR(static_cast<double>(hits) / n, p, 3 * sigma);
}

TEST(SampleTopology, PerUserSubsetsUniform) {
  const auto cfg = cfg_of(5, 3, 2);
  const int n = 100000;
  std::vector<std::map<Subset, int>> freq(3);
  for (int i = 0; i < n; ++i) {
    const auto topo = sample_topology(cfg, 1000 + static_cast<std::uint64_t>(i));
    for (int j = 0; j < 3; ++j) ++freq[static_cast<std::size_t>(j)][topo.servers_of(j)];
  }
  const double p = 1.0 / 10.0;
  const double sigma = std::sqrt(p * (1 - p) / n);
  for (const auto& f : freq) {
    EXPECT_EQ(f.size(), 10U);
    for (const auto& [s, c] : f) EXPECT_NEAR(static_cast<double>(c) / n, p, 4 * sigma);
  }
}

TEST(EnumerateTopologies, Counts) {
  EXPECT_EQ(enumerate_topologies(cfg_of(3, 4, 2)).size(), 81U);
  EXPECT_EQ(enumerate_topologies(cfg_of(3, 4, 3)).size(), 1U);
  const auto two = enumerate_topologies(cfg_of(2, 2, 1));
  ASSERT_EQ(two.size(), 4U);
  // users 0 and 1 each pick {S1} or {S2}; user 0 is the most significant digit
  EXPECT_EQ(two[0].servers_of_users(), (std::vector<Subset>{1, 1}));
  EXPECT_EQ(two[1].servers_of_users(), (std::vector<Subset>{1, 2}));
  EXPECT_EQ(two[2].servers_of_users(), (std::vector<Subset>{2, 1}));
  EXPECT_EQ(two[3].servers_of_users(), (std::vector<Subset>{2, 2}));
}

TEST(EnumerateTopologies, DistinctAndValid) {
  const auto all = enumerate_topologies(cfg_of(4, 3, 2));
  EXPECT_EQ(all.size(), 216U);
  std::set<std::vector<Subset>> seen;
  for (const auto& t : all) {
    seen.insert(t.servers_of_users());
    int total = 0;
    for (int q : degree_vector(t)) total += q;
    EXPECT_EQ(total, 3 * 2);
  }
  EXPECT_EQ(seen.size(), all.size());
}

TEST(EnumerateTopologies, BoundExceeded) {
  try {
    enumerate_topologies(cfg_of(7, 5, 4), 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::too_large);
  }
  EXPECT_EQ(topology_count(cfg_of(7, 5, 4), 100000000), 52521875);
}

TEST(DegreeVector, SmallExamples) {
  const auto a = from_json_text(R"({"Z": [[1,2],[1,2],[2,3],[2,3]]})", 3);
  EXPECT_EQ(degree_vector(a), (std::vector<int>{2, 4, 2}));
  const auto b = from_json_text(R"({"Z": [[1,2],[1,2],[1,2],[1,2]]})", 3);
  EXPECT_EQ(degree_vector(b), (std::vector<int>{4, 4, 0}));
  const auto full = Topology(3, std::vector<Subset>(4, full_set(3)));
  EXPECT_EQ(degree_vector(full), (std::vector<int>{4, 4, 4}));
}

TEST(ProbDegree, Examples) {
  const auto cfg = cfg_of(3, 4, 2);
  EXPECT_EQ(prob_degree(cfg, 2), ratio(24, 81));
  Rational total = 0;
  for (int q = 0; q <= 4; ++q) total += prob_degree(cfg, q);
  EXPECT_EQ(total, 1);
  const auto full = cfg_of(3, 4, 3);
  EXPECT_EQ(prob_degree(full, 4), 1);
  for (int q = 0; q < 4; ++q) EXPECT_EQ(prob_degree(full, q), 0);
  EXPECT_THROW(prob_degree(cfg, 5), Error);
}

// Full enumeration reproduces the closed form exactly, for every server.
TEST(ProbDegree, EqualsEnumeration) {
  for (auto [P, K, rho] : std::vector<std::tuple<int, int, int>>{
           {3, 4, 2}, {2, 3, 1}, {4, 3, 2}, {5, 3, 3}, {4, 5, 1}, {5, 4, 2}, {6, 3, 4}}) {
    const auto cfg = cfg_of(P, K, rho);
    ASSERT_LE(topology_count(cfg), 100000);
    std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(P), std::vector<std::int64_t>(static_cast<std::size_t>(K + 1), 0));
    std::int64_t total = 0;
    for_each_topology(cfg, [&](const Topology& t) {
      const auto q = degree_vector(t);
      for (int p = 0; p < P; ++p) ++counts[static_cast<std::size_t>(p)][static_cast<std::size_t>(q[static_cast<std::size_t>(p)])];
      ++total;
    });
    for (int p = 0; p < P; ++p)
      for (int q = 0; q <= K; ++q)
        EXPECT_EQ(Rational(counts[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)], total), prob_degree(cfg, q))
            << P << K << rho << " p=" << p << " q=" << q;
  }
}

TEST(TopologyJson, RoundTrip) {
  const auto cfg = cfg_of(5, 4, 3);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto t = sample_topology(cfg, s);
    EXPECT_EQ(topology_from_json(topology_to_json(t), 5), t);
  }
  EXPECT_EQ(topology_to_json(from_json_text(R"({"Z": [[2,1]]})", 2)).dump(), R"({"Z":[[1,2]]})");
}

TEST(TopologyJson, Errors) {
  try {
    parse_json_text("{\n  \"Z\": [[1,2],\n  [2,\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  EXPECT_THROW(from_json_text(R"({"Z": [[1,4]]})", 3), Error);
  EXPECT_THROW(from_json_text(R"({"Z": [[1,2],[1]]})", 3), Error);
  EXPECT_THROW(from_json_text(R"({"Z": [[1,1]]})", 3), Error);
  EXPECT_THROW(from_json_text(R"({"X": []})", 3), Error);
}

TEST(Topology, IncidenceRoundTrip) {
  const auto t = sample_topology(cfg_of(6, 5, 3), 9);
  EXPECT_EQ(Topology::from_incidence(t.incidence()), t);
  for (int p = 0; p < 6; ++p)
    for (int j = 0; j < 5; ++j) EXPECT_EQ(contains(t.users_of(p), j), t.connected(p, j));
}
