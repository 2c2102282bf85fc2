#pragma once

// Random user-server association: each user connects to rho of the P
// servers.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "mscc/combinatorics.hpp"
#include "mscc/config.hpp"
#include "mscc/errors.hpp"
#include "mscc/rational.hpp"
#include "mscc/rng.hpp"

namespace mscc {

class Topology {
 public:
  Topology() = default;

  // servers_of_user[j] is Z_j (0-based server indices), all of size rho.
  Topology(int P, std::vector<Subset> servers_of_user) : P_(P), servers_of_user_(std::move(servers_of_user)) {
    if (P < 1 || P > kMaxGround) throw Error(ErrorCode::contract, "server count out of range");
    if (servers_of_user_.empty()) throw Error(ErrorCode::contract, "topology needs at least one user");
    rho_ = popcount(servers_of_user_.front());
    for (Subset z : servers_of_user_) {
      if (popcount(z) != rho_) throw Error(ErrorCode::contract, "all users must connect to rho servers");
      if (z & ~full_set(P)) throw Error(ErrorCode::contract, "server index out of range");
    }
    if (rho_ < 1) throw Error(ErrorCode::contract, "users must connect to at least one server");
  }

  int P() const { return P_; }
  int K() const { return static_cast<int>(servers_of_user_.size()); }
  int rho() const { return rho_; }

  Subset servers_of(int user) const { return servers_of_user_[static_cast<std::size_t>(user)]; }
  const std::vector<Subset>& servers_of_users() const { return servers_of_user_; }

  // K_p: users served by server p.
  Subset users_of(int server) const {
    Subset s = 0;
    for (int j = 0; j < K(); ++j)
      if (contains(servers_of(j), server)) s |= singleton(j);
    return s;
  }

  bool connected(int server, int user) const { return contains(servers_of(user), server); }

  // P x K 0/1 matrix A, a[i][j] = 1 iff server i serves user j.
  std::vector<std::vector<int>> incidence() const {
    std::vector<std::vector<int>> a(static_cast<std::size_t>(P_), std::vector<int>(static_cast<std::size_t>(K()), 0));
    for (int j = 0; j < K(); ++j)
      for (int i : elements(servers_of(j))) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    return a;
  }

  static Topology from_incidence(const std::vector<std::vector<int>>& a) {
    if (a.empty()) throw Error(ErrorCode::shape, "empty incidence matrix");
    const std::size_t K = a.front().size();
    std::vector<Subset> z(K, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].size() != K) throw Error(ErrorCode::shape, "ragged incidence matrix");
      for (std::size_t j = 0; j < K; ++j)
        if (a[i][j]) z[j] |= singleton(static_cast<int>(i));
    }
    return Topology(static_cast<int>(a.size()), std::move(z));
  }

  bool operator==(const Topology&) const = default;

 private:
  int P_ = 0;
  int rho_ = 0;
  std::vector<Subset> servers_of_user_;
};

// q_p = |K_p|.
inline std::vector<int> degree_vector(const Topology& topo) {
  std::vector<int> q(static_cast<std::size_t>(topo.P()), 0);
  for (Subset z : topo.servers_of_users())
    for (int p : elements(z)) ++q[static_cast<std::size_t>(p)];
  return q;
}

// Each Z_j is drawn uniformly from the C(P, rho) subsets: a uniform index
// into the colex enumeration, one draw per user in user order, from
// mt19937_64(seed).
inline Topology sample_topology(const SystemConfig& cfg, std::uint64_t seed) {
  if (cfg.rho < 1 || cfg.rho > cfg.P) throw Error(ErrorCode::contract, "need 1 <= rho <= P");
  Rng rng = make_rng(seed);
  const auto choices = static_cast<std::uint64_t>(binomial(cfg.P, cfg.rho));
  std::vector<Subset> z;
  z.reserve(static_cast<std::size_t>(cfg.K));
  for (int j = 0; j < cfg.K; ++j)
    z.push_back(colex_unrank(static_cast<std::int64_t>(uniform_below(rng, choices)), cfg.rho));
  return Topology(cfg.P, std::move(z));
}

inline constexpr std::int64_t kDefaultEnumerationBound = 10'000'000;

// C(P, rho)^K, saturated at bound + 1.
inline std::int64_t topology_count(const SystemConfig& cfg, std::int64_t bound = kDefaultEnumerationBound) {
  const std::int64_t choices = binomial(cfg.P, cfg.rho);
  __int128 total = 1;
  for (int j = 0; j < cfg.K; ++j) {
    total *= choices;
    if (total > bound) return bound + 1;
  }
  return static_cast<std::int64_t>(total);
}

// Visits all C(P, rho)^K topologies, lexicographic in the tuple of per-user
// colex subset indices (user 0 most significant).
template <typename Visitor>
void for_each_topology(const SystemConfig& cfg, Visitor&& visit, std::int64_t bound = kDefaultEnumerationBound) {
  if (topology_count(cfg, bound) > bound)
    throw Error(ErrorCode::too_large, "C(P, rho)^K exceeds the enumeration bound " + std::to_string(bound));
  const auto subsets = colex_subsets(cfg.P, cfg.rho);
  const std::size_t K = static_cast<std::size_t>(cfg.K);
  std::vector<std::size_t> digit(K, 0);
  std::vector<Subset> z(K, subsets.front());
  while (true) {
    visit(Topology(cfg.P, z));
    std::size_t pos = K;
    while (pos > 0) {
      --pos;
      if (++digit[pos] < subsets.size()) {
        z[pos] = subsets[digit[pos]];
        break;
      }
      digit[pos] = 0;
      z[pos] = subsets.front();
      if (pos == 0) return;
    }
  }
}

inline std::vector<Topology> enumerate_topologies(const SystemConfig& cfg,
                                                  std::int64_t bound = kDefaultEnumerationBound) {
  std::vector<Topology> out;
  for_each_topology(cfg, [&](const Topology& t) { out.push_back(t); }, bound);
  return out;
}

// Number of topologies in which a given server serves exactly q users:
// C(K, q) C(P-1, rho-1)^q C(P-1, rho)^(K-q).
inline BigInt topologies_with_degree(const SystemConfig& cfg, int q) {
  if (q < 0 || q > cfg.K) return 0;
  BigInt with = binomial(cfg.P - 1, cfg.rho - 1);
  BigInt without = binomial(cfg.P - 1, cfg.rho);
  return BigInt(binomial(cfg.K, q)) * boost::multiprecision::pow(with, static_cast<unsigned>(q)) *
         boost::multiprecision::pow(without, static_cast<unsigned>(cfg.K - q));
}

inline Rational prob_degree(const SystemConfig& cfg, int q) {
  if (q < 0 || q > cfg.K) throw Error(ErrorCode::contract, "need 0 <= q <= K");
  const BigInt total = boost::multiprecision::pow(BigInt(binomial(cfg.P, cfg.rho)), static_cast<unsigned>(cfg.K));
  return Rational(topologies_with_degree(cfg, q), total);
}

// JSON form {"Z": [[...], ...]} with 1-based server indices.
inline nlohmann::json topology_to_json(const Topology& topo) {
  nlohmann::json z = nlohmann::json::array();
  for (Subset s : topo.servers_of_users()) {
    nlohmann::json row = nlohmann::json::array();
    for (int p : elements(s)) row.push_back(p + 1);
    z.push_back(row);
  }
  return nlohmann::json{{"Z", z}};
}

inline Topology topology_from_json(const nlohmann::json& j, int P) {
  if (!j.is_object() || !j.contains("Z") || !j.at("Z").is_array())
    throw Error(ErrorCode::parse, "topology must be an object with array field \"Z\"");
  std::vector<Subset> z;
  for (const auto& row : j.at("Z")) {
    if (!row.is_array()) throw Error(ErrorCode::parse, "each Z entry must be an array of server indices");
    Subset s = 0;
    for (const auto& v : row) {
      if (!v.is_number_integer()) throw Error(ErrorCode::parse, "server indices must be integers");
      const int p = v.get<int>();
      if (p < 1 || p > P) throw Error(ErrorCode::parse, "server index " + std::to_string(p) + " outside [1, P]");
      if (contains(s, p - 1)) throw Error(ErrorCode::parse, "server index repeated within a user's set");
      s |= singleton(p - 1);
    }
    z.push_back(s);
  }
  try {
    return Topology(P, std::move(z));
  } catch (const Error& e) {
    throw Error(ErrorCode::parse, e.what());
  }
}

// Parse errors report the 1-based line and column of the offending byte.
inline nlohmann::json parse_json_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::parse, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                      e.what());
  }
}

}  // namespace mscc
