#pragma once

// Closed-form delivery latencies, all in exact rational arithmetic. These
// cover the z = 0 scheme (M_S = N / rho); redundant storage is evaluated
// through simulated schedules instead.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "mscc/combinatorics.hpp"
#include "mscc/config.hpp"
#include "mscc/delivery.hpp"
#include "mscc/errors.hpp"
#include "mscc/rational.hpp"
#include "mscc/topology.hpp"

namespace mscc {

// T = (P/rho)(K-t)/(t+1) - 1/(rho C(K,t)) * sum_p C(K - q_p, t+1).
inline Rational latency_successive(std::span<const int> q, int K, int t, int rho) {
  const int P = static_cast<int>(q.size());
  Rational penalty = 0;
  for (int qp : q) penalty += binomial(K - qp, t + 1);
  return Rational(P, rho) * Rational(K - t, t + 1) - penalty / (Rational(rho) * binomial(K, t));
}

// T = max_p [C(K,t+1) - C(K - q_p, t+1)] / (rho C(K,t)).
inline Rational latency_parallel(std::span<const int> q, int K, int t, int rho) {
  std::int64_t most = 0;
  for (int qp : q) most = std::max(most, binomial(K, t + 1) - binomial(K - qp, t + 1));
  return Rational(most) / (Rational(rho) * binomial(K, t));
}

namespace detail {

inline int require_integer_t(const SystemConfig& cfg) {
  const Rational t = cfg.t();
  if (!is_integer(t)) throw Error(ErrorCode::contract, "t = " + to_string(t) + " is not an integer");
  return static_cast<int>(to_int64(t));
}

inline void require_z0(const SystemConfig& cfg) {
  if (cfg.M_S != Rational(cfg.N, cfg.rho))
    throw Error(ErrorCode::contract, "closed forms assume M_S = N / rho");
}

}  // namespace detail

// Average over all topologies under uniform association:
// E[T] = (P/rho)(K-t)/(t+1) - P/(rho C(K,t)) * sum_q Pr(Q_p = q) C(K-q, t+1).
inline Rational expected_latency_successive(const SystemConfig& cfg) {
  const int t = detail::require_integer_t(cfg);
  detail::require_z0(cfg);
  Rational acc = 0;
  for (int q = 0; q <= cfg.K; ++q) acc += prob_degree(cfg, q) * binomial(cfg.K - q, t + 1);
  return Rational(cfg.P, cfg.rho) * Rational(cfg.K - t, t + 1) -
         Rational(cfg.P) * acc / (Rational(cfg.rho) * binomial(cfg.K, t));
}

// Baseline at M_S = (N - M_U) / rho: T = K (1 - M_U / N).
inline Rational min_storage_latency(const SystemConfig& cfg) {
  if (cfg.M_S != cfg.min_storage())
    throw Error(ErrorCode::contract, "min-storage latency needs M_S = (N - M_U) / rho");
  return Rational(cfg.K) * (Rational(1) - cfg.M_U / cfg.N);
}

// M_U = alpha N t_lo / K + (1 - alpha) N t_hi / K with adjacent integers
// t_lo, t_hi. Integer t gives t_lo = t_hi = t and alpha = 1.
struct MemoryShare {
  int t_lo = 0;
  int t_hi = 0;
  Rational alpha = 1;

  template <typename LatencyOfT>
  Rational combine(LatencyOfT&& latency) const {
    if (t_lo == t_hi) return latency(t_lo);
    return alpha * latency(t_lo) + (Rational(1) - alpha) * latency(t_hi);
  }
};

inline MemoryShare memory_share(const SystemConfig& cfg) {
  if (cfg.M_U < 0 || cfg.M_U > Rational(cfg.N)) throw Error(ErrorCode::contract, "need 0 <= M_U <= N");
  const Rational t = cfg.t();
  const int lo = static_cast<int>(to_int64(floor_of(t)));
  if (is_integer(t)) return MemoryShare{lo, lo, 1};
  // t = alpha lo + (1 - alpha)(lo + 1)  =>  alpha = lo + 1 - t
  return MemoryShare{lo, lo + 1, Rational(lo + 1) - t};
}

// Exchange inequality: C(n1, r) + C(n2, r) >= C(n1 + 1, r) + C(n2 - 1, r) for
// positive r <= n1 and n1 + 2 <= n2.
inline bool binomial_exchange_holds(std::int64_t n1, std::int64_t n2, std::int64_t r) {
  if (r < 1 || n1 < 1 || n2 < 1 || r > n1 || n1 + 2 > n2)
    throw Error(ErrorCode::domain, "requires positive integers with r <= n1 and n1 + 2 <= n2");
  return binomial(n1, r) + binomial(n2, r) >= binomial(n1 + 1, r) + binomial(n2 - 1, r);
}

// All users attached to the same rho servers: q = (K, ..., K, 0, ..., 0).
inline std::vector<int> concentrated_degrees(int P, int K, int rho) {
  std::vector<int> q(static_cast<std::size_t>(P), 0);
  for (int p = 0; p < rho; ++p) q[static_cast<std::size_t>(p)] = K;
  return q;
}

// Degrees as equal as possible: max(q) <= min(q) + 1, sum = K rho.
inline std::vector<int> balanced_degrees(int P, int K, int rho) {
  std::vector<int> q(static_cast<std::size_t>(P), K * rho / P);
  for (int p = 0; p < K * rho % P; ++p) ++q[static_cast<std::size_t>(p)];
  return q;
}

inline Topology concentrated_topology(int P, int K, int rho) {
  return Topology(P, std::vector<Subset>(static_cast<std::size_t>(K), full_set(rho)));
}

// User j takes servers j*rho, ..., j*rho + rho - 1 (mod P); realizes
// balanced_degrees.
inline Topology balanced_topology(int P, int K, int rho) {
  std::vector<Subset> z;
  for (int j = 0; j < K; ++j) {
    Subset s = 0;
    for (int i = 0; i < rho; ++i) s |= singleton((j * rho + i) % P);
    z.push_back(s);
  }
  return Topology(P, std::move(z));
}

struct Extremes {
  std::vector<int> best_q;
  Rational best_T = 0;
  std::vector<int> worst_q;
  Rational worst_T = 0;
};

// Successive: concentrated is best, (K - t)/(t + 1); balanced is worst.
// Parallel: balanced is best (q_p = ceil(K rho / P) in the max term), any
// server serving all K users is worst.
inline Extremes topology_extremes(const SystemConfig& cfg, TransmissionMode mode) {
  const int t = detail::require_integer_t(cfg);
  detail::require_z0(cfg);
  const auto conc = concentrated_degrees(cfg.P, cfg.K, cfg.rho);
  const auto bal = balanced_degrees(cfg.P, cfg.K, cfg.rho);
  Extremes e;
  if (mode == TransmissionMode::successive) {
    e.best_q = conc;
    e.worst_q = bal;
    e.best_T = latency_successive(conc, cfg.K, t, cfg.rho);
    e.worst_T = latency_successive(bal, cfg.K, t, cfg.rho);
  } else {
    e.best_q = bal;
    e.worst_q = conc;
    e.best_T = latency_parallel(bal, cfg.K, t, cfg.rho);
    e.worst_T = latency_parallel(conc, cfg.K, t, cfg.rho);
  }
  return e;
}

}  // namespace mscc
