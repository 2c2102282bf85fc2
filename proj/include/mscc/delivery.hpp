#pragma once

// Delivery phase: multicast transmissions, minimum-cover server selection
// under storage redundancy, greedy load balancing for parallel links, and
// user-side decoding.
//
// Two layers: a Schedule says who sends what to whom (topology only), a
// DeliveryPlan carries the actual XOR payloads (needs placement and demands).

#include <algorithm>
#include <functional>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mscc/combinatorics.hpp"
#include "mscc/config.hpp"
#include "mscc/errors.hpp"
#include "mscc/mds.hpp"
#include "mscc/placement.hpp"
#include "mscc/rational.hpp"
#include "mscc/topology.hpp"

namespace mscc {

// d_k, 0-based file index per user.
using DemandVector = std::vector<int>;

inline DemandVector worst_case_demands(int K, int N) {
  if (K < 1) throw Error(ErrorCode::contract, "need K >= 1");
  if (N < K) throw Error(ErrorCode::unsupported, "distinct demands need N >= K");
  DemandVector d(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) d[static_cast<std::size_t>(k)] = k;
  return d;
}

enum class TransmissionMode { successive, parallel };

inline const char* to_string(TransmissionMode m) { return m == TransmissionMode::successive ? "successive" : "parallel"; }

enum class CoverStrategy { exact, greedy };

// Cover family searched by the parallel planner: minimum-cardinality covers
// only, or every cover with no removable server.
enum class ParallelCovers { minimum, irredundant };

struct PlanOptions {
  CoverStrategy cover = CoverStrategy::exact;
  ParallelCovers parallel_covers = ParallelCovers::irredundant;
};

// Server `server` sends, for target set H, the XOR of its coded chunks of
// segment (d_k, H \ {k}) over k in `recipients`.
struct Transmission {
  int server = 0;
  Subset target = 0;
  Subset recipients = 0;
  bool operator==(const Transmission&) const = default;
  auto operator<=>(const Transmission&) const = default;
};

// Cover chosen for one target set, and which servers deliver to which user.
struct CoverAssignment {
  Subset target = 0;
  Subset cover = 0;
  std::vector<std::pair<int, Subset>> served_by;  // (user, servers delivering to it)
};

struct Schedule {
  SchemePoint scheme;
  TransmissionMode mode = TransmissionMode::successive;
  int P = 0;
  Rational message_length = 0;  // in files
  std::vector<Transmission> transmissions;
  std::vector<CoverAssignment> assignment;  // coded scheme with z > 0

  std::vector<std::int64_t> per_server_messages() const {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(P), 0);
    for (const auto& tx : transmissions) ++counts[static_cast<std::size_t>(tx.server)];
    return counts;
  }
};

struct MulticastMessage {
  int server = 0;
  Subset target = 0;
  Subset recipients = 0;
  Bytes payload;
  std::int64_t length_bits() const { return static_cast<std::int64_t>(payload.size() * 8); }
};

struct DeliveryPlan {
  Schedule schedule;
  std::vector<MulticastMessage> messages;

  int P() const { return schedule.P; }
  TransmissionMode mode() const { return schedule.mode; }

  std::vector<std::int64_t> per_server_bits() const {
    std::vector<std::int64_t> bits(static_cast<std::size_t>(P()), 0);
    for (const auto& m : messages) bits[static_cast<std::size_t>(m.server)] += m.length_bits();
    return bits;
  }
  std::vector<std::int64_t> per_server_messages() const {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(P()), 0);
    for (const auto& m : messages) ++counts[static_cast<std::size_t>(m.server)];
    return counts;
  }
};

// Number of transmissions of server p in the z = 0 scheme.
inline std::int64_t count_messages(int q_p, int K, int t) {
  if (q_p < 0 || q_p > K) throw Error(ErrorCode::contract, "need 0 <= q_p <= K");
  return binomial(K, t + 1) - binomial(K - q_p, t + 1);
}

// ---------------------------------------------------------------------------
// Minimum cover
//
// The cover routines accept a Topology or any P x K incidence pattern,
// including ones where users have different numbers of servers.

class Incidence {
 public:
  explicit Incidence(const std::vector<std::vector<int>>& a) {
    if (a.empty()) throw Error(ErrorCode::shape, "empty incidence matrix");
    P_ = static_cast<int>(a.size());
    servers_of_user_.assign(a.front().size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].size() != servers_of_user_.size()) throw Error(ErrorCode::shape, "ragged incidence matrix");
      for (std::size_t j = 0; j < a[i].size(); ++j)
        if (a[i][j]) servers_of_user_[j] |= singleton(static_cast<int>(i));
    }
  }
  explicit Incidence(const Topology& topo) : P_(topo.P()), servers_of_user_(topo.servers_of_users()) {}

  int P() const { return P_; }
  int K() const { return static_cast<int>(servers_of_user_.size()); }
  Subset servers_of(int user) const { return servers_of_user_[static_cast<std::size_t>(user)]; }
  bool connected(int server, int user) const { return contains(servers_of(user), server); }

 private:
  int P_ = 0;
  std::vector<Subset> servers_of_user_;
};

namespace detail {

template <typename Connectivity>
void check_coverable(Subset target, const Connectivity& topo, int needed) {
  if (needed < 1) throw Error(ErrorCode::contract, "needed must be at least 1");
  for (int k : elements(target)) {
    if (k >= topo.K()) throw Error(ErrorCode::contract, "user index out of range");
    if (popcount(topo.servers_of(k)) < needed)
      throw Error(ErrorCode::coverage, "user " + std::to_string(k + 1) + " is connected to fewer than " +
                                           std::to_string(needed) + " servers");
  }
}

template <typename Connectivity>
bool covers(Subset servers, Subset target, const Connectivity& topo, int needed) {
  for (int k : elements(target))
    if (popcount(servers & topo.servers_of(k)) < needed) return false;
  return true;
}

template <typename Connectivity>
Subset candidate_servers(Subset target, const Connectivity& topo) {
  Subset c = 0;
  for (int k : elements(target)) c |= topo.servers_of(k);
  return c;
}

}  // namespace detail

// Every minimum-cardinality server set giving each user of `target` at least
// `needed` connected servers, in lexicographic order of the server tuples.
template <typename Connectivity>
std::vector<Subset> minimum_covers(Subset target, const Connectivity& topo, int needed) {
  detail::check_coverable(target, topo, needed);
  std::vector<Subset> found;
  if (target == 0) {
    found.push_back(0);
    return found;
  }
  const auto pool = elements(detail::candidate_servers(target, topo));
  for (int size = needed; size <= static_cast<int>(pool.size()) && found.empty(); ++size) {
    for_each_lex_combination(pool, size, [&](Subset s) {
      if (detail::covers(s, target, topo, needed)) found.push_back(s);
      return true;
    });
  }
  return found;
}

// Covers from which no server can be removed, by size and then
// lexicographically; the minimum covers come first.
template <typename Connectivity>
std::vector<Subset> irredundant_covers(Subset target, const Connectivity& topo, int needed) {
  detail::check_coverable(target, topo, needed);
  std::vector<Subset> found;
  if (target == 0) {
    found.push_back(0);
    return found;
  }
  const auto pool = elements(detail::candidate_servers(target, topo));
  for (int size = needed; size <= static_cast<int>(pool.size()); ++size) {
    for_each_lex_combination(pool, size, [&](Subset s) {
      if (!detail::covers(s, target, topo, needed)) return true;
      for (int p : elements(s))
        if (detail::covers(s & ~singleton(p), target, topo, needed)) return true;
      found.push_back(s);
      return true;
    });
  }
  return found;
}

// Repeatedly adds the server reaching the most still-deficient users of the
// target (ties: lowest index). Not guaranteed minimum.
template <typename Connectivity>
Subset greedy_cover(Subset target, const Connectivity& topo, int needed) {
  detail::check_coverable(target, topo, needed);
  Subset chosen = 0;
  std::map<int, int> deficit;
  for (int k : elements(target)) deficit[k] = needed;
  while (true) {
    int best = -1, best_gain = 0;
    for (int p = 0; p < topo.P(); ++p) {
      if (contains(chosen, p)) continue;
      int gain = 0;
      for (const auto& [k, d] : deficit)
        if (d > 0 && topo.connected(p, k)) ++gain;
      if (gain > best_gain) {
        best = p;
        best_gain = gain;
      }
    }
    if (best < 0) break;
    chosen |= singleton(best);
    for (auto& [k, d] : deficit)
      if (d > 0 && topo.connected(best, k)) --d;
  }
  return chosen;
}

// Smallest server set covering `target`; ties go to the lexicographically
// smallest server tuple.
template <typename Connectivity>
Subset minimum_cover(Subset target, const Connectivity& topo, int needed,
                            CoverStrategy strategy = CoverStrategy::exact) {
  if (strategy == CoverStrategy::greedy) return greedy_cover(target, topo, needed);
  return minimum_covers(target, topo, needed).front();
}

// Each user of the target takes the `needed` lowest-index servers of the
// cover it is connected to.
template <typename Connectivity>
CoverAssignment assign_cover(Subset target, Subset cover, const Connectivity& topo, int needed) {
  CoverAssignment a{target, cover, {}};
  for (int k : elements(target)) {
    const auto options = elements(cover & topo.servers_of(k));
    if (static_cast<int>(options.size()) < needed)
      throw Error(ErrorCode::coverage, "cover does not reach user " + std::to_string(k + 1));
    Subset mine = 0;
    for (int i = 0; i < needed; ++i) mine |= singleton(options[static_cast<std::size_t>(i)]);
    a.served_by.emplace_back(k, mine);
  }
  return a;
}

// One message per cover server that serves at least one user of the target.
inline std::vector<Transmission> transmissions_for(const CoverAssignment& a) {
  std::vector<Transmission> out;
  for (int p : elements(a.cover)) {
    Subset recipients = 0;
    for (const auto& [k, servers] : a.served_by)
      if (contains(servers, p)) recipients |= singleton(k);
    if (recipients) out.push_back(Transmission{p, a.target, recipients});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schedules

namespace detail {

inline CodedPoint require_coded(const SchemePoint& sp) {
  if (sp.kind != SchemeKind::coded) throw Error(ErrorCode::contract, "coded-caching operating point required");
  return sp.coded;
}

inline Rational coded_message_length(const SystemConfig& cfg, CodedPoint cp) {
  return Rational(1, cp.sub_segments(cfg.rho) * binomial(cfg.K, cp.t));
}

inline void check_topology(const Topology& topo, const SystemConfig& cfg) {
  if (topo.P() != cfg.P || topo.K() != cfg.K || topo.rho() != cfg.rho)
    throw Error(ErrorCode::contract, "topology does not match the configuration");
}

}  // namespace detail

// z = 0 transmissions of one server: for every (t+1)-subset H meeting K_p,
// one XOR over the users in K_p intersect H.
inline std::vector<Transmission> full_transmissions(int server, const Topology& topo, int t) {
  std::vector<Transmission> out;
  const Subset served = topo.users_of(server);
  for (Subset h : colex_subsets(topo.K(), t + 1)) {
    if (h & served) out.push_back(Transmission{server, h, h & served});
  }
  return out;
}

// Cover-based schedule for any z; with z = 0 the only cover of H is the union
// of its users' server sets.
inline Schedule schedule_by_cover(const Topology& topo, const SystemConfig& cfg, CodedPoint cp,
                                  const PlanOptions& opts = {}) {
  detail::check_topology(topo, cfg);
  Schedule s;
  s.scheme = SchemePoint{SchemeKind::coded, cp};
  s.P = cfg.P;
  s.message_length = detail::coded_message_length(cfg, cp);
  const int needed = cp.sub_segments(cfg.rho);
  for (Subset h : colex_subsets(cfg.K, cp.t + 1)) {
    const Subset cover = minimum_cover(h, topo, needed, opts.cover);
    auto a = assign_cover(h, cover, topo, needed);
    for (auto& tx : transmissions_for(a)) s.transmissions.push_back(tx);
    s.assignment.push_back(std::move(a));
  }
  return s;
}

inline Schedule schedule_successive(const Topology& topo, const SystemConfig& cfg, CodedPoint cp,
                                    const PlanOptions& opts = {}) {
  detail::check_topology(topo, cfg);
  if (cp.z > 0) return schedule_by_cover(topo, cfg, cp, opts);
  Schedule s;
  s.scheme = SchemePoint{SchemeKind::coded, cp};
  s.P = cfg.P;
  s.message_length = detail::coded_message_length(cfg, cp);
  for (int p = 0; p < cfg.P; ++p)
    for (auto& tx : full_transmissions(p, topo, cp.t)) s.transmissions.push_back(tx);
  return s;
}

// Target sets in colex order; each takes, among its candidate covers, the one
// whose resulting per-server loads, sorted descending, are lexicographically
// smallest (peak first; ties: first cover in lexicographic order). Rebalancing
// then re-chooses covers, one target at a time and failing that two jointly,
// while the sorted load vector strictly decreases. The result is never worse than the successive
// schedule's maximum load: if it were, that schedule is returned instead.
inline Schedule schedule_parallel_greedy(const Topology& topo, const SystemConfig& cfg, CodedPoint cp,
                                         const PlanOptions& opts = {}) {
  detail::check_topology(topo, cfg);
  Schedule fallback = schedule_successive(topo, cfg, cp, opts);
  fallback.mode = TransmissionMode::parallel;
  if (cp.z == 0) return fallback;

  const int needed = cp.sub_segments(cfg.rho);
  std::vector<Subset> targets;
  std::vector<std::vector<CoverAssignment>> options;
  for (Subset h : colex_subsets(cfg.K, cp.t + 1)) {
    std::vector<Subset> covers;
    if (opts.cover == CoverStrategy::greedy)
      covers.push_back(greedy_cover(h, topo, needed));
    else if (opts.parallel_covers == ParallelCovers::minimum)
      covers = minimum_covers(h, topo, needed);
    else
      covers = irredundant_covers(h, topo, needed);
    std::vector<CoverAssignment> as;
    for (Subset c : covers) as.push_back(assign_cover(h, c, topo, needed));
    targets.push_back(h);
    options.push_back(std::move(as));
  }

  std::vector<std::int64_t> load(static_cast<std::size_t>(cfg.P), 0);
  const auto apply = [&](const CoverAssignment& a, std::int64_t delta) {
    for (const auto& tx : transmissions_for(a)) load[static_cast<std::size_t>(tx.server)] += delta;
  };
  const auto profile_with = [&](const CoverAssignment& a) {
    auto trial = load;
    for (const auto& tx : transmissions_for(a)) ++trial[static_cast<std::size_t>(tx.server)];
    std::sort(trial.begin(), trial.end(), std::greater<>());
    return trial;
  };
  const auto pick = [&](const std::vector<CoverAssignment>& as) {
    std::size_t best = 0;
    std::vector<std::int64_t> best_profile;
    for (std::size_t i = 0; i < as.size(); ++i) {
      auto prof = profile_with(as[i]);
      if (i == 0 || prof < best_profile) {
        best = i;
        best_profile = std::move(prof);
      }
    }
    return best;
  };

  std::vector<std::size_t> chosen(targets.size(), 0);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    chosen[i] = pick(options[i]);
    apply(options[i][chosen[i]], 1);
  }
  const auto single_pass = [&] {
    bool changed = false;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (options[i].size() < 2) continue;
      apply(options[i][chosen[i]], -1);
      const auto keep = profile_with(options[i][chosen[i]]);
      const std::size_t next = pick(options[i]);
      if (next != chosen[i] && profile_with(options[i][next]) < keep) {
        chosen[i] = next;
        changed = true;
      }
      apply(options[i][chosen[i]], 1);
    }
    return changed;
  };
  const auto sorted_load = [&] {
    auto v = load;
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
  };
  // First improving joint re-choice of two targets, if any.
  const auto pair_move = [&] {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (options[i].size() < 2) continue;
      for (std::size_t j = i + 1; j < targets.size(); ++j) {
        if (options[j].size() < 2) continue;
        const auto current = sorted_load();
        apply(options[i][chosen[i]], -1);
        apply(options[j][chosen[j]], -1);
        for (std::size_t a = 0; a < options[i].size(); ++a) {
          apply(options[i][a], 1);
          for (std::size_t b = 0; b < options[j].size(); ++b) {
            apply(options[j][b], 1);
            const bool better = sorted_load() < current;
            apply(options[j][b], -1);
            if (better) {
              chosen[i] = a;
              chosen[j] = b;
              apply(options[j][b], 1);
              return true;
            }
          }
          apply(options[i][a], -1);
        }
        apply(options[i][chosen[i]], 1);
        apply(options[j][chosen[j]], 1);
      }
    }
    return false;
  };
  while (true) {
    while (single_pass()) {
    }
    if (!pair_move()) break;
  }

  Schedule s;
  s.scheme = SchemePoint{SchemeKind::coded, cp};
  s.mode = TransmissionMode::parallel;
  s.P = cfg.P;
  s.message_length = detail::coded_message_length(cfg, cp);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    auto& a = options[i][chosen[i]];
    for (auto& tx : transmissions_for(a)) s.transmissions.push_back(tx);
    s.assignment.push_back(std::move(a));
  }
  const auto peak_of = [](const Schedule& x) {
    const auto c = x.per_server_messages();
    return *std::max_element(c.begin(), c.end());
  };
  if (peak_of(fallback) < peak_of(s)) return fallback;
  return s;
}

// Baseline: every server unicasts its chunk of the uncached remainder to each
// user it serves.
inline Schedule schedule_min_storage(const Topology& topo, const SystemConfig& cfg, TransmissionMode mode) {
  detail::check_topology(topo, cfg);
  Schedule s;
  s.scheme = SchemePoint{SchemeKind::min_storage, {}};
  s.mode = mode;
  s.P = cfg.P;
  s.message_length = (Rational(1) - cfg.M_U / cfg.N) / cfg.rho;
  for (int p = 0; p < cfg.P; ++p)
    for (int k : elements(topo.users_of(p))) s.transmissions.push_back(Transmission{p, singleton(k), singleton(k)});
  return s;
}

inline Schedule make_schedule(const Topology& topo, const SystemConfig& cfg, TransmissionMode mode,
                              const PlanOptions& opts = {}) {
  const SchemePoint sp = resolve_scheme(cfg);
  if (sp.kind == SchemeKind::min_storage) return schedule_min_storage(topo, cfg, mode);
  Schedule s = mode == TransmissionMode::successive ? schedule_successive(topo, cfg, sp.coded, opts)
                                                    : schedule_parallel_greedy(topo, cfg, sp.coded, opts);
  s.mode = mode;
  return s;
}

// ---------------------------------------------------------------------------
// Payloads

namespace detail {

inline SegmentId wanted_segment(const SchemePoint& sp, const Transmission& tx, int user, const DemandVector& d) {
  const int file = d[static_cast<std::size_t>(user)];
  if (sp.kind == SchemeKind::min_storage) return SegmentId{file, 0};
  return SegmentId{file, tx.target & ~singleton(user)};
}

inline void check_demands(const DemandVector& d, const PlacementState& st) {
  if (static_cast<int>(d.size()) != st.K) throw Error(ErrorCode::shape, "demand vector must have K entries");
  for (int f : d)
    if (f < 0 || f >= st.N) throw Error(ErrorCode::contract, "demanded file index out of range");
}

}  // namespace detail

inline MulticastMessage materialize(const Transmission& tx, const SchemePoint& sp, const DemandVector& d,
                                    const PlacementState& st) {
  MulticastMessage m{tx.server, tx.target, tx.recipients, {}};
  const auto& store = st.server_store[static_cast<std::size_t>(tx.server)];
  for (int k : elements(tx.recipients)) {
    const auto& chunk = store.at(detail::wanted_segment(sp, tx, k, d));
    if (m.payload.empty()) {
      m.payload = chunk.payload;
    } else {
      for (std::size_t i = 0; i < m.payload.size(); ++i) m.payload[i] ^= chunk.payload[i];
    }
  }
  return m;
}

inline DeliveryPlan materialize(Schedule schedule, const DemandVector& d, const PlacementState& st) {
  detail::check_demands(d, st);
  DeliveryPlan plan;
  plan.messages.reserve(schedule.transmissions.size());
  for (const auto& tx : schedule.transmissions) plan.messages.push_back(materialize(tx, schedule.scheme, d, st));
  plan.schedule = std::move(schedule);
  return plan;
}

// Messages of server p under the z = 0 scheme:
// X_p(H) = XOR over k in K_p intersect H of C^p_{d_k, H \ {k}}.
inline std::vector<MulticastMessage> build_messages_full(int server, const Topology& topo, const DemandVector& d,
                                                         const PlacementState& st, const SystemConfig& cfg) {
  const SchemePoint sp = resolve_scheme(cfg);
  const CodedPoint cp = detail::require_coded(sp);
  if (cp.z != 0) throw Error(ErrorCode::contract, "build_messages_full needs z = 0");
  detail::check_demands(d, st);
  std::vector<MulticastMessage> out;
  for (const auto& tx : full_transmissions(server, topo, cp.t)) out.push_back(materialize(tx, sp, d, st));
  return out;
}

inline DeliveryPlan plan_successive(const Topology& topo, const DemandVector& d, const PlacementState& st,
                                    const SystemConfig& cfg, const PlanOptions& opts = {}) {
  return materialize(make_schedule(topo, cfg, TransmissionMode::successive, opts), d, st);
}

inline DeliveryPlan plan_parallel_greedy(const Topology& topo, const DemandVector& d, const PlacementState& st,
                                         const SystemConfig& cfg, const PlanOptions& opts = {}) {
  return materialize(make_schedule(topo, cfg, TransmissionMode::parallel, opts), d, st);
}

// ---------------------------------------------------------------------------
// Decoding

// Reconstructs W_{d_user} from the user's own cache, the public generator and
// the messages of the servers it is connected to.
inline Bytes decode_user(int user, const DeliveryPlan& plan, const Topology& topo, const PlacementState& st,
                         const DemandVector& d, const SystemConfig& cfg) {
  detail::check_topology(topo, cfg);
  detail::check_demands(d, st);
  const auto& cache = st.user_cache.at(static_cast<std::size_t>(user));
  const GeneratorMatrix& g = st.generator;
  const int want = d[static_cast<std::size_t>(user)];
  const SchemePoint& sp = st.scheme;

  std::map<Subset, std::vector<CodedChunk>> received;  // missing segment -> chunks
  for (const auto& m : plan.messages) {
    if (!contains(m.recipients, user) || !topo.connected(m.server, user)) continue;
    Bytes payload = m.payload;
    for (int k : elements(m.recipients & ~singleton(user))) {
      const SegmentId peer{d[static_cast<std::size_t>(k)], m.target & ~singleton(k)};
      const auto it = cache.find(peer);
      if (it == cache.end())
        throw Error(ErrorCode::decode_failure, "user " + std::to_string(user + 1) + " lacks a peer segment");
      const Bytes sym = coded_symbol(it->second, g, m.server);
      if (sym.size() != payload.size()) throw Error(ErrorCode::decode_failure, "message length mismatch");
      for (std::size_t i = 0; i < payload.size(); ++i) payload[i] ^= sym[i];
    }
    const Subset segment = sp.kind == SchemeKind::min_storage ? Subset{0} : (m.target & ~singleton(user));
    auto& bucket = received[segment];
    const bool dup = std::any_of(bucket.begin(), bucket.end(), [&](const CodedChunk& c) { return c.code_index == m.server; });
    if (!dup) bucket.push_back(CodedChunk{m.server, std::move(payload)});
  }

  const auto recover = [&](Subset segment) -> Bytes {
    const auto it = received.find(segment);
    const std::size_t have = it == received.end() ? 0 : it->second.size();
    if (static_cast<int>(have) < g.k())
      throw Error(ErrorCode::decode_failure, "user " + std::to_string(user + 1) + " received " +
                                                 std::to_string(have) + " of " + std::to_string(g.k()) +
                                                 " chunks for a missing segment");
    std::vector<Bytes> pieces;
    try {
      pieces = mds_decode(it->second, g);
    } catch (const Error& e) {
      throw Error(ErrorCode::decode_failure, e.what());
    }
    Bytes out;
    for (const auto& p : pieces) out.insert(out.end(), p.begin(), p.end());
    return out;
  };

  Bytes file;
  if (sp.kind == SchemeKind::min_storage) {
    const auto& prefix = cache.at(SegmentId{want, full_set(st.K)});
    file = prefix;
    const Bytes rest = recover(0);
    file.insert(file.end(), rest.begin(), rest.end());
  } else {
    for (Subset a : colex_subsets(st.K, sp.coded.t)) {
      Bytes seg;
      if (contains(a, user)) {
        seg = cache.at(SegmentId{want, a});
      } else {
        seg = recover(a);
      }
      file.insert(file.end(), seg.begin(), seg.end());
    }
  }
  if (file.size() != st.padded_bytes) throw Error(ErrorCode::decode_failure, "reassembled length mismatch");
  file.resize(st.file_bytes);
  return file;
}

// ---------------------------------------------------------------------------
// Latency accounting

struct LatencyReport {
  std::vector<Rational> per_server_rate;  // R_p in files
  Rational successive_T = 0;              // sum of R_p
  Rational parallel_T = 0;                // max of R_p
};

inline LatencyReport make_report(std::vector<Rational> rates) {
  LatencyReport r;
  for (const auto& x : rates) {
    r.successive_T += x;
    if (x > r.parallel_T) r.parallel_T = x;
  }
  r.per_server_rate = std::move(rates);
  return r;
}

inline LatencyReport latency_report(const Schedule& s) {
  std::vector<Rational> rates;
  for (auto c : s.per_server_messages()) rates.push_back(Rational(c) * s.message_length);
  return make_report(std::move(rates));
}

// From transmitted bits, normalized by the padded file length.
inline LatencyReport measured_latency(const DeliveryPlan& plan, const PlacementState& st) {
  const auto file_bits = static_cast<std::int64_t>(st.padded_bytes * 8);
  std::vector<Rational> rates;
  for (auto b : plan.per_server_bits()) rates.push_back(Rational(b, file_bits));
  return make_report(std::move(rates));
}

// ---------------------------------------------------------------------------
// JSON summary (1-based indices)

inline nlohmann::json indices_json(Subset s) {
  nlohmann::json a = nlohmann::json::array();
  for (int e : elements(s)) a.push_back(e + 1);
  return a;
}

inline nlohmann::json plan_summary_json(const Schedule& s) {
  nlohmann::json j;
  j["mode"] = to_string(s.mode);
  j["scheme"] = s.scheme.kind == SchemeKind::coded ? "coded" : "min_storage";
  if (s.scheme.kind == SchemeKind::coded) {
    j["t"] = s.scheme.coded.t;
    j["z"] = s.scheme.coded.z;
  }
  j["message_length"] = to_string(s.message_length);
  j["per_server_messages"] = s.per_server_messages();
  const auto report = latency_report(s);
  nlohmann::json rates = nlohmann::json::array();
  for (const auto& r : report.per_server_rate) rates.push_back(to_string(r));
  j["per_server_rate"] = rates;
  j["T_successive"] = to_string(report.successive_T);
  j["T_parallel"] = to_string(report.parallel_T);
  if (s.scheme.kind == SchemeKind::coded && s.scheme.coded.z > 0) {
    nlohmann::json assignment = nlohmann::json::array();
    for (const auto& a : s.assignment) {
      nlohmann::json served = nlohmann::json::object();
      for (const auto& [k, servers] : a.served_by) served[std::to_string(k + 1)] = indices_json(servers);
      assignment.push_back({{"H", indices_json(a.target)}, {"cover", indices_json(a.cover)}, {"served_by", served}});
    }
    j["assignment"] = assignment;
  }
  return j;
}

inline nlohmann::json plan_summary_json(const DeliveryPlan& plan) {
  nlohmann::json j = plan_summary_json(plan.schedule);
  j["per_server_bits"] = plan.per_server_bits();
  return j;
}

}  // namespace mscc
