#pragma once

// Command implementations behind the mscc CLI: configuration parsing,
// end-to-end verification, sweeps, topology replay and extremes.

#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mscc/analysis.hpp"
#include "mscc/config.hpp"
#include "mscc/delivery.hpp"
#include "mscc/errors.hpp"
#include "mscc/placement.hpp"
#include "mscc/rational.hpp"
#include "mscc/rng.hpp"
#include "mscc/simulation.hpp"
#include "mscc/topology.hpp"

namespace mscc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr std::int64_t kDefaultFileBits = 8 * 120;

// ---------------------------------------------------------------------------
// Parsing

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::parse, "cannot open " + path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_json_text(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::parse, path + ": " + e.what());
  }
}

// A number, or a string such as "5/4", "1.25" or "3".
inline Rational rational_from_json(const nlohmann::json& v, const std::string& field) {
  try {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_number()) return from_double(v.get<double>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
  } catch (const Error&) {
  }
  throw Error(ErrorCode::parse, "field \"" + field + "\" must be a number or a rational string like \"5/4\"");
}

inline int int_field(const nlohmann::json& j, const std::string& field) {
  if (!j.contains(field)) throw Error(ErrorCode::parse, "missing field \"" + field + "\"");
  if (!j.at(field).is_number_integer()) throw Error(ErrorCode::parse, "field \"" + field + "\" must be an integer");
  return j.at(field).get<int>();
}

inline SystemConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::parse, "configuration must be a JSON object");
  SystemConfig cfg;
  cfg.P = int_field(j, "P");
  cfg.K = int_field(j, "K");
  cfg.N = int_field(j, "N");
  cfg.rho = int_field(j, "rho");
  cfg.F = j.contains("F") ? int_field(j, "F") : kDefaultFileBits;
  if (!j.contains("M_U")) throw Error(ErrorCode::parse, "missing field \"M_U\"");
  cfg.M_U = rational_from_json(j.at("M_U"), "M_U");
  if (!j.contains("M_S")) throw Error(ErrorCode::parse, "missing field \"M_S\"");
  if (j.at("M_S") == "min")
    cfg.M_S = cfg.min_storage();
  else
    cfg.M_S = rational_from_json(j.at("M_S"), "M_S");
  cfg.validate();
  return cfg;
}

inline nlohmann::json config_to_json(const SystemConfig& cfg) {
  return {{"P", cfg.P},
          {"K", cfg.K},
          {"N", cfg.N},
          {"F", cfg.F},
          {"rho", cfg.rho},
          {"M_U", to_string(cfg.M_U)},
          {"M_S", to_string(cfg.M_S)}};
}

inline std::vector<TransmissionMode> parse_modes(const std::string& s) {
  if (s == "successive") return {TransmissionMode::successive};
  if (s == "parallel") return {TransmissionMode::parallel};
  if (s == "both") return {TransmissionMode::successive, TransmissionMode::parallel};
  throw Error(ErrorCode::parse, "mode must be successive, parallel or both");
}

inline std::vector<Method> parse_methods(const std::string& s) {
  if (s == "formula") return {Method::formula};
  if (s == "simulate") return {Method::simulate};
  if (s == "both") return {Method::formula, Method::simulate};
  throw Error(ErrorCode::parse, "method must be formula, simulate or both");
}

namespace detail {

inline const nlohmann::json& array_field(const nlohmann::json& j, const std::string& field) {
  if (!j.contains(field) || !j.at(field).is_array() || j.at(field).empty())
    throw Error(ErrorCode::parse, "field \"" + field + "\" must be a non-empty array");
  return j.at(field);
}

}  // namespace detail

// {"P", "K", "N", "F"?, "rho": [...], "M_U": [...], "M_S": [... | "min"],
//  "mode"?, "method"?, "trials"?, "seed"?, "enumerate"?}
inline SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::parse, "sweep specification must be a JSON object");
  SweepSpec spec;
  spec.P = int_field(j, "P");
  spec.K = int_field(j, "K");
  spec.N = int_field(j, "N");
  if (j.contains("F")) spec.F = int_field(j, "F");
  for (const auto& v : detail::array_field(j, "rho")) {
    if (!v.is_number_integer()) throw Error(ErrorCode::parse, "rho entries must be integers");
    spec.rho.push_back(v.get<int>());
  }
  for (const auto& v : detail::array_field(j, "M_U")) spec.M_U.push_back(rational_from_json(v, "M_U"));
  for (const auto& v : detail::array_field(j, "M_S")) {
    if (v == "min")
      spec.M_S.push_back(StorageEntry{});
    else
      spec.M_S.push_back(StorageEntry{rational_from_json(v, "M_S")});
  }
  if (j.contains("mode")) spec.modes = parse_modes(j.at("mode").get<std::string>());
  if (j.contains("method")) spec.methods = parse_methods(j.at("method").get<std::string>());
  if (j.contains("trials")) spec.trials = j.at("trials").get<std::int64_t>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("enumerate")) spec.enumerate = j.at("enumerate").get<bool>();
  if (spec.trials < 1) throw Error(ErrorCode::parse, "trials must be positive");
  SystemConfig probe;
  probe.P = spec.P;
  probe.K = spec.K;
  probe.N = spec.N;
  probe.F = spec.F;
  for (int rho : spec.rho) {
    probe.rho = rho;
    probe.M_S = 1;
    probe.M_U = spec.N;
    probe.validate();
  }
  return spec;
}

inline std::vector<Bytes> random_library(const SystemConfig& cfg, Rng& rng) {
  std::vector<Bytes> lib(static_cast<std::size_t>(cfg.N), Bytes(static_cast<std::size_t>(cfg.file_bytes())));
  for (auto& f : lib)
    for (auto& b : f) b = static_cast<std::uint8_t>(rng() & 0xFF);
  return lib;
}

inline DemandVector random_demands(int K, int N, Rng& rng) {
  DemandVector d(static_cast<std::size_t>(K));
  for (auto& x : d) x = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(N)));
  return d;
}

inline std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::string exact_and_decimal(const Rational& r) {
  return to_string(r) + " (" + format_value(to_double(r)) + ")";
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::int64_t trials = 100;
  bool enumerate = false;
  std::int64_t bound = kDefaultEnumerationBound;
  std::vector<TransmissionMode> modes{TransmissionMode::successive, TransmissionMode::parallel};
  bool corrupt_generator = false;  // fault injection: zero the last generator row
};

struct VerifyFailure {
  std::string check;
  std::string detail;
  nlohmann::json case_dump;
};

struct VerifyResult {
  std::int64_t topologies = 0;
  std::int64_t decoded = 0;
  std::int64_t checks = 0;  // passed
  std::optional<VerifyFailure> failure;
  bool passed() const { return !failure; }
};

namespace detail {

// Minimum cover size by scanning every server subset.
inline int brute_force_cover_size(Subset target, const Topology& topo, int needed) {
  int best = topo.P() + 1;
  for (Subset s = 0; s < (Subset{1} << topo.P()); ++s) {
    if (popcount(s) >= best) continue;
    bool ok = true;
    for (int k : elements(target)) ok = ok && popcount(s & topo.servers_of(k)) >= needed;
    if (ok) best = popcount(s);
  }
  return best;
}

class Verifier {
 public:
  Verifier(const Anchor& anchor, int anchor_index, const PlacementState& st, const std::vector<Bytes>& lib,
           const VerifyOptions& opts, VerifyResult& result)
      : a_(anchor), index_(anchor_index), st_(st), lib_(lib), opts_(opts), r_(result) {}

  // False once a failure has been recorded.
  bool run(const Topology& topo, const DemandVector& d) {
    ++r_.topologies;
    for (auto mode : opts_.modes)
      if (!run_mode(topo, d, mode)) return false;
    return true;
  }

 private:
  bool fail(const std::string& check, const std::string& detail, const Topology& topo, const DemandVector& d,
            TransmissionMode mode, std::optional<int> user = std::nullopt) {
    nlohmann::json dump{{"anchor", index_ + 1},
                        {"config", config_to_json(a_.cfg)},
                        {"mode", to_string(mode)},
                        {"topology", topology_to_json(topo)},
                        {"demands", nlohmann::json::array()}};
    for (int f : d) dump["demands"].push_back(f + 1);
    if (user) dump["user"] = *user + 1;
    r_.failure = VerifyFailure{check, detail, dump};
    return false;
  }

  bool expect(bool ok, const std::string& check, const std::string& detail, const Topology& topo,
              const DemandVector& d, TransmissionMode mode) {
    if (!ok) return fail(check, detail, topo, d, mode);
    ++r_.checks;
    return true;
  }

  bool run_mode(const Topology& topo, const DemandVector& d, TransmissionMode mode) {
    DeliveryPlan plan;
    try {
      plan = materialize(make_schedule(topo, a_.cfg, mode), d, st_);
    } catch (const Error& e) {
      return fail("planning", e.what(), topo, d, mode);
    }
    for (int j = 0; j < a_.cfg.K; ++j) {
      Bytes got;
      try {
        got = decode_user(j, plan, topo, st_, d, a_.cfg);
      } catch (const Error& e) {
        return fail("decode-failure", e.what(), topo, d, mode, j);
      }
      if (got != lib_[static_cast<std::size_t>(d[static_cast<std::size_t>(j)])])
        return fail("decode-failure", "recovered bytes differ from the requested file", topo, d, mode, j);
      ++r_.decoded;
    }

    const auto measured = measured_latency(plan, st_);
    const auto scheduled = latency_report(plan.schedule);
    if (!expect(measured.per_server_rate == scheduled.per_server_rate, "bit-accounting",
                "transmitted bits disagree with the schedule's message lengths", topo, d, mode))
      return false;
    const Rational T = mode == TransmissionMode::successive ? measured.successive_T : measured.parallel_T;
    const auto q = degree_vector(topo);
    const auto& cfg = a_.cfg;

    if (a_.point.kind == SchemeKind::min_storage) {
      const Rational chunk = (Rational(1) - cfg.M_U / cfg.N) / cfg.rho;
      const Rational expected = mode == TransmissionMode::successive
                                    ? min_storage_latency(cfg)
                                    : chunk * *std::max_element(q.begin(), q.end());
      return expect(T == expected, "min-storage-latency",
                    "T = " + to_string(T) + ", expected " + to_string(expected), topo, d, mode);
    }

    const CodedPoint cp = a_.point.coded;
    if (cp.z == 0) {
      const auto counts = plan.per_server_messages();
      for (int p = 0; p < cfg.P; ++p) {
        const auto want = count_messages(q[static_cast<std::size_t>(p)], cfg.K, cp.t);
        if (!expect(counts[static_cast<std::size_t>(p)] == want, "message-count",
                    "server " + std::to_string(p + 1) + " sent " + std::to_string(counts[static_cast<std::size_t>(p)]) +
                        " messages, expected " + std::to_string(want),
                    topo, d, mode))
          return false;
      }
      const Rational expected = mode == TransmissionMode::successive ? latency_successive(q, cfg.K, cp.t, cfg.rho)
                                                                     : latency_parallel(q, cfg.K, cp.t, cfg.rho);
      return expect(T == expected, "closed-form", "T = " + to_string(T) + ", formula gives " + to_string(expected),
                    topo, d, mode);
    }

    const int needed = cp.sub_segments(cfg.rho);
    for (const auto& as : plan.schedule.assignment) {
      const int size = popcount(as.cover);
      if (!expect(size >= needed, "cover-lower-bound", "cover smaller than rho - z", topo, d, mode)) return false;
      if (mode == TransmissionMode::successive && cfg.P <= 16) {
        const int best = brute_force_cover_size(as.target, topo, needed);
        if (!expect(size == best, "cover-optimality",
                    "cover of size " + std::to_string(size) + ", brute force finds " + std::to_string(best), topo, d,
                    mode))
          return false;
      }
    }
    if (mode == TransmissionMode::parallel) {
      const auto succ = latency_report(make_schedule(topo, cfg, TransmissionMode::successive));
      return expect(T <= succ.parallel_T, "parallel-dominance",
                    "parallel peak " + to_string(T) + " exceeds successive plan's " + to_string(succ.parallel_T), topo,
                    d, mode);
    }
    return true;
  }

  const Anchor& a_;
  int index_;
  const PlacementState& st_;
  const std::vector<Bytes>& lib_;
  const VerifyOptions& opts_;
  VerifyResult& r_;
};

inline std::string describe(const Anchor& a) {
  if (a.point.kind == SchemeKind::min_storage) return "min-storage baseline";
  return "coded t=" + std::to_string(a.point.coded.t) + " z=" + std::to_string(a.point.coded.z);
}

}  // namespace detail

inline VerifyResult run_verify(const SystemConfig& cfg, const VerifyOptions& opts, std::ostream& log) {
  VerifyResult result;
  const auto mix = operating_mix(cfg);
  for (std::size_t ai = 0; ai < mix.size() && result.passed(); ++ai) {
    const Anchor& a = mix[ai];
    Rng lib_rng = make_rng(trial_seed(opts.seed, 0xA0 + ai));
    const auto lib = random_library(a.cfg, lib_rng);
    PlacementState st = place(lib, a.cfg);
    if (!storage_audit(st, a.cfg).all_at_capacity()) {
      result.failure = VerifyFailure{"storage-audit", "a node's stored bits differ from its capacity",
                                     nlohmann::json{{"anchor", ai + 1}, {"config", config_to_json(a.cfg)}}};
      break;
    }
    ++result.checks;
    if (opts.corrupt_generator) {
      const int last = st.generator.n() - 1;
      for (int c = 0; c < st.generator.k(); ++c) st.generator.at(last, c) = 0;
    }
    const std::int64_t before = result.topologies;
    detail::Verifier v(a, static_cast<int>(ai), st, lib, opts, result);
    const bool exhaustive = opts.enumerate && topology_count(a.cfg, opts.bound) <= opts.bound;
    if (exhaustive) {
      Rng demand_rng = make_rng(trial_seed(opts.seed, 0xD0 + ai));
      const DemandVector worst = a.cfg.N >= a.cfg.K ? worst_case_demands(a.cfg.K, a.cfg.N)
                                                    : random_demands(a.cfg.K, a.cfg.N, demand_rng);
      bool ok = true;
      for_each_topology(
          a.cfg, [&](const Topology& topo) { ok = ok && v.run(topo, worst); }, opts.bound);
    } else {
      for (std::int64_t i = 0; i < opts.trials; ++i) {
        const auto s = trial_seed(opts.seed, static_cast<std::uint64_t>(i));
        const Topology topo = sample_topology(a.cfg, s);
        Rng demand_rng = make_rng(splitmix64(s));
        if (!v.run(topo, random_demands(a.cfg.K, a.cfg.N, demand_rng))) break;
      }
    }
    log << "anchor " << ai + 1 << "/" << mix.size() << ": " << detail::describe(a) << ", weight "
        << to_string(a.weight) << ", " << result.topologies - before << (exhaustive ? " enumerated" : " sampled")
        << " topologies\n";
  }
  return result;
}

inline int cmd_verify(const SystemConfig& cfg, const VerifyOptions& opts, std::ostream& out,
                      const std::string& report_path = "") {
  out << "verify P=" << cfg.P << " K=" << cfg.K << " N=" << cfg.N << " rho=" << cfg.rho
      << " M_U=" << to_string(cfg.M_U) << " M_S=" << to_string(cfg.M_S) << " F=" << cfg.F << "\n";
  const auto r = run_verify(cfg, opts, out);
  out << "topologies: " << r.topologies << "\n";
  out << "decoded users: " << r.decoded << "\n";
  out << "checks passed: " << r.checks << "\n";
  nlohmann::json report{{"config", config_to_json(cfg)},
                        {"topologies", r.topologies},
                        {"decoded", r.decoded},
                        {"checks", r.checks},
                        {"passed", r.passed()}};
  if (r.failure) {
    out << "FAIL " << r.failure->check << ": " << r.failure->detail << "\n";
    out << "case: " << r.failure->case_dump.dump() << "\n";
    report["failure"] = {{"check", r.failure->check}, {"detail", r.failure->detail}, {"case", r.failure->case_dump}};
  } else {
    out << "PASS\n";
  }
  if (!report_path.empty()) {
    std::ofstream f(report_path);
    f << report.dump(2) << "\n";
  }
  return r.passed() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// sweep

inline int cmd_sweep(const SweepSpec& spec, std::ostream& out) {
  write_sweep_csv(out, run_sweep(spec));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// replay

// Plans for a fixed topology at every anchor of the operating point, with
// per-server counts and bits and the combined latencies.
inline nlohmann::json replay_report(const SystemConfig& cfg, const Topology& topo, std::uint64_t seed) {
  if (topo.P() != cfg.P || topo.K() != cfg.K || topo.rho() != cfg.rho)
    throw Error(ErrorCode::contract, "topology does not match P, K and rho of the configuration");
  const auto mix = operating_mix(cfg);
  nlohmann::json anchors = nlohmann::json::array();
  Rational t_succ = 0, t_par = 0;
  Rng rng = make_rng(seed);
  for (const auto& a : mix) {
    const auto lib = random_library(a.cfg, rng);
    const auto st = place(lib, a.cfg);
    const DemandVector d = a.cfg.N >= a.cfg.K ? worst_case_demands(a.cfg.K, a.cfg.N) : random_demands(a.cfg.K, a.cfg.N, rng);
    const auto succ = plan_successive(topo, d, st, a.cfg);
    const auto par = plan_parallel_greedy(topo, d, st, a.cfg);
    t_succ += a.weight * measured_latency(succ, st).successive_T;
    t_par += a.weight * measured_latency(par, st).parallel_T;
    anchors.push_back({{"weight", to_string(a.weight)},
                       {"config", config_to_json(a.cfg)},
                       {"successive", plan_summary_json(succ)},
                       {"parallel", plan_summary_json(par)}});
  }
  return {{"config", config_to_json(cfg)},
          {"topology", topology_to_json(topo)},
          {"degrees", degree_vector(topo)},
          {"anchors", anchors},
          {"T_successive", to_double(t_succ)},
          {"T_successive_exact", to_string(t_succ)},
          {"T_parallel", to_double(t_par)},
          {"T_parallel_exact", to_string(t_par)}};
}

inline int cmd_replay(const SystemConfig& cfg, const Topology& topo, std::uint64_t seed, std::ostream& out) {
  out << replay_report(cfg, topo, seed).dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// extremes

// Closed-form best and worst topologies; with `enumerate`, also the observed
// range over every topology, which must agree.
inline int cmd_extremes(const SystemConfig& cfg, const std::vector<TransmissionMode>& modes, bool enumerate,
                        std::int64_t bound, std::ostream& out) {
  bool agree = true;
  const auto mix = operating_mix(cfg);
  for (auto mode : modes) {
    const auto f = formula_latency(cfg, mode);
    if (!f.best) throw Error(ErrorCode::unsupported, "no closed form for storage redundancy z > 0");
    const bool successive = mode == TransmissionMode::successive;
    const auto conc = concentrated_degrees(cfg.P, cfg.K, cfg.rho);
    const auto bal = balanced_degrees(cfg.P, cfg.K, cfg.rho);
    out << to_string(mode) << ": best q=(" << join(successive ? conc : bal) << ") T=" << exact_and_decimal(*f.best)
        << "; worst q=(" << join(successive ? bal : conc) << ") T=" << exact_and_decimal(*f.worst) << "\n";
    if (!enumerate) continue;
    const auto e = enumerate_latency(cfg, mode, bound);
    const bool ok = e.min == *f.best && e.max == *f.worst;
    agree = agree && ok;
    out << "  enumerated " << e.n << " topologies: min " << exact_and_decimal(e.min) << ", max "
        << exact_and_decimal(e.max) << ", mean " << exact_and_decimal(e.mean()) << (ok ? ", agrees" : ", MISMATCH")
        << "\n";
  }
  return agree ? kExitOk : kExitFailure;
}

}  // namespace mscc
