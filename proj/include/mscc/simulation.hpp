#pragma once

// Latency evaluation across operating points and topologies: memory sharing
// between integer operating points, Monte Carlo over random topologies, and
// the parameter sweep grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mscc/analysis.hpp"
#include "mscc/config.hpp"
#include "mscc/delivery.hpp"
#include "mscc/errors.hpp"
#include "mscc/rational.hpp"
#include "mscc/rng.hpp"
#include "mscc/topology.hpp"

namespace mscc {

// One integer operating point (or the min-storage baseline) and the fraction
// of every file delivered with it.
struct Anchor {
  Rational weight = 1;
  SystemConfig cfg;
  SchemePoint point;
};

namespace detail {

inline SystemConfig with_capacities(SystemConfig cfg, Rational m_u, Rational m_s) {
  cfg.M_U = std::move(m_u);
  cfg.M_S = std::move(m_s);
  return cfg;
}

// Coded anchors at storage N / (rho - z), splitting fractional t.
inline void push_coded(std::vector<Anchor>& out, const SystemConfig& cfg, int z, const Rational& weight) {
  const MemoryShare ms = memory_share(cfg);
  const Rational storage = Rational(cfg.N, cfg.rho - z);
  const auto push = [&](int t, const Rational& w) {
    if (w == 0) return;
    auto c = with_capacities(cfg, Rational(cfg.N) * t / cfg.K, storage);
    out.push_back(Anchor{weight * w, c, SchemePoint{SchemeKind::coded, CodedPoint{t, z}}});
  };
  if (ms.t_lo == ms.t_hi) {
    push(ms.t_lo, 1);
  } else {
    push(ms.t_lo, ms.alpha);
    push(ms.t_hi, Rational(1) - ms.alpha);
  }
}

}  // namespace detail

// Memory-sharing decomposition of an arbitrary feasible (M_U, M_S). Storage
// between adjacent anchors N/(rho - z) is split linearly, storage below N/rho
// mixes with the min-storage baseline, and storage above N is treated as N.
inline std::vector<Anchor> operating_mix(const SystemConfig& cfg) {
  cfg.validate();
  std::vector<Anchor> out;
  const Rational s0(cfg.N, cfg.rho);
  const Rational top(cfg.N);
  const Rational m_s = std::min(cfg.M_S, top);
  if (m_s >= s0) {
    const Rational z = Rational(cfg.rho) - Rational(cfg.N) / m_s;
    const int z_lo = static_cast<int>(to_int64(floor_of(z)));
    if (is_integer(z)) {
      detail::push_coded(out, cfg, z_lo, 1);
    } else {
      const Rational s_lo(cfg.N, cfg.rho - z_lo);
      const Rational s_hi(cfg.N, cfg.rho - z_lo - 1);
      const Rational beta = (s_hi - m_s) / (s_hi - s_lo);
      detail::push_coded(out, cfg, z_lo, beta);
      detail::push_coded(out, cfg, z_lo + 1, Rational(1) - beta);
    }
    return out;
  }
  const Rational s_min = cfg.min_storage();
  const Rational beta = (s0 - m_s) / (s0 - s_min);
  out.push_back(Anchor{beta, detail::with_capacities(cfg, cfg.M_U, s_min), SchemePoint{SchemeKind::min_storage, {}}});
  if (beta != 1) detail::push_coded(out, cfg, 0, Rational(1) - beta);
  return out;
}

inline Rational schedule_latency(const Schedule& s, TransmissionMode mode) {
  const auto r = latency_report(s);
  return mode == TransmissionMode::successive ? r.successive_T : r.parallel_T;
}

// Simulated latency of the scheme on one topology (schedules only, no
// payloads).
inline Rational simulated_latency(const std::vector<Anchor>& mix, const Topology& topo, TransmissionMode mode,
                                  const PlanOptions& opts = {}) {
  Rational total = 0;
  for (const auto& a : mix) total += a.weight * schedule_latency(make_schedule(topo, a.cfg, mode, opts), mode);
  return total;
}

struct SampleStats {
  std::int64_t n = 0;
  Rational sum = 0;
  Rational min = 0;
  Rational max = 0;
  double mean_d = 0;  // Welford accumulators
  double m2 = 0;

  void add(const Rational& x) {
    if (n == 0 || x < min) min = x;
    if (n == 0 || x > max) max = x;
    ++n;
    sum += x;
    const double v = to_double(x);
    const double delta = v - mean_d;
    mean_d += delta / static_cast<double>(n);
    m2 += delta * (v - mean_d);
  }
  Rational mean() const { return n ? sum / n : Rational(0); }
  double stderr_of_mean() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

// Trial i uses the topology drawn with trial_seed(base_seed, i), so every cell
// of a sweep sees the same topology sequence.
inline SampleStats monte_carlo(const SystemConfig& cfg, TransmissionMode mode, std::int64_t trials,
                               std::uint64_t base_seed, const PlanOptions& opts = {}) {
  const auto mix = operating_mix(cfg);
  SampleStats stats;
  for (std::int64_t i = 0; i < trials; ++i) {
    const Topology topo = sample_topology(cfg, trial_seed(base_seed, static_cast<std::uint64_t>(i)));
    stats.add(simulated_latency(mix, topo, mode, opts));
  }
  return stats;
}

inline SampleStats enumerate_latency(const SystemConfig& cfg, TransmissionMode mode,
                                     std::int64_t bound = kDefaultEnumerationBound, const PlanOptions& opts = {}) {
  const auto mix = operating_mix(cfg);
  SampleStats stats;
  for_each_topology(cfg, [&](const Topology& topo) { stats.add(simulated_latency(mix, topo, mode, opts)); }, bound);
  return stats;
}

// Closed-form best / worst / average where every anchor has one: coded
// anchors with z = 0 and the min-storage baseline. The parallel average has
// no closed form.
struct FormulaValues {
  std::optional<Rational> best, worst, avg;
};

inline FormulaValues formula_latency(const SystemConfig& cfg, TransmissionMode mode) {
  FormulaValues out;
  const auto mix = operating_mix(cfg);
  Rational best = 0, worst = 0, avg = 0;
  for (const auto& a : mix) {
    if (a.point.kind == SchemeKind::min_storage) {
      const Rational frac = (Rational(1) - a.cfg.M_U / a.cfg.N) / a.cfg.rho;
      if (mode == TransmissionMode::successive) {
        const Rational t = min_storage_latency(a.cfg);
        best += a.weight * t;
        worst += a.weight * t;
        avg += a.weight * t;
      } else {
        const int ceil_q = (a.cfg.K * a.cfg.rho + a.cfg.P - 1) / a.cfg.P;
        best += a.weight * frac * ceil_q;
        worst += a.weight * frac * a.cfg.K;
      }
      continue;
    }
    if (a.point.coded.z != 0) return out;
    const Extremes e = topology_extremes(a.cfg, mode);
    best += a.weight * e.best_T;
    worst += a.weight * e.worst_T;
    if (mode == TransmissionMode::successive) avg += a.weight * expected_latency_successive(a.cfg);
  }
  out.best = best;
  out.worst = worst;
  if (mode == TransmissionMode::successive) out.avg = avg;
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class Method { formula, simulate };

inline const char* to_string(Method m) { return m == Method::formula ? "formula" : "simulate"; }

// A server-storage grid entry: a value in files or the per-rho minimum
// (N - M_U) / rho.
struct StorageEntry {
  std::optional<Rational> value;  // nullopt = minimum storage
  Rational resolve(const SystemConfig& cfg) const { return value ? *value : cfg.min_storage(); }
};

struct SweepSpec {
  int P = 7;
  int K = 5;
  int N = 5;
  std::int64_t F = 8;
  std::vector<int> rho;
  std::vector<Rational> M_U;
  std::vector<StorageEntry> M_S;
  std::vector<TransmissionMode> modes{TransmissionMode::successive, TransmissionMode::parallel};
  std::vector<Method> methods{Method::formula, Method::simulate};
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;
  bool enumerate = false;
  std::int64_t bound = kDefaultEnumerationBound;
};

struct SweepRow {
  SystemConfig cfg;
  TransmissionMode mode = TransmissionMode::successive;
  Method method = Method::formula;
  std::optional<Rational> best, worst, avg;
  std::optional<double> stderr_value;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  bool infeasible = false;
};

inline const char* kSweepHeader = "P,K,N,rho,M_U,M_S,mode,method,T_best,T_worst,T_avg,stderr,trials,seed,flag";

// Rows in grid order: rho, then M_S, then M_U, then mode, then method.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const PlanOptions& opts = {}) {
  std::vector<SweepRow> rows;
  for (int rho : spec.rho) {
    for (const auto& storage : spec.M_S) {
      for (const auto& m_u : spec.M_U) {
        SystemConfig cfg;
        cfg.P = spec.P;
        cfg.K = spec.K;
        cfg.N = spec.N;
        cfg.F = spec.F;
        cfg.rho = rho;
        cfg.M_U = m_u;
        cfg.M_S = 1;
        cfg.M_S = storage.resolve(cfg);
        const bool feasible = cfg.M_S > 0 && cfg.feasible();
        for (auto mode : spec.modes) {
          for (auto method : spec.methods) {
            SweepRow row;
            row.cfg = cfg;
            row.mode = mode;
            row.method = method;
            row.seed = spec.seed;
            if (!feasible) {
              row.infeasible = true;
              rows.push_back(row);
              continue;
            }
            if (method == Method::formula) {
              const auto f = formula_latency(cfg, mode);
              row.best = f.best;
              row.worst = f.worst;
              row.avg = f.avg;
            } else {
              const bool exact = spec.enumerate && topology_count(cfg, spec.bound) <= spec.bound;
              const SampleStats s = exact ? enumerate_latency(cfg, mode, spec.bound, opts)
                                          : monte_carlo(cfg, mode, spec.trials, spec.seed, opts);
              row.best = s.min;
              row.worst = s.max;
              row.avg = s.mean();
              row.stderr_value = exact ? 0.0 : s.stderr_of_mean();
              row.trials = s.n;
            }
            rows.push_back(row);
          }
        }
      }
    }
  }
  return rows;
}

inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string format_cell(const std::optional<Rational>& r) { return r ? format_value(to_double(*r)) : ""; }

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << r.cfg.P << ',' << r.cfg.K << ',' << r.cfg.N << ',' << r.cfg.rho << ',' << format_value(to_double(r.cfg.M_U))
        << ',' << format_value(to_double(r.cfg.M_S)) << ',' << to_string(r.mode) << ',' << to_string(r.method) << ','
        << format_cell(r.best) << ',' << format_cell(r.worst) << ',' << format_cell(r.avg) << ','
        << (r.stderr_value ? format_value(*r.stderr_value) : "") << ',' << r.trials << ',' << r.seed << ','
        << (r.infeasible ? "infeasible" : "") << '\n';
  }
}

}  // namespace mscc
