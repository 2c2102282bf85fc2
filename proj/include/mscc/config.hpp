#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mscc/errors.hpp"
#include "mscc/rational.hpp"

namespace mscc {

// Scalar parameters of one multi-server caching instance. Capacities are in
// units of whole files and may be fractional.
struct SystemConfig {
  int P = 1;                  // servers
  int K = 1;                  // users
  int N = 1;                  // files
  std::int64_t F = 8;         // file length in bits, a multiple of 8
  Rational M_U = 0;           // user cache, files
  Rational M_S = 1;           // server storage, files
  int rho = 1;                // servers each user connects to

  Rational t() const { return Rational(K) * M_U / N; }

  // From M_S = N / (rho - z).
  Rational z() const { return Rational(rho) - Rational(N) / M_S; }

  Rational min_storage() const { return (Rational(N) - M_U) / rho; }

  bool feasible() const { return M_U + Rational(rho) * M_S >= Rational(N); }

  std::int64_t file_bytes() const { return F / 8; }

  void validate() const {
    if (P < 1 || K < 1 || N < 1) throw Error(ErrorCode::contract, "P, K and N must be positive");
    if (P > 64 || K > 64) throw Error(ErrorCode::contract, "P and K are limited to 64");
    if (rho < 1 || rho > P) throw Error(ErrorCode::contract, "need 1 <= rho <= P");
    if (F <= 0 || F % 8 != 0) throw Error(ErrorCode::contract, "F must be a positive multiple of 8 bits");
    if (M_U < 0 || M_U > Rational(N)) throw Error(ErrorCode::contract, "need 0 <= M_U <= N");
    if (M_S <= 0) throw Error(ErrorCode::contract, "M_S must be positive");
    if (!feasible())
      throw Error(ErrorCode::infeasible, "M_U + rho*M_S = " + to_string(M_U + Rational(rho) * M_S) +
                                             " < N = " + std::to_string(N));
  }
};

// Integer operating point of the coded-caching scheme: t = K M_U / N and
// M_S = N / (rho - z) with 0 <= z <= rho - 1.
struct CodedPoint {
  int t = 0;
  int z = 0;
  int sub_segments(int rho) const { return rho - z; }
};

// The two schemes that can run byte-exactly at a single operating point.
enum class SchemeKind { coded, min_storage };

struct SchemePoint {
  SchemeKind kind = SchemeKind::coded;
  CodedPoint coded;  // meaningful for SchemeKind::coded
};

inline std::optional<CodedPoint> coded_point(const SystemConfig& cfg) {
  const Rational t = cfg.t();
  const Rational z = cfg.z();
  if (!is_integer(t) || !is_integer(z)) return std::nullopt;
  const auto zi = to_int64(z);
  if (zi < 0 || zi > cfg.rho - 1) return std::nullopt;
  return CodedPoint{static_cast<int>(to_int64(t)), static_cast<int>(zi)};
}

// Min-storage baseline applies when M_S = (N - M_U) / rho < N / rho.
inline bool is_min_storage_point(const SystemConfig& cfg) {
  return cfg.M_U > 0 && cfg.M_S == cfg.min_storage();
}

inline SchemePoint resolve_scheme(const SystemConfig& cfg) {
  cfg.validate();
  if (auto cp = coded_point(cfg)) return SchemePoint{SchemeKind::coded, *cp};
  if (is_min_storage_point(cfg)) return SchemePoint{SchemeKind::min_storage, {}};
  throw Error(ErrorCode::contract,
              "t = " + to_string(cfg.t()) + ", z = " + to_string(cfg.z()) +
                  " is not an integer operating point; use memory sharing");
}

}  // namespace mscc
