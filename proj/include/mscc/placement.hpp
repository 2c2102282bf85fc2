#pragma once

// Placement phase: file segmentation, MDS-coded server stores and uncoded
// user caches.

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mscc/combinatorics.hpp"
#include "mscc/config.hpp"
#include "mscc/errors.hpp"
#include "mscc/mds.hpp"

namespace mscc {

// Piece of file `file` cached by exactly the users in `subset`.
struct SegmentId {
  int file = 0;
  Subset subset = 0;
  auto operator<=>(const SegmentId&) const = default;
};

struct Segment {
  Subset subset = 0;
  Bytes data;
};

inline Bytes zero_pad(std::span<const std::uint8_t> data, std::size_t multiple) {
  Bytes out(data.begin(), data.end());
  if (multiple > 0 && out.size() % multiple != 0) out.resize(out.size() + multiple - out.size() % multiple, 0);
  return out;
}

// Splits `data` into `parts` equal blocks; data.size() must be divisible.
inline std::vector<Bytes> split_even(std::span<const std::uint8_t> data, std::size_t parts) {
  if (parts == 0 || data.size() % parts != 0) throw Error(ErrorCode::shape, "cannot split evenly");
  const std::size_t len = data.size() / parts;
  std::vector<Bytes> out;
  out.reserve(parts);
  for (std::size_t i = 0; i < parts; ++i)
    out.emplace_back(data.begin() + static_cast<std::ptrdiff_t>(i * len),
                     data.begin() + static_cast<std::ptrdiff_t>((i + 1) * len));
  return out;
}

// One segment per t-subset of the K users, in colex order of the subset
// bitmask. The file is zero-padded to a multiple of C(K, t) first.
inline std::vector<Segment> partition_file(std::span<const std::uint8_t> file, int K, int t) {
  if (t < 0 || t > K) throw Error(ErrorCode::contract, "need 0 <= t <= K");
  const auto subsets = colex_subsets(K, t);
  const Bytes padded = zero_pad(file, subsets.size());
  auto blocks = split_even(padded, subsets.size());
  std::vector<Segment> out;
  out.reserve(subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i) out.push_back(Segment{subsets[i], std::move(blocks[i])});
  return out;
}

struct PlacementState {
  SchemePoint scheme;
  int P = 0;
  int K = 0;
  int N = 0;
  int sub_segments = 1;              // MDS dimension k = rho - z (rho for min storage)
  std::size_t file_bytes = 0;        // original file length
  std::size_t padded_bytes = 0;      // length after padding; all capacity accounting uses it
  GeneratorMatrix generator;         // (P, sub_segments)
  std::vector<std::map<SegmentId, CodedChunk>> server_store;  // per server
  std::vector<std::map<SegmentId, Bytes>> user_cache;         // per user
};

// Coded symbol `row` of a segment, as any holder of the segment can
// regenerate it from the public generator.
inline Bytes coded_symbol(std::span<const std::uint8_t> segment, const GeneratorMatrix& g, int row) {
  const auto pieces = split_even(segment, static_cast<std::size_t>(g.k()));
  return encode_row(g, row, pieces);
}

namespace detail {

inline void check_library(std::span<const Bytes> library, const SystemConfig& cfg) {
  if (static_cast<int>(library.size()) != cfg.N) throw Error(ErrorCode::shape, "library must hold N files");
  for (const auto& f : library)
    if (static_cast<std::int64_t>(f.size()) != cfg.file_bytes())
      throw Error(ErrorCode::shape, "every file must be F/8 bytes long");
}

inline void store_segment(PlacementState& st, const SegmentId& id, const Bytes& segment) {
  const auto pieces = split_even(segment, static_cast<std::size_t>(st.sub_segments));
  auto chunks = mds_encode(pieces, st.generator);
  for (int p = 0; p < st.P; ++p) st.server_store[static_cast<std::size_t>(p)][id] = std::move(chunks[static_cast<std::size_t>(p)]);
}

}  // namespace detail

inline PlacementState place_coded(std::span<const Bytes> library, const SystemConfig& cfg, CodedPoint point) {
  cfg.validate();
  detail::check_library(library, cfg);
  PlacementState st;
  st.scheme = SchemePoint{SchemeKind::coded, point};
  st.P = cfg.P;
  st.K = cfg.K;
  st.N = cfg.N;
  st.sub_segments = point.sub_segments(cfg.rho);
  st.generator = build_generator(cfg.P, st.sub_segments);
  st.server_store.resize(static_cast<std::size_t>(cfg.P));
  st.user_cache.resize(static_cast<std::size_t>(cfg.K));
  st.file_bytes = static_cast<std::size_t>(cfg.file_bytes());
  const auto segment_count = static_cast<std::size_t>(binomial(cfg.K, point.t));
  const std::size_t multiple = segment_count * static_cast<std::size_t>(st.sub_segments);
  for (int j = 0; j < cfg.N; ++j) {
    const Bytes padded = zero_pad(library[static_cast<std::size_t>(j)], multiple);
    st.padded_bytes = padded.size();
    for (auto& seg : partition_file(padded, cfg.K, point.t)) {
      const SegmentId id{j, seg.subset};
      detail::store_segment(st, id, seg.data);
      for (int k : elements(seg.subset)) st.user_cache[static_cast<std::size_t>(k)][id] = seg.data;
    }
  }
  return st;
}

// Baseline at M_S = (N - M_U) / rho: every user caches the same leading
// M_U/N fraction of every file (segment keyed by the full user set) and the
// remainder (keyed by the empty set) is stored with a (P, rho) MDS code.
inline PlacementState place_min_storage(std::span<const Bytes> library, const SystemConfig& cfg) {
  cfg.validate();
  detail::check_library(library, cfg);
  const Rational fraction = cfg.M_U / cfg.N;
  const auto num = numerator(fraction).convert_to<std::size_t>();
  const auto den = denominator(fraction).convert_to<std::size_t>();
  PlacementState st;
  st.scheme = SchemePoint{SchemeKind::min_storage, {}};
  st.P = cfg.P;
  st.K = cfg.K;
  st.N = cfg.N;
  st.sub_segments = cfg.rho;
  st.generator = build_generator(cfg.P, cfg.rho);
  st.server_store.resize(static_cast<std::size_t>(cfg.P));
  st.user_cache.resize(static_cast<std::size_t>(cfg.K));
  st.file_bytes = static_cast<std::size_t>(cfg.file_bytes());
  const std::size_t multiple = den * static_cast<std::size_t>(cfg.rho);
  const Subset everyone = full_set(cfg.K);
  for (int j = 0; j < cfg.N; ++j) {
    const Bytes padded = zero_pad(library[static_cast<std::size_t>(j)], multiple);
    st.padded_bytes = padded.size();
    const std::size_t prefix_len = padded.size() / den * num;
    const Bytes prefix(padded.begin(), padded.begin() + static_cast<std::ptrdiff_t>(prefix_len));
    const Bytes rest(padded.begin() + static_cast<std::ptrdiff_t>(prefix_len), padded.end());
    detail::store_segment(st, SegmentId{j, 0}, rest);
    for (int k = 0; k < cfg.K; ++k) st.user_cache[static_cast<std::size_t>(k)][SegmentId{j, everyone}] = prefix;
  }
  return st;
}

// Dispatches on the operating point; fractional t or z must be handled by
// memory sharing before calling.
inline PlacementState place(std::span<const Bytes> library, const SystemConfig& cfg) {
  const SchemePoint sp = resolve_scheme(cfg);
  if (sp.kind == SchemeKind::min_storage) return place_min_storage(library, cfg);
  return place_coded(library, cfg, sp.coded);
}

struct NodeUsage {
  std::int64_t bits = 0;
  Rational expected_bits = 0;
  bool at_capacity() const { return Rational(bits) == expected_bits; }
};

struct StorageAudit {
  std::vector<NodeUsage> servers;
  std::vector<NodeUsage> users;

  bool all_at_capacity() const {
    for (const auto& s : servers)
      if (!s.at_capacity()) return false;
    for (const auto& u : users)
      if (!u.at_capacity()) return false;
    return true;
  }
};

// Bit usage per node against M_S * F' and M_U * F', where F' is the padded
// file length.
inline StorageAudit storage_audit(const PlacementState& st, const SystemConfig& cfg) {
  StorageAudit audit;
  const Rational file_bits(static_cast<std::int64_t>(st.padded_bytes * 8));
  for (const auto& store : st.server_store) {
    NodeUsage u;
    for (const auto& [id, chunk] : store) u.bits += static_cast<std::int64_t>(chunk.length_bits());
    u.expected_bits = cfg.M_S * file_bits;
    audit.servers.push_back(u);
  }
  for (const auto& cache : st.user_cache) {
    NodeUsage u;
    for (const auto& [id, bytes] : cache) u.bits += static_cast<std::int64_t>(bytes.size() * 8);
    u.expected_bits = cfg.M_U * file_bits;
    audit.users.push_back(u);
  }
  return audit;
}

}  // namespace mscc
