#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "egoflux/corpus.hpp"
#include "egoflux/error.hpp"
#include "egoflux/influence.hpp"

namespace egoflux {

/// Binary score cache. All integers and doubles are little-endian; doubles
/// are IEEE-754 binary64. Layout (see docs/score_cache.md):
///
///   magic        8 bytes   "EGFXSCR\0"
///   version      u32       1
///   corpus_hash  u64
///   alpha        f64
///   tolerance    f64
///   max_iters    u32
///   iterations   u32
///   residual     f64
///   count        u64
///   count x { id_len u32, id bytes, score f64 }   in corpus index order
struct ScoreCacheHeader {
  std::uint64_t corpus_hash = 0;
  SolverConfig config;
  int iterations = 0;
  double residual = 0.0;
  std::uint64_t count = 0;

  bool operator==(const ScoreCacheHeader&) const = default;
};

inline constexpr char kScoreCacheMagic[8] = {'E', 'G', 'F', 'X',
                                             'S', 'C', 'R', '\0'};
inline constexpr std::uint32_t kScoreCacheVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>(v >> (8 * k)));
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>(v >> (8 * k)));
}
inline void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class ByteReader {
 public:
  explicit ByteReader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k)
      v |= std::uint32_t(static_cast<unsigned char>(bytes_[pos_++])) << (8 * k);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
      v |= std::uint64_t(static_cast<unsigned char>(bytes_[pos_++])) << (8 * k);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t len) {
    need(len);
    auto s = bytes_.substr(pos_, len);
    pos_ += len;
    return s;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t k) const {
    if (bytes_.size() - pos_ < k) throw DataError("score cache is truncated");
  }
  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string encode_score_cache(const Corpus& corpus,
                                      const SolverConfig& config,
                                      const InfluenceScores& scores) {
  if (scores.scores.size() != corpus.size())
    throw InvalidArgument("score vector does not match corpus size");
  std::string out(kScoreCacheMagic, sizeof kScoreCacheMagic);
  detail::put_u32(out, kScoreCacheVersion);
  detail::put_u64(out, corpus.content_hash());
  detail::put_f64(out, config.alpha);
  detail::put_f64(out, config.tolerance);
  detail::put_u32(out, static_cast<std::uint32_t>(config.max_iterations));
  detail::put_u32(out, static_cast<std::uint32_t>(scores.iterations_used));
  detail::put_f64(out, scores.residual);
  detail::put_u64(out, corpus.size());
  for (PaperIndex i = 0; i < corpus.size(); ++i) {
    const auto& id = corpus.paper(i).id;
    detail::put_u32(out, static_cast<std::uint32_t>(id.size()));
    out += id;
    detail::put_f64(out, scores[i]);
  }
  return out;
}

struct DecodedScoreCache {
  ScoreCacheHeader header;
  std::vector<std::pair<std::string, double>> records;
};

inline DecodedScoreCache decode_score_cache(std::string bytes) {
  detail::ByteReader r(std::move(bytes));
  if (r.str(8) != std::string(kScoreCacheMagic, 8))
    throw DataError("not a score cache file (bad magic)");
  if (const auto v = r.u32(); v != kScoreCacheVersion)
    throw DataError("unsupported score cache version " + std::to_string(v));
  DecodedScoreCache d;
  d.header.corpus_hash = r.u64();
  d.header.config.alpha = r.f64();
  d.header.config.tolerance = r.f64();
  d.header.config.max_iterations = static_cast<int>(r.u32());
  d.header.iterations = static_cast<int>(r.u32());
  d.header.residual = r.f64();
  d.header.count = r.u64();
  d.records.reserve(d.header.count);
  for (std::uint64_t k = 0; k < d.header.count; ++k) {
    auto id = r.str(r.u32());
    const double s = r.f64();
    d.records.emplace_back(std::move(id), s);
  }
  if (!r.at_end()) throw DataError("trailing bytes after score cache records");
  return d;
}

inline void write_score_cache(const std::filesystem::path& path,
                              const Corpus& corpus, const SolverConfig& config,
                              const InfluenceScores& scores) {
  const auto bytes = encode_score_cache(corpus, config, scores);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write score cache '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

/// Loads cached scores when the file exists, matches the corpus hash and
/// was produced with `config`; nullopt otherwise.
inline std::optional<InfluenceScores> read_score_cache(
    const std::filesystem::path& path, const Corpus& corpus,
    const SolverConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  DecodedScoreCache d;
  try {
    d = decode_score_cache(std::move(bytes));
  } catch (const DataError&) {
    return std::nullopt;
  }
  if (d.header.corpus_hash != corpus.content_hash() ||
      !(d.header.config == config) || d.header.count != corpus.size())
    return std::nullopt;
  InfluenceScores s;
  s.iterations_used = d.header.iterations;
  s.residual = d.header.residual;
  s.scores.resize(corpus.size());
  for (PaperIndex i = 0; i < corpus.size(); ++i) {
    if (d.records[i].first != corpus.paper(i).id) return std::nullopt;
    s.scores[i] = d.records[i].second;
  }
  return s;
}

/// Cached scores if valid, otherwise a fresh computation written back to
/// `path`. `recomputed` reports which happened.
inline InfluenceScores load_or_compute_scores(const std::filesystem::path& path,
                                              const Corpus& corpus,
                                              const SolverConfig& config,
                                              bool* recomputed = nullptr) {
  if (auto cached = read_score_cache(path, corpus, config)) {
    if (recomputed) *recomputed = false;
    return std::move(*cached);
  }
  auto scores = compute_eigenfactor(corpus, config);
  write_score_cache(path, corpus, config, scores);
  if (recomputed) *recomputed = true;
  return scores;
}

}  // namespace egoflux
