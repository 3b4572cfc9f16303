#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "egoflux/corpus.hpp"
#include "egoflux/error.hpp"
#include "egoflux/influence.hpp"
#include "egoflux/score_cache.hpp"

namespace egoflux {

/// On-disk layout of a data directory:
///
///   papers.jsonl       copy of the ingested papers file
///   citations.tsv      copy of the ingested citations file
///   manifest.json      ingest mode and solver settings
///   scores.bin         score cache (docs/score_cache.md)
///   collections.jsonl  curated collections
class Workspace {
 public:
  struct Manifest {
    IngestMode mode = IngestMode::strict;
    SolverConfig solver;
  };

  explicit Workspace(std::filesystem::path root) : root_(std::move(root)) {}

  /// `explicit_dir` if given, else $EGOFLUX_DATA, else ./egoflux-data.
  static std::filesystem::path resolve(const std::string& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("EGOFLUX_DATA"); env && *env) return env;
    return "egoflux-data";
  }

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path papers() const { return root_ / "papers.jsonl"; }
  std::filesystem::path citations() const { return root_ / "citations.tsv"; }
  std::filesystem::path manifest_file() const { return root_ / "manifest.json"; }
  std::filesystem::path scores() const { return root_ / "scores.bin"; }
  std::filesystem::path collections() const { return root_ / "collections.jsonl"; }

  Manifest read_manifest() const {
    std::ifstream in(manifest_file());
    if (!in)
      throw DataError("no data directory at '" + root_.string() +
                      "' (run 'egoflux ingest' first)");
    try {
      const auto j = nlohmann::json::parse(in);
      Manifest m;
      m.mode = parse_ingest_mode(j.at("mode").get<std::string>());
      const auto& s = j.at("solver");
      m.solver.alpha = s.at("alpha").get<double>();
      m.solver.tolerance = s.at("tolerance").get<double>();
      m.solver.max_iterations = s.at("max_iterations").get<int>();
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw DataError("malformed manifest: " + std::string(e.what()));
    }
  }

  void write_manifest(const Manifest& m) const {
    nlohmann::ordered_json j;
    j["mode"] = m.mode == IngestMode::strict ? "strict" : "lenient";
    j["solver"] = {{"alpha", m.solver.alpha},
                   {"tolerance", m.solver.tolerance},
                   {"max_iterations", m.solver.max_iterations}};
    std::ofstream out(manifest_file(), std::ios::trunc);
    if (!out) throw DataError("cannot write '" + manifest_file().string() + "'");
    out << j.dump(2) << '\n';
  }

  Corpus load_corpus(IngestMode mode) const {
    return ingest(papers().string(), citations().string(), mode);
  }

 private:
  std::filesystem::path root_;
};

}  // namespace egoflux
