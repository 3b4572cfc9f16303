#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "egoflux/corpus.hpp"

namespace egoflux::testkit {

struct PaperSpec {
  std::string id;
  std::optional<int> year;
  std::string domain = "";
  std::vector<Author> authors = {};
};

using EdgeList = std::vector<std::pair<std::string, std::string>>;

inline Corpus make_corpus(const std::vector<PaperSpec>& papers, const EdgeList& edges,
                          IngestMode mode = IngestMode::strict) {
  Corpus::Builder b(mode);
  for (const auto& p : papers) {
    Paper paper;
    paper.id = p.id;
    paper.title = "Title of " + p.id;
    paper.year = p.year;
    paper.venue = "Venue";
    paper.domain = p.domain.empty() ? std::string(kUnassignedDomain) : p.domain;
    paper.authors = p.authors;
    b.add_paper(std::move(paper));
  }
  for (const auto& [from, to] : edges) b.add_citation(from, to);
  return std::move(b).build();
}

/// Random corpus: `n` papers named P000.., years in [y0, y1], domains from a
/// small alphabet (some unassigned), each ordered pair cited with
/// probability `p`. Returns the raw (unique, self-free) edge list too.
struct RandomCorpus {
  std::vector<PaperSpec> papers;
  EdgeList edges;
  Corpus corpus;
};

inline RandomCorpus random_corpus(std::mt19937_64& rng, std::size_t n, double p,
                                  int y0 = 1980, int y1 = 2000,
                                  double undated = 0.0) {
  RandomCorpus rc;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> year(y0, y1);
  const std::vector<std::string> domains = {"", "Bio", "Chem", "Phys", "Math"};
  for (std::size_t k = 0; k < n; ++k) {
    PaperSpec s;
    char buf[32];
    std::snprintf(buf, sizeof buf, "P%03zu", k);
    s.id = buf;
    if (unit(rng) >= undated) s.year = year(rng);
    s.domain = domains[rng() % domains.size()];
    rc.papers.push_back(s);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && unit(rng) < p) rc.edges.emplace_back(rc.papers[i].id, rc.papers[j].id);
  rc.corpus = make_corpus(rc.papers, rc.edges);
  return rc;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("egoflux-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path demo_dir() {
  return std::filesystem::path(EGOFLUX_TEST_DATA) / "demo";
}

/// The demo scholar's curated papers (author S1 in the demo corpus).
inline std::vector<std::string> demo_scholar_papers(const Corpus& corpus) {
  return corpus.papers_of("S1");
}

}  // namespace egoflux::testkit
