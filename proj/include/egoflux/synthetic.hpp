#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "egoflux/corpus.hpp"
#include "egoflux/error.hpp"

namespace egoflux::synthetic {

/// Parameters of a generated corpus. Papers are numbered in publication
/// order and only cite papers with a smaller number, so the citation graph
/// is acyclic.
struct Options {
  std::size_t papers = 1000;
  std::size_t citations = 5000;
  std::uint64_t seed = 1;
  int first_year = 1970;
  int last_year = 2020;
  std::size_t domains = 8;
  std::size_t authors = 0;          // 0: papers / 3
  double undated_fraction = 0.0;
  double unassigned_fraction = 0.05;
  /// Share of references drawn proportionally to existing citations.
  double preferential = 0.6;
  /// A designated scholar (author "S1") owning this many papers...
  std::size_t scholar_papers = 0;
  /// ...and receiving this many extra citations to them.
  std::size_t scholar_citations = 0;
};

/// Generated records plus the generator's own bookkeeping, which tests use
/// as the oracle for ingestion.
struct Dataset {
  std::vector<Paper> papers;
  std::vector<std::pair<std::size_t, std::size_t>> citations;  // unique
  std::vector<std::size_t> out_degree;
  std::vector<std::size_t> in_degree;
  std::vector<std::string> scholar_papers;

  std::map<std::size_t, std::size_t> out_degree_histogram() const {
    std::map<std::size_t, std::size_t> h;
    for (auto d : out_degree) ++h[d];
    return h;
  }
  std::map<std::size_t, std::size_t> in_degree_histogram() const {
    std::map<std::size_t, std::size_t> h;
    for (auto d : in_degree) ++h[d];
    return h;
  }
};

inline std::string paper_id(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "W%07zu", k);
  return buf;
}

inline Dataset generate(const Options& opt) {
  if (opt.papers < 2) throw InvalidArgument("synthetic corpus needs >= 2 papers");
  if (opt.last_year < opt.first_year) throw InvalidArgument("empty year range");
  const std::size_t max_edges = opt.papers * (opt.papers - 1) / 2;
  if (opt.citations + opt.scholar_citations > max_edges)
    throw InvalidArgument("more citations requested than an acyclic graph allows");
  if (opt.scholar_papers >= opt.papers)
    throw InvalidArgument("scholar cannot own every paper");

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset d;
  const std::size_t n = opt.papers;
  const std::size_t author_count = opt.authors ? opt.authors : std::max<std::size_t>(1, n / 3);
  const int years = opt.last_year - opt.first_year + 1;

  // Publication years grow with the paper number, loosely exponential like
  // real literature growth.
  std::vector<int> year(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    const double g = std::log1p(t * (std::exp(2.0) - 1.0)) / 2.0;
    year[k] = opt.first_year + std::min(years - 1, static_cast<int>(g * years));
  }

  // Scholar papers spread over the first half of the corpus.
  std::vector<std::size_t> scholar;
  if (opt.scholar_papers > 0) {
    const std::size_t stride = std::max<std::size_t>(1, (n / 2) / opt.scholar_papers);
    for (std::size_t s = 0; s < opt.scholar_papers; ++s)
      scholar.push_back(std::min(n - 2, 1 + s * stride));
    std::sort(scholar.begin(), scholar.end());
    scholar.erase(std::unique(scholar.begin(), scholar.end()), scholar.end());
  }

  d.papers.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    Paper& p = d.papers[k];
    p.id = paper_id(k);
    p.title = "Synthetic study " + std::to_string(k);
    if (unit(rng) >= opt.undated_fraction) p.year = year[k];
    p.venue = "Venue " + std::to_string(rng() % 40);
    if (unit(rng) >= opt.unassigned_fraction)
      p.domain = "Field " + std::string(1, static_cast<char>('A' + rng() % opt.domains));
    const std::size_t byline = 1 + rng() % 3;
    for (std::size_t a = 0; a < byline; ++a) {
      const auto author = rng() % author_count;
      p.authors.push_back({"A" + std::to_string(author),
                           "Author " + std::to_string(author) + " Surname"});
    }
  }
  const bool has_scholar = !scholar.empty();
  for (auto s : scholar) {
    d.papers[s].authors.insert(d.papers[s].authors.begin(), {"S1", "Demo Scholar"});
    d.papers[s].year = year[s];
    d.papers[s].domain = "Field A";
    d.scholar_papers.push_back(d.papers[s].id);
  }

  d.out_degree.assign(n, 0);
  d.in_degree.assign(n, 0);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve((opt.citations + opt.scholar_citations) * 2);
  std::vector<std::size_t> cited_pool;  // multiset of cited papers
  cited_pool.reserve(opt.citations);
  auto add = [&](std::size_t from, std::size_t to) {
    if (from <= to) return false;
    const std::uint64_t key = (std::uint64_t(from) << 32) | to;
    if (!seen.insert(key).second) return false;
    d.citations.emplace_back(from, to);
    ++d.out_degree[from];
    ++d.in_degree[to];
    cited_pool.push_back(to);
    return true;
  };

  std::size_t made = 0;
  while (made < opt.citations) {
    const std::size_t from = 1 + rng() % (n - 1);
    std::size_t to;
    if (!cited_pool.empty() && unit(rng) < opt.preferential) {
      to = cited_pool[rng() % cited_pool.size()];
    } else {
      // Recent papers are cited more: bias toward `from`.
      const double u = unit(rng);
      to = static_cast<std::size_t>(static_cast<double>(from) * std::sqrt(u));
    }
    if (add(from, std::min(to, from - 1))) ++made;
  }
  if (has_scholar) {
    std::size_t extra = 0;
    std::size_t attempts = 0;
    while (extra < opt.scholar_citations && attempts < 100 * opt.scholar_citations + 1000) {
      ++attempts;
      const std::size_t to = scholar[rng() % scholar.size()];
      const std::size_t from = to + 1 + rng() % (n - to - 1);
      if (add(from, to)) ++extra;
    }
  }
  return d;
}

inline void write(const Dataset& d, const std::string& papers_path,
                  const std::string& citations_path) {
  std::ofstream papers(papers_path, std::ios::trunc | std::ios::binary);
  if (!papers) throw DataError("cannot write '" + papers_path + "'");
  for (const auto& p : d.papers) papers << paper_record(p) << '\n';
  std::ofstream cites(citations_path, std::ios::trunc | std::ios::binary);
  if (!cites) throw DataError("cannot write '" + citations_path + "'");
  cites << "# citing\tcited\n";
  for (auto [from, to] : d.citations)
    cites << d.papers[from].id << '\t' << d.papers[to].id << '\n';
}

inline Corpus to_corpus(const Dataset& d) {
  Corpus::Builder b(IngestMode::strict);
  for (const auto& p : d.papers) b.add_paper(p);
  for (auto [from, to] : d.citations) b.add_citation(d.papers[from].id, d.papers[to].id);
  return std::move(b).build();
}

}  // namespace egoflux::synthetic
