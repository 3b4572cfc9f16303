#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "egoflux/corpus.hpp"
#include "egoflux/error.hpp"
#include "egoflux/influence.hpp"

namespace egoflux {

/// A paper citing at least one ego paper.
struct AlterNode {
  PaperIndex index = 0;
  std::string id;
  std::optional<int> year;
  std::string title;
  std::string venue;
  std::string domain;
  double eigenfactor = 0.0;
  std::vector<std::string> authors;  // display names, in byline order
  /// Number of distinct ego papers this alter cites (alter -> ego weight).
  int multiplicity = 0;

  bool has_domain() const { return domain != kUnassignedDomain; }
  bool operator==(const AlterNode&) const = default;
};

/// Citation between two alters, as positions in EgoNetwork::alters.
struct AlterEdge {
  std::size_t citing = 0;
  std::size_t cited = 0;

  auto operator<=>(const AlterEdge&) const = default;
};

struct EgoNetwork {
  std::vector<PaperIndex> ego;         // ascending (= id order)
  std::vector<std::string> ego_ids;    // same order as `ego`
  std::vector<AlterNode> alters;       // year ascending, undated last, then id
  std::vector<AlterEdge> alter_edges;  // sorted by (citing, cited)
  int first_year = 0;                  // earliest dated ego paper
  int last_year = 0;                   // latest year in the corpus
  std::size_t undated_alters = 0;

  std::optional<std::size_t> alter_position(std::string_view id) const {
    for (std::size_t k = 0; k < alters.size(); ++k)
      if (alters[k].id == id) return k;
    return std::nullopt;
  }

  bool operator==(const EgoNetwork&) const = default;
};

namespace detail {

inline bool year_then_index_less(const Corpus& corpus, PaperIndex a,
                                 PaperIndex b) {
  const int ya = corpus.paper(a).year.value_or(kMaxYear + 1);
  const int yb = corpus.paper(b).year.value_or(kMaxYear + 1);
  if (ya != yb) return ya < yb;
  return a < b;
}

}  // namespace detail

/// Egocentric network of a paper collection: every corpus paper citing an
/// ego paper becomes an alter, with alter -> ego weight equal to the number
/// of distinct ego papers cited, plus all citations among alters. Citations
/// between ego papers are not represented.
inline EgoNetwork build_ego_network(const Corpus& corpus,
                                    const InfluenceScores& scores,
                                    std::span<const std::string> ego_ids) {
  if (ego_ids.empty()) throw InvalidArgument("ego paper set is empty");
  EgoNetwork net;
  for (const auto& id : ego_ids) net.ego.push_back(corpus.index_of(id));
  std::sort(net.ego.begin(), net.ego.end());
  net.ego.erase(std::unique(net.ego.begin(), net.ego.end()), net.ego.end());
  for (auto e : net.ego) net.ego_ids.push_back(corpus.paper(e).id);

  auto is_ego = [&](PaperIndex i) {
    return std::binary_search(net.ego.begin(), net.ego.end(), i);
  };

  std::unordered_map<PaperIndex, int> multiplicity;
  for (auto e : net.ego)
    for (auto citer : corpus.in_cites(e))
      if (!is_ego(citer)) ++multiplicity[citer];

  std::vector<PaperIndex> order;
  order.reserve(multiplicity.size());
  for (const auto& [i, m] : multiplicity) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](PaperIndex a, PaperIndex b) {
    return detail::year_then_index_less(corpus, a, b);
  });

  std::unordered_map<PaperIndex, std::size_t> position;
  net.alters.reserve(order.size());
  for (auto i : order) {
    const Paper& p = corpus.paper(i);
    AlterNode a;
    a.index = i;
    a.id = p.id;
    a.year = p.year;
    a.title = p.title;
    a.venue = p.venue;
    a.domain = p.domain;
    a.eigenfactor = scores[i];
    for (const auto& au : p.authors) a.authors.push_back(au.name);
    a.multiplicity = multiplicity[i];
    if (!a.year) ++net.undated_alters;
    position.emplace(i, net.alters.size());
    net.alters.push_back(std::move(a));
  }

  for (std::size_t k = 0; k < net.alters.size(); ++k)
    for (auto cited : corpus.out_refs(net.alters[k].index))
      if (auto it = position.find(cited); it != position.end())
        net.alter_edges.push_back({k, it->second});
  std::sort(net.alter_edges.begin(), net.alter_edges.end());

  std::optional<int> first;
  for (auto e : net.ego)
    if (auto y = corpus.paper(e).year) first = first ? std::min(*first, *y) : *y;
  net.first_year = first.value_or(corpus.min_year().value_or(0));
  net.last_year = std::max(net.first_year, corpus.max_year().value_or(0));
  return net;
}

struct FundingWindow {
  int start = 0;
  int end = 0;
  bool operator==(const FundingWindow&) const = default;
};

enum class FundingPhase { none, before, during, after };

inline std::string_view to_string(FundingPhase p) {
  switch (p) {
    case FundingPhase::before: return "before";
    case FundingPhase::during: return "during";
    case FundingPhase::after: return "after";
    case FundingPhase::none: break;
  }
  return "none";
}

inline FundingPhase parse_funding_phase(std::string_view s) {
  if (s == "before") return FundingPhase::before;
  if (s == "during") return FundingPhase::during;
  if (s == "after") return FundingPhase::after;
  if (s == "none") return FundingPhase::none;
  throw InvalidArgument("unknown funding phase '" + std::string(s) + "'");
}

inline FundingPhase funding_phase(int year,
                                  const std::optional<FundingWindow>& window) {
  if (!window) return FundingPhase::none;
  if (year < window->start) return FundingPhase::before;
  if (year > window->end) return FundingPhase::after;
  return FundingPhase::during;
}

inline void validate_funding(const FundingWindow& w) {
  auto in_range = [](int y) { return y >= kMinYear && y <= kMaxYear; };
  if (!in_range(w.start) || !in_range(w.end))
    throw InvalidArgument("funding years must lie in [1500, 2100]");
  if (w.start > w.end)
    throw InvalidArgument("funding start year is after its end year");
}

/// Per-year indicator series on one shared year axis.
struct Timelines {
  std::vector<int> years;
  std::vector<int> publications;
  std::vector<int> citations_received;
  std::vector<double> ef_sum;
  std::vector<FundingPhase> funding_phase;
  std::optional<FundingWindow> funding;
  int undated_publications = 0;
  int undated_citations = 0;

  bool operator==(const Timelines&) const = default;
};

/// Year axis shared by timelines and the animation: from the earlier of
/// the first ego year and the first dated alter, to the last corpus year.
inline std::pair<int, int> year_axis(const EgoNetwork& net) {
  int start = net.first_year;
  for (const auto& a : net.alters)
    if (a.year) start = std::min(start, *a.year);
  return {start, std::max(start, net.last_year)};
}

/// Indicator series. Citations are credited to the citing paper's year and
/// weighted by alter -> ego multiplicity.
inline Timelines compute_timelines(const EgoNetwork& net, const Corpus& corpus,
                                   const InfluenceScores& scores,
                                   std::optional<FundingWindow> funding = {}) {
  if (funding) validate_funding(*funding);
  Timelines t;
  t.funding = funding;

  const auto [start, end] = year_axis(net);
  const std::size_t span_len = static_cast<std::size_t>(end - start + 1);
  t.years.resize(span_len);
  t.publications.assign(span_len, 0);
  t.citations_received.assign(span_len, 0);
  t.ef_sum.assign(span_len, 0.0);
  t.funding_phase.resize(span_len);
  for (std::size_t k = 0; k < span_len; ++k) {
    t.years[k] = start + static_cast<int>(k);
    t.funding_phase[k] = funding_phase(t.years[k], funding);
  }

  for (auto e : net.ego) {
    if (auto y = corpus.paper(e).year)
      ++t.publications[static_cast<std::size_t>(*y - start)];
    else
      ++t.undated_publications;
  }
  for (const auto& a : net.alters) {
    if (a.year)
      t.citations_received[static_cast<std::size_t>(*a.year - start)] +=
          a.multiplicity;
    else
      t.undated_citations += a.multiplicity;
  }
  for (const auto& [year, sum] : yearly_ef_sum(scores, net.ego_ids, corpus))
    t.ef_sum[static_cast<std::size_t>(year - start)] = sum;
  return t;
}

struct ShapeStats {
  std::size_t alter_count = 0;
  double alter_alter_density = 0.0;
  double domain_entropy = 0.0;
  std::size_t distinct_domains = 0;

  bool operator==(const ShapeStats&) const = default;
};

/// Density is the fraction of unordered alter pairs joined by a citation in
/// either direction. Entropy is the Shannon entropy (natural log) of the
/// alter domain distribution, "unassigned" counted as its own class.
inline ShapeStats compute_shape_stats(const EgoNetwork& net) {
  ShapeStats s;
  s.alter_count = net.alters.size();

  std::map<std::string, std::size_t> domains;
  for (const auto& a : net.alters) ++domains[a.domain];
  s.distinct_domains = domains.size();

  if (s.alter_count >= 2) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(net.alter_edges.size());
    for (const auto& e : net.alter_edges)
      pairs.emplace_back(std::min(e.citing, e.cited), std::max(e.citing, e.cited));
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    const double n = static_cast<double>(s.alter_count);
    s.alter_alter_density =
        std::min(1.0, static_cast<double>(pairs.size()) / (n * (n - 1) / 2.0));

    double h = 0.0;
    for (const auto& [d, count] : domains) {
      const double p = static_cast<double>(count) / n;
      h -= p * std::log(p);
    }
    s.domain_entropy = std::max(0.0, h);
  }
  return s;
}

/// Plain-text edge list: `citing<TAB>cited<TAB>multiplicity`. Alter -> ego
/// rows use the token EGO as the cited end; alter -> alter rows carry
/// multiplicity 1.
inline void write_edge_dump(std::ostream& out, const EgoNetwork& net) {
  for (const auto& a : net.alters)
    out << a.id << "\tEGO\t" << a.multiplicity << '\n';
  for (const auto& e : net.alter_edges)
    out << net.alters[e.citing].id << '\t' << net.alters[e.cited].id << "\t1\n";
}

}  // namespace egoflux
