#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "egoflux/corpus.hpp"
#include "egoflux/egonet.hpp"
#include "egoflux/influence.hpp"
#include "egoflux/scene.hpp"

namespace egoflux {

/// Ego network, timelines and VisSpec for one paper set.
struct CompiledScholar {
  EgoNetwork network;
  Timelines timelines;
  scene::VisSpec spec;
};

inline CompiledScholar compile_scholar(const Corpus& corpus,
                                       const InfluenceScores& scores,
                                       std::span<const std::string> papers,
                                       std::optional<FundingWindow> funding,
                                       const scene::CompileOptions& options) {
  CompiledScholar out;
  out.network = build_ego_network(corpus, scores, papers);
  out.timelines = compute_timelines(out.network, corpus, scores, funding);
  out.spec = scene::compile_visspec(corpus, scores, out.network, out.timelines, options);
  return out;
}

/// Tab-separated report: a stats block, a blank line, then one row per
/// timeline year.
inline void write_report(std::ostream& out, const EgoNetwork& net,
                         const Timelines& t) {
  const auto stats = compute_shape_stats(net);
  char buf[64];
  out << "stat\tvalue\n";
  out << "ego_papers\t" << net.ego.size() << '\n';
  out << "alter_count\t" << stats.alter_count << '\n';
  out << "alter_alter_edges\t" << net.alter_edges.size() << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", stats.alter_alter_density);
  out << "alter_alter_density\t" << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", stats.domain_entropy);
  out << "domain_entropy\t" << buf << '\n';
  out << "distinct_domains\t" << stats.distinct_domains << '\n';
  out << "undated_alters\t" << net.undated_alters << '\n';
  out << '\n';
  out << "year\tpublications\tcitations_received\tef_sum\tfunding_phase\n";
  for (std::size_t k = 0; k < t.years.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.6e", t.ef_sum[k]);
    out << t.years[k] << '\t' << t.publications[k] << '\t'
        << t.citations_received[k] << '\t' << buf << '\t'
        << to_string(t.funding_phase[k]) << '\n';
  }
}

}  // namespace egoflux
