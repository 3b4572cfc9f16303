#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egoflux/corpus.hpp"
#include "egoflux/egonet.hpp"
#include "egoflux/error.hpp"
#include "egoflux/influence.hpp"

namespace egoflux::scene {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kDefaultNodeCap = 275;  // includes the ego node

// Unit-viewport geometry.
inline constexpr double kCenter = 0.5;
inline constexpr double kOuterRadius = 0.45;
inline constexpr double kMinNodeRadius = 0.006;
inline constexpr double kMaxNodeRadius = 0.035;
inline constexpr double kEgoRadius = 0.04;
// First spiral node sits one full turn out, so its distance from the center
// equals the arc spacing.
inline constexpr double kSpiralStartAngle = 2.0 * std::numbers::pi;

inline constexpr int kNamedColorSlots = 10;
inline constexpr int kFallbackColor = 10;
inline constexpr std::array<std::string_view, 11> kColorTable = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#bcbd22", "#17becf", "#aec7e8", "#b0b0b0"};
inline constexpr std::string_view kFallbackLabel = "other";

/// Endpoint value standing for the merged ego node.
inline constexpr int kEgo = -1;

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

// ---------------------------------------------------------------------------
// Node selection
// ---------------------------------------------------------------------------

/// Alters shown under a total node cap (ego included). Only dated alters are
/// eligible since each node must appear in its publication year. When too
/// many remain, the top cap - 1 by (has domain, eigenfactor desc, year asc,
/// id asc) are kept. Returns positions into `net.alters` in chronological
/// order.
inline std::vector<std::size_t> select_nodes(const EgoNetwork& net,
                                             int cap = kDefaultNodeCap) {
  if (cap < 1) throw InvalidArgument("node cap must be >= 1");
  std::vector<std::size_t> eligible;
  for (std::size_t k = 0; k < net.alters.size(); ++k)
    if (net.alters[k].year) eligible.push_back(k);

  const auto budget = static_cast<std::size_t>(cap - 1);
  if (eligible.size() > budget) {
    auto rank_less = [&](std::size_t a, std::size_t b) {
      const auto& x = net.alters[a];
      const auto& y = net.alters[b];
      if (x.has_domain() != y.has_domain()) return x.has_domain();
      if (x.eigenfactor != y.eigenfactor) return x.eigenfactor > y.eigenfactor;
      if (*x.year != *y.year) return *x.year < *y.year;
      return x.id < y.id;
    };
    std::partial_sort(eligible.begin(),
                      eligible.begin() + static_cast<std::ptrdiff_t>(budget),
                      eligible.end(), rank_less);
    eligible.resize(budget);
  }
  // Alters are already chronological, so position order is layout order.
  std::sort(eligible.begin(), eligible.end());
  return eligible;
}

// ---------------------------------------------------------------------------
// Spiral layout
// ---------------------------------------------------------------------------

struct SpiralLayout {
  std::vector<Point> positions;
  std::vector<double> radii;   // distance from the center
  std::vector<double> angles;
  double pitch = 0.0;          // b in r = b * theta
  double arc_spacing = 0.0;    // arc length between consecutive nodes
};

/// Archimedean spiral r = b * theta around the viewport center.
///
/// With the turn gap 2*pi*b equal to the arc spacing s and the arc length
/// approximated by b * theta^2 / 2, equal spacing gives
/// theta_k = sqrt(theta_0^2 + 4*pi*k), independent of b. b then follows
/// from putting the last node on the outer radius 0.45 - margin.
inline SpiralLayout layout_spiral(std::size_t count, double margin = 0.0) {
  if (!(margin >= 0.0 && margin < kOuterRadius))
    throw InvalidArgument("spiral margin must lie in [0, 0.45)");
  SpiralLayout out;
  if (count == 0) return out;
  const double outer = kOuterRadius - margin;
  auto angle = [](std::size_t k) {
    return std::sqrt(kSpiralStartAngle * kSpiralStartAngle +
                     4.0 * std::numbers::pi * static_cast<double>(k));
  };

  if (count == 1) {
    out.pitch = outer / (3.0 * kSpiralStartAngle);
    out.arc_spacing = 2.0 * std::numbers::pi * out.pitch;
  } else {
    out.pitch = outer / angle(count - 1);
    out.arc_spacing = 2.0 * std::numbers::pi * out.pitch;
  }
  out.positions.reserve(count);
  out.radii.reserve(count);
  out.angles.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double theta = angle(k);
    const double r = out.pitch * theta;
    out.angles.push_back(theta);
    out.radii.push_back(r);
    out.positions.push_back(
        {kCenter + r * std::cos(theta), kCenter + r * std::sin(theta)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Palette
// ---------------------------------------------------------------------------

struct PaletteEntry {
  std::string domain;
  int color = 0;
  bool operator==(const PaletteEntry&) const = default;
};

struct Palette {
  std::vector<PaletteEntry> entries;
  std::vector<int> node_colors;  // aligned with the selected nodes
};

/// Slot 0 (blue) goes to the most common domain among the ego papers; the
/// remaining slots follow the frequency of domains among the displayed
/// nodes. Ties break by domain name. Domains past the named slots and
/// "unassigned" share the fallback color.
inline Palette assign_palette(const Corpus& corpus, const EgoNetwork& net,
                              std::span<const std::size_t> selected) {
  auto by_frequency = [](const std::map<std::string, int>& counts) {
    std::vector<std::pair<std::string, int>> v(counts.begin(), counts.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      return a.second > b.second;
    });
    return v;
  };

  std::vector<std::string> named;
  std::map<std::string, int> ego_counts;
  for (auto e : net.ego)
    if (corpus.paper(e).has_domain()) ++ego_counts[corpus.paper(e).domain];
  if (!ego_counts.empty()) named.push_back(by_frequency(ego_counts).front().first);

  std::map<std::string, int> node_counts;
  for (auto k : selected)
    if (net.alters[k].has_domain()) ++node_counts[net.alters[k].domain];
  for (const auto& [domain, count] : by_frequency(node_counts)) {
    if (named.size() >= static_cast<std::size_t>(kNamedColorSlots)) break;
    if (std::find(named.begin(), named.end(), domain) == named.end())
      named.push_back(domain);
  }

  Palette p;
  for (std::size_t i = 0; i < named.size(); ++i)
    p.entries.push_back({named[i], static_cast<int>(i)});
  bool fallback_used = false;
  p.node_colors.reserve(selected.size());
  for (auto k : selected) {
    const auto& d = net.alters[k].domain;
    auto it = std::find(named.begin(), named.end(), d);
    if (net.alters[k].has_domain() && it != named.end()) {
      p.node_colors.push_back(static_cast<int>(it - named.begin()));
    } else {
      p.node_colors.push_back(kFallbackColor);
      fallback_used = true;
    }
  }
  if (fallback_used)
    p.entries.push_back({std::string(kFallbackLabel), kFallbackColor});
  return p;
}

// ---------------------------------------------------------------------------
// Node size
// ---------------------------------------------------------------------------

/// sqrt scaling against the largest score in the scene, so area tracks
/// the score.
inline std::vector<double> size_nodes(std::span<const double> eigenfactors) {
  double max_ef = 0.0;
  for (double v : eigenfactors) max_ef = std::max(max_ef, v);
  std::vector<double> radii;
  radii.reserve(eigenfactors.size());
  for (double v : eigenfactors) {
    const double t = max_ef > 0.0 ? std::sqrt(std::max(0.0, v) / max_ef) : 0.0;
    radii.push_back(kMinNodeRadius + (kMaxNodeRadius - kMinNodeRadius) * t);
  }
  return radii;
}

// ---------------------------------------------------------------------------
// Animation schedule
// ---------------------------------------------------------------------------

struct SceneEdge {
  int source = 0;  // node index
  int target = 0;  // node index or kEgo
  int weight = 1;
  bool operator==(const SceneEdge&) const = default;
};

struct NodeAppearance {
  std::size_t node = 0;
  double offset = 0.0;
  bool operator==(const NodeAppearance&) const = default;
};

struct LinkFire {
  std::size_t edge = 0;
  double offset = 0.0;
  bool operator==(const LinkFire&) const = default;
};

struct YearSegment {
  int year = 0;
  double duration = 0.0;
  std::vector<NodeAppearance> nodes;
  std::vector<LinkFire> links;
  bool operator==(const YearSegment&) const = default;
};

/// Seconds spent animating a year with `count` new nodes.
inline double segment_duration(std::size_t count) {
  if (count == 0) return 0.3;
  if (count < 5) return 0.8;
  if (count < 15) return 1.6;
  if (count < 30) return 2.6;
  return 4.0;
}

/// One segment per year in [first_year, last_year]. A year's nodes are
/// spaced evenly at duration * k / (n + 1). An edge fires when its later
/// endpoint appears; the ego is visible from the start.
inline std::vector<YearSegment> build_schedule(std::span<const int> node_years,
                                               std::span<const SceneEdge> edges,
                                               int first_year, int last_year) {
  if (last_year < first_year)
    throw InvalidArgument("schedule year range is empty");
  for (std::size_t k = 0; k < node_years.size(); ++k) {
    if (node_years[k] < first_year || node_years[k] > last_year)
      throw InvalidArgument("node year outside the schedule range");
    if (k > 0 && node_years[k] < node_years[k - 1])
      throw InvalidArgument("nodes are not in chronological order");
  }

  std::vector<YearSegment> segments;
  segments.reserve(static_cast<std::size_t>(last_year - first_year + 1));
  std::vector<std::size_t> segment_of(node_years.size());
  std::vector<double> offset_of(node_years.size());

  std::size_t k = 0;
  for (int y = first_year; y <= last_year; ++y) {
    YearSegment seg;
    seg.year = y;
    const std::size_t begin = k;
    while (k < node_years.size() && node_years[k] == y) ++k;
    const std::size_t n = k - begin;
    seg.duration = segment_duration(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double offset =
          seg.duration * static_cast<double>(j + 1) / static_cast<double>(n + 1);
      seg.nodes.push_back({begin + j, offset});
      segment_of[begin + j] = segments.size();
      offset_of[begin + j] = offset;
    }
    segments.push_back(std::move(seg));
  }

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& edge = edges[e];
    std::size_t trigger = static_cast<std::size_t>(edge.source);
    if (edge.target != kEgo)
      trigger = std::max(trigger, static_cast<std::size_t>(edge.target));
    segments[segment_of[trigger]].links.push_back({e, offset_of[trigger]});
  }
  for (auto& seg : segments)
    std::stable_sort(seg.links.begin(), seg.links.end(),
                     [](const LinkFire& a, const LinkFire& b) {
                       return a.offset < b.offset;
                     });
  return segments;
}

// ---------------------------------------------------------------------------
// VisSpec
// ---------------------------------------------------------------------------

struct SceneNode {
  std::string id;
  int year = 0;
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
  int color = 0;
  int weight = 1;  // alter -> ego multiplicity
  std::string title;
  std::string venue;
  std::vector<std::string> authors;
  double eigenfactor = 0.0;
  std::optional<std::string> url;
  bool operator==(const SceneNode&) const = default;
};

struct EgoNode {
  double x = kCenter;
  double y = kCenter;
  double radius = kEgoRadius;
  std::vector<std::string> papers;
  double eigenfactor = 0.0;  // sum over ego papers
  bool operator==(const EgoNode&) const = default;
};

struct TimelineSeries {
  std::vector<int> years;
  std::vector<int> publications;
  std::vector<int> citations;
  std::vector<double> ef_sum;
  std::vector<std::string> funding_phase;
  std::optional<FundingWindow> funding;
  bool operator==(const TimelineSeries&) const = default;
};

struct Diagnostics {
  int node_cap = kDefaultNodeCap;
  std::size_t alters = 0;
  std::size_t selected = 0;
  std::size_t undated_alters = 0;
  std::size_t alter_edges = 0;
  bool operator==(const Diagnostics&) const = default;
};

struct VisSpec {
  int schema_version = kSchemaVersion;
  std::string scholar;
  std::string corpus_hash;
  EgoNode ego;
  std::vector<std::string> color_table;
  std::vector<PaletteEntry> palette;
  std::vector<SceneNode> nodes;
  std::vector<SceneEdge> edges;
  std::vector<YearSegment> schedule;
  double total_duration = 0.0;
  TimelineSeries timelines;
  ShapeStats shape_stats;
  Diagnostics diagnostics;
  bool operator==(const VisSpec&) const = default;
};

struct CompileOptions {
  std::string scholar;
  int node_cap = kDefaultNodeCap;
  double margin = 0.0;
  /// Link-out URL with `{id}` replaced by the paper id; none when empty.
  std::string linkout_template;
};

/// Rounds to the value that survives a "%.6f" text round trip.
inline double quantize_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  const double q = std::strtod(buf, nullptr);
  return q == 0.0 ? 0.0 : q;  // no negative zero in output
}

/// Rounds to the value that survives a "%.6e" text round trip (keeps tiny
/// influence scores distinguishable).
inline double quantize_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  const double q = std::strtod(buf, nullptr);
  return q == 0.0 ? 0.0 : q;
}

inline std::optional<std::string> linkout_url(const std::string& tmpl,
                                              std::string_view id) {
  if (tmpl.empty()) return std::nullopt;
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto hit = tmpl.find("{id}", pos);
    if (hit == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    out.append(tmpl, pos, hit - pos);
    out.append(id);
    pos = hit + 4;
  }
  return out;
}

/// select -> layout -> palette -> size -> schedule, plus timelines and
/// shape statistics. Every float is pre-rounded to its serialized
/// precision so a parsed document compares equal to the compiled one.
inline VisSpec compile_visspec(const Corpus& corpus,
                               const InfluenceScores& scores,
                               const EgoNetwork& net, const Timelines& timelines,
                               const CompileOptions& options = {}) {
  VisSpec spec;
  spec.scholar = options.scholar;
  spec.corpus_hash = text::hex64(corpus.content_hash());
  for (auto c : kColorTable) spec.color_table.emplace_back(c);

  spec.ego.papers = net.ego_ids;
  double ego_ef = 0.0;
  for (auto e : net.ego) ego_ef += scores[e];
  spec.ego.eigenfactor = quantize_sci(ego_ef);

  const auto selected = select_nodes(net, options.node_cap);
  const auto layout = layout_spiral(selected.size(), options.margin);
  const auto palette = assign_palette(corpus, net, selected);
  std::vector<double> efs;
  efs.reserve(selected.size());
  for (auto k : selected) efs.push_back(net.alters[k].eigenfactor);
  const auto radii = size_nodes(efs);

  spec.palette = palette.entries;
  std::vector<int> node_of_alter(net.alters.size(), -1);
  std::vector<int> years;
  spec.nodes.reserve(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const auto& a = net.alters[selected[i]];
    node_of_alter[selected[i]] = static_cast<int>(i);
    SceneNode n;
    n.id = a.id;
    n.year = *a.year;
    n.x = quantize_fixed(layout.positions[i].x);
    n.y = quantize_fixed(layout.positions[i].y);
    n.radius = quantize_fixed(radii[i]);
    n.color = palette.node_colors[i];
    n.weight = a.multiplicity;
    n.title = a.title;
    n.venue = a.venue;
    n.authors = a.authors;
    n.eigenfactor = quantize_sci(a.eigenfactor);
    n.url = linkout_url(options.linkout_template, a.id);
    years.push_back(n.year);
    spec.nodes.push_back(std::move(n));
  }

  // Edges grouped by citing node: its ego link first, then links to other
  // displayed alters in target order.
  std::vector<std::vector<int>> alter_targets(spec.nodes.size());
  for (const auto& e : net.alter_edges) {
    const int s = node_of_alter[e.citing];
    const int t = node_of_alter[e.cited];
    if (s >= 0 && t >= 0) alter_targets[static_cast<std::size_t>(s)].push_back(t);
  }
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    spec.edges.push_back({static_cast<int>(i), kEgo, spec.nodes[i].weight});
    auto& targets = alter_targets[i];
    std::sort(targets.begin(), targets.end());
    for (int t : targets) spec.edges.push_back({static_cast<int>(i), t, 1});
  }

  const auto [axis_start, axis_end] = year_axis(net);
  spec.schedule = build_schedule(years, spec.edges, axis_start, axis_end);
  double total = 0.0;
  for (auto& seg : spec.schedule) {
    seg.duration = quantize_fixed(seg.duration);
    for (auto& n : seg.nodes) n.offset = quantize_fixed(n.offset);
    for (auto& l : seg.links) l.offset = quantize_fixed(l.offset);
    total += seg.duration;
  }
  spec.total_duration = quantize_fixed(total);

  auto& tl = spec.timelines;
  tl.years = timelines.years;
  tl.publications = timelines.publications;
  tl.citations = timelines.citations_received;
  for (double v : timelines.ef_sum) tl.ef_sum.push_back(quantize_sci(v));
  for (auto p : timelines.funding_phase) tl.funding_phase.emplace_back(to_string(p));
  tl.funding = timelines.funding;

  auto stats = compute_shape_stats(net);
  stats.alter_alter_density = quantize_fixed(stats.alter_alter_density);
  stats.domain_entropy = quantize_fixed(stats.domain_entropy);
  spec.shape_stats = stats;

  spec.diagnostics.node_cap = options.node_cap;
  spec.diagnostics.alters = net.alters.size();
  spec.diagnostics.selected = spec.nodes.size();
  spec.diagnostics.undated_alters = net.undated_alters;
  spec.diagnostics.alter_edges = net.alter_edges.size();
  return spec;
}

}  // namespace egoflux::scene
