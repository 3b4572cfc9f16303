#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "egoflux/error.hpp"
#include "egoflux/scene.hpp"

namespace egoflux::scene {

namespace detail {

/// Minimal pretty-printing JSON emitter. Keys appear exactly in call order
/// and floats use a fixed printf format, so output bytes depend only on the
/// values written.
class JsonWriter {
 public:
  std::string take() && {
    out_.push_back('\n');
    return std::move(out_);
  }

  void begin_object() { open('{', false); }
  void end_object() { close('}'); }
  void begin_array(bool inline_items = false) { open('[', inline_items); }
  void end_array() { close(']'); }

  void key(std::string_view k) {
    separator();
    out_ += quote(k);
    out_ += ": ";
    after_key_ = true;
  }

  void string(std::string_view s) { scalar(quote(s)); }
  void integer(long long v) { scalar(std::to_string(v)); }
  void boolean(bool b) { scalar(b ? "true" : "false"); }
  void null() { scalar("null"); }
  void fixed(double v) { scalar(format("%.6f", v)); }
  void sci(double v) { scalar(format("%.6e", v)); }

 private:
  struct Frame {
    bool inline_items;
    bool empty = true;
  };

  static std::string quote(std::string_view s) {
    return nlohmann::json(std::string(s))
        .dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  }
  static std::string format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v == 0.0 ? 0.0 : v);
    return buf;
  }

  void newline() {
    out_.push_back('\n');
    out_.append(2 * stack_.size(), ' ');
  }

  void separator() {
    if (after_key_) {
      after_key_ = false;
      return;
    }
    if (stack_.empty()) return;
    auto& top = stack_.back();
    if (!top.empty) out_ += top.inline_items ? ", " : ",";
    if (!top.inline_items) newline();
    top.empty = false;
  }

  void scalar(const std::string& text) {
    separator();
    out_ += text;
  }

  void open(char c, bool inline_items) {
    separator();
    out_.push_back(c);
    stack_.push_back({inline_items});
  }

  void close(char c) {
    const Frame top = stack_.back();
    stack_.pop_back();
    if (!top.empty && !top.inline_items) newline();
    out_.push_back(c);
  }

  std::string out_;
  std::vector<Frame> stack_;
  bool after_key_ = false;
};

inline const nlohmann::json& require(const nlohmann::json& obj,
                                     std::string_view key) {
  if (!obj.is_object())
    throw DataError("visspec: expected an object holding '" + std::string(key) + "'");
  auto it = obj.find(key);
  if (it == obj.end())
    throw DataError("visspec: missing key '" + std::string(key) + "'");
  return *it;
}

template <typename T>
T as(const nlohmann::json& obj, std::string_view key) {
  const auto& v = require(obj, key);
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw DataError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw DataError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw DataError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw DataError("visspec: key '" + std::string(key) + "' has the wrong type");
  }
}

template <typename T>
std::vector<T> as_vector(const nlohmann::json& obj, std::string_view key) {
  const auto& v = require(obj, key);
  if (!v.is_array())
    throw DataError("visspec: key '" + std::string(key) + "' must be an array");
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& item : v) {
    if constexpr (std::is_same_v<T, double>) {
      if (!item.is_number()) throw DataError("visspec: non-numeric item in '" + std::string(key) + "'");
    } else if constexpr (std::is_integral_v<T>) {
      if (!item.is_number_integer()) throw DataError("visspec: non-integer item in '" + std::string(key) + "'");
    } else {
      if (!item.is_string()) throw DataError("visspec: non-string item in '" + std::string(key) + "'");
    }
    out.push_back(item.get<T>());
  }
  return out;
}

}  // namespace detail

/// Deterministic text form of a VisSpec: stable key order, two-space
/// indentation, scalar series inline, geometry and times as "%.6f",
/// influence scores as "%.6e". Layout is documented in docs/visspec.md.
inline std::string serialize(const VisSpec& spec) {
  detail::JsonWriter w;
  w.begin_object();
  w.key("schema_version"); w.integer(spec.schema_version);
  w.key("scholar"); w.string(spec.scholar);
  w.key("corpus_hash"); w.string(spec.corpus_hash);

  w.key("ego");
  w.begin_object();
  w.key("x"); w.fixed(spec.ego.x);
  w.key("y"); w.fixed(spec.ego.y);
  w.key("radius"); w.fixed(spec.ego.radius);
  w.key("eigenfactor"); w.sci(spec.ego.eigenfactor);
  w.key("papers");
  w.begin_array(true);
  for (const auto& p : spec.ego.papers) w.string(p);
  w.end_array();
  w.end_object();

  w.key("color_table");
  w.begin_array(true);
  for (const auto& c : spec.color_table) w.string(c);
  w.end_array();

  w.key("palette");
  w.begin_array();
  for (const auto& e : spec.palette) {
    w.begin_object();
    w.key("domain"); w.string(e.domain);
    w.key("color"); w.integer(e.color);
    w.end_object();
  }
  w.end_array();

  w.key("nodes");
  w.begin_array();
  for (const auto& n : spec.nodes) {
    w.begin_object();
    w.key("id"); w.string(n.id);
    w.key("year"); w.integer(n.year);
    w.key("x"); w.fixed(n.x);
    w.key("y"); w.fixed(n.y);
    w.key("radius"); w.fixed(n.radius);
    w.key("color"); w.integer(n.color);
    w.key("weight"); w.integer(n.weight);
    w.key("title"); w.string(n.title);
    w.key("venue"); w.string(n.venue);
    w.key("authors");
    w.begin_array(true);
    for (const auto& a : n.authors) w.string(a);
    w.end_array();
    w.key("eigenfactor"); w.sci(n.eigenfactor);
    w.key("url");
    if (n.url) w.string(*n.url); else w.null();
    w.end_object();
  }
  w.end_array();

  w.key("edges");
  w.begin_array();
  for (const auto& e : spec.edges) {
    w.begin_array(true);
    w.integer(e.source);
    w.integer(e.target);
    w.integer(e.weight);
    w.end_array();
  }
  w.end_array();

  w.key("schedule");
  w.begin_array();
  for (const auto& seg : spec.schedule) {
    w.begin_object();
    w.key("year"); w.integer(seg.year);
    w.key("duration"); w.fixed(seg.duration);
    w.key("nodes");
    w.begin_array(true);
    for (const auto& n : seg.nodes) {
      w.begin_array(true);
      w.integer(static_cast<long long>(n.node));
      w.fixed(n.offset);
      w.end_array();
    }
    w.end_array();
    w.key("links");
    w.begin_array(true);
    for (const auto& l : seg.links) {
      w.begin_array(true);
      w.integer(static_cast<long long>(l.edge));
      w.fixed(l.offset);
      w.end_array();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.key("total_duration"); w.fixed(spec.total_duration);

  const auto& tl = spec.timelines;
  w.key("timelines");
  w.begin_object();
  w.key("years");
  w.begin_array(true);
  for (int y : tl.years) w.integer(y);
  w.end_array();
  w.key("publications");
  w.begin_array(true);
  for (int v : tl.publications) w.integer(v);
  w.end_array();
  w.key("citations");
  w.begin_array(true);
  for (int v : tl.citations) w.integer(v);
  w.end_array();
  w.key("ef_sum");
  w.begin_array(true);
  for (double v : tl.ef_sum) w.sci(v);
  w.end_array();
  w.key("funding_phase");
  w.begin_array(true);
  for (const auto& p : tl.funding_phase) w.string(p);
  w.end_array();
  w.key("funding");
  if (tl.funding) {
    w.begin_object();
    w.key("start"); w.integer(tl.funding->start);
    w.key("end"); w.integer(tl.funding->end);
    w.end_object();
  } else {
    w.null();
  }
  w.end_object();

  const auto& s = spec.shape_stats;
  w.key("shape_stats");
  w.begin_object();
  w.key("alter_count"); w.integer(static_cast<long long>(s.alter_count));
  w.key("alter_alter_density"); w.fixed(s.alter_alter_density);
  w.key("domain_entropy"); w.fixed(s.domain_entropy);
  w.key("distinct_domains"); w.integer(static_cast<long long>(s.distinct_domains));
  w.end_object();

  const auto& d = spec.diagnostics;
  w.key("diagnostics");
  w.begin_object();
  w.key("node_cap"); w.integer(d.node_cap);
  w.key("alters"); w.integer(static_cast<long long>(d.alters));
  w.key("selected"); w.integer(static_cast<long long>(d.selected));
  w.key("undated_alters"); w.integer(static_cast<long long>(d.undated_alters));
  w.key("alter_edges"); w.integer(static_cast<long long>(d.alter_edges));
  w.end_object();

  w.end_object();
  return std::move(w).take();
}

/// Inverse of serialize(). Throws DataError on missing keys or wrong types.
inline VisSpec parse_visspec(std::string_view text) {
  using detail::as;
  using detail::as_vector;
  using detail::require;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("visspec: ") + e.what());
  }

  VisSpec spec;
  spec.schema_version = as<int>(j, "schema_version");
  if (spec.schema_version != kSchemaVersion)
    throw DataError("visspec: unsupported schema_version " +
                    std::to_string(spec.schema_version));
  spec.scholar = as<std::string>(j, "scholar");
  spec.corpus_hash = as<std::string>(j, "corpus_hash");

  const auto& ego = require(j, "ego");
  spec.ego.x = as<double>(ego, "x");
  spec.ego.y = as<double>(ego, "y");
  spec.ego.radius = as<double>(ego, "radius");
  spec.ego.eigenfactor = as<double>(ego, "eigenfactor");
  spec.ego.papers = as_vector<std::string>(ego, "papers");

  spec.color_table = as_vector<std::string>(j, "color_table");

  for (const auto& e : require(j, "palette"))
    spec.palette.push_back({as<std::string>(e, "domain"), as<int>(e, "color")});

  for (const auto& n : require(j, "nodes")) {
    SceneNode node;
    node.id = as<std::string>(n, "id");
    node.year = as<int>(n, "year");
    node.x = as<double>(n, "x");
    node.y = as<double>(n, "y");
    node.radius = as<double>(n, "radius");
    node.color = as<int>(n, "color");
    node.weight = as<int>(n, "weight");
    node.title = as<std::string>(n, "title");
    node.venue = as<std::string>(n, "venue");
    node.authors = as_vector<std::string>(n, "authors");
    node.eigenfactor = as<double>(n, "eigenfactor");
    const auto& url = require(n, "url");
    if (!url.is_null()) node.url = as<std::string>(n, "url");
    spec.nodes.push_back(std::move(node));
  }

  auto int_at = [](const nlohmann::json& arr, std::size_t k) {
    if (!arr.is_array() || arr.size() <= k || !arr[k].is_number_integer())
      throw DataError("visspec: malformed tuple");
    return arr[k].get<long long>();
  };
  auto num_at = [](const nlohmann::json& arr, std::size_t k) {
    if (!arr.is_array() || arr.size() <= k || !arr[k].is_number())
      throw DataError("visspec: malformed tuple");
    return arr[k].get<double>();
  };

  for (const auto& e : require(j, "edges"))
    spec.edges.push_back({static_cast<int>(int_at(e, 0)),
                          static_cast<int>(int_at(e, 1)),
                          static_cast<int>(int_at(e, 2))});

  for (const auto& s : require(j, "schedule")) {
    YearSegment seg;
    seg.year = as<int>(s, "year");
    seg.duration = as<double>(s, "duration");
    for (const auto& n : require(s, "nodes"))
      seg.nodes.push_back({static_cast<std::size_t>(int_at(n, 0)), num_at(n, 1)});
    for (const auto& l : require(s, "links"))
      seg.links.push_back({static_cast<std::size_t>(int_at(l, 0)), num_at(l, 1)});
    spec.schedule.push_back(std::move(seg));
  }
  spec.total_duration = as<double>(j, "total_duration");

  const auto& tl = require(j, "timelines");
  spec.timelines.years = as_vector<int>(tl, "years");
  spec.timelines.publications = as_vector<int>(tl, "publications");
  spec.timelines.citations = as_vector<int>(tl, "citations");
  spec.timelines.ef_sum = as_vector<double>(tl, "ef_sum");
  spec.timelines.funding_phase = as_vector<std::string>(tl, "funding_phase");
  if (const auto& f = require(tl, "funding"); !f.is_null())
    spec.timelines.funding = FundingWindow{as<int>(f, "start"), as<int>(f, "end")};

  const auto& st = require(j, "shape_stats");
  spec.shape_stats.alter_count = as<std::size_t>(st, "alter_count");
  spec.shape_stats.alter_alter_density = as<double>(st, "alter_alter_density");
  spec.shape_stats.domain_entropy = as<double>(st, "domain_entropy");
  spec.shape_stats.distinct_domains = as<std::size_t>(st, "distinct_domains");

  const auto& d = require(j, "diagnostics");
  spec.diagnostics.node_cap = as<int>(d, "node_cap");
  spec.diagnostics.alters = as<std::size_t>(d, "alters");
  spec.diagnostics.selected = as<std::size_t>(d, "selected");
  spec.diagnostics.undated_alters = as<std::size_t>(d, "undated_alters");
  spec.diagnostics.alter_edges = as<std::size_t>(d, "alter_edges");
  return spec;
}

/// Structural invariants a viewer relies on. Returns one message per
/// violation; empty means valid.
inline std::vector<std::string> validate(const VisSpec& spec) {
  std::vector<std::string> errors;
  auto fail = [&](std::string msg) { errors.push_back(std::move(msg)); };
  const auto n = spec.nodes.size();

  if (spec.schema_version != kSchemaVersion) fail("unsupported schema_version");
  if (spec.diagnostics.node_cap < 1 ||
      n + 1 > static_cast<std::size_t>(spec.diagnostics.node_cap))
    fail("node count exceeds the cap");
  if (n + 1 > static_cast<std::size_t>(kDefaultNodeCap) &&
      spec.diagnostics.node_cap == kDefaultNodeCap)
    fail("node count exceeds 275 including ego");

  const int color_max = static_cast<int>(spec.color_table.size()) - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = spec.nodes[i];
    if (i > 0) {
      const auto& prev = spec.nodes[i - 1];
      if (prev.year > node.year || (prev.year == node.year && prev.id >= node.id))
        fail("nodes not sorted by (year, id) at " + std::to_string(i));
    }
    if (node.x < 0.0 || node.x > 1.0 || node.y < 0.0 || node.y > 1.0)
      fail("node " + node.id + " outside the unit square");
    if (node.radius < kMinNodeRadius - 1e-9 || node.radius > kMaxNodeRadius + 1e-9)
      fail("node " + node.id + " radius out of range");
    if (node.color < 0 || node.color > color_max)
      fail("node " + node.id + " color index out of range");
    if (node.weight < 1) fail("node " + node.id + " has nonpositive weight");
  }
  for (const auto& p : spec.palette)
    if (p.color < 0 || p.color > color_max) fail("palette color out of range");

  for (const auto& e : spec.edges) {
    auto valid = [&](int v) {
      return v == kEgo || (v >= 0 && static_cast<std::size_t>(v) < n);
    };
    if (e.source < 0 || static_cast<std::size_t>(e.source) >= n ||
        !valid(e.target) || e.source == e.target)
      fail("edge endpoint invalid");
  }

  std::vector<int> seen(n, 0);
  std::vector<double> appear(n, 0.0);
  std::vector<std::size_t> appear_seg(n, 0);
  double total = 0.0;
  for (std::size_t s = 0; s < spec.schedule.size(); ++s) {
    const auto& seg = spec.schedule[s];
    if (s > 0 && seg.year != spec.schedule[s - 1].year + 1)
      fail("schedule years not contiguous");
    const bool ok_duration =
        seg.duration == 0.3 || (seg.duration >= 0.8 && seg.duration <= 4.0);
    if (!ok_duration) fail("segment duration out of range");
    if (seg.nodes.empty() != (seg.duration == 0.3))
      fail("segment duration does not match node count");
    total += seg.duration;
    double last = -1.0;
    for (const auto& a : seg.nodes) {
      if (a.node >= n) {
        fail("schedule references unknown node");
        continue;
      }
      if (a.offset <= last) fail("node offsets not strictly increasing");
      if (a.offset < 0.0 || a.offset > seg.duration) fail("node offset outside segment");
      last = a.offset;
      ++seen[a.node];
      appear[a.node] = a.offset;
      appear_seg[a.node] = s;
      if (spec.nodes[a.node].year != seg.year)
        fail("node " + spec.nodes[a.node].id + " scheduled outside its year");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (seen[i] != 1) fail("node " + spec.nodes[i].id + " not scheduled exactly once");
  for (std::size_t s = 0; s < spec.schedule.size(); ++s) {
    for (const auto& l : spec.schedule[s].links) {
      if (l.edge >= spec.edges.size()) {
        fail("schedule references unknown edge");
        continue;
      }
      const auto src = static_cast<std::size_t>(spec.edges[l.edge].source);
      if (src < n && seen[src] == 1 &&
          (appear_seg[src] > s || (appear_seg[src] == s && l.offset < appear[src])))
        fail("link fires before its source appears");
    }
  }
  if (std::abs(total - spec.total_duration) > 1e-6 * (1.0 + spec.schedule.size()))
    fail("total_duration differs from the segment sum");

  const auto& tl = spec.timelines;
  const auto len = tl.years.size();
  if (tl.publications.size() != len || tl.citations.size() != len ||
      tl.ef_sum.size() != len || tl.funding_phase.size() != len)
    fail("timeline series lengths differ");
  return errors;
}

}  // namespace egoflux::scene
