#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "egoflux/error.hpp"
#include "egoflux/text.hpp"

namespace egoflux {

/// Dense position of a paper inside a Corpus (papers are stored sorted by
/// id, so the index is stable for a given corpus content).
using PaperIndex = std::uint32_t;

inline constexpr std::string_view kUnassignedDomain = "unassigned";
inline constexpr int kMinYear = 1500;
inline constexpr int kMaxYear = 2100;

struct Author {
  std::string id;
  std::string name;

  bool operator==(const Author&) const = default;
};

struct Paper {
  std::string id;
  std::string title;
  std::optional<int> year;
  std::string venue;
  std::string domain{kUnassignedDomain};
  std::vector<Author> authors;

  bool has_domain() const { return domain != kUnassignedDomain; }
  bool operator==(const Paper&) const = default;
};

enum class IngestMode { strict, lenient };

struct IngestReport {
  std::size_t papers = 0;
  std::size_t edges = 0;
  std::size_t dropped_dangling = 0;
  std::size_t dropped_self = 0;
  std::size_t duplicate_edges = 0;
  std::size_t missing_year = 0;
  std::size_t missing_domain = 0;

  bool operator==(const IngestReport&) const = default;
};

struct AuthorMatch {
  std::string author_id;
  std::string name;
  std::size_t paper_count = 0;

  bool operator==(const AuthorMatch&) const = default;
};

/// Immutable, fully indexed paper and citation store. Citations are held
/// in two CSR arrays (references per citing paper, citers per cited paper)
/// that are transposes of each other.
class Corpus {
 public:
  class Builder;

  std::size_t size() const { return papers_.size(); }
  bool empty() const { return papers_.empty(); }
  std::size_t edge_count() const { return out_targets_.size(); }

  const Paper& paper(PaperIndex i) const { return papers_[i]; }
  std::span<const Paper> papers() const { return papers_; }

  std::optional<PaperIndex> find(std::string_view id) const {
    auto it = std::lower_bound(
        papers_.begin(), papers_.end(), id,
        [](const Paper& p, std::string_view key) { return p.id < key; });
    if (it == papers_.end() || it->id != id) return std::nullopt;
    return static_cast<PaperIndex>(it - papers_.begin());
  }

  PaperIndex index_of(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw NotFound("unknown paper id '" + std::string(id) + "'");
  }

  /// Papers cited by `i`, ascending by index.
  std::span<const PaperIndex> out_refs(PaperIndex i) const {
    return {out_targets_.data() + out_offsets_[i],
            out_targets_.data() + out_offsets_[i + 1]};
  }

  /// Papers citing `i`, ascending by index.
  std::span<const PaperIndex> in_cites(PaperIndex i) const {
    return {in_sources_.data() + in_offsets_[i],
            in_sources_.data() + in_offsets_[i + 1]};
  }

  std::size_t out_degree(PaperIndex i) const {
    return out_offsets_[i + 1] - out_offsets_[i];
  }
  std::size_t in_degree(PaperIndex i) const {
    return in_offsets_[i + 1] - in_offsets_[i];
  }

  /// Latest publication year present anywhere in the corpus.
  std::optional<int> max_year() const { return max_year_; }
  std::optional<int> min_year() const { return min_year_; }

  const IngestReport& report() const { return report_; }

  /// Content hash over the canonical (id-sorted) papers and edges.
  std::uint64_t content_hash() const { return hash_; }

  /// Case-insensitive substring search over normalized author names.
  /// Sorted by paper count descending, then author id.
  std::vector<AuthorMatch> find_authors(std::string_view query) const {
    const auto trimmed = text::trim(query);
    if (trimmed.empty()) throw InvalidArgument("author query is empty");
    const auto needle = text::normalize_name(trimmed);
    if (needle.empty())
      throw InvalidArgument("author query has no searchable characters");

    std::vector<std::string_view> ids;
    for (const auto& [normalized, author_ids] : name_index_) {
      if (normalized.find(needle) == std::string::npos) continue;
      for (const auto& a : author_ids) ids.push_back(a);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    std::vector<AuthorMatch> out;
    out.reserve(ids.size());
    for (auto id : ids) {
      const auto& entry = authors_.find(std::string(id))->second;
      out.push_back({std::string(id), entry.display_name, entry.papers.size()});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      if (a.paper_count != b.paper_count) return a.paper_count > b.paper_count;
      return a.author_id < b.author_id;
    });
    return out;
  }

  /// Paper ids of an author, by year ascending (undated last) then id.
  std::vector<std::string> papers_of(std::string_view author_id) const {
    auto it = authors_.find(std::string(author_id));
    if (it == authors_.end())
      throw NotFound("unknown author id '" + std::string(author_id) + "'");
    std::vector<std::string> out;
    out.reserve(it->second.papers.size());
    for (auto i : it->second.papers) out.push_back(papers_[i].id);
    return out;
  }

  std::optional<std::string> author_name(std::string_view author_id) const {
    auto it = authors_.find(std::string(author_id));
    if (it == authors_.end()) return std::nullopt;
    return it->second.display_name;
  }

  bool operator==(const Corpus&) const = default;

 private:
  struct AuthorEntry {
    std::string display_name;
    std::vector<PaperIndex> papers;
    bool operator==(const AuthorEntry&) const = default;
  };

  std::vector<Paper> papers_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<PaperIndex> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<PaperIndex> in_sources_;
  std::map<std::string, AuthorEntry> authors_;
  std::map<std::string, std::vector<std::string>> name_index_;
  std::optional<int> min_year_;
  std::optional<int> max_year_;
  IngestReport report_;
  std::uint64_t hash_ = 0;
};

/// Accumulates papers, then citations, and produces an indexed Corpus.
/// All papers must be added before the first citation so that citation
/// endpoints resolve (or are rejected) at the line they appear on.
class Corpus::Builder {
 public:
  explicit Builder(IngestMode mode = IngestMode::strict) : mode_(mode) {}

  void add_paper(Paper paper, std::size_t line = 0) {
    if (paper.id.empty()) throw DataError("paper id is empty", line);
    if (paper.year && (*paper.year < kMinYear || *paper.year > kMaxYear))
      throw DataError("paper '" + paper.id + "' has year " +
                          std::to_string(*paper.year) + " outside [" +
                          std::to_string(kMinYear) + ", " +
                          std::to_string(kMaxYear) + "]",
                      line);
    if (paper.domain.empty()) paper.domain = std::string(kUnassignedDomain);
    auto [it, inserted] = ids_.emplace(paper.id, papers_.size());
    if (!inserted)
      throw DataError("duplicate paper id '" + paper.id + "'", line);
    papers_.push_back(std::move(paper));
  }

  void add_citation(std::string_view citing, std::string_view cited,
                    std::size_t line = 0) {
    const auto from = ids_.find(std::string(citing));
    const auto to = ids_.find(std::string(cited));
    if (from == ids_.end() || to == ids_.end()) {
      if (mode_ == IngestMode::strict) {
        const auto missing = from == ids_.end() ? citing : cited;
        throw DataError("citation references unknown paper '" +
                            std::string(missing) + "'",
                        line);
      }
      ++report_.dropped_dangling;
      return;
    }
    if (from->second == to->second) {
      ++report_.dropped_self;
      return;
    }
    edges_.emplace_back(static_cast<PaperIndex>(from->second),
                        static_cast<PaperIndex>(to->second));
  }

  Corpus build() && {
    Corpus c;
    const std::size_t n = papers_.size();

    std::vector<PaperIndex> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<PaperIndex>(i);
    std::sort(order.begin(), order.end(), [&](PaperIndex a, PaperIndex b) {
      return papers_[a].id < papers_[b].id;
    });
    std::vector<PaperIndex> remap(n);
    for (std::size_t i = 0; i < n; ++i)
      remap[order[i]] = static_cast<PaperIndex>(i);
    c.papers_.reserve(n);
    for (auto i : order) c.papers_.push_back(std::move(papers_[i]));
    papers_.clear();
    ids_.clear();

    for (auto& [from, to] : edges_) {
      from = remap[from];
      to = remap[to];
    }
    std::sort(edges_.begin(), edges_.end());
    const auto before = edges_.size();
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    report_.duplicate_edges = before - edges_.size();

    // Edges are sorted by (citing, cited): the forward CSR falls out
    // directly, the reverse one by counting sort.
    c.out_offsets_.assign(n + 1, 0);
    c.in_offsets_.assign(n + 1, 0);
    for (auto [from, to] : edges_) {
      ++c.out_offsets_[from + 1];
      ++c.in_offsets_[to + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      c.out_offsets_[i + 1] += c.out_offsets_[i];
      c.in_offsets_[i + 1] += c.in_offsets_[i];
    }
    c.out_targets_.resize(edges_.size());
    c.in_sources_.resize(edges_.size());
    std::vector<std::size_t> cursor(c.in_offsets_.begin(),
                                    c.in_offsets_.end() - 1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto [from, to] = edges_[e];
      c.out_targets_[e] = to;
      c.in_sources_[cursor[to]++] = from;
    }

    for (PaperIndex i = 0; i < n; ++i) {
      const Paper& p = c.papers_[i];
      if (p.year) {
        c.min_year_ = c.min_year_ ? std::min(*c.min_year_, *p.year) : *p.year;
        c.max_year_ = c.max_year_ ? std::max(*c.max_year_, *p.year) : *p.year;
      } else {
        ++report_.missing_year;
      }
      if (!p.has_domain()) ++report_.missing_domain;
      for (const auto& a : p.authors) {
        auto [it, inserted] = c.authors_.try_emplace(a.id);
        if (inserted) it->second.display_name = a.name;
        if (it->second.papers.empty() || it->second.papers.back() != i)
          it->second.papers.push_back(i);
        auto& ids = c.name_index_[text::normalize_name(a.name)];
        if (std::find(ids.begin(), ids.end(), a.id) == ids.end())
          ids.push_back(a.id);
      }
    }
    for (auto& [id, entry] : c.authors_) {
      std::sort(entry.papers.begin(), entry.papers.end(),
                [&](PaperIndex a, PaperIndex b) {
                  const auto& pa = c.papers_[a];
                  const auto& pb = c.papers_[b];
                  const int ya = pa.year.value_or(kMaxYear + 1);
                  const int yb = pb.year.value_or(kMaxYear + 1);
                  if (ya != yb) return ya < yb;
                  return a < b;
                });
    }
    for (auto& [name, ids] : c.name_index_) std::sort(ids.begin(), ids.end());

    text::Fnv1a h;
    auto put = [&h](std::string_view s) {
      h.update_u64(s.size());
      h.update(s);
    };
    h.update_u64(n);
    for (const auto& p : c.papers_) {
      put(p.id);
      put(p.title);
      h.update_u64(p.year ? static_cast<std::uint64_t>(*p.year) : ~0ULL);
      put(p.venue);
      put(p.domain);
      h.update_u64(p.authors.size());
      for (const auto& a : p.authors) {
        put(a.id);
        put(a.name);
      }
    }
    h.update_u64(edges_.size());
    for (auto [from, to] : edges_)
      h.update_u64((std::uint64_t(from) << 32) | to);
    c.hash_ = h.digest();

    report_.papers = n;
    report_.edges = edges_.size();
    c.report_ = report_;
    edges_.clear();
    return c;
  }

 private:
  IngestMode mode_;
  std::vector<Paper> papers_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::pair<PaperIndex, PaperIndex>> edges_;
  IngestReport report_;
};

namespace detail {

inline std::string json_string_field(const nlohmann::json& rec,
                                     const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return {};
  if (!it->is_string())
    throw DataError(std::string("field '") + key + "' must be a string", line);
  return it->get<std::string>();
}

}  // namespace detail

/// Parses one line of the papers file.
inline Paper parse_paper_record(std::string_view line, std::size_t line_no) {
  nlohmann::json rec;
  try {
    rec = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed paper record: ") + e.what(),
                    line_no);
  }
  if (!rec.is_object()) throw DataError("paper record is not an object", line_no);

  Paper p;
  auto id = rec.find("id");
  if (id == rec.end() || !id->is_string() || id->get_ref<const std::string&>().empty())
    throw DataError("paper record needs a nonempty string 'id'", line_no);
  p.id = id->get<std::string>();
  p.title = detail::json_string_field(rec, "title", line_no);
  p.venue = detail::json_string_field(rec, "venue", line_no);
  p.domain = detail::json_string_field(rec, "domain", line_no);
  if (p.domain.empty()) p.domain = std::string(kUnassignedDomain);

  if (auto y = rec.find("year"); y != rec.end() && !y->is_null()) {
    if (!y->is_number_integer())
      throw DataError("field 'year' must be an integer or null", line_no);
    p.year = y->get<int>();
  }
  if (auto a = rec.find("authors"); a != rec.end() && !a->is_null()) {
    if (!a->is_array())
      throw DataError("field 'authors' must be an array", line_no);
    for (const auto& entry : *a) {
      if (!entry.is_object())
        throw DataError("author entry must be an object", line_no);
      Author author{detail::json_string_field(entry, "id", line_no),
                    detail::json_string_field(entry, "name", line_no)};
      if (author.id.empty())
        throw DataError("author entry needs a nonempty 'id'", line_no);
      p.authors.push_back(std::move(author));
    }
  }
  return p;
}

inline void load_papers(std::istream& in, Corpus::Builder& builder,
                        const std::string& source = "papers") {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      builder.add_paper(parse_paper_record(line, line_no), line_no);
    } catch (const DataError& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what(),
                      line_no);
    }
  }
}

inline void load_citations(std::istream& in, Corpus::Builder& builder,
                           const std::string& source = "citations") {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.empty() || view.front() == '#') continue;
    const auto tab = view.find('\t');
    const auto citing = tab == std::string_view::npos ? std::string_view{}
                                                       : view.substr(0, tab);
    const auto cited = tab == std::string_view::npos ? std::string_view{}
                                                      : view.substr(tab + 1);
    if (citing.empty() || cited.empty() ||
        cited.find('\t') != std::string_view::npos)
      throw DataError(source + ":" + std::to_string(line_no) +
                          ": expected 'citing<TAB>cited'",
                      line_no);
    try {
      builder.add_citation(citing, cited, line_no);
    } catch (const DataError& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what(),
                      line_no);
    }
  }
}

/// Reads a papers file (one JSON object per line) and a tab-separated
/// citations file into a Corpus.
inline Corpus ingest(const std::string& papers_path,
                     const std::string& citations_path, IngestMode mode) {
  std::ifstream papers(papers_path, std::ios::binary);
  if (!papers) throw DataError("cannot open papers file '" + papers_path + "'");
  std::ifstream citations(citations_path, std::ios::binary);
  if (!citations)
    throw DataError("cannot open citations file '" + citations_path + "'");

  Corpus::Builder builder(mode);
  load_papers(papers, builder, papers_path);
  load_citations(citations, builder, citations_path);
  return std::move(builder).build();
}

inline IngestMode parse_ingest_mode(std::string_view s) {
  if (s == "strict") return IngestMode::strict;
  if (s == "lenient") return IngestMode::lenient;
  throw InvalidArgument("ingest mode must be 'strict' or 'lenient'");
}

/// One JSON line per paper, the inverse of parse_paper_record.
inline std::string paper_record(const Paper& p) {
  nlohmann::ordered_json rec;
  rec["id"] = p.id;
  rec["title"] = p.title;
  rec["year"] = p.year ? nlohmann::ordered_json(*p.year) : nullptr;
  rec["venue"] = p.venue;
  rec["domain"] = p.has_domain() ? nlohmann::ordered_json(p.domain) : nullptr;
  auto authors = nlohmann::ordered_json::array();
  for (const auto& a : p.authors)
    authors.push_back({{"id", a.id}, {"name", a.name}});
  rec["authors"] = std::move(authors);
  return rec.dump();
}

}  // namespace egoflux
