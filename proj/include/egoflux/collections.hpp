#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "egoflux/egonet.hpp"
#include "egoflux/error.hpp"

namespace egoflux {

/// A user-curated set of papers standing for one scholar.
struct Collection {
  std::string id;
  std::string name;
  std::vector<std::string> papers;  // insertion order, no duplicates
  std::optional<FundingWindow> funding;
  std::string created;
  std::string modified;
  std::uint64_t version = 1;

  bool operator==(const Collection&) const = default;
};

inline nlohmann::ordered_json to_json(const Collection& c) {
  nlohmann::ordered_json j;
  j["id"] = c.id;
  j["name"] = c.name;
  j["version"] = c.version;
  j["papers"] = c.papers;
  if (c.funding)
    j["funding"] = {{"start", c.funding->start}, {"end", c.funding->end}};
  else
    j["funding"] = nullptr;
  j["created"] = c.created;
  j["modified"] = c.modified;
  return j;
}

inline Collection collection_from_json(const nlohmann::json& j) {
  try {
    Collection c;
    c.id = j.at("id").get<std::string>();
    c.name = j.at("name").get<std::string>();
    c.version = j.at("version").get<std::uint64_t>();
    c.papers = j.at("papers").get<std::vector<std::string>>();
    if (const auto& f = j.at("funding"); !f.is_null())
      c.funding = FundingWindow{f.at("start").get<int>(), f.at("end").get<int>()};
    c.created = j.at("created").get<std::string>();
    c.modified = j.at("modified").get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed collection record: ") + e.what());
  }
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Durable collection store backed by one JSON-lines file that is rewritten
/// through a temporary file and an atomic rename on every commit.
///
/// Every mutation names the version it was based on; a stale version
/// raises Conflict and leaves the store untouched. Versions increase by one
/// per committed edit.
class CollectionStore {
 public:
  using Clock = std::function<std::string()>;

  explicit CollectionStore(std::filesystem::path file, Clock clock = utc_timestamp)
      : file_(std::move(file)), clock_(std::move(clock)) {
    std::ifstream in(file_);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw DataError(file_.string() + ":" + std::to_string(line_no) + ": " + e.what(),
                        line_no);
      }
      auto c = collection_from_json(j);
      next_id_ = std::max(next_id_, numeric_suffix(c.id) + 1);
      collections_.emplace(c.id, std::move(c));
    }
  }

  CollectionStore(const CollectionStore&) = delete;
  CollectionStore& operator=(const CollectionStore&) = delete;

  Collection create(std::string name, std::vector<std::string> papers = {},
                    std::optional<FundingWindow> funding = {}) {
    if (funding) validate_funding(*funding);
    std::unique_lock lock(mutex_);
    Collection c;
    c.id = format_id(next_id_);
    c.name = std::move(name);
    for (auto& p : papers) append_unique(c.papers, std::move(p));
    c.funding = funding;
    c.created = c.modified = clock_();
    c.version = 1;
    auto next = collections_;
    next.emplace(c.id, c);
    persist(next);
    collections_.swap(next);
    ++next_id_;
    return c;
  }

  std::optional<Collection> get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = collections_.find(id);
    if (it == collections_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<Collection> list() const {
    std::shared_lock lock(mutex_);
    std::vector<Collection> out;
    out.reserve(collections_.size());
    for (const auto& [id, c] : collections_) out.push_back(c);
    return out;
  }

  Collection add_papers(const std::string& id, std::uint64_t expected_version,
                        const std::vector<std::string>& papers) {
    return mutate(id, expected_version, [&](Collection& c) {
      for (const auto& p : papers) append_unique(c.papers, p);
    });
  }

  Collection remove_paper(const std::string& id, std::uint64_t expected_version,
                          const std::string& paper) {
    return mutate(id, expected_version, [&](Collection& c) {
      auto it = std::find(c.papers.begin(), c.papers.end(), paper);
      if (it == c.papers.end())
        throw NotFound("paper '" + paper + "' is not in collection '" + id + "'");
      c.papers.erase(it);
    });
  }

  Collection set_funding(const std::string& id, std::uint64_t expected_version,
                         std::optional<FundingWindow> funding) {
    if (funding) validate_funding(*funding);
    return mutate(id, expected_version, [&](Collection& c) { c.funding = funding; });
  }

  const std::filesystem::path& file() const { return file_; }

 private:
  template <typename Edit>
  Collection mutate(const std::string& id, std::uint64_t expected_version, Edit edit) {
    std::unique_lock lock(mutex_);
    auto it = collections_.find(id);
    if (it == collections_.end())
      throw NotFound("unknown collection '" + id + "'");
    if (it->second.version != expected_version)
      throw Conflict("collection '" + id + "' is at version " +
                     std::to_string(it->second.version) + ", edit was based on " +
                     std::to_string(expected_version));
    Collection updated = it->second;
    edit(updated);
    updated.version += 1;
    updated.modified = clock_();
    auto next = collections_;
    next[id] = updated;
    persist(next);
    collections_.swap(next);
    return updated;
  }

  void persist(const std::map<std::string, Collection>& all) const {
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    auto tmp = file_;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw DataError("cannot write '" + tmp.string() + "'");
      for (const auto& [cid, c] : all) out << to_json(c).dump() << '\n';
      out.flush();
      if (!out) throw DataError("short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, file_);
  }

  static void append_unique(std::vector<std::string>& v, std::string p) {
    if (std::find(v.begin(), v.end(), p) == v.end()) v.push_back(std::move(p));
  }

  static std::string format_id(std::uint64_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "c%06llu", static_cast<unsigned long long>(n));
    return buf;
  }

  static std::uint64_t numeric_suffix(const std::string& id) {
    if (id.size() < 2 || id[0] != 'c') return 0;
    std::uint64_t n = 0;
    for (std::size_t i = 1; i < id.size(); ++i) {
      if (id[i] < '0' || id[i] > '9') return 0;
      n = n * 10 + static_cast<std::uint64_t>(id[i] - '0');
    }
    return n;
  }

  std::filesystem::path file_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Collection> collections_;
  std::uint64_t next_id_ = 1;
};

}  // namespace egoflux
