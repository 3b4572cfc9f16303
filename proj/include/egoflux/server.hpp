#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "egoflux/collections.hpp"
#include "egoflux/corpus.hpp"
#include "egoflux/error.hpp"
#include "egoflux/influence.hpp"
#include "egoflux/pipeline.hpp"
#include "egoflux/scene.hpp"
#include "egoflux/visspec_json.hpp"

namespace egoflux {

struct ServerOptions {
  std::string linkout_template;
  int node_cap = scene::kDefaultNodeCap;
};

inline int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return 400;
    case ErrorKind::not_found: return 404;
    case ErrorKind::conflict: return 409;
    case ErrorKind::unprocessable: return 422;
    case ErrorKind::data: return 400;
    case ErrorKind::non_convergence: break;
  }
  return 500;
}

inline std::string_view error_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::conflict: return "conflict";
    case ErrorKind::unprocessable: return "unprocessable";
    case ErrorKind::data: return "malformed";
    case ErrorKind::non_convergence: return "non_convergence";
  }
  return "internal";
}

/// HTTP API over an immutable corpus and score vector plus a mutable
/// collection store. Compiled VisSpecs are cached per (collection id,
/// version); edits bump the version, so stale entries are never served.
class ApiServer {
 public:
  ApiServer(const Corpus& corpus, const InfluenceScores& scores,
            CollectionStore& store, ServerOptions options = {})
      : corpus_(corpus), scores_(scores), store_(store), options_(std::move(options)) {
    routes();
  }

  httplib::Server& http() { return http_; }

  bool listen(const std::string& host, int port) { return http_.listen(host, port); }

  /// Binds an ephemeral port, returning it (or -1).
  int bind_ephemeral(const std::string& host = "127.0.0.1") {
    return http_.bind_to_any_port(host);
  }
  bool listen_after_bind() { return http_.listen_after_bind(); }
  void stop() { http_.stop(); }
  void wait_until_ready() const { http_.wait_until_ready(); }

  /// Compiled VisSpec text for a collection (cached).
  std::shared_ptr<const std::string> visspec_for(const std::string& id) {
    auto c = store_.get(id);
    if (!c) throw NotFound("unknown collection '" + id + "'");
    const auto key = std::make_pair(c->id, c->version);
    {
      std::lock_guard lock(cache_mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    if (c->papers.empty())
      throw Unprocessable("collection '" + id + "' has no papers to visualize");
    scene::CompileOptions opts;
    opts.scholar = c->name;
    opts.node_cap = options_.node_cap;
    opts.linkout_template = options_.linkout_template;
    auto compiled = compile_scholar(corpus_, scores_, c->papers, c->funding, opts);
    auto text = std::make_shared<const std::string>(scene::serialize(compiled.spec));
    std::lock_guard lock(cache_mutex_);
    for (auto it = cache_.begin(); it != cache_.end();)
      it = (it->first.first == c->id && it->first.second < c->version) ? cache_.erase(it)
                                                                       : std::next(it);
    cache_.emplace(key, text);
    return text;
  }

 private:
  using Json = nlohmann::ordered_json;

  static void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n",
                    "application/json");
  }

  static void send_error(httplib::Response& res, int status, std::string_view code,
                         const std::string& message) {
    send_json(res, status, Json{{"code", code}, {"message", message}});
  }

  template <typename Handler>
  auto guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        send_error(res, http_status(e.kind()), error_code(e.kind()), e.what());
      } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "malformed", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      }
    };
  }

  static nlohmann::json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return nlohmann::json::object();
    try {
      auto j = nlohmann::json::parse(req.body);
      if (!j.is_object()) throw InvalidArgument("request body must be a JSON object");
      return j;
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidArgument(std::string("malformed JSON body: ") + e.what());
    }
  }

  /// Base version for an edit: body "version", If-Match header, or
  /// ?version= query parameter.
  static std::uint64_t expected_version(const httplib::Request& req,
                                        const nlohmann::json& body) {
    if (auto it = body.find("version"); it != body.end()) {
      if (!it->is_number_unsigned()) throw InvalidArgument("'version' must be a positive integer");
      return it->get<std::uint64_t>();
    }
    std::string raw;
    if (req.has_header("If-Match"))
      raw = req.get_header_value("If-Match");
    else if (req.has_param("version"))
      raw = req.get_param_value("version");
    else
      throw InvalidArgument("edits must name the collection version they are based on");
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
      raw = raw.substr(1, raw.size() - 2);
    if (raw.empty() || raw.find_first_not_of("0123456789") != std::string::npos)
      throw InvalidArgument("malformed version '" + raw + "'");
    return std::stoull(raw);
  }

  static std::optional<FundingWindow> parse_funding(const nlohmann::json& f) {
    if (f.is_null()) return std::nullopt;
    if (!f.is_object() || !f.contains("start") || !f.contains("end") ||
        !f["start"].is_number_integer() || !f["end"].is_number_integer())
      throw InvalidArgument("funding must be {\"start\": year, \"end\": year} or null");
    FundingWindow w{f["start"].get<int>(), f["end"].get<int>()};
    validate_funding(w);
    return w;
  }

  std::vector<std::string> paper_list(const nlohmann::json& body) const {
    auto it = body.find("papers");
    if (it == body.end()) return {};
    if (!it->is_array()) throw InvalidArgument("'papers' must be an array of ids");
    std::vector<std::string> ids;
    for (const auto& p : *it) {
      if (!p.is_string()) throw InvalidArgument("'papers' must be an array of ids");
      ids.push_back(p.get<std::string>());
      corpus_.index_of(ids.back());
    }
    return ids;
  }

  Json paper_summary(PaperIndex i) const {
    const auto& p = corpus_.paper(i);
    Json j;
    j["id"] = p.id;
    j["title"] = p.title;
    j["year"] = p.year ? Json(*p.year) : Json(nullptr);
    j["venue"] = p.venue;
    j["domain"] = p.domain;
    j["eigenfactor"] = scores_[i];
    j["citations"] = corpus_.in_degree(i);
    return j;
  }

  void routes() {
    http_.Get("/api/authors", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto matches = corpus_.find_authors(req.get_param_value("q"));
      Json list = Json::array();
      for (const auto& m : matches)
        list.push_back({{"id", m.author_id}, {"name", m.name}, {"paper_count", m.paper_count}});
      send_json(res, 200, Json{{"authors", std::move(list)}});
    }));

    http_.Get(R"(/api/authors/([^/]+)/papers)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string author = req.matches[1];
                Json papers = Json::array();
                for (const auto& id : corpus_.papers_of(author))
                  papers.push_back(paper_summary(corpus_.index_of(id)));
                send_json(res, 200,
                          Json{{"author", {{"id", author},
                                           {"name", corpus_.author_name(author).value_or("")}}},
                               {"papers", std::move(papers)}});
              }));

    http_.Get(R"(/api/papers/([^/]+))",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                const auto i = corpus_.index_of(id);
                auto j = paper_summary(i);
                Json authors = Json::array();
                for (const auto& a : corpus_.paper(i).authors)
                  authors.push_back({{"id", a.id}, {"name", a.name}});
                j["authors"] = std::move(authors);
                const auto url = scene::linkout_url(options_.linkout_template, id);
                j["url"] = url ? Json(*url) : Json(nullptr);
                send_json(res, 200, j);
              }));

    http_.Get("/api/collections", guarded([this](const httplib::Request&, httplib::Response& res) {
      Json list = Json::array();
      for (const auto& c : store_.list()) list.push_back(to_json(c));
      send_json(res, 200, Json{{"collections", std::move(list)}});
    }));

    http_.Post("/api/collections", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      std::string name;
      if (auto it = body.find("name"); it != body.end()) {
        if (!it->is_string()) throw InvalidArgument("'name' must be a string");
        name = it->get<std::string>();
      }
      std::optional<FundingWindow> funding;
      if (auto it = body.find("funding"); it != body.end()) funding = parse_funding(*it);
      auto c = store_.create(std::move(name), paper_list(body), funding);
      res.set_header("ETag", '"' + std::to_string(c.version) + '"');
      send_json(res, 201, to_json(c));
    }));

    http_.Get(R"(/api/collections/([^/]+))",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                auto c = store_.get(id);
                if (!c) throw NotFound("unknown collection '" + id + "'");
                res.set_header("ETag", '"' + std::to_string(c->version) + '"');
                send_json(res, 200, to_json(*c));
              }));

    http_.Post(R"(/api/collections/([^/]+)/papers)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const auto body = parse_body(req);
                 if (!body.contains("papers")) throw InvalidArgument("missing 'papers'");
                 const auto ids = paper_list(body);
                 auto c = store_.add_papers(id, expected_version(req, body), ids);
                 res.set_header("ETag", '"' + std::to_string(c.version) + '"');
                 send_json(res, 200, to_json(c));
               }));

    http_.Delete(R"(/api/collections/([^/]+)/papers/([^/]+))",
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                   const std::string id = req.matches[1];
                   const std::string pid = req.matches[2];
                   const auto body = parse_body(req);
                   auto c = store_.remove_paper(id, expected_version(req, body), pid);
                   res.set_header("ETag", '"' + std::to_string(c.version) + '"');
                   send_json(res, 200, to_json(c));
                 }));

    http_.Put(R"(/api/collections/([^/]+)/funding)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                const auto body = parse_body(req);
                std::optional<FundingWindow> funding;
                if (auto it = body.find("funding"); it != body.end())
                  funding = parse_funding(*it);
                else if (body.contains("start") || body.contains("end"))
                  funding = parse_funding(body);
                else
                  throw InvalidArgument("body needs 'start'/'end' or 'funding'");
                auto c = store_.set_funding(id, expected_version(req, body), funding);
                res.set_header("ETag", '"' + std::to_string(c.version) + '"');
                send_json(res, 200, to_json(c));
              }));

    http_.Get(R"(/api/collections/([^/]+)/visspec)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto text = visspec_for(req.matches[1]);
                res.status = 200;
                res.set_content(*text, "application/json");
              }));
  }

  const Corpus& corpus_;
  const InfluenceScores& scores_;
  CollectionStore& store_;
  ServerOptions options_;
  httplib::Server http_;
  std::mutex cache_mutex_;
  std::map<std::pair<std::string, std::uint64_t>, std::shared_ptr<const std::string>> cache_;
};

}  // namespace egoflux
