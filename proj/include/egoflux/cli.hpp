#pragma once

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "egoflux/collections.hpp"
#include "egoflux/corpus.hpp"
#include "egoflux/error.hpp"
#include "egoflux/influence.hpp"
#include "egoflux/pipeline.hpp"
#include "egoflux/score_cache.hpp"
#include "egoflux/server.hpp"
#include "egoflux/visspec_json.hpp"
#include "egoflux/workspace.hpp"

namespace egoflux::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNonConvergence = 3,
};

inline int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::invalid_argument: return kUsage;
    case ErrorKind::non_convergence: return kNonConvergence;
    default: return kDataError;
  }
}

inline std::vector<std::string> split_ids(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = text::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

/// "Y1:Y2" -> funding window.
inline FundingWindow parse_funding_flag(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw InvalidArgument("--funding expects Y1:Y2");
  try {
    std::size_t a = 0, b = 0;
    const auto lhs = s.substr(0, colon), rhs = s.substr(colon + 1);
    FundingWindow w{std::stoi(lhs, &a), std::stoi(rhs, &b)};
    if (a != lhs.size() || b != rhs.size()) throw std::invalid_argument("");
    validate_funding(w);
    return w;
  } catch (const std::logic_error&) {
    throw InvalidArgument("--funding expects Y1:Y2 with integer years");
  }
}

inline void print_report(std::ostream& out, const IngestReport& r) {
  out << "papers\t" << r.papers << '\n'
      << "edges\t" << r.edges << '\n'
      << "dropped_dangling\t" << r.dropped_dangling << '\n'
      << "dropped_self\t" << r.dropped_self << '\n'
      << "duplicate_edges\t" << r.duplicate_edges << '\n'
      << "missing_year\t" << r.missing_year << '\n'
      << "missing_domain\t" << r.missing_domain << '\n';
}

namespace detail {

struct Loaded {
  Workspace ws;
  Workspace::Manifest manifest;
  Corpus corpus;
  InfluenceScores scores;
};

inline Loaded load(const std::string& data_dir) {
  Workspace ws(Workspace::resolve(data_dir));
  auto manifest = ws.read_manifest();
  auto corpus = ws.load_corpus(manifest.mode);
  auto scores = load_or_compute_scores(ws.scores(), corpus, manifest.solver);
  return {std::move(ws), manifest, std::move(corpus), std::move(scores)};
}

inline void copy_file(const std::string& from, const std::filesystem::path& to) {
  if (std::filesystem::exists(to) && std::filesystem::equivalent(from, to)) return;
  std::filesystem::copy_file(from, to, std::filesystem::copy_options::overwrite_existing);
}

// Paper set and display label named by --collection or --papers.
inline std::pair<std::vector<std::string>, std::optional<FundingWindow>> resolve_papers(
    const Loaded& l, const std::string& collection, const std::string& papers,
    std::string& label) {
  if (!collection.empty()) {
    CollectionStore store(l.ws.collections());
    auto c = store.get(collection);
    if (!c) throw NotFound("unknown collection '" + collection + "'");
    if (c->papers.empty())
      throw Unprocessable("collection '" + collection + "' has no papers");
    if (label.empty()) label = c->name;
    return {c->papers, c->funding};
  }
  auto ids = split_ids(papers);
  if (ids.empty()) throw InvalidArgument("--papers needs at least one paper id");
  return {ids, std::nullopt};
}

}  // namespace detail

inline ApiServer* active_server = nullptr;

/// Entry point of the `egoflux` tool. Messages go to `err`, data to `out`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"egoflux: citation-network influence visualizations"};
  app.require_subcommand(1);
  std::string data_dir;
  app.add_option("--data", data_dir, "Data directory (default $EGOFLUX_DATA)");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Ingest a corpus and build the score cache");
  std::string papers_path, citations_path, mode = "strict", out_dir;
  ingest_cmd->add_option("--papers", papers_path, "Papers file (JSON lines)")->required();
  ingest_cmd->add_option("--citations", citations_path, "Citations file (TSV)")->required();
  ingest_cmd->add_option("--mode", mode, "strict|lenient")
      ->check(CLI::IsMember({"strict", "lenient"}));
  ingest_cmd->add_option("--out", out_dir, "Output data directory");

  // score
  auto* score_cmd = app.add_subcommand("score", "Recompute influence scores");
  SolverConfig solver;
  score_cmd->add_option("--data", data_dir, "Data directory");
  score_cmd->add_option("--alpha", solver.alpha, "Damping factor");
  score_cmd->add_option("--tolerance", solver.tolerance, "L1 convergence tolerance");
  score_cmd->add_option("--max-iters", solver.max_iterations, "Iteration limit");

  // visspec
  auto* vis_cmd = app.add_subcommand("visspec", "Compile a VisSpec document");
  std::string collection, paper_ids, funding, out_path, scholar, linkout, edge_dump;
  int cap = scene::kDefaultNodeCap;
  auto* vis_coll = vis_cmd->add_option("--collection", collection, "Collection id");
  auto* vis_papers = vis_cmd->add_option("--papers", paper_ids, "Comma-separated paper ids");
  vis_coll->excludes(vis_papers);
  vis_cmd->add_option("--data", data_dir, "Data directory");
  vis_cmd->add_option("--funding", funding, "Funding window Y1:Y2");
  vis_cmd->add_option("--out", out_path, "Output path")->required();
  vis_cmd->add_option("--scholar", scholar, "Display label");
  vis_cmd->add_option("--cap", cap, "Node cap including the ego");
  vis_cmd->add_option("--linkout-template", linkout, "Link-out URL with {id}");
  vis_cmd->add_option("--edge-dump", edge_dump, "Also write the ego network as an edge list");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP API");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve_cmd->add_option("--data", data_dir, "Data directory");
  serve_cmd->add_option("--port", port, "Listen port");
  serve_cmd->add_option("--host", host, "Listen address");
  serve_cmd->add_option("--linkout-template", linkout, "Link-out URL with {id}");

  // report
  auto* report_cmd = app.add_subcommand("report", "Shape statistics and timelines as TSV");
  auto* rep_coll = report_cmd->add_option("--collection", collection, "Collection id");
  auto* rep_papers = report_cmd->add_option("--papers", paper_ids, "Comma-separated paper ids");
  rep_coll->excludes(rep_papers);
  report_cmd->add_option("--data", data_dir, "Data directory");
  report_cmd->add_option("--funding", funding, "Funding window Y1:Y2");
  report_cmd->add_option("--edge-dump", edge_dump, "Also write the ego network as an edge list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "egoflux: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*ingest_cmd) {
      Workspace ws(Workspace::resolve(out_dir.empty() ? data_dir : out_dir));
      std::filesystem::create_directories(ws.root());
      const auto ingest_mode = parse_ingest_mode(mode);
      auto corpus = ingest(papers_path, citations_path, ingest_mode);
      detail::copy_file(papers_path, ws.papers());
      detail::copy_file(citations_path, ws.citations());
      Workspace::Manifest m;
      m.mode = ingest_mode;
      ws.write_manifest(m);
      auto scores = compute_eigenfactor(corpus, m.solver);
      write_score_cache(ws.scores(), corpus, m.solver, scores);
      print_report(out, corpus.report());
      out << "corpus_hash\t" << text::hex64(corpus.content_hash()) << '\n'
          << "iterations\t" << scores.iterations_used << '\n';
      return kOk;
    }

    if (*score_cmd) {
      solver.validate();
      Workspace ws(Workspace::resolve(data_dir));
      auto m = ws.read_manifest();
      auto corpus = ws.load_corpus(m.mode);
      auto scores = compute_eigenfactor(corpus, solver);
      write_score_cache(ws.scores(), corpus, solver, scores);
      m.solver = solver;
      ws.write_manifest(m);
      out << "corpus_hash\t" << text::hex64(corpus.content_hash()) << '\n'
          << "iterations\t" << scores.iterations_used << '\n';
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", scores.residual);
      out << "residual\t" << buf << '\n';
      return kOk;
    }

    if (*vis_cmd || *report_cmd) {
      if (collection.empty() && paper_ids.empty())
        throw InvalidArgument("one of --collection or --papers is required");
      std::optional<FundingWindow> window;
      if (!funding.empty()) window = parse_funding_flag(funding);
      auto loaded = detail::load(data_dir);
      auto [ids, stored_funding] =
          detail::resolve_papers(loaded, collection, paper_ids, scholar);
      if (!window) window = stored_funding;

      scene::CompileOptions opts;
      opts.scholar = scholar;
      opts.node_cap = cap;
      opts.linkout_template = linkout;
      auto compiled = compile_scholar(loaded.corpus, loaded.scores, ids, window, opts);
      if (!edge_dump.empty()) {
        std::ofstream dump(edge_dump, std::ios::trunc | std::ios::binary);
        if (!dump) throw DataError("cannot write '" + edge_dump + "'");
        write_edge_dump(dump, compiled.network);
      }
      if (*report_cmd) {
        write_report(out, compiled.network, compiled.timelines);
        return kOk;
      }
      std::ofstream file(out_path, std::ios::trunc | std::ios::binary);
      if (!file) throw DataError("cannot write '" + out_path + "'");
      file << scene::serialize(compiled.spec);
      if (!file) throw DataError("short write to '" + out_path + "'");
      out << "wrote " << out_path << " (" << compiled.spec.nodes.size() << " nodes, "
          << compiled.spec.edges.size() << " edges)\n";
      return kOk;
    }

    if (*serve_cmd) {
      auto loaded = detail::load(data_dir);
      CollectionStore store(loaded.ws.collections());
      ServerOptions opts;
      opts.linkout_template = linkout;
      ApiServer server(loaded.corpus, loaded.scores, store, opts);
      active_server = &server;
      std::signal(SIGINT, [](int) {
        if (active_server) active_server->stop();
      });
      std::signal(SIGTERM, [](int) {
        if (active_server) active_server->stop();
      });
      err << "egoflux: serving " << loaded.corpus.size() << " papers on http://" << host
          << ':' << port << '\n';
      const bool ok = server.listen(host, port);
      active_server = nullptr;
      if (!ok) {
        err << "egoflux: cannot listen on " << host << ':' << port << '\n';
        return kUsage;
      }
      return kOk;
    }
  } catch (const Error& e) {
    err << "egoflux: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "egoflux: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace egoflux::cli
