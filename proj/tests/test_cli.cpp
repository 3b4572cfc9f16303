#include <gtest/gtest.h>

#include <sstream>

#include "egoflux/cli.hpp"
#include "support/fixtures.hpp"

using namespace egoflux;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "egoflux");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string demo(const char* name) { return (testkit::demo_dir() / name).string(); }

}  // namespace

TEST(Cli, IngestScoreVisspecReport) {
  testkit::TempDir dir("cli");
  const auto data = (dir / "data").string();
  auto r = run({"ingest", "--papers", demo("papers.jsonl"), "--citations", demo("citations.tsv"),
                "--out", data});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("papers\t600\n"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "data" / "scores.bin"));

  r = run({"score", "--data", data, "--alpha", "0.8"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("iterations\t"), std::string::npos);

  const auto out = (dir / "v.json").string();
  r = run({"visspec", "--data", data, "--papers", "W0000001,W0000022", "--out", out,
           "--funding", "1975:1980", "--scholar", "Demo"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto spec = scene::parse_visspec(testkit::read_text(out));
  EXPECT_TRUE(scene::validate(spec).empty());
  EXPECT_EQ(spec.ego.papers.size(), 2u);

  const auto dump = (dir / "edges.tsv").string();
  r = run({"report", "--data", data, "--papers", "W0000001", "--edge-dump", dump});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("stat\tvalue\nego_papers\t1\n", 0), 0u);
  EXPECT_NE(r.out.find("\n\nyear\tpublications\tcitations_received\tef_sum\tfunding_phase\n"),
            std::string::npos);
  const auto edges = testkit::read_text(dump);
  EXPECT_NE(edges.find("\tEGO\t1\n"), std::string::npos);
}

TEST(Cli, VisspecFromCollection) {
  testkit::TempDir dir("cli");
  const auto data = (dir / "data").string();
  ASSERT_EQ(run({"ingest", "--papers", demo("papers.jsonl"), "--citations",
                 demo("citations.tsv"), "--out", data})
                .code,
            0);
  {
    CollectionStore store(dir / "data" / "collections.jsonl");
    store.create("Named", {"W0000001"}, FundingWindow{1980, 1990});
    store.create("Empty");
  }
  const auto out = (dir / "v.json").string();
  auto r = run({"visspec", "--data", data, "--collection", "c000001", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto spec = scene::parse_visspec(testkit::read_text(out));
  EXPECT_EQ(spec.scholar, "Named");
  EXPECT_EQ(spec.timelines.funding, (FundingWindow{1980, 1990}));
  EXPECT_EQ(run({"visspec", "--data", data, "--collection", "c000002", "--out", out}).code, 2);
  EXPECT_EQ(run({"visspec", "--data", data, "--collection", "c000009", "--out", out}).code, 2);
}

TEST(Cli, ExitCodes) {
  testkit::TempDir dir("cli");
  const auto data = (dir / "data").string();
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"ingest", "--papers", "x"}).code, 1);
  EXPECT_EQ(run({"ingest", "--papers", demo("papers.jsonl"), "--citations",
                 demo("citations.tsv"), "--out", data, "--mode", "sloppy"})
                .code,
            1);
  EXPECT_EQ(run({"ingest", "--papers", (dir / "missing").string(), "--citations",
                 demo("citations.tsv"), "--out", data})
                .code,
            2);
  EXPECT_EQ(run({"score", "--data", data}).code, 2);  // nothing ingested yet

  ASSERT_EQ(run({"ingest", "--papers", demo("papers.jsonl"), "--citations",
                 demo("citations.tsv"), "--out", data})
                .code,
            0);
  EXPECT_EQ(run({"score", "--data", data, "--max-iters", "2"}).code, 3);
  EXPECT_EQ(run({"score", "--data", data, "--alpha", "1.5"}).code, 1);
  const auto out = (dir / "v.json").string();
  EXPECT_EQ(run({"visspec", "--data", data, "--out", out}).code, 1);
  EXPECT_EQ(run({"visspec", "--data", data, "--papers", "NOPE", "--out", out}).code, 2);
  EXPECT_EQ(run({"visspec", "--data", data, "--papers", "W0000001", "--funding", "1990",
                 "--out", out})
                .code,
            1);
  EXPECT_EQ(run({"visspec", "--data", data, "--papers", "W0000001", "--funding", "1999:1990",
                 "--out", out})
                .code,
            1);
}

TEST(Cli, StrictIngestReportsLine) {
  testkit::TempDir dir("cli");
  testkit::write_text(dir / "p.jsonl", R"({"id":"A","year":1990})" "\n");
  testkit::write_text(dir / "c.tsv", "A\tB\n");
  auto r = run({"ingest", "--papers", (dir / "p.jsonl").string(), "--citations",
                (dir / "c.tsv").string(), "--out", (dir / "d").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("c.tsv:1:"), std::string::npos) << r.err;
  r = run({"ingest", "--papers", (dir / "p.jsonl").string(), "--citations",
           (dir / "c.tsv").string(), "--out", (dir / "d").string(), "--mode", "lenient"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("dropped_dangling\t1\n"), std::string::npos);
}

TEST(Cli, ParseFundingFlag) {
  EXPECT_EQ(cli::parse_funding_flag("2001:2005"), (FundingWindow{2001, 2005}));
  EXPECT_THROW(cli::parse_funding_flag("2001-2005"), InvalidArgument);
  EXPECT_THROW(cli::parse_funding_flag("20x1:2005"), InvalidArgument);
  EXPECT_EQ(cli::split_ids(" a, b,,c "), (std::vector<std::string>{"a", "b", "c"}));
}
