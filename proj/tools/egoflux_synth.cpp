// Writes a synthetic corpus (papers.jsonl + citations.tsv) for demos and
// benchmarks.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "egoflux/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"egoflux-synth: generate a synthetic citation corpus"};
  egoflux::synthetic::Options opt;
  std::string papers = "papers.jsonl", citations = "citations.tsv";
  app.add_option("--papers-out", papers, "Papers file to write");
  app.add_option("--citations-out", citations, "Citations file to write");
  app.add_option("--papers", opt.papers, "Number of papers");
  app.add_option("--citations", opt.citations, "Number of citations");
  app.add_option("--seed", opt.seed, "RNG seed");
  app.add_option("--first-year", opt.first_year);
  app.add_option("--last-year", opt.last_year);
  app.add_option("--domains", opt.domains);
  app.add_option("--undated", opt.undated_fraction, "Fraction of undated papers");
  app.add_option("--unassigned", opt.unassigned_fraction, "Fraction without domain");
  app.add_option("--scholar-papers", opt.scholar_papers, "Papers owned by author S1");
  app.add_option("--scholar-citations", opt.scholar_citations, "Extra citations to S1");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto d = egoflux::synthetic::generate(opt);
    egoflux::synthetic::write(d, papers, citations);
    std::cout << d.papers.size() << " papers, " << d.citations.size() << " citations\n";
    for (const auto& id : d.scholar_papers) std::cout << "scholar\t" << id << '\n';
  } catch (const std::exception& e) {
    std::cerr << "egoflux-synth: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
