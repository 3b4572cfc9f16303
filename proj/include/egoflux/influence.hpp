#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egoflux/corpus.hpp"
#include "egoflux/error.hpp"

namespace egoflux {

struct SolverConfig {
  double alpha = 0.85;
  double tolerance = 1e-12;  // L1 residual between successive iterates
  int max_iterations = 1000;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw InvalidArgument("damping factor must lie in (0, 1)");
    if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be > 0");
    if (max_iterations < 1)
      throw InvalidArgument("max_iterations must be >= 1");
  }

  bool operator==(const SolverConfig&) const = default;
};

/// Article-level influence per paper, aligned with the corpus' PaperIndex.
struct InfluenceScores {
  std::vector<double> scores;
  int iterations_used = 0;
  double residual = 0.0;
  /// L1 residual after each iteration (empty when loaded from a cache).
  std::vector<double> residual_trace;
  /// Random-surfer stationary vector behind `scores` (empty when loaded
  /// from a cache).
  std::vector<double> stationary;

  double operator[](PaperIndex i) const { return scores[i]; }

  double of(const Corpus& corpus, std::string_view id) const {
    return scores[corpus.index_of(id)];
  }
};

/// Article-level Eigenfactor.
///
/// A damped random surfer follows references (citing -> cited). Column i of
/// the transition matrix M spreads 1/outdeg(i) over the papers i cites; a
/// paper without references spreads uniformly over all N papers. The
/// stationary vector of
///
///     pi = alpha * M * pi + (1 - alpha) / N
///
/// is found by power iteration. The returned score is the citation flow
/// H * pi normalized to sum 1, where H is M restricted to actual citation
/// columns. Teleport and no-reference mass therefore never reaches a paper
/// by itself, and a paper nobody cites scores exactly 0. A corpus without
/// any citations has no flow at all; its scores fall back to pi (uniform).
inline InfluenceScores compute_eigenfactor(const Corpus& corpus,
                                           const SolverConfig& config = {}) {
  config.validate();
  const std::size_t n = corpus.size();
  if (n == 0) throw InvalidArgument("cannot score an empty corpus");

  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> inv_out(n);
  std::vector<PaperIndex> dangling;
  for (PaperIndex i = 0; i < n; ++i) {
    const auto d = corpus.out_degree(i);
    if (d == 0) {
      dangling.push_back(i);
    } else {
      inv_out[i] = 1.0 / static_cast<double>(d);
    }
  }

  std::vector<double> pi(n, inv_n), next(n), share(n);
  InfluenceScores out;
  out.residual_trace.reserve(64);

  bool converged = false;
  for (int it = 1; it <= config.max_iterations; ++it) {
    double dangling_mass = 0.0;
    for (auto i : dangling) dangling_mass += pi[i];
    for (std::size_t i = 0; i < n; ++i) share[i] = pi[i] * inv_out[i];

    const double base =
        config.alpha * dangling_mass * inv_n + (1.0 - config.alpha) * inv_n;
    double residual = 0.0;
    for (PaperIndex j = 0; j < n; ++j) {
      double flow = 0.0;
      for (auto i : corpus.in_cites(j)) flow += share[i];
      next[j] = base + config.alpha * flow;
      residual += std::abs(next[j] - pi[j]);
    }
    pi.swap(next);
    out.residual_trace.push_back(residual);
    out.iterations_used = it;
    out.residual = residual;
    if (residual <= config.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NonConvergence(out.residual, out.iterations_used);

  for (std::size_t i = 0; i < n; ++i) share[i] = pi[i] * inv_out[i];
  out.scores.assign(n, 0.0);
  double total = 0.0;
  for (PaperIndex j = 0; j < n; ++j) {
    double flow = 0.0;
    for (auto i : corpus.in_cites(j)) flow += share[i];
    out.scores[j] = flow;
    total += flow;
  }
  out.stationary = pi;
  if (total > 0.0) {
    for (auto& s : out.scores) s /= total;
  } else {
    double sum = 0.0;
    for (double v : pi) sum += v;
    for (std::size_t j = 0; j < n; ++j) out.scores[j] = pi[j] / sum;
  }
  return out;
}

/// Per-year sum of the ego papers' scores. Every year from the earliest
/// dated ego paper to the latest year in the corpus has an entry; undated
/// ego papers are skipped.
inline std::map<int, double> yearly_ef_sum(const InfluenceScores& scores,
                                           std::span<const std::string> ego_ids,
                                           const Corpus& corpus) {
  std::set<PaperIndex> ego;
  for (const auto& id : ego_ids) ego.insert(corpus.index_of(id));

  std::map<int, double> out;
  std::optional<int> first;
  for (auto i : ego)
    if (auto y = corpus.paper(i).year) first = first ? std::min(*first, *y) : *y;
  if (!first) return out;

  const int last = std::max(*first, corpus.max_year().value_or(*first));
  for (int y = *first; y <= last; ++y) out[y] = 0.0;
  for (auto i : ego)
    if (auto y = corpus.paper(i).year) out[*y] += scores[i];
  return out;
}

}  // namespace egoflux
