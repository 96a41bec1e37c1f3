#include "canids/ranking.hpp"

#include <algorithm>
#include <cmath>

#include "canids/error.hpp"

namespace canids {

void validate(const PageRankOptions& options) {
  if (!(options.damping > 0.0 && options.damping <= 1.0))
    throw InvalidArgument("damping must lie in (0, 1]");
  if (!(options.tolerance > 0.0)) throw InvalidArgument("tolerance must be > 0");
  if (options.max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
}

PageRankResult pagerank(const MessageGraph& graph, const PageRankOptions& options) {
  validate(options);
  const std::size_t n = graph.vertex_count();
  if (n == 0) throw DataError("pagerank of an empty graph");

  const bool weighted = options.edge_mode == EdgeMode::Multigraph;
  const auto& out_deg = weighted ? graph.weighted_out_degree() : graph.out_degree();
  const auto& edges = graph.edges();
  const double d = options.damping;
  const double inv_n = 1.0 / static_cast<double>(n);

  PageRankResult result;
  std::vector<double> current(n, inv_n);
  std::vector<double> next(n);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v)
      if (out_deg[v] == 0) dangling += current[v];
    std::fill(next.begin(), next.end(), (1.0 - d) * inv_n + d * dangling * inv_n);
    for (const auto& e : edges) {
      const double w = weighted ? static_cast<double>(e.count) : 1.0;
      next[e.dst] += d * current[e.src] * w / static_cast<double>(out_deg[e.src]);
    }
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v)
      change = std::max(change, std::abs(next[v] - current[v]));
    current.swap(next);
    result.iterations = it + 1;
    if (change < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.scores = std::move(current);
  return result;
}

PageRankSummary summarize(std::vector<double> scores) {
  if (scores.empty()) throw DataError("summary of no scores");
  std::sort(scores.begin(), scores.end());
  const std::size_t n = scores.size();
  PageRankSummary s;
  s.min = scores.front();
  s.max = scores.back();
  s.median = n % 2 == 1 ? scores[n / 2] : 0.5 * (scores[n / 2 - 1] + scores[n / 2]);
  return s;
}

PageRankSummary pr_summary(const MessageGraph& graph, const PageRankOptions& options) {
  return summarize(pagerank(graph, options).scores);
}

}  // namespace canids
