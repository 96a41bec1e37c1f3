#pragma once

#include <cstddef>
#include <vector>

#include "canids/graphing.hpp"

namespace canids {

struct PageRankOptions {
  double damping = 1.0;  // 1.0 is the undamped recurrence
  double tolerance = 1e-10;  // max absolute per-vertex change
  std::size_t max_iterations = 200;
  // Multigraph: out-flow is split in proportion to edge multiplicity.
  EdgeMode edge_mode = EdgeMode::Simple;
};

void validate(const PageRankOptions& options);

struct PageRankResult {
  std::vector<double> scores;  // aligned with MessageGraph::ids()
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration from the uniform distribution. Mass held by vertices without
// out-edges is spread uniformly each step, so scores always sum to one. When
// the iteration cap is hit the last iterate is returned with converged=false.
PageRankResult pagerank(const MessageGraph& graph, const PageRankOptions& options = {});

struct PageRankSummary {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

// Median of an even count is the mean of the two central values.
PageRankSummary summarize(std::vector<double> scores);
PageRankSummary pr_summary(const MessageGraph& graph, const PageRankOptions& options = {});

}  // namespace canids
