#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "canids/graphing.hpp"
#include "canids/ranking.hpp"

namespace canids {

inline constexpr std::size_t kFeatureCount = 9;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "nodes",        "edges",        "max_indegree",    "max_outdegree", "min_indegree",
    "min_outdegree", "median_pagerank", "max_pagerank", "min_pagerank"};

// Index of a feature name in kFeatureNames, or kFeatureCount when unknown.
std::size_t feature_index(std::string_view name);

struct FeatureVector {
  double nodes = 0;
  double edges = 0;
  double max_indegree = 0;
  double max_outdegree = 0;
  double min_indegree = 0;
  double min_outdegree = 0;
  double median_pagerank = 0;
  double max_pagerank = 0;
  double min_pagerank = 0;
  std::size_t window_index = 0;
  WindowLabel label = WindowLabel::AttackFree;
  AttackMask attack_kinds = 0;

  // In kFeatureNames order.
  std::array<double, kFeatureCount> values() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct GraphFeatureOptions {
  EdgeMode edge_mode = EdgeMode::Simple;
  PageRankOptions pagerank;  // its edge_mode is overridden by the one above
};

FeatureVector extract_features(const Window& window, const GraphFeatureOptions& options = {});
// Graph-only part; label and window metadata are left at their defaults.
FeatureVector graph_features(const MessageGraph& graph, const GraphFeatureOptions& options = {});

// Row-major table of named feature columns with a binary label per row.
class FeatureMatrix {
 public:
  FeatureMatrix();  // the nine standard columns, no rows
  explicit FeatureMatrix(std::vector<std::string> names);

  static FeatureMatrix from_vectors(std::span<const FeatureVector> rows);

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols(), cols());
  }
  std::vector<double> column(std::size_t c) const;
  // Column index by name; throws InvalidArgument when absent.
  std::size_t column_index(std::string_view name) const;

  std::uint8_t label(std::size_t r) const { return labels_[r]; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }
  std::size_t window_index(std::size_t r) const { return window_index_[r]; }
  AttackMask attack_kinds(std::size_t r) const { return attack_kinds_[r]; }

  void add_row(std::span<const double> values, std::uint8_t label,
               std::size_t window_index = 0, AttackMask kinds = 0);

  FeatureMatrix select_columns(std::span<const std::string> names) const;
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<double> data_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::size_t> window_index_;
  std::vector<AttackMask> attack_kinds_;
};

// Windows `log`, extracts one row per window. Rows are ordered by window index.
FeatureMatrix featurize_log(const FrameLog& log, const WindowSpec& spec,
                            const GraphFeatureOptions& options = {});

// Header `window_index,<names...>,label`; floats with 9 significant digits.
void write_feature_csv(const FeatureMatrix& m, std::ostream& out,
                       std::span<const std::string> comments = {});
FeatureMatrix read_feature_csv(std::istream& in);
FeatureMatrix read_feature_file(const std::string& path);

// Empirical-CDF map of each column onto [0, 1]. Sample values map to
// (midrank - 0.5) / n; values between sample points are linearly
// interpolated; constant columns map to 0.5.
class QuantileTransformer {
 public:
  static QuantileTransformer fit(const FeatureMatrix& m);
  double transform_value(std::size_t col, double x) const;
  FeatureMatrix transform(const FeatureMatrix& m) const;

 private:
  struct Column {
    std::vector<double> values;     // sorted unique sample values
    std::vector<double> positions;  // plotting position of each value
  };
  std::vector<Column> columns_;
};

FeatureMatrix quantile_transform(const FeatureMatrix& m);

// Pearson correlations over the feature columns plus the label (last).
class CorrelationMatrix {
 public:
  CorrelationMatrix(std::vector<std::string> names, std::vector<double> entries);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  double at(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }
  // Correlation of feature `i` with the label.
  double with_label(std::size_t i) const { return at(i, size() - 1); }

 private:
  std::vector<std::string> names_;
  std::vector<double> entries_;
};

// Pearson r of two equally long samples; 0 when either is constant.
double pearson(std::span<const double> x, std::span<const double> y);

CorrelationMatrix correlation_matrix(const FeatureMatrix& m);

// The k features most correlated with the label by |r|; ties keep column order.
std::vector<std::string> select_features(const CorrelationMatrix& corr, std::size_t k);

}  // namespace canids
