#include "canids/featurize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "canids/error.hpp"

namespace canids {

namespace {

std::vector<std::string> standard_names() {
  return {kFeatureNames.begin(), kFeatureNames.end()};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(',', pos);
    out.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

std::size_t feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (kFeatureNames[i] == name) return i;
  return kFeatureCount;
}

std::array<double, kFeatureCount> FeatureVector::values() const {
  return {nodes,         edges,           max_indegree, max_outdegree, min_indegree,
          min_outdegree, median_pagerank, max_pagerank, min_pagerank};
}

FeatureVector graph_features(const MessageGraph& graph, const GraphFeatureOptions& options) {
  const bool multi = options.edge_mode == EdgeMode::Multigraph;
  const auto& in = multi ? graph.weighted_in_degree() : graph.in_degree();
  const auto& out = multi ? graph.weighted_out_degree() : graph.out_degree();
  FeatureVector f;
  f.nodes = static_cast<double>(graph.vertex_count());
  f.edges = static_cast<double>(multi ? graph.transition_count() : graph.edge_count());
  const auto [in_min, in_max] = std::minmax_element(in.begin(), in.end());
  const auto [out_min, out_max] = std::minmax_element(out.begin(), out.end());
  f.max_indegree = *in_max;
  f.min_indegree = *in_min;
  f.max_outdegree = *out_max;
  f.min_outdegree = *out_min;
  PageRankOptions pr = options.pagerank;
  pr.edge_mode = options.edge_mode;
  const auto summary = pr_summary(graph, pr);
  f.median_pagerank = summary.median;
  f.max_pagerank = summary.max;
  f.min_pagerank = summary.min;
  return f;
}

FeatureVector extract_features(const Window& window, const GraphFeatureOptions& options) {
  FeatureVector f = graph_features(build_graph(window), options);
  f.window_index = window.index;
  f.label = window.label;
  f.attack_kinds = window.attack_kinds;
  return f;
}

FeatureMatrix::FeatureMatrix() : names_(standard_names()) {}

FeatureMatrix::FeatureMatrix(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw InvalidArgument("feature matrix needs at least one column");
}

FeatureMatrix FeatureMatrix::from_vectors(std::span<const FeatureVector> rows) {
  FeatureMatrix m;
  for (const auto& v : rows) {
    const auto values = v.values();
    m.add_row(values, static_cast<std::uint8_t>(v.label), v.window_index, v.attack_kinds);
  }
  return m;
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

std::size_t FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw InvalidArgument("unknown feature '" + std::string(name) + "'");
}

void FeatureMatrix::add_row(std::span<const double> values, std::uint8_t label,
                            std::size_t window_index, AttackMask kinds) {
  if (values.size() != cols())
    throw InvalidArgument("row has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(cols()));
  if (label > 1) throw InvalidArgument("label must be 0 or 1");
  data_.insert(data_.end(), values.begin(), values.end());
  labels_.push_back(label);
  window_index_.push_back(window_index);
  attack_kinds_.push_back(kinds);
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::string> names) const {
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(column_index(n));
  FeatureMatrix out(std::vector<std::string>(names.begin(), names.end()));
  out.data_.reserve(rows() * idx.size());
  for (std::size_t r = 0; r < rows(); ++r)
    for (auto c : idx) out.data_.push_back(at(r, c));
  out.labels_ = labels_;
  out.window_index_ = window_index_;
  out.attack_kinds_ = attack_kinds_;
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows_wanted) const {
  FeatureMatrix out(names_);
  out.data_.reserve(rows_wanted.size() * cols());
  for (auto r : rows_wanted) {
    if (r >= rows()) throw InvalidArgument("row index out of range");
    const auto values = row(r);
    out.data_.insert(out.data_.end(), values.begin(), values.end());
    out.labels_.push_back(labels_[r]);
    out.window_index_.push_back(window_index_[r]);
    out.attack_kinds_.push_back(attack_kinds_[r]);
  }
  return out;
}

FeatureMatrix featurize_log(const FrameLog& log, const WindowSpec& spec,
                            const GraphFeatureOptions& options) {
  FeatureMatrix m;
  for (const auto& w : window_stream(log, spec)) {
    const auto f = extract_features(w, options);
    const auto values = f.values();
    m.add_row(values, static_cast<std::uint8_t>(f.label), f.window_index, f.attack_kinds);
  }
  return m;
}

void write_feature_csv(const FeatureMatrix& m, std::ostream& out,
                       std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "window_index";
  for (const auto& n : m.names()) out << ',' << n;
  out << ",label\n";
  char buf[64];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << m.window_index(r);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.9g", m.at(r, c));
      out << buf;
    }
    out << ',' << static_cast<int>(m.label(r)) << '\n';
  }
  if (!out) throw DataError("write failed");
}

FeatureMatrix read_feature_csv(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  std::optional<FeatureMatrix> m;
  std::vector<double> values;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_commas(line);
    if (!m) {
      if (fields.size() < 3 || fields.front() != "window_index" || fields.back() != "label")
        throw ParseError(line_no, "feature header must be window_index,<features...>,label");
      std::vector<std::string> names(fields.begin() + 1, fields.end() - 1);
      for (const auto& n : names)
        if (feature_index(n) == kFeatureCount)
          throw ParseError(line_no, "unknown feature column '" + n + "'");
      m.emplace(std::move(names));
      continue;
    }
    if (fields.size() != m->cols() + 2)
      throw ParseError(line_no, "expected " + std::to_string(m->cols() + 2) + " fields, got " +
                                    std::to_string(fields.size()));
    std::size_t window = 0;
    {
      const auto f = fields.front();
      const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), window);
      if (ec != std::errc{} || p != f.data() + f.size())
        throw ParseError(line_no, "bad window_index '" + std::string(f) + "'");
    }
    values.assign(m->cols(), 0.0);
    for (std::size_t c = 0; c < m->cols(); ++c) {
      const auto f = fields[c + 1];
      const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), values[c]);
      if (ec != std::errc{} || p != f.data() + f.size() || f.empty() || !std::isfinite(values[c]))
        throw ParseError(line_no, "bad value for " + m->names()[c] + " '" + std::string(f) + "'");
    }
    const auto label = fields.back();
    if (label != "0" && label != "1")
      throw ParseError(line_no, "label must be 0 or 1, got '" + std::string(label) + "'");
    m->add_row(values, label == "1" ? 1 : 0, window);
  }
  if (!m) throw DataError("feature file has no header");
  return std::move(*m);
}

FeatureMatrix read_feature_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_feature_csv(in);
}

QuantileTransformer QuantileTransformer::fit(const FeatureMatrix& m) {
  if (m.rows() < 2) throw InvalidArgument("quantile transform needs at least 2 rows");
  QuantileTransformer qt;
  const double n = static_cast<double>(m.rows());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    auto col = m.column(c);
    std::sort(col.begin(), col.end());
    Column out;
    for (std::size_t i = 0; i < col.size();) {
      std::size_t j = i;
      while (j < col.size() && col[j] == col[i]) ++j;
      // 1-based ranks i+1..j share the midrank.
      const double midrank = 0.5 * static_cast<double>(i + 1 + j);
      out.values.push_back(col[i]);
      out.positions.push_back((midrank - 0.5) / n);
      i = j;
    }
    qt.columns_.push_back(std::move(out));
  }
  return qt;
}

double QuantileTransformer::transform_value(std::size_t col, double x) const {
  const auto& c = columns_.at(col);
  if (c.values.size() == 1) return 0.5;
  if (x < c.values.front()) return 0.0;
  if (x > c.values.back()) return 1.0;
  const auto it = std::lower_bound(c.values.begin(), c.values.end(), x);
  const auto hi = static_cast<std::size_t>(it - c.values.begin());
  if (*it == x) return c.positions[hi];
  const auto lo = hi - 1;
  const double frac = (x - c.values[lo]) / (c.values[hi] - c.values[lo]);
  return c.positions[lo] + frac * (c.positions[hi] - c.positions[lo]);
}

FeatureMatrix QuantileTransformer::transform(const FeatureMatrix& m) const {
  if (m.cols() != columns_.size())
    throw InvalidArgument("quantile transform column count mismatch");
  FeatureMatrix out = m;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out.at(r, c) = transform_value(c, m.at(r, c));
  return out;
}

FeatureMatrix quantile_transform(const FeatureMatrix& m) {
  return QuantileTransformer::fit(m).transform(m);
}

CorrelationMatrix::CorrelationMatrix(std::vector<std::string> names, std::vector<double> entries)
    : names_(std::move(names)), entries_(std::move(entries)) {
  if (entries_.size() != names_.size() * names_.size())
    throw InvalidArgument("correlation matrix must be square");
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson: length mismatch");
  if (x.size() < 2) throw InvalidArgument("pearson needs at least 2 samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(const FeatureMatrix& m) {
  if (m.rows() < 2) throw InvalidArgument("correlation matrix needs at least 2 rows");
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names = m.names();
  for (std::size_t c = 0; c < m.cols(); ++c) cols.push_back(m.column(c));
  cols.emplace_back(m.labels().begin(), m.labels().end());
  names.emplace_back("label");
  const std::size_t k = cols.size();
  std::vector<double> entries(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    entries[i * k + i] = 1.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      const double r = pearson(cols[i], cols[j]);
      entries[i * k + j] = r;
      entries[j * k + i] = r;
    }
  }
  return {std::move(names), std::move(entries)};
}

std::vector<std::string> select_features(const CorrelationMatrix& corr, std::size_t k) {
  const std::size_t features = corr.size() - 1;
  if (k < 1 || k > features)
    throw InvalidArgument("k must lie in [1, " + std::to_string(features) + "]");
  std::vector<std::size_t> order(features);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(corr.with_label(a)) > std::abs(corr.with_label(b));
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(corr.names()[order[i]]);
  return out;
}

}  // namespace canids
