#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "canids/bayes.hpp"
#include "canids/featurize.hpp"

namespace canids {

struct SplitSpec {
  double train_fraction = 0.67;
  std::uint64_t seed = 7;
  bool stratified = true;
};

struct Split {
  std::vector<std::size_t> train;  // ascending row indices
  std::vector<std::size_t> test;
};

// Seeded shuffle. round(fraction * rows) rows go to train; with
// stratification the per-class shares are allotted by largest remainder.
Split split_indices(const FeatureMatrix& m, const SplitSpec& spec);

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  void add(bool actual_attacked, bool predicted_attacked);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct Metrics {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;
  bool zero_division = false;  // some ratio was 0/0 and reported as 0
};

// Throws InvalidArgument on an empty matrix.
Metrics metrics(const ConfusionMatrix& cm);

// Which feature columns a model trains on.
struct FeatureSelection {
  enum class Mode { All, TopK, List } mode = Mode::All;
  std::size_t k = 4;
  std::vector<std::string> names;

  static FeatureSelection parse(const std::string& text);  // all | top<k> | a,b,c
  std::string to_string() const;
  // TopK ranks by |r(feature, label)| on `train`.
  std::vector<std::string> resolve(const FeatureMatrix& train) const;
};

struct EvalReport {
  ModelKind model_kind = ModelKind::Ggnb;
  std::vector<std::string> features;
  SplitSpec split;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  ConfusionMatrix overall;
  Metrics overall_metrics;
  // Attacked test windows carrying the kind, plus every attack-free test window.
  std::map<AttackKind, ConfusionMatrix> per_attack;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
  std::vector<std::size_t> test_rows_index;
  std::vector<Prediction> predictions;  // aligned with test_rows_index
};

EvalReport evaluate(ModelKind kind, const FeatureMatrix& m, const SplitSpec& split,
                    const FeatureSelection& selection = {});

// Timings are wall-clock and therefore left out unless asked for.
std::string render_text(const EvalReport& report, bool include_timing = false);
void write_report_csv(const EvalReport& report, std::ostream& out,
                      std::span<const std::string> comments = {}, bool include_timing = false);

struct SweepRow {
  double window_ms = 0;
  std::size_t windows = 0;
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;
};

std::vector<double> default_sweep_grid();  // 11.5, 23, 46, 115, 230 ms

std::vector<SweepRow> sensitivity_sweep(const FrameLog& log, std::span<const double> window_ms,
                                        ModelKind kind, const SplitSpec& split,
                                        const FeatureSelection& selection = {},
                                        const GraphFeatureOptions& options = {},
                                        double label_threshold = kAnyAttack);
void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out,
                     std::span<const std::string> comments = {});

struct BenchCase {
  std::string name;
  ModelKind kind = ModelKind::Ggnb;
  std::vector<std::string> features;
};

struct BenchRow {
  std::string name;
  ModelKind kind = ModelKind::Ggnb;
  std::size_t feature_count = 0;
  double fit_seconds = 0;      // median
  double predict_seconds = 0;  // median, whole matrix
  double fit_relative = 0;     // to nine-feature GGNB
  double predict_relative = 0;
};

// ggnb (9 features), ggnb-top4, cnb, mnb.
std::vector<BenchCase> default_bench_cases(const FeatureMatrix& m);

// Median of `repeats` fit/predict wall times per case.
std::vector<BenchRow> benchmark(std::span<const BenchCase> cases, const FeatureMatrix& m,
                                std::size_t repeats = 5);
void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out,
                     std::span<const std::string> comments = {});

// Median wall time of fitting `kind` on `m`; each sample averages `inner` fits.
double median_fit_seconds(ModelKind kind, const FeatureMatrix& m, std::size_t repeats = 5,
                          std::size_t inner = 1);

}  // namespace canids
