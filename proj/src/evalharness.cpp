#include "canids/evalharness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "canids/error.hpp"
#include "canids/random.hpp"

namespace canids {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double ratio(std::size_t num, std::size_t den, bool& zero_division) {
  if (den == 0) {
    zero_division = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Split split_indices(const FeatureMatrix& m, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw InvalidArgument("train_fraction must lie in (0, 1)");
  const std::size_t n = m.rows();
  if (n < 2) throw InvalidArgument("split needs at least 2 rows");
  auto train_total = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
  train_total = std::clamp<std::size_t>(train_total, 1, n - 1);

  Rng rng(mix_seed(spec.seed, 0x5b1175));
  Split out;
  if (!spec.stratified) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    shuffle(std::span<std::size_t>(idx), rng);
    out.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(train_total));
    out.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(train_total), idx.end());
  } else {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t r = 0; r < n; ++r) by_class[m.label(r)].push_back(r);
    for (std::size_t c = 0; c < 2; ++c)
      if (by_class[c].size() < 2)
        throw DataError("stratified split needs at least 2 rows of each class");
    std::array<std::size_t, 2> quota{};
    std::array<double, 2> remainder{};
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < 2; ++c) {
      const double share = static_cast<double>(train_total) *
                           static_cast<double>(by_class[c].size()) / static_cast<double>(n);
      quota[c] = static_cast<std::size_t>(std::floor(share));
      remainder[c] = share - std::floor(share);
      assigned += quota[c];
    }
    while (assigned < train_total) {
      const std::size_t c = remainder[1] > remainder[0] ? 1 : 0;
      ++quota[c];
      remainder[c] = -1.0;
      ++assigned;
    }
    for (std::size_t c = 0; c < 2; ++c) {
      auto& idx = by_class[c];
      shuffle(std::span<std::size_t>(idx), rng);
      const auto q = static_cast<std::ptrdiff_t>(std::min(quota[c], idx.size()));
      out.train.insert(out.train.end(), idx.begin(), idx.begin() + q);
      out.test.insert(out.test.end(), idx.begin() + q, idx.end());
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

void ConfusionMatrix::add(bool actual_attacked, bool predicted_attacked) {
  if (actual_attacked) {
    ++(predicted_attacked ? tp : fn);
  } else {
    ++(predicted_attacked ? fp : tn);
  }
}

Metrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InvalidArgument("metrics of an empty confusion matrix");
  Metrics m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  m.precision = ratio(cm.tp, cm.tp + cm.fp, m.zero_division);
  m.recall = ratio(cm.tp, cm.tp + cm.fn, m.zero_division);
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.zero_division = true;
    m.f1 = 0.0;
  }
  return m;
}

FeatureSelection FeatureSelection::parse(const std::string& text) {
  FeatureSelection s;
  if (text == "all") return s;
  if (text.rfind("top", 0) == 0 && text.size() > 3 &&
      std::all_of(text.begin() + 3, text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    s.mode = Mode::TopK;
    s.k = std::stoul(text.substr(3));
    if (s.k < 1 || s.k > kFeatureCount)
      throw InvalidArgument("top-k selection needs 1 <= k <= 9");
    return s;
  }
  s.mode = Mode::List;
  std::stringstream ss(text);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (feature_index(name) == kFeatureCount)
      throw InvalidArgument("unknown feature '" + name + "'");
    if (std::find(s.names.begin(), s.names.end(), name) != s.names.end())
      throw InvalidArgument("feature '" + name + "' listed twice");
    s.names.push_back(name);
  }
  if (s.names.empty()) throw InvalidArgument("empty feature list");
  return s;
}

std::string FeatureSelection::to_string() const {
  switch (mode) {
    case Mode::All: return "all";
    case Mode::TopK: return "top" + std::to_string(k);
    case Mode::List: {
      std::string out;
      for (const auto& n : names) out += (out.empty() ? "" : ",") + n;
      return out;
    }
  }
  return "all";
}

std::vector<std::string> FeatureSelection::resolve(const FeatureMatrix& train) const {
  switch (mode) {
    case Mode::All: return train.names();
    case Mode::TopK: return select_features(correlation_matrix(train), k);
    case Mode::List: return names;
  }
  return train.names();
}

EvalReport evaluate(ModelKind kind, const FeatureMatrix& m, const SplitSpec& split,
                    const FeatureSelection& selection) {
  const Split parts = split_indices(m, split);
  const FeatureMatrix train_all = m.select_rows(parts.train);
  EvalReport report;
  report.model_kind = kind;
  report.split = split;
  report.features = selection.resolve(train_all);
  const FeatureMatrix train = train_all.select_columns(report.features);
  const FeatureMatrix test = m.select_rows(parts.test).select_columns(report.features);
  report.train_rows = train.rows();
  report.test_rows = test.rows();

  auto t0 = Clock::now();
  const Model model = fit_model(kind, train);
  report.fit_seconds = seconds_since(t0);
  t0 = Clock::now();
  report.predictions = predict_all(model, test);
  report.predict_seconds = seconds_since(t0);
  report.test_rows_index = parts.test;

  for (std::size_t r = 0; r < test.rows(); ++r) {
    const bool actual = test.label(r) == 1;
    const bool predicted = report.predictions[r].label == WindowLabel::Attacked;
    report.overall.add(actual, predicted);
  }
  // Per-kind matrices: attacked rows of that kind plus all attack-free rows.
  AttackMask seen = 0;
  for (std::size_t r = 0; r < test.rows(); ++r)
    if (test.label(r) == 1) seen |= test.attack_kinds(r);
  for (std::size_t k = 0; k < kAttackKindCount; ++k) {
    const auto kind_k = static_cast<AttackKind>(k);
    if (!(seen & attack_bit(kind_k))) continue;
    ConfusionMatrix cm;
    for (std::size_t r = 0; r < test.rows(); ++r) {
      const bool actual = test.label(r) == 1;
      if (actual && !(test.attack_kinds(r) & attack_bit(kind_k))) continue;
      cm.add(actual, report.predictions[r].label == WindowLabel::Attacked);
    }
    report.per_attack[kind_k] = cm;
  }
  report.overall_metrics = metrics(report.overall);
  return report;
}

std::string render_text(const EvalReport& report, bool include_timing) {
  std::ostringstream out;
  std::string features;
  for (const auto& f : report.features) features += (features.empty() ? "" : ",") + f;
  out << "model: " << to_string(report.model_kind) << '\n';
  out << "features: " << features << '\n';
  out << "split: train_fraction=" << fmt(report.split.train_fraction, "%g")
      << " seed=" << report.split.seed
      << " stratified=" << (report.split.stratified ? "true" : "false") << '\n';
  out << "rows: train=" << report.train_rows << " test=" << report.test_rows << '\n';
  auto matrix = [&](const std::string& title, const ConfusionMatrix& cm) {
    const Metrics mt = metrics(cm);
    char buf[256];
    out << '\n' << title << " (positive = attacked)\n";
    std::snprintf(buf, sizeof buf, "%-22s%12s%12s\n", "", "pred att", "pred free");
    out << buf;
    std::snprintf(buf, sizeof buf, "%-22s%12zu%12zu\n", "actual attacked", cm.tp, cm.fn);
    out << buf;
    std::snprintf(buf, sizeof buf, "%-22s%12zu%12zu\n", "actual attack-free", cm.fp, cm.tn);
    out << buf;
    out << "accuracy:  " << fmt(mt.accuracy) << '\n';
    out << "precision: " << fmt(mt.precision) << '\n';
    out << "recall:    " << fmt(mt.recall) << '\n';
    out << "f1:        " << fmt(mt.f1) << '\n';
    if (mt.zero_division) out << "note: a 0/0 ratio was reported as 0\n";
  };
  matrix("overall", report.overall);
  for (const auto& [kind, cm] : report.per_attack)
    matrix("attack " + std::string(to_string(kind)), cm);
  if (include_timing) {
    out << "\nfit_seconds: " << fmt(report.fit_seconds, "%.9f") << '\n';
    out << "predict_seconds: " << fmt(report.predict_seconds, "%.9f") << '\n';
  }
  return out.str();
}

void write_report_csv(const EvalReport& report, std::ostream& out,
                      std::span<const std::string> comments, bool include_timing) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "scope,tp,fp,tn,fn,accuracy,precision,recall,f1";
  if (include_timing) out << ",fit_seconds,predict_seconds";
  out << '\n';
  auto row = [&](const std::string& scope, const ConfusionMatrix& cm) {
    const Metrics mt = metrics(cm);
    out << scope << ',' << cm.tp << ',' << cm.fp << ',' << cm.tn << ',' << cm.fn << ','
        << fmt(mt.accuracy, "%.9g") << ',' << fmt(mt.precision, "%.9g") << ','
        << fmt(mt.recall, "%.9g") << ',' << fmt(mt.f1, "%.9g");
    if (include_timing)
      out << ',' << fmt(report.fit_seconds, "%.9g") << ',' << fmt(report.predict_seconds, "%.9g");
    out << '\n';
  };
  row("overall", report.overall);
  for (const auto& [kind, cm] : report.per_attack) row(std::string(to_string(kind)), cm);
}

std::vector<double> default_sweep_grid() { return {11.5, 23.0, 46.0, 115.0, 230.0}; }

std::vector<SweepRow> sensitivity_sweep(const FrameLog& log, std::span<const double> window_ms,
                                        ModelKind kind, const SplitSpec& split,
                                        const FeatureSelection& selection,
                                        const GraphFeatureOptions& options,
                                        double label_threshold) {
  std::vector<SweepRow> rows;
  for (double ms : window_ms) {
    WindowSpec spec;
    spec.mode = WindowMode::TimeMs;
    spec.size = ms;
    spec.label_threshold = label_threshold;
    const FeatureMatrix m = featurize_log(log, spec, options);
    const EvalReport report = evaluate(kind, m, split, selection);
    SweepRow row;
    row.window_ms = ms;
    row.windows = m.rows();
    row.accuracy = report.overall_metrics.accuracy;
    row.precision = report.overall_metrics.precision;
    row.recall = report.overall_metrics.recall;
    row.f1 = report.overall_metrics.f1;
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out,
                     std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "window_ms,windows,accuracy,precision,recall,f1\n";
  for (const auto& r : rows)
    out << fmt(r.window_ms, "%g") << ',' << r.windows << ',' << fmt(r.accuracy, "%.9g") << ','
        << fmt(r.precision, "%.9g") << ',' << fmt(r.recall, "%.9g") << ','
        << fmt(r.f1, "%.9g") << '\n';
}

std::vector<BenchCase> default_bench_cases(const FeatureMatrix& m) {
  FeatureSelection top4;
  top4.mode = FeatureSelection::Mode::TopK;
  top4.k = std::min<std::size_t>(4, m.cols());
  return {
      {"ggnb", ModelKind::Ggnb, m.names()},
      {"ggnb-top4", ModelKind::Ggnb, top4.resolve(m)},
      {"cnb", ModelKind::Cnb, m.names()},
      {"mnb", ModelKind::Mnb, m.names()},
  };
}

double median_fit_seconds(ModelKind kind, const FeatureMatrix& m, std::size_t repeats,
                          std::size_t inner) {
  std::vector<double> samples;
  for (std::size_t i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    for (std::size_t j = 0; j < inner; ++j) {
      const Model model = fit_model(kind, m);
      if (feature_names(model).empty()) throw DataError("fit produced no features");
    }
    samples.push_back(seconds_since(t0) / static_cast<double>(inner));
  }
  return median(samples);
}

std::vector<BenchRow> benchmark(std::span<const BenchCase> cases, const FeatureMatrix& m,
                                std::size_t repeats) {
  if (repeats < 1) throw InvalidArgument("repeats must be >= 1");
  std::vector<BenchRow> rows;
  for (const auto& c : cases) {
    const FeatureMatrix sub = m.select_columns(c.features);
    BenchRow row;
    row.name = c.name;
    row.kind = c.kind;
    row.feature_count = c.features.size();
    std::vector<double> fit, pred;
    for (std::size_t i = 0; i < repeats; ++i) {
      auto t0 = Clock::now();
      const Model model = fit_model(c.kind, sub);
      fit.push_back(seconds_since(t0));
      t0 = Clock::now();
      const auto p = predict_all(model, sub);
      pred.push_back(seconds_since(t0));
      if (p.size() != sub.rows()) throw DataError("prediction count mismatch");
    }
    row.fit_seconds = median(fit);
    row.predict_seconds = median(pred);
    rows.push_back(row);
  }
  // Normalize to the nine-feature GGNB row, or the first row when absent.
  const BenchRow* ref = rows.empty() ? nullptr : &rows.front();
  for (const auto& r : rows)
    if (r.kind == ModelKind::Ggnb && r.feature_count == kFeatureCount) {
      ref = &r;
      break;
    }
  if (ref) {
    const double fit_ref = ref->fit_seconds, pred_ref = ref->predict_seconds;
    for (auto& r : rows) {
      r.fit_relative = fit_ref > 0 ? r.fit_seconds / fit_ref : 0.0;
      r.predict_relative = pred_ref > 0 ? r.predict_seconds / pred_ref : 0.0;
    }
  }
  return rows;
}

void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out,
                     std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "name,model,features,fit_seconds,predict_seconds,fit_relative,predict_relative\n";
  for (const auto& r : rows)
    out << r.name << ',' << to_string(r.kind) << ',' << r.feature_count << ','
        << fmt(r.fit_seconds, "%.9g") << ',' << fmt(r.predict_seconds, "%.9g") << ','
        << fmt(r.fit_relative, "%.4f") << ',' << fmt(r.predict_relative, "%.4f") << '\n';
}

}  // namespace canids
