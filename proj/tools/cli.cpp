#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "canids/bayes.hpp"
#include "canids/error.hpp"
#include "canids/evalharness.hpp"
#include "canids/feature_importance.hpp"
#include "canids/featurize.hpp"
#include "canids/scenario.hpp"

namespace canids::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v, const char* spec = "%g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Writes through a sibling temp file and renames, so readers never see a
// half-written output. An empty path or "-" means `fallback`.
void write_output(const std::string& path, std::ostream& fallback,
                  const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  const fs::path target(path);
  if (target.has_parent_path() && !fs::exists(target.parent_path()))
    throw DataError("output directory does not exist: " + target.parent_path().string());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    body(out);
    out.flush();
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw CLI::RequiredError(flag);
  if (!fs::is_regular_file(path)) throw DataError(flag + " file not found: " + path);
}

struct Common {
  std::string in;
  std::string out;
  std::uint64_t seed = 7;
  double split = 0.67;
  bool unstratified = false;
  std::string model = "ggnb";
  std::string features;  // feature file or selection, see resolve_features()
  std::string select;

  SplitSpec split_spec() const { return {split, seed, !unstratified}; }
};

bool is_selection(const std::string& text) {
  try {
    FeatureSelection::parse(text);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

// `--features` names either the feature CSV or a column selection
// (all | top<k> | name,name,...). Returns (input path, selection).
std::pair<std::string, FeatureSelection> resolve_features(const Common& c) {
  std::string path = c.in;
  std::string selection = c.select;
  if (!c.features.empty()) {
    if (is_selection(c.features)) {
      if (!selection.empty() && selection != c.features)
        throw CLI::ValidationError("--features", "selection given twice");
      selection = c.features;
    } else {
      if (!path.empty() && path != c.features)
        throw CLI::ValidationError("--features", "input given by both --in and --features");
      path = c.features;
    }
  }
  require_file(path, "--features/--in");
  return {path, FeatureSelection::parse(selection.empty() ? "all" : selection)};
}

std::vector<std::string> echo(const std::string& command,
                              std::initializer_list<std::pair<std::string, std::string>> kv) {
  std::vector<std::string> lines{"canids " + command};
  for (const auto& [k, v] : kv) lines.push_back(k + "=" + v);
  return lines;
}

void add_split_options(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  app->add_option("--split", c.split, "training fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app->add_flag("--unstratified", c.unstratified, "plain shuffled split");
}

void add_model_options(CLI::App* app, Common& c) {
  app->add_option("--model", c.model, "ggnb | cnb | mnb")
      ->check(CLI::IsMember({"ggnb", "cnb", "mnb"}))
      ->capture_default_str();
  app->add_option("--features", c.features, "feature CSV, or all | top<k> | name,name,...");
  app->add_option("--select", c.select, "all | top<k> | name,name,...");
}

void write_predictions(std::ostream& out, const FeatureMatrix& m,
                       std::span<const std::size_t> rows, std::span<const Prediction> preds,
                       std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "window_index,label,predicted,posterior_att\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    out << m.window_index(r) << ',' << static_cast<int>(m.label(r)) << ','
        << static_cast<int>(preds[i].label) << ',' << fmt(preds[i].posterior_att, "%.9g") << '\n';
  }
}

char shade(double r) {
  const double a = std::abs(r);
  if (a >= 0.8) return '#';
  if (a >= 0.6) return '*';
  if (a >= 0.4) return '+';
  if (a >= 0.2) return ':';
  return '.';
}

std::string short_name(const std::string& n) {
  static const std::map<std::string, std::string> abbrev = {
      {"nodes", "nodes"},      {"edges", "edges"},      {"max_indegree", "maxIn"},
      {"max_outdegree", "maxOut"}, {"min_indegree", "minIn"}, {"min_outdegree", "minOut"},
      {"median_pagerank", "medPR"}, {"max_pagerank", "maxPR"}, {"min_pagerank", "minPR"},
      {"label", "label"}};
  const auto it = abbrev.find(n);
  return it == abbrev.end() ? n : it->second;
}

std::string correlation_text(const CorrelationMatrix& corr) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-8s", "");
  out << buf;
  for (const auto& n : corr.names()) {
    std::snprintf(buf, sizeof buf, "%8s", short_name(n).c_str());
    out << buf;
  }
  out << '\n';
  for (std::size_t i = 0; i < corr.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%-8s", short_name(corr.names()[i]).c_str());
    out << buf;
    for (std::size_t j = 0; j < corr.size(); ++j) {
      std::snprintf(buf, sizeof buf, " %6.2f%c", corr.at(i, j), shade(corr.at(i, j)));
      out << buf;
    }
    out << '\n';
  }
  out << "shade: # |r|>=0.8  * >=0.6  + >=0.4  : >=0.2  . below\n";
  return out.str();
}

int cmd_synth(const Common& c, const std::string& scenario_path, const std::string& attack,
              bool seed_given, std::ostream& out) {
  Scenario s;
  if (!attack.empty()) {
    if (attack == "mixed") {
      s = mixed_scenario(c.seed);
    } else {
      const auto kind = parse_attack_kind(attack);
      if (!kind) throw CLI::ValidationError("--attack", "unknown attack kind '" + attack + "'");
      s = single_attack_scenario(*kind, c.seed);
    }
    seed_given = false;
  } else if (!scenario_path.empty()) {
    require_file(scenario_path, "--scenario");
    s = read_scenario_file(scenario_path);
  }
  if (seed_given) {
    s.baseline.seed = c.seed;
    for (std::size_t i = 0; i < s.attacks.size(); ++i) s.attacks[i].seed = c.seed + i;
  }
  const FrameLog log = run_scenario(s);
  const std::string source = !attack.empty()          ? "attack:" + attack
                             : scenario_path.empty() ? std::string("default")
                                                     : scenario_path;
  const auto comments = echo("synth", {{"scenario", source},
                                       {"seed", std::to_string(s.baseline.seed)},
                                       {"frames", std::to_string(log.size())}});
  write_output(c.out, out, [&](std::ostream& o) { write_dataset_csv(log, o, comments); });
  return kOk;
}

int cmd_inject(const Common& c, const std::string& scenario_path, std::ostream& out) {
  require_file(c.in, "--in");
  require_file(scenario_path, "--scenario");
  const Scenario s = read_scenario_file(scenario_path);
  const FrameLog log = mix_attacks(read_log_file(c.in), s.attacks);
  const auto comments = echo("inject", {{"in", c.in}, {"scenario", scenario_path},
                                        {"attacks", std::to_string(s.attacks.size())}});
  write_output(c.out, out, [&](std::ostream& o) { write_dataset_csv(log, o, comments); });
  return kOk;
}

struct FeaturizeFlags {
  double window_ms = 23.0;
  std::size_t window_frames = 0;
  double damping = 1.0;
  std::string edge_mode = "simple";
  double label_threshold = kAnyAttack;
};

std::pair<WindowSpec, GraphFeatureOptions> featurize_config(const FeaturizeFlags& f) {
  WindowSpec spec;
  if (f.window_frames > 0) {
    spec.mode = WindowMode::FrameCount;
    spec.size = static_cast<double>(f.window_frames);
  } else {
    spec.size = f.window_ms;
  }
  spec.label_threshold = f.label_threshold;
  GraphFeatureOptions options;
  options.edge_mode = f.edge_mode == "multigraph" ? EdgeMode::Multigraph : EdgeMode::Simple;
  options.pagerank.damping = f.damping;
  return {spec, options};
}

int cmd_featurize(const Common& c, const FeaturizeFlags& f, std::ostream& out) {
  require_file(c.in, "--in");
  const auto [spec, options] = featurize_config(f);
  const FeatureMatrix m = featurize_log(read_log_file(c.in), spec, options);
  const auto comments = echo(
      "featurize",
      {{"in", c.in},
       {"window", spec.mode == WindowMode::TimeMs ? fmt(spec.size) + "ms" : fmt(spec.size) + "frames"},
       {"damping", fmt(f.damping)},
       {"edge_mode", f.edge_mode},
       {"label_threshold", fmt(f.label_threshold)},
       {"windows", std::to_string(m.rows())}});
  write_output(c.out, out, [&](std::ostream& o) { write_feature_csv(m, o, comments); });
  return kOk;
}

int cmd_train(const Common& c, bool all_rows, std::ostream& out) {
  const auto [path, selection] = resolve_features(c);
  const FeatureMatrix m = read_feature_file(path);
  FeatureMatrix train = m;
  if (!all_rows) {
    const Split parts = split_indices(m, c.split_spec());
    train = m.select_rows(parts.train);
  }
  const auto names = selection.resolve(train);
  const Model model = fit_model(parse_model_kind(c.model), train.select_columns(names));
  const auto comments =
      echo("train", {{"features", path}, {"model", c.model}, {"select", selection.to_string()},
                     {"seed", std::to_string(c.seed)}, {"split", all_rows ? "all-rows" : fmt(c.split)},
                     {"stratified", c.unstratified ? "false" : "true"},
                     {"train_rows", std::to_string(train.rows())}});
  write_output(c.out, out, [&](std::ostream& o) { save_model(model, o, comments); });
  return kOk;
}

int cmd_predict(const Common& c, const std::string& model_path, const std::string& fold,
                std::ostream& out) {
  const auto [path, selection] = resolve_features(c);
  (void)selection;
  require_file(model_path, "--model-file");
  std::ifstream model_in(model_path);
  const Model model = load_model(model_in);
  const FeatureMatrix m = read_feature_file(path);
  std::vector<std::size_t> rows;
  if (fold == "test") {
    rows = split_indices(m, c.split_spec()).test;
  } else {
    rows.resize(m.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  }
  const auto preds = predict_all(model, m.select_rows(rows));
  const auto comments = echo("predict", {{"features", path}, {"model_file", model_path},
                                         {"fold", fold}, {"seed", std::to_string(c.seed)},
                                         {"split", fmt(c.split)}});
  write_output(c.out, out,
               [&](std::ostream& o) { write_predictions(o, m, rows, preds, comments); });
  return kOk;
}

struct EvaluateFlags {
  std::string csv;
  std::string predictions;
  bool timing = false;
};

int cmd_evaluate(const Common& c, const EvaluateFlags& e, std::ostream& out) {
  const auto [path, selection] = resolve_features(c);
  const FeatureMatrix m = read_feature_file(path);
  const EvalReport report = evaluate(parse_model_kind(c.model), m, c.split_spec(), selection);
  const auto comments =
      echo("evaluate", {{"features", path}, {"model", c.model}, {"select", selection.to_string()},
                        {"seed", std::to_string(c.seed)}, {"split", fmt(c.split)},
                        {"stratified", c.unstratified ? "false" : "true"}});
  write_output(c.out, out, [&](std::ostream& o) {
    for (const auto& line : comments) o << "# " << line << '\n';
    o << render_text(report, e.timing);
  });
  if (!e.csv.empty())
    write_output(e.csv, out,
                 [&](std::ostream& o) { write_report_csv(report, o, comments, e.timing); });
  if (!e.predictions.empty())
    write_output(e.predictions, out, [&](std::ostream& o) {
      write_predictions(o, m, report.test_rows_index, report.predictions, comments);
    });
  return kOk;
}

int cmd_sweep(const Common& c, const FeaturizeFlags& f, const std::vector<double>& grid,
              std::ostream& out) {
  require_file(c.in, "--in");
  const FeatureSelection selection = FeatureSelection::parse(
      !c.select.empty() ? c.select : (c.features.empty() ? "all" : c.features));
  const auto [spec, options] = featurize_config(f);
  const auto rows = sensitivity_sweep(read_log_file(c.in), grid, parse_model_kind(c.model),
                                      c.split_spec(), selection, options, spec.label_threshold);
  std::string grid_text;
  for (double g : grid) grid_text += (grid_text.empty() ? "" : ",") + fmt(g);
  const auto comments = echo("sweep", {{"in", c.in}, {"grid", grid_text},
                                       {"damping", fmt(f.damping)},
                                       {"edge_mode", f.edge_mode},
                                       {"label_threshold", fmt(f.label_threshold)},
                                       {"model", c.model},
                                       {"select", selection.to_string()},
                                       {"seed", std::to_string(c.seed)}, {"split", fmt(c.split)}});
  write_output(c.out, out, [&](std::ostream& o) { write_sweep_csv(rows, o, comments); });
  return kOk;
}

int cmd_bench(const Common& c, std::size_t repeats, std::ostream& out) {
  const auto [path, selection] = resolve_features(c);
  (void)selection;
  const FeatureMatrix m = read_feature_file(path);
  const auto cases = default_bench_cases(m);
  const auto rows = benchmark(cases, m, repeats);
  const auto comments = echo("bench", {{"features", path}, {"repeats", std::to_string(repeats)},
                                       {"rows", std::to_string(m.rows())}});
  write_output(c.out, out, [&](std::ostream& o) { write_bench_csv(rows, o, comments); });
  return kOk;
}

int cmd_report(const Common& c, std::size_t repeats, std::ostream& out) {
  const auto [path, selection] = resolve_features(c);
  const FeatureMatrix m = read_feature_file(path);
  const ModelKind kind = parse_model_kind(c.model);
  const EvalReport report = evaluate(kind, m, c.split_spec(), selection);
  const CorrelationMatrix corr = correlation_matrix(m);
  const FeatureMatrix q = quantile_transform(m);

  const Split parts = split_indices(m, c.split_spec());
  const FeatureMatrix train = m.select_rows(parts.train).select_columns(report.features);
  const FeatureMatrix test = m.select_rows(parts.test).select_columns(report.features);
  const Model model = fit_model(kind, train);
  const auto importance = feature_importance(model, test, repeats, c.seed);

  const auto comments =
      echo("report", {{"features", path}, {"model", c.model}, {"select", selection.to_string()},
                      {"seed", std::to_string(c.seed)}, {"split", fmt(c.split)},
                      {"repeats", std::to_string(repeats)}});

  // Per-class moments of the quantile-transformed features, with the μ±3σ band.
  struct ClassStats {
    double mean, sd;
  };
  auto stats = [&](std::size_t col, std::uint8_t label) {
    double s = 0, s2 = 0, n = 0;
    for (std::size_t r = 0; r < q.rows(); ++r) {
      if (q.label(r) != label) continue;
      s += q.at(r, col);
      s2 += q.at(r, col) * q.at(r, col);
      ++n;
    }
    if (n == 0) return ClassStats{0, 0};
    const double mean = s / n;
    return ClassStats{mean, std::sqrt(std::max(0.0, s2 / n - mean * mean))};
  };

  const fs::path dir = c.out.empty() ? fs::path() : fs::path(c.out);
  if (!dir.empty()) fs::create_directories(dir);
  auto target = [&](const std::string& name) { return dir.empty() ? std::string() : (dir / name).string(); };

  std::ostringstream text;
  for (const auto& line : comments) text << "# " << line << '\n';
  text << "== evaluation ==\n" << render_text(report) << '\n';
  text << "== correlation matrix (Pearson r) ==\n" << correlation_text(corr) << '\n';
  text << "== features ranked by |r(feature, label)| ==\n";
  const auto ranked = select_features(corr, m.cols());
  for (std::size_t i = 0; i < ranked.size(); ++i)
    text << (i + 1) << ". " << ranked[i] << "  r=" << fmt(corr.with_label(m.column_index(ranked[i])), "%.4f") << '\n';
  text << "\n== permutation importance (test fold, " << repeats << " repeats) ==\n";
  for (std::size_t i = 0; i < importance.size(); ++i)
    text << report.features[i] << ": " << fmt(importance[i], "%.6f") << '\n';
  text << "\n== quantile-transformed class moments ==\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-16s %10s %10s %10s %10s %10s\n", "feature", "att mean",
                "att sd", "free mean", "free sd", "mean diff");
  text << buf;
  for (std::size_t col = 0; col < q.cols(); ++col) {
    const auto a = stats(col, 1), f = stats(col, 0);
    std::snprintf(buf, sizeof buf, "%-16s %10.4f %10.4f %10.4f %10.4f %10.4f\n",
                  q.names()[col].c_str(), a.mean, a.sd, f.mean, f.sd, a.mean - f.mean);
    text << buf;
  }
  write_output(target("report.txt"), out, [&](std::ostream& o) { o << text.str(); });
  if (dir.empty()) return kOk;

  write_output(target("evaluation.csv"), out,
               [&](std::ostream& o) { write_report_csv(report, o, comments); });
  write_output(target("correlation.csv"), out, [&](std::ostream& o) {
    for (const auto& line : comments) o << "# " << line << '\n';
    o << "feature";
    for (const auto& n : corr.names()) o << ',' << n;
    o << '\n';
    for (std::size_t i = 0; i < corr.size(); ++i) {
      o << corr.names()[i];
      for (std::size_t j = 0; j < corr.size(); ++j) o << ',' << fmt(corr.at(i, j), "%.9g");
      o << '\n';
    }
  });
  write_output(target("importance.csv"), out, [&](std::ostream& o) {
    for (const auto& line : comments) o << "# " << line << '\n';
    o << "feature,importance\n";
    for (std::size_t i = 0; i < importance.size(); ++i)
      o << report.features[i] << ',' << fmt(importance[i], "%.9g") << '\n';
  });
  write_output(target("quantile.csv"), out, [&](std::ostream& o) {
    for (const auto& line : comments) o << "# " << line << '\n';
    o << "feature,class,mean,sd,band_lo,band_hi\n";
    for (std::size_t col = 0; col < q.cols(); ++col)
      for (std::uint8_t label : {std::uint8_t{1}, std::uint8_t{0}}) {
        const auto s = stats(col, label);
        o << q.names()[col] << ',' << (label ? "attacked" : "attackfree") << ','
          << fmt(s.mean, "%.9g") << ',' << fmt(s.sd, "%.9g") << ','
          << fmt(s.mean - 3 * s.sd, "%.9g") << ',' << fmt(s.mean + 3 * s.sd, "%.9g") << '\n';
      }
  });
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"CAN bus intrusion detection with message-ID graphs and naive Bayes", "canids"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common c;
  FeaturizeFlags ff;
  EvaluateFlags ef;
  std::string scenario;
  std::string attack;
  std::string model_file;
  std::string fold = "all";
  std::vector<double> grid = default_sweep_grid();
  std::size_t repeats = 5;
  bool all_rows = false;

  auto add_io = [&](CLI::App* sub, bool needs_in) {
    auto* in = sub->add_option("--in", c.in, "input file");
    if (needs_in) in->required();
    sub->add_option("--out", c.out, "output path (default stdout)");
  };
  auto add_featurize = [&](CLI::App* sub, bool window_size) {
    // sweep takes its sizes from --grid
    if (window_size) {
      auto* ms = sub->add_option("--window-ms", ff.window_ms, "time window in ms")
                     ->check(CLI::PositiveNumber)
                     ->capture_default_str();
      auto* frames = sub->add_option("--window-frames", ff.window_frames, "frame-count window")
                         ->check(CLI::PositiveNumber);
      ms->excludes(frames);
    }
    sub->add_option("--damping", ff.damping, "PageRank damping in (0,1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sub->add_option("--edge-mode", ff.edge_mode, "simple | multigraph")
        ->check(CLI::IsMember({"simple", "multigraph"}))
        ->capture_default_str();
    sub->add_option("--label-threshold", ff.label_threshold,
                    "attacked fraction needed to label a window (default: any)")
        ->check(CLI::Range(0.0, 1.0));
  };

  auto* synth = app.add_subcommand("synth", "generate baseline traffic with scenario attacks");
  synth->add_option("--scenario", scenario, "scenario JSON (default: baseline only)");
  auto* synth_attack =
      synth->add_option("--attack", attack, "standard corpus: an attack kind or 'mixed'");
  synth_attack->excludes(synth->get_option("--scenario"));
  auto* synth_seed = synth->add_option("--seed", c.seed, "override the scenario seed");
  synth->add_option("--out", c.out, "output CSV")->required();

  auto* inject = app.add_subcommand("inject", "apply scenario attacks to an existing log");
  add_io(inject, true);
  inject->add_option("--scenario", scenario, "scenario JSON with attacks")->required();

  auto* featurize = app.add_subcommand("featurize", "window a log and extract graph features");
  add_io(featurize, true);
  add_featurize(featurize, true);

  auto* train = app.add_subcommand("train", "fit a detector on the training fold");
  add_io(train, false);
  add_model_options(train, c);
  add_split_options(train, c);
  train->add_flag("--all-rows", all_rows, "fit on every row instead of the training fold");

  auto* predict = app.add_subcommand("predict", "score feature rows with a saved model");
  add_io(predict, false);
  predict->add_option("--features", c.features, "feature CSV");
  predict->add_option("--model-file", model_file, "saved model")->required();
  predict->add_option("--fold", fold, "all | test")
      ->check(CLI::IsMember({"all", "test"}))
      ->capture_default_str();
  add_split_options(predict, c);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "train/test split evaluation");
  add_io(evaluate_cmd, false);
  add_model_options(evaluate_cmd, c);
  add_split_options(evaluate_cmd, c);
  evaluate_cmd->add_option("--csv", ef.csv, "also write the report as CSV");
  evaluate_cmd->add_option("--predictions", ef.predictions, "write test-fold predictions");
  evaluate_cmd->add_flag("--timing", ef.timing, "include wall-clock timings");

  auto* sweep = app.add_subcommand("sweep", "window-size sensitivity sweep over a log");
  add_io(sweep, true);
  add_model_options(sweep, c);
  add_split_options(sweep, c);
  add_featurize(sweep, false);
  sweep->add_option("--grid", grid, "window sizes in ms")->delimiter(',')->capture_default_str();

  auto* bench = app.add_subcommand("bench", "fit/predict timing table");
  add_io(bench, false);
  bench->add_option("--features", c.features, "feature CSV");
  bench->add_option("--repeats", repeats, "timing repeats (median)")->capture_default_str();

  auto* report = app.add_subcommand("report", "correlation, importance and quantile analysis");
  add_io(report, false);
  add_model_options(report, c);
  add_split_options(report, c);
  report->add_option("--repeats", repeats, "permutation repeats")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*synth) return cmd_synth(c, scenario, attack, synth_seed->count() > 0, out);
    if (*inject) return cmd_inject(c, scenario, out);
    if (*featurize) return cmd_featurize(c, ff, out);
    if (*train) return cmd_train(c, all_rows, out);
    if (*predict) return cmd_predict(c, model_file, fold, out);
    if (*evaluate_cmd) return cmd_evaluate(c, ef, out);
    if (*sweep) return cmd_sweep(c, ff, grid, out);
    if (*bench) return cmd_bench(c, repeats, out);
    if (*report) return cmd_report(c, repeats, out);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace canids::cli
