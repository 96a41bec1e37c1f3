#include <algorithm>
#include <set>
#include <sstream>

#include "canids/error.hpp"
#include "canids/evalharness.hpp"
#include "canids/random.hpp"
#include "canids/scenario.hpp"
#include "doctest.h"

using namespace canids;

namespace {

FeatureMatrix labelled(std::size_t pos, std::size_t neg) {
  FeatureMatrix m(std::vector<std::string>{"x"});
  for (std::size_t i = 0; i < pos + neg; ++i) m.add_row(std::vector<double>{double(i)}, i < pos ? 1 : 0);
  return m;
}

}  // namespace

TEST_CASE("metrics conventions") {
  ConfusionMatrix perfect;
  perfect.tp = 10;
  perfect.tn = 5;
  const auto p = metrics(perfect);
  CHECK(p.accuracy == 1.0);
  CHECK(p.precision == 1.0);
  CHECK(p.recall == 1.0);
  CHECK(p.f1 == 1.0);

  ConfusionMatrix silent;
  silent.fn = 4;
  silent.tn = 6;
  const auto s = metrics(silent);
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);
  CHECK(s.f1 == 0.0);
  CHECK(s.zero_division);
  CHECK(s.accuracy == doctest::Approx(0.6));

  CHECK_THROWS_AS(metrics(ConfusionMatrix{}), InvalidArgument);

  ConfusionMatrix cm;
  cm.add(true, true);
  cm.add(true, false);
  cm.add(false, true);
  cm.add(false, false);
  CHECK(cm == ConfusionMatrix{1, 1, 1, 1});
}

TEST_CASE("split") {
  SUBCASE("stratified shares") {
    const auto m = labelled(30, 70);
    const auto s = split_indices(m, {});
    CHECK(s.train.size() == 67);
    std::size_t pos = 0;
    for (auto r : s.train) pos += m.label(r);
    CHECK(pos == 20);
    std::vector<std::size_t> all(s.train);
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 100; ++i) CHECK(all[i] == i);
    CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  }
  SUBCASE("seeded") {
    const auto m = labelled(50, 50);
    CHECK(split_indices(m, {}).train == split_indices(m, {}).train);
    CHECK(split_indices(m, {0.67, 8, true}).train != split_indices(m, {}).train);
    CHECK(split_indices(m, {0.67, 7, false}).train.size() == 67);
  }
  SUBCASE("bad fractions") {
    const auto m = labelled(5, 5);
    CHECK_THROWS_AS(split_indices(m, {0.0, 7, true}), InvalidArgument);
    CHECK_THROWS_AS(split_indices(m, {1.0, 7, true}), InvalidArgument);
  }
}

TEST_CASE("feature selection parsing") {
  CHECK(FeatureSelection::parse("all").mode == FeatureSelection::Mode::All);
  const auto top = FeatureSelection::parse("top4");
  CHECK(top.mode == FeatureSelection::Mode::TopK);
  CHECK(top.k == 4);
  CHECK(top.to_string() == "top4");
  const auto list = FeatureSelection::parse("edges,nodes");
  CHECK(list.names == std::vector<std::string>{"edges", "nodes"});
  CHECK_THROWS_AS(FeatureSelection::parse("top0"), InvalidArgument);
  CHECK_THROWS_AS(FeatureSelection::parse("edges,zzz").resolve(FeatureMatrix{}), InvalidArgument);
}

TEST_CASE("evaluate on a synthetic corpus") {
  Scenario s = single_attack_scenario(AttackKind::DoS);
  s.baseline.duration = 20;
  s.attacks[0].start = 5;
  s.attacks[0].end = 12;
  const auto m = featurize_log(run_scenario(s), {});
  const auto r = evaluate(ModelKind::Ggnb, m, {});
  CHECK(r.train_rows + r.test_rows == m.rows());
  CHECK(r.overall.total() == r.test_rows);
  CHECK(r.predictions.size() == r.test_rows);
  CHECK(r.overall_metrics.accuracy > 0.97);
  REQUIRE(r.per_attack.count(AttackKind::DoS) == 1);
  CHECK(r.features.size() == kFeatureCount);

  const auto text = render_text(r);
  CHECK(text.find("accuracy:") != std::string::npos);
  CHECK(text.find("seconds") == std::string::npos);
  CHECK(render_text(r, true).find("seconds") != std::string::npos);
  CHECK(render_text(evaluate(ModelKind::Ggnb, m, {})) == text);

  const auto top = evaluate(ModelKind::Ggnb, m, {}, FeatureSelection::parse("top4"));
  CHECK(top.features.size() == 4);
  for (ModelKind k : {ModelKind::Cnb, ModelKind::Mnb}) CHECK(evaluate(k, m, {}).test_rows == r.test_rows);

  std::ostringstream csv;
  write_report_csv(r, csv);
  CHECK(csv.str().find("overall") != std::string::npos);
}

TEST_CASE("sweep and bench") {
  Scenario s = single_attack_scenario(AttackKind::FuzzingId);
  s.baseline.duration = 10;
  s.attacks[0].start = 3;
  s.attacks[0].end = 6;
  const auto log = run_scenario(s);
  const std::vector<double> grid{11.5, 23, 46};
  const auto rows = sensitivity_sweep(log, grid, ModelKind::Ggnb, {});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].windows > rows[1].windows);
  CHECK(rows[1].windows > rows[2].windows);
  CHECK(default_sweep_grid() == std::vector<double>{11.5, 23, 46, 115, 230});

  // Each row must equal a plain featurize + evaluate at that size, threshold included.
  WindowSpec half;
  half.size = 23;
  half.label_threshold = 0.2;
  const auto direct = evaluate(ModelKind::Ggnb, featurize_log(log, half), {});
  const auto swept = sensitivity_sweep(log, grid, ModelKind::Ggnb, {}, {}, {}, 0.2);
  CHECK(swept[1].accuracy == direct.overall_metrics.accuracy);
  CHECK(swept[1].f1 == direct.overall_metrics.f1);

  const auto m = featurize_log(log, {});
  const auto cases = default_bench_cases(m);
  REQUIRE(cases.size() == 4);
  CHECK(cases[1].features.size() == 4);
  const auto bench = benchmark(cases, m, 3);
  CHECK(bench[0].fit_relative == doctest::Approx(1.0));
  CHECK(median_fit_seconds(ModelKind::Ggnb, m, 3, 2) > 0.0);
}
