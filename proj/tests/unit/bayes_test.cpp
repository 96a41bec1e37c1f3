#include <cmath>
#include <numbers>
#include <sstream>

#include "canids/bayes.hpp"
#include "canids/error.hpp"
#include "canids/evalharness.hpp"
#include "canids/random.hpp"
#include "doctest.h"

using namespace canids;

namespace {

FeatureMatrix blobs(std::size_t n, std::uint64_t seed, std::size_t cols = 3) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < cols; ++c) names.push_back("f" + std::to_string(c));
  FeatureMatrix m(names);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t y = i % 2;
    std::vector<double> row(cols);
    for (std::size_t c = 0; c < cols; ++c)
      row[c] = uniform_real(rng, 0, 4) + (y ? 3.0 * double(c + 1) : 0.0);
    m.add_row(row, y);
  }
  return m;
}

GaussianNbModel symmetric() {
  GaussianNbModel g;
  g.feature_names = {"x"};
  g.priors = {0.5, 0.5};
  g.mean = {std::vector<double>{-2}, std::vector<double>{2}};
  g.var = {std::vector<double>{1}, std::vector<double>{1}};
  return g;
}

}  // namespace

TEST_CASE("gaussian fit") {
  SUBCASE("balanced split keeps priors near one half") {
    const auto m = blobs(1000, 4);
    const auto s = split_indices(m, {});
    const auto g = fit_gnb(m.select_rows(s.train));
    CHECK(std::abs(g.priors[0] - 0.5) <= 0.02);
    CHECK(std::abs(g.priors[1] - 0.5) <= 0.02);
  }
  SUBCASE("constant feature in one class gets the smoothing floor") {
    FeatureMatrix m(std::vector<std::string>{"x"});
    for (double x : {5.0, 5.0, 5.0}) m.add_row(std::vector<double>{x}, 0);
    for (double x : {1.0, 3.0}) m.add_row(std::vector<double>{x}, 1);
    const auto g = fit_gnb(m);
    // Column {5,5,5,1,3}: mean 3.8, population variance 2.56.
    CHECK(g.var[kAttackFree][0] == doctest::Approx(1e-9 * 2.56).epsilon(1e-12));
    CHECK(g.var[kAttackFree][0] > 0.0);
  }
  SUBCASE("all columns constant") {
    FeatureMatrix m(std::vector<std::string>{"x"});
    for (int i = 0; i < 4; ++i) m.add_row(std::vector<double>{1.0}, i % 2);
    const auto g = fit_gnb(m);
    CHECK(g.var[0][0] > 0.0);
    CHECK(std::isfinite(predict(g, std::vector<double>{1.0}).posterior_att));
  }
  SUBCASE("degenerate inputs") {
    FeatureMatrix m(std::vector<std::string>{"x"});
    for (int i = 0; i < 4; ++i) m.add_row(std::vector<double>{double(i)}, 1);
    CHECK_THROWS_AS(fit_gnb(m), DataError);
    m.add_row(std::vector<double>{9}, 0);
    CHECK_THROWS_AS(fit_gnb(m), DataError);
  }
}

TEST_CASE("log and direct paths agree") {
  const auto m = blobs(200, 8, 3);
  const auto g = fit_gnb(m);
  Rng rng(12);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x{uniform_real(rng, -1, 8), uniform_real(rng, -1, 11), uniform_real(rng, -1, 14)};
    for (std::size_t c = 0; c < 2; ++c) {
      double direct = g.priors[c];
      for (std::size_t i = 0; i < 3; ++i) {
        const double v = g.var[c][i];
        direct *= std::exp(-(x[i] - g.mean[c][i]) * (x[i] - g.mean[c][i]) / (2 * v)) /
                  std::sqrt(2 * std::numbers::pi * v);
      }
      if (direct < 1e-250) continue;
      const double via_log = std::exp(gnb_log_likelihood(g, x, c));
      CHECK(std::abs(via_log - direct) <= 1e-12 * direct);
    }
  }
}

TEST_CASE("irrelevant feature with identical moments cancels") {
  auto g = symmetric();
  const auto before = predict(g, std::vector<double>{0.7});
  g.feature_names.push_back("noise");
  g.mean[0].push_back(3);
  g.mean[1].push_back(3);
  g.var[0].push_back(2);
  g.var[1].push_back(2);
  const auto after = predict(g, std::vector<double>{0.7, -4});
  CHECK(after.label == before.label);
  CHECK(after.log_score_att - after.log_score_attfr ==
        doctest::Approx(before.log_score_att - before.log_score_attfr));
}

TEST_CASE("decision rule") {
  const auto mid = predict(symmetric(), std::vector<double>{0.0});
  CHECK(mid.posterior_att == doctest::Approx(0.5));
  CHECK(mid.label == WindowLabel::AttackFree);

  auto g = symmetric();
  g.mean = {std::vector<double>{0}, std::vector<double>{10}};
  const auto far = predict(g, std::vector<double>{10.0});
  CHECK(far.posterior_att > 0.999);
  CHECK(far.label == WindowLabel::Attacked);

  const auto huge = decide(-1e6, -1e6 - 50);
  CHECK(huge.label == WindowLabel::Attacked);
  CHECK(std::isfinite(huge.posterior_att));
  CHECK(huge.posterior_att == doctest::Approx(1.0));

  CHECK_THROWS_AS(predict(g, std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST_CASE("count models") {
  SUBCASE("heavier class wins on a matching vector") {
    FeatureMatrix m(std::vector<std::string>{"a", "b"});
    m.add_row(std::vector<double>{50, 1}, 1);
    m.add_row(std::vector<double>{40, 2}, 1);
    m.add_row(std::vector<double>{1, 30}, 0);
    m.add_row(std::vector<double>{2, 45}, 0);
    for (auto v : {CountVariant::Multinomial, CountVariant::Complement}) {
      const auto model = fit_count_nb(m, v);
      CHECK(predict_count(model, std::vector<double>{20, 1}).label == WindowLabel::Attacked);
      CHECK(predict_count(model, std::vector<double>{1, 20}).label == WindowLabel::AttackFree);
    }
  }
  SUBCASE("huge alpha leaves only the prior") {
    FeatureMatrix m(std::vector<std::string>{"a", "b"});
    m.add_row(std::vector<double>{50, 1}, 1);
    m.add_row(std::vector<double>{1, 30}, 0);
    m.add_row(std::vector<double>{2, 45}, 0);
    const auto model = fit_count_nb(m, CountVariant::Multinomial, 1e12);
    CHECK(model.log_weights[0][0] == doctest::Approx(model.log_weights[0][1]));
    CHECK(predict_count(model, std::vector<double>{50, 0}).label == WindowLabel::AttackFree);
  }
  SUBCASE("negative features are rejected") {
    FeatureMatrix m(std::vector<std::string>{"a"});
    m.add_row(std::vector<double>{-1}, 1);
    m.add_row(std::vector<double>{1}, 0);
    CHECK_THROWS_AS(fit_count_nb(m, CountVariant::Multinomial), DataError);
    CHECK_THROWS_AS(fit_count_nb(m, CountVariant::Complement, 0.0), InvalidArgument);
  }
}

TEST_CASE("model persistence round trip") {
  const auto m = blobs(300, 21);
  for (ModelKind kind : {ModelKind::Ggnb, ModelKind::Cnb, ModelKind::Mnb}) {
    CAPTURE(to_string(kind));
    const Model model = fit_model(kind, m);
    const std::string text = model_to_string(model);
    const Model back = model_from_string(text);
    CHECK(kind_of(back) == kind);
    CHECK(back == model);
    CHECK(model_to_string(back) == text);
    for (std::size_t r = 0; r < m.rows(); r += 7) {
      const auto a = predict(model, m.row(r));
      const auto b = predict(back, m.row(r));
      CHECK(a.label == b.label);
      CHECK(a.posterior_att == b.posterior_att);
    }
  }
}

TEST_CASE("model file errors") {
  CHECK_THROWS_AS(model_from_string(""), DataError);
  CHECK_THROWS_AS(model_from_string("[meta]\nformat = other\n"), ParseError);
  std::string text = model_to_string(fit_model(ModelKind::Ggnb, blobs(50, 2)));
  const auto at = text.find("mean.f1");
  REQUIRE(at != std::string::npos);
  text.replace(at, 7, "mean.zz");
  CHECK_THROWS_AS(model_from_string(text), ParseError);
  CHECK(parse_model_kind("cnb") == ModelKind::Cnb);
  CHECK_THROWS_AS(parse_model_kind("svm"), InvalidArgument);
}

TEST_CASE("predict by name from a full feature vector") {
  FeatureMatrix m;
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    std::array<double, kFeatureCount> row{};
    for (auto& e : row) e = uniform01(rng) + (i % 2) * 2.0;
    m.add_row(row, i % 2);
  }
  const std::vector<std::string> pick{"edges", "nodes"};
  const Model model = fit_model(ModelKind::Ggnb, m.select_columns(pick));
  FeatureVector v;
  v.edges = 2.5;
  v.nodes = 2.5;
  CHECK(predict(model, v).label == WindowLabel::Attacked);
  const auto all = predict_all(model, m);
  REQUIRE(all.size() == 100);
  CHECK(all[1].label == WindowLabel::Attacked);
}
