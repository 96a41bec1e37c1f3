#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "canids/featurize.hpp"

namespace canids {

enum class ModelKind : std::uint8_t { Ggnb, Cnb, Mnb };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);  // "ggnb", "cnb", "mnb"

// Class slots are indexed by label value: 0 = attack free, 1 = attacked.
inline constexpr std::size_t kAttackFree = 0;
inline constexpr std::size_t kAttacked = 1;

struct GaussianNbModel {
  std::vector<std::string> feature_names;
  std::array<double, 2> priors{};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> var;  // smoothing already applied
  double variance_smoothing = 1e-9;
  double epsilon = 0.0;  // absolute amount added to every variance

  friend bool operator==(const GaussianNbModel&, const GaussianNbModel&) = default;
};

enum class CountVariant : std::uint8_t { Multinomial, Complement };

struct CountNbModel {
  CountVariant variant = CountVariant::Multinomial;
  std::vector<std::string> feature_names;
  std::array<double, 2> priors{};
  double alpha = 1.0;
  std::array<std::vector<double>, 2> feature_mass;  // per-class column sums
  // Multinomial: log P(feature | class). Complement: log P(feature | other
  // classes), subtracted at scoring time.
  std::array<std::vector<double>, 2> log_weights;

  friend bool operator==(const CountNbModel&, const CountNbModel&) = default;
};

using Model = std::variant<GaussianNbModel, CountNbModel>;

struct Prediction {
  WindowLabel label = WindowLabel::AttackFree;
  double log_score_att = 0.0;
  double log_score_attfr = 0.0;
  double posterior_att = 0.0;
};

// Needs both classes with >= 2 rows each. Variances are population
// variances plus variance_smoothing * (largest per-feature variance of the
// whole matrix).
GaussianNbModel fit_gnb(const FeatureMatrix& m, double variance_smoothing = 1e-9);

// log P(class) + sum_i log N(x_i; mean, var).
double gnb_log_likelihood(const GaussianNbModel& model, std::span<const double> x,
                          std::size_t cls);

Prediction predict(const GaussianNbModel& model, std::span<const double> x);

// Features must be non-negative.
CountNbModel fit_count_nb(const FeatureMatrix& m, CountVariant variant, double alpha = 1.0);
double count_log_score(const CountNbModel& model, std::span<const double> x, std::size_t cls);
Prediction predict_count(const CountNbModel& model, std::span<const double> x);

// Attacked iff att > attfr; the posterior is computed from the max-shifted
// exponentials so it stays finite for any pair of log scores.
Prediction decide(double log_score_att, double log_score_attfr);

ModelKind kind_of(const Model& model);
const std::vector<std::string>& feature_names(const Model& model);

Model fit_model(ModelKind kind, const FeatureMatrix& m);
Prediction predict(const Model& model, std::span<const double> x);
// Picks the model's features out of a full FeatureVector.
Prediction predict(const Model& model, const FeatureVector& v);
// `m` must carry the model's columns (extra columns are ignored).
std::vector<Prediction> predict_all(const Model& model, const FeatureMatrix& m);

// Versioned text document with [meta], [priors], [class.attacked] and
// [class.attackfree] sections. Reals are written with 17 significant digits.
void save_model(const Model& model, std::ostream& out,
                std::span<const std::string> comments = {});
Model load_model(std::istream& in);
std::string model_to_string(const Model& model);
Model model_from_string(std::string_view text);

}  // namespace canids
