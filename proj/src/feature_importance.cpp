#include "canids/feature_importance.hpp"

#include <numeric>

#include "canids/error.hpp"
#include "canids/random.hpp"

namespace canids {

double accuracy(const Model& model, const FeatureMatrix& m) {
  if (m.rows() == 0) throw InvalidArgument("accuracy of an empty matrix");
  const auto predictions = predict_all(model, m);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    correct += static_cast<std::uint8_t>(predictions[r].label) == m.label(r);
  return static_cast<double>(correct) / static_cast<double>(m.rows());
}

std::vector<double> feature_importance(const Model& model, const FeatureMatrix& m,
                                       std::size_t repeats, std::uint64_t seed) {
  if (m.rows() < 2) throw InvalidArgument("feature importance needs at least 2 rows");
  if (repeats < 1) throw InvalidArgument("repeats must be >= 1");
  const auto& names = feature_names(model);
  FeatureMatrix work = m.names() == names ? m : m.select_columns(names);
  const double baseline = accuracy(model, work);

  std::vector<double> importance(names.size(), 0.0);
  std::vector<std::size_t> perm(work.rows());
  for (std::size_t c = 0; c < names.size(); ++c) {
    Rng rng(mix_seed(seed, c));
    const auto original = work.column(c);
    double drop = 0.0;
    for (std::size_t rep = 0; rep < repeats; ++rep) {
      std::iota(perm.begin(), perm.end(), 0);
      shuffle(std::span<std::size_t>(perm), rng);
      for (std::size_t r = 0; r < work.rows(); ++r) work.at(r, c) = original[perm[r]];
      drop += baseline - accuracy(model, work);
    }
    for (std::size_t r = 0; r < work.rows(); ++r) work.at(r, c) = original[r];
    importance[c] = drop / static_cast<double>(repeats);
  }
  return importance;
}

}  // namespace canids
