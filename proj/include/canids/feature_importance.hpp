#pragma once

#include <cstdint>
#include <vector>

#include "canids/bayes.hpp"

namespace canids {

// Accuracy of `model` on the labelled rows of `m`.
double accuracy(const Model& model, const FeatureMatrix& m);

// Permutation importance: mean accuracy drop over `repeats` shuffles of each
// model feature column, labels untouched. Aligned with feature_names(model).
std::vector<double> feature_importance(const Model& model, const FeatureMatrix& m,
                                       std::size_t repeats = 10, std::uint64_t seed = 7);

}  // namespace canids
