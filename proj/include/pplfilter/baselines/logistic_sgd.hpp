#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "pplfilter/baselines/common.hpp"

namespace pplfilter {

// P(Harmful | x) = sigmoid(w . x + bias).
struct LogisticModel {
  std::vector<double> weights;
  double bias = 0;

  double margin(const SparseVector& x) const;
  double probability_harmful(const SparseVector& x) const;
  Prediction predict(const SparseVector& x) const;
};

double sigmoid(double z);

// Log loss averaged over the examples.
double log_loss(const LogisticModel& m, std::span<const SparseVector> X, std::span<const Label> y);

// Per-example SGD on the log loss from zero weights. The learning rate decays
// linearly from `lr` to 0 over all epochs * n steps; each epoch visits the
// examples in a fresh permutation drawn from `seed`. Throws InputError on
// single-class data, lr < 0 or epochs < 1.
LogisticModel train_logistic_sgd(std::span<const SparseVector> X, std::span<const Label> y, std::size_t n_features,
                                 double lr, int epochs, std::uint64_t seed);

nlohmann::json to_json(const LogisticModel& m);
LogisticModel logistic_from_json(const nlohmann::json& j);

}  // namespace pplfilter
