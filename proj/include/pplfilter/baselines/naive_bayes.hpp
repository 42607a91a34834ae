#pragma once

#include <array>
#include <span>
#include <vector>

#include "json.hpp"
#include "pplfilter/baselines/common.hpp"

namespace pplfilter {

// Multinomial Naive Bayes over non-negative feature weights.
struct NaiveBayes {
  double alpha = 1.0;
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> log_likelihood;  // [class][feature]

  std::array<double, 2> joint_log(const SparseVector& x) const;
  std::array<double, 2> posterior(const SparseVector& x) const;
  Prediction predict(const SparseVector& x) const;
};

// log P(f | c) = ln((N_cf + alpha) / (N_c + alpha * n_features)), where N_cf
// sums feature f over class c. Throws InputError on single-class data or
// alpha <= 0.
NaiveBayes train_nb(std::span<const SparseVector> X, std::span<const Label> y, std::size_t n_features,
                    double alpha = 1.0);

nlohmann::json to_json(const NaiveBayes& m);
NaiveBayes naive_bayes_from_json(const nlohmann::json& j);

}  // namespace pplfilter
