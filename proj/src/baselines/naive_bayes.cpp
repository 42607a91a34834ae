#include "pplfilter/baselines/naive_bayes.hpp"

#include <algorithm>
#include <cmath>

#include "pplfilter/error.hpp"

namespace pplfilter {

std::array<double, 2> NaiveBayes::joint_log(const SparseVector& x) const {
  std::array<double, 2> out = log_prior;
  for (int c = 0; c < 2; ++c) {
    const std::vector<double>& ll = log_likelihood[static_cast<std::size_t>(c)];
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      if (x.index[k] < ll.size()) out[static_cast<std::size_t>(c)] += x.value[k] * ll[x.index[k]];
    }
  }
  return out;
}

std::array<double, 2> NaiveBayes::posterior(const SparseVector& x) const {
  const std::array<double, 2> j = joint_log(x);
  const double m = std::max(j[0], j[1]);
  const double e0 = std::exp(j[0] - m);
  const double e1 = std::exp(j[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

Prediction NaiveBayes::predict(const SparseVector& x) const {
  const std::array<double, 2> p = posterior(x);
  // Ties go to Harmful.
  return p[0] >= p[1] ? Prediction{Label::Harmful, p[0]} : Prediction{Label::NonHarmful, p[1]};
}

NaiveBayes train_nb(std::span<const SparseVector> X, std::span<const Label> y, std::size_t n_features, double alpha) {
  require_two_classes(X.size(), y);
  if (!(alpha > 0)) throw InputError("naive bayes alpha must be positive");

  NaiveBayes m;
  m.alpha = alpha;
  std::array<std::vector<double>, 2> feature_mass{std::vector<double>(n_features, 0.0),
                                                  std::vector<double>(n_features, 0.0)};
  std::array<double, 2> docs{0, 0};
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto c = static_cast<std::size_t>(class_index(y[i]));
    docs[c] += 1;
    for (std::size_t k = 0; k < X[i].nnz(); ++k) {
      if (X[i].index[k] >= n_features) throw InputError("feature index out of range");
      if (X[i].value[k] < 0) throw InputError("naive bayes features must be non-negative");
      feature_mass[c][X[i].index[k]] += X[i].value[k];
    }
  }
  const double n = static_cast<double>(X.size());
  for (std::size_t c = 0; c < 2; ++c) {
    m.log_prior[c] = std::log(docs[c] / n);
    double total = 0;
    for (double v : feature_mass[c]) total += v;
    const double denom = std::log(total + alpha * static_cast<double>(n_features));
    m.log_likelihood[c].resize(n_features);
    for (std::size_t f = 0; f < n_features; ++f) m.log_likelihood[c][f] = std::log(feature_mass[c][f] + alpha) - denom;
  }
  return m;
}

nlohmann::json to_json(const NaiveBayes& m) {
  return {{"alpha", m.alpha},
          {"log_prior", m.log_prior},
          {"log_likelihood", {m.log_likelihood[0], m.log_likelihood[1]}}};
}

NaiveBayes naive_bayes_from_json(const nlohmann::json& j) {
  try {
    NaiveBayes m;
    m.alpha = j.at("alpha").get<double>();
    m.log_prior = j.at("log_prior").get<std::array<double, 2>>();
    const auto& ll = j.at("log_likelihood");
    if (!ll.is_array() || ll.size() != 2) throw InputError("naive bayes log_likelihood needs two rows");
    m.log_likelihood[0] = ll[0].get<std::vector<double>>();
    m.log_likelihood[1] = ll[1].get<std::vector<double>>();
    if (m.log_likelihood[0].size() != m.log_likelihood[1].size()) {
      throw InputError("naive bayes log_likelihood rows differ in length");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad naive bayes model: ") + e.what());
  }
}

}  // namespace pplfilter
