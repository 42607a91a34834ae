#include "pplfilter/baselines/logistic_sgd.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "pplfilter/error.hpp"

namespace pplfilter {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LogisticModel::margin(const SparseVector& x) const {
  double z = bias;
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    if (x.index[k] < weights.size()) z += weights[x.index[k]] * x.value[k];
  }
  return z;
}

double LogisticModel::probability_harmful(const SparseVector& x) const { return sigmoid(margin(x)); }

Prediction LogisticModel::predict(const SparseVector& x) const {
  const double p = probability_harmful(x);
  return p >= 0.5 ? Prediction{Label::Harmful, p} : Prediction{Label::NonHarmful, 1.0 - p};
}

double log_loss(const LogisticModel& m, std::span<const SparseVector> X, std::span<const Label> y) {
  if (X.empty()) return 0;
  double total = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double z = m.margin(X[i]);
    // -log sigmoid(s * z) with s = +1 for Harmful, computed stably.
    const double s = y[i] == Label::Harmful ? z : -z;
    total += s >= 0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
  }
  return total / static_cast<double>(X.size());
}

LogisticModel train_logistic_sgd(std::span<const SparseVector> X, std::span<const Label> y, std::size_t n_features,
                                 double lr, int epochs, std::uint64_t seed) {
  require_two_classes(X.size(), y);
  if (!(lr >= 0)) throw InputError("learning rate must be non-negative");
  if (epochs < 1) throw InputError("epochs must be at least 1");

  LogisticModel m;
  m.weights.assign(n_features, 0.0);
  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);

  const double total_steps = static_cast<double>(epochs) * static_cast<double>(X.size());
  double step = 0;
  for (int e = 0; e < epochs; ++e) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (std::size_t i : order) {
      const double rate = lr * (1.0 - step / total_steps);
      step += 1;
      const double target = y[i] == Label::Harmful ? 1.0 : 0.0;
      const double g = m.probability_harmful(X[i]) - target;
      for (std::size_t k = 0; k < X[i].nnz(); ++k) {
        if (X[i].index[k] >= n_features) throw InputError("feature index out of range");
        m.weights[X[i].index[k]] -= rate * g * X[i].value[k];
      }
      m.bias -= rate * g;
    }
  }
  return m;
}

nlohmann::json to_json(const LogisticModel& m) { return {{"weights", m.weights}, {"bias", m.bias}}; }

LogisticModel logistic_from_json(const nlohmann::json& j) {
  try {
    LogisticModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad logistic model: ") + e.what());
  }
}

}  // namespace pplfilter
