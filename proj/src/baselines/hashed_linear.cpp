#include "pplfilter/baselines/hashed_linear.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#include "pplfilter/error.hpp"
#include "pplfilter/parallel.hpp"

namespace pplfilter {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::uint64_t> HashedLinearModel::features(std::span<const std::string> doc) const {
  std::vector<std::uint64_t> out;
  out.reserve(doc.size() * static_cast<std::size_t>(word_ngrams));
  std::string gram;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    gram = doc[i];
    out.push_back(fnv1a64(gram) % buckets);
    for (int n = 2; n <= word_ngrams && i + static_cast<std::size_t>(n) <= doc.size(); ++n) {
      gram += ' ';
      gram += doc[i + static_cast<std::size_t>(n) - 1];
      out.push_back(fnv1a64(gram) % buckets);
    }
  }
  return out;
}

namespace {

// Relaxed atomics keep concurrent Hogwild updates free of data races; on one
// thread they compile to plain loads and stores.
inline float load(float& x) { return std::atomic_ref<float>(x).load(std::memory_order_relaxed); }
inline void add(float& x, float v) {
  std::atomic_ref<float> r(x);
  r.store(r.load(std::memory_order_relaxed) + v, std::memory_order_relaxed);
}

void hidden_of(const HashedLinearModel& m, std::span<const std::uint64_t> feats, std::vector<double>& hidden) {
  const auto d = static_cast<std::size_t>(m.dim);
  hidden.assign(d, 0.0);
  auto& input = const_cast<std::vector<float>&>(m.input);
  for (std::uint64_t f : feats) {
    float* row = input.data() + f * d;
    for (std::size_t k = 0; k < d; ++k) hidden[k] += load(row[k]);
  }
  const double inv = 1.0 / static_cast<double>(feats.size());
  for (double& h : hidden) h *= inv;
}

std::array<double, 2> softmax_of(const HashedLinearModel& m, const std::vector<double>& hidden) {
  const auto d = static_cast<std::size_t>(m.dim);
  auto& output = const_cast<std::vector<float>&>(m.output);
  std::array<double, 2> z{0, 0};
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t k = 0; k < d; ++k) z[c] += load(output[c * d + k]) * hidden[k];
  }
  const double mx = std::max(z[0], z[1]);
  const double e0 = std::exp(z[0] - mx);
  const double e1 = std::exp(z[1] - mx);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

void train_step(HashedLinearModel& m, std::span<const std::uint64_t> feats, int target, double rate,
                std::vector<double>& hidden, std::vector<double>& grad) {
  const auto d = static_cast<std::size_t>(m.dim);
  hidden_of(m, feats, hidden);
  const std::array<double, 2> p = softmax_of(m, hidden);
  grad.assign(d, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    const double g = rate * ((static_cast<int>(c) == target ? 1.0 : 0.0) - p[c]);
    float* out = m.output.data() + c * d;
    for (std::size_t k = 0; k < d; ++k) {
      grad[k] += g * load(out[k]);
      add(out[k], static_cast<float>(g * hidden[k]));
    }
  }
  const double inv = 1.0 / static_cast<double>(feats.size());
  for (std::uint64_t f : feats) {
    float* row = m.input.data() + f * d;
    for (std::size_t k = 0; k < d; ++k) add(row[k], static_cast<float>(grad[k] * inv));
  }
}

}  // namespace

std::array<double, 2> HashedLinearModel::probabilities(std::span<const std::string> doc) const {
  const std::vector<std::uint64_t> feats = features(doc);
  if (feats.empty()) return {0.5, 0.5};
  std::vector<double> hidden;
  hidden_of(*this, feats, hidden);
  return softmax_of(*this, hidden);
}

Prediction HashedLinearModel::predict(std::span<const std::string> doc) const {
  const std::array<double, 2> p = probabilities(doc);
  return p[0] >= p[1] ? Prediction{Label::Harmful, p[0]} : Prediction{Label::NonHarmful, p[1]};
}

HashedTrainResult train_hashed_linear(std::span<const TokenSeq> docs, std::span<const Label> y,
                                      const HashedLinearOptions& opts) {
  if (docs.size() != y.size()) throw InputError("documents and labels differ in count");
  if (opts.buckets < 2) throw InputError("bucket count must be at least 2");
  if (opts.dim < 2) throw InputError("embedding dimension must be at least 2");
  if (opts.word_ngrams < 1) throw InputError("word n-gram length must be at least 1");
  if (opts.epochs < 1) throw InputError("epochs must be at least 1");
  if (!(opts.lr >= 0)) throw InputError("learning rate must be non-negative");

  HashedTrainResult result;
  HashedLinearModel& m = result.model;
  m.buckets = opts.buckets;
  m.dim = opts.dim;
  m.word_ngrams = opts.word_ngrams;
  const auto d = static_cast<std::size_t>(opts.dim);

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].empty()) {
      ++result.skipped_empty;
    } else {
      kept.push_back(i);
    }
  }
  std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
    if (docs[a] != docs[b]) return docs[a] < docs[b];
    return class_index(y[a]) < class_index(y[b]);
  });
  std::vector<Label> labels;
  for (std::size_t i : kept) labels.push_back(y[i]);
  require_two_classes(kept.size(), labels);

  std::vector<std::vector<std::uint64_t>> feats(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) feats[i] = m.features(docs[kept[i]]);

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<float> init(-1.0f / static_cast<float>(d), 1.0f / static_cast<float>(d));
  m.input.resize(opts.buckets * d);
  for (float& w : m.input) w = init(rng);
  m.output.assign(2 * d, 0.0f);

  const auto n = static_cast<std::ptrdiff_t>(kept.size());
  const double total_steps = static_cast<double>(opts.epochs) * static_cast<double>(n);
  std::atomic<std::uint64_t> done{0};
  std::vector<std::size_t> order(kept.size());
  std::iota(order.begin(), order.end(), 0);
  const int workers = resolve_threads(opts.threads);

  for (int e = 0; e < opts.epochs; ++e) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
#pragma omp parallel num_threads(workers)
    {
      std::vector<double> hidden, grad;
#pragma omp for schedule(static)
      for (std::ptrdiff_t k = 0; k < n; ++k) {
        const std::size_t i = order[static_cast<std::size_t>(k)];
        const double progress = static_cast<double>(done.fetch_add(1, std::memory_order_relaxed)) / total_steps;
        train_step(m, feats[i], class_index(labels[i]), opts.lr * (1.0 - progress), hidden, grad);
      }
    }
  }
  return result;
}

namespace {

nlohmann::json::binary_t pack(const std::vector<float>& v) {
  nlohmann::json::binary_t b;
  b.resize(v.size() * sizeof(float));
  if (!v.empty()) std::memcpy(b.data(), v.data(), b.size());
  return b;
}

std::vector<float> unpack(const nlohmann::json& j, std::size_t expected) {
  if (!j.is_binary()) throw InputError("hashed model weights must be a binary blob");
  const auto& b = j.get_binary();
  if (b.size() != expected * sizeof(float)) throw InputError("hashed model weight blob has the wrong size");
  std::vector<float> v(expected);
  if (expected) std::memcpy(v.data(), b.data(), b.size());
  return v;
}

}  // namespace

nlohmann::json to_json(const HashedLinearModel& m) {
  return {{"buckets", m.buckets},
          {"dim", m.dim},
          {"word_ngrams", m.word_ngrams},
          {"input", nlohmann::json::binary(pack(m.input))},
          {"output", nlohmann::json::binary(pack(m.output))}};
}

HashedLinearModel hashed_linear_from_json(const nlohmann::json& j) {
  try {
    HashedLinearModel m;
    m.buckets = j.at("buckets").get<std::uint64_t>();
    m.dim = j.at("dim").get<int>();
    m.word_ngrams = j.at("word_ngrams").get<int>();
    if (m.buckets < 2 || m.dim < 2 || m.word_ngrams < 1) throw InputError("bad hashed model shape");
    m.input = unpack(j.at("input"), m.buckets * static_cast<std::size_t>(m.dim));
    m.output = unpack(j.at("output"), 2 * static_cast<std::size_t>(m.dim));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad hashed model: ") + e.what());
  }
}

}  // namespace pplfilter
