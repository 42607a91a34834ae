#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pplfilter/baselines/common.hpp"
#include "pplfilter/textproc.hpp"

namespace pplfilter {

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view s);

struct HashedLinearOptions {
  std::uint64_t buckets = 1u << 18;
  int dim = 16;
  int word_ngrams = 2;
  int epochs = 10;
  double lr = 0.1;
  int threads = 4;
  std::uint64_t seed = 1;
};

// Bag of hashed word n-grams -> mean embedding -> two-way softmax, no bias.
struct HashedLinearModel {
  std::uint64_t buckets = 0;
  int dim = 0;
  int word_ngrams = 1;
  std::vector<float> input;   // buckets x dim
  std::vector<float> output;  // 2 x dim

  // Bucket of every n-gram of length 1..word_ngrams, the words of an n-gram
  // joined by one space before hashing.
  std::vector<std::uint64_t> features(std::span<const std::string> doc) const;
  // Softmax over the two classes; uniform for a document without features.
  std::array<double, 2> probabilities(std::span<const std::string> doc) const;
  Prediction predict(std::span<const std::string> doc) const;
};

struct HashedTrainResult {
  HashedLinearModel model;
  std::size_t skipped_empty = 0;
};

// Training examples are put into a canonical order (tokens, then label) before
// the seeded per-epoch shuffle, so the result does not depend on input order.
// With threads > 1 updates are lock-free (Hogwild) and not bit-reproducible;
// threads = 1 is deterministic for a given seed. Empty documents are skipped.
// Throws InputError when buckets < 2, dim < 2, word_ngrams < 1, epochs < 1,
// lr < 0, or fewer than two classes remain.
HashedTrainResult train_hashed_linear(std::span<const TokenSeq> docs, std::span<const Label> y,
                                      const HashedLinearOptions& opts);

nlohmann::json to_json(const HashedLinearModel& m);
HashedLinearModel hashed_linear_from_json(const nlohmann::json& j);

}  // namespace pplfilter
