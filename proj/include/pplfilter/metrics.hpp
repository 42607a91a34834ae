#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "json.hpp"
#include "pplfilter/corpus.hpp"

namespace pplfilter {

// Positive class is Harmful.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  // The same table read with NonHarmful as the positive class.
  ConfusionCounts swapped() const { return {tn, tp, fn, fp}; }
  void add(Label gold, Label predicted);

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct ClassScores {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  bool degenerate = false;  // some 0/0 ratio was defined as 0
};

struct EvalReport {
  ConfusionCounts confusion;
  ClassScores harmful;
  ClassScores non_harmful;
  double f1_macro = 0;
  double accuracy = 0;
};

using IdLabel = std::pair<std::string, Label>;

// Joins predictions with gold labels by document id. Throws InputError listing
// missing and extra ids when the two id sets differ.
ConfusionCounts confusion(std::span<const IdLabel> predictions, std::span<const IdLabel> gold);

// Precision, recall and F1 per class with 0/0 defined as 0 (and flagged);
// macro F1 is the unweighted mean of the two class F1 scores.
EvalReport report(const ConfusionCounts& c);

nlohmann::json to_json(const ConfusionCounts& c);
nlohmann::json to_json(const EvalReport& r);

}  // namespace pplfilter
