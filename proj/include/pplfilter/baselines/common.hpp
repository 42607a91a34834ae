#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pplfilter/corpus.hpp"

namespace pplfilter {

// Class index used by every baseline: 0 = Harmful, 1 = NonHarmful.
inline int class_index(Label label) { return label == Label::Harmful ? 0 : 1; }
inline Label class_label(int index) { return index == 0 ? Label::Harmful : Label::NonHarmful; }

struct Prediction {
  Label label;
  double score;  // probability of `label`
};

// Sorted by index, no duplicates.
struct SparseVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
};

// Throws InputError unless both classes occur and sizes agree.
void require_two_classes(std::size_t n_examples, std::span<const Label> y);

}  // namespace pplfilter
