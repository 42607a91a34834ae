#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pplfilter/textproc.hpp"
#include "pplfilter/vocabulary.hpp"

namespace pplfilter {

struct CountedNGram {
  NGram gram;
  std::uint64_t count;
};

// Count statistics that feed the smoother.
//
// Each document is padded with one leading <s> and one trailing </s>. At the
// highest order the stored counts are raw occurrence counts. At lower orders a
// stored count is the number of distinct words seen immediately to the left
// of the n-gram (its continuation count), except for n-grams that begin with
// <s>: those can never be extended to the left and keep their raw count.
// The <s> unigram is never predicted and is not stored.
struct NGramCounts {
  int order = 0;
  Vocabulary vocab;
  // grams[k - 1] holds the order-k n-grams sorted by id sequence.
  std::vector<std::vector<CountedNGram>> grams;
  // counts_of_counts[k - 1][r] = number of order-k n-grams with count r, r in 1..4.
  std::vector<std::array<std::uint64_t, 5>> counts_of_counts;
  std::uint64_t total_unigram_mass = 0;  // sum of stored unigram counts
  std::uint64_t training_tokens = 0;     // predicted tokens, </s> included
  std::uint64_t documents = 0;

  const std::vector<CountedNGram>& at_order(int k) const { return grams[static_cast<std::size_t>(k - 1)]; }
  // 0 when the n-gram is not stored.
  std::uint64_t count(std::span<const WordId> gram) const;
};

// Sharded OpenMP counting over documents followed by a single merge.
// `threads` <= 0 uses every available core. Throws InputError for an order
// outside [1, kMaxOrder] or a corpus without tokens.
NGramCounts count_ngrams(std::span<const TokenSeq> docs, int order, int threads = 1);

// Single-threaded reference kept for cross-checking the parallel path.
NGramCounts count_ngrams_serial(std::span<const TokenSeq> docs, int order);

}  // namespace pplfilter
