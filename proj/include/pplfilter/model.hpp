#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pplfilter/discounts.hpp"
#include "pplfilter/ngram_counts.hpp"
#include "pplfilter/vocabulary.hpp"

namespace pplfilter {

// log10 of zero probability, as written in ARPA files (used for <s>).
inline constexpr double kLog10Zero = -99.0;

struct NGramWeights {
  double log10_prob = 0;
  double log10_backoff = 0;  // 0 when the n-gram is never a context
};

// All n-grams of one order in an open-addressing table. Each slot holds the
// n-gram's ids and weights together, so a probe touches one place in memory.
// Entries keep an index in sorted id order for iteration.
class NGramTable {
 public:
  NGramTable() = default;
  // `ids` holds size() * order ids, sorted and unique per n-gram.
  NGramTable(int order, const std::vector<WordId>& ids, const std::vector<NGramWeights>& weights);

  int order() const { return order_; }
  std::size_t size() const { return position_.size(); }
  std::span<const WordId> gram(std::size_t i) const {
    return {slots_[position_[i]].ids.data(), static_cast<std::size_t>(order_)};
  }
  const NGramWeights& weights(std::size_t i) const { return slots_[position_[i]].weights; }

  std::optional<std::size_t> index_of(std::span<const WordId> gram) const;
  const NGramWeights* find(std::span<const WordId> gram) const {
    const Slot* s = probe(gram);
    return s ? &s->weights : nullptr;
  }

  void set_backoff(std::size_t i, double log10_backoff) { slots_[position_[i]].weights.log10_backoff = log10_backoff; }
  void set_prob(std::size_t i, double log10_prob) { slots_[position_[i]].weights.log10_prob = log10_prob; }

 private:
  struct Slot {
    NGramWeights weights;
    std::uint32_t entry = 0;  // sorted index + 1; 0 marks an empty slot
    std::array<WordId, kMaxOrder> ids{};
  };
  const Slot* probe(std::span<const WordId> gram) const;

  int order_ = 0;
  std::vector<Slot> slots_;
  std::vector<std::uint32_t> position_;  // sorted index -> slot
  std::uint64_t mask_ = 0;
};

// Context carried from one word to the next while scoring a sequence: the
// stored contexts ending at the previous word, most recent word first, and
// their log10 backoffs. backoff[i] belongs to the context of length i + 1.
struct ScoringState {
  std::size_t length = 0;
  std::array<WordId, kMaxOrder - 1> words{};
  std::array<double, kMaxOrder - 1> backoff{};
};

struct ModelMetadata {
  std::uint64_t training_tokens = 0;
  std::vector<Discount> discounts;  // empty for models read from ARPA
};

// Backoff n-gram model holding interpolated modified Kneser-Ney estimates.
// Immutable after construction; safe for concurrent readers.
class KneserNeyModel {
 public:
  KneserNeyModel(Vocabulary vocab, std::vector<NGramTable> tables, ModelMetadata meta);

  int order() const { return static_cast<int>(tables_.size()); }
  const Vocabulary& vocab() const { return vocab_; }
  const NGramTable& table(int k) const { return tables_[static_cast<std::size_t>(k - 1)]; }
  const ModelMetadata& metadata() const { return meta_; }

  // log10 p(word | context) using the longest stored context; `context` is in
  // sentence order and only its last order()-1 words are used. Contexts that
  // were never seen back off with weight 1.
  double log10_prob(std::span<const WordId> context, WordId word) const;

  // Incremental form of log10_prob for left-to-right scoring. Backoffs of the
  // contexts come from the previous step's hits instead of fresh lookups, so
  // a word costs at most one probe per matched order. Gives the same value as
  // log10_prob on models whose n-gram sets are closed under taking suffixes
  // and prefixes, which every estimated or written model is.
  ScoringState begin_state() const;  // context holding only <s>
  double score_next(const ScoringState& in, WordId word, ScoringState& out) const;

 private:
  Vocabulary vocab_;
  std::vector<NGramTable> tables_;
  ModelMetadata meta_;
};

// Interpolated modified Kneser-Ney:
//   p(w|h) = max(c(hw) - D(c(hw)), 0) / c(h) + gamma(h) p(w|h')
//   gamma(h) = (D1 N1(h.) + D2 N2(h.) + D3+ N3+(h.)) / c(h)
// with the unigram level interpolated with a uniform distribution over the
// vocabulary (<unk> included, <s> excluded). gamma(h) is stored as the
// backoff weight of h.
KneserNeyModel estimate_model(const NGramCounts& counts, const DiscountSet& discounts);

}  // namespace pplfilter
