#include "pplfilter/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "pplfilter/error.hpp"

namespace pplfilter {

NGramTable::NGramTable(int order, const std::vector<WordId>& ids, const std::vector<NGramWeights>& weights)
    : order_(order) {
  if (order_ < 1 || order_ > kMaxOrder) throw Error("invalid n-gram table order");
  if (ids.size() != weights.size() * static_cast<std::size_t>(order_)) throw Error("n-gram table size mismatch");
  if (weights.size() >= 0xFFFFFFFFu) throw Error("n-gram table too large");

  const std::uint64_t capacity = std::bit_ceil(std::max<std::uint64_t>(16, weights.size() * 2));
  mask_ = capacity - 1;
  slots_.assign(capacity, Slot{});
  position_.resize(weights.size());
  const auto n = static_cast<std::size_t>(order_);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::span<const WordId> g(ids.data() + i * n, n);
    std::uint64_t slot = hash_ids(g) & mask_;
    while (slots_[slot].entry != 0) {
      if (std::equal(g.begin(), g.end(), slots_[slot].ids.begin())) throw Error("duplicate n-gram in table");
      slot = (slot + 1) & mask_;
    }
    Slot& s = slots_[slot];
    s.weights = weights[i];
    s.entry = static_cast<std::uint32_t>(i + 1);
    std::copy(g.begin(), g.end(), s.ids.begin());
    position_[i] = static_cast<std::uint32_t>(slot);
  }
}

const NGramTable::Slot* NGramTable::probe(std::span<const WordId> key) const {
  if (static_cast<int>(key.size()) != order_ || position_.empty()) return nullptr;
  std::uint64_t slot = hash_ids(key) & mask_;
  while (true) {
    const Slot& s = slots_[slot];
    if (s.entry == 0) return nullptr;
    std::size_t k = 0;
    while (k < key.size() && s.ids[k] == key[k]) ++k;
    if (k == key.size()) return &s;
    slot = (slot + 1) & mask_;
  }
}

std::optional<std::size_t> NGramTable::index_of(std::span<const WordId> key) const {
  const Slot* s = probe(key);
  if (s == nullptr) return std::nullopt;
  return s->entry - 1;
}

KneserNeyModel::KneserNeyModel(Vocabulary vocab, std::vector<NGramTable> tables, ModelMetadata meta)
    : vocab_(std::move(vocab)), tables_(std::move(tables)), meta_(std::move(meta)) {
  if (tables_.empty() || static_cast<int>(tables_.size()) > kMaxOrder) throw Error("model order out of range");
  for (std::size_t k = 0; k < tables_.size(); ++k) {
    if (tables_[k].order() != static_cast<int>(k + 1)) throw Error("model tables out of order");
  }
  // Unigram lookups index the table directly by word id.
  const NGramTable& unigrams = tables_[0];
  if (unigrams.size() != vocab_.size()) throw Error("unigram table must cover the vocabulary");
  for (std::size_t i = 0; i < unigrams.size(); ++i) {
    if (unigrams.gram(i)[0] != i) throw Error("unigram table is not in id order");
  }
}

double KneserNeyModel::log10_prob(std::span<const WordId> context, WordId word) const {
  const std::size_t hist = std::min(context.size(), tables_.size() - 1);
  const WordId* ctx = context.data() + (context.size() - hist);

  // key = last `len` context words followed by `word`
  std::array<WordId, kMaxOrder> key{};
  key[kMaxOrder - 1] = word;
  const WordId* key_end = key.data() + kMaxOrder;

  // Unigram tables are stored in id order with one entry per vocabulary word.
  const NGramTable& unigrams = tables_[0];
  const WordId w = word < unigrams.size() ? word : kUnkId;
  const NGramWeights* best = &unigrams.weights(w);
  std::size_t matched = 0;
  for (std::size_t len = 1; len <= hist; ++len) {
    key[kMaxOrder - 1 - len] = ctx[hist - len];
    const NGramWeights* hit = tables_[len].find({key_end - 1 - len, len + 1});
    if (hit == nullptr) break;
    best = hit;
    matched = len;
  }

  double lp = best->log10_prob;
  for (std::size_t len = matched + 1; len <= hist; ++len) {
    if (const NGramWeights* c = tables_[len - 1].find({ctx + hist - len, len})) lp += c->log10_backoff;
  }
  return lp;
}

ScoringState KneserNeyModel::begin_state() const {
  ScoringState st;
  if (order() > 1) {
    st.length = 1;
    st.words[0] = kBosId;
    st.backoff[0] = tables_[0].weights(kBosId).log10_backoff;
  }
  return st;
}

double KneserNeyModel::score_next(const ScoringState& in, WordId word, ScoringState& out) const {
  const std::size_t max_context = tables_.size() - 1;
  const NGramTable& unigrams = tables_[0];
  const WordId w = word < unigrams.size() ? word : kUnkId;
  const NGramWeights* best = &unigrams.weights(w);

  out.length = 0;
  if (max_context > 0) {
    out.length = 1;
    out.words[0] = w;
    out.backoff[0] = best->log10_backoff;
  }

  std::array<WordId, kMaxOrder> key{};
  key[kMaxOrder - 1] = w;
  const WordId* key_end = key.data() + kMaxOrder;
  std::size_t matched = 0;
  for (std::size_t len = 1; len <= in.length; ++len) {
    key[kMaxOrder - 1 - len] = in.words[len - 1];
    const NGramWeights* hit = tables_[len].find({key_end - 1 - len, len + 1});
    if (hit == nullptr) break;
    best = hit;
    matched = len;
    if (len < max_context) {
      out.words[len] = in.words[len - 1];
      out.backoff[len] = hit->log10_backoff;
      out.length = len + 1;
    }
  }

  double lp = best->log10_prob;
  for (std::size_t i = matched; i < in.length; ++i) lp += in.backoff[i];
  return lp;
}

// --- estimation -------------------------------------------------------------

namespace {

struct ContextStats {
  double total = 0;  // c(h)
  std::uint64_t n1 = 0, n2 = 0, n3plus = 0;

  void add(std::uint64_t c) {
    total += static_cast<double>(c);
    if (c == 1) ++n1;
    else if (c == 2) ++n2;
    else ++n3plus;
  }
  double gamma(const Discount& d) const {
    return (d.d1 * static_cast<double>(n1) + d.d2 * static_cast<double>(n2) + d.d3plus * static_cast<double>(n3plus)) /
           total;
  }
};

NGramTable build_unigrams(const NGramCounts& counts, const Discount& d) {
  const Vocabulary& vocab = counts.vocab;
  const auto& unigrams = counts.at_order(1);

  ContextStats stats;
  for (const CountedNGram& e : unigrams) stats.add(e.count);
  const double gamma = stats.gamma(d);
  const double uniform = 1.0 / static_cast<double>(vocab.size() - 1);  // <s> is not predicted

  // Every vocabulary id gets a unigram entry, in id order.
  std::vector<WordId> ids(vocab.size());
  std::vector<NGramWeights> weights(vocab.size());
  for (WordId w = 0; w < vocab.size(); ++w) {
    ids[w] = w;
    weights[w].log10_prob = std::log10(gamma * uniform);
  }
  weights[kBosId].log10_prob = kLog10Zero;
  for (const CountedNGram& e : unigrams) {
    const WordId w = e.gram.ids[0];
    const double discounted = std::max(static_cast<double>(e.count) - d.for_count(e.count), 0.0) / stats.total;
    weights[w].log10_prob = std::log10(discounted + gamma * uniform);
  }
  return NGramTable(1, std::move(ids), std::move(weights));
}

}  // namespace

KneserNeyModel estimate_model(const NGramCounts& counts, const DiscountSet& discounts) {
  if (static_cast<int>(discounts.per_order.size()) != counts.order) {
    throw Error("discount set does not match the model order");
  }
  std::vector<NGramTable> tables;
  tables.reserve(static_cast<std::size_t>(counts.order));
  tables.push_back(build_unigrams(counts, discounts.at_order(1)));

  for (int k = 2; k <= counts.order; ++k) {
    const Discount& d = discounts.at_order(k);
    const auto& entries = counts.at_order(k);
    NGramTable& lower = tables.back();

    std::vector<WordId> ids;
    ids.reserve(entries.size() * static_cast<std::size_t>(k));
    for (const CountedNGram& e : entries) ids.insert(ids.end(), e.gram.ids.begin(), e.gram.ids.begin() + k);
    std::vector<NGramWeights> weights(entries.size());

    // Entries are sorted, so each context's continuations are contiguous.
    std::size_t begin = 0;
    while (begin < entries.size()) {
      const auto context = entries[begin].gram.view().first(static_cast<std::size_t>(k - 1));
      std::size_t end = begin;
      ContextStats stats;
      while (end < entries.size() && std::equal(context.begin(), context.end(), entries[end].gram.ids.begin())) {
        stats.add(entries[end].count);
        ++end;
      }
      const double gamma = stats.gamma(d);

      for (std::size_t i = begin; i < end; ++i) {
        const CountedNGram& e = entries[i];
        const NGramWeights* lower_w = lower.find(e.gram.view().subspan(1));
        if (lower_w == nullptr) throw Error("n-gram suffix missing from the lower order");
        const double discounted = std::max(static_cast<double>(e.count) - d.for_count(e.count), 0.0) / stats.total;
        weights[i].log10_prob = std::log10(discounted + gamma * std::pow(10.0, lower_w->log10_prob));
      }

      const auto ctx_index = lower.index_of(context);
      if (!ctx_index) throw Error("n-gram context missing from the lower order");
      lower.set_backoff(*ctx_index, std::log10(gamma));
      begin = end;
    }
    tables.emplace_back(k, std::move(ids), std::move(weights));
  }

  ModelMetadata meta;
  meta.training_tokens = counts.training_tokens;
  meta.discounts = discounts.per_order;
  return KneserNeyModel(counts.vocab, std::move(tables), std::move(meta));
}

}  // namespace pplfilter
