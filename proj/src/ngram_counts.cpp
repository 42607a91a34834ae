#include "pplfilter/ngram_counts.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "pplfilter/error.hpp"
#include "pplfilter/parallel.hpp"

namespace pplfilter {

namespace {

using CountMap = std::unordered_map<NGram, std::uint64_t, NGramHash>;

// Raw counts gathered in one pass over the padded documents.
struct RawCounts {
  CountMap top;                         // every window of the highest order
  std::vector<CountMap> bos_prefix;     // [k] = order-k prefixes starting with <s>, k < order
  std::uint64_t tokens = 0;

  explicit RawCounts(int order) : bos_prefix(static_cast<std::size_t>(order)) {}

  void add_document(std::span<const WordId> padded, int order) {
    const auto n = static_cast<std::size_t>(order);
    tokens += padded.size() - 1;
    for (std::size_t i = 0; i + n <= padded.size(); ++i) ++top[NGram(padded.subspan(i, n))];
    for (std::size_t k = 1; k < n && k <= padded.size(); ++k) ++bos_prefix[k][NGram(padded.first(k))];
  }

  void merge(RawCounts&& other) {
    for (auto& [g, c] : other.top) top[g] += c;
    for (std::size_t k = 0; k < bos_prefix.size(); ++k) {
      for (auto& [g, c] : other.bos_prefix[k]) bos_prefix[k][g] += c;
    }
    tokens += other.tokens;
  }
};

void check_request(std::span<const TokenSeq> docs, int order) {
  if (order < 1 || order > kMaxOrder) {
    throw InputError("n-gram order must be in [1, " + std::to_string(kMaxOrder) + "], got " + std::to_string(order));
  }
  const bool any_tokens = std::any_of(docs.begin(), docs.end(), [](const TokenSeq& d) { return !d.empty(); });
  if (!any_tokens) throw InputError("cannot count n-grams of an empty corpus");
}

std::vector<WordId> pad(const Vocabulary& vocab, const TokenSeq& doc) {
  std::vector<WordId> ids;
  ids.reserve(doc.size() + 2);
  ids.push_back(kBosId);
  for (const std::string& tok : doc) ids.push_back(vocab.id_or_unk(tok));
  ids.push_back(kEosId);
  return ids;
}

std::vector<CountedNGram> sorted_entries(const CountMap& map) {
  std::vector<CountedNGram> out;
  out.reserve(map.size());
  for (const auto& [g, c] : map) out.push_back({g, c});
  std::sort(out.begin(), out.end(), [](const CountedNGram& a, const CountedNGram& b) { return a.gram < b.gram; });
  return out;
}

NGramCounts finalize(Vocabulary vocab, RawCounts raw, int order, std::uint64_t documents) {
  NGramCounts counts;
  counts.order = order;
  counts.vocab = std::move(vocab);
  counts.documents = documents;
  counts.training_tokens = raw.tokens;
  counts.grams.resize(static_cast<std::size_t>(order));

  if (order == 1) raw.top.erase(NGram(std::array<WordId, 1>{kBosId}));
  counts.grams[static_cast<std::size_t>(order - 1)] = sorted_entries(raw.top);

  // Lower orders: each distinct (k+1)-gram contributes one left extension to
  // its suffix.
  for (int k = order - 1; k >= 1; --k) {
    CountMap current = std::move(raw.bos_prefix[static_cast<std::size_t>(k)]);
    for (const CountedNGram& e : counts.grams[static_cast<std::size_t>(k)]) ++current[e.gram.suffix()];
    if (k == 1) current.erase(NGram(std::array<WordId, 1>{kBosId}));
    counts.grams[static_cast<std::size_t>(k - 1)] = sorted_entries(current);
  }

  counts.counts_of_counts.assign(static_cast<std::size_t>(order), {});
  for (int k = 1; k <= order; ++k) {
    auto& coc = counts.counts_of_counts[static_cast<std::size_t>(k - 1)];
    for (const CountedNGram& e : counts.at_order(k)) {
      if (e.count <= 4) ++coc[e.count];
    }
  }
  for (const CountedNGram& e : counts.at_order(1)) counts.total_unigram_mass += e.count;
  return counts;
}

}  // namespace

std::uint64_t NGramCounts::count(std::span<const WordId> gram) const {
  if (gram.empty() || gram.size() > static_cast<std::size_t>(order)) return 0;
  const auto& table = grams[gram.size() - 1];
  const NGram key(gram);
  auto it = std::lower_bound(table.begin(), table.end(), key,
                             [](const CountedNGram& e, const NGram& k) { return e.gram < k; });
  return (it != table.end() && it->gram == key) ? it->count : 0;
}

NGramCounts count_ngrams_serial(std::span<const TokenSeq> docs, int order) {
  check_request(docs, order);
  std::vector<std::string> words;
  for (const TokenSeq& d : docs) words.insert(words.end(), d.begin(), d.end());
  Vocabulary vocab = Vocabulary::from_words(std::move(words));

  RawCounts raw(order);
  for (const TokenSeq& d : docs) raw.add_document(pad(vocab, d), order);
  return finalize(std::move(vocab), std::move(raw), order, docs.size());
}

NGramCounts count_ngrams(std::span<const TokenSeq> docs, int order, int threads) {
  check_request(docs, order);
  const int workers = resolve_threads(threads);
  if (workers == 1) return count_ngrams_serial(docs, order);

  const auto n_docs = static_cast<std::ptrdiff_t>(docs.size());

  // Pass 1: vocabulary.
  std::vector<std::unordered_set<std::string_view>> seen(static_cast<std::size_t>(workers));
#pragma omp parallel for num_threads(workers) schedule(static)
  for (std::ptrdiff_t i = 0; i < n_docs; ++i) {
    auto& mine = seen[static_cast<std::size_t>(thread_num())];
    for (const std::string& tok : docs[static_cast<std::size_t>(i)]) mine.insert(tok);
  }
  std::vector<std::string> words;
  for (const auto& s : seen) words.insert(words.end(), s.begin(), s.end());
  Vocabulary vocab = Vocabulary::from_words(std::move(words));

  // Pass 2: sharded raw counts.
  std::vector<RawCounts> shards;
  shards.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) shards.emplace_back(order);
#pragma omp parallel for num_threads(workers) schedule(static)
  for (std::ptrdiff_t i = 0; i < n_docs; ++i) {
    shards[static_cast<std::size_t>(thread_num())].add_document(pad(vocab, docs[static_cast<std::size_t>(i)]),
                                                               order);
  }
  RawCounts merged = std::move(shards.front());
  for (std::size_t t = 1; t < shards.size(); ++t) merged.merge(std::move(shards[t]));
  return finalize(std::move(vocab), std::move(merged), order, docs.size());
}

}  // namespace pplfilter
