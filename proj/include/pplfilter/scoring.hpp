#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pplfilter/corpus.hpp"
#include "pplfilter/model.hpp"
#include "pplfilter/textproc.hpp"

namespace pplfilter {

struct SentenceScore {
  double log10_sum = 0;
  std::size_t n_tokens = 0;  // predicted tokens: words plus </s>
};

struct PerplexityScore {
  std::string doc_id;
  double log10_sum = 0;
  std::size_t n_tokens = 0;
  double ppl = 0;  // 10^(-log10_sum / n_tokens)
};

// Pads with <s> ... </s>, maps unknown words to <unk> and sums log10
// probabilities of every token after <s>.
SentenceScore logprob(const KneserNeyModel& model, std::span<const std::string> tokens);

double perplexity_from(const SentenceScore& s);

// lm_tokenize followed by logprob.
PerplexityScore perplexity(const KneserNeyModel& model, const Document& doc);

// Reusable per-thread scoring state: a tokenization buffer and the carried
// context. Not thread-safe; create one per worker.
class DocumentScorer {
 public:
  explicit DocumentScorer(const KneserNeyModel& model);
  SentenceScore score_text(std::string_view text);

 private:
  const KneserNeyModel& model_;
  std::string scratch_;
};

// Scoring kernels. Output order matches input order for any thread count and
// the values are bit-identical between the two.
std::vector<PerplexityScore> score_documents_serial(const KneserNeyModel& model, std::span<const Document> docs);
std::vector<PerplexityScore> score_documents(const KneserNeyModel& model, std::span<const Document> docs,
                                             int threads = 0);

// {"id": ..., "logprob": ..., "tokens": ..., "ppl": ...}
nlohmann::json to_json(const PerplexityScore& s);
PerplexityScore score_from_json(const nlohmann::json& j);

}  // namespace pplfilter
