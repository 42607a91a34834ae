#include "pplfilter/scoring.hpp"

#include <cmath>

#include "pplfilter/error.hpp"
#include "pplfilter/parallel.hpp"

namespace pplfilter {

SentenceScore logprob(const KneserNeyModel& model, std::span<const std::string> tokens) {
  const Vocabulary& vocab = model.vocab();
  std::vector<WordId> history{kBosId};
  history.reserve(tokens.size() + 2);
  SentenceScore s;
  for (const std::string& tok : tokens) {
    const WordId w = vocab.id_or_unk(tok);
    s.log10_sum += model.log10_prob(history, w);
    history.push_back(w);
  }
  s.log10_sum += model.log10_prob(history, kEosId);
  s.n_tokens = tokens.size() + 1;
  return s;
}

double perplexity_from(const SentenceScore& s) {
  return std::pow(10.0, -s.log10_sum / static_cast<double>(s.n_tokens));
}

PerplexityScore perplexity(const KneserNeyModel& model, const Document& doc) {
  const TokenSeq tokens = lm_tokenize(doc.content);
  const SentenceScore s = logprob(model, tokens);
  return {doc.id, s.log10_sum, s.n_tokens, perplexity_from(s)};
}

DocumentScorer::DocumentScorer(const KneserNeyModel& model) : model_(model) {}

SentenceScore DocumentScorer::score_text(std::string_view text) {
  const Vocabulary& vocab = model_.vocab();
  ScoringState state = model_.begin_state();
  ScoringState next;
  SentenceScore s;
  auto step = [&](WordId w) {
    s.log10_sum += model_.score_next(state, w, next);
    ++s.n_tokens;
    state = next;
  };
  for_each_lm_token(text, scratch_, [&](std::string_view tok) { step(vocab.id_or_unk(tok)); });
  step(kEosId);
  return s;
}

std::vector<PerplexityScore> score_documents_serial(const KneserNeyModel& model, std::span<const Document> docs) {
  std::vector<PerplexityScore> out;
  out.reserve(docs.size());
  for (const Document& d : docs) out.push_back(perplexity(model, d));
  return out;
}

std::vector<PerplexityScore> score_documents(const KneserNeyModel& model, std::span<const Document> docs,
                                             int threads) {
  const int workers = resolve_threads(threads);
  std::vector<PerplexityScore> out(docs.size());
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel num_threads(workers)
  {
    DocumentScorer scorer(model);
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const Document& d = docs[static_cast<std::size_t>(i)];
      const SentenceScore s = scorer.score_text(d.content);
      out[static_cast<std::size_t>(i)] = {d.id, s.log10_sum, s.n_tokens, perplexity_from(s)};
    }
  }
  return out;
}

nlohmann::json to_json(const PerplexityScore& s) {
  nlohmann::json j;
  j["id"] = s.doc_id;
  j["logprob"] = s.log10_sum;
  j["tokens"] = s.n_tokens;
  j["ppl"] = s.ppl;
  return j;
}

PerplexityScore score_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("id") || !j.contains("ppl") || !j["id"].is_string() || !j["ppl"].is_number()) {
    throw InputError("score record needs string \"id\" and numeric \"ppl\": " + j.dump());
  }
  PerplexityScore s;
  s.doc_id = j["id"].get<std::string>();
  s.ppl = j["ppl"].get<double>();
  s.log10_sum = j.value("logprob", 0.0);
  s.n_tokens = j.value("tokens", std::size_t{0});
  return s;
}

}  // namespace pplfilter
