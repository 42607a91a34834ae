// Serial reference kernels against their OpenMP counterparts on the desk
// corpora. Run with --benchmark_counters_tabular=true for MB/s columns.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <memory>
#include <vector>

#include "pplfilter/corpus.hpp"
#include "pplfilter/discounts.hpp"
#include "pplfilter/model.hpp"
#include "pplfilter/ngram_counts.hpp"
#include "pplfilter/scoring.hpp"
#include "pplfilter/textproc.hpp"

namespace {

using namespace pplfilter;

struct Fixture {
  std::vector<Document> train;
  std::vector<Document> eval;
  std::vector<TokenSeq> train_tokens;
  std::unique_ptr<KneserNeyModel> model;
  double eval_bytes = 0;
  double train_bytes = 0;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture f;
    const std::filesystem::path dir = std::filesystem::path(PPLFILTER_DATA_DIR) / "desk";
    f.train = read_jsonlines(dir / "class_a.jsonl", LabelRule::None).docs;
    f.eval = f.train;
    for (Document& d : read_jsonlines(dir / "class_b.jsonl", LabelRule::None).docs) f.eval.push_back(std::move(d));
    for (const Document& d : f.train) {
      f.train_tokens.push_back(lm_tokenize(d.content));
      f.train_bytes += static_cast<double>(d.content.size());
    }
    for (const Document& d : f.eval) f.eval_bytes += static_cast<double>(d.content.size());
    const NGramCounts counts = count_ngrams(f.train_tokens, 5, 1);
    f.model = std::make_unique<KneserNeyModel>(estimate_model(counts, estimate_discounts(counts)));
    return f;
  }();
  return f;
}

void set_rate(benchmark::State& state, double bytes) {
  state.counters["MB/s"] =
      benchmark::Counter(bytes * static_cast<double>(state.iterations()) / 1e6, benchmark::Counter::kIsRate);
}

void BM_ScoreSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(score_documents_serial(*f.model, f.eval));
  set_rate(state, f.eval_bytes);
}

void BM_ScoreParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(score_documents(*f.model, f.eval, threads));
  set_rate(state, f.eval_bytes);
}

void BM_CountSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(count_ngrams_serial(f.train_tokens, 5));
  set_rate(state, f.train_bytes);
}

void BM_CountParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(count_ngrams(f.train_tokens, 5, threads));
  set_rate(state, f.train_bytes);
}

BENCHMARK(BM_ScoreSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
