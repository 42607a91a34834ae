#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>

#include "json.hpp"
#include "pplfilter/baselines/hashed_linear.hpp"
#include "pplfilter/baselines/logistic_sgd.hpp"
#include "pplfilter/baselines/naive_bayes.hpp"
#include "pplfilter/baselines/tfidf.hpp"
#include "pplfilter/corpus.hpp"
#include "pplfilter/textproc.hpp"

namespace pplfilter {

enum class BaselineKind { NaiveBayes, LogisticSgd, Hashed };

// "nb", "sgd" or "hashed"; anything else throws InputError.
BaselineKind parse_baseline_kind(std::string_view name);
std::string_view baseline_kind_name(BaselineKind kind);

struct BaselineOptions {
  double max_df = 1.0;
  bool smoothing = true;
  TfidfNorm norm = TfidfNorm::L2;
  double alpha = 1.0;
  double sgd_lr = 0.5;
  int sgd_epochs = 10;
  std::uint64_t seed = 1;
  HashedLinearOptions hashed;
};

// A trained classifier together with the preprocessing that produced its
// inputs, so prediction needs nothing but the model file.
struct BaselineModel {
  BaselineKind kind = BaselineKind::NaiveBayes;
  nlohmann::json pipeline_config;  // null for the default pipeline
  std::filesystem::path pipeline_base_dir;
  Pipeline pipeline = Pipeline::default_pipeline();
  std::optional<TfidfVectorizer> vectorizer;  // NaiveBayes and LogisticSgd
  NaiveBayes nb;
  LogisticModel sgd;
  HashedLinearModel hashed;

  Prediction predict(std::string_view text) const;
};

struct BaselineTrainResult {
  BaselineModel model;
  std::size_t skipped_unlabeled = 0;
  std::size_t skipped_empty = 0;  // hashed only
};

// Documents without a gold label are skipped.
BaselineTrainResult train_baseline(BaselineKind kind, std::span<const Document> docs, const BaselineOptions& opts,
                                   const nlohmann::json& pipeline_config = nullptr,
                                   const std::filesystem::path& pipeline_base_dir = {});

// CBOR-encoded container {"format", "version", "kind", "pipeline", ...}.
void save_baseline(const BaselineModel& model, const std::filesystem::path& path);
BaselineModel load_baseline(const std::filesystem::path& path);

nlohmann::json to_json(const BaselineModel& model);
BaselineModel baseline_from_json(const nlohmann::json& j);

}  // namespace pplfilter
