#include "pplfilter/baselines/model_io.hpp"

#include <fstream>
#include <iterator>

#include "pplfilter/error.hpp"

namespace pplfilter {

namespace {

constexpr std::string_view kFormat = "pplfilter-baseline";
constexpr int kVersion = 1;

Pipeline make_pipeline(const nlohmann::json& config, const std::filesystem::path& base_dir) {
  return config.is_null() ? Pipeline::default_pipeline() : Pipeline::from_json(config, base_dir);
}

}  // namespace

BaselineKind parse_baseline_kind(std::string_view name) {
  if (name == "nb") return BaselineKind::NaiveBayes;
  if (name == "sgd") return BaselineKind::LogisticSgd;
  if (name == "hashed") return BaselineKind::Hashed;
  throw InputError("unknown baseline kind '" + std::string(name) + "' (expected nb, sgd or hashed)");
}

std::string_view baseline_kind_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::NaiveBayes:
      return "nb";
    case BaselineKind::LogisticSgd:
      return "sgd";
    case BaselineKind::Hashed:
      return "hashed";
  }
  return "nb";
}

Prediction BaselineModel::predict(std::string_view text) const {
  const TokenSeq tokens = pipeline.run(text);
  switch (kind) {
    case BaselineKind::NaiveBayes:
      return nb.predict(vectorizer->transform(tokens));
    case BaselineKind::LogisticSgd:
      return sgd.predict(vectorizer->transform(tokens));
    case BaselineKind::Hashed:
      return hashed.predict(tokens);
  }
  throw Error("unreachable baseline kind");
}

BaselineTrainResult train_baseline(BaselineKind kind, std::span<const Document> docs, const BaselineOptions& opts,
                                   const nlohmann::json& pipeline_config,
                                   const std::filesystem::path& pipeline_base_dir) {
  BaselineTrainResult r;
  BaselineModel& m = r.model;
  m.kind = kind;
  m.pipeline_config = pipeline_config;
  m.pipeline_base_dir = pipeline_base_dir;
  m.pipeline = make_pipeline(pipeline_config, pipeline_base_dir);

  std::vector<TokenSeq> tokens;
  std::vector<Label> y;
  for (const Document& d : docs) {
    if (!d.gold_label) {
      ++r.skipped_unlabeled;
      continue;
    }
    tokens.push_back(m.pipeline.run(d.content));
    y.push_back(*d.gold_label);
  }

  if (kind == BaselineKind::Hashed) {
    HashedTrainResult h = train_hashed_linear(tokens, y, opts.hashed);
    m.hashed = std::move(h.model);
    r.skipped_empty = h.skipped_empty;
    return r;
  }

  m.vectorizer = fit_tfidf(tokens, opts.max_df, opts.smoothing, opts.norm);
  std::vector<SparseVector> X;
  X.reserve(tokens.size());
  for (const TokenSeq& t : tokens) X.push_back(m.vectorizer->transform(t));
  if (kind == BaselineKind::NaiveBayes) {
    m.nb = train_nb(X, y, m.vectorizer->size(), opts.alpha);
  } else {
    m.sgd = train_logistic_sgd(X, y, m.vectorizer->size(), opts.sgd_lr, opts.sgd_epochs, opts.seed);
  }
  return r;
}

nlohmann::json to_json(const BaselineModel& model) {
  nlohmann::json j{{"format", kFormat},
                   {"version", kVersion},
                   {"kind", baseline_kind_name(model.kind)},
                   {"pipeline", model.pipeline_config},
                   {"pipeline_base_dir", model.pipeline_base_dir.string()}};
  switch (model.kind) {
    case BaselineKind::NaiveBayes:
      j["vectorizer"] = to_json(*model.vectorizer);
      j["model"] = to_json(model.nb);
      break;
    case BaselineKind::LogisticSgd:
      j["vectorizer"] = to_json(*model.vectorizer);
      j["model"] = to_json(model.sgd);
      break;
    case BaselineKind::Hashed:
      j["model"] = to_json(model.hashed);
      break;
  }
  return j;
}

BaselineModel baseline_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != kFormat) throw InputError("not a baseline model file");
  if (j.value("version", 0) != kVersion) {
    throw InputError("unsupported baseline model version " + j.value("version", nlohmann::json()).dump());
  }
  try {
    BaselineModel m;
    m.kind = parse_baseline_kind(j.at("kind").get<std::string>());
    m.pipeline_config = j.value("pipeline", nlohmann::json());
    m.pipeline_base_dir = j.value("pipeline_base_dir", std::string());
    m.pipeline = make_pipeline(m.pipeline_config, m.pipeline_base_dir);
    switch (m.kind) {
      case BaselineKind::NaiveBayes:
        m.vectorizer = tfidf_from_json(j.at("vectorizer"));
        m.nb = naive_bayes_from_json(j.at("model"));
        if (m.nb.log_likelihood[0].size() != m.vectorizer->size()) {
          throw InputError("naive bayes model and vectorizer disagree on feature count");
        }
        break;
      case BaselineKind::LogisticSgd:
        m.vectorizer = tfidf_from_json(j.at("vectorizer"));
        m.sgd = logistic_from_json(j.at("model"));
        if (m.sgd.weights.size() != m.vectorizer->size()) {
          throw InputError("logistic model and vectorizer disagree on feature count");
        }
        break;
      case BaselineKind::Hashed:
        m.hashed = hashed_linear_from_json(j.at("model"));
        break;
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad baseline model: ") + e.what());
  }
}

void save_baseline(const BaselineModel& model, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = nlohmann::json::to_cbor(to_json(model));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

BaselineModel load_baseline(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read baseline model " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  nlohmann::json j;
  try {
    j = nlohmann::json::from_cbor(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("baseline model " + path.string() + " is not valid CBOR: " + e.what());
  }
  return baseline_from_json(j);
}

}  // namespace pplfilter
