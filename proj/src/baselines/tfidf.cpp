#include "pplfilter/baselines/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pplfilter/error.hpp"

namespace pplfilter {

void require_two_classes(std::size_t n_examples, std::span<const Label> y) {
  if (n_examples != y.size()) {
    throw InputError("got " + std::to_string(n_examples) + " examples but " + std::to_string(y.size()) + " labels");
  }
  const auto harmful = std::count(y.begin(), y.end(), Label::Harmful);
  if (harmful == 0 || static_cast<std::size_t>(harmful) == y.size()) {
    throw InputError("training data needs at least one example of each class");
  }
}

TfidfVectorizer::TfidfVectorizer(std::vector<std::string> terms, std::vector<double> idf, double max_df,
                                 bool smoothing, TfidfNorm norm)
    : terms_(std::move(terms)), idf_(std::move(idf)), max_df_(max_df), smoothing_(smoothing), norm_(norm) {
  if (terms_.size() != idf_.size()) throw InputError("tf-idf vocabulary and idf sizes differ");
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) throw InputError("tf-idf vocabulary is not sorted and unique");
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::int64_t TfidfVectorizer::index_of(std::string_view term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

SparseVector TfidfVectorizer::transform(std::span<const std::string> doc) const {
  std::map<std::uint32_t, double> tf;
  for (const std::string& tok : doc) {
    auto it = index_.find(std::string_view(tok));
    if (it != index_.end()) tf[it->second] += 1.0;
  }
  SparseVector v;
  v.index.reserve(tf.size());
  v.value.reserve(tf.size());
  double sq = 0;
  for (const auto& [i, count] : tf) {
    const double w = count * idf_[i];
    v.index.push_back(i);
    v.value.push_back(w);
    sq += w * w;
  }
  if (norm_ == TfidfNorm::L2 && sq > 0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (double& w : v.value) w *= inv;
  }
  return v;
}

TfidfVectorizer fit_tfidf(std::span<const TokenSeq> docs, double max_df, bool smoothing, TfidfNorm norm) {
  if (!(max_df > 0.0 && max_df <= 1.0)) throw InputError("max_df must be in (0, 1]");
  if (docs.empty()) throw InputError("cannot fit tf-idf on an empty corpus");

  std::map<std::string, std::uint64_t> df;
  std::vector<std::string_view> seen;
  for (const TokenSeq& doc : docs) {
    seen.assign(doc.begin(), doc.end());
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (std::string_view t : seen) ++df[std::string(t)];
  }

  const double n = static_cast<double>(docs.size());
  const double limit = max_df * n;
  std::vector<std::string> terms;
  std::vector<double> idf;
  for (const auto& [term, count] : df) {
    const double d = static_cast<double>(count);
    if (d > limit) continue;
    terms.push_back(term);
    idf.push_back(smoothing ? std::log((1.0 + n) / (1.0 + d)) + 1.0 : std::log(n / d) + 1.0);
  }
  return TfidfVectorizer(std::move(terms), std::move(idf), max_df, smoothing, norm);
}

nlohmann::json to_json(const TfidfVectorizer& v) {
  return {{"terms", v.terms()},
          {"idf", v.idf()},
          {"max_df", v.max_df()},
          {"smoothing", v.smoothing()},
          {"norm", v.norm() == TfidfNorm::L2 ? "l2" : "none"}};
}

TfidfVectorizer tfidf_from_json(const nlohmann::json& j) {
  try {
    const std::string norm = j.at("norm").get<std::string>();
    if (norm != "l2" && norm != "none") throw InputError("unknown tf-idf norm '" + norm + "'");
    return TfidfVectorizer(j.at("terms").get<std::vector<std::string>>(), j.at("idf").get<std::vector<double>>(),
                           j.at("max_df").get<double>(), j.at("smoothing").get<bool>(),
                           norm == "l2" ? TfidfNorm::L2 : TfidfNorm::None);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad tf-idf vectorizer: ") + e.what());
  }
}

}  // namespace pplfilter
