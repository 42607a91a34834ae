#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "pplfilter/baselines/common.hpp"
#include "pplfilter/textproc.hpp"

namespace pplfilter {

enum class TfidfNorm { L2, None };

class TfidfVectorizer {
 public:
  TfidfVectorizer() = default;
  // `terms` must be sorted and unique; `idf` runs parallel to it.
  TfidfVectorizer(std::vector<std::string> terms, std::vector<double> idf, double max_df, bool smoothing,
                  TfidfNorm norm);

  // tf = raw term count; OOV tokens are dropped.
  SparseVector transform(std::span<const std::string> doc) const;

  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  // -1 when absent.
  std::int64_t index_of(std::string_view term) const;
  double max_df() const { return max_df_; }
  bool smoothing() const { return smoothing_; }
  TfidfNorm norm() const { return norm_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
  double max_df_ = 1.0;
  bool smoothing_ = true;
  TfidfNorm norm_ = TfidfNorm::L2;
};

// idf = ln((1 + N) / (1 + df)) + 1 with smoothing, ln(N / df) + 1 without.
// Terms with df > max_df * N are dropped. Throws InputError on an empty corpus
// or max_df outside (0, 1].
TfidfVectorizer fit_tfidf(std::span<const TokenSeq> docs, double max_df = 1.0, bool smoothing = true,
                          TfidfNorm norm = TfidfNorm::L2);

nlohmann::json to_json(const TfidfVectorizer& v);
TfidfVectorizer tfidf_from_json(const nlohmann::json& j);

}  // namespace pplfilter
