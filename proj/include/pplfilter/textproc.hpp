#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "pplfilter/unicode.hpp"

namespace pplfilter {

// Non-empty tokens without whitespace.
using TokenSeq = std::vector<std::string>;

// Splits on Unicode whitespace and separates runs of punctuation into their
// own tokens. Case is preserved.
TokenSeq tokenize(std::string_view text);

// Fixed tokenization used for every language-model operation: lowercase, then
// tokenize(). Not configurable so that models and thresholds stay comparable.
TokenSeq lm_tokenize(std::string_view text);

// Allocation-light variant of lm_tokenize for the scoring kernels. `scratch`
// receives the lowercased text; `fn` is called with views into it.
template <class Fn>
void for_each_lm_token(std::string_view text, std::string& scratch, Fn&& fn);

// Porter (1980) suffix stripping for lowercase ASCII words; anything else is
// returned unchanged.
std::string porter_stem(std::string_view word);

using StopwordSet = std::unordered_set<std::string>;

// Emoji code point sequences to aliases such as ":heart:". Matching is
// longest-first at each code point boundary.
class EmojiMap {
 public:
  void add(std::string emoji, std::string alias);
  std::string replace(std::string_view token) const;
  std::size_t size() const { return aliases_.size(); }

 private:
  std::unordered_map<std::string, std::string> aliases_;
  std::size_t max_key_bytes_ = 0;
};

StopwordSet load_stopwords(const std::filesystem::path& path);
StopwordSet read_stopwords(std::istream& in);
EmojiMap load_emoji_map(const std::filesystem::path& path);
EmojiMap read_emoji_map(std::istream& in);

enum class StepKind { Lowercase, StripUrls, StripSpecialChars, Tokenize, RemoveStopwords, ReplaceEmoji, Stem };

struct PipelineStep {
  StepKind kind;
  std::shared_ptr<const StopwordSet> stopwords;  // RemoveStopwords only
  std::shared_ptr<const EmojiMap> emoji;         // ReplaceEmoji only

  static PipelineStep lowercase() { return {StepKind::Lowercase, nullptr, nullptr}; }
  static PipelineStep strip_urls() { return {StepKind::StripUrls, nullptr, nullptr}; }
  static PipelineStep strip_special_chars() { return {StepKind::StripSpecialChars, nullptr, nullptr}; }
  static PipelineStep tokenize() { return {StepKind::Tokenize, nullptr, nullptr}; }
  static PipelineStep stem() { return {StepKind::Stem, nullptr, nullptr}; }
  static PipelineStep remove_stopwords(StopwordSet words);
  static PipelineStep replace_emoji(EmojiMap map);
};

// An ordered, validated list of preprocessing steps. Steps before Tokenize see
// raw text, steps after it see tokens. Immutable and safe to share.
class Pipeline {
 public:
  // Throws InputError when Tokenize is missing or repeated, or when a step is
  // used on the wrong side of Tokenize.
  explicit Pipeline(std::vector<PipelineStep> steps);

  // {"steps": ["lowercase", "tokenize", {"remove_stopwords": "stop.txt"},
  //            {"replace_emoji": "emoji.tsv"}, "stem"]}
  // Resource paths are resolved against `base_dir`.
  static Pipeline from_json(const nlohmann::json& config, const std::filesystem::path& base_dir = {});
  static Pipeline load(const std::filesystem::path& config_path);
  static Pipeline default_pipeline();

  TokenSeq run(std::string_view text) const;
  const std::vector<PipelineStep>& steps() const { return steps_; }

 private:
  std::vector<PipelineStep> steps_;
  std::size_t tokenize_at_ = 0;
};

// ---------------------------------------------------------------------------

namespace detail {

enum class CharClass { Space, Punct, Word };

inline CharClass classify(char32_t cp) {
  if (unicode::is_space(cp)) return CharClass::Space;
  if (unicode::is_punct(cp)) return CharClass::Punct;
  return CharClass::Word;
}

inline CharClass classify_ascii(unsigned char b) {
  static constexpr auto kTable = [] {
    std::array<CharClass, 128> t{};
    for (int c = 0; c < 128; ++c) {
      if (c == ' ' || (c >= 0x09 && c <= 0x0D)) {
        t[c] = CharClass::Space;
      } else if ((c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
                 (c >= 0x7B && c <= 0x7E)) {
        t[c] = CharClass::Punct;
      } else {
        t[c] = CharClass::Word;
      }
    }
    return t;
  }();
  return kTable[b];
}

// Calls fn(std::string_view) for each token of `text`.
template <class Fn>
void split_tokens(std::string_view text, Fn&& fn) {
  std::size_t start = 0;
  CharClass current = CharClass::Space;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b = static_cast<unsigned char>(text[i]);
    CharClass cls;
    std::size_t len = 1;
    if (b < 0x80) {
      cls = classify_ascii(b);
    } else {
      const unicode::Decoded d = unicode::decode(text, i);
      cls = classify(d.cp);
      len = d.len;
    }
    if (cls != current) {
      if (current != CharClass::Space) fn(text.substr(start, i - start));
      start = i;
      current = cls;
    }
    i += len;
  }
  if (current != CharClass::Space) fn(text.substr(start, text.size() - start));
}

}  // namespace detail

template <class Fn>
void for_each_lm_token(std::string_view text, std::string& scratch, Fn&& fn) {
  unicode::to_lower_into(text, scratch);
  detail::split_tokens(std::string_view(scratch), std::forward<Fn>(fn));
}

}  // namespace pplfilter
