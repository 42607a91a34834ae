#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pplfilter {

using WordId = std::uint32_t;

inline constexpr std::string_view kUnk = "<unk>";
inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr WordId kUnkId = 0;
inline constexpr WordId kBosId = 1;
inline constexpr WordId kEosId = 2;

inline constexpr int kMaxOrder = 6;

// Word <-> id mapping. Ids 0..2 are <unk>, <s>, </s>; all other words follow
// in byte-lexicographic order so ids do not depend on corpus order or on the
// number of counting threads.
class Vocabulary {
 public:
  Vocabulary();

  // `words` may be unsorted and contain duplicates or sentinels.
  static Vocabulary from_words(std::vector<std::string> words);

  std::optional<WordId> find(std::string_view word) const;
  WordId id_or_unk(std::string_view word) const {
    auto id = find(word);
    return id ? *id : kUnkId;
  }
  const std::string& word(WordId id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  struct Slot {
    std::uint32_t id = 0;  // word id + 1; 0 marks an empty slot
    std::uint32_t tag = 0;
  };
  void insert(std::string word);
  void rehash(std::size_t capacity);

  std::vector<std::string> words_;
  std::vector<Slot> slots_;  // open addressing over words_
  std::uint64_t mask_ = 0;
};

// Fixed-capacity n-gram key; unused tail slots stay zero.
struct NGram {
  std::array<WordId, kMaxOrder> ids{};
  std::uint8_t size = 0;

  NGram() = default;
  explicit NGram(std::span<const WordId> words);

  std::span<const WordId> view() const { return {ids.data(), size}; }
  NGram suffix() const;  // drops the first word
  NGram prefix() const;  // drops the last word

  friend bool operator==(const NGram&, const NGram&) = default;
  friend auto operator<=>(const NGram& a, const NGram& b) {
    return std::lexicographical_compare_three_way(a.ids.begin(), a.ids.begin() + a.size, b.ids.begin(),
                                                  b.ids.begin() + b.size);
  }
};

inline std::uint64_t hash_ids(std::span<const WordId> ids) {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ ids.size();
  for (WordId w : ids) {
    h ^= w;
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 31;
  }
  // murmur3 finalizer; table slots are taken from the low bits
  h ^= h >> 33;
  h *= 0xFF51AFD7ED558CCDULL;
  h ^= h >> 33;
  return h;
}

struct NGramHash {
  std::size_t operator()(const NGram& g) const { return static_cast<std::size_t>(hash_ids(g.view())); }
};

}  // namespace pplfilter
