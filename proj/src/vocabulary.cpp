#include "pplfilter/vocabulary.hpp"

#include <algorithm>
#include <bit>
#include <functional>

#include "pplfilter/error.hpp"

namespace pplfilter {

namespace {

std::uint64_t word_hash(std::string_view w) { return std::hash<std::string_view>{}(w) * 0x9E3779B97F4A7C15ULL; }

}  // namespace

Vocabulary::Vocabulary() {
  rehash(16);
  for (std::string_view w : {kUnk, kBos, kEos}) insert(std::string(w));
}

void Vocabulary::rehash(std::size_t capacity) {
  slots_.assign(capacity, Slot{});
  mask_ = capacity - 1;
  for (std::size_t id = 0; id < words_.size(); ++id) {
    const std::uint64_t h = word_hash(words_[id]);
    std::uint64_t slot = h >> 32 & mask_;
    while (slots_[slot].id != 0) slot = (slot + 1) & mask_;
    slots_[slot] = {static_cast<std::uint32_t>(id + 1), static_cast<std::uint32_t>(h)};
  }
}

void Vocabulary::insert(std::string word) {
  if (words_.size() >= 0xFFFFFFFEu) throw Error("vocabulary too large");
  words_.push_back(std::move(word));
  if (words_.size() * 2 > slots_.size()) {
    rehash(slots_.size() * 2);
    return;
  }
  const std::uint64_t h = word_hash(words_.back());
  std::uint64_t slot = h >> 32 & mask_;
  while (slots_[slot].id != 0) slot = (slot + 1) & mask_;
  slots_[slot] = {static_cast<std::uint32_t>(words_.size()), static_cast<std::uint32_t>(h)};
}

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  Vocabulary v;
  v.words_.reserve(words.size() + 3);
  v.rehash(std::bit_ceil(std::max<std::size_t>(16, (words.size() + 3) * 2)));
  for (std::string& w : words) {
    if (w == kUnk || w == kBos || w == kEos) continue;
    v.insert(std::move(w));
  }
  return v;
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  const std::uint64_t h = word_hash(word);
  const auto tag = static_cast<std::uint32_t>(h);
  std::uint64_t slot = h >> 32 & mask_;
  while (true) {
    const Slot s = slots_[slot];
    if (s.id == 0) return std::nullopt;
    if (s.tag == tag && words_[s.id - 1] == word) return static_cast<WordId>(s.id - 1);
    slot = (slot + 1) & mask_;
  }
}

NGram::NGram(std::span<const WordId> words) {
  if (words.size() > static_cast<std::size_t>(kMaxOrder)) throw Error("n-gram longer than the maximum order");
  std::copy(words.begin(), words.end(), ids.begin());
  size = static_cast<std::uint8_t>(words.size());
}

NGram NGram::suffix() const { return NGram(view().subspan(1)); }

NGram NGram::prefix() const { return NGram(view().first(size - 1u)); }

}  // namespace pplfilter
