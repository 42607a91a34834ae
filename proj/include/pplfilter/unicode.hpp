#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace pplfilter::unicode {

// One decoded code point and the number of bytes it occupied. Invalid UTF-8
// decodes to U+FFFD with length 1 so scanning always makes progress.
struct Decoded {
  char32_t cp;
  std::size_t len;
};

Decoded decode(std::string_view s, std::size_t pos);
void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);

// Simple one-to-one lowercase mapping covering ASCII, Latin-1, Latin
// Extended-A, Greek, Cyrillic, Armenian and fullwidth Latin. Other scripts
// map to themselves.
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view s);
// Same as to_lower, reusing the capacity of `out`.
void to_lower_into(std::string_view s, std::string& out);

}  // namespace pplfilter::unicode
