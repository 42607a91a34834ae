#pragma once

#include <filesystem>
#include <iosfwd>

#include "pplfilter/model.hpp"

namespace pplfilter {

// ARPA backoff format:
//
//   \data\ (header)
//   ngram 1=<count>
//   ...
//
//   \1-grams:
//   <log10 prob>\t<w1>[\t<log10 backoff>]
//   ...
//   \end\ (trailer)
//
// Backoffs are omitted at the highest order and when they are exactly zero.
// Values are written in the shortest decimal form that reads back to the same
// double, so reading a written model reproduces it exactly. Output order is
// the model's id order, which makes files byte-identical across runs.
void write_arpa(const KneserNeyModel& model, std::ostream& out);
void write_arpa(const KneserNeyModel& model, const std::filesystem::path& path);

// Throws InputError with the offending line number for malformed headers,
// sections, entries or count mismatches. Unigram entries are required for
// every word used in higher orders; missing sentinels are added with
// probability -99.
KneserNeyModel read_arpa(std::istream& in);
KneserNeyModel read_arpa(const std::filesystem::path& path);

}  // namespace pplfilter
