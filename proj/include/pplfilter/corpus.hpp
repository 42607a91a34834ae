#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pplfilter {

enum class Label { Harmful, NonHarmful };

std::string_view label_name(Label label);

// How gold labels are assigned while reading a corpus.
enum class LabelRule { FromAdultAnnotation, FixedHarmful, FixedNonHarmful, None };

LabelRule parse_label_rule(std::string_view name);

// One web-crawl record. Immutable once read.
struct Document {
  std::string id;
  std::string content;
  std::vector<std::string> annotations;
  std::optional<Label> gold_label;
  std::string source;

  bool has_annotation(std::string_view tag) const;
};

struct ReadResult {
  std::vector<Document> docs;
  std::size_t skipped_malformed = 0;
  std::size_t skipped_empty = 0;

  std::size_t skipped() const { return skipped_malformed + skipped_empty; }
};

// Outcome of parsing a single JSONLines record.
enum class LineStatus { Ok, Blank, Malformed, EmptyContent };

struct ParsedLine {
  LineStatus status = LineStatus::Blank;
  Document doc;
  nlohmann::json object;  // the full record, kept for re-emission
};

// Parses one line. `source` is the file basename used to synthesize ids as
// "<source>:<line_no>" when the record carries no "id" string.
ParsedLine parse_line(std::string_view line, std::string_view source, std::size_t line_no,
                      LabelRule rule);

// Reads a whole OSCAR-style JSONLines file. Malformed lines and lines with
// empty content are skipped and counted; an unreadable file throws InputError.
ReadResult read_jsonlines(const std::filesystem::path& path, LabelRule rule);
ReadResult read_jsonlines(std::istream& in, std::string_view source, LabelRule rule);

// Re-serializes documents in the input schema plus "id" (and "label" when set).
void write_jsonlines(std::ostream& out, std::span<const Document> docs);
nlohmann::json to_json(const Document& doc);

std::vector<Document> filter_by_annotation(std::span<const Document> docs, std::string_view tag);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<Document> train;
  std::vector<Document> validation;
  std::vector<Document> test;
  std::uint64_t seed = 0;
};

// Seeded shuffle then contiguous partition. Train and validation sizes are
// floor(n * ratio); test takes the remainder.
DatasetSplit split_dataset(std::span<const Document> docs, SplitRatios ratios, std::uint64_t seed);

}  // namespace pplfilter
