#include "pplfilter/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include "pplfilter/error.hpp"

namespace pplfilter {

using nlohmann::json;

std::string_view label_name(Label label) {
  return label == Label::Harmful ? "harmful" : "non_harmful";
}

LabelRule parse_label_rule(std::string_view name) {
  if (name == "adult" || name == "from-adult-annotation") return LabelRule::FromAdultAnnotation;
  if (name == "harmful") return LabelRule::FixedHarmful;
  if (name == "non-harmful" || name == "non_harmful") return LabelRule::FixedNonHarmful;
  if (name == "none") return LabelRule::None;
  throw InputError("unknown label rule '" + std::string(name) +
                   "' (expected adult, harmful, non-harmful or none)");
}

bool Document::has_annotation(std::string_view tag) const {
  return std::find(annotations.begin(), annotations.end(), tag) != annotations.end();
}

namespace {

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; });
}

std::optional<Label> apply_rule(LabelRule rule, const Document& doc) {
  switch (rule) {
    case LabelRule::FromAdultAnnotation:
      return doc.has_annotation("adult") ? Label::Harmful : Label::NonHarmful;
    case LabelRule::FixedHarmful:
      return Label::Harmful;
    case LabelRule::FixedNonHarmful:
      return Label::NonHarmful;
    case LabelRule::None:
      break;
  }
  return std::nullopt;
}

}  // namespace

ParsedLine parse_line(std::string_view line, std::string_view source, std::size_t line_no,
                      LabelRule rule) {
  ParsedLine out;
  if (is_blank(line)) return out;

  json obj = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    out.status = LineStatus::Malformed;
    return out;
  }
  auto content = obj.find("content");
  if (content == obj.end() || !content->is_string()) {
    out.status = LineStatus::Malformed;
    return out;
  }

  Document& doc = out.doc;
  doc.content = content->get<std::string>();
  if (doc.content.empty()) {
    out.status = LineStatus::EmptyContent;
    return out;
  }

  if (auto id = obj.find("id"); id != obj.end() && id->is_string()) {
    doc.id = id->get<std::string>();
  } else {
    doc.id = std::string(source) + ":" + std::to_string(line_no);
  }
  doc.source = std::string(source);

  if (auto meta = obj.find("metadata"); meta != obj.end() && meta->is_object()) {
    if (auto ann = meta->find("annotation"); ann != meta->end() && ann->is_array()) {
      for (const auto& tag : *ann) {
        if (tag.is_string()) doc.annotations.push_back(tag.get<std::string>());
      }
    }
  }
  doc.gold_label = apply_rule(rule, doc);
  out.object = std::move(obj);
  out.status = LineStatus::Ok;
  return out;
}

ReadResult read_jsonlines(std::istream& in, std::string_view source, LabelRule rule) {
  ReadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ParsedLine parsed = parse_line(line, source, line_no, rule);
    switch (parsed.status) {
      case LineStatus::Ok:
        result.docs.push_back(std::move(parsed.doc));
        break;
      case LineStatus::Malformed:
        ++result.skipped_malformed;
        break;
      case LineStatus::EmptyContent:
        ++result.skipped_empty;
        break;
      case LineStatus::Blank:
        break;
    }
  }
  if (in.bad()) throw Error("read error in " + std::string(source));
  return result;
}

ReadResult read_jsonlines(const std::filesystem::path& path, LabelRule rule) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return read_jsonlines(in, path.filename().string(), rule);
}

json to_json(const Document& doc) {
  json obj;
  obj["id"] = doc.id;
  obj["content"] = doc.content;
  if (!doc.annotations.empty()) obj["metadata"]["annotation"] = doc.annotations;
  if (doc.gold_label) obj["label"] = label_name(*doc.gold_label);
  return obj;
}

void write_jsonlines(std::ostream& out, std::span<const Document> docs) {
  for (const Document& doc : docs) out << to_json(doc).dump() << '\n';
}

std::vector<Document> filter_by_annotation(std::span<const Document> docs, std::string_view tag) {
  std::vector<Document> out;
  std::copy_if(docs.begin(), docs.end(), std::back_inserter(out),
               [tag](const Document& d) { return d.has_annotation(tag); });
  return out;
}

DatasetSplit split_dataset(std::span<const Document> docs, SplitRatios ratios, std::uint64_t seed) {
  if (docs.size() < 3) throw InputError("split_dataset needs at least 3 documents");
  if (!(ratios.train > 0 && ratios.validation > 0 && ratios.test > 0)) {
    throw InputError("split ratios must be positive");
  }
  if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw InputError("split ratios must sum to 1");
  }

  // Fisher-Yates with an explicit reduction so the permutation does not depend
  // on the standard library's distribution implementation.
  std::vector<std::size_t> order(docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }

  const auto n = static_cast<double>(docs.size());
  const auto n_train = static_cast<std::size_t>(std::floor(n * ratios.train + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(n * ratios.validation + 1e-9));

  DatasetSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Document& d = docs[order[i]];
    if (i < n_train) {
      split.train.push_back(d);
    } else if (i < n_train + n_val) {
      split.validation.push_back(d);
    } else {
      split.test.push_back(d);
    }
  }
  return split;
}

}  // namespace pplfilter
