#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pplfilter/corpus.hpp"
#include "pplfilter/error.hpp"
#include "unit/helpers.hpp"

using namespace pplfilter;

namespace {

std::vector<Document> numbered_docs(std::size_t n) {
  std::vector<Document> docs(n);
  for (std::size_t i = 0; i < n; ++i) {
    docs[i].id = "d" + std::to_string(i);
    docs[i].content = "text " + std::to_string(i);
  }
  return docs;
}

std::vector<std::string> ids(const std::vector<Document>& docs) {
  std::vector<std::string> out;
  for (const Document& d : docs) out.push_back(d.id);
  return out;
}

}  // namespace

TEST_CASE("adult annotation marks a document harmful") {
  const ParsedLine p =
      parse_line(R"({"content":"hello","metadata":{"annotation":["adult"]}})", "f", 1, LabelRule::FromAdultAnnotation);
  REQUIRE(p.status == LineStatus::Ok);
  CHECK(p.doc.gold_label == Label::Harmful);
  CHECK(p.doc.id == "f:1");
  CHECK(p.doc.content == "hello");
}

TEST_CASE("missing annotation is non-harmful under the adult rule") {
  const ParsedLine p = parse_line(R"({"content":"hello"})", "f", 4, LabelRule::FromAdultAnnotation);
  REQUIRE(p.status == LineStatus::Ok);
  CHECK(p.doc.gold_label == Label::NonHarmful);
  CHECK(p.doc.id == "f:4");
}

TEST_CASE("fixed label rules and explicit ids") {
  CHECK(parse_line(R"({"id":"x","content":"a"})", "f", 1, LabelRule::FixedHarmful).doc.gold_label == Label::Harmful);
  CHECK(parse_line(R"({"content":"a"})", "f", 1, LabelRule::FixedNonHarmful).doc.gold_label == Label::NonHarmful);
  CHECK_FALSE(parse_line(R"({"content":"a"})", "f", 1, LabelRule::None).doc.gold_label.has_value());
  CHECK(parse_line(R"({"id":"x","content":"a"})", "f", 1, LabelRule::None).doc.id == "x");
  CHECK_THROWS_AS(parse_label_rule("sometimes"), InputError);
}

TEST_CASE("line statuses") {
  CHECK(parse_line("   ", "f", 1, LabelRule::None).status == LineStatus::Blank);
  CHECK(parse_line("{not json", "f", 1, LabelRule::None).status == LineStatus::Malformed);
  CHECK(parse_line(R"({"text":"no content"})", "f", 1, LabelRule::None).status == LineStatus::Malformed);
  CHECK(parse_line(R"({"content":""})", "f", 1, LabelRule::None).status == LineStatus::EmptyContent);
}

TEST_CASE("three-line fixture with one malformed line") {
  const ReadResult r = read_jsonlines(testing::data_dir() / "fixtures" / "three_lines.jsonl", LabelRule::FromAdultAnnotation);
  REQUIRE(r.docs.size() == 2);
  CHECK(r.skipped_malformed == 1);
  CHECK(r.docs[0].id == "three_lines.jsonl:1");
  CHECK(r.docs[1].id == "three_lines.jsonl:3");
  CHECK(r.docs[0].gold_label == Label::Harmful);
  CHECK(r.docs[1].gold_label == Label::NonHarmful);
}

TEST_CASE("unreadable file is an input error") {
  CHECK_THROWS_AS(read_jsonlines(testing::data_dir() / "no_such_file.jsonl", LabelRule::None), InputError);
}

TEST_CASE("write then read preserves count and content") {
  std::vector<Document> docs = numbered_docs(5);
  docs[1].content = "unicode \xc3\xa9t\xc3\xa9 \xe2\x9d\xa4 \"quoted\"\nnew line";
  docs[2].annotations = {"adult", "tiny"};
  std::ostringstream out;
  write_jsonlines(out, docs);
  std::istringstream in(out.str());
  const ReadResult back = read_jsonlines(in, "mem", LabelRule::FromAdultAnnotation);
  REQUIRE(back.docs.size() == docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    CHECK(back.docs[i].id == docs[i].id);
    CHECK(back.docs[i].content == docs[i].content);
    CHECK(back.docs[i].annotations == docs[i].annotations);
  }
  CHECK(back.docs[2].gold_label == Label::Harmful);
}

TEST_CASE("filter by annotation") {
  std::vector<Document> docs = numbered_docs(3);
  docs[0].annotations = {"adult"};
  docs[2].annotations = {"short", "adult"};
  CHECK(ids(filter_by_annotation(docs, "adult")) == std::vector<std::string>{"d0", "d2"});
  CHECK(filter_by_annotation(std::vector<Document>{}, "adult").empty());

  std::vector<Document> many = numbered_docs(100);
  std::mt19937_64 rng(3);
  std::size_t tagged = 0;
  for (Document& d : many) {
    if (rng() % 3 == 0) {
      d.annotations.push_back("adult");
      ++tagged;
    }
  }
  const auto kept = filter_by_annotation(many, "adult");
  CHECK(kept.size() == tagged);
  CHECK(std::all_of(kept.begin(), kept.end(), [](const Document& d) { return d.has_annotation("adult"); }));
}

TEST_CASE("split sizes follow the floor rule") {
  const auto ten = split_dataset(numbered_docs(10), {0.6, 0.2, 0.2}, 7);
  CHECK(ten.train.size() == 6);
  CHECK(ten.validation.size() == 2);
  CHECK(ten.test.size() == 2);
  // floor(3.5) = 3, floor(1.75) = 1, remainder 3
  const auto seven = split_dataset(numbered_docs(7), {0.5, 0.25, 0.25}, 7);
  CHECK(seven.train.size() == 3);
  CHECK(seven.validation.size() == 1);
  CHECK(seven.test.size() == 3);
}

TEST_CASE("split is deterministic for a seed") {
  const auto docs = numbered_docs(50);
  const auto a = split_dataset(docs, {0.6, 0.2, 0.2}, 7);
  const auto b = split_dataset(docs, {0.6, 0.2, 0.2}, 7);
  CHECK(ids(a.train) == ids(b.train));
  CHECK(ids(a.validation) == ids(b.validation));
  CHECK(ids(a.test) == ids(b.test));
  CHECK(ids(split_dataset(docs, {0.6, 0.2, 0.2}, 8).train) != ids(a.train));
}

TEST_CASE("split is a partition") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng() % 200;
    const auto docs = numbered_docs(n);
    const auto s = split_dataset(docs, {0.7, 0.15, 0.15}, rng());
    std::set<std::string> seen;
    for (const auto* part : {&s.train, &s.validation, &s.test}) {
      for (const Document& d : *part) CHECK(seen.insert(d.id).second);
    }
    CHECK(seen.size() == n);
  }
}

TEST_CASE("split preconditions") {
  CHECK_THROWS_AS(split_dataset(numbered_docs(2), {0.6, 0.2, 0.2}, 1), InputError);
  CHECK_THROWS_AS(split_dataset(numbered_docs(10), {0.6, 0.2, 0.3}, 1), InputError);
  CHECK_THROWS_AS(split_dataset(numbered_docs(10), {1.0, 0.0, 0.0}, 1), InputError);
}
