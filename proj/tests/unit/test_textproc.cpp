#include <random>
#include <sstream>

#include "doctest.h"
#include "pplfilter/error.hpp"
#include "pplfilter/textproc.hpp"
#include "unit/helpers.hpp"

using namespace pplfilter;

namespace {

std::string join(const TokenSeq& t) {
  std::string s;
  for (const auto& w : t) s += (s.empty() ? "" : " ") + w;
  return s;
}

}  // namespace

TEST_CASE("lowercase then tokenize separates punctuation") {
  const Pipeline p({PipelineStep::lowercase(), PipelineStep::tokenize()});
  CHECK(p.run("Hello, WORLD") == TokenSeq{"hello", ",", "world"});
}

TEST_CASE("stopword removal") {
  std::istringstream words("the\n");
  const Pipeline p({PipelineStep::tokenize(), PipelineStep::remove_stopwords(read_stopwords(words))});
  CHECK(p.run("the cat") == TokenSeq{"cat"});
}

TEST_CASE("emoji replacement from the fixture map") {
  const EmojiMap map = load_emoji_map(testing::data_dir() / "fixtures" / "emoji.tsv");
  CHECK(map.size() == 2);
  const Pipeline p({PipelineStep::tokenize(), PipelineStep::replace_emoji(map)});
  CHECK(p.run("I \xe2\x9d\xa4 you") == TokenSeq{"I", ":heart:", "you"});
}

TEST_CASE("lm tokenizer") {
  CHECK(lm_tokenize("A b") == TokenSeq{"a", "b"});
  CHECK(lm_tokenize("").empty());
  CHECK(lm_tokenize("Don't stop.") == TokenSeq{"don", "'", "t", "stop", "."});
  CHECK(lm_tokenize("\xc3\x89T\xc3\x89\xe3\x80\x80ok?!") == TokenSeq{"\xc3\xa9t\xc3\xa9", "ok", "?!"});
}

TEST_CASE("lm tokenizer is idempotent on its own output") {
  std::mt19937_64 rng(5);
  const std::string alphabet[] = {"a", "B", " ", ".", ",", "'", "\xc3\x89", "\t", "z", "!", "\xe2\x9d\xa4", "9"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const int len = static_cast<int>(rng() % 40);
    for (int i = 0; i < len; ++i) text += alphabet[rng() % std::size(alphabet)];
    const TokenSeq once = lm_tokenize(text);
    CHECK(lm_tokenize(join(once)) == once);
    for (const auto& t : once) {
      CHECK_FALSE(t.empty());
      CHECK(t.find(' ') == std::string::npos);
    }
  }
}

TEST_CASE("for_each_lm_token matches lm_tokenize") {
  std::string scratch;
  const std::string text = "Mixed CASE, \xc3\x89l\xc3\xa8ve... end";
  TokenSeq got;
  for_each_lm_token(text, scratch, [&](std::string_view t) { got.emplace_back(t); });
  CHECK(got == lm_tokenize(text));
}

TEST_CASE("stopword removal never adds tokens and emoji replacement keeps the count") {
  const StopwordSet stop = load_stopwords(testing::data_dir() / "fixtures" / "stopwords.txt");
  const EmojiMap emoji = load_emoji_map(testing::data_dir() / "fixtures" / "emoji.tsv");
  const Pipeline base({PipelineStep::tokenize()});
  const Pipeline no_stop({PipelineStep::tokenize(), PipelineStep::remove_stopwords(stop)});
  const Pipeline with_emoji({PipelineStep::tokenize(), PipelineStep::replace_emoji(emoji)});
  for (const char* text : {"the cat and a dog", "a a a", "\xf0\x9f\x98\x82 the \xe2\x9d\xa4", ""}) {
    CHECK(no_stop.run(text).size() <= base.run(text).size());
    CHECK(with_emoji.run(text).size() == base.run(text).size());
  }
}

TEST_CASE("porter stemmer reference words") {
  CHECK(porter_stem("caresses") == "caress");
  CHECK(porter_stem("ponies") == "poni");
  CHECK(porter_stem("relational") == "relat");
  CHECK(porter_stem("hopping") == "hop");
  CHECK(porter_stem("generalization") == "gener");
  CHECK(porter_stem("running") == "run");
  CHECK(porter_stem("a") == "a");
  CHECK(porter_stem("\xc3\xa9t\xc3\xa9s") == "\xc3\xa9t\xc3\xa9s");
}

TEST_CASE("pipeline validation") {
  CHECK_THROWS_AS(Pipeline({PipelineStep::lowercase()}), InputError);
  CHECK_THROWS_AS(Pipeline({PipelineStep::tokenize(), PipelineStep::tokenize()}), InputError);
  CHECK_THROWS_AS(Pipeline({PipelineStep::stem(), PipelineStep::tokenize()}), InputError);
  CHECK_THROWS_AS(Pipeline({PipelineStep::tokenize(), PipelineStep::strip_urls()}), InputError);
}

TEST_CASE("pipeline from a config file resolves resources next to it") {
  const Pipeline p = Pipeline::load(testing::data_dir() / "fixtures" / "pipeline.json");
  CHECK(p.steps().size() == 5);
  CHECK(p.run("The Ponies and \xe2\x9d\xa4 running") == TokenSeq{"poni", ":heart:", "run"});
  CHECK_THROWS_AS(Pipeline::from_json(nlohmann::json::parse(R"({"steps":["tokenize",{"remove_stopwords":"missing.txt"}]})"),
                                      testing::data_dir()),
                  InputError);
}

TEST_CASE("url stripping") {
  const Pipeline p({PipelineStep::strip_urls(), PipelineStep::tokenize()});
  CHECK(p.run("see https://example.com/x?y=1 now") == TokenSeq{"see", "now"});
}
