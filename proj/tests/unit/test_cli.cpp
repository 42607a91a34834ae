#include <sstream>

#include "doctest.h"
#include "pplfilter/cli.hpp"
#include "pplfilter/corpus.hpp"
#include "unit/helpers.hpp"

using namespace pplfilter;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus(int n, const std::string& prefix, const std::string& words, bool adult) {
  std::string text;
  for (int i = 0; i < n; ++i) {
    text += R"({"id":")" + prefix + std::to_string(i) + R"(","content":")" + words + " " + std::to_string(i % 7) + "\"";
    if (adult) text += R"(,"metadata":{"annotation":["adult"]})";
    text += "}\n";
  }
  return text;
}

}  // namespace

TEST_CASE("cli pipeline end to end") {
  testing::TempDir dir("cli");
  testing::write_file(dir / "a.jsonl", corpus(40, "a", "the red fox jumps over the lazy dog", true));
  testing::write_file(dir / "mixed.jsonl", corpus(20, "a", "the red fox jumps over the lazy dog", true) +
                                               corpus(20, "b", "quarterly revenue grew in the north region", false));
  const std::string model = (dir / "m.arpa").string();

  const Run train = run({"lm-train", "--input", (dir / "a.jsonl").string(), "--order", "3", "--out", model,
                         "--fallback-discounts"});
  REQUIRE(train.code == cli::kExitOk);
  const auto summary = nlohmann::json::parse(train.out);
  CHECK(summary["order"] == 3);

  const Run again = run({"lm-train", "--input", (dir / "a.jsonl").string(), "--order", "3", "--out",
                         (dir / "m2.arpa").string(), "--fallback-discounts"});
  REQUIRE(again.code == cli::kExitOk);
  CHECK(testing::read_file(dir / "m.arpa") == testing::read_file(dir / "m2.arpa"));

  const std::string input = (dir / "mixed.jsonl").string();
  REQUIRE(run({"score", "--model", model, "--input", input, "--out", (dir / "s1.jsonl").string(), "--threads", "1",
               "--batch", "3"})
              .code == cli::kExitOk);
  const Run scored = run({"score", "--model", model, "--input", input, "--out", (dir / "s8.jsonl").string(),
                          "--threads", "8", "--batch", "3"});
  REQUIRE(scored.code == cli::kExitOk);
  CHECK(scored.err.find("MB/s") != std::string::npos);
  CHECK(testing::read_file(dir / "s1.jsonl") == testing::read_file(dir / "s8.jsonl"));

  const std::string report = (dir / "report.json").string();
  REQUIRE(run({"sweep", "--scores", (dir / "s1.jsonl").string(), "--gold", input, "--grid", "20", "--out", report})
              .code == cli::kExitOk);
  const auto rep = nlohmann::json::parse(testing::read_file(report));
  CHECK(rep["grid"].size() >= 2);
  CHECK(rep["selected"].contains("argmax_f1"));

  const std::string labeled = (dir / "labeled.jsonl").string();
  REQUIRE(run({"classify", "--model", model, "--input", input, "--out", labeled, "--report", report}).code ==
          cli::kExitOk);
  const Run ev = run({"eval", "--pred", labeled, "--gold", input});
  REQUIRE(ev.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(ev.out)["f1_macro"] == 1.0);

  const Run none = run({"classify", "--model", model, "--input", input, "--out", labeled, "--theta", "1.0"});
  REQUIRE(none.code == cli::kExitOk);
  CHECK(none.err.find("0.00%") != std::string::npos);
  const ReadResult back = read_jsonlines(std::filesystem::path(labeled), LabelRule::None);
  CHECK(back.docs.size() == 40);

  const std::string bmodel = (dir / "nb.model").string();
  REQUIRE(run({"baseline", "train", "--kind", "nb", "--input", input, "--out", bmodel}).code == cli::kExitOk);
  const std::string bpred = (dir / "nb.jsonl").string();
  REQUIRE(run({"baseline", "predict", "--model", bmodel, "--input", input, "--out", bpred}).code == cli::kExitOk);
  CHECK(nlohmann::json::parse(run({"eval", "--pred", bpred, "--gold", input}).out)["f1_macro"] == 1.0);
}

TEST_CASE("cli exit codes") {
  testing::TempDir dir("cli_codes");
  testing::write_file(dir / "empty.jsonl", "");
  testing::write_file(dir / "gold.jsonl", corpus(3, "a", "x", true));
  testing::write_file(dir / "scores.jsonl", R"({"id":"a0","logprob":-1,"tokens":2,"ppl":3.1})"
                                            "\n"
                                            R"({"id":"a1","logprob":-1,"tokens":2,"ppl":3.1})"
                                            "\n"
                                            R"({"id":"a2","logprob":-1,"tokens":2,"ppl":3.1})"
                                            "\n");
  testing::write_file(dir / "bad.arpa", "not a model\n");
  testing::write_file(dir / "sizes.tsv", "name\tbytes\nEnglish\t3200000000000\nTiny\t0\n");

  CHECK(run({}).code == cli::kExitInput);
  CHECK(run({"--help"}).code == cli::kExitOk);
  CHECK(run({"frobnicate"}).code == cli::kExitInput);
  CHECK(run({"lm-train", "--input", (dir / "empty.jsonl").string(), "--out", (dir / "m.arpa").string()}).code ==
        cli::kExitInput);
  CHECK(run({"lm-train", "--input", (dir / "missing.jsonl").string(), "--out", (dir / "m.arpa").string()}).code ==
        cli::kExitInput);
  CHECK(run({"score", "--model", (dir / "bad.arpa").string(), "--input", (dir / "gold.jsonl").string(), "--out",
             (dir / "s.jsonl").string()})
            .code == cli::kExitInput);
  CHECK(run({"sweep", "--scores", (dir / "scores.jsonl").string(), "--gold", (dir / "gold.jsonl").string()}).code ==
        cli::kExitInput);
  CHECK(run({"classify", "--model", (dir / "bad.arpa").string(), "--input", (dir / "gold.jsonl").string(), "--out",
             (dir / "o.jsonl").string(), "--theta", "2", "--report", (dir / "gold.jsonl").string()})
            .code == cli::kExitInput);
  CHECK(run({"estimate-time", "--sizes", (dir / "sizes.tsv").string(), "--throughput", "0"}).code == cli::kExitInput);

  const Run est = run({"estimate-time", "--sizes", (dir / "sizes.tsv").string(), "--throughput", "20"});
  REQUIRE(est.code == cli::kExitOk);
  CHECK(est.out.find("English\t3200000000000\t44.4") != std::string::npos);
  CHECK(est.out.find("Tiny\t0\t0.0") != std::string::npos);
}

TEST_CASE("empty score input gives empty output") {
  testing::TempDir dir("cli_empty");
  testing::write_file(dir / "a.jsonl", corpus(10, "a", "one two three", false));
  testing::write_file(dir / "empty.jsonl", "");
  REQUIRE(run({"lm-train", "--input", (dir / "a.jsonl").string(), "--order", "2", "--out", (dir / "m.arpa").string(),
               "--fallback-discounts"})
              .code == cli::kExitOk);
  CHECK(run({"score", "--model", (dir / "m.arpa").string(), "--input", (dir / "empty.jsonl").string(), "--out",
             (dir / "s.jsonl").string()})
            .code == cli::kExitOk);
  CHECK(testing::read_file(dir / "s.jsonl").empty());
}

TEST_CASE("labeling time arithmetic") {
  CHECK(cli::estimate_hours(7.2e9, 20) == doctest::Approx(0.1));
  CHECK(cli::estimate_hours(0, 20) == 0.0);
  CHECK_THROWS(cli::estimate_hours(1, 0));
}
