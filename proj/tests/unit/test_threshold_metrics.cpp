#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pplfilter/error.hpp"
#include "pplfilter/metrics.hpp"
#include "pplfilter/threshold.hpp"

using namespace pplfilter;

namespace {

// F1 of the positive class straight from its definition.
double f1_by_hand(double tp, double fp, double fn) {
  const double p = tp + fp > 0 ? tp / (tp + fp) : 0;
  const double r = tp + fn > 0 ? tp / (tp + fn) : 0;
  return p + r > 0 ? 2 * p * r / (p + r) : 0;
}

double macro_by_hand(std::span<const LabeledScore> scores, double theta) {
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (const LabeledScore& s : scores) {
    const bool pred = s.ppl <= theta;
    const bool gold = s.gold == Label::Harmful;
    tp += pred && gold;
    tn += !pred && !gold;
    fp += pred && !gold;
    fn += !pred && gold;
  }
  return (f1_by_hand(tp, fp, fn) + f1_by_hand(tn, fn, fp)) / 2;
}

}  // namespace

TEST_CASE("quartiles by linear interpolation") {
  std::vector<LabeledScore> s;
  for (double v : {1, 2, 3, 4, 5}) s.push_back({v, Label::Harmful});
  // 8 values 10..80: q1 position 1.75 -> 27.5, median 3.5 -> 45, q3 5.25 -> 62.5
  for (double v : {80, 10, 70, 20, 60, 30, 50, 40}) s.push_back({v, Label::NonHarmful});
  const auto [h, n] = summarize_distributions(s);
  CHECK(h.count == 5);
  CHECK(h.q1 == 2);
  CHECK(h.median == 3);
  CHECK(h.q3 == 4);
  CHECK(n.min == 10);
  CHECK(n.q1 == doctest::Approx(27.5));
  CHECK(n.median == doctest::Approx(45));
  CHECK(n.q3 == doctest::Approx(62.5));
  CHECK(n.max == 80);

  const std::vector<LabeledScore> one = {{7, Label::Harmful}, {9, Label::NonHarmful}};
  const auto [h1, n1] = summarize_distributions(one);
  CHECK((h1.min == 7 && h1.q1 == 7 && h1.median == 7 && h1.q3 == 7 && h1.max == 7));
  CHECK((n1.min == 9 && n1.q3 == 9));
  CHECK_THROWS_AS(summarize_distributions(std::vector<LabeledScore>{{1, Label::Harmful}}), InputError);
}

TEST_CASE("separated classes reach macro F1 of one") {
  std::vector<LabeledScore> s;
  for (int i = 0; i < 50; ++i) s.push_back({1.0 + i, Label::Harmful});
  for (int i = 0; i < 50; ++i) s.push_back({100.0 + i, Label::NonHarmful});
  const ThresholdReport r = sweep_thresholds(s);
  CHECK(evaluate_threshold(s, r.selected.argmax_f1).f1_macro == 1.0);
  CHECK(r.selected.argmax_f1 >= 50.0);
  CHECK(r.selected.argmax_f1 < 100.0);
  CHECK(r.selected.max_harmful == 50.0);
}

TEST_CASE("sweep curves equal per-threshold brute force") {
  // six points, one overlapping pair
  const std::vector<LabeledScore> s = {{1, Label::Harmful},    {2, Label::Harmful},    {4, Label::NonHarmful},
                                       {3, Label::Harmful},    {5, Label::NonHarmful}, {6, Label::NonHarmful}};
  const ThresholdReport r = sweep_thresholds(s, 10);
  for (const ThresholdPoint& p : r.grid) CHECK(p.f1_macro == doctest::Approx(macro_by_hand(s, p.theta)).epsilon(1e-15));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> harmful(3, 1), other(4, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LabeledScore> mixed;
    for (int i = 0; i < 200; ++i) {
      const bool h = rng() % 3 == 0;
      mixed.push_back({std::exp(h ? harmful(rng) : other(rng)), h ? Label::Harmful : Label::NonHarmful});
    }
    const ThresholdReport rep = sweep_thresholds(mixed);
    double best = -1, best_theta = 0;
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
      const ThresholdPoint& p = rep.grid[i];
      if (i) CHECK(p.theta > rep.grid[i - 1].theta);
      const EvalReport e = evaluate_threshold(mixed, p.theta);
      CHECK(p.f1_macro == e.f1_macro);
      CHECK(p.accuracy == e.accuracy);
      if (e.f1_macro > best) {
        best = e.f1_macro;
        best_theta = p.theta;
      }
    }
    CHECK(rep.selected.argmax_f1 == best_theta);
  }
}

TEST_CASE("steepest step picks the point after the largest summed jump") {
  const std::vector<LabeledScore> s = {{1, Label::Harmful}, {2, Label::Harmful}, {3, Label::Harmful},
                                       {10, Label::NonHarmful}, {11, Label::NonHarmful}, {12, Label::NonHarmful}};
  const ThresholdReport r = sweep_thresholds(s, 5);
  double largest = -1;
  double expected = 0;
  for (std::size_t i = 0; i + 1 < r.grid.size(); ++i) {
    const auto& a = r.grid[i];
    const auto& b = r.grid[i + 1];
    const double jump = std::abs(b.f1_macro - a.f1_macro) + std::abs(b.f1_harmful - a.f1_harmful) +
                        std::abs(b.f1_non_harmful - a.f1_non_harmful) + std::abs(b.accuracy - a.accuracy);
    if (jump > largest) {
      largest = jump;
      expected = b.theta;
    }
  }
  CHECK(r.selected.steepest_step == expected);
}

TEST_CASE("sweep preconditions") {
  const std::vector<LabeledScore> s = {{1, Label::Harmful}, {2, Label::NonHarmful}};
  CHECK_THROWS_AS(sweep_thresholds(s, 1), InputError);
  CHECK_THROWS_AS(sweep_thresholds(std::vector<LabeledScore>{{1, Label::Harmful}, {2, Label::Harmful}}), InputError);
}

TEST_CASE("classification by threshold") {
  const std::vector<PerplexityScore> s = {{"a", 0, 1, 4.0}, {"b", 0, 1, 4.22}, {"c", 0, 1, 9.0}};
  const auto labels = classify_by_threshold(s, 4.22);
  CHECK(labels[0].second == Label::Harmful);
  CHECK(labels[1].second == Label::Harmful);
  CHECK(labels[2].second == Label::NonHarmful);
  CHECK(labels[2].first == "c");
  for (const auto& [id, l] : classify_by_threshold(s, 1.0)) CHECK(l == Label::NonHarmful);
  CHECK_THROWS_AS(classify_by_threshold(s, 0.0), InputError);
  CHECK_THROWS_AS(classify_by_threshold(s, INFINITY), InputError);
}

TEST_CASE("harmful count grows with theta and labels are scale equivariant") {
  std::mt19937_64 rng(8);
  std::lognormal_distribution<double> ppl(3, 1);
  std::vector<PerplexityScore> s;
  for (int i = 0; i < 300; ++i) s.push_back({std::to_string(i), 0, 1, ppl(rng)});
  auto harmful = [](const std::vector<IdLabel>& l) {
    return std::count_if(l.begin(), l.end(), [](const IdLabel& x) { return x.second == Label::Harmful; });
  };
  long previous = -1;
  for (double theta = 1; theta < 500; theta *= 1.3) {
    const auto labels = classify_by_threshold(s, theta);
    CHECK(harmful(labels) >= previous);
    previous = harmful(labels);
    std::vector<PerplexityScore> scaled = s;
    for (auto& x : scaled) x.ppl *= 8.0;
    const auto scaled_labels = classify_by_threshold(scaled, theta * 8.0);
    CHECK(scaled_labels == labels);
  }
}

TEST_CASE("confusion join") {
  std::vector<IdLabel> gold, perfect, negative;
  for (int i = 0; i < 10; ++i) {
    const Label l = i < 4 ? Label::Harmful : Label::NonHarmful;
    gold.emplace_back(std::to_string(i), l);
    perfect.emplace_back(std::to_string(9 - i), i >= 6 ? Label::Harmful : Label::NonHarmful);
    negative.emplace_back(std::to_string(i), Label::NonHarmful);
  }
  CHECK(confusion(perfect, gold) == ConfusionCounts{4, 6, 0, 0});
  const ConfusionCounts neg = confusion(negative, gold);
  CHECK(neg.tp == 0);
  CHECK(neg.fn == 4);
  CHECK(report(neg).harmful.f1 == 0.0);

  std::vector<IdLabel> short_preds(perfect.begin(), perfect.end() - 1);
  short_preds.emplace_back("extra", Label::Harmful);
  CHECK_THROWS_WITH_AS(confusion(short_preds, gold), doctest::Contains("extra"), InputError);
}

TEST_CASE("report arithmetic") {
  const EvalReport r = report({2, 0, 1, 1});
  CHECK(r.harmful.precision == doctest::Approx(2.0 / 3));
  CHECK(r.harmful.recall == doctest::Approx(2.0 / 3));
  CHECK(r.harmful.f1 == doctest::Approx(2.0 / 3));

  const EvalReport part1 = report({28, 118110, 0, 1187});
  CHECK(part1.harmful.f1 == doctest::Approx(56.0 / 1243.0).epsilon(1e-12));
  CHECK(std::abs(part1.harmful.f1 - 0.0451) < 1e-4);

  const EvalReport degenerate = report({0, 10, 0, 0});
  CHECK(degenerate.harmful.f1 == 0.0);
  CHECK(degenerate.harmful.degenerate);
  CHECK(degenerate.non_harmful.f1 == 1.0);
  CHECK(degenerate.f1_macro == 0.5);
}

TEST_CASE("report properties on random tables") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const ConfusionCounts c{rng() % 50, rng() % 50, rng() % 50, rng() % 50 + 1};
    const EvalReport r = report(c);
    const EvalReport s = report(c.swapped());
    CHECK(s.harmful.f1 == r.non_harmful.f1);
    CHECK(s.non_harmful.f1 == r.harmful.f1);
    CHECK(s.f1_macro == r.f1_macro);
    CHECK(r.accuracy == static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total()));
    CHECK(r.f1_macro == (r.harmful.f1 + r.non_harmful.f1) / 2);
    CHECK(r.harmful.f1 == doctest::Approx(f1_by_hand(c.tp, c.fp, c.fn)).epsilon(1e-12));
    const std::uint64_t k = 1 + rng() % 7;
    const EvalReport scaled = report({c.tp * k, c.tn * k, c.fp * k, c.fn * k});
    CHECK(scaled.f1_macro == doctest::Approx(r.f1_macro).epsilon(1e-14));
    CHECK(scaled.accuracy == doctest::Approx(r.accuracy).epsilon(1e-14));
    for (double v : {r.harmful.f1, r.non_harmful.f1, r.f1_macro, r.accuracy}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}
