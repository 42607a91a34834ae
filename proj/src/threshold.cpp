#include "pplfilter/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pplfilter/error.hpp"

namespace pplfilter {

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

namespace {

ClassDistribution describe(Label label, std::vector<double> values) {
  std::sort(values.begin(), values.end());
  ClassDistribution d;
  d.label = label;
  d.count = values.size();
  d.min = values.front();
  d.q1 = quantile(values, 0.25);
  d.median = quantile(values, 0.5);
  d.q3 = quantile(values, 0.75);
  d.max = values.back();
  return d;
}

void require_both_classes(std::span<const LabeledScore> scores) {
  const auto harmful = std::count_if(scores.begin(), scores.end(), [](const LabeledScore& s) { return s.gold == Label::Harmful; });
  if (harmful == 0) throw InputError("no gold-harmful scores; both classes are required");
  if (static_cast<std::size_t>(harmful) == scores.size()) throw InputError("no gold-non-harmful scores; both classes are required");
}

}  // namespace

std::pair<ClassDistribution, ClassDistribution> summarize_distributions(std::span<const LabeledScore> scores) {
  require_both_classes(scores);
  std::vector<double> harmful, other;
  for (const LabeledScore& s : scores) (s.gold == Label::Harmful ? harmful : other).push_back(s.ppl);
  return {describe(Label::Harmful, std::move(harmful)), describe(Label::NonHarmful, std::move(other))};
}

EvalReport evaluate_threshold(std::span<const LabeledScore> scores, double theta) {
  ConfusionCounts c;
  for (const LabeledScore& s : scores) c.add(s.gold, classify(s.ppl, theta));
  return report(c);
}

std::vector<double> quantile_grid(std::span<const double> values, int grid_size) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(grid_size));
  for (int i = 1; i <= grid_size; ++i) {
    const double theta = quantile(sorted, static_cast<double>(i) / static_cast<double>(grid_size + 1));
    if (grid.empty() || theta > grid.back()) grid.push_back(theta);
  }
  return grid;
}

ThresholdReport sweep_thresholds(std::span<const LabeledScore> scores, int grid_size) {
  if (grid_size < 2) throw InputError("grid size must be at least 2");
  require_both_classes(scores);

  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(), [](const LabeledScore& a, const LabeledScore& b) { return a.ppl < b.ppl; });
  std::vector<double> ppls;
  ppls.reserve(sorted.size());
  std::uint64_t harmful_total = 0;
  for (const LabeledScore& s : sorted) {
    ppls.push_back(s.ppl);
    if (s.gold == Label::Harmful) ++harmful_total;
  }
  const std::uint64_t other_total = sorted.size() - harmful_total;

  ThresholdReport r;
  // One pass: thresholds ascend, so the set predicted harmful only grows.
  std::size_t next = 0;
  std::uint64_t tp = 0, fp = 0;
  for (double theta : quantile_grid(ppls, grid_size)) {
    while (next < sorted.size() && sorted[next].ppl <= theta) {
      ++(sorted[next].gold == Label::Harmful ? tp : fp);
      ++next;
    }
    const EvalReport e = report({tp, other_total - fp, fp, harmful_total - tp});
    r.grid.push_back({theta, e.f1_macro, e.harmful.f1, e.non_harmful.f1, e.accuracy});
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < r.grid.size(); ++i) {
    if (r.grid[i].f1_macro > r.grid[best].f1_macro) best = i;
  }
  r.selected.argmax_f1 = r.grid[best].theta;

  r.selected.max_harmful = 0;
  for (const LabeledScore& s : sorted) {
    if (s.gold == Label::Harmful) r.selected.max_harmful = s.ppl;
  }

  std::size_t steep = 0;
  double steepest = -1;
  for (std::size_t i = 0; i + 1 < r.grid.size(); ++i) {
    const ThresholdPoint& a = r.grid[i];
    const ThresholdPoint& b = r.grid[i + 1];
    const double jump = std::abs(b.f1_macro - a.f1_macro) + std::abs(b.f1_harmful - a.f1_harmful) +
                        std::abs(b.f1_non_harmful - a.f1_non_harmful) + std::abs(b.accuracy - a.accuracy);
    if (jump > steepest) {
      steepest = jump;
      steep = i + 1;
    }
  }
  r.selected.steepest_step = r.grid[steep].theta;
  return r;
}

std::vector<IdLabel> classify_by_threshold(std::span<const PerplexityScore> scores, double theta) {
  if (!std::isfinite(theta) || theta <= 0) throw InputError("threshold must be finite and positive");
  std::vector<IdLabel> out;
  out.reserve(scores.size());
  for (const PerplexityScore& s : scores) out.emplace_back(s.doc_id, classify(s.ppl, theta));
  return out;
}

nlohmann::json to_json(const ThresholdReport& r) {
  nlohmann::json grid = nlohmann::json::array();
  for (const ThresholdPoint& p : r.grid) {
    grid.push_back({{"theta", p.theta},
                    {"f1_macro", p.f1_macro},
                    {"f1_harmful", p.f1_harmful},
                    {"f1_non_harmful", p.f1_non_harmful},
                    {"accuracy", p.accuracy}});
  }
  return {{"grid", grid},
          {"selected",
           {{"argmax_f1", r.selected.argmax_f1},
            {"max_harmful", r.selected.max_harmful},
            {"steepest_step", r.selected.steepest_step}}}};
}

nlohmann::json to_json(const ClassDistribution& d) {
  return {{"label", label_name(d.label)}, {"count", d.count}, {"min", d.min}, {"q1", d.q1},
          {"median", d.median},          {"q3", d.q3},       {"max", d.max}};
}

std::string to_tsv(const ThresholdReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << "theta\tf1_macro\tf1_harmful\tf1_non_harmful\taccuracy\n";
  for (const ThresholdPoint& p : r.grid) {
    out << p.theta << '\t' << p.f1_macro << '\t' << p.f1_harmful << '\t' << p.f1_non_harmful << '\t' << p.accuracy
        << '\n';
  }
  return out.str();
}

}  // namespace pplfilter
