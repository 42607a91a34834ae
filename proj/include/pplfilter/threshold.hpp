#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pplfilter/corpus.hpp"
#include "pplfilter/metrics.hpp"
#include "pplfilter/scoring.hpp"

namespace pplfilter {

struct LabeledScore {
  double ppl;
  Label gold;
};

struct ClassDistribution {
  Label label;
  std::size_t count = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

// Quantile of ascending `sorted` by linear interpolation between order
// statistics: position q * (n - 1).
double quantile(std::span<const double> sorted, double q);

// (harmful, non-harmful). Throws InputError when a class is empty.
std::pair<ClassDistribution, ClassDistribution> summarize_distributions(std::span<const LabeledScore> scores);

struct ThresholdPoint {
  double theta;
  double f1_macro;
  double f1_harmful;
  double f1_non_harmful;
  double accuracy;
};

struct SelectedThresholds {
  double argmax_f1 = 0;      // best macro F1 on the grid, smallest theta on ties
  double max_harmful = 0;    // largest perplexity among gold-harmful scores
  double steepest_step = 0;  // grid point after the largest summed jump of the four curves
};

struct ThresholdReport {
  std::vector<ThresholdPoint> grid;  // strictly increasing theta
  SelectedThresholds selected;
};

// Harmful iff ppl <= theta.
inline Label classify(double ppl, double theta) { return ppl <= theta ? Label::Harmful : Label::NonHarmful; }

// Metrics of the rule "ppl <= theta" on labeled scores.
EvalReport evaluate_threshold(std::span<const LabeledScore> scores, double theta);

// The quantiles i / (grid_size + 1), i = 1..grid_size, of the pooled values,
// with duplicates removed.
std::vector<double> quantile_grid(std::span<const double> values, int grid_size);

// Throws InputError when grid_size < 2 or only one class is present.
ThresholdReport sweep_thresholds(std::span<const LabeledScore> scores, int grid_size = 100);

// Throws InputError unless theta is finite and positive.
std::vector<IdLabel> classify_by_threshold(std::span<const PerplexityScore> scores, double theta);

nlohmann::json to_json(const ThresholdReport& r);
nlohmann::json to_json(const ClassDistribution& d);
// theta, f1_macro, f1_harmful, f1_non_harmful, accuracy; one row per grid point.
std::string to_tsv(const ThresholdReport& r);

}  // namespace pplfilter
