#include "pplfilter/metrics.hpp"

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "pplfilter/error.hpp"

namespace pplfilter {

void ConfusionCounts::add(Label gold, Label predicted) {
  if (gold == Label::Harmful) {
    ++(predicted == Label::Harmful ? tp : fn);
  } else {
    ++(predicted == Label::Harmful ? fp : tn);
  }
}

ConfusionCounts confusion(std::span<const IdLabel> predictions, std::span<const IdLabel> gold) {
  std::unordered_map<std::string_view, Label> gold_by_id;
  gold_by_id.reserve(gold.size());
  for (const auto& [id, label] : gold) {
    if (!gold_by_id.emplace(id, label).second) throw InputError("duplicate gold id '" + id + "'");
  }

  ConfusionCounts c;
  std::vector<std::string> extra;
  std::unordered_map<std::string_view, bool> used;
  for (const auto& [id, label] : predictions) {
    auto it = gold_by_id.find(id);
    if (it == gold_by_id.end()) {
      extra.push_back(id);
      continue;
    }
    if (!used.emplace(id, true).second) throw InputError("duplicate prediction id '" + id + "'");
    c.add(it->second, label);
  }
  std::vector<std::string> missing;
  for (const auto& [id, label] : gold) {
    if (!used.contains(id)) missing.push_back(id);
  }

  if (!extra.empty() || !missing.empty()) {
    auto list = [](const std::vector<std::string>& ids) {
      std::string s;
      const std::size_t shown = std::min<std::size_t>(ids.size(), 20);
      for (std::size_t i = 0; i < shown; ++i) s += (i ? ", " : "") + ids[i];
      if (ids.size() > shown) s += ", ... (" + std::to_string(ids.size()) + " total)";
      return s;
    };
    std::string msg = "prediction and gold ids do not match;";
    if (!missing.empty()) msg += " missing predictions for: " + list(missing) + ";";
    if (!extra.empty()) msg += " predictions without gold label: " + list(extra) + ";";
    throw InputError(msg);
  }
  return c;
}

namespace {

ClassScores class_scores(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  ClassScores s;
  if (tp + fp > 0) {
    s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  } else {
    s.degenerate = true;
  }
  if (tp + fn > 0) {
    s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  } else {
    s.degenerate = true;
  }
  // 2tp / (2tp + fp + fn) is the harmonic mean of precision and recall
  // without the intermediate rounding.
  if (tp > 0) {
    s.f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  }
  return s;
}

}  // namespace

EvalReport report(const ConfusionCounts& c) {
  EvalReport r;
  r.confusion = c;
  r.harmful = class_scores(c.tp, c.fp, c.fn);
  r.non_harmful = class_scores(c.tn, c.fn, c.fp);
  r.f1_macro = (r.harmful.f1 + r.non_harmful.f1) / 2.0;
  r.accuracy = c.total() ? static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total()) : 0.0;
  return r;
}

nlohmann::json to_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

nlohmann::json to_json(const EvalReport& r) {
  auto cls = [](const ClassScores& s) {
    return nlohmann::json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"degenerate", s.degenerate}};
  };
  return {{"confusion", to_json(r.confusion)},
          {"harmful", cls(r.harmful)},
          {"non_harmful", cls(r.non_harmful)},
          {"f1_harmful", r.harmful.f1},
          {"f1_non_harmful", r.non_harmful.f1},
          {"f1_macro", r.f1_macro},
          {"accuracy", r.accuracy}};
}

}  // namespace pplfilter
