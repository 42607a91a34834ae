#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pplfilter/arpa.hpp"
#include "pplfilter/baselines/model_io.hpp"
#include "pplfilter/cli.hpp"
#include "pplfilter/corpus.hpp"
#include "pplfilter/discounts.hpp"
#include "pplfilter/error.hpp"
#include "pplfilter/metrics.hpp"
#include "pplfilter/model.hpp"
#include "pplfilter/ngram_counts.hpp"
#include "pplfilter/parallel.hpp"
#include "pplfilter/scoring.hpp"
#include "pplfilter/textproc.hpp"
#include "pplfilter/threshold.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pplfilter::cli {

double estimate_hours(double bytes, double mb_per_s) {
  if (!(mb_per_s > 0)) throw InputError("throughput must be positive");
  const double hours = bytes / (mb_per_s * 1e6) / 3600.0;
  return std::round(hours * 10.0) / 10.0;
}

namespace {

// Reads option values from a JSON object. Nested objects address subcommands:
// {"score": {"threads": 8}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_configurable() && !opt->get_lnames().empty()) {
        const std::string& name = opt->get_lnames().front();
        if (opt->count() > 0) {
          j[name] = opt->results().size() == 1 ? json(opt->results().front()) : json(opt->results());
        } else if (default_also && !opt->get_default_str().empty()) {
          j[name] = opt->get_default_str();
        }
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      json s = json::parse(to_config(sub, default_also, false, ""));
      if (!s.empty()) j[sub->get_name()] = s;
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static void collect(const json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (it->is_object()) {
        std::vector<std::string> sub = parents;
        sub.push_back(it.key());
        collect(*it, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      auto scalar = [&](const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw CLI::ConversionError("config value for '" + it.key() + "' must be a scalar or an array of scalars");
      };
      if (it->is_array()) {
        for (const json& v : *it) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(*it));
      }
      items.push_back(std::move(item));
    }
  }
};

const CLI::Validator kOutputPath(
    [](std::string& p) -> std::string {
      const fs::path parent = fs::path(p).parent_path();
      if (!parent.empty() && !fs::is_directory(parent)) return "output directory does not exist: " + parent.string();
      return {};
    },
    "PATH");

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

std::string dump_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

// Writes `j` to `path`, or to `out` when the path is empty.
void emit_json(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f = open_out(path);
  f << j.dump(2) << '\n';
}

void warn_skipped(std::ostream& err, std::string_view what, std::size_t malformed, std::size_t empty) {
  if (malformed) err << what << ": skipped " << malformed << " malformed line(s)\n";
  if (empty) err << what << ": skipped " << empty << " record(s) with empty content\n";
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

ReadResult read_corpus(const std::string& path, LabelRule rule, std::ostream& err) {
  ReadResult r = read_jsonlines(fs::path(path), rule);
  warn_skipped(err, fs::path(path).filename().string(), r.skipped_malformed, r.skipped_empty);
  return r;
}

std::vector<IdLabel> gold_labels(const std::string& path, LabelRule rule, std::ostream& err) {
  if (rule == LabelRule::None) throw InputError("gold labels need a label rule other than 'none'");
  const ReadResult r = read_corpus(path, rule, err);
  std::vector<IdLabel> gold;
  gold.reserve(r.docs.size());
  for (const Document& d : r.docs) gold.emplace_back(d.id, *d.gold_label);
  return gold;
}

// ---------------------------------------------------------------- lm-train

struct LmTrainArgs {
  std::string input;
  std::string out;
  std::string annotation;
  int order = 5;
  bool fallback = false;
  int threads = 0;
};

int cmd_lm_train(const LmTrainArgs& a, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  ReadResult r = read_corpus(a.input, LabelRule::None, err);
  std::vector<Document> docs = a.annotation.empty() ? std::move(r.docs) : filter_by_annotation(r.docs, a.annotation);
  if (docs.empty()) throw InputError("no training documents in " + a.input);

  std::vector<TokenSeq> tokens;
  tokens.reserve(docs.size());
  for (const Document& d : docs) tokens.push_back(lm_tokenize(d.content));
  const NGramCounts counts = count_ngrams(tokens, a.order, a.threads);
  const DiscountSet discounts = estimate_discounts(counts, a.fallback);
  for (const std::string& w : discounts.warnings) err << "warning: " << w << '\n';
  const KneserNeyModel model = estimate_model(counts, discounts);
  write_arpa(model, fs::path(a.out));

  json summary{{"model", a.out},
               {"order", a.order},
               {"documents", counts.documents},
               {"training_tokens", counts.training_tokens},
               {"vocab_size", model.vocab().size()}};
  json ngrams = json::array();
  json disc = json::array();
  for (int k = 1; k <= a.order; ++k) {
    ngrams.push_back(model.table(k).size());
    const Discount& d = discounts.at_order(k);
    disc.push_back({{"order", k}, {"d1", d.d1}, {"d2", d.d2}, {"d3plus", d.d3plus}});
  }
  summary["ngrams"] = ngrams;
  summary["discounts"] = disc;
  summary["warnings"] = discounts.warnings;
  out << summary.dump(2) << '\n';
  err << "lm-train: " << counts.documents << " documents, " << counts.training_tokens << " tokens, order "
      << a.order << " model written to " << a.out << " in " << fixed(clock.seconds(), 2) << " s\n";
  return kExitOk;
}

// ---------------------------------------------------------- score/classify

struct StreamStats {
  std::size_t docs = 0;
  std::size_t harmful = 0;
  std::size_t malformed = 0;
  std::size_t empty = 0;
  std::size_t bytes = 0;
  double seconds = 0;
};

struct Rendered {
  std::string line;
  LineStatus status = LineStatus::Blank;
  bool harmful = false;
};

// Reads JSONLines in bounded batches, scores each batch across `threads`
// workers and writes results in input order. `render` turns a parsed record and
// its score into an output line.
template <class Render>
StreamStats stream_score(const KneserNeyModel& model, std::istream& in, std::string_view source, std::ostream& out,
                         int threads, std::size_t batch, Render render) {
  const int workers = resolve_threads(threads);
  StreamStats stats;
  Stopwatch clock;
  std::vector<std::string> lines;
  std::vector<Rendered> results;
  std::size_t line_no = 0;
  std::string line;
  bool more = true;
  while (more) {
    lines.clear();
    while (lines.size() < batch && std::getline(in, line)) {
      stats.bytes += line.size() + 1;
      lines.push_back(std::move(line));
    }
    more = lines.size() == batch;
    if (lines.empty()) break;

    results.assign(lines.size(), Rendered{});
    const auto n = static_cast<std::ptrdiff_t>(lines.size());
    const std::size_t first = line_no + 1;
#pragma omp parallel num_threads(workers)
    {
      DocumentScorer scorer(model);
#pragma omp for schedule(dynamic, 16)
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        ParsedLine p = parse_line(lines[u], source, first + u, LabelRule::None);
        results[u].status = p.status;
        if (p.status == LineStatus::Ok) {
          const SentenceScore s = scorer.score_text(p.doc.content);
          results[u] = render(p, PerplexityScore{p.doc.id, s.log10_sum, s.n_tokens, perplexity_from(s)});
          results[u].status = LineStatus::Ok;
        }
      }
    }
    line_no += lines.size();

    for (const Rendered& r : results) {
      switch (r.status) {
        case LineStatus::Ok:
          out << r.line << '\n';
          ++stats.docs;
          if (r.harmful) ++stats.harmful;
          break;
        case LineStatus::Malformed:
          ++stats.malformed;
          break;
        case LineStatus::EmptyContent:
          ++stats.empty;
          break;
        case LineStatus::Blank:
          break;
      }
    }
  }
  if (in.bad()) throw InputError("read error on " + std::string(source));
  out.flush();
  stats.seconds = clock.seconds();
  return stats;
}

void report_throughput(std::ostream& err, std::string_view cmd, const StreamStats& s, int threads) {
  const int workers = resolve_threads(threads);
  const double mb = static_cast<double>(s.bytes) / 1e6;
  const double rate = s.seconds > 0 ? mb / s.seconds : 0.0;
  err << cmd << ": " << s.docs << " documents, " << fixed(mb, 2) << " MB in " << fixed(s.seconds, 3) << " s ("
      << fixed(rate, 1) << " MB/s, " << workers << " worker(s), " << fixed(rate / workers, 1) << " MB/s per worker)\n";
}

KneserNeyModel load_model(const std::string& path, std::ostream& err) {
  Stopwatch clock;
  KneserNeyModel m = read_arpa(fs::path(path));
  err << "loaded order-" << m.order() << " model with " << m.vocab().size() << " words in " << fixed(clock.seconds(), 2)
      << " s\n";
  return m;
}

struct ScoreArgs {
  std::string model;
  std::string input;
  std::string out;
  int threads = 0;
  std::size_t batch = 4096;
};

int cmd_score(const ScoreArgs& a, std::ostream& err) {
  const KneserNeyModel model = load_model(a.model, err);
  std::ifstream in = open_in(a.input);
  std::ofstream out = open_out(a.out);
  const StreamStats s = stream_score(model, in, fs::path(a.input).filename().string(), out, a.threads, a.batch,
                                     [](const ParsedLine&, const PerplexityScore& score) {
                                       return Rendered{dump_line(to_json(score)), LineStatus::Ok, false};
                                     });
  warn_skipped(err, "score", s.malformed, s.empty);
  report_throughput(err, "score", s, a.threads);
  return kExitOk;
}

struct ClassifyArgs {
  std::string model;
  std::string input;
  std::string out;
  double theta = 0;
  std::string report;
  std::string select = "argmax_f1";
  int threads = 0;
  std::size_t batch = 4096;
};

double theta_from_report(const std::string& path, const std::string& which) {
  std::ifstream in = open_in(path);
  json j;
  try {
    in >> j;
    return j.at("selected").at(which).get<double>();
  } catch (const json::exception& e) {
    throw InputError("cannot read selected." + which + " from " + path + ": " + e.what());
  }
}

int cmd_classify(const ClassifyArgs& a, std::ostream& err) {
  const double theta = a.report.empty() ? a.theta : theta_from_report(a.report, a.select);
  if (!std::isfinite(theta) || theta <= 0) throw InputError("theta must be positive, got " + std::to_string(theta));
  const KneserNeyModel model = load_model(a.model, err);
  std::ifstream in = open_in(a.input);
  std::ofstream out = open_out(a.out);
  const StreamStats s = stream_score(model, in, fs::path(a.input).filename().string(), out, a.threads, a.batch,
                                     [theta](const ParsedLine& p, const PerplexityScore& score) {
                                       json record = p.object;
                                       const Label label = classify(score.ppl, theta);
                                       record["id"] = p.doc.id;
                                       record["ppl"] = score.ppl;
                                       record["harmful"] = label == Label::Harmful;
                                       record["pred"] = label_name(label);
                                       record["score"] = score.ppl;
                                       return Rendered{dump_line(record), LineStatus::Ok, label == Label::Harmful};
                                     });
  warn_skipped(err, "classify", s.malformed, s.empty);
  report_throughput(err, "classify", s, a.threads);
  const double pct = s.docs ? 100.0 * static_cast<double>(s.harmful) / static_cast<double>(s.docs) : 0.0;
  err << "classify: theta " << theta << ", " << s.harmful << " of " << s.docs << " documents predicted harmful ("
      << fixed(pct, 2) << "%)\n";
  return kExitOk;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string scores;
  std::string gold;
  std::string out;
  std::string tsv;
  std::string label_rule = "adult";
  int grid = 100;
};

std::vector<PerplexityScore> read_scores(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<PerplexityScore> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw InputError(path + " line " + std::to_string(line_no) + ": not valid JSON");
    }
    try {
      scores.push_back(score_from_json(j));
    } catch (const InputError& e) {
      throw InputError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return scores;
}

std::string id_list(const std::vector<std::string>& ids) {
  std::string s;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) s += (i ? ", " : "") + ids[i];
  if (ids.size() > shown) s += ", ... (" + std::to_string(ids.size()) + " total)";
  return s;
}

std::vector<LabeledScore> join_scores(const std::vector<PerplexityScore>& scores, const std::vector<IdLabel>& gold) {
  std::unordered_map<std::string_view, double> by_id;
  for (const PerplexityScore& s : scores) {
    if (!by_id.emplace(s.doc_id, s.ppl).second) throw InputError("duplicate score id '" + s.doc_id + "'");
  }
  std::vector<LabeledScore> joined;
  std::vector<std::string> missing;
  std::unordered_map<std::string_view, bool> used;
  for (const auto& [id, label] : gold) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      missing.push_back(id);
      continue;
    }
    if (!used.emplace(id, true).second) throw InputError("duplicate gold id '" + id + "'");
    joined.push_back({it->second, label});
  }
  std::vector<std::string> extra;
  for (const PerplexityScore& s : scores) {
    if (!used.contains(s.doc_id)) extra.push_back(s.doc_id);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "score and gold ids do not match;";
    if (!missing.empty()) msg += " no score for: " + id_list(missing) + ";";
    if (!extra.empty()) msg += " no gold label for: " + id_list(extra) + ";";
    throw InputError(msg);
  }
  return joined;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const std::vector<LabeledScore> joined =
      join_scores(read_scores(a.scores), gold_labels(a.gold, parse_label_rule(a.label_rule), err));
  const ThresholdReport r = sweep_thresholds(joined, a.grid);
  const auto [harmful, other] = summarize_distributions(joined);

  json j = to_json(r);
  j["documents"] = joined.size();
  j["distributions"] = {{"harmful", to_json(harmful)}, {"non_harmful", to_json(other)}};
  emit_json(j, a.out, out);
  if (!a.tsv.empty()) {
    std::ofstream t = open_out(a.tsv);
    t << to_tsv(r);
  }
  for (const auto& [name, theta] : {std::pair<const char*, double>{"argmax_f1", r.selected.argmax_f1},
                                    {"max_harmful", r.selected.max_harmful},
                                    {"steepest_step", r.selected.steepest_step}}) {
    const EvalReport e = evaluate_threshold(joined, theta);
    err << "sweep: " << name << " theta " << theta << " f1_macro " << fixed(e.f1_macro, 4) << '\n';
  }
  return kExitOk;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred;
  std::string gold;
  std::string out;
  std::string label_rule = "adult";
};

std::vector<IdLabel> read_predictions(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<IdLabel> preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + " line " + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw InputError(where + "not valid JSON");
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) throw InputError(where + "missing string \"id\"");
    Label label;
    if (j.contains("pred") && j["pred"].is_string()) {
      const std::string p = j["pred"].get<std::string>();
      if (p == "harmful") {
        label = Label::Harmful;
      } else if (p == "non_harmful") {
        label = Label::NonHarmful;
      } else {
        throw InputError(where + "unknown prediction '" + p + "'");
      }
    } else if (j.contains("harmful") && j["harmful"].is_boolean()) {
      label = j["harmful"].get<bool>() ? Label::Harmful : Label::NonHarmful;
    } else {
      throw InputError(where + "needs \"pred\" or boolean \"harmful\"");
    }
    preds.emplace_back(j["id"].get<std::string>(), label);
  }
  return preds;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const std::vector<IdLabel> preds = read_predictions(a.pred);
  const std::vector<IdLabel> gold = gold_labels(a.gold, parse_label_rule(a.label_rule), err);
  const EvalReport r = report(confusion(preds, gold));
  emit_json(to_json(r), a.out, out);
  const ConfusionCounts& c = r.confusion;
  err << "eval: tp " << c.tp << " tn " << c.tn << " fp " << c.fp << " fn " << c.fn << ", f1_harmful "
      << fixed(r.harmful.f1, 4) << ", f1_macro " << fixed(r.f1_macro, 4) << ", accuracy " << fixed(r.accuracy, 4)
      << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- baseline

struct BaselineTrainArgs {
  std::string kind = "nb";
  std::string input;
  std::string out;
  std::string pipeline;
  std::string label_rule = "adult";
  std::string norm = "l2";
  bool no_smooth_idf = false;
  BaselineOptions opts;
  std::uint64_t buckets = HashedLinearOptions{}.buckets;
};

int cmd_baseline_train(BaselineTrainArgs a, std::ostream& out, std::ostream& err) {
  const BaselineKind kind = parse_baseline_kind(a.kind);
  const LabelRule rule = parse_label_rule(a.label_rule);
  if (rule == LabelRule::None) throw InputError("training needs a label rule other than 'none'");
  a.opts.smoothing = !a.no_smooth_idf;
  a.opts.norm = a.norm == "l2" ? TfidfNorm::L2 : TfidfNorm::None;
  a.opts.hashed.buckets = a.buckets;
  a.opts.hashed.seed = a.opts.seed;

  json pipeline_config;
  fs::path base_dir;
  if (!a.pipeline.empty()) {
    std::ifstream in = open_in(a.pipeline);
    try {
      in >> pipeline_config;
    } catch (const json::exception& e) {
      throw InputError("pipeline config " + a.pipeline + " is not valid JSON: " + e.what());
    }
    base_dir = fs::absolute(fs::path(a.pipeline)).parent_path();
  }

  Stopwatch clock;
  const ReadResult r = read_corpus(a.input, rule, err);
  const BaselineTrainResult t = train_baseline(kind, r.docs, a.opts, pipeline_config, base_dir);
  if (t.skipped_empty) err << "warning: skipped " << t.skipped_empty << " document(s) with no tokens\n";
  save_baseline(t.model, fs::path(a.out));

  ConfusionCounts c;
  for (const Document& d : r.docs) c.add(*d.gold_label, t.model.predict(d.content).label);
  const EvalReport e = report(c);
  out << json{{"kind", a.kind},
              {"model", a.out},
              {"documents", r.docs.size()},
              {"skipped_empty", t.skipped_empty},
              {"training_f1_macro", e.f1_macro}}
             .dump(2)
      << '\n';
  err << "baseline train: " << a.kind << " on " << r.docs.size() << " documents in " << fixed(clock.seconds(), 2)
      << " s, training f1_macro " << fixed(e.f1_macro, 4) << '\n';
  return kExitOk;
}

struct BaselinePredictArgs {
  std::string model;
  std::string input;
  std::string out;
};

int cmd_baseline_predict(const BaselinePredictArgs& a, std::ostream& err) {
  const BaselineModel model = load_baseline(fs::path(a.model));
  std::ifstream in = open_in(a.input);
  std::ofstream out = open_out(a.out);
  const std::string source = fs::path(a.input).filename().string();
  std::string line;
  std::size_t line_no = 0, docs = 0, harmful = 0, malformed = 0, empty = 0;
  while (std::getline(in, line)) {
    ParsedLine p = parse_line(line, source, ++line_no, LabelRule::None);
    if (p.status == LineStatus::Malformed) ++malformed;
    if (p.status == LineStatus::EmptyContent) ++empty;
    if (p.status != LineStatus::Ok) continue;
    const Prediction pr = model.predict(p.doc.content);
    json& record = p.object;
    record["id"] = p.doc.id;
    record["harmful"] = pr.label == Label::Harmful;
    record["pred"] = label_name(pr.label);
    record["score"] = pr.score;
    out << dump_line(record) << '\n';
    ++docs;
    if (pr.label == Label::Harmful) ++harmful;
  }
  warn_skipped(err, "baseline predict", malformed, empty);
  const double pct = docs ? 100.0 * static_cast<double>(harmful) / static_cast<double>(docs) : 0.0;
  err << "baseline predict: " << harmful << " of " << docs << " documents predicted harmful (" << fixed(pct, 2)
      << "%)\n";
  return kExitOk;
}

// ----------------------------------------------------------- estimate-time

struct EstimateArgs {
  double throughput = 20.0;
  std::string sizes;
};

int cmd_estimate_time(const EstimateArgs& a, std::ostream& out) {
  if (!(a.throughput > 0)) throw InputError("throughput must be positive");
  std::ifstream in = open_in(a.sizes);
  std::string line;
  std::size_t line_no = 0;
  out << "name\tbytes\thours\n";
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw InputError(a.sizes + " line " + std::to_string(line_no) + ": expected name<TAB>bytes");
    const std::string name = line.substr(0, tab);
    const std::string field = line.substr(tab + 1);
    std::uint64_t bytes = 0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), bytes);
    if (ec != std::errc() || end != field.data() + field.size()) {
      if (line_no == 1) continue;  // header row
      throw InputError(a.sizes + " line " + std::to_string(line_no) + ": bytes must be a non-negative integer");
    }
    out << name << '\t' << bytes << '\t' << fixed(estimate_hours(static_cast<double>(bytes), a.throughput), 1) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perplexity-based harmful content filtering", "pplfilter"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values; nested objects address subcommands");
  app.require_subcommand(1);

  const std::vector<std::string> rules{"adult", "harmful", "non-harmful", "none"};

  LmTrainArgs lm;
  auto* lm_cmd = app.add_subcommand("lm-train", "Train an n-gram language model and write it as ARPA");
  lm_cmd->add_option("--input", lm.input, "JSONLines training corpus")->required()->check(CLI::ExistingFile);
  lm_cmd->add_option("--order", lm.order, "n-gram order")->check(CLI::Range(1, static_cast<int>(kMaxOrder)))->capture_default_str();
  lm_cmd->add_option("--out", lm.out, "ARPA output path")->required()->check(kOutputPath);
  lm_cmd->add_option("--annotation", lm.annotation, "Only train on documents carrying this annotation");
  lm_cmd->add_flag("--fallback-discounts", lm.fallback, "Use fixed discounts when counts-of-counts are degenerate");
  lm_cmd->add_option("--threads", lm.threads, "Counting threads, 0 for all")->check(CLI::NonNegativeNumber);

  ScoreArgs sc;
  auto* score_cmd = app.add_subcommand("score", "Write the perplexity of every document");
  score_cmd->add_option("--model", sc.model, "ARPA model")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--input", sc.input, "JSONLines documents")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--out", sc.out, "Score JSONLines output")->required()->check(kOutputPath);
  score_cmd->add_option("--threads", sc.threads, "Worker threads, 0 for all")->check(CLI::NonNegativeNumber);
  score_cmd->add_option("--batch", sc.batch, "Documents per batch")->check(CLI::PositiveNumber)->capture_default_str();

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a grid of perplexity thresholds");
  sweep_cmd->add_option("--scores", sw.scores, "Score JSONLines from 'score'")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--gold", sw.gold, "Labeled JSONLines corpus")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--grid", sw.grid, "Number of quantile thresholds")->check(CLI::Range(2, 1000000))->capture_default_str();
  sweep_cmd->add_option("--out", sw.out, "Report JSON (standard output if omitted)")->check(kOutputPath);
  sweep_cmd->add_option("--tsv", sw.tsv, "Also write the metric curves as TSV")->check(kOutputPath);
  sweep_cmd->add_option("--label-rule", sw.label_rule, "How gold labels are read")->check(CLI::IsMember(rules))->capture_default_str();

  ClassifyArgs cl;
  auto* classify_cmd = app.add_subcommand("classify", "Label documents harmful when ppl <= theta");
  classify_cmd->add_option("--model", cl.model, "ARPA model")->required()->check(CLI::ExistingFile);
  classify_cmd->add_option("--input", cl.input, "JSONLines documents")->required()->check(CLI::ExistingFile);
  classify_cmd->add_option("--out", cl.out, "Labeled JSONLines output")->required()->check(kOutputPath);
  auto* theta_opt = classify_cmd->add_option("--theta", cl.theta, "Perplexity threshold");
  auto* report_opt =
      classify_cmd->add_option("--report", cl.report, "Take theta from a sweep report")->check(CLI::ExistingFile);
  theta_opt->excludes(report_opt);
  report_opt->excludes(theta_opt);
  classify_cmd->add_option("--select", cl.select, "Which selected threshold of --report to use")
      ->check(CLI::IsMember({"argmax_f1", "max_harmful", "steepest_step"}))
      ->needs(report_opt)
      ->capture_default_str();
  classify_cmd->add_option("--threads", cl.threads, "Worker threads, 0 for all")->check(CLI::NonNegativeNumber);
  classify_cmd->add_option("--batch", cl.batch, "Documents per batch")->check(CLI::PositiveNumber)->capture_default_str();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Compare predictions with gold labels");
  eval_cmd->add_option("--pred", ev.pred, "Prediction JSONLines with \"pred\" or \"harmful\"")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gold", ev.gold, "Labeled JSONLines corpus")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", ev.out, "Report JSON (standard output if omitted)")->check(kOutputPath);
  eval_cmd->add_option("--label-rule", ev.label_rule, "How gold labels are read")->check(CLI::IsMember(rules))->capture_default_str();

  auto* baseline_cmd = app.add_subcommand("baseline", "Train or apply a classical text classifier");
  baseline_cmd->require_subcommand(1);
  BaselineTrainArgs bt;
  auto* bt_cmd = baseline_cmd->add_subcommand("train", "Train a baseline classifier");
  bt_cmd->add_option("--kind", bt.kind, "nb, sgd or hashed")->check(CLI::IsMember({"nb", "sgd", "hashed"}))->capture_default_str();
  bt_cmd->add_option("--input", bt.input, "Labeled JSONLines corpus")->required()->check(CLI::ExistingFile);
  bt_cmd->add_option("--out", bt.out, "Model output path")->required()->check(kOutputPath);
  bt_cmd->add_option("--pipeline", bt.pipeline, "Preprocessing pipeline JSON")->check(CLI::ExistingFile);
  bt_cmd->add_option("--label-rule", bt.label_rule, "How gold labels are read")->check(CLI::IsMember(rules))->capture_default_str();
  bt_cmd->add_option("--max-df", bt.opts.max_df, "Drop terms in more than this fraction of documents")->capture_default_str();
  bt_cmd->add_flag("--no-smooth-idf", bt.no_smooth_idf, "Disable add-one document frequency smoothing");
  bt_cmd->add_option("--norm", bt.norm, "l2 or none")->check(CLI::IsMember({"l2", "none"}))->capture_default_str();
  bt_cmd->add_option("--alpha", bt.opts.alpha, "Naive Bayes smoothing")->capture_default_str();
  bt_cmd->add_option("--lr", bt.opts.sgd_lr, "Logistic SGD initial learning rate")->capture_default_str();
  bt_cmd->add_option("--epochs", bt.opts.sgd_epochs, "Logistic SGD epochs")->capture_default_str();
  bt_cmd->add_option("--seed", bt.opts.seed, "Shuffle and initialization seed")->capture_default_str();
  bt_cmd->add_option("--buckets", bt.buckets, "Hashed: bucket count")->capture_default_str();
  bt_cmd->add_option("--dim", bt.opts.hashed.dim, "Hashed: embedding size")->capture_default_str();
  bt_cmd->add_option("--word-ngrams", bt.opts.hashed.word_ngrams, "Hashed: longest word n-gram")->capture_default_str();
  bt_cmd->add_option("--hashed-epochs", bt.opts.hashed.epochs, "Hashed: epochs")->capture_default_str();
  bt_cmd->add_option("--hashed-lr", bt.opts.hashed.lr, "Hashed: initial learning rate")->capture_default_str();
  bt_cmd->add_option("--threads", bt.opts.hashed.threads, "Hashed: training threads (1 is deterministic)")->capture_default_str();

  BaselinePredictArgs bp;
  auto* bp_cmd = baseline_cmd->add_subcommand("predict", "Label documents with a trained baseline");
  bp_cmd->add_option("--model", bp.model, "Model from 'baseline train'")->required()->check(CLI::ExistingFile);
  bp_cmd->add_option("--input", bp.input, "JSONLines documents")->required()->check(CLI::ExistingFile);
  bp_cmd->add_option("--out", bp.out, "Labeled JSONLines output")->required()->check(kOutputPath);

  EstimateArgs et;
  auto* et_cmd = app.add_subcommand("estimate-time", "Estimate labeling hours from corpus sizes");
  et_cmd->add_option("--throughput", et.throughput, "Scoring throughput in MB/s")->capture_default_str();
  et_cmd->add_option("--sizes", et.sizes, "TSV of name<TAB>bytes")->required()->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (lm_cmd->parsed()) return cmd_lm_train(lm, out, err);
    if (score_cmd->parsed()) return cmd_score(sc, err);
    if (sweep_cmd->parsed()) return cmd_sweep(sw, out, err);
    if (classify_cmd->parsed()) {
      if (cl.report.empty() && theta_opt->count() == 0) throw InputError("classify needs --theta or --report");
      return cmd_classify(cl, err);
    }
    if (eval_cmd->parsed()) return cmd_eval(ev, out, err);
    if (bt_cmd->parsed()) return cmd_baseline_train(bt, out, err);
    if (bp_cmd->parsed()) return cmd_baseline_predict(bp, err);
    if (et_cmd->parsed()) return cmd_estimate_time(et, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  err << "error: no command given\n";
  return kExitInput;
}

}  // namespace pplfilter::cli
