#include "pplfilter/textproc.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "pplfilter/error.hpp"

namespace pplfilter {

TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  detail::split_tokens(text, [&](std::string_view tok) { out.emplace_back(tok); });
  return out;
}

TokenSeq lm_tokenize(std::string_view text) {
  TokenSeq out;
  std::string scratch;
  for_each_lm_token(text, scratch, [&](std::string_view tok) { out.emplace_back(tok); });
  return out;
}

// --- resources --------------------------------------------------------------

void EmojiMap::add(std::string emoji, std::string alias) {
  if (emoji.empty() || alias.empty()) throw InputError("emoji map entries must be non-empty");
  max_key_bytes_ = std::max(max_key_bytes_, emoji.size());
  aliases_[std::move(emoji)] = std::move(alias);
}

std::string EmojiMap::replace(std::string_view token) const {
  if (aliases_.empty()) return std::string(token);
  std::string out;
  std::size_t i = 0;
  while (i < token.size()) {
    bool matched = false;
    const std::size_t longest = std::min(max_key_bytes_, token.size() - i);
    for (std::size_t len = longest; len > 0; --len) {
      auto it = aliases_.find(std::string(token.substr(i, len)));
      if (it != aliases_.end()) {
        out += it->second;
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) {
      const std::size_t step = unicode::decode(token, i).len;
      out.append(token.substr(i, step));
      i += step;
    }
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\n')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

std::ifstream open_resource(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open resource file " + path.string());
  return in;
}

}  // namespace

StopwordSet read_stopwords(std::istream& in) {
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view w = trim(line);
    if (!w.empty()) words.emplace(w);
  }
  return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  auto in = open_resource(path);
  return read_stopwords(in);
}

EmojiMap read_emoji_map(std::istream& in) {
  EmojiMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto tab = row.find('\t');
    if (tab == std::string_view::npos) {
      throw InputError("emoji map line " + std::to_string(line_no) + ": expected emoji<TAB>alias");
    }
    map.add(std::string(row.substr(0, tab)), std::string(trim(row.substr(tab + 1))));
  }
  return map;
}

EmojiMap load_emoji_map(const std::filesystem::path& path) {
  auto in = open_resource(path);
  return read_emoji_map(in);
}

PipelineStep PipelineStep::remove_stopwords(StopwordSet words) {
  return {StepKind::RemoveStopwords, std::make_shared<const StopwordSet>(std::move(words)), nullptr};
}

PipelineStep PipelineStep::replace_emoji(EmojiMap map) {
  return {StepKind::ReplaceEmoji, nullptr, std::make_shared<const EmojiMap>(std::move(map))};
}

// --- pipeline ---------------------------------------------------------------

namespace {

bool allowed_on_text(StepKind k) {
  return k == StepKind::Lowercase || k == StepKind::StripUrls || k == StepKind::StripSpecialChars;
}

bool allowed_on_tokens(StepKind k) {
  return k == StepKind::Lowercase || k == StepKind::StripSpecialChars || k == StepKind::RemoveStopwords ||
         k == StepKind::ReplaceEmoji || k == StepKind::Stem;
}

const char* step_name(StepKind k) {
  switch (k) {
    case StepKind::Lowercase: return "lowercase";
    case StepKind::StripUrls: return "strip_urls";
    case StepKind::StripSpecialChars: return "strip_special_chars";
    case StepKind::Tokenize: return "tokenize";
    case StepKind::RemoveStopwords: return "remove_stopwords";
    case StepKind::ReplaceEmoji: return "replace_emoji";
    case StepKind::Stem: return "stem";
  }
  return "?";
}

bool starts_with_url(std::string_view s, std::size_t i) {
  const std::string_view rest = s.substr(i);
  return rest.starts_with("http://") || rest.starts_with("https://") || rest.starts_with("www.");
}

std::string strip_urls(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  bool at_boundary = true;
  while (i < text.size()) {
    if (at_boundary && starts_with_url(text, i)) {
      while (i < text.size() && !unicode::is_space(unicode::decode(text, i).cp)) {
        i += unicode::decode(text, i).len;
      }
      out.push_back(' ');
      continue;
    }
    const auto d = unicode::decode(text, i);
    at_boundary = unicode::is_space(d.cp);
    out.append(text.substr(i, d.len));
    i += d.len;
  }
  return out;
}

// Punctuation code points become `replacement` (a space on raw text, nothing
// inside tokens).
std::string strip_special(std::string_view text, std::string_view replacement) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto d = unicode::decode(text, i);
    if (unicode::is_punct(d.cp)) {
      out.append(replacement);
    } else {
      out.append(text.substr(i, d.len));
    }
    i += d.len;
  }
  return out;
}

}  // namespace

Pipeline::Pipeline(std::vector<PipelineStep> steps) : steps_(std::move(steps)) {
  const auto n_tok = std::count_if(steps_.begin(), steps_.end(),
                                   [](const PipelineStep& s) { return s.kind == StepKind::Tokenize; });
  if (n_tok != 1) throw InputError("pipeline must contain exactly one tokenize step");
  bool after = false;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const PipelineStep& s = steps_[i];
    if (s.kind == StepKind::Tokenize) {
      tokenize_at_ = i;
      after = true;
      continue;
    }
    if (after ? !allowed_on_tokens(s.kind) : !allowed_on_text(s.kind)) {
      throw InputError(std::string("pipeline step '") + step_name(s.kind) + "' cannot run " +
                       (after ? "after" : "before") + " tokenize");
    }
    if (s.kind == StepKind::RemoveStopwords && !s.stopwords) throw InputError("remove_stopwords needs a word list");
    if (s.kind == StepKind::ReplaceEmoji && !s.emoji) throw InputError("replace_emoji needs a mapping");
  }
}

Pipeline Pipeline::default_pipeline() {
  return Pipeline({PipelineStep::lowercase(), PipelineStep::tokenize()});
}

Pipeline Pipeline::from_json(const nlohmann::json& config, const std::filesystem::path& base_dir) {
  if (!config.is_object() || !config.contains("steps") || !config["steps"].is_array()) {
    throw InputError("pipeline config must be an object with a \"steps\" array");
  }
  auto resolve = [&](const nlohmann::json& v) {
    if (!v.is_string()) throw InputError("pipeline resource path must be a string");
    std::filesystem::path p = v.get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  };

  std::vector<PipelineStep> steps;
  for (const auto& item : config["steps"]) {
    if (item.is_string()) {
      const std::string name = item.get<std::string>();
      if (name == "lowercase") steps.push_back(PipelineStep::lowercase());
      else if (name == "strip_urls") steps.push_back(PipelineStep::strip_urls());
      else if (name == "strip_special_chars") steps.push_back(PipelineStep::strip_special_chars());
      else if (name == "tokenize") steps.push_back(PipelineStep::tokenize());
      else if (name == "stem") steps.push_back(PipelineStep::stem());
      else throw InputError("unknown pipeline step '" + name + "'");
    } else if (item.is_object() && item.size() == 1) {
      const auto& [key, value] = *item.items().begin();
      if (key == "remove_stopwords") steps.push_back(PipelineStep::remove_stopwords(load_stopwords(resolve(value))));
      else if (key == "replace_emoji") steps.push_back(PipelineStep::replace_emoji(load_emoji_map(resolve(value))));
      else throw InputError("unknown pipeline step '" + key + "'");
    } else {
      throw InputError("malformed pipeline step " + item.dump());
    }
  }
  return Pipeline(std::move(steps));
}

Pipeline Pipeline::load(const std::filesystem::path& config_path) {
  std::ifstream in(config_path);
  if (!in) throw InputError("cannot open pipeline config " + config_path.string());
  nlohmann::json config = nlohmann::json::parse(in, nullptr, false);
  if (config.is_discarded()) throw InputError("pipeline config is not valid JSON: " + config_path.string());
  return from_json(config, config_path.parent_path());
}

TokenSeq Pipeline::run(std::string_view input) const {
  std::string text(input);
  for (std::size_t i = 0; i < tokenize_at_; ++i) {
    switch (steps_[i].kind) {
      case StepKind::Lowercase: text = unicode::to_lower(text); break;
      case StepKind::StripUrls: text = strip_urls(text); break;
      case StepKind::StripSpecialChars: text = strip_special(text, " "); break;
      default: break;
    }
  }

  TokenSeq tokens = tokenize(text);

  for (std::size_t i = tokenize_at_ + 1; i < steps_.size(); ++i) {
    const PipelineStep& step = steps_[i];
    switch (step.kind) {
      case StepKind::Lowercase:
        for (auto& t : tokens) t = unicode::to_lower(t);
        break;
      case StepKind::StripSpecialChars:
        for (auto& t : tokens) t = strip_special(t, "");
        std::erase_if(tokens, [](const std::string& t) { return t.empty(); });
        break;
      case StepKind::RemoveStopwords:
        std::erase_if(tokens, [&](const std::string& t) { return step.stopwords->contains(t); });
        break;
      case StepKind::ReplaceEmoji:
        for (auto& t : tokens) t = step.emoji->replace(t);
        break;
      case StepKind::Stem:
        for (auto& t : tokens) t = porter_stem(t);
        break;
      default:
        break;
    }
  }
  return tokens;
}

}  // namespace pplfilter
