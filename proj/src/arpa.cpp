#include "pplfilter/arpa.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "pplfilter/error.hpp"

namespace pplfilter {

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

void write_arpa(const KneserNeyModel& model, std::ostream& out) {
  const Vocabulary& vocab = model.vocab();
  std::string buf;
  buf += "\\data\\\n";
  for (int k = 1; k <= model.order(); ++k) {
    buf += "ngram " + std::to_string(k) + "=" + std::to_string(model.table(k).size()) + "\n";
  }
  out << buf;

  for (int k = 1; k <= model.order(); ++k) {
    const NGramTable& table = model.table(k);
    buf.clear();
    buf += "\n\\" + std::to_string(k) + "-grams:\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
      const NGramWeights& w = table.weights(i);
      append_number(buf, w.log10_prob);
      buf += '\t';
      const auto gram = table.gram(i);
      for (std::size_t j = 0; j < gram.size(); ++j) {
        if (j) buf += ' ';
        buf += vocab.word(gram[j]);
      }
      if (k < model.order() && w.log10_backoff != 0.0) {
        buf += '\t';
        append_number(buf, w.log10_backoff);
      }
      buf += '\n';
      if (buf.size() > (1u << 20)) {
        out << buf;
        buf.clear();
      }
    }
    out << buf;
  }
  out << "\n\\end\\\n";
  if (!out) throw Error("failed writing ARPA output");
}

void write_arpa(const KneserNeyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_arpa(model, out);
}

// --- reading ----------------------------------------------------------------

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line with trailing CR/whitespace removed; false at end of input.
  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    return true;
  }
  bool next_nonblank(std::string& line) {
    while (next(line)) {
      if (!line.empty()) return true;
    }
    return false;
  }
  std::size_t line_no() const { return line_no_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("ARPA line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

struct RawEntry {
  std::vector<std::string> words;
  NGramWeights weights;
};

}  // namespace

KneserNeyModel read_arpa(std::istream& in) {
  LineReader reader(in);
  std::string line;

  // Header.
  bool found_data = false;
  while (reader.next(line)) {
    if (line == "\\data\\") {
      found_data = true;
      break;
    }
  }
  if (!found_data) reader.fail("missing \\data\\ header");

  std::vector<std::size_t> declared;
  while (reader.next(line)) {
    if (line.empty()) {
      if (declared.empty()) continue;
      break;
    }
    if (!line.starts_with("ngram ")) {
      if (line.starts_with("\\")) break;
      reader.fail("expected 'ngram <order>=<count>', got '" + line + "'");
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) reader.fail("malformed ngram count line");
    std::size_t order = 0, count = 0;
    const std::string_view lhs = std::string_view(line).substr(6, eq - 6);
    const std::string_view rhs = std::string_view(line).substr(eq + 1);
    auto r1 = std::from_chars(lhs.data(), lhs.data() + lhs.size(), order);
    auto r2 = std::from_chars(rhs.data(), rhs.data() + rhs.size(), count);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != lhs.data() + lhs.size() ||
        r2.ptr != rhs.data() + rhs.size()) {
      reader.fail("malformed ngram count line '" + line + "'");
    }
    if (order != declared.size() + 1) reader.fail("ngram counts must be listed for orders 1, 2, ... in sequence");
    declared.push_back(count);
  }
  if (declared.empty()) reader.fail("no ngram counts in header");
  if (declared.size() > static_cast<std::size_t>(kMaxOrder)) {
    reader.fail("order " + std::to_string(declared.size()) + " exceeds the supported maximum");
  }
  const int order = static_cast<int>(declared.size());

  // Sections.
  std::vector<std::vector<RawEntry>> sections(declared.size());
  bool pending_header = !line.empty() && line.starts_with("\\");
  for (int k = 1; k <= order; ++k) {
    if (!pending_header && !reader.next_nonblank(line)) reader.fail("unexpected end of file before \\" + std::to_string(k) + "-grams:");
    pending_header = false;
    const std::string expected = "\\" + std::to_string(k) + "-grams:";
    if (line != expected) reader.fail("expected section header " + expected + ", got '" + line + "'");

    auto& entries = sections[static_cast<std::size_t>(k - 1)];
    entries.reserve(declared[static_cast<std::size_t>(k - 1)]);
    while (reader.next(line)) {
      if (line.empty()) continue;
      if (line.front() == '\\') {
        pending_header = true;
        break;
      }
      const auto fields = split_fields(line);
      const std::size_t ku = static_cast<std::size_t>(k);
      if (fields.size() != ku + 1 && fields.size() != ku + 2) {
        reader.fail("expected " + std::to_string(k) + " words with a probability and optional backoff");
      }
      RawEntry e;
      if (!parse_double(fields[0], e.weights.log10_prob)) reader.fail("bad probability '" + std::string(fields[0]) + "'");
      for (std::size_t j = 1; j <= ku; ++j) e.words.emplace_back(fields[j]);
      if (fields.size() == ku + 2 && !parse_double(fields[ku + 1], e.weights.log10_backoff)) {
        reader.fail("bad backoff '" + std::string(fields[ku + 1]) + "'");
      }
      entries.push_back(std::move(e));
    }
    if (entries.size() != declared[static_cast<std::size_t>(k - 1)]) {
      reader.fail("section \\" + std::to_string(k) + "-grams: has " + std::to_string(entries.size()) +
                  " entries but the header declares " + std::to_string(declared[static_cast<std::size_t>(k - 1)]));
    }
  }
  if (!pending_header) {
    if (!reader.next_nonblank(line)) reader.fail("missing \\end\\ marker");
  }
  if (line != "\\end\\") reader.fail("expected \\end\\, got '" + line + "'");

  // Vocabulary and tables.
  std::vector<std::string> words;
  words.reserve(sections[0].size());
  for (const RawEntry& e : sections[0]) words.push_back(e.words[0]);
  Vocabulary vocab = Vocabulary::from_words(words);

  std::vector<NGramTable> tables;
  {
    std::vector<WordId> ids(vocab.size());
    std::iota(ids.begin(), ids.end(), WordId{0});
    std::vector<NGramWeights> weights(vocab.size(), NGramWeights{kLog10Zero, 0.0});
    std::vector<bool> seen(vocab.size(), false);
    for (const RawEntry& e : sections[0]) {
      const WordId id = *vocab.find(e.words[0]);
      if (seen[id]) throw InputError("ARPA: duplicate unigram '" + e.words[0] + "'");
      seen[id] = true;
      weights[id] = e.weights;
    }
    tables.emplace_back(1, std::move(ids), std::move(weights));
  }
  for (int k = 2; k <= order; ++k) {
    auto& entries = sections[static_cast<std::size_t>(k - 1)];
    std::vector<std::pair<NGram, NGramWeights>> keyed;
    keyed.reserve(entries.size());
    std::vector<WordId> buf(static_cast<std::size_t>(k));
    for (const RawEntry& e : entries) {
      for (std::size_t j = 0; j < buf.size(); ++j) {
        auto id = vocab.find(e.words[j]);
        if (!id) throw InputError("ARPA: word '" + e.words[j] + "' in a " + std::to_string(k) + "-gram has no unigram entry");
        buf[j] = *id;
      }
      keyed.emplace_back(NGram(buf), e.weights);
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < keyed.size(); ++i) {
      if (keyed[i].first == keyed[i - 1].first) throw InputError("ARPA: duplicate " + std::to_string(k) + "-gram");
    }
    std::vector<WordId> ids;
    std::vector<NGramWeights> weights;
    ids.reserve(keyed.size() * buf.size());
    weights.reserve(keyed.size());
    for (const auto& [g, w] : keyed) {
      ids.insert(ids.end(), g.ids.begin(), g.ids.begin() + k);
      weights.push_back(w);
    }
    tables.emplace_back(k, std::move(ids), std::move(weights));
  }
  return KneserNeyModel(std::move(vocab), std::move(tables), ModelMetadata{});
}

KneserNeyModel read_arpa(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model " + path.string());
  return read_arpa(in);
}

}  // namespace pplfilter
