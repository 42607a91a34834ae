#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

inline std::filesystem::path data_dir() { return PPLFILTER_DATA_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() /
            ("pplfilter_" + name + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Sentences over a small vocabulary with skewed word frequencies.
inline std::vector<std::vector<std::string>> random_corpus(std::mt19937_64& rng, int vocab, int max_tokens) {
  std::vector<std::vector<std::string>> docs;
  std::geometric_distribution<int> word(0.35);
  std::uniform_int_distribution<int> len(1, 8);
  int tokens = 0;
  while (true) {
    const int n = len(rng);
    if (tokens + n + 1 > max_tokens) break;
    std::vector<std::string> d;
    for (int i = 0; i < n; ++i) d.push_back("w" + std::to_string(std::min(word(rng), vocab - 1)));
    tokens += n + 1;
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace testing
