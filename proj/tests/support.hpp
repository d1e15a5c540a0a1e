#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "deepnews/orchestrator.hpp"
#include "deepnews/serialize.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path fixture(const std::string& name) { return fs::path(DEEPNEWS_FIXTURE_DIR) / name; }
inline fs::path asset(const std::string& name) { return fs::path(DEEPNEWS_ASSET_DIR_FOR_TESTS) / name; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            ("deepnews-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string slurp(const fs::path& path) { return deepnews::read_text_file(path); }

/// Sample run config with absolute paths and a private runs directory.
inline deepnews::RunConfig vgame_config(const fs::path& runs_dir) {
  auto config = deepnews::RunConfig::load(fixture("vgame_config.json"));
  config.runs_dir = runs_dir;
  return config;
}

inline const deepnews::CorpusBundle& vgame_bundle() {
  static const auto bundle = deepnews::load_corpus(fixture("vgame_corpus.jsonl"));
  return bundle;
}

/// Small deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return below(2) == 1; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testsupport
