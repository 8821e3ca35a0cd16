#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "playful/text_features.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(PLAYFUL_FIXTURE_DIR) / name; }
inline std::filesystem::path asset(const std::string& name) { return std::filesystem::path(PLAYFUL_ASSET_DIR) / name; }

inline const playful::Lexicons& shipped_lexicons() {
  static const playful::Lexicons lex =
      playful::Lexicons::load(asset("easy_words.v1.txt"), asset("sentiment.v1.tsv"), asset("modifiers.v1.tsv"));
  return lex;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("playful-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
