#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "playful/dispatch.hpp"
#include "playful/embedding.hpp"

namespace playful {

// Service configuration. JSON on disk; relative paths resolve against the
// file's directory.
struct AppConfig {
  std::filesystem::path taxonomy;
  std::filesystem::path rules;
  std::filesystem::path easy_words;
  std::filesystem::path sentiment;
  std::filesystem::path modifiers;
  std::filesystem::path canned;
  std::filesystem::path model;
  std::filesystem::path guidelines;
  std::filesystem::path event_log;

  ProviderConfig provider;
  DispatchSettings dispatch;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::uint64_t seed = 0;
  std::optional<std::string> operator_token;

  // Defaults pointing at `asset_dir`.
  static AppConfig defaults(const std::filesystem::path& asset_dir);
  // Missing keys keep the defaults for `base_dir`'s assets directory.
  static AppConfig parse(std::string_view json_text, const std::filesystem::path& base_dir);
  static AppConfig load(const std::filesystem::path& path);

  // Throws ValidationError naming every missing asset file.
  void check_assets() const;
};

std::string config_to_json(const AppConfig& cfg);

}  // namespace playful
