#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "bchain/core.hpp"

namespace bchain {

/// Everything a CLI command reads from its config file. Keys outside this
/// set are rejected so that typos do not silently fall back to defaults.
struct RunSettings {
  SystemConfig system;
  double horizon_macro = 1.0;

  // compare
  std::vector<double> t_list{0.25, 0.5};
  std::vector<double> epsilon_ladder;
  std::string reference = "uniformization";
  std::size_t state_cap = 10'000;

  // rates / recollisions
  std::vector<double> lambda_list;
  double window_micro = 4.0;

  // limit
  std::size_t limit_paths = 0;

  // kernel
  double kernel_q = 0.5;
  int kernel_p_sign = 1;
  double kernel_speed = 1.0;
  double kernel_t = 1.0;
  std::size_t kernel_grid = 100;

  // doeblin
  std::vector<double> doeblin_speeds{1.0, 2.0};
  double t0 = 2.0;
  std::size_t doeblin_grid = 64;
  std::vector<double> mixing_times{1, 2, 3, 4, 5, 6, 7, 8};

  /// Keys that appeared in the source document.
  std::vector<std::string> present;

  bool has(const std::string& key) const;
  /// Throws ConfigError for the first key of `keys` that was not given.
  void require(std::initializer_list<const char*> keys) const;
};

/// Parses a config object, or the "config" member of a run manifest.
/// Throws ConfigError naming the first offending key.
RunSettings settings_from_json(const nlohmann::json& doc);
RunSettings load_settings(const std::filesystem::path& path);

/// Fully resolved form written into manifests; parses back to the same
/// settings.
nlohmann::json settings_to_json(const RunSettings& settings);

}  // namespace bchain
