#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secrit/criticality.hpp"
#include "secrit/explain.hpp"

namespace secrit {

inline constexpr std::string_view kToolName = "secrit";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kConfigFileName = "secrit.toml";

struct ToolConfig {
  MetricKind metricKind = MetricKind::LOC;
  TieRule tieRule = kDefaultTieRule;
  bool showLow = false;
  bool explain = false;
  std::size_t concurrencyLimit = 4;
  BackendConfig backend;
  ScanOptions scan;
  std::optional<std::filesystem::path> stateDir;  // default: <root>/.secrit
  bool useCache = true;

  AssessmentConfig assessment() const { return {metricKind, tieRule, showLow}; }
};

// Parses the key = value document. Throws Error(InvalidConfig) with the
// offending line on unknown keys, bad values, or a stored API key.
ToolConfig parse_config(std::string_view text, ToolConfig base = {});

ToolConfig load_config_file(const std::filesystem::path& path, ToolConfig base = {});

using EnvLookup = std::function<const char*(const char*)>;

// SECRIT_METRIC, SECRIT_TIE_RULE, SECRIT_BACKEND, SECRIT_MODEL, SECRIT_ENDPOINT
ToolConfig apply_env(ToolConfig config, const EnvLookup& env);

// Defaults, then <root>/secrit.toml (or an explicit file), then environment.
ToolConfig resolve_config(const std::filesystem::path& root, const std::optional<std::filesystem::path>& explicitFile,
                          const EnvLookup& env);

// Canonical key = value rendering of a config (never contains secrets).
std::string describe_config(const ToolConfig& config);

std::filesystem::path state_directory(const ToolConfig& config, const std::filesystem::path& root);

}  // namespace secrit
