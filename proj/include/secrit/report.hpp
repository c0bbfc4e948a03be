#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secrit/config.hpp"

namespace secrit {

inline constexpr std::string_view kReportSchemaVersion = "1";

struct ReportEntry {
  std::string fqn;
  std::string file;
  std::size_t startLine = 0;
  std::size_t endLine = 0;
  std::int64_t value = 0;
  std::size_t rank = 0;
  CriticalityLevel level = CriticalityLevel::Low;
  std::optional<ExplanationResult> explanation;  // absent when not requested

  bool operator==(const ReportEntry&) const = default;
};

struct ProjectReport {
  std::string toolVersion{kToolVersion};
  std::string corpusRoot;
  MetricKind metricKind = MetricKind::LOC;
  TieRule tieRule = kDefaultTieRule;
  std::string generatedAt;  // shown in text output only
  std::vector<ReportEntry> entries;  // rank ascending

  LevelCounts counts() const;
  bool operator==(const ProjectReport&) const = default;
};

enum class ReportFormat { Text, Json, Sarif };
std::optional<ReportFormat> parse_report_format(std::string_view text);

struct RenderOptions {
  bool showLow = false;              // text only
  std::optional<std::size_t> top;    // text only
};

std::string render_report(const ProjectReport& report, ReportFormat format, const RenderOptions& options = {});

// Inverse of the json rendering. generatedAt is not part of the schema and
// comes back empty.
ProjectReport parse_report_json(std::string_view text);

struct AnalysisOutcome {
  Project project;
  std::vector<CriticalityAssessment> assessments;
};

AnalysisOutcome analyze_project(const std::filesystem::path& root, const ToolConfig& config);

// Entries without explanations.
ProjectReport make_report(const AnalysisOutcome& outcome, const ToolConfig& config, std::string corpusRoot);

// Runs every explanation job to completion and attaches the results.
void attach_explanations(ProjectReport& report, const AnalysisOutcome& outcome, const ToolConfig& config,
                         std::shared_ptr<ChatBackend> backend, std::shared_ptr<ExplanationCache> cache);

std::string utc_timestamp();

}  // namespace secrit
