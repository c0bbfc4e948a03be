#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secrit/source_model.hpp"

namespace secrit {

enum class MetricKind { CC, LOC, LCOM };

inline constexpr std::array<MetricKind, 3> kAllMetricKinds{MetricKind::CC, MetricKind::LOC, MetricKind::LCOM};

// "cc", "loc", "lcom"
std::string_view metric_id(MetricKind kind);
// Long form used in prompts, e.g. "cyclomatic complexity".
std::string_view metric_name(MetricKind kind);
std::string_view metric_interpretation(MetricKind kind);
std::optional<MetricKind> parse_metric_kind(std::string_view text);

struct MetricRecord {
  std::string fqn;
  std::string file;
  LineSpan span;
  MetricKind kind = MetricKind::LOC;
  std::int64_t value = 0;

  bool operator==(const MetricRecord&) const = default;
};

// Non-blank, non-comment lines of the method span.
std::int64_t compute_loc(const MethodUnit& method, const std::vector<std::string>& fileLines);

// Same rule applied to an arbitrary run of lines.
std::int64_t count_code_lines(const std::vector<std::string>& lines, std::size_t first, std::size_t last);

// 1 + if/for/while/case/catch/ternary/&&/|| occurrences in the method text.
std::int64_t compute_cc(const MethodUnit& method);

// LCOM1 over the class's concrete methods, floored at zero.
std::int64_t compute_lcom(const ClassModel& cls);

std::vector<MetricRecord> attribute_metric(const std::vector<ClassModel>& classes, MetricKind kind);

}  // namespace secrit
