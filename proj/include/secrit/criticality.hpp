#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "secrit/metrics.hpp"

namespace secrit {

// Ordered so that a larger enumerator is more critical.
enum class CriticalityLevel { Low = 0, Medium = 1, High = 2 };

std::string_view level_name(CriticalityLevel level);  // "High", "Medium", "Low"
std::optional<CriticalityLevel> parse_level(std::string_view text);

// How a run of equal values that straddles a tertile boundary is placed.
//   TiesJoinHigher   the whole run moves into the more critical bin
//   TiesJoinLower    the whole run moves into the less critical bin
//   StrictThreshold  High: v > q_hi, Medium: q_lo < v <= q_hi, Low: v <= q_lo
// With nearest-rank cuts TiesJoinLower and StrictThreshold place every value
// identically; both identifiers stay accepted.
enum class TieRule { TiesJoinHigher, TiesJoinLower, StrictThreshold };

// Calibrated on the bundled PetClinic fixture.
inline constexpr TieRule kDefaultTieRule = TieRule::StrictThreshold;

std::string_view tie_rule_id(TieRule rule);
std::optional<TieRule> parse_tie_rule(std::string_view text);

struct QuantileCuts {
  std::int64_t high = 0;  // nearest-rank 2/3 quantile
  std::int64_t low = 0;   // nearest-rank 1/3 quantile

  bool operator==(const QuantileCuts&) const = default;
};

struct CriticalityAssessment {
  MetricRecord record;
  std::size_t rank = 0;  // 1 = most critical
  std::optional<CriticalityLevel> level;
  QuantileCuts cuts;
  TieRule tieRule = kDefaultTieRule;

  bool operator==(const CriticalityAssessment&) const = default;
};

struct AssessmentConfig {
  MetricKind metricKind = MetricKind::LOC;
  TieRule tieRule = kDefaultTieRule;
  bool showLow = false;
};

struct LevelCounts {
  std::size_t high = 0;
  std::size_t medium = 0;
  std::size_t low = 0;

  bool operator==(const LevelCounts&) const = default;
};

std::vector<MetricRecord> filter_nonzero(const std::vector<MetricRecord>& records);

// Descending by value, ties by ascending fqn. Requires every value > 0.
std::vector<CriticalityAssessment> rank_descending(const std::vector<MetricRecord>& records);

// Nearest-rank index (1-based, ascending order) of the p = num/3 quantile.
std::size_t tertile_index(std::size_t n, unsigned num);

QuantileCuts tertile_cuts(const std::vector<std::int64_t>& ascending);

// Throws Error(EmptyInput) for an empty list.
std::vector<CriticalityAssessment> bin_levels(std::vector<CriticalityAssessment> ranked, TieRule rule);

std::vector<CriticalityAssessment> assess(const std::vector<ClassModel>& classes, const AssessmentConfig& config);

LevelCounts count_levels(const std::vector<CriticalityAssessment>& assessments);

}  // namespace secrit
