#include "secrit/criticality.hpp"

#include <algorithm>
#include <limits>

namespace secrit {

std::string_view level_name(CriticalityLevel level) {
  switch (level) {
    case CriticalityLevel::High:
      return "High";
    case CriticalityLevel::Medium:
      return "Medium";
    case CriticalityLevel::Low:
      return "Low";
  }
  return "?";
}

std::optional<CriticalityLevel> parse_level(std::string_view text) {
  for (auto l : {CriticalityLevel::High, CriticalityLevel::Medium, CriticalityLevel::Low}) {
    if (text == level_name(l)) return l;
  }
  return std::nullopt;
}

std::string_view tie_rule_id(TieRule rule) {
  switch (rule) {
    case TieRule::TiesJoinHigher:
      return "ties-join-higher";
    case TieRule::TiesJoinLower:
      return "ties-join-lower";
    case TieRule::StrictThreshold:
      return "strict-threshold";
  }
  return "?";
}

std::optional<TieRule> parse_tie_rule(std::string_view text) {
  for (auto r : {TieRule::TiesJoinHigher, TieRule::TiesJoinLower, TieRule::StrictThreshold}) {
    if (text == tie_rule_id(r)) return r;
  }
  return std::nullopt;
}

std::vector<MetricRecord> filter_nonzero(const std::vector<MetricRecord>& records) {
  std::vector<MetricRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out), [](const MetricRecord& r) { return r.value > 0; });
  return out;
}

std::vector<CriticalityAssessment> rank_descending(const std::vector<MetricRecord>& records) {
  std::vector<CriticalityAssessment> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r, 0, std::nullopt, {}, kDefaultTieRule});
  std::stable_sort(out.begin(), out.end(), [](const CriticalityAssessment& a, const CriticalityAssessment& b) {
    if (a.record.value != b.record.value) return a.record.value > b.record.value;
    return a.record.fqn < b.record.fqn;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

std::size_t tertile_index(std::size_t n, unsigned num) { return (n * num + 2) / 3; }

QuantileCuts tertile_cuts(const std::vector<std::int64_t>& ascending) {
  const std::size_t n = ascending.size();
  if (n == 0) return {};
  return {ascending[tertile_index(n, 2) - 1], ascending[tertile_index(n, 1) - 1]};
}

std::vector<CriticalityAssessment> bin_levels(std::vector<CriticalityAssessment> ranked, TieRule rule) {
  if (ranked.empty()) throw Error(ErrorCode::EmptyInput, "cannot bin an empty assessment list");
  const std::size_t n = ranked.size();

  std::vector<std::int64_t> values;
  values.reserve(n);
  for (const auto& a : ranked) values.push_back(a.record.value);
  std::sort(values.begin(), values.end());
  const QuantileCuts cuts = tertile_cuts(values);

  // Smallest value of the positional High and Medium bins.
  constexpr auto kNever = std::numeric_limits<std::int64_t>::max();
  const std::size_t kLo = tertile_index(n, 1);
  const std::size_t kHi = tertile_index(n, 2);
  const std::int64_t highFloor = kHi < n ? values[kHi] : kNever;
  const std::int64_t mediumFloor = kLo < n ? values[kLo] : kNever;

  const std::int64_t top = values.back();
  for (auto& a : ranked) {
    const std::int64_t v = a.record.value;
    CriticalityLevel level;
    if (n < 3) {
      // One record is High; a second distinct one is Medium.
      level = v == top ? CriticalityLevel::High : CriticalityLevel::Medium;
    } else if (rule == TieRule::TiesJoinHigher) {
      level = v >= highFloor     ? CriticalityLevel::High
              : v >= mediumFloor ? CriticalityLevel::Medium
                                 : CriticalityLevel::Low;
    } else {
      level = v > cuts.high ? CriticalityLevel::High : v > cuts.low ? CriticalityLevel::Medium : CriticalityLevel::Low;
    }
    a.level = level;
    a.cuts = cuts;
    a.tieRule = rule;
  }
  return ranked;
}

std::vector<CriticalityAssessment> assess(const std::vector<ClassModel>& classes, const AssessmentConfig& config) {
  auto ranked = rank_descending(filter_nonzero(attribute_metric(classes, config.metricKind)));
  if (ranked.empty()) return {};
  return bin_levels(std::move(ranked), config.tieRule);
}

LevelCounts count_levels(const std::vector<CriticalityAssessment>& assessments) {
  LevelCounts c;
  for (const auto& a : assessments) {
    if (!a.level) continue;
    switch (*a.level) {
      case CriticalityLevel::High:
        ++c.high;
        break;
      case CriticalityLevel::Medium:
        ++c.medium;
        break;
      case CriticalityLevel::Low:
        ++c.low;
        break;
    }
  }
  return c;
}

}  // namespace secrit
