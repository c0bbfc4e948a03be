#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "secrit/criticality.hpp"

using namespace secrit;

namespace {

constexpr TieRule kRules[] = {TieRule::TiesJoinHigher, TieRule::TiesJoinLower, TieRule::StrictThreshold};

MetricRecord rec(std::string fqn, std::int64_t value) {
  MetricRecord r;
  r.fqn = std::move(fqn);
  r.value = value;
  r.kind = MetricKind::LOC;
  return r;
}

std::vector<MetricRecord> recs(const std::vector<std::int64_t>& values) {
  std::vector<MetricRecord> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "m%04zu", i);
    out.push_back(rec(name, values[i]));
  }
  return out;
}

std::map<std::int64_t, CriticalityLevel> levels_by_value(const std::vector<CriticalityAssessment>& as) {
  std::map<std::int64_t, CriticalityLevel> out;
  for (const auto& a : as) out[a.record.value] = *a.level;
  return out;
}

}  // namespace

TEST(CriticalityLevel, NamesRoundTrip) {
  for (auto l : {CriticalityLevel::High, CriticalityLevel::Medium, CriticalityLevel::Low}) {
    EXPECT_EQ(parse_level(level_name(l)), l);
  }
  EXPECT_GT(CriticalityLevel::High, CriticalityLevel::Medium);
  EXPECT_GT(CriticalityLevel::Medium, CriticalityLevel::Low);
}

TEST(TieRuleIds, RoundTrip) {
  for (auto r : kRules) EXPECT_EQ(parse_tie_rule(tie_rule_id(r)), r);
  EXPECT_FALSE(parse_tie_rule("nearest"));
}

TEST(FilterNonzero, AllZero) { EXPECT_TRUE(filter_nonzero(recs({0, 0, 0})).empty()); }

TEST(FilterNonzero, KeepsOrder) {
  const auto out = filter_nonzero(recs({0, 3, 0, 1}));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].value, 3);
  EXPECT_EQ(out[1].value, 1);
  EXPECT_EQ(out[0].fqn, "m0001");
}

TEST(RankDescending, TiesBrokenByFqn) {
  const auto ranked = rank_descending({rec("a", 5), rec("b", 9), rec("c", 5)});
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].record.fqn, "b");
  EXPECT_EQ(ranked[1].record.fqn, "a");
  EXPECT_EQ(ranked[2].record.fqn, "c");
  EXPECT_EQ(ranked[0].rank, 1u);
  EXPECT_EQ(ranked[2].rank, 3u);
}

TEST(RankDescending, SingleRecord) {
  const auto ranked = rank_descending({rec("only", 4)});
  ASSERT_EQ(ranked.size(), 1u);
  EXPECT_EQ(ranked[0].rank, 1u);
}

TEST(TertileCuts, NearestRank) {
  EXPECT_EQ(tertile_index(6, 1), 2u);
  EXPECT_EQ(tertile_index(6, 2), 4u);
  EXPECT_EQ(tertile_index(7, 1), 3u);
  EXPECT_EQ(tertile_index(7, 2), 5u);
  EXPECT_EQ(tertile_index(1, 1), 1u);
  EXPECT_EQ(tertile_cuts({4, 5, 6, 7, 8, 9}), (QuantileCuts{7, 5}));
}

TEST(BinLevels, SixDistinctValues) {
  for (auto rule : kRules) {
    const auto out = bin_levels(rank_descending(recs({9, 8, 7, 6, 5, 4})), rule);
    const auto by = levels_by_value(out);
    EXPECT_EQ(by.at(9), CriticalityLevel::High);
    EXPECT_EQ(by.at(8), CriticalityLevel::High);
    EXPECT_EQ(by.at(7), CriticalityLevel::Medium);
    EXPECT_EQ(by.at(6), CriticalityLevel::Medium);
    EXPECT_EQ(by.at(5), CriticalityLevel::Low);
    EXPECT_EQ(by.at(4), CriticalityLevel::Low);
    EXPECT_EQ(out.front().cuts, (QuantileCuts{7, 5}));
    EXPECT_EQ(out.front().tieRule, rule);
  }
}

TEST(BinLevels, AllEqualValuesShareOneLevel) {
  const auto higher = bin_levels(rank_descending(recs({3, 3, 3, 3})), TieRule::TiesJoinHigher);
  const auto strict = bin_levels(rank_descending(recs({3, 3, 3, 3})), TieRule::StrictThreshold);
  for (const auto& a : higher) EXPECT_EQ(*a.level, CriticalityLevel::High);
  for (const auto& a : strict) EXPECT_EQ(*a.level, CriticalityLevel::Low);
}

TEST(BinLevels, TieRunAcrossCut) {
  // ascending 1 2 5 5 5 9: nearest-rank cuts q_lo=2, q_hi=5
  const auto values = std::vector<std::int64_t>{9, 5, 5, 5, 2, 1};
  const auto high = levels_by_value(bin_levels(rank_descending(recs(values)), TieRule::TiesJoinHigher));
  EXPECT_EQ(high.at(5), CriticalityLevel::High);
  EXPECT_EQ(high.at(2), CriticalityLevel::Low);
  const auto strict = levels_by_value(bin_levels(rank_descending(recs(values)), TieRule::StrictThreshold));
  EXPECT_EQ(strict.at(9), CriticalityLevel::High);
  EXPECT_EQ(strict.at(5), CriticalityLevel::Medium);
  EXPECT_EQ(strict.at(2), CriticalityLevel::Low);
}

TEST(BinLevels, SmallInputs) {
  const auto one = bin_levels(rank_descending(recs({4})), kDefaultTieRule);
  EXPECT_EQ(*one[0].level, CriticalityLevel::High);
  const auto two = bin_levels(rank_descending(recs({4, 2})), kDefaultTieRule);
  EXPECT_EQ(*two[0].level, CriticalityLevel::High);
  EXPECT_EQ(*two[1].level, CriticalityLevel::Medium);
}

TEST(BinLevels, EmptyInputThrows) {
  try {
    bin_levels({}, kDefaultTieRule);
    FAIL() << "expected EmptyInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

TEST(BinLevels, LowerAndStrictAgree) {
  std::mt19937 rng(7);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<std::int64_t> values(1 + rng() % 60);
    for (auto& v : values) v = 1 + rng() % 8;
    const auto a = bin_levels(rank_descending(recs(values)), TieRule::TiesJoinLower);
    const auto b = bin_levels(rank_descending(recs(values)), TieRule::StrictThreshold);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i].level, b[i].level);
  }
}

TEST(BinLevels, RandomizedProperties) {
  std::mt19937 rng(2024);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t n = 1 + rng() % 200;
    const std::int64_t range = iter % 3 == 0 ? 3 : 1000;
    std::vector<std::int64_t> values(n);
    for (auto& v : values) v = 1 + static_cast<std::int64_t>(rng() % range);
    for (auto rule : kRules) {
      const auto out = bin_levels(rank_descending(recs(values)), rule);
      ASSERT_EQ(out.size(), n);
      std::map<std::int64_t, CriticalityLevel> seen;
      for (std::size_t i = 0; i < n; ++i) {
        ASSERT_EQ(out[i].rank, i + 1);
        if (i > 0) {
          ASSERT_GE(out[i - 1].record.value, out[i].record.value);
          ASSERT_GE(*out[i - 1].level, *out[i].level);
        }
        auto [it, fresh] = seen.emplace(out[i].record.value, *out[i].level);
        if (!fresh) ASSERT_EQ(it->second, *out[i].level);
      }

      auto shuffled = recs(values);
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      auto fqnLevels = [](const std::vector<CriticalityAssessment>& as) {
        std::map<std::string, std::pair<std::size_t, CriticalityLevel>> m;
        for (const auto& a : as) m[a.record.fqn] = {a.rank, *a.level};
        return m;
      };
      ASSERT_EQ(fqnLevels(out), fqnLevels(bin_levels(rank_descending(shuffled), rule)));
    }
  }
}

TEST(BinLevels, DistinctValuesGiveNearEqualBins) {
  for (std::size_t n = 1; n <= 90; ++n) {
    std::vector<std::int64_t> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<std::int64_t>(i + 1);
    for (auto rule : kRules) {
      const auto c = count_levels(bin_levels(rank_descending(recs(values)), rule));
      const auto [lo, hi] = std::minmax({c.high, c.medium, c.low});
      EXPECT_LE(hi - lo, 1u) << "n=" << n;
      EXPECT_EQ(c.high + c.medium + c.low, n);
      if (n % 3 == 0) EXPECT_EQ(c.high, n / 3);
    }
  }
}

TEST(Assess, EmptyProject) { EXPECT_TRUE(assess({}, {}).empty()); }

TEST(Assess, ZeroLcomRecordsDropOut) {
  auto f = std::make_shared<SourceFile>();
  f->path = "T.java";
  const auto classes = parse_source(f, "class T { int a; int f() { return a; } int g() { return a; } }").classes;
  EXPECT_TRUE(assess(classes, {MetricKind::LCOM, kDefaultTieRule, false}).empty());
  EXPECT_EQ(assess(classes, {MetricKind::LOC, kDefaultTieRule, false}).size(), 2u);
}
