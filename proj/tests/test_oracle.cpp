#include <gtest/gtest.h>

#include <optional>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include "simpson/error.hpp"
#include "simpson/oracle.hpp"
#include "support/rational.hpp"

namespace {

using simpson::BinaryPredictionSet;
using simpson::ContingencyCounts;
using simpson::EnumerationSpace;
using simpson::IdentityId;
using simpson::MetricId;
using simpson::PartitionedComparison;
using simpson::SmoothingGamma;
using simpson::testing::Rational;
namespace st = simpson::testing;

const std::vector<double> kGrid{1.0, 0.5, 2.0, -0.25};

PartitionedComparison documented_witness() {
  return {{{1, 0, 0, 0}, {5, 5, 0, 0}}, {{9, 1, 0, 0}, {3, 7, 0, 0}}};
}

TEST(Enumeration, Counts) {
  EXPECT_EQ(count_sets(EnumerationSpace::all(1)), 4u);
  EXPECT_EQ(count_sets(EnumerationSpace::all(2)), 16u);
  EXPECT_EQ(count_sets(EnumerationSpace::min_predicted_positives(3, 2)), 32u);
  EXPECT_EQ(count_sets(EnumerationSpace::all(5)), 1024u);
  EXPECT_THROW(count_sets(EnumerationSpace::all(0)), simpson::DomainError);
  EXPECT_THROW(count_sets(EnumerationSpace::all(simpson::kMaxEnumerationSize + 1)),
               simpson::DomainError);
}

TEST(Enumeration, VisitsEachConfigurationOnceInOrder) {
  std::vector<std::pair<std::string, std::string>> seen;
  enumerate_sets(EnumerationSpace::all(2), [&](const BinaryPredictionSet& s) {
    seen.emplace_back(s.y_bits(), s.yhat_bits());
  });
  ASSERT_EQ(seen.size(), 16u);
  EXPECT_EQ(seen.front(), std::make_pair(std::string("00"), std::string("00")));
  EXPECT_EQ(seen[1], std::make_pair(std::string("00"), std::string("01")));
  EXPECT_EQ(seen.back(), std::make_pair(std::string("11"), std::string("11")));
  EXPECT_EQ(std::set(seen.begin(), seen.end()).size(), 16u);
  EXPECT_EQ(simpson::configuration(4, 0b10101100), BinaryPredictionSet::from_bits("1010", "1100"));
}

TEST(ExhaustiveVerify, EveryIdentityIsClean) {
  for (auto id : {IdentityId::kAccuracy, IdentityId::kT2Precision, IdentityId::kT2Recall,
                  IdentityId::kT1, IdentityId::kLemma1, IdentityId::kT3}) {
    const auto summary = exhaustive_verify(id, 5, kGrid);
    EXPECT_TRUE(summary.clean()) << simpson::to_string(id) << ": "
                                 << summary.violations.size() << " violations";
    EXPECT_GT(summary.checked, 0u);
  }
}

TEST(ExhaustiveVerify, CheckedCountsFollowFromEnumeration) {
  // sum over n = 1..5 of 4^n
  EXPECT_EQ(exhaustive_verify(IdentityId::kT2Precision, 5, {}).checked, 1364u);
  EXPECT_EQ(exhaustive_verify(IdentityId::kAccuracy, 5, {}).checked, 1364u);
  std::size_t t1_sets = 0;
  for (std::size_t n = 2; n <= 5; ++n) {
    t1_sets += count_sets(EnumerationSpace::min_predicted_positives(n, 2));
  }
  const auto t1 = exhaustive_verify(IdentityId::kT1, 5, {});
  EXPECT_EQ(t1.checked, t1_sets);
  EXPECT_EQ(t1.checked + t1.inapplicable, 1364u);
  const auto lemma = exhaustive_verify(IdentityId::kLemma1, 4, {1.0});
  EXPECT_TRUE(lemma.clean());
  EXPECT_EQ(lemma.checked + lemma.inapplicable, 4u + 16 + 64 + 256);
}

TEST(MonotoneCheck, Examples) {
  EXPECT_TRUE(simpson::accuracy_monotone_check(3, SmoothingGamma(1)));
  EXPECT_TRUE(simpson::accuracy_monotone_check(4, SmoothingGamma(0.5)));
  EXPECT_TRUE(simpson::accuracy_monotone_check(2, SmoothingGamma(1)));
  for (std::size_t n = 1; n <= 4; ++n) {
    for (double g : {1.0, 0.5, 2.0}) {
      EXPECT_TRUE(simpson::accuracy_monotone_check(n, SmoothingGamma(g))) << n << " " << g;
    }
  }
  EXPECT_THROW(simpson::accuracy_monotone_check(3, SmoothingGamma(0)), simpson::DomainError);
  EXPECT_THROW(simpson::accuracy_monotone_check(6, SmoothingGamma(1)), simpson::DomainError);
}

TEST(Reversal, DocumentedWitnessIsAccepted) {
  const auto w = documented_witness();
  EXPECT_TRUE(is_simpson_reversal(w, MetricId::kPrecision));
  auto swapped = w;
  std::swap(swapped.model1, swapped.model0);
  EXPECT_FALSE(is_simpson_reversal(swapped, MetricId::kPrecision));
  EXPECT_NEAR(*simpson::count_metric(MetricId::kPrecision, {6, 5, 0, 0}), 6.0 / 11.0, 1e-15);
  EXPECT_FALSE(simpson::count_metric(MetricId::kPrecision, {0, 0, 3, 3}).has_value());
}

TEST(Reversal, DocumentedWitnessIsAmongSearchResults) {
  const auto target = documented_witness();
  bool found = false;
  std::size_t visited = 0;
  for_each_simpson_reversal(MetricId::kPrecision, {9, 2}, [&](const PartitionedComparison& cmp) {
    ++visited;
    EXPECT_TRUE(is_simpson_reversal(cmp, MetricId::kPrecision));
    if (cmp.model1 == target.model1 && cmp.model0 == target.model0) found = true;
    return true;
  });
  EXPECT_TRUE(found);
  EXPECT_GT(visited, 0u);
  const auto first = find_simpson_reversal(MetricId::kPrecision, {9, 2});
  ASSERT_TRUE(first.has_value());
  EXPECT_TRUE(is_simpson_reversal(*first, MetricId::kPrecision));
}

TEST(Reversal, NoneWithOneGroup) {
  EXPECT_FALSE(find_simpson_reversal(MetricId::kPrecision, {9, 1}).has_value());
  EXPECT_FALSE(find_simpson_reversal(MetricId::kRecall, {9, 1}).has_value());
}

// Brute force over every two-group table with counts in {0, 1}, evaluated
// with exact fractions.
TEST(Reversal, NoneWithUnitCounts) {
  std::size_t reversals = 0;
  auto precision = [](std::int64_t tp, std::int64_t fp) -> std::optional<Rational> {
    if (tp + fp == 0) return std::nullopt;
    return Rational{tp, tp + fp};
  };
  for (int bits = 0; bits < 256; ++bits) {
    const std::int64_t c[8] = {bits & 1,        (bits >> 1) & 1, (bits >> 2) & 1,
                               (bits >> 3) & 1, (bits >> 4) & 1, (bits >> 5) & 1,
                               (bits >> 6) & 1, (bits >> 7) & 1};
    const auto a1 = precision(c[0], c[1]);
    const auto b1 = precision(c[2], c[3]);
    const auto a2 = precision(c[4], c[5]);
    const auto b2 = precision(c[6], c[7]);
    if (!a1 || !b1 || !a2 || !b2) continue;
    if (!(*b1 < *a1) || !(*b2 < *a2)) continue;
    const Rational pooled1{c[0] + c[4], c[0] + c[1] + c[4] + c[5]};
    const Rational pooled0{c[2] + c[6], c[2] + c[3] + c[6] + c[7]};
    reversals += pooled1 < pooled0;
  }
  EXPECT_EQ(reversals, 0u);
  EXPECT_FALSE(find_simpson_reversal(MetricId::kPrecision, {1, 2}).has_value());
  EXPECT_FALSE(find_simpson_reversal(MetricId::kRecall, {1, 2}).has_value());
}

TEST(Reversal, RecallSearchFindsValidWitness) {
  const auto w = find_simpson_reversal(MetricId::kRecall, {9, 2});
  ASSERT_TRUE(w.has_value());
  EXPECT_TRUE(is_simpson_reversal(*w, MetricId::kRecall));
  EXPECT_THROW(find_simpson_reversal(MetricId::kDsc, {9, 2}), simpson::DomainError);
}

TEST(Witness, RoundTrip) {
  std::ostringstream out;
  write_witness(out, MetricId::kPrecision, documented_witness());
  std::istringstream in(out.str());
  MetricId metric = MetricId::kAccuracy;
  const auto back = simpson::parse_witness(in, &metric);
  EXPECT_EQ(metric, MetricId::kPrecision);
  EXPECT_EQ(back.model1, documented_witness().model1);
  EXPECT_EQ(back.model0, documented_witness().model0);

  std::istringstream bad("metric precision\nM1\t2\t1\t0\t0\t0\n");
  EXPECT_THROW(simpson::parse_witness(bad), simpson::ParseError);
  std::istringstream headless("M1\t1\t1\t0\t0\t0\nM0\t1\t1\t0\t0\t0\n");
  EXPECT_THROW(simpson::parse_witness(headless), simpson::ParseError);
}

struct OracleCensus {
  std::size_t pairs = 0, skipped = 0, strict = 0, both_zero = 0;
};

// Exact-fraction census: for every y and ordered pair of distinct
// predictions, compare the movement of the aggregate and averaged forms.
OracleCensus oracle_census(std::size_t n, MetricId metric, Rational g_agg, Rational g_avg) {
  using Point = std::optional<std::pair<Rational, Rational>>;
  auto evaluate = [&](const BinaryPredictionSet& s) -> Point {
    std::optional<Rational> f, fbar;
    switch (metric) {
      case MetricId::kPrecision:
        f = st::exact_aggregate(s.y(), s.yhat(), g_agg, st::tp_cell, st::pred_cell);
        fbar = st::exact_average(s.y(), s.yhat(), g_avg, st::tp_cell, st::pred_cell);
        break;
      case MetricId::kDsc:
        f = st::exact_aggregate(s.y(), s.yhat(), g_agg, st::dsc_num_cell, st::dsc_den_cell);
        fbar = st::exact_average(s.y(), s.yhat(), g_avg, st::dsc_num_cell, st::dsc_den_cell);
        break;
      default: {
        std::int64_t hits = 0;
        for (std::size_t i = 0; i < s.size(); ++i) hits += s.y()[i] == s.yhat()[i];
        f = fbar = Rational{hits, static_cast<std::int64_t>(s.size())};
      }
    }
    if (!f || !fbar) return std::nullopt;
    return std::make_pair(*f, *fbar);
  };
  OracleCensus out;
  const std::uint32_t masks = 1u << n;
  for (std::uint32_t y = 0; y < masks; ++y) {
    std::vector<Point> points;
    for (std::uint32_t p = 0; p < masks; ++p) {
      points.push_back(evaluate(simpson::configuration(n, (y << n) | p)));
    }
    for (std::uint32_t a = 0; a < masks; ++a) {
      for (std::uint32_t b = 0; b < masks; ++b) {
        if (a == b) continue;
        ++out.pairs;
        if (!points[a] || !points[b]) {
          ++out.skipped;
          continue;
        }
        const Rational df = points[b]->first - points[a]->first;
        const Rational dfbar = points[b]->second - points[a]->second;
        if (df.is_zero() && dfbar.is_zero()) {
          ++out.both_zero;
        } else if (!(Rational{0} < df * dfbar)) {
          ++out.strict;
        }
      }
    }
  }
  return out;
}

TEST(Census, MatchesExactOracle) {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (auto metric : {MetricId::kDsc, MetricId::kPrecision, MetricId::kAccuracy}) {
      const auto got = reversal_census(n, metric, SmoothingGamma(0), SmoothingGamma(1));
      const auto want = oracle_census(n, metric, Rational{0}, Rational{1});
      SCOPED_TRACE(std::string(simpson::to_string(metric)) + " n=" + std::to_string(n));
      EXPECT_FALSE(got.sampled);
      EXPECT_EQ(got.pairs, want.pairs);
      EXPECT_EQ(got.skipped, want.skipped);
      EXPECT_EQ(got.strict_reversals, want.strict);
      EXPECT_EQ(got.both_zero, want.both_zero);
    }
  }
}

TEST(Census, FrozenValues) {
  const auto dsc = reversal_census(2, MetricId::kDsc, SmoothingGamma(0), SmoothingGamma(1));
  EXPECT_EQ(dsc.pairs, 48u);
  EXPECT_EQ(dsc.skipped, 6u);
  EXPECT_EQ(dsc.strict_reversals, 12u);
  EXPECT_EQ(dsc.both_zero, 4u);
  EXPECT_DOUBLE_EQ(dsc.strict_fraction(), 12.0 / 42.0);

  for (std::size_t n = 1; n <= 4; ++n) {
    EXPECT_EQ(reversal_census(n, MetricId::kAccuracy, SmoothingGamma(0), SmoothingGamma(1))
                  .strict_reversals,
              0u);
  }
  for (auto metric : {MetricId::kDsc, MetricId::kPrecision, MetricId::kRecall}) {
    EXPECT_EQ(reversal_census(1, metric, SmoothingGamma(1), SmoothingGamma(1)).strict_reversals, 0u);
  }
}

TEST(Census, SamplingIsSeeded) {
  simpson::CensusOptions opts{7, 2000};
  const auto a = reversal_census(8, MetricId::kDsc, SmoothingGamma(0), SmoothingGamma(1), opts);
  const auto b = reversal_census(8, MetricId::kDsc, SmoothingGamma(0), SmoothingGamma(1), opts);
  EXPECT_TRUE(a.sampled);
  EXPECT_EQ(a.pairs, 2000u);
  EXPECT_EQ(a.strict_reversals, b.strict_reversals);
  EXPECT_EQ(a.skipped, b.skipped);
  EXPECT_GT(a.strict_reversals, 0u);
  std::ostringstream csv;
  write_census_csv(csv, a);
  EXPECT_EQ(csv.str().rfind("metric,n,sampled,pairs,skipped,evaluable", 0), 0u);
}

}  // namespace
