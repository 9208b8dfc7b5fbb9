#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "simpson/error.hpp"
#include "simpson/io.hpp"
#include "simpson/trajectory.hpp"
#include "support/temp_dir.hpp"

namespace {

using simpson::MetricConfig;
using simpson::MetricId;
using simpson::MetricSeries;
using simpson::ParseError;
using simpson::ReversalOptions;
using simpson::SimulationConfig;
using simpson::testing::slurp;
using simpson::testing::TempDir;

constexpr double kTol = 1e-12;

MetricSeries constructed() {
  return {{0, 0.50, 0.70, 0.20}, {1, 0.60, 0.65, 0.05}, {2, 0.55, 0.72, 0.17}};
}

MetricSeries parse(const std::string& text, const std::filesystem::path& base = ".",
                   const MetricConfig& config = {}) {
  std::istringstream in(text);
  return simpson::parse_trajectory(in, "traj.jsonl", base, config);
}

TEST(Reversals, ConstructedSeries) {
  const auto r = reversal_pairs(constructed());
  EXPECT_EQ(r.steps, (std::vector<std::int64_t>{1, 2}));
  EXPECT_EQ(r.count, 2u);
  EXPECT_EQ(r.transitions, 2u);
  EXPECT_DOUBLE_EQ(r.ratio, 1.0);
}

TEST(Reversals, MonotoneSeriesHasNone) {
  MetricSeries s;
  for (int t = 0; t < 10; ++t) s.push_back({t, 0.1 * t, 0.05 * t + 0.2, 0.0});
  EXPECT_EQ(reversal_pairs(s).count, 0u);
  EXPECT_EQ(reversal_pairs(s).ratio, 0.0);
  EXPECT_THROW(reversal_pairs(MetricSeries{{0, 0.5, 0.5, 0}}), simpson::DomainError);
}

TEST(Reversals, Predicates) {
  EXPECT_TRUE(simpson::is_reversal(0.0, 0.1, false));
  EXPECT_TRUE(simpson::is_reversal(0.0, 0.1, true));
  EXPECT_TRUE(simpson::is_reversal(0.0, 0.0, false));
  EXPECT_FALSE(simpson::is_reversal(0.0, 0.0, true));
  EXPECT_TRUE(simpson::is_reversal(0.2, -0.1, true));
  EXPECT_FALSE(simpson::is_reversal(-0.2, -0.1, false));

  const MetricSeries flat{{0, 0.5, 0.5, 0}, {1, 0.5, 0.5, 0}, {2, 0.5, 0.6, 0.1}};
  EXPECT_EQ(reversal_pairs(flat).count, 2u);
  EXPECT_EQ(reversal_pairs(flat, {true, std::nullopt}).count, 1u);
}

TEST(Reversals, Trimming) {
  MetricSeries s{{0, 0.5, 0.5, 0}, {1, 0.51, 0.49, 0}, {2, 0.9, 0.1, 0}, {3, 0.91, 0.11, 0}};
  ReversalOptions opts;
  opts.trim_percentile = 50.0;
  const auto r = reversal_pairs(s, opts);
  EXPECT_EQ(r.trimmed, 1u);
  EXPECT_EQ(r.transitions, 2u);
  EXPECT_EQ(r.steps, (std::vector<std::int64_t>{1}));
  opts.trim_percentile = 0.0;
  EXPECT_THROW(reversal_pairs(s, opts), simpson::DomainError);

  std::ostringstream csv;
  opts.trim_percentile = 50.0;
  write_analysis_csv(csv, s, opts);
  EXPECT_NE(csv.str().find(",trimmed\n"), std::string::npos);
}

TEST(Analysis, CsvLayout) {
  std::ostringstream csv;
  write_analysis_csv(csv, constructed());
  std::istringstream in(csv.str());
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header, "t,F,Fbar,epsilon,dF,dFbar,reversal");
  EXPECT_EQ(first, "0,0.5,0.7,0.2,,,");
  EXPECT_EQ(second.rfind("1,0.6,0.65,0.05,", 0), 0u);
  EXPECT_EQ(second.back(), '1');
}

TEST(Correlation, Examples) {
  const std::vector<std::pair<double, double>> pts{{0.02, 0.97}, {0.10, 0.90}, {0.18, 0.81}};
  // independent two-pass evaluation
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x / 3;
    my += y / 3;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
  }
  const auto r = simpson::bias_quality_correlation(pts);
  ASSERT_TRUE(r.pearson.has_value());
  EXPECT_NEAR(*r.pearson, sxy / std::sqrt(sxx * syy), kTol);
  EXPECT_NEAR(*r.pearson, -0.997406, 1e-6);
  EXPECT_LT(*r.pearson, 0.0);
  ASSERT_TRUE(r.spearman.has_value());
  EXPECT_NEAR(*r.spearman, -1.0, kTol);

  const auto line = simpson::bias_quality_correlation({{0.0, 1.0}, {1.0, 3.0}, {2.0, 5.0}, {3.0, 7.0}});
  EXPECT_NEAR(*line.pearson, 1.0, kTol);

  const auto flat = simpson::bias_quality_correlation({{0.1, 0.5}, {0.1, 0.7}, {0.1, 0.9}});
  EXPECT_FALSE(flat.pearson.has_value());
  EXPECT_FALSE(flat.diagnostic.empty());
  EXPECT_THROW(simpson::bias_quality_correlation({{0.1, 0.2}, {0.3, 0.4}}), simpson::DomainError);
}

TEST(Correlation, AverageRanks) {
  EXPECT_EQ(simpson::average_ranks({3.0, 1.0, 2.0}), (std::vector<double>{3, 1, 2}));
  EXPECT_EQ(simpson::average_ranks({1.0, 2.0, 2.0, 5.0}), (std::vector<double>{1, 2.5, 2.5, 4}));
}

TEST(Ingest, PrecomputedRecords) {
  const auto s = parse(
      "{\"step\": 0, \"F\": 0.5, \"Fbar\": 0.7}\n"
      "\n"
      "{\"step\": 3, \"F\": 0.6, \"Fbar\": 0.65}\n"
      "{\"step\": 9, \"F\": 0.55, \"Fbar\": 0.72}\n");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[1].step, 3);
  EXPECT_NEAR(s[2].epsilon, 0.17, kTol);
}

TEST(Ingest, Errors) {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_EQ(message(""), "traj.jsonl: empty trajectory");
  EXPECT_EQ(message("{\"step\": 0, \"F\": 0.5}\n").rfind("traj.jsonl:1:", 0), 0u);
  EXPECT_EQ(message("{\"step\": 1, \"F\": 0.5, \"Fbar\": 0.5}\n"
                    "{\"step\": 1, \"F\": 0.5, \"Fbar\": 0.5}\n")
                .rfind("traj.jsonl:2: steps must strictly increase", 0),
            0u);
  EXPECT_EQ(message("{\"step\": 0, \"F\": 0.5, \"Fbar\": 0.5}\n"
                    "{\"step\": 1, \"snapshot\": \"a.tsv\"}\n")
                .rfind("traj.jsonl:2: payload kind", 0),
            0u);
  EXPECT_EQ(message("not json\n").rfind("traj.jsonl:1: malformed JSON", 0), 0u);
  EXPECT_EQ(message("{\"step\": 0, \"snapshot\": \"missing.tsv\"}\n").rfind("traj.jsonl:1: snapshot:", 0),
            0u);
}

TEST(Ingest, RepeatedSnapshotGivesConstantSeries) {
  TempDir dir;
  dir.write("e1.tsv", "1\t1\n0\t1\n1\t0\n0\t0\n");
  auto path = dir.write("traj.jsonl",
                        "{\"step\": 0, \"snapshot\": \"e1.tsv\"}\n"
                        "{\"step\": 1, \"snapshot\": \"e1.tsv\"}\n"
                        "{\"step\": 2, \"snapshot\": \"e1.tsv\"}\n");
  const auto s = simpson::ingest(path, {});
  ASSERT_EQ(s.size(), 3u);
  for (const auto& p : s) {
    EXPECT_NEAR(p.f, 0.5, kTol);
    EXPECT_NEAR(p.fbar, 0.75, kTol);
    EXPECT_NEAR(p.epsilon, 0.25, kTol);
  }
  EXPECT_EQ(reversal_pairs(s).count, 2u);  // both deltas zero
  EXPECT_EQ(reversal_pairs(s, {true, std::nullopt}).count, 0u);
}

TEST(Ingest, BleuSnapshots) {
  TempDir dir;
  dir.write("h.txt", "the cat sat on the mat\n");
  dir.write("r.txt", "the cat sat on a mat\n");
  auto path = dir.write("traj.jsonl", "{\"step\": 0, \"snapshot\": {\"hyp\": \"h.txt\", \"ref\": \"r.txt\"}}\n");
  MetricConfig config;
  config.metric = MetricId::kBleu;
  const auto s = simpson::ingest(path, config);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s[0].f, -1.621226662, 1e-9);
}

TEST(Simulation, ScheduleParsing) {
  const auto s = simpson::parse_schedule("0:0.3:0.1,50:0.1:0.05");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].from_step, 50);
  EXPECT_DOUBLE_EQ(s[1].break_probability, 0.05);
  EXPECT_THROW(simpson::parse_schedule("0:0.3"), simpson::DomainError);
  EXPECT_THROW(simpson::parse_schedule("0:0.3:0.1x"), simpson::DomainError);
  SimulationConfig bad;
  bad.schedule = simpson::parse_schedule("5:0.3:0.1");
  EXPECT_THROW(simpson::simulate_snapshots(bad), simpson::DomainError);
  bad.schedule = simpson::parse_schedule("0:1.5:0.1");
  EXPECT_THROW(simpson::simulate_snapshots(bad), simpson::DomainError);
}

TEST(Simulation, PerfectFixRateConverges) {
  SimulationConfig config;
  config.n = 40;
  config.steps = 40;
  config.schedule = {{0, 1.0, 0.0}};
  config.metric.gamma_agg = 1.0;
  config.metric.gamma_avg = 1.0;
  const auto snaps = simpson::simulate_snapshots(config);
  ASSERT_EQ(snaps.size(), 41u);
  const auto& last = snaps.back();
  EXPECT_TRUE(std::equal(last.y().begin(), last.y().end(), last.yhat().begin()));
  TempDir dir;
  const auto series = simpson::simulate_trajectory(config, dir.path());
  EXPECT_NEAR(series.back().epsilon, 0.0, kTol);
}

TEST(Simulation, SnapshotsFollowClosedFormPerStep) {
  SimulationConfig config;
  config.n = 30;
  config.steps = 25;
  TempDir dir;
  const auto series = simpson::simulate_trajectory(config, dir.path());
  const auto snaps = simpson::simulate_snapshots(config);
  ASSERT_EQ(series.size(), snaps.size());
  for (std::size_t t = 0; t < snaps.size(); ++t) {
    const auto c = contingency(snaps[t]);
    EXPECT_NEAR(series[t].fbar, 1.0 - static_cast<double>(c.mismatches()) / (2.0 * 30.0), kTol);
  }
}

TEST(Simulation, DeterministicAndRoundTrips) {
  SimulationConfig config;
  TempDir a, b;
  const auto first = simpson::simulate_trajectory(config, a.path());
  const auto second = simpson::simulate_trajectory(config, b.path());
  EXPECT_EQ(first, second);
  EXPECT_EQ(slurp(a.path() / "trajectory.jsonl"), slurp(b.path() / "trajectory.jsonl"));
  EXPECT_EQ(slurp(a.path() / "snapshots/step_00100.tsv"),
            slurp(b.path() / "snapshots/step_00100.tsv"));
  EXPECT_EQ(simpson::ingest(a.path() / "trajectory.jsonl", config.metric), first);

  config.precomputed = true;
  TempDir c;
  const auto pre = simpson::simulate_trajectory(config, c.path());
  EXPECT_EQ(pre, first);
  EXPECT_EQ(simpson::ingest(c.path() / "trajectory.jsonl", config.metric), first);

  config.seed += 1;
  config.precomputed = false;
  EXPECT_NE(simpson::simulate_snapshots(config).back(),
            simpson::simulate_snapshots(SimulationConfig{}).back());
}

TEST(Simulation, AccuracyTrajectoryIsUnbiased) {
  SimulationConfig config;
  config.metric.metric = MetricId::kAccuracy;
  TempDir dir;
  for (const auto& p : simpson::simulate_trajectory(config, dir.path())) EXPECT_EQ(p.epsilon, 0.0);
  config.metric.metric = MetricId::kMacroF1;
  EXPECT_THROW(simpson::simulate_trajectory(config, dir.path()), simpson::DomainError);
}

}  // namespace
