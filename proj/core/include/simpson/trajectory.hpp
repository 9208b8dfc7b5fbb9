#pragma once

// Per-step (F, F-bar, epsilon) series from training trajectories, reversal
// pairs between consecutive steps, bias/quality correlation, and a seeded
// binary-prediction simulator that writes trajectories in the same format.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simpson/binary.hpp"
#include "simpson/bleu.hpp"
#include "simpson/metric_id.hpp"
#include "simpson/multiclass.hpp"

namespace simpson {

struct MetricConfig {
  MetricId metric = MetricId::kDsc;
  double gamma_agg = 0.0;
  double gamma_avg = 1.0;
  PaddingPolicy padding = PaddingPolicy::kInclude;
  SmoothingPolicy smoothing{};
  std::optional<std::size_t> classes;  // multiclass files only
};

// Evaluates the metric pair on an input file; BLEU needs the reference path.
// Binary ids read a binary label file, macro-f1 / dice-loss a multiclass file,
// ner-* an NER batch file.
BiasReport evaluate_file(const MetricConfig& config, const std::filesystem::path& path,
                         const std::filesystem::path& reference_path = {});
BiasReport evaluate_multiclass(const MetricConfig& config, const MultiClassSet& set);
BiasReport evaluate_ner(const MetricConfig& config, const TaggedSentenceBatch& batch);
BiasReport evaluate_bleu(const MetricConfig& config, const BleuCorpus& corpus);

struct SeriesPoint {
  std::int64_t step = 0;
  double f = 0.0;
  double fbar = 0.0;
  double epsilon = 0.0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

using MetricSeries = std::vector<SeriesPoint>;

// JSON lines: {"step": t, "F": x, "Fbar": y} or {"step": t, "snapshot": path}
// ({"hyp": path, "ref": path} for BLEU). Snapshot paths resolve against
// base_dir. Steps must strictly increase and payload kinds must not mix.
MetricSeries parse_trajectory(std::istream& in, std::string_view source,
                              const std::filesystem::path& base_dir,
                              const MetricConfig& config);
MetricSeries ingest(const std::filesystem::path& path, const MetricConfig& config);

struct ReversalOptions {
  bool strict = false;
  // Drop transitions whose max(|dF|, |dFbar|) exceeds this percentile of
  // all such magnitudes (nearest rank, in (0, 100]). Off when unset.
  std::optional<double> trim_percentile;
};

struct ReversalReport {
  std::vector<std::int64_t> steps;  // later step of each reversal transition
  std::size_t transitions = 0;      // transitions considered (after trimming)
  std::size_t trimmed = 0;
  std::size_t count = 0;
  double ratio = 0.0;
  bool strict = false;
};

// Default predicate dF * dFbar <= 0; strict requires a sign disagreement or
// exactly one zero delta.
bool is_reversal(double delta_f, double delta_fbar, bool strict);

ReversalReport reversal_pairs(const MetricSeries& series, const ReversalOptions& options = {});

struct CorrelationReport {
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::size_t count = 0;
  std::string diagnostic;
};

// Points are (epsilon, quality). Needs at least 3 finite points; a constant
// coordinate leaves the correlations unset with a diagnostic.
CorrelationReport bias_quality_correlation(const std::vector<std::pair<double, double>>& points);

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(const std::vector<double>& values);

struct FlipSegment {
  std::int64_t from_step = 0;
  double fix_probability = 0.3;    // wrong -> correct
  double break_probability = 0.1;  // correct -> wrong
};

struct SimulationConfig {
  std::size_t n = 50;
  std::size_t steps = 100;
  std::vector<FlipSegment> schedule{FlipSegment{}};
  std::uint64_t seed = 20210;
  MetricConfig metric{};
  bool precomputed = false;  // write {F, Fbar} rows instead of snapshots
};

// Parses "from:p:q,from:p:q,..."
std::vector<FlipSegment> parse_schedule(std::string_view text);

// Writes out_dir/trajectory.jsonl (and out_dir/snapshots/step_NNNNN.tsv in
// snapshot mode) for steps 0..steps, returning the series it evaluated.
MetricSeries simulate_trajectory(const SimulationConfig& config,
                                 const std::filesystem::path& out_dir);

// In-memory prediction snapshots for steps 0..steps (no files).
std::vector<BinaryPredictionSet> simulate_snapshots(const SimulationConfig& config);

// CSV: t,F,Fbar,epsilon,dF,dFbar,reversal. The first row has empty deltas;
// trimmed transitions carry reversal "trimmed".
void write_analysis_csv(std::ostream& out, const MetricSeries& series,
                        const ReversalOptions& options = {});

}  // namespace simpson
