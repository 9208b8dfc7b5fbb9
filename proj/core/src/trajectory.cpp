#include "simpson/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "simpson/error.hpp"
#include "simpson/io.hpp"

namespace simpson {
namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw ParseError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

// kept[t-1] tells whether transition t survives trimming.
std::vector<bool> kept_transitions(const MetricSeries& series, const ReversalOptions& options) {
  const std::size_t transitions = series.size() - 1;
  std::vector<bool> kept(transitions, true);
  if (!options.trim_percentile) return kept;
  const double pct = *options.trim_percentile;
  if (!(pct > 0.0 && pct <= 100.0)) {
    throw DomainError("trim percentile must be in (0, 100]");
  }
  std::vector<double> magnitude(transitions);
  for (std::size_t t = 1; t < series.size(); ++t) {
    magnitude[t - 1] = std::max(std::abs(series[t].f - series[t - 1].f),
                                std::abs(series[t].fbar - series[t - 1].fbar));
  }
  auto sorted = magnitude;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(pct / 100.0 * static_cast<double>(transitions)));
  const double threshold = sorted[std::clamp<std::size_t>(rank, 1, transitions) - 1];
  for (std::size_t i = 0; i < transitions; ++i) kept[i] = magnitude[i] <= threshold;
  return kept;
}

void check_series(const MetricSeries& series) {
  if (series.size() < 2) throw DomainError("reversal analysis needs at least two steps");
}

bool constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

// A constant coordinate is caught by exact comparison; the rounded mean would
// otherwise leave a tiny nonzero variance.
double pearson_of(const std::vector<double>& x, const std::vector<double>& y,
                  bool* degenerate) {
  if (constant(x) || constant(y)) {
    *degenerate = true;
    return 0.0;
  }
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    *degenerate = true;
    return 0.0;
  }
  *degenerate = false;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

BiasReport evaluate_binary(const MetricConfig& config, const BinaryPredictionSet& set) {
  return bias(set, config.metric, SmoothingGamma(config.gamma_agg),
              SmoothingGamma(config.gamma_avg));
}

std::string snapshot_name(std::size_t step) {
  std::ostringstream os;
  os << "snapshots/step_" << std::setw(5) << std::setfill('0') << step << ".tsv";
  return os.str();
}

}  // namespace

BiasReport evaluate_multiclass(const MetricConfig& config, const MultiClassSet& set) {
  const SmoothingGamma agg(config.gamma_agg);
  const SmoothingGamma avg(config.gamma_avg);
  switch (config.metric) {
    case MetricId::kMacroF1:
      return make_bias_report(macro_f1_aggregate(set, agg), macro_f1_average(set, avg));
    case MetricId::kDiceLoss:
      return make_bias_report(macro_f1_aggregate(set, agg), 1.0 - dice_loss(set, avg));
    default:
      throw DomainError("metric '" + std::string(to_string(config.metric)) +
                        "' does not apply to multiclass sets");
  }
}

BiasReport evaluate_ner(const MetricConfig& config, const TaggedSentenceBatch& batch) {
  const SmoothingGamma avg(config.gamma_avg);
  const double aggregate =
      macro_f1_aggregate(batch.real_token_decisions(), SmoothingGamma(config.gamma_agg));
  switch (config.metric) {
    case MetricId::kNerDiceSentence:
      return make_bias_report(aggregate, ner_dice_sentence(batch, avg, config.padding));
    case MetricId::kNerDiceToken:
      return make_bias_report(aggregate, ner_dice_token(batch, avg, config.padding));
    default:
      throw DomainError("metric '" + std::string(to_string(config.metric)) +
                        "' does not apply to NER batches");
  }
}

BiasReport evaluate_bleu(const MetricConfig& config, const BleuCorpus& corpus) {
  return make_bias_report(f_bleu(corpus), bleu_average(corpus, config.smoothing));
}

BiasReport evaluate_file(const MetricConfig& config, const std::filesystem::path& path,
                         const std::filesystem::path& reference_path) {
  switch (config.metric) {
    case MetricId::kAccuracy:
    case MetricId::kPrecision:
    case MetricId::kRecall:
    case MetricId::kDsc:
      return evaluate_binary(config, read_binary_labels(path.string()));
    case MetricId::kMacroF1:
    case MetricId::kDiceLoss:
      return evaluate_multiclass(config, read_multiclass(path.string(), config.classes));
    case MetricId::kNerDiceSentence:
    case MetricId::kNerDiceToken:
      return evaluate_ner(config, read_ner_batch(path.string()));
    case MetricId::kBleu:
      if (reference_path.empty()) throw DomainError("bleu needs a reference file");
      return evaluate_bleu(config, read_bleu_corpus(path.string(), reference_path.string()));
  }
  throw DomainError("unknown metric");
}

MetricSeries parse_trajectory(std::istream& in, std::string_view source,
                              const std::filesystem::path& base_dir,
                              const MetricConfig& config) {
  enum class Kind { kUnknown, kPrecomputed, kSnapshot };
  Kind kind = Kind::kUnknown;
  MetricSeries series;
  std::string raw;
  std::size_t line = 0;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  while (std::getline(in, raw)) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(raw);
    } catch (const json::parse_error& e) {
      fail(source, line, std::string("malformed JSON record: ") + e.what());
    }
    if (!record.is_object() || !record.contains("step") || !record["step"].is_number_integer()) {
      fail(source, line, "record needs an integer 'step'");
    }
    SeriesPoint point;
    point.step = record["step"].get<std::int64_t>();
    if (point.step < 0) fail(source, line, "step must be nonnegative");
    if (!series.empty() && point.step <= series.back().step) {
      fail(source, line, "steps must strictly increase");
    }

    const bool has_values = record.contains("F") || record.contains("Fbar");
    const bool has_snapshot = record.contains("snapshot");
    if (has_values == has_snapshot) {
      fail(source, line, "record needs either {F, Fbar} or snapshot");
    }
    const Kind this_kind = has_values ? Kind::kPrecomputed : Kind::kSnapshot;
    if (kind != Kind::kUnknown && kind != this_kind) {
      fail(source, line, "payload kind differs from earlier records");
    }
    kind = this_kind;

    if (this_kind == Kind::kPrecomputed) {
      if (!record.contains("F") || !record.contains("Fbar") || !record["F"].is_number() ||
          !record["Fbar"].is_number()) {
        fail(source, line, "precomputed record needs numeric F and Fbar");
      }
      const auto r = make_bias_report(record["F"].get<double>(), record["Fbar"].get<double>());
      point.f = r.aggregate;
      point.fbar = r.averaged;
      point.epsilon = r.epsilon;
    } else {
      const auto& snap = record["snapshot"];
      std::filesystem::path primary;
      std::filesystem::path reference;
      if (config.metric == MetricId::kBleu) {
        if (!snap.is_object() || !snap.contains("hyp") || !snap.contains("ref") ||
            !snap["hyp"].is_string() || !snap["ref"].is_string()) {
          fail(source, line, "BLEU snapshot needs {\"hyp\": path, \"ref\": path}");
        }
        primary = resolve(snap["hyp"].get<std::string>());
        reference = resolve(snap["ref"].get<std::string>());
      } else {
        if (!snap.is_string()) fail(source, line, "snapshot must be a path string");
        primary = resolve(snap.get<std::string>());
      }
      BiasReport r;
      try {
        r = evaluate_file(config, primary, reference);
      } catch (const std::exception& e) {
        fail(source, line, std::string("snapshot: ") + e.what());
      }
      point.f = r.aggregate;
      point.fbar = r.averaged;
      point.epsilon = r.epsilon;
    }
    series.push_back(point);
  }
  if (series.empty()) throw ParseError(std::string(source) + ": empty trajectory");
  return series;
}

MetricSeries ingest(const std::filesystem::path& path, const MetricConfig& config) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory '" + path.string() + "'");
  return parse_trajectory(in, path.string(), path.parent_path(), config);
}

bool is_reversal(double delta_f, double delta_fbar, bool strict) {
  if (!strict) return delta_f * delta_fbar <= 0.0;
  const bool f_zero = delta_f == 0.0;
  const bool fbar_zero = delta_fbar == 0.0;
  if (f_zero || fbar_zero) return f_zero != fbar_zero;
  return (delta_f < 0.0) != (delta_fbar < 0.0);
}

ReversalReport reversal_pairs(const MetricSeries& series, const ReversalOptions& options) {
  check_series(series);
  const auto kept = kept_transitions(series, options);
  ReversalReport report;
  report.strict = options.strict;
  for (std::size_t t = 1; t < series.size(); ++t) {
    if (!kept[t - 1]) {
      ++report.trimmed;
      continue;
    }
    ++report.transitions;
    if (is_reversal(series[t].f - series[t - 1].f, series[t].fbar - series[t - 1].fbar,
                    options.strict)) {
      report.steps.push_back(series[t].step);
    }
  }
  report.count = report.steps.size();
  report.ratio = report.transitions == 0
                     ? 0.0
                     : static_cast<double>(report.count) / static_cast<double>(report.transitions);
  return report;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

CorrelationReport bias_quality_correlation(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DomainError("correlation needs at least 3 points");
  std::vector<double> eps;
  std::vector<double> quality;
  for (const auto& [e, q] : points) {
    if (!std::isfinite(e) || !std::isfinite(q)) {
      throw DomainError("correlation points must be finite");
    }
    eps.push_back(e);
    quality.push_back(q);
  }
  CorrelationReport report;
  report.count = points.size();
  bool degenerate = false;
  const double r = pearson_of(eps, quality, &degenerate);
  if (degenerate) {
    report.diagnostic = "zero variance in epsilon or quality; correlation undefined";
    return report;
  }
  report.pearson = r;
  bool rank_degenerate = false;
  const double rho = pearson_of(average_ranks(eps), average_ranks(quality), &rank_degenerate);
  if (!rank_degenerate) report.spearman = rho;
  return report;
}

std::vector<FlipSegment> parse_schedule(std::string_view text) {
  std::vector<FlipSegment> schedule;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    std::istringstream fields(item);
    FlipSegment seg;
    char c1 = 0;
    char c2 = 0;
    if (!(fields >> seg.from_step >> c1 >> seg.fix_probability >> c2 >>
          seg.break_probability) ||
        c1 != ':' || c2 != ':' || !(fields >> std::ws).eof()) {
      throw DomainError("schedule segment '" + item + "' is not from:p:q");
    }
    schedule.push_back(seg);
  }
  return schedule;
}

std::vector<BinaryPredictionSet> simulate_snapshots(const SimulationConfig& config) {
  if (config.n == 0) throw DomainError("simulation: n must be positive");
  if (config.schedule.empty() || config.schedule.front().from_step != 0) {
    throw DomainError("simulation: schedule must start at step 0");
  }
  for (std::size_t i = 0; i < config.schedule.size(); ++i) {
    const auto& s = config.schedule[i];
    if (!(s.fix_probability >= 0.0 && s.fix_probability <= 1.0) ||
        !(s.break_probability >= 0.0 && s.break_probability <= 1.0)) {
      throw DomainError("simulation: flip probabilities must lie in [0, 1]");
    }
    if (i > 0 && s.from_step <= config.schedule[i - 1].from_step) {
      throw DomainError("simulation: schedule steps must strictly increase");
    }
  }

  std::mt19937_64 engine(config.seed);
  std::vector<std::uint8_t> y(config.n);
  std::vector<std::uint8_t> yhat(config.n);
  for (auto& v : y) v = uniform01(engine) < 0.5;
  for (auto& v : yhat) v = uniform01(engine) < 0.5;

  std::vector<BinaryPredictionSet> snapshots;
  snapshots.reserve(config.steps + 1);
  snapshots.emplace_back(y, yhat);
  std::size_t segment = 0;
  for (std::size_t t = 1; t <= config.steps; ++t) {
    while (segment + 1 < config.schedule.size() &&
           config.schedule[segment + 1].from_step <= static_cast<std::int64_t>(t)) {
      ++segment;
    }
    const auto& rates = config.schedule[segment];
    for (std::size_t i = 0; i < config.n; ++i) {
      const double u = uniform01(engine);
      const bool wrong = yhat[i] != y[i];
      if (wrong ? u < rates.fix_probability : u < rates.break_probability) yhat[i] ^= 1;
    }
    snapshots.emplace_back(y, yhat);
  }
  return snapshots;
}

MetricSeries simulate_trajectory(const SimulationConfig& config,
                                 const std::filesystem::path& out_dir) {
  if (!is_binary_metric(config.metric.metric)) {
    throw DomainError("simulation emits binary snapshots; use a binary metric");
  }
  const auto snapshots = simulate_snapshots(config);

  std::filesystem::create_directories(out_dir);
  if (!config.precomputed) std::filesystem::create_directories(out_dir / "snapshots");
  std::ofstream traj(out_dir / "trajectory.jsonl", std::ios::binary);
  if (!traj) throw ParseError("cannot write trajectory under '" + out_dir.string() + "'");

  MetricSeries series;
  for (std::size_t t = 0; t < snapshots.size(); ++t) {
    const auto r = evaluate_binary(config.metric, snapshots[t]);
    series.push_back({static_cast<std::int64_t>(t), r.aggregate, r.averaged, r.epsilon});
    if (config.precomputed) {
      traj << "{\"step\":" << t << ",\"F\":" << format_real(r.aggregate)
           << ",\"Fbar\":" << format_real(r.averaged) << "}\n";
    } else {
      const auto name = snapshot_name(t);
      std::ofstream snap(out_dir / name, std::ios::binary);
      if (!snap) throw ParseError("cannot write snapshot '" + name + "'");
      snap << "# simulated snapshot, step " << t << "\n";
      write_binary_labels(snap, snapshots[t]);
      traj << "{\"step\":" << t << ",\"snapshot\":\"" << name << "\"}\n";
    }
  }
  return series;
}

void write_analysis_csv(std::ostream& out, const MetricSeries& series,
                        const ReversalOptions& options) {
  out << "t,F,Fbar,epsilon,dF,dFbar,reversal\n";
  if (series.empty()) return;
  const auto kept = series.size() >= 2 ? kept_transitions(series, options) : std::vector<bool>{};
  for (std::size_t t = 0; t < series.size(); ++t) {
    const auto& p = series[t];
    out << p.step << ',' << format_real(p.f) << ',' << format_real(p.fbar) << ','
        << format_real(p.epsilon);
    if (t == 0) {
      out << ",,,\n";
      continue;
    }
    const double df = p.f - series[t - 1].f;
    const double dfbar = p.fbar - series[t - 1].fbar;
    out << ',' << format_real(df) << ',' << format_real(dfbar) << ',';
    if (!kept[t - 1]) {
      out << "trimmed\n";
    } else {
      out << (is_reversal(df, dfbar, options.strict) ? 1 : 0) << '\n';
    }
  }
}

}  // namespace simpson
