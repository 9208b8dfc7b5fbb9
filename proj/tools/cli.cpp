#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "simpson/binary.hpp"
#include "simpson/bleu.hpp"
#include "simpson/error.hpp"
#include "simpson/gamma.hpp"
#include "simpson/io.hpp"
#include "simpson/metric_id.hpp"
#include "simpson/oracle.hpp"
#include "simpson/trajectory.hpp"

namespace simpson::cli {
namespace {

// Options shared by the metric-evaluating subcommands.
struct MetricFlags {
  std::string metric = "dsc";
  double gamma_agg = 0.0;
  double gamma_avg = 1.0;
  bool mask_padding = false;
  std::string smoothing = "add-one";
  std::size_t classes = 0;

  void attach(CLI::App& app, bool with_metric = true) {
    if (with_metric) {
      app.add_option("--metric", metric,
                     "accuracy|precision|recall|dsc|macro-f1|dice-loss|ner-dice-sentence|"
                     "ner-dice-token|bleu")
          ->capture_default_str();
    }
    app.add_option("--gamma-agg", gamma_agg, "smoothing on the aggregate side")
        ->capture_default_str();
    app.add_option("--gamma-avg", gamma_avg, "smoothing on the averaged side")
        ->capture_default_str();
    app.add_flag("--mask-padding", mask_padding, "drop padding tokens from NER dice sums");
    app.add_option("--smoothing", smoothing, "sentence BLEU smoothing: none|floor|add-one")
        ->capture_default_str();
    app.add_option("--classes", classes, "number of classes for multiclass files (0 = infer)");
  }

  MetricConfig config() const {
    MetricConfig c;
    c.metric = parse_metric_id(metric);
    c.gamma_agg = gamma_agg;
    c.gamma_avg = gamma_avg;
    c.padding = mask_padding ? PaddingPolicy::kMask : PaddingPolicy::kInclude;
    c.smoothing = parse_smoothing(smoothing);
    if (classes > 0) c.classes = classes;
    return c;
  }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + path + "'");
  return f;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("malformed gamma grid entry '" + item + "'");
    }
  }
  if (grid.empty()) throw DomainError("empty gamma grid");
  return grid;
}

int cmd_metrics(const MetricFlags& flags, const std::string& input, const std::string& reference,
                const std::string& out_path, std::ostream& out) {
  const auto config = flags.config();
  const auto report = evaluate_file(config, input, reference);
  out << "metric=" << to_string(config.metric) << " gamma_agg=" << format_real(config.gamma_agg)
      << " gamma_avg=" << format_real(config.gamma_avg) << '\n';
  out << "F=" << format_real(report.aggregate) << '\n';
  out << "Fbar=" << format_real(report.averaged) << '\n';
  out << "epsilon=" << format_real(report.epsilon) << '\n';
  if (!out_path.empty()) {
    auto f = open_output(out_path);
    f << "metric,gamma_agg,gamma_avg,F,Fbar,epsilon\n"
      << to_string(config.metric) << ',' << format_real(config.gamma_agg) << ','
      << format_real(config.gamma_avg) << ',' << format_real(report.aggregate) << ','
      << format_real(report.averaged) << ',' << format_real(report.epsilon) << '\n';
  }
  return 0;
}

int cmd_gamma(const std::string& input, double free_gamma, const std::string& out_path,
              std::ostream& out) {
  const auto set = read_binary_labels(input);
  std::ostringstream csv;
  write_identity_csv_header(csv);

  for (const auto& solution :
       {gamma_t1(set), gamma_precision_star(set), gamma_recall_star(set)}) {
    out << to_string(solution.theorem) << ": gamma=" << format_real(solution.gamma)
        << (solution.applicable ? " applicable" : " not applicable");
    if (!solution.reason.empty()) out << " (" << solution.reason << ')';
    out << '\n';
  }
  for (auto id : {IdentityId::kT1, IdentityId::kT2Precision, IdentityId::kT2Recall}) {
    const auto solution = solution_for(set, id);
    if (!solution.applicable) continue;
    const auto r = verify_identity(set, id, SmoothingGamma(solution.gamma));
    write_identity_csv_row(csv, id, set, solution.gamma, r);
  }
  for (auto id : {IdentityId::kLemma1, IdentityId::kT3}) {
    const auto r = verify_identity(set, id, SmoothingGamma(free_gamma));
    write_identity_csv_row(csv, id, set, free_gamma, r);
  }
  write_identity_csv_row(csv, IdentityId::kAccuracy, set, 0.0,
                         verify_identity(set, IdentityId::kAccuracy, SmoothingGamma(0.0)));
  out << csv.str();
  if (!out_path.empty()) open_output(out_path) << csv.str();
  return 0;
}

int cmd_verify(const std::string& identity, std::size_t n_max, const std::string& grid_text,
               const std::string& out_path, std::ostream& out) {
  const auto grid = parse_grid(grid_text);
  std::vector<IdentityId> ids;
  bool monotone = false;
  if (identity == "all") {
    ids = {IdentityId::kAccuracy, IdentityId::kT1,     IdentityId::kT2Precision,
           IdentityId::kT2Recall, IdentityId::kLemma1, IdentityId::kT3};
    monotone = true;
  } else if (identity == "monotone") {
    monotone = true;
  } else {
    ids = {parse_identity_id(identity)};
  }

  bool clean = true;
  std::vector<Violation> all_violations;
  for (auto id : ids) {
    const auto summary = exhaustive_verify(id, n_max, grid);
    out << to_string(id) << ": " << summary.violations.size() << " violations / "
        << summary.checked << " applicable configurations (" << summary.inapplicable
        << " inapplicable), n <= " << n_max << '\n';
    clean = clean && summary.clean();
    all_violations.insert(all_violations.end(), summary.violations.begin(),
                          summary.violations.end());
  }
  if (monotone) {
    const std::size_t n_top = std::min<std::size_t>(n_max, 5);
    for (double g : grid) {
      if (!(g > -1.0) || g == 0.0) continue;
      bool ok = true;
      for (std::size_t n = 1; n <= n_top; ++n) ok = ok && accuracy_monotone_check(n, SmoothingGamma(g));
      out << "accuracy-monotone(gamma=" << format_real(g) << ", n <= " << n_top
          << "): " << (ok ? "true" : "false") << '\n';
      clean = clean && ok;
    }
  }
  if (!out_path.empty()) {
    auto f = open_output(out_path);
    write_violations_csv(f, all_violations);
  }
  return clean ? 0 : 1;
}

int cmd_bleu(const std::string& hyp, const std::string& ref, const std::string& smoothing_name,
             const std::string& stats_out, bool per_sentence, std::ostream& out,
             std::ostream& err) {
  const auto corpus = read_bleu_corpus(hyp, ref);
  const auto smoothing = parse_smoothing(smoothing_name);
  if (!stats_out.empty()) {
    auto f = open_output(stats_out);
    write_stats_csv(f, corpus);
  }
  const auto score = corpus_bleu(corpus);
  out << "sentences=" << corpus.size() << '\n';
  out << "BLEU=" << format_real(score.value);
  if (score.degenerate) out << " (" << score.diagnostic << ')';
  out << '\n';
  if (per_sentence) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto s = sentence_bleu(corpus.stats()[i], smoothing);
      out << "sentence " << i << " BLEU=" << format_real(s.value);
      if (s.degenerate) out << " (" << s.diagnostic << ')';
      out << '\n';
    }
  }
  int status = 0;
  std::optional<double> aggregate;
  std::optional<double> averaged;
  try {
    aggregate = f_bleu(corpus);
    out << "F_BLEU=" << format_real(*aggregate) << '\n';
  } catch (const DomainError& e) {
    out << "F_BLEU=undefined\n";
    err << "error: " << e.what() << '\n';
    status = 1;
  }
  try {
    averaged = bleu_average(corpus, smoothing);
    out << "Fbar_BLEU=" << format_real(*averaged) << '\n';
  } catch (const DomainError& e) {
    out << "Fbar_BLEU=undefined\n";
    err << "error: " << e.what() << '\n';
    status = 1;
  }
  if (aggregate && averaged) {
    out << "epsilon=" << format_real(make_bias_report(*aggregate, *averaged).epsilon) << '\n';
  }
  return status;
}

int cmd_analyze(const MetricFlags& flags, const std::string& trajectory, bool strict,
                std::optional<double> trim, const std::string& quality,
                const std::string& out_path, std::ostream& out) {
  const auto series = ingest(trajectory, flags.config());
  ReversalOptions options;
  options.strict = strict;
  options.trim_percentile = trim;
  const auto report = reversal_pairs(series, options);
  out << "steps=" << series.size() << " transitions=" << report.transitions
      << " trimmed=" << report.trimmed << " reversals=" << report.count
      << " ratio=" << format_real(report.ratio)
      << " predicate=" << (strict ? "strict" : "default") << '\n';
  if (quality != "none") {
    if (quality != "F" && quality != "Fbar") throw DomainError("--quality must be F, Fbar or none");
    if (series.size() >= 3) {
      std::vector<std::pair<double, double>> points;
      for (const auto& p : series) points.emplace_back(p.epsilon, quality == "F" ? p.f : p.fbar);
      const auto corr = bias_quality_correlation(points);
      out << "correlation(epsilon," << quality << "): pearson="
          << (corr.pearson ? format_real(*corr.pearson) : "undefined")
          << " spearman=" << (corr.spearman ? format_real(*corr.spearman) : "undefined")
          << " n=" << corr.count;
      if (!corr.diagnostic.empty()) out << " (" << corr.diagnostic << ')';
      out << '\n';
    }
  }
  if (!out_path.empty()) {
    auto f = open_output(out_path);
    write_analysis_csv(f, series, options);
  }
  return 0;
}

int cmd_correlate(const std::string& path, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::vector<std::pair<double, double>> points;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(number) + ": expected epsilon,quality");
    }
    try {
      points.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      if (number == 1) continue;  // header
      throw ParseError(path + ":" + std::to_string(number) + ": malformed number");
    }
  }
  const auto corr = bias_quality_correlation(points);
  out << "pearson=" << (corr.pearson ? format_real(*corr.pearson) : "undefined")
      << " spearman=" << (corr.spearman ? format_real(*corr.spearman) : "undefined")
      << " n=" << corr.count;
  if (!corr.diagnostic.empty()) out << " (" << corr.diagnostic << ')';
  out << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Aggregate vs. averaged metric analysis (Simpson's bias)", "simpson-scope"};
  app.require_subcommand(1);

  // metrics
  MetricFlags metric_flags;
  std::string metrics_input;
  std::string metrics_reference;
  std::string metrics_out;
  auto* metrics = app.add_subcommand("metrics", "F, F-bar and epsilon for one input file");
  metric_flags.attach(*metrics);
  metrics->add_option("input", metrics_input, "label file (hypotheses file for bleu)")
      ->required();
  metrics->add_option("reference", metrics_reference, "references file (bleu only)");
  metrics->add_option("--out", metrics_out, "also write a one-row CSV report");

  // gamma
  std::string gamma_input;
  std::string gamma_out;
  double gamma_free = 1.0;
  auto* gamma = app.add_subcommand("gamma", "bias-eliminating gammas and identity checks");
  gamma->add_option("input", gamma_input, "binary label file")->required();
  gamma->add_option("--gamma", gamma_free, "gamma for the closed-form identities")
      ->capture_default_str();
  gamma->add_option("--out", gamma_out, "write identity rows as CSV");

  // verify
  std::string verify_identity_name = "all";
  std::size_t verify_n_max = 5;
  std::string verify_grid = "1,0.5,2,-0.25";
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "exhaustive identity sweep over small sets");
  verify->add_option("--identity", verify_identity_name,
                     "T1|T2|T2-recall|lemma1|T3|accuracy|monotone|all")
      ->capture_default_str();
  verify->add_option("--n-max", verify_n_max, "largest n enumerated (<= 6)")
      ->capture_default_str();
  verify->add_option("--gamma-grid", verify_grid, "comma-separated gammas")
      ->capture_default_str();
  verify->add_option("--out", verify_out, "write violations as CSV");

  // bleu
  std::string bleu_hyp;
  std::string bleu_ref;
  std::string bleu_smoothing = "add-one";
  std::string bleu_stats;
  bool bleu_sentences = false;
  auto* bleu = app.add_subcommand("bleu", "corpus BLEU, log form and sentence average");
  bleu->add_option("hypotheses", bleu_hyp)->required();
  bleu->add_option("references", bleu_ref)->required();
  bleu->add_option("--smoothing", bleu_smoothing, "none|floor|add-one")->capture_default_str();
  bleu->add_option("--stats-out", bleu_stats, "write per-sentence counts as CSV");
  bleu->add_flag("--sentences", bleu_sentences, "print sentence-level BLEU");

  // analyze
  MetricFlags analyze_flags;
  std::string analyze_input;
  bool analyze_strict = false;
  std::optional<double> analyze_trim;
  std::string analyze_quality = "F";
  std::string analyze_out;
  auto* analyze = app.add_subcommand("analyze", "reversal pairs over a trajectory");
  analyze_flags.attach(*analyze);
  analyze->add_option("trajectory", analyze_input)->required();
  analyze->add_flag("--strict", analyze_strict, "strict reversal predicate");
  analyze->add_option("--trim-percentile", analyze_trim,
                      "drop transitions above this percentile of |delta|");
  analyze->add_option("--quality", analyze_quality, "correlate epsilon with F, Fbar or none")
      ->capture_default_str();
  analyze->add_option("--out", analyze_out, "write per-step CSV");

  // simulate
  SimulationConfig sim;
  MetricFlags sim_flags;
  double sim_p = 0.3;
  double sim_q = 0.1;
  std::string sim_schedule;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "write a seeded synthetic trajectory");
  sim_flags.attach(*simulate);
  simulate->add_option("--n", sim.n, "samples per snapshot")->capture_default_str();
  simulate->add_option("--steps", sim.steps, "number of transitions")->capture_default_str();
  simulate->add_option("--p", sim_p, "wrong -> correct flip probability")->capture_default_str();
  simulate->add_option("--q", sim_q, "correct -> wrong flip probability")->capture_default_str();
  simulate->add_option("--schedule", sim_schedule, "from:p:q,... (overrides --p/--q)");
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_flag("--precomputed", sim.precomputed, "write F/Fbar rows instead of snapshots");
  simulate->add_option("--out", sim_out, "output directory")->required();

  // reversal-find
  std::string find_metric = "precision";
  ReversalSearchBounds bounds;
  std::string find_out;
  std::string find_check;
  auto* find = app.add_subcommand("reversal-find", "search for a Simpson reversal witness");
  find->add_option("--metric", find_metric, "precision|recall")->capture_default_str();
  find->add_option("--max-count", bounds.max_count, "bound on each count per group")
      ->capture_default_str();
  find->add_option("--groups", bounds.groups, "number of groups (1 or 2)")->capture_default_str();
  find->add_option("--out", find_out, "write the witness file");
  find->add_option("--check", find_check, "verify an existing witness file instead");

  // census
  std::size_t census_n = 2;
  MetricFlags census_flags;
  CensusOptions census_options;
  std::string census_out;
  auto* census = app.add_subcommand("census", "reversal frequency over prediction pairs");
  census_flags.attach(*census);
  census->add_option("--n", census_n)->capture_default_str();
  census->add_option("--seed", census_options.seed)->capture_default_str();
  census->add_option("--samples", census_options.samples, "samples when n > 4")
      ->capture_default_str();
  census->add_option("--out", census_out, "write CSV report");

  // correlate
  std::string correlate_input;
  auto* correlate = app.add_subcommand("correlate", "Pearson/Spearman over epsilon,quality CSV");
  correlate->add_option("points", correlate_input)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (metrics->parsed()) {
      return cmd_metrics(metric_flags, metrics_input, metrics_reference, metrics_out, out);
    }
    if (gamma->parsed()) return cmd_gamma(gamma_input, gamma_free, gamma_out, out);
    if (verify->parsed()) {
      return cmd_verify(verify_identity_name, verify_n_max, verify_grid, verify_out, out);
    }
    if (bleu->parsed()) {
      return cmd_bleu(bleu_hyp, bleu_ref, bleu_smoothing, bleu_stats, bleu_sentences, out, err);
    }
    if (analyze->parsed()) {
      return cmd_analyze(analyze_flags, analyze_input, analyze_strict, analyze_trim,
                         analyze_quality, analyze_out, out);
    }
    if (simulate->parsed()) {
      sim.metric = sim_flags.config();
      sim.schedule = sim_schedule.empty() ? std::vector<FlipSegment>{{0, sim_p, sim_q}}
                                          : parse_schedule(sim_schedule);
      const auto series = simulate_trajectory(sim, sim_out);
      out << "wrote " << series.size() << " steps to " << sim_out << "/trajectory.jsonl\n";
      return 0;
    }
    if (find->parsed()) {
      if (!find_check.empty()) {
        std::ifstream in(find_check);
        if (!in) throw ParseError("cannot open '" + find_check + "'");
        MetricId metric = MetricId::kPrecision;
        const auto cmp = parse_witness(in, &metric);
        const bool ok = is_simpson_reversal(cmp, metric);
        out << "witness " << (ok ? "accepted" : "rejected") << '\n';
        return ok ? 0 : 1;
      }
      const auto metric = parse_metric_id(find_metric);
      const auto witness = find_simpson_reversal(metric, bounds);
      if (!witness) {
        out << "no reversal within bounds\n";
        return 0;
      }
      write_witness(out, metric, *witness);
      if (!find_out.empty()) {
        auto f = open_output(find_out);
        write_witness(f, metric, *witness);
      }
      return 0;
    }
    if (census->parsed()) {
      const auto c = census_flags.config();
      const auto report = reversal_census(census_n, c.metric, SmoothingGamma(c.gamma_agg),
                                          SmoothingGamma(c.gamma_avg), census_options);
      // the census predicate is this tool's own formalization of a reversal
      out << "census predicate: dF*dFbar <= 0 over ordered prediction pairs on a shared y\n";
      write_census_csv(out, report);
      if (!census_out.empty()) {
        auto f = open_output(census_out);
        write_census_csv(f, report);
      }
      return 0;
    }
    if (correlate->parsed()) return cmd_correlate(correlate_input, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("simpson-scope");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace simpson::cli
