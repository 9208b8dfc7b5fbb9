#include "simpson/bleu.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "simpson/error.hpp"

namespace simpson {
namespace {

constexpr double kOrderWeight = 1.0 / kMaxNgramOrder;

std::string first_zero_order(const SentenceStats& s) {
  for (int k = 0; k < kMaxNgramOrder; ++k) {
    if (s.l[k] == 0) return "no " + std::to_string(k + 1) + "-grams in hypothesis";
    if (s.h[k] == 0) return "no matched " + std::to_string(k + 1) + "-grams";
  }
  return {};
}

}  // namespace

TokenSeq tokenize(std::string_view line) {
  TokenSeq out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

NgramCounts ngram_multiset(const TokenSeq& seq, int k) {
  if (k < 1 || k > kMaxNgramOrder) throw DomainError("n-gram order must be in 1..4");
  NgramCounts counts;
  const auto order = static_cast<std::size_t>(k);
  for (std::size_t i = 0; i + order <= seq.size(); ++i) {
    ++counts[std::vector<std::string>(seq.begin() + i, seq.begin() + i + order)];
  }
  return counts;
}

SentenceStats& SentenceStats::operator+=(const SentenceStats& other) {
  for (int k = 0; k < kMaxNgramOrder; ++k) {
    h[k] += other.h[k];
    l[k] += other.l[k];
  }
  m1 += other.m1;
  return *this;
}

SentenceStats sentence_stats(const TokenSeq& hyp, const TokenSeq& ref) {
  SentenceStats s;
  s.m1 = static_cast<std::int64_t>(ref.size());
  for (int k = 1; k <= kMaxNgramOrder; ++k) {
    const auto hyp_counts = ngram_multiset(hyp, k);
    const auto ref_counts = ngram_multiset(ref, k);
    std::int64_t matched = 0;
    for (const auto& [gram, count] : hyp_counts) {
      if (auto it = ref_counts.find(gram); it != ref_counts.end()) {
        matched += std::min(count, it->second);
      }
    }
    s.h[k - 1] = matched;
    s.l[k - 1] = std::max<std::int64_t>(0, static_cast<std::int64_t>(hyp.size()) - k + 1);
  }
  return s;
}

BleuCorpus::BleuCorpus(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw DomainError("BLEU corpus: at least one sentence pair required");
  stats_.reserve(pairs_.size());
  for (const auto& p : pairs_) {
    stats_.push_back(sentence_stats(p.hypothesis, p.reference));
    totals_ += stats_.back();
  }
}

BleuScore bleu_from_stats(const SentenceStats& stats) {
  if (auto reason = first_zero_order(stats); !reason.empty()) {
    return BleuScore{0.0, true, reason};
  }
  double log_precision = 0.0;
  for (int k = 0; k < kMaxNgramOrder; ++k) {
    log_precision += kOrderWeight * std::log(static_cast<double>(stats.h[k]) /
                                             static_cast<double>(stats.l[k]));
  }
  const double length_ratio =
      static_cast<double>(stats.m1) / static_cast<double>(stats.l[0]);
  const double penalty = std::min(std::exp(1.0 - length_ratio), 1.0);
  return BleuScore{std::exp(log_precision) * penalty, false, {}};
}

BleuScore corpus_bleu(const BleuCorpus& corpus) { return bleu_from_stats(corpus.totals()); }

double f_bleu_from_stats(const SentenceStats& stats) {
  if (auto reason = first_zero_order(stats); !reason.empty()) {
    throw DomainError("log-form BLEU undefined: " + reason);
  }
  double value = 0.0;
  for (int k = 0; k < kMaxNgramOrder; ++k) {
    value += kOrderWeight *
             std::log(static_cast<double>(stats.h[k]) / static_cast<double>(stats.l[k]));
  }
  return value - std::max(static_cast<double>(stats.m1) / static_cast<double>(stats.l[0]), 1.0);
}

double f_bleu(const BleuCorpus& corpus) { return f_bleu_from_stats(corpus.totals()); }

SmoothingPolicy parse_smoothing(std::string_view name) {
  if (name == "none") return {SmoothingKind::kNone};
  if (name == "floor") return {SmoothingKind::kFloor};
  if (name == "add-one") return {SmoothingKind::kAddOne};
  throw DomainError("unknown smoothing policy '" + std::string(name) + "'");
}

SmoothedCounts apply_smoothing(const SentenceStats& stats, const SmoothingPolicy& policy) {
  SmoothedCounts c;
  c.m1 = static_cast<double>(stats.m1);
  for (int k = 0; k < kMaxNgramOrder; ++k) {
    double h = static_cast<double>(stats.h[k]);
    double l = static_cast<double>(stats.l[k]);
    switch (policy.kind) {
      case SmoothingKind::kNone:
        break;
      case SmoothingKind::kFloor:
        if (h == 0.0) h = policy.floor_epsilon;
        if (l == 0.0) l = policy.floor_epsilon;
        break;
      case SmoothingKind::kAddOne:
        if (k >= 1 && h == 0.0) {
          h += 1.0;
          l += 1.0;
        }
        break;
    }
    c.h[k] = h;
    c.l[k] = l;
  }
  return c;
}

namespace {

// Empty string when every order is defined after smoothing.
std::string smoothed_defect(const SmoothedCounts& c) {
  for (int k = 0; k < kMaxNgramOrder; ++k) {
    if (c.l[k] == 0.0) return "no " + std::to_string(k + 1) + "-grams in hypothesis";
    if (c.h[k] == 0.0) return "no matched " + std::to_string(k + 1) + "-grams";
  }
  return {};
}

double smoothed_log_form(const SmoothedCounts& c) {
  double value = 0.0;
  for (int k = 0; k < kMaxNgramOrder; ++k) value += kOrderWeight * std::log(c.h[k] / c.l[k]);
  return value - std::max(c.m1 / c.l[0], 1.0);
}

}  // namespace

BleuScore sentence_bleu(const SentenceStats& stats, const SmoothingPolicy& policy) {
  const auto c = apply_smoothing(stats, policy);
  if (auto reason = smoothed_defect(c); !reason.empty()) return BleuScore{0.0, true, reason};
  return BleuScore{std::exp(smoothed_log_form(c) + 1.0), false, {}};
}

BleuScore sentence_bleu(const TokenSeq& hyp, const TokenSeq& ref,
                        const SmoothingPolicy& policy) {
  return sentence_bleu(sentence_stats(hyp, ref), policy);
}

double sentence_f_bleu(const SentenceStats& stats, const SmoothingPolicy& policy) {
  const auto c = apply_smoothing(stats, policy);
  if (auto reason = smoothed_defect(c); !reason.empty()) {
    throw DomainError("sentence log-form BLEU undefined: " + reason);
  }
  return smoothed_log_form(c);
}

double bleu_average(const BleuCorpus& corpus, const SmoothingPolicy& policy) {
  double total = 0.0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    try {
      total += sentence_f_bleu(corpus.stats()[i], policy);
    } catch (const DomainError& e) {
      throw DomainError("sentence " + std::to_string(i) + ": " + e.what());
    }
  }
  return total / static_cast<double>(corpus.size());
}

BleuCorpus parse_bleu_corpus(std::istream& hyps, std::istream& refs) {
  std::vector<BleuCorpus::Pair> pairs;
  std::string hyp_line;
  std::string ref_line;
  std::size_t line = 0;
  while (true) {
    const bool got_hyp = static_cast<bool>(std::getline(hyps, hyp_line));
    const bool got_ref = static_cast<bool>(std::getline(refs, ref_line));
    if (!got_hyp && !got_ref) break;
    ++line;
    if (got_hyp != got_ref) {
      throw ParseError("BLEU corpus: hypothesis and reference files differ in length at line " +
                       std::to_string(line));
    }
    pairs.push_back({tokenize(hyp_line), tokenize(ref_line)});
  }
  if (pairs.empty()) throw ParseError("BLEU corpus: input files are empty");
  return BleuCorpus(std::move(pairs));
}

BleuCorpus read_bleu_corpus(const std::string& hyp_path, const std::string& ref_path) {
  std::ifstream hyps(hyp_path);
  if (!hyps) throw ParseError("cannot open hypothesis file '" + hyp_path + "'");
  std::ifstream refs(ref_path);
  if (!refs) throw ParseError("cannot open reference file '" + ref_path + "'");
  return parse_bleu_corpus(hyps, refs);
}

void write_stats_csv(std::ostream& out, const BleuCorpus& corpus) {
  out << "sentence_id,H1,H2,H3,H4,L1,L2,L3,L4,M1\n";
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& s = corpus.stats()[i];
    out << i;
    for (auto v : s.h) out << ',' << v;
    for (auto v : s.l) out << ',' << v;
    out << ',' << s.m1 << '\n';
  }
}

}  // namespace simpson
