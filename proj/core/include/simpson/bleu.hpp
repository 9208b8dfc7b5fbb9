#pragma once

// Corpus BLEU, its log form, and the sentence-averaged log form.
// Single reference per hypothesis, n-gram orders 1..4, clipped matching.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace simpson {

inline constexpr int kMaxNgramOrder = 4;

using TokenSeq = std::vector<std::string>;

// Whitespace split; case preserved; empty input gives an empty sequence.
TokenSeq tokenize(std::string_view line);

using NgramCounts = std::map<std::vector<std::string>, std::int64_t>;

// Contiguous k-windows with multiplicity; k outside 1..4 is a DomainError.
NgramCounts ngram_multiset(const TokenSeq& seq, int k);

struct SentenceStats {
  std::array<std::int64_t, kMaxNgramOrder> h{};  // clipped matches per order
  std::array<std::int64_t, kMaxNgramOrder> l{};  // hypothesis n-grams per order
  std::int64_t m1 = 0;                           // reference length

  SentenceStats& operator+=(const SentenceStats& other);
  friend bool operator==(const SentenceStats&, const SentenceStats&) = default;
};

SentenceStats sentence_stats(const TokenSeq& hyp, const TokenSeq& ref);

class BleuCorpus {
 public:
  struct Pair {
    TokenSeq hypothesis;
    TokenSeq reference;
  };

  // DomainError on an empty corpus.
  explicit BleuCorpus(std::vector<Pair> pairs);

  std::size_t size() const { return pairs_.size(); }
  const std::vector<Pair>& pairs() const { return pairs_; }
  const std::vector<SentenceStats>& stats() const { return stats_; }
  // Component-wise sums in index order.
  const SentenceStats& totals() const { return totals_; }

 private:
  std::vector<Pair> pairs_;
  std::vector<SentenceStats> stats_;
  SentenceStats totals_;
};

struct BleuScore {
  double value = 0.0;
  // Set when some order has zero matches or zero n-grams; value is then 0.
  bool degenerate = false;
  std::string diagnostic;
};

// GM_k(H_k/L_k) * min(exp(1 - M1/L1), 1) over the given counts.
BleuScore bleu_from_stats(const SentenceStats& stats);
BleuScore corpus_bleu(const BleuCorpus& corpus);

// Log form: sum_k (1/4) log(H_k/L_k) - max(M1/L1, 1); DomainError on zeros.
double f_bleu_from_stats(const SentenceStats& stats);
double f_bleu(const BleuCorpus& corpus);

enum class SmoothingKind {
  kNone,
  kFloor,     // zero H_k (and zero L_k) replaced by epsilon
  kAddOne,    // (H_k+1)/(L_k+1) for orders k >= 2 whose H_k is zero
};

struct SmoothingPolicy {
  SmoothingKind kind = SmoothingKind::kAddOne;
  double floor_epsilon = 0.1;
};

SmoothingPolicy parse_smoothing(std::string_view name);

// Per-order numerators/denominators after smoothing, plus the length ratio.
struct SmoothedCounts {
  std::array<double, kMaxNgramOrder> h{};
  std::array<double, kMaxNgramOrder> l{};
  double m1 = 0.0;
};

SmoothedCounts apply_smoothing(const SentenceStats& stats, const SmoothingPolicy& policy);

BleuScore sentence_bleu(const TokenSeq& hyp, const TokenSeq& ref,
                        const SmoothingPolicy& policy);
BleuScore sentence_bleu(const SentenceStats& stats, const SmoothingPolicy& policy);

// Sentence log-form score under the policy; DomainError if still undefined.
double sentence_f_bleu(const SentenceStats& stats, const SmoothingPolicy& policy);

// Arithmetic mean of sentence_f_bleu over the corpus; a failing sentence is
// reported by index.
double bleu_average(const BleuCorpus& corpus, const SmoothingPolicy& policy);

// Line-aligned files, one pre-tokenized sentence per line.
BleuCorpus read_bleu_corpus(const std::string& hyp_path, const std::string& ref_path);
BleuCorpus parse_bleu_corpus(std::istream& hyps, std::istream& refs);

// CSV: sentence_id,H1,H2,H3,H4,L1,L2,L3,L4,M1
void write_stats_csv(std::ostream& out, const BleuCorpus& corpus);

}  // namespace simpson
