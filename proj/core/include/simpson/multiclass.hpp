#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "simpson/binary.hpp"

namespace simpson {

inline constexpr double kProbabilityRowTolerance = 1e-9;

// One-hot row with a 1 at the arg-max; ties go to the lowest index.
std::vector<std::uint8_t> hardmax(std::span<const double> probs);
std::size_t argmax(std::span<const double> probs);

// K-class sample set. Labels and decisions are stored as class indices,
// which keeps every one-hot row summing to exactly 1. Probability rows are
// stored row-major (n x K). When only probabilities are given, decisions are
// their hardmax.
class MultiClassSet {
 public:
  static MultiClassSet with_decisions(std::size_t classes, std::vector<std::size_t> labels,
                                      std::vector<std::size_t> decisions);
  static MultiClassSet with_probabilities(std::size_t classes, std::vector<std::size_t> labels,
                                          std::vector<double> probs);

  std::size_t size() const { return labels_.size(); }
  std::size_t classes() const { return classes_; }
  std::span<const std::size_t> labels() const { return labels_; }
  std::span<const std::size_t> decisions() const { return decisions_; }
  bool has_probabilities() const { return probs_.has_value(); }
  // Throws DomainError when the set was built without probabilities.
  std::span<const double> probability_row(std::size_t sample) const;

  // Binary view of class k: y_i = 1[label_i == k], yhat_i = 1[decision_i == k].
  BinaryPredictionSet class_column(std::size_t k) const;

 private:
  MultiClassSet(std::size_t classes, std::vector<std::size_t> labels,
                std::vector<std::size_t> decisions, std::optional<std::vector<double>> probs);

  std::size_t classes_;
  std::vector<std::size_t> labels_;
  std::vector<std::size_t> decisions_;
  std::optional<std::vector<double>> probs_;
};

double per_class_precision(const MultiClassSet& set, std::size_t k, SmoothingGamma gamma);
double per_class_recall(const MultiClassSet& set, std::size_t k, SmoothingGamma gamma);
double per_class_dsc(const MultiClassSet& set, std::size_t k, SmoothingGamma gamma);

// (1/K) sum_k DSC_k over hard decisions.
double macro_f1_aggregate(const MultiClassSet& set, SmoothingGamma gamma);
// Mean over all (sample, class) cells of (g + 2 y yhat) / (g + y + yhat).
double macro_f1_average(const MultiClassSet& set, SmoothingGamma gamma);
// 1 - mean over cells of (g + 2 y p) / (g + y^2 + p^2). Needs probabilities.
double dice_loss(const MultiClassSet& set, SmoothingGamma gamma);

// Token-level batch for the sentence-pooled and per-token NER dice variants.
// Padding tokens carry label kPaddingLabel; their probability row is either
// all zeros or a valid distribution.
inline constexpr int kPaddingLabel = -1;

struct TaggedSentence {
  std::vector<int> labels;
  std::vector<double> probs;  // labels.size() x K, row-major

  std::size_t size() const { return labels.size(); }
};

class TaggedSentenceBatch {
 public:
  // Validates label range, row widths and row normalization.
  TaggedSentenceBatch(std::size_t classes, std::vector<TaggedSentence> sentences);

  std::size_t classes() const { return classes_; }
  std::size_t size() const { return sentences_.size(); }
  std::span<const TaggedSentence> sentences() const { return sentences_; }
  std::size_t real_token_count() const;
  std::size_t token_count() const;

  // Hard decisions over real tokens only, flattened in sentence order.
  MultiClassSet real_token_decisions() const;

 private:
  std::size_t classes_;
  std::vector<TaggedSentence> sentences_;
};

enum class PaddingPolicy {
  kInclude,  // padded tokens count as negatives (all-zero label row)
  kMask,     // padded tokens are dropped from sums and divisors
};

double ner_dice_sentence(const TaggedSentenceBatch& batch, SmoothingGamma gamma,
                         PaddingPolicy padding);
double ner_dice_token(const TaggedSentenceBatch& batch, SmoothingGamma gamma,
                      PaddingPolicy padding);

}  // namespace simpson
