#include "simpson/multiclass.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "simpson/error.hpp"

namespace simpson {
namespace {

void validate_distribution(std::span<const double> row, std::string_view where,
                           bool allow_all_zero) {
  double total = 0.0;
  for (double p : row) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError(std::string(where) + ": probability outside [0,1]");
    }
    total += p;
  }
  if (allow_all_zero && total == 0.0) return;
  if (std::abs(total - 1.0) > kProbabilityRowTolerance) {
    throw DomainError(std::string(where) + ": probability row does not sum to 1");
  }
}

std::string cell_name(std::size_t i, std::size_t k) {
  return "sample " + std::to_string(i) + ", class " + std::to_string(k);
}

double cell_ratio(double num, double den, double gamma, const std::string& where) {
  const double d = gamma + den;
  if (d == 0.0) {
    std::ostringstream os;
    os.precision(17);
    os << "zero cell denominator at " << where << " for gamma=" << gamma;
    throw DomainError(os.str());
  }
  return (gamma + num) / d;
}

}  // namespace

std::size_t argmax(std::span<const double> probs) {
  if (probs.empty()) throw DomainError("hardmax: empty probability row");
  std::size_t best = 0;
  for (std::size_t k = 1; k < probs.size(); ++k) {
    if (probs[k] > probs[best]) best = k;
  }
  return best;
}

std::vector<std::uint8_t> hardmax(std::span<const double> probs) {
  std::vector<std::uint8_t> row(probs.size(), 0);
  row[argmax(probs)] = 1;
  return row;
}

MultiClassSet::MultiClassSet(std::size_t classes, std::vector<std::size_t> labels,
                             std::vector<std::size_t> decisions,
                             std::optional<std::vector<double>> probs)
    : classes_(classes),
      labels_(std::move(labels)),
      decisions_(std::move(decisions)),
      probs_(std::move(probs)) {
  if (classes_ < 2) throw DomainError("multiclass set: at least two classes required");
  if (labels_.empty()) throw DomainError("multiclass set: at least one sample required");
  if (labels_.size() != decisions_.size()) {
    throw DomainError("multiclass set: label and decision counts differ");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= classes_ || decisions_[i] >= classes_) {
      throw DomainError("multiclass set: class index out of range at sample " +
                        std::to_string(i));
    }
  }
}

MultiClassSet MultiClassSet::with_decisions(std::size_t classes, std::vector<std::size_t> labels,
                                            std::vector<std::size_t> decisions) {
  return MultiClassSet(classes, std::move(labels), std::move(decisions), std::nullopt);
}

MultiClassSet MultiClassSet::with_probabilities(std::size_t classes,
                                                std::vector<std::size_t> labels,
                                                std::vector<double> probs) {
  if (classes == 0 || probs.size() != labels.size() * classes) {
    throw DomainError("multiclass set: probability matrix shape does not match labels");
  }
  std::vector<std::size_t> decisions;
  decisions.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::span<const double> row(probs.data() + i * classes, classes);
    validate_distribution(row, "multiclass set sample " + std::to_string(i), false);
    decisions.push_back(argmax(row));
  }
  return MultiClassSet(classes, std::move(labels), std::move(decisions), std::move(probs));
}

std::span<const double> MultiClassSet::probability_row(std::size_t sample) const {
  if (!probs_) throw DomainError("multiclass set has no probability rows");
  return {probs_->data() + sample * classes_, classes_};
}

BinaryPredictionSet MultiClassSet::class_column(std::size_t k) const {
  std::vector<std::uint8_t> y(size());
  std::vector<std::uint8_t> yhat(size());
  for (std::size_t i = 0; i < size(); ++i) {
    y[i] = labels_[i] == k;
    yhat[i] = decisions_[i] == k;
  }
  return BinaryPredictionSet(std::move(y), std::move(yhat));
}

double per_class_precision(const MultiClassSet& set, std::size_t k, SmoothingGamma gamma) {
  return precision_smoothed_aggregate(set.class_column(k), gamma);
}

double per_class_recall(const MultiClassSet& set, std::size_t k, SmoothingGamma gamma) {
  return recall_smoothed_aggregate(set.class_column(k), gamma);
}

double per_class_dsc(const MultiClassSet& set, std::size_t k, SmoothingGamma gamma) {
  if (k >= set.classes()) throw DomainError("class index out of range");
  try {
    return dsc_aggregate(set.class_column(k), gamma);
  } catch (const DomainError&) {
    throw DomainError("class " + std::to_string(k) +
                      " absent from labels and decisions: DSC undefined at this gamma");
  }
}

double macro_f1_aggregate(const MultiClassSet& set, SmoothingGamma gamma) {
  double total = 0.0;
  for (std::size_t k = 0; k < set.classes(); ++k) total += per_class_dsc(set, k, gamma);
  return total / static_cast<double>(set.classes());
}

double macro_f1_average(const MultiClassSet& set, SmoothingGamma gamma) {
  const double g = gamma.value();
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t k = 0; k < set.classes(); ++k) {
      const double y = set.labels()[i] == k ? 1.0 : 0.0;
      const double yhat = set.decisions()[i] == k ? 1.0 : 0.0;
      total += cell_ratio(2.0 * y * yhat, y + yhat, g, cell_name(i, k));
    }
  }
  return total / static_cast<double>(set.classes() * set.size());
}

double dice_loss(const MultiClassSet& set, SmoothingGamma gamma) {
  const double g = gamma.value();
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto row = set.probability_row(i);
    for (std::size_t k = 0; k < set.classes(); ++k) {
      const double y = set.labels()[i] == k ? 1.0 : 0.0;
      const double p = row[k];
      total += cell_ratio(2.0 * y * p, y * y + p * p, g, cell_name(i, k));
    }
  }
  return 1.0 - total / static_cast<double>(set.classes() * set.size());
}

TaggedSentenceBatch::TaggedSentenceBatch(std::size_t classes,
                                         std::vector<TaggedSentence> sentences)
    : classes_(classes), sentences_(std::move(sentences)) {
  if (classes_ < 2) throw DomainError("NER batch: at least two classes required");
  if (sentences_.empty()) throw DomainError("NER batch: at least one sentence required");
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    const auto& s = sentences_[i];
    if (s.probs.size() != s.labels.size() * classes_) {
      throw DomainError("NER batch: sentence " + std::to_string(i) +
                        " probability rows do not match token count");
    }
    for (std::size_t j = 0; j < s.size(); ++j) {
      const int label = s.labels[j];
      const bool padding = label == kPaddingLabel;
      const std::string where =
          "NER batch sentence " + std::to_string(i) + " token " + std::to_string(j);
      if (!padding && (label < 0 || static_cast<std::size_t>(label) >= classes_)) {
        throw DomainError(where + ": label index out of range");
      }
      validate_distribution({s.probs.data() + j * classes_, classes_}, where, padding);
    }
  }
}

std::size_t TaggedSentenceBatch::token_count() const {
  std::size_t total = 0;
  for (const auto& s : sentences_) total += s.size();
  return total;
}

std::size_t TaggedSentenceBatch::real_token_count() const {
  std::size_t total = 0;
  for (const auto& s : sentences_) {
    for (int label : s.labels) total += label != kPaddingLabel;
  }
  return total;
}

MultiClassSet TaggedSentenceBatch::real_token_decisions() const {
  std::vector<std::size_t> labels;
  std::vector<std::size_t> decisions;
  for (const auto& s : sentences_) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s.labels[j] == kPaddingLabel) continue;
      labels.push_back(static_cast<std::size_t>(s.labels[j]));
      decisions.push_back(argmax({s.probs.data() + j * classes_, classes_}));
    }
  }
  return MultiClassSet::with_decisions(classes_, std::move(labels), std::move(decisions));
}

double ner_dice_sentence(const TaggedSentenceBatch& batch, SmoothingGamma gamma,
                         PaddingPolicy padding) {
  const double g = gamma.value();
  const std::size_t classes = batch.classes();
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& s = batch.sentences()[i];
    for (std::size_t k = 0; k < classes; ++k) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) {
        const bool pad = s.labels[j] == kPaddingLabel;
        if (pad && padding == PaddingPolicy::kMask) continue;
        const double ind = !pad && static_cast<std::size_t>(s.labels[j]) == k ? 1.0 : 0.0;
        const double p = s.probs[j * classes + k];
        num += 2.0 * p * ind;
        den += p * p + ind * ind;
      }
      total += cell_ratio(num, den, g, "sentence " + std::to_string(i) + ", class " +
                                           std::to_string(k));
    }
  }
  return total / static_cast<double>(classes * batch.size());
}

double ner_dice_token(const TaggedSentenceBatch& batch, SmoothingGamma gamma,
                      PaddingPolicy padding) {
  const double g = gamma.value();
  const std::size_t classes = batch.classes();
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& s = batch.sentences()[i];
    for (std::size_t j = 0; j < s.size(); ++j) {
      const bool pad = s.labels[j] == kPaddingLabel;
      if (pad && padding == PaddingPolicy::kMask) continue;
      ++counted;
      for (std::size_t k = 0; k < classes; ++k) {
        const double ind = !pad && static_cast<std::size_t>(s.labels[j]) == k ? 1.0 : 0.0;
        const double p = s.probs[j * classes + k];
        total += cell_ratio(2.0 * p * ind, p * p + ind * ind, g,
                            "sentence " + std::to_string(i) + ", token " +
                                std::to_string(j) + ", class " + std::to_string(k));
      }
    }
  }
  if (counted == 0) throw DomainError("NER batch: no tokens left after masking");
  return total / static_cast<double>(classes * counted);
}

}  // namespace simpson
