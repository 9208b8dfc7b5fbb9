#pragma once

#include <string>
#include <string_view>

namespace simpson {

enum class MetricId {
  kAccuracy,
  kPrecision,
  kRecall,
  kDsc,
  kMacroF1,
  kDiceLoss,
  kNerDiceSentence,
  kNerDiceToken,
  kBleu,
};

// Accepts the CLI spellings: accuracy, precision, recall, dsc, macro-f1,
// dice-loss, ner-dice-sentence, ner-dice-token, bleu.
MetricId parse_metric_id(std::string_view name);
std::string_view to_string(MetricId id);

// accuracy / precision / recall / dsc
bool is_binary_metric(MetricId id);

}  // namespace simpson
