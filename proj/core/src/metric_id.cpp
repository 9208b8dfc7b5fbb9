#include "simpson/metric_id.hpp"

#include <array>
#include <utility>

#include "simpson/error.hpp"

namespace simpson {
namespace {

constexpr std::array<std::pair<MetricId, std::string_view>, 9> kNames{{
    {MetricId::kAccuracy, "accuracy"},
    {MetricId::kPrecision, "precision"},
    {MetricId::kRecall, "recall"},
    {MetricId::kDsc, "dsc"},
    {MetricId::kMacroF1, "macro-f1"},
    {MetricId::kDiceLoss, "dice-loss"},
    {MetricId::kNerDiceSentence, "ner-dice-sentence"},
    {MetricId::kNerDiceToken, "ner-dice-token"},
    {MetricId::kBleu, "bleu"},
}};

}  // namespace

MetricId parse_metric_id(std::string_view name) {
  for (const auto& [id, text] : kNames) {
    if (text == name) return id;
  }
  throw DomainError("unknown metric id '" + std::string(name) + "'");
}

std::string_view to_string(MetricId id) {
  for (const auto& [known, text] : kNames) {
    if (known == id) return text;
  }
  return "unknown";
}

bool is_binary_metric(MetricId id) {
  return id == MetricId::kAccuracy || id == MetricId::kPrecision ||
         id == MetricId::kRecall || id == MetricId::kDsc;
}

}  // namespace simpson
