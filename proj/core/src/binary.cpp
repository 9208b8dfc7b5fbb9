#include "simpson/binary.hpp"

#include <cmath>
#include <sstream>

#include "simpson/error.hpp"

namespace simpson {
namespace {

std::string format_gamma(double gamma) {
  std::ostringstream os;
  os.precision(17);
  os << gamma;
  return os.str();
}

[[noreturn]] void throw_row_error(std::string_view metric, std::size_t index,
                                  std::uint8_t y, std::uint8_t yhat, double gamma) {
  std::ostringstream os;
  os << metric << " averaged form undefined at sample " << index << " (y=" << int{y}
     << ", yhat=" << int{yhat} << "): zero per-sample denominator at gamma="
     << format_gamma(gamma);
  throw DomainError(os.str());
}

double checked_ratio(std::string_view what, double num, double den) {
  if (den == 0.0) throw DomainError(std::string(what) + ": zero aggregate denominator");
  return num / den;
}

// Mean of per-sample (gamma + num_i) / (gamma + den_i) with integral num_i/den_i.
template <typename Cell>
double smoothed_mean(std::string_view metric, const BinaryPredictionSet& set, double gamma,
                     Cell cell) {
  const auto y = set.y();
  const auto yhat = set.yhat();
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto [num, den] = cell(y[i], yhat[i]);
    const double denominator = gamma + den;
    if (denominator == 0.0) throw_row_error(metric, i, y[i], yhat[i], gamma);
    total += (gamma + num) / denominator;
  }
  return total / static_cast<double>(set.size());
}

std::vector<std::uint8_t> parse_bits(std::string_view bits) {
  std::vector<std::uint8_t> out;
  out.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw DomainError("bit string may only contain '0' and '1'");
    }
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

std::string to_bits(std::span<const std::uint8_t> v) {
  std::string s;
  s.reserve(v.size());
  for (auto b : v) s.push_back(static_cast<char>('0' + b));
  return s;
}

}  // namespace

BinaryPredictionSet::BinaryPredictionSet(std::vector<std::uint8_t> y,
                                         std::vector<std::uint8_t> yhat)
    : y_(std::move(y)), yhat_(std::move(yhat)) {
  if (y_.size() != yhat_.size()) {
    throw DomainError("prediction set: y and yhat lengths differ");
  }
  if (y_.empty()) throw DomainError("prediction set: at least one sample required");
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (y_[i] > 1 || yhat_[i] > 1) {
      throw DomainError("prediction set: sample " + std::to_string(i) + " is not binary");
    }
    sum_y_ += y_[i];
    sum_yhat_ += yhat_[i];
  }
}

BinaryPredictionSet BinaryPredictionSet::from_bits(std::string_view y, std::string_view yhat) {
  return BinaryPredictionSet(parse_bits(y), parse_bits(yhat));
}

std::string BinaryPredictionSet::y_bits() const { return to_bits(y_); }
std::string BinaryPredictionSet::yhat_bits() const { return to_bits(yhat_); }

ContingencyCounts contingency(const BinaryPredictionSet& set) {
  ContingencyCounts c;
  const auto y = set.y();
  const auto yhat = set.yhat();
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (yhat[i]) {
      (y[i] ? c.tp : c.fp) += 1;
    } else {
      (y[i] ? c.fn : c.tn) += 1;
    }
  }
  return c;
}

RosSamplePairs::RosSamplePairs(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.size() != b_.size()) throw DomainError("RoS pairs: a and b lengths differ");
  if (a_.empty()) throw DomainError("RoS pairs: at least one sample required");
}

double ros_aggregate(const RosSamplePairs& pairs) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    num += pairs.a()[i];
    den += pairs.b()[i];
  }
  return checked_ratio("ratio-of-sums", num, den);
}

double ros_average(const RosSamplePairs& pairs) {
  double total = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs.b()[i] == 0.0) {
      throw DomainError("ratio-of-sums averaged form: zero denominator at sample " +
                        std::to_string(i));
    }
    total += pairs.a()[i] / pairs.b()[i];
  }
  return total / static_cast<double>(pairs.size());
}

bool check_type1(const RosSamplePairs& pairs) {
  const auto b = pairs.b();
  for (double v : b) {
    if (v != b.front()) return false;
  }
  return true;
}

bool check_type2(const RosSamplePairs& pairs) {
  const auto a = pairs.a();
  const auto b = pairs.b();
  for (double v : b) {
    if (v == 0.0) return false;
  }
  const double ratio = a[0] / b[0];
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (std::abs(a[i] / b[i] - ratio) > 1e-12) return false;
  }
  return true;
}

double accuracy(const BinaryPredictionSet& set) {
  const auto c = contingency(set);
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(set.size());
}

double accuracy_average(const BinaryPredictionSet& set) {
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    total += set.y()[i] == set.yhat()[i] ? 1.0 : 0.0;
  }
  return total / static_cast<double>(set.size());
}

double precision_smoothed_aggregate(const BinaryPredictionSet& set, SmoothingGamma gamma) {
  const auto c = contingency(set);
  const double g = gamma.value();
  return checked_ratio("smoothed precision", g + static_cast<double>(c.tp),
                       g + static_cast<double>(set.sum_yhat()));
}

double precision_smoothed_average(const BinaryPredictionSet& set, SmoothingGamma gamma) {
  return smoothed_mean("smoothed precision", set, gamma.value(),
                       [](std::uint8_t y, std::uint8_t yhat) {
                         return std::pair{static_cast<double>(y * yhat),
                                          static_cast<double>(yhat)};
                       });
}

double recall_smoothed_aggregate(const BinaryPredictionSet& set, SmoothingGamma gamma) {
  const auto c = contingency(set);
  const double g = gamma.value();
  return checked_ratio("smoothed recall", g + static_cast<double>(c.tp),
                       g + static_cast<double>(set.sum_y()));
}

double recall_smoothed_average(const BinaryPredictionSet& set, SmoothingGamma gamma) {
  return smoothed_mean("smoothed recall", set, gamma.value(),
                       [](std::uint8_t y, std::uint8_t yhat) {
                         return std::pair{static_cast<double>(y * yhat),
                                          static_cast<double>(y)};
                       });
}

double dsc_aggregate(const BinaryPredictionSet& set, SmoothingGamma gamma) {
  const auto c = contingency(set);
  const double g = gamma.value();
  return checked_ratio("smoothed DSC", g + 2.0 * static_cast<double>(c.tp),
                       g + static_cast<double>(set.sum_y() + set.sum_yhat()));
}

double dsc_average(const BinaryPredictionSet& set, SmoothingGamma gamma) {
  return smoothed_mean("smoothed DSC", set, gamma.value(),
                       [](std::uint8_t y, std::uint8_t yhat) {
                         return std::pair{2.0 * y * yhat, static_cast<double>(y + yhat)};
                       });
}

RosSamplePairs precision_sample_pairs(const BinaryPredictionSet& set, SmoothingGamma gamma) {
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t i = 0; i < set.size(); ++i) {
    a.push_back(gamma.value() + set.y()[i] * set.yhat()[i]);
    b.push_back(gamma.value() + set.yhat()[i]);
  }
  return RosSamplePairs(std::move(a), std::move(b));
}

RosSamplePairs dsc_sample_pairs(const BinaryPredictionSet& set, SmoothingGamma gamma) {
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t i = 0; i < set.size(); ++i) {
    a.push_back(gamma.value() + 2.0 * set.y()[i] * set.yhat()[i]);
    b.push_back(gamma.value() + set.y()[i] + set.yhat()[i]);
  }
  return RosSamplePairs(std::move(a), std::move(b));
}

BiasReport make_bias_report(double aggregate, double averaged) {
  return BiasReport{aggregate, averaged, std::abs(aggregate - averaged)};
}

BiasReport bias(const BinaryPredictionSet& set, MetricId metric, SmoothingGamma gamma_agg,
                SmoothingGamma gamma_avg) {
  switch (metric) {
    case MetricId::kAccuracy:
      return make_bias_report(accuracy(set), accuracy_average(set));
    case MetricId::kPrecision:
      return make_bias_report(precision_smoothed_aggregate(set, gamma_agg),
                              precision_smoothed_average(set, gamma_avg));
    case MetricId::kRecall:
      return make_bias_report(recall_smoothed_aggregate(set, gamma_agg),
                              recall_smoothed_average(set, gamma_avg));
    case MetricId::kDsc:
      return make_bias_report(dsc_aggregate(set, gamma_agg), dsc_average(set, gamma_avg));
    default:
      throw DomainError("metric '" + std::string(to_string(metric)) +
                        "' is not defined on binary prediction sets");
  }
}

BiasReport bias(const RosSamplePairs& pairs) {
  return make_bias_report(ros_aggregate(pairs), ros_average(pairs));
}

}  // namespace simpson
