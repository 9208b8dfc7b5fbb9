#pragma once

// Binary-recognition metrics in their aggregate form F (one ratio over pooled
// counts) and their averaged form F-bar (mean of the same ratio evaluated on
// each singleton sample).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "simpson/metric_id.hpp"

namespace simpson {

// Smoothing constant added to both numerator and denominator of a ratio.
// Any real value is representable; admissibility is decided per evaluation
// against the rows that actually occur in the data.
class SmoothingGamma {
 public:
  constexpr explicit SmoothingGamma(double value) : value_(value) {}
  constexpr double value() const { return value_; }

 private:
  double value_;
};

class BinaryPredictionSet {
 public:
  // Throws DomainError on length mismatch, n == 0, or any value outside {0,1}.
  BinaryPredictionSet(std::vector<std::uint8_t> y, std::vector<std::uint8_t> yhat);

  // Convenience for tests and tools: "1010" style bit strings.
  static BinaryPredictionSet from_bits(std::string_view y, std::string_view yhat);

  std::size_t size() const { return y_.size(); }
  std::span<const std::uint8_t> y() const { return y_; }
  std::span<const std::uint8_t> yhat() const { return yhat_; }
  std::int64_t sum_y() const { return sum_y_; }
  std::int64_t sum_yhat() const { return sum_yhat_; }

  // Same set with the roles of truth and decision exchanged.
  BinaryPredictionSet swapped() const { return BinaryPredictionSet(yhat_, y_); }

  std::string y_bits() const;
  std::string yhat_bits() const;

  friend bool operator==(const BinaryPredictionSet&, const BinaryPredictionSet&) = default;

 private:
  std::vector<std::uint8_t> y_;
  std::vector<std::uint8_t> yhat_;
  std::int64_t sum_y_ = 0;
  std::int64_t sum_yhat_ = 0;
};

struct ContingencyCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t n() const { return tp + fp + fn + tn; }
  std::int64_t predicted_positive() const { return tp + fp; }
  std::int64_t actual_positive() const { return tp + fn; }
  std::int64_t mismatches() const { return fp + fn; }

  friend bool operator==(const ContingencyCounts&, const ContingencyCounts&) = default;
};

ContingencyCounts contingency(const BinaryPredictionSet& set);

// Per-sample numerators a_i and denominators b_i of a ratio-of-sums metric.
class RosSamplePairs {
 public:
  // Throws DomainError on length mismatch or empty input.
  RosSamplePairs(std::vector<double> a, std::vector<double> b);

  std::size_t size() const { return a_.size(); }
  std::span<const double> a() const { return a_; }
  std::span<const double> b() const { return b_; }

 private:
  std::vector<double> a_;
  std::vector<double> b_;
};

// (sum a_i) / (sum b_i); DomainError when the pooled denominator is zero.
double ros_aggregate(const RosSamplePairs& pairs);
// (1/n) sum a_i / b_i; DomainError naming the first sample with b_i == 0.
double ros_average(const RosSamplePairs& pairs);

// Constant denominator: every b_i equal.
bool check_type1(const RosSamplePairs& pairs);
// Constant ratio: every a_i / b_i equal within 1e-12.
bool check_type2(const RosSamplePairs& pairs);

double accuracy(const BinaryPredictionSet& set);
// Mean of per-sample 1[y_i == yhat_i]; identical to accuracy() bit for bit.
double accuracy_average(const BinaryPredictionSet& set);

double precision_smoothed_aggregate(const BinaryPredictionSet& set, SmoothingGamma gamma);
double precision_smoothed_average(const BinaryPredictionSet& set, SmoothingGamma gamma);
double recall_smoothed_aggregate(const BinaryPredictionSet& set, SmoothingGamma gamma);
double recall_smoothed_average(const BinaryPredictionSet& set, SmoothingGamma gamma);
double dsc_aggregate(const BinaryPredictionSet& set, SmoothingGamma gamma);
double dsc_average(const BinaryPredictionSet& set, SmoothingGamma gamma);

// Per-sample numerator/denominator pairs backing the averaged forms above,
// e.g. (gamma + y_i*yhat_i, gamma + yhat_i) for precision.
RosSamplePairs precision_sample_pairs(const BinaryPredictionSet& set, SmoothingGamma gamma);
RosSamplePairs dsc_sample_pairs(const BinaryPredictionSet& set, SmoothingGamma gamma);

struct BiasReport {
  double aggregate = 0.0;
  double averaged = 0.0;
  double epsilon = 0.0;
};

BiasReport make_bias_report(double aggregate, double averaged);

// Aggregate side evaluated at gamma_agg, averaged side at gamma_avg.
// Only binary metric ids are accepted here.
BiasReport bias(const BinaryPredictionSet& set, MetricId metric, SmoothingGamma gamma_agg,
                SmoothingGamma gamma_avg);
BiasReport bias(const RosSamplePairs& pairs);

}  // namespace simpson
