#pragma once

// Brute-force checks over every small binary configuration, and search for
// Simpson reversal instances over partitioned contingency counts.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "simpson/binary.hpp"
#include "simpson/gamma.hpp"
#include "simpson/metric_id.hpp"

namespace simpson {

inline constexpr std::size_t kMaxEnumerationSize = 6;

struct EnumerationSpace {
  std::size_t n = 1;
  std::function<bool(const BinaryPredictionSet&)> filter;  // empty: keep all
  std::string filter_description;

  static EnumerationSpace all(std::size_t n);
  static EnumerationSpace min_predicted_positives(std::size_t n, std::int64_t at_least);
};

// Decodes configuration index c in [0, 4^n): y from the high n bits, yhat from
// the low n bits, first sample most significant. Index order is lexicographic.
BinaryPredictionSet configuration(std::size_t n, std::uint64_t index);

// Visits every (y, yhat) passing the filter in lexicographic order.
// DomainError for n == 0 or n above kMaxEnumerationSize (use sampling).
void enumerate_sets(const EnumerationSpace& space,
                    const std::function<void(const BinaryPredictionSet&)>& visit);
std::size_t count_sets(const EnumerationSpace& space);

struct Violation {
  IdentityId identity = IdentityId::kAccuracy;
  std::string y;
  std::string yhat;
  double gamma = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string note;
};

struct VerificationSummary {
  IdentityId identity = IdentityId::kAccuracy;
  std::size_t checked = 0;      // (set, gamma) evaluations performed
  std::size_t inapplicable = 0; // skipped: solver side condition or inadmissible gamma
  std::vector<Violation> violations;

  bool clean() const { return violations.empty(); }
};

// T1 and T2 identities are checked at their solved gamma (gamma_grid ignored);
// T1 is restricted to sum yhat >= 2 and additionally requires gamma* < 0
// whenever sum yhat < n. Lemma 1 and T3 run over gamma_grid, skipping
// configurations where a grid value is inadmissible. Work is sharded by n and
// by leading configuration bits; violations come back in lexicographic order.
VerificationSummary exhaustive_verify(IdentityId identity, std::size_t n_max,
                                      const std::vector<double>& gamma_grid);

// For every y of length n and every pair of predictions on it, the order of
// dsc_average at gamma agrees with the order of accuracy (ties with ties).
// Requires n <= 5 and gamma > -1, gamma != 0.
bool accuracy_monotone_check(std::size_t n, SmoothingGamma gamma);

struct PartitionedComparison {
  std::vector<ContingencyCounts> model1;  // candidate claimed better per group
  std::vector<ContingencyCounts> model0;

  std::size_t groups() const { return model1.size(); }
};

// Value of a binary metric on pooled or per-group counts; nullopt if undefined.
std::optional<double> count_metric(MetricId metric, const ContingencyCounts& counts);

// model1 strictly beats model0 in every group and strictly loses on the
// pooled counts. Any binary metric id; undefined per-group values fail.
bool is_simpson_reversal(const PartitionedComparison& cmp, MetricId metric);

struct ReversalSearchBounds {
  std::int64_t max_count = 9;  // bound on each free count per group
  std::size_t groups = 2;      // 1 or 2
};

// Free counts are (tp, fp) for precision and (tp, fn) for recall. Visits
// witnesses in lexicographic order over (g1 model1, g1 model0, g2 model1,
// g2 model0); visitor returns false to stop.
void for_each_simpson_reversal(MetricId metric, const ReversalSearchBounds& bounds,
                               const std::function<bool(const PartitionedComparison&)>& visit);
std::optional<PartitionedComparison> find_simpson_reversal(MetricId metric,
                                                           const ReversalSearchBounds& bounds);

// Witness file: "model<TAB>group<TAB>tp<TAB>fp<TAB>fn<TAB>tn" rows after a
// "metric <id>" line; '#' comments allowed.
void write_witness(std::ostream& out, MetricId metric, const PartitionedComparison& cmp);
PartitionedComparison parse_witness(std::istream& in, MetricId* metric_out = nullptr);

struct CensusReport {
  MetricId metric = MetricId::kAccuracy;
  std::size_t n = 0;
  bool sampled = false;
  std::size_t pairs = 0;          // ordered pairs examined (distinct predictions)
  std::size_t skipped = 0;        // F or F-bar undefined on either side
  std::size_t strict_reversals = 0;  // dF * dFbar <= 0, not both zero
  std::size_t both_zero = 0;

  std::size_t evaluable() const { return pairs - skipped; }
  double strict_fraction() const;
};

struct CensusOptions {
  std::uint64_t seed = 0;
  std::size_t samples = 100000;  // used when n > 4
};

// Exhaustive over ordered pairs of predictions sharing y for n <= 4; seeded
// sampling of (y, yhat1, yhat2) otherwise. Binary metric ids only.
CensusReport reversal_census(std::size_t n, MetricId metric, SmoothingGamma gamma_agg,
                             SmoothingGamma gamma_avg, const CensusOptions& options = {});

void write_violations_csv(std::ostream& out, const std::vector<Violation>& violations);
void write_census_csv(std::ostream& out, const CensusReport& report);

}  // namespace simpson
