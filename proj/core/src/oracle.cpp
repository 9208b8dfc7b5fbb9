#include "simpson/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "simpson/error.hpp"
#include "simpson/io.hpp"
#include "simpson/parallel.hpp"

namespace simpson {
namespace {

constexpr double kZeroDelta = 1e-12;

int sign_with_tolerance(double v) {
  if (v > kZeroDelta) return 1;
  if (v < -kZeroDelta) return -1;
  return 0;
}

std::uint64_t space_size(std::size_t n) { return std::uint64_t{1} << (2 * n); }

void check_enumerable(std::size_t n) {
  if (n == 0) throw DomainError("enumeration: n must be at least 1");
  if (n > kMaxEnumerationSize) {
    throw DomainError("enumeration: n = " + std::to_string(n) + " exceeds " +
                      std::to_string(kMaxEnumerationSize) +
                      "; use the seeded sampling mode instead");
  }
}

BinaryPredictionSet from_masks(std::size_t n, std::uint64_t y_mask, std::uint64_t yhat_mask) {
  std::vector<std::uint8_t> y(n);
  std::vector<std::uint8_t> yhat(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto shift = n - 1 - i;
    y[i] = (y_mask >> shift) & 1;
    yhat[i] = (yhat_mask >> shift) & 1;
  }
  return BinaryPredictionSet(std::move(y), std::move(yhat));
}

Violation make_violation(IdentityId id, const BinaryPredictionSet& set, double gamma,
                         const IdentityReport& r, std::string note) {
  return Violation{id, set.y_bits(), set.yhat_bits(), gamma, r.lhs, r.rhs, std::move(note)};
}

struct ShardResult {
  std::size_t checked = 0;
  std::size_t inapplicable = 0;
  std::vector<Violation> violations;
};

void verify_one(IdentityId identity, const BinaryPredictionSet& set,
                const std::vector<double>& gamma_grid, ShardResult& out) {
  switch (identity) {
    case IdentityId::kAccuracy: {
      const auto r = verify_identity(set, identity, SmoothingGamma(0.0));
      ++out.checked;
      if (r.lhs != r.rhs) out.violations.push_back(make_violation(identity, set, 0.0, r, "inexact"));
      return;
    }
    case IdentityId::kT1:
    case IdentityId::kT2Precision:
    case IdentityId::kT2Recall: {
      const auto solution = solution_for(set, identity);
      if (!solution.applicable) {
        ++out.inapplicable;
        return;
      }
      ++out.checked;
      IdentityReport r;
      try {
        r = verify_identity(set, identity, SmoothingGamma(solution.gamma));
      } catch (const DomainError& e) {
        out.violations.push_back(
            make_violation(identity, set, solution.gamma, IdentityReport{}, e.what()));
        return;
      }
      if (!r.holds) out.violations.push_back(make_violation(identity, set, solution.gamma, r, "residual"));
      if (identity == IdentityId::kT1 &&
          set.sum_yhat() < static_cast<std::int64_t>(set.size()) && !(solution.gamma < 0.0)) {
        out.violations.push_back(make_violation(identity, set, solution.gamma, r, "gamma* not negative"));
      }
      return;
    }
    case IdentityId::kLemma1:
    case IdentityId::kT3:
      for (double g : gamma_grid) {
        IdentityReport r;
        try {
          r = verify_identity(set, identity, SmoothingGamma(g));
        } catch (const DomainError&) {
          ++out.inapplicable;
          continue;
        }
        ++out.checked;
        if (!r.holds) out.violations.push_back(make_violation(identity, set, g, r, "residual"));
      }
      return;
  }
}

struct CensusPoint {
  bool defined = false;
  double f = 0.0;
  double fbar = 0.0;
};

CensusPoint census_point(MetricId metric, const BinaryPredictionSet& set, SmoothingGamma g_agg,
                         SmoothingGamma g_avg) {
  try {
    const auto r = bias(set, metric, g_agg, g_avg);
    return CensusPoint{true, r.aggregate, r.averaged};
  } catch (const DomainError&) {
    return CensusPoint{};
  }
}

void tally(CensusReport& report, const CensusPoint& a, const CensusPoint& b) {
  ++report.pairs;
  if (!a.defined || !b.defined) {
    ++report.skipped;
    return;
  }
  const int df = sign_with_tolerance(b.f - a.f);
  const int dfbar = sign_with_tolerance(b.fbar - a.fbar);
  if (df == 0 && dfbar == 0) {
    ++report.both_zero;
  } else if (df * dfbar <= 0) {
    ++report.strict_reversals;
  }
}

}  // namespace

EnumerationSpace EnumerationSpace::all(std::size_t n) { return EnumerationSpace{n, {}, "all"}; }

EnumerationSpace EnumerationSpace::min_predicted_positives(std::size_t n, std::int64_t at_least) {
  return EnumerationSpace{
      n, [at_least](const BinaryPredictionSet& s) { return s.sum_yhat() >= at_least; },
      "sum yhat >= " + std::to_string(at_least)};
}

BinaryPredictionSet configuration(std::size_t n, std::uint64_t index) {
  check_enumerable(n);
  if (index >= space_size(n)) throw DomainError("configuration index out of range");
  const std::uint64_t low = (std::uint64_t{1} << n) - 1;
  return from_masks(n, index >> n, index & low);
}

void enumerate_sets(const EnumerationSpace& space,
                    const std::function<void(const BinaryPredictionSet&)>& visit) {
  check_enumerable(space.n);
  for (std::uint64_t c = 0; c < space_size(space.n); ++c) {
    auto set = configuration(space.n, c);
    if (!space.filter || space.filter(set)) visit(set);
  }
}

std::size_t count_sets(const EnumerationSpace& space) {
  std::size_t count = 0;
  enumerate_sets(space, [&](const BinaryPredictionSet&) { ++count; });
  return count;
}

VerificationSummary exhaustive_verify(IdentityId identity, std::size_t n_max,
                                      const std::vector<double>& gamma_grid) {
  check_enumerable(n_max);

  struct Shard {
    std::size_t n;
    std::uint64_t begin;
    std::uint64_t end;
  };
  std::vector<Shard> shards;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const std::uint64_t size = space_size(n);
    const std::uint64_t pieces = std::min<std::uint64_t>(size, 16);
    const std::uint64_t step = size / pieces;
    for (std::uint64_t p = 0; p < pieces; ++p) shards.push_back({n, p * step, (p + 1) * step});
  }

  std::vector<ShardResult> results(shards.size());
  parallel_shards(shards.size(), [&](std::size_t s) {
    const auto& shard = shards[s];
    for (std::uint64_t c = shard.begin; c < shard.end; ++c) {
      verify_one(identity, configuration(shard.n, c), gamma_grid, results[s]);
    }
  });

  VerificationSummary summary;
  summary.identity = identity;
  for (auto& r : results) {
    summary.checked += r.checked;
    summary.inapplicable += r.inapplicable;
    std::move(r.violations.begin(), r.violations.end(), std::back_inserter(summary.violations));
  }
  return summary;
}

bool accuracy_monotone_check(std::size_t n, SmoothingGamma gamma) {
  if (n == 0 || n > 5) throw DomainError("accuracy_monotone_check: n must be in 1..5");
  if (!(gamma.value() > -1.0) || gamma.value() == 0.0) {
    throw DomainError("accuracy_monotone_check: gamma must exceed -1 and be nonzero");
  }
  const std::uint64_t masks = std::uint64_t{1} << n;
  std::vector<std::int64_t> matches(masks);
  std::vector<double> averaged(masks);
  for (std::uint64_t y = 0; y < masks; ++y) {
    for (std::uint64_t p = 0; p < masks; ++p) {
      const auto set = from_masks(n, y, p);
      const auto c = contingency(set);
      matches[p] = c.tp + c.tn;
      averaged[p] = dsc_average(set, gamma);
    }
    for (std::uint64_t a = 0; a < masks; ++a) {
      for (std::uint64_t b = a + 1; b < masks; ++b) {
        const int by_accuracy = (matches[a] > matches[b]) - (matches[a] < matches[b]);
        if (by_accuracy != sign_with_tolerance(averaged[a] - averaged[b])) return false;
      }
    }
  }
  return true;
}

std::optional<double> count_metric(MetricId metric, const ContingencyCounts& c) {
  auto ratio = [](std::int64_t num, std::int64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  switch (metric) {
    case MetricId::kAccuracy:
      return ratio(c.tp + c.tn, c.n());
    case MetricId::kPrecision:
      return ratio(c.tp, c.tp + c.fp);
    case MetricId::kRecall:
      return ratio(c.tp, c.tp + c.fn);
    case MetricId::kDsc:
      return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
    default:
      throw DomainError("metric '" + std::string(to_string(metric)) +
                        "' is not defined on contingency counts");
  }
}

bool is_simpson_reversal(const PartitionedComparison& cmp, MetricId metric) {
  if (cmp.model1.size() != cmp.model0.size() || cmp.model1.empty()) return false;
  ContingencyCounts pooled1;
  ContingencyCounts pooled0;
  for (std::size_t g = 0; g < cmp.groups(); ++g) {
    const auto& a = cmp.model1[g];
    const auto& b = cmp.model0[g];
    const auto ma = count_metric(metric, a);
    const auto mb = count_metric(metric, b);
    if (!ma || !mb || !(*ma > *mb)) return false;
    pooled1.tp += a.tp;
    pooled1.fp += a.fp;
    pooled1.fn += a.fn;
    pooled1.tn += a.tn;
    pooled0.tp += b.tp;
    pooled0.fp += b.fp;
    pooled0.fn += b.fn;
    pooled0.tn += b.tn;
  }
  const auto p1 = count_metric(metric, pooled1);
  const auto p0 = count_metric(metric, pooled0);
  return p1 && p0 && *p1 < *p0;
}

void for_each_simpson_reversal(MetricId metric, const ReversalSearchBounds& bounds,
                               const std::function<bool(const PartitionedComparison&)>& visit) {
  if (metric != MetricId::kPrecision && metric != MetricId::kRecall) {
    throw DomainError("reversal search supports precision and recall");
  }
  if (bounds.groups < 1 || bounds.groups > 2) {
    throw DomainError("reversal search supports one or two groups");
  }
  if (bounds.max_count < 0) throw DomainError("reversal search: negative count bound");

  std::vector<ContingencyCounts> candidates;
  std::vector<double> values;
  for (std::int64_t tp = 0; tp <= bounds.max_count; ++tp) {
    for (std::int64_t other = 0; other <= bounds.max_count; ++other) {
      ContingencyCounts c;
      c.tp = tp;
      (metric == MetricId::kPrecision ? c.fp : c.fn) = other;
      if (auto v = count_metric(metric, c)) {
        candidates.push_back(c);
        values.push_back(*v);
      }
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> wins;
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    for (std::size_t b = 0; b < candidates.size(); ++b) {
      if (values[a] > values[b]) wins.emplace_back(a, b);
    }
  }

  PartitionedComparison cmp;
  if (bounds.groups == 1) {
    for (const auto& [a, b] : wins) {
      cmp.model1 = {candidates[a]};
      cmp.model0 = {candidates[b]};
      if (is_simpson_reversal(cmp, metric) && !visit(cmp)) return;
    }
    return;
  }

  for (const auto& [a1, b1] : wins) {
    const auto& m1g1 = candidates[a1];
    const auto& m0g1 = candidates[b1];
    for (const auto& [a2, b2] : wins) {
      const auto& m1g2 = candidates[a2];
      const auto& m0g2 = candidates[b2];
      // pooled comparison by cross-multiplication; both pooled denominators are positive
      const std::int64_t num1 = m1g1.tp + m1g2.tp;
      const std::int64_t num0 = m0g1.tp + m0g2.tp;
      const std::int64_t den1 = metric == MetricId::kPrecision
                                    ? m1g1.predicted_positive() + m1g2.predicted_positive()
                                    : m1g1.actual_positive() + m1g2.actual_positive();
      const std::int64_t den0 = metric == MetricId::kPrecision
                                    ? m0g1.predicted_positive() + m0g2.predicted_positive()
                                    : m0g1.actual_positive() + m0g2.actual_positive();
      if (num1 * den0 >= num0 * den1) continue;
      cmp.model1 = {m1g1, m1g2};
      cmp.model0 = {m0g1, m0g2};
      if (!visit(cmp)) return;
    }
  }
}

std::optional<PartitionedComparison> find_simpson_reversal(MetricId metric,
                                                           const ReversalSearchBounds& bounds) {
  std::optional<PartitionedComparison> found;
  for_each_simpson_reversal(metric, bounds, [&](const PartitionedComparison& cmp) {
    found = cmp;
    return false;
  });
  return found;
}

void write_witness(std::ostream& out, MetricId metric, const PartitionedComparison& cmp) {
  out << "# model group tp fp fn tn\n";
  out << "metric " << to_string(metric) << '\n';
  auto rows = [&](std::string_view model, const std::vector<ContingencyCounts>& groups) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& c = groups[g];
      out << model << '\t' << g + 1 << '\t' << c.tp << '\t' << c.fp << '\t' << c.fn << '\t'
          << c.tn << '\n';
    }
  };
  rows("M1", cmp.model1);
  rows("M0", cmp.model0);
}

PartitionedComparison parse_witness(std::istream& in, MetricId* metric_out) {
  PartitionedComparison cmp;
  std::string raw;
  std::size_t line = 0;
  bool have_metric = false;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.empty() || raw.front() == '#') continue;
    std::istringstream row(raw);
    std::string head;
    row >> head;
    if (head == "metric") {
      std::string name;
      row >> name;
      const auto id = parse_metric_id(name);
      if (metric_out) *metric_out = id;
      have_metric = true;
      continue;
    }
    std::size_t group = 0;
    ContingencyCounts c;
    if (!(row >> group >> c.tp >> c.fp >> c.fn >> c.tn) || group == 0 ||
        c.tp < 0 || c.fp < 0 || c.fn < 0 || c.tn < 0 || (head != "M1" && head != "M0")) {
      throw ParseError("witness line " + std::to_string(line) + ": malformed row");
    }
    auto& groups = head == "M1" ? cmp.model1 : cmp.model0;
    if (groups.size() != group - 1) {
      throw ParseError("witness line " + std::to_string(line) + ": groups out of order");
    }
    groups.push_back(c);
  }
  if (!have_metric) throw ParseError("witness: missing 'metric' line");
  if (cmp.model1.size() != cmp.model0.size() || cmp.model1.empty()) {
    throw ParseError("witness: both models need the same, nonzero number of groups");
  }
  return cmp;
}

double CensusReport::strict_fraction() const {
  const auto denom = evaluable();
  return denom == 0 ? 0.0 : static_cast<double>(strict_reversals) / static_cast<double>(denom);
}

CensusReport reversal_census(std::size_t n, MetricId metric, SmoothingGamma gamma_agg,
                             SmoothingGamma gamma_avg, const CensusOptions& options) {
  if (!is_binary_metric(metric)) {
    throw DomainError("census supports accuracy, precision, recall and dsc");
  }
  if (n == 0 || n > 63) throw DomainError("census: n must be in 1..63");
  CensusReport report;
  report.metric = metric;
  report.n = n;
  const std::uint64_t masks = std::uint64_t{1} << n;

  if (n <= 4) {
    std::vector<CensusPoint> points(masks);
    for (std::uint64_t y = 0; y < masks; ++y) {
      for (std::uint64_t p = 0; p < masks; ++p) {
        points[p] = census_point(metric, from_masks(n, y, p), gamma_agg, gamma_avg);
      }
      for (std::uint64_t a = 0; a < masks; ++a) {
        for (std::uint64_t b = 0; b < masks; ++b) {
          if (a != b) tally(report, points[a], points[b]);
        }
      }
    }
    return report;
  }

  report.sampled = true;
  std::mt19937_64 engine(options.seed);
  const std::uint64_t low = masks - 1;
  for (std::size_t s = 0; s < options.samples; ++s) {
    const std::uint64_t y = engine() & low;
    const std::uint64_t a = engine() & low;
    std::uint64_t b = engine() & low;
    while (b == a) b = engine() & low;
    tally(report, census_point(metric, from_masks(n, y, a), gamma_agg, gamma_avg),
          census_point(metric, from_masks(n, y, b), gamma_agg, gamma_avg));
  }
  return report;
}

void write_violations_csv(std::ostream& out, const std::vector<Violation>& violations) {
  out << "identity,y,yhat,gamma,lhs,rhs,note\n";
  for (const auto& v : violations) {
    out << to_string(v.identity) << ',' << v.y << ',' << v.yhat << ',' << format_real(v.gamma)
        << ',' << format_real(v.lhs) << ',' << format_real(v.rhs) << ",\"" << v.note << "\"\n";
  }
}

void write_census_csv(std::ostream& out, const CensusReport& r) {
  out << "metric,n,sampled,pairs,skipped,evaluable,strict_reversals,both_zero,strict_fraction\n";
  out << to_string(r.metric) << ',' << r.n << ',' << (r.sampled ? "true" : "false") << ','
      << r.pairs << ',' << r.skipped << ',' << r.evaluable() << ',' << r.strict_reversals << ','
      << r.both_zero << ',' << format_real(r.strict_fraction()) << '\n';
}

}  // namespace simpson
