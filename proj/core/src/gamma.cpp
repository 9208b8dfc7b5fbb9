#include "simpson/gamma.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

#include "simpson/error.hpp"
#include "simpson/io.hpp"

namespace simpson {
namespace {

double one_minus_penalty(std::int64_t penalized, std::int64_t n, double gamma) {
  if (penalized == 0) return 1.0;
  const double den = (1.0 + gamma) * static_cast<double>(n);
  if (den == 0.0) throw DomainError("closed form undefined at gamma=-1");
  return 1.0 - static_cast<double>(penalized) / den;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(Theorem theorem) {
  switch (theorem) {
    case Theorem::kT1:
      return "T1";
    case Theorem::kT2Precision:
      return "T2-precision";
    case Theorem::kT2Recall:
      return "T2-recall";
  }
  return "unknown";
}

GammaSolution gamma_t1(const BinaryPredictionSet& set) {
  const auto n = static_cast<std::int64_t>(set.size());
  const auto positives = set.sum_yhat();
  GammaSolution s{0.0, Theorem::kT1, false, {}};
  if (n == 1) {
    s.reason = "n = 1: the solution divides by n - 1";
    return s;
  }
  s.gamma = -static_cast<double>(n - positives) / static_cast<double>(n - 1);
  if (positives < 2) {
    s.reason = positives == 1
                   ? "sum yhat = 1 forces gamma = -1, where the averaged form is undefined"
                   : "sum yhat = 0: no positive decisions";
    return s;
  }
  s.applicable = true;
  return s;
}

GammaSolution gamma_precision_star(const BinaryPredictionSet& set) {
  const double rate = static_cast<double>(set.sum_yhat()) / static_cast<double>(set.size());
  return GammaSolution{rate - 1.0, Theorem::kT2Precision, true, {}};
}

GammaSolution gamma_recall_star(const BinaryPredictionSet& set) {
  const double rate = static_cast<double>(set.sum_y()) / static_cast<double>(set.size());
  return GammaSolution{rate - 1.0, Theorem::kT2Recall, true, {}};
}

double precision_average_closed_form(const ContingencyCounts& counts, SmoothingGamma gamma) {
  return one_minus_penalty(counts.fp, counts.n(), gamma.value());
}

double recall_average_closed_form(const ContingencyCounts& counts, SmoothingGamma gamma) {
  return one_minus_penalty(counts.fn, counts.n(), gamma.value());
}

double dsc_average_closed_form(const ContingencyCounts& counts, SmoothingGamma gamma) {
  return one_minus_penalty(counts.mismatches(), counts.n(), gamma.value());
}

double vanilla_precision_identity_rhs(const ContingencyCounts& counts) {
  if (counts.fp == 0) return 1.0;
  return 1.0 - static_cast<double>(counts.fp) / static_cast<double>(counts.predicted_positive());
}

double vanilla_recall_identity_rhs(const ContingencyCounts& counts) {
  if (counts.fn == 0) return 1.0;
  return 1.0 - static_cast<double>(counts.fn) / static_cast<double>(counts.actual_positive());
}

IdentityId parse_identity_id(std::string_view name) {
  const auto key = lower(name);
  if (key == "t1") return IdentityId::kT1;
  if (key == "t2" || key == "t2-precision") return IdentityId::kT2Precision;
  if (key == "t2-recall") return IdentityId::kT2Recall;
  if (key == "lemma1") return IdentityId::kLemma1;
  if (key == "t3") return IdentityId::kT3;
  if (key == "accuracy") return IdentityId::kAccuracy;
  throw DomainError("unknown identity id '" + std::string(name) + "'");
}

std::string_view to_string(IdentityId id) {
  switch (id) {
    case IdentityId::kT1:
      return "T1";
    case IdentityId::kT2Precision:
      return "T2-precision";
    case IdentityId::kT2Recall:
      return "T2-recall";
    case IdentityId::kLemma1:
      return "lemma1";
    case IdentityId::kT3:
      return "T3";
    case IdentityId::kAccuracy:
      return "accuracy";
  }
  return "unknown";
}

IdentityReport make_identity_report(double lhs, double rhs) {
  const double residual = std::abs(lhs - rhs);
  return IdentityReport{lhs, rhs, residual, residual <= kIdentityTolerance};
}

IdentityReport verify_identity(const BinaryPredictionSet& set, IdentityId id,
                               SmoothingGamma gamma) {
  const auto counts = contingency(set);
  switch (id) {
    case IdentityId::kT1:
      return make_identity_report(precision_smoothed_average(set, gamma),
                                  precision_smoothed_aggregate(set, gamma));
    case IdentityId::kT2Precision:
      return make_identity_report(precision_smoothed_average(set, gamma),
                                  vanilla_precision_identity_rhs(counts));
    case IdentityId::kT2Recall:
      return make_identity_report(recall_smoothed_average(set, gamma),
                                  vanilla_recall_identity_rhs(counts));
    case IdentityId::kLemma1:
      return make_identity_report(precision_smoothed_average(set, gamma),
                                  precision_average_closed_form(counts, gamma));
    case IdentityId::kT3:
      return make_identity_report(dsc_average(set, gamma),
                                  dsc_average_closed_form(counts, gamma));
    case IdentityId::kAccuracy:
      return make_identity_report(accuracy_average(set), accuracy(set));
  }
  throw DomainError("unknown identity");
}

GammaSolution solution_for(const BinaryPredictionSet& set, IdentityId id) {
  switch (id) {
    case IdentityId::kT1:
      return gamma_t1(set);
    case IdentityId::kT2Precision:
      return gamma_precision_star(set);
    case IdentityId::kT2Recall:
      return gamma_recall_star(set);
    default:
      return GammaSolution{0.0, Theorem::kT1, false, "identity takes a free gamma"};
  }
}

void write_identity_csv_header(std::ostream& out) {
  out << "identity,n,sum_y,sum_yhat,gamma,lhs,rhs,residual,holds\n";
}

void write_identity_csv_row(std::ostream& out, IdentityId id, const BinaryPredictionSet& set,
                            double gamma, const IdentityReport& report) {
  out << to_string(id) << ',' << set.size() << ',' << set.sum_y() << ',' << set.sum_yhat()
      << ',' << format_real(gamma) << ',' << format_real(report.lhs) << ','
      << format_real(report.rhs) << ',' << format_real(report.residual) << ','
      << (report.holds ? "true" : "false") << '\n';
}

}  // namespace simpson
