#pragma once

// Bias-eliminating smoothing constants for smoothed precision/recall and the
// closed forms of the averaged precision and DSC.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "simpson/binary.hpp"

namespace simpson {

inline constexpr double kIdentityTolerance = 1e-12;

enum class Theorem {
  kT1,            // averaged smoothed precision == aggregate smoothed precision
  kT2Precision,   // averaged smoothed precision == vanilla precision
  kT2Recall,      // averaged smoothed recall == vanilla recall
};

std::string_view to_string(Theorem theorem);

struct GammaSolution {
  double gamma = 0.0;
  Theorem theorem = Theorem::kT1;
  bool applicable = false;
  std::string reason;
};

// gamma* = -(n - sum yhat)/(n - 1). Not applicable for n == 1 or sum yhat < 2.
GammaSolution gamma_t1(const BinaryPredictionSet& set);
// gamma^P = sum yhat / n - 1. Always applicable.
GammaSolution gamma_precision_star(const BinaryPredictionSet& set);
// gamma^R = sum y / n - 1. Always applicable.
GammaSolution gamma_recall_star(const BinaryPredictionSet& set);

// 1 - FP / ((1 + gamma) n); exact 1 when FP == 0.
double precision_average_closed_form(const ContingencyCounts& counts, SmoothingGamma gamma);
// 1 - FN / ((1 + gamma) n); exact 1 when FN == 0.
double recall_average_closed_form(const ContingencyCounts& counts, SmoothingGamma gamma);
// 1 - (FP + FN) / ((1 + gamma) n); exact 1 when there are no mismatches.
double dsc_average_closed_form(const ContingencyCounts& counts, SmoothingGamma gamma);

// Unsmoothed precision written as 1 - FP/|P|. With no positive decisions
// there are no false positives and the value is 1, which is the reading the
// gamma^P identity needs for yhat == 0.
double vanilla_precision_identity_rhs(const ContingencyCounts& counts);
double vanilla_recall_identity_rhs(const ContingencyCounts& counts);

enum class IdentityId {
  kT1,
  kT2Precision,
  kT2Recall,
  kLemma1,
  kT3,
  kAccuracy,
};

// T1, T2, T2-recall, lemma1, T3, accuracy (case-insensitive).
IdentityId parse_identity_id(std::string_view name);
std::string_view to_string(IdentityId id);

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  bool holds = false;
};

IdentityReport make_identity_report(double lhs, double rhs);

// lhs: averaged form computed by direct per-sample summation.
// rhs: the aggregate form (T1), vanilla metric (T2), or closed form (lemma1, T3).
// gamma is ignored for the accuracy identity. Inadmissible gamma raises.
IdentityReport verify_identity(const BinaryPredictionSet& set, IdentityId id,
                               SmoothingGamma gamma);

// The gamma the identity is stated at, if the identity is tied to a solver.
// Returns a non-applicable solution for identities parameterized by a free gamma.
GammaSolution solution_for(const BinaryPredictionSet& set, IdentityId id);

// CSV: identity,n,sum_y,sum_yhat,gamma,lhs,rhs,residual,holds
void write_identity_csv_header(std::ostream& out);
void write_identity_csv_row(std::ostream& out, IdentityId id, const BinaryPredictionSet& set,
                            double gamma, const IdentityReport& report);

}  // namespace simpson
