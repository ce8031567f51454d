#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "species/eval.hpp"
#include "species/system.hpp"

namespace species {

/// Inputs of a numeric evaluation of the counting series at a point.
struct EvalRequest {
  SeriesKind kind = SeriesKind::EGF;
  double point = 0.0;  // alpha >= 0
  double eps = 1e-10;
  int max_iter = 200;
  int powers = 4;                // K: values kept at alpha^1..alpha^K (unlabeled path)
  std::optional<double> radius;  // hint: a point inside the dominant system's disk
};

/// Numeric state of the unlabeled-series evaluation.
struct EvalState {
  std::vector<std::vector<double>> values_at_powers;  // [k-1] = vector at alpha^k, k=1..K
  std::vector<double> values;                         // at alpha
  std::vector<Series<double>> tail_series;            // solution prefix used for k > K
  int tail_length = 0;                                // L: cut of the power sums
  int iterations = 0;
  int truncation_order = 0;                           // M cap of the prefix
  bool converged = false;
};

/// Labeled-series value by the numeric Newton iteration started at 0.
/// Stops when both the update and the residual drop below eps.
std::vector<double> egf_value(const SystemSpec& sys, double alpha, double eps,
                              int max_iter = 200,
                              std::vector<std::vector<double>>* trace = nullptr);

/// Structural flat majorant: Set -> Seq, Cyc -> nonempty Seq, PSet -> Seq.
SystemSpec dominant_system(const SystemSpec& sys);

bool is_flat(const SystemSpec& sys);  // no Set/Cyc/PSet anywhere

/// Number of initial coefficients of the dominant system's series needed so
/// that the tail past them weighs less than eps at rho.
int truncation_order(const SystemSpec& sys, double rho, double eps);

enum class PolyaKind { Set, Cyc, PSet };

struct TailBound {
  int length;    // L
  double bound;  // gap between the upper and lower estimate at L
};

/// Smallest L for which the power-sum tail past L is provably below eps.
/// `values(k)` must return the member series value at alpha^k.
/// Throws DomainError("CycDivergent") for cycles when values(1) >= 1.
TailBound polya_tail_length(PolyaKind kind, const std::function<double(int)>& values,
                            double alpha, double eps, int lmax = 100000);

/// The gap estimates for L = 1..count (diagnostics; the acceptance suite
/// compares them against reference values).
std::vector<double> polya_tail_gaps(PolyaKind kind, const std::function<double(int)>& values,
                                    double alpha, int count);

/// Unlabeled-series values at alpha, alpha^2, ..., alpha^K by the hybrid
/// scheme: Newton on the value sequence for k <= K, a truncated series tail
/// for k > K, power sums cut at a certified length.
EvalState ogf_value(const SystemSpec& sys, const EvalRequest& req);

}  // namespace species
