#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "species/system.hpp"

namespace species {

/// Per-equation "known nonzero" flags; monotone under iteration.
using NonzeroProfile = std::vector<bool>;

/// Which atomic sorts count as nonzero in a boolean evaluation.
/// Empty list of exceptions means "all sorts nonzero".
struct SortValuation {
  bool default_nonzero = true;
  std::vector<std::string> exceptions;  // sorts with the opposite value

  bool nonzero(const std::string& sort) const {
    for (const auto& s : exceptions)
      if (s == sort) return !default_nonzero;
    return default_nonzero;
  }

  static SortValuation all_nonzero() { return {true, {}}; }
  static SortValuation all_zero() { return {false, {}}; }
  static SortValuation only(std::string sort) { return {false, {std::move(sort)}}; }
};

/// Square boolean matrix; entry (i,j) = "d H_i / d Y_j is nonzero under some
/// evaluation".
class BoolMatrix {
 public:
  explicit BoolMatrix(std::size_t n) : n_(n), a_(n * n, 0) {}

  std::size_t dim() const { return n_; }
  bool get(std::size_t i, std::size_t j) const { return a_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v) { a_[i * n_ + j] = v ? 1 : 0; }
  bool is_zero() const;

  static BoolMatrix mul(const BoolMatrix& x, const BoolMatrix& y);

  /// True iff some power up to dim() is zero; if so and order != nullptr,
  /// stores the least such power.
  bool nilpotent(int* order = nullptr) const;

 private:
  std::size_t n_;
  std::vector<char> a_;
};

enum class WfReason {
  None,
  ZeroCoordinate,
  JacobianNotNilpotentAt0,
  CompanionNotWFAt0,
  NotPartiallyPolynomialInMarker,
  // integral systems only
  IntegralAlgebraicPartNotPolynomial,
  IntegralTailNotPolynomial,
};

std::string to_string(WfReason r);

struct WellFoundedReport {
  bool verdict = false;
  WfReason reason = WfReason::None;
  int coordinate = -1;                       // offending equation for ZeroCoordinate
  WfReason companion_detail = WfReason::None;  // inner reason for CompanionNotWFAt0
  std::vector<std::uint64_t> constant_term;  // number of size-0 structures per coordinate
  int nilpotence_order = 0;                  // least p with J(0,0)^p = 0 when nilpotent
  std::string note;                          // distinct sub-check info (integral systems)
};

/// Sort name of the internally generated companion marker. Contains '#' so it
/// can never collide with a parsed identifier.
inline constexpr const char* kCompanionMarker = "Z#1";

/// True iff `e` denotes a nonzero class when each unknown Y_i is replaced by
/// a nonzero class (per `profile`, indexed like sys.equations) and atoms are
/// valued per `sorts`.
bool nonzero_eval(const SystemSpec& sys, const ExprPtr& e, const NonzeroProfile& profile,
                  const SortValuation& sorts);

/// Spec-level convenience: atoms_zero toggles all sorts at once.
bool nonzero_eval(const SystemSpec& sys, const ExprPtr& e, const NonzeroProfile& profile,
                  bool atoms_zero);

/// Profile after n rounds of  profile[i] <- nonzero(H_i) starting all-false.
NonzeroProfile iterate_profile(const SystemSpec& sys, const SortValuation& sorts, std::size_t n);

/// Indices whose solution coordinate is the empty class.
/// Pre: H(0,0)=0 and the boolean Jacobian at (0,0) nilpotent.
std::vector<int> zero_coordinates(const SystemSpec& sys);

/// Boolean Jacobian of the system under the given evaluation.
BoolMatrix bool_jacobian(const SystemSpec& sys, const NonzeroProfile& profile,
                         const SortValuation& sorts);

/// Characterization at 0. Pre: H(0,0) = 0, else throws
/// DomainError("ConstantTermNonzero").
WellFoundedReport is_well_founded_at_zero(const SystemSpec& sys);

/// Companion system: size-0 structures of each right-hand side are removed
/// and marked by the kCompanionMarker sort. counts, if non-null, receives the
/// number of size-0 structures of each H_i at (0,0).
SystemSpec companion_system(const SystemSpec& sys, std::vector<std::uint64_t>* counts = nullptr);

/// Does the solution have finitely many structures? Pre: H(0,0)=0 and
/// Jacobian at (0,0) nilpotent.
bool is_polynomial(const SystemSpec& sys);
bool is_polynomial(const SystemSpec& sys, const SortValuation& sorts);

/// Is the solution polynomial in the given marker sort?
/// Pre: system well founded at 0.
bool is_partially_polynomial(const SystemSpec& sys, const std::string& marker);

/// Structural test: no uncapped constructor whose members could consist of
/// the variable alone (such a constructor repeats variable-only content).
bool polynomial_in_sort(const SystemSpec& sys, const ExprPtr& e, const std::string& sort);
bool polynomial_in_ref(const SystemSpec& sys, const ExprPtr& e, const std::string& name);

/// Full well-foundedness decision (via the companion system when H(0,0) != 0).
WellFoundedReport is_well_founded(const SystemSpec& sys);

/// The vector H^m(0,0) of size-0 structure counts, computed with saturating
/// 64-bit arithmetic. Throws DomainError("ConstantTermOverflow") past the cap
/// and DomainError("CompositionUndefined") when a count is infinite.
std::vector<std::uint64_t> constant_term_counts(const SystemSpec& sys);

/// Size-0 structure count of one expression with the unknowns valued by v.
std::uint64_t size0_count(const SystemSpec& sys, const ExprPtr& e,
                          const std::vector<std::uint64_t>& v);

}  // namespace species
