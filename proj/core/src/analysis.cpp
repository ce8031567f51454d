#include "species/analysis.hpp"

#include <functional>

#include "species/errors.hpp"
#include "species/symbolic.hpp"

namespace species {

namespace {

constexpr std::uint64_t kSat = UINT64_MAX;  // saturation cap, doubles as marker

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSat - b ? kSat : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSat / b ? kSat : a * b;
}

std::uint64_t sat_pow(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) r = sat_mul(r, a);
  return r;
}

// C(a + k - 1, k): multisets of size k over a types.
std::uint64_t sat_multiset(std::uint64_t a, std::uint64_t k) {
  if (k == 0) return 1;
  if (a == 0) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    std::uint64_t f = a > kSat - i ? kSat : a + i;
    r = sat_mul(r, f);
    if (r == kSat) return kSat;
    r /= (i + 1);  // exact: a product of j consecutive integers is divisible by j!
  }
  return r;
}

std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t result = n;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

// Necklaces of length l over a bead types: (1/l) sum_{d|l} phi(d) a^{l/d}.
std::uint64_t sat_necklaces(std::uint64_t a, std::uint64_t l) {
  if (l == 0) return 0;
  std::uint64_t total = 0;
  for (std::uint64_t d = 1; d <= l; ++d) {
    if (l % d != 0) continue;
    total = sat_add(total, sat_mul(euler_phi(d), sat_pow(a, l / d)));
    if (total == kSat) return kSat;
  }
  return total / l;
}

// Number of size-0 structures of e with unknowns valued by v and atoms by 0.
std::uint64_t count0(const SystemSpec& sys, const ExprPtr& e,
                     const std::vector<std::uint64_t>& v) {
  switch (e->kind()) {
    case NodeKind::Zero: return 0;
    case NodeKind::One: return 1;
    case NodeKind::Atom: return 0;
    case NodeKind::Ref: {
      int i = sys.index_of(e->name());
      return i < 0 ? 0 : v[static_cast<std::size_t>(i)];
    }
    case NodeKind::Sum: {
      std::uint64_t s = 0;
      for (const auto& k : e->kids()) s = sat_add(s, count0(sys, k, v));
      return s;
    }
    case NodeKind::Prod: {
      std::uint64_t p = 1;
      for (const auto& k : e->kids()) p = sat_mul(p, count0(sys, k, v));
      return p;
    }
    case NodeKind::Seq:
    case NodeKind::Set:
    case NodeKind::Cyc: {
      std::uint64_t a = count0(sys, e->child(), v);
      if (a == 0) return e->card().contains(0) ? 1 : 0;
      if (e->card().unbounded())
        throw DomainError("CompositionUndefined",
                          "unbounded constructor over a class with size-0 structures: " +
                              to_string(e));
      std::uint64_t total = 0;
      for (const auto& iv : e->card().intervals())
        for (std::uint64_t l = iv.lo; l <= iv.hi; ++l) {
          std::uint64_t t = e->is(NodeKind::Seq)   ? sat_pow(a, l)
                            : e->is(NodeKind::Set) ? sat_multiset(a, l)
                                                   : sat_necklaces(a, l);
          total = sat_add(total, t);
        }
      return total;
    }
    case NodeKind::PSet: {
      std::uint64_t a = count0(sys, e->child(), v);
      std::uint64_t all = a >= 64 ? kSat : (std::uint64_t{1} << a);  // subsets of a types
      return e->card().contains(0) ? all : all - 1;
    }
    case NodeKind::Integral: return 0;  // every structure contains the minimum atom
  }
  return 0;
}

std::vector<std::uint64_t> iterate_count0(const SystemSpec& sys, std::size_t rounds) {
  std::vector<std::uint64_t> v(sys.size(), 0);
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<std::uint64_t> next(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) next[i] = count0(sys, sys.equations[i].rhs, v);
    v = std::move(next);
  }
  for (std::uint64_t c : v)
    if (c == kSat)
      throw DomainError("ConstantTermOverflow", "size-0 structure count exceeds the 64-bit cap");
  return v;
}

struct Stripped {
  ExprPtr rest;         // e minus its size-0 structures
  std::uint64_t count;  // how many were removed
};

ExprPtr repeat_guarded(const ExprPtr& e, std::uint64_t n) {
  if (n > 256)
    throw DomainError("ConstantTermOverflow", "companion construction needs " +
                                                  std::to_string(n) + " copies of a subterm");
  return repeated(e, n);
}

// Decompose e = rest + count * 1 at (Z,Y)=(0,0), keeping rest a plain
// expression (no subtraction nodes).
Stripped strip0(const SystemSpec& sys, const ExprPtr& e) {
  std::uint64_t total = count0(sys, e, std::vector<std::uint64_t>(sys.size(), 0));
  if (total == 0) return {e, 0};
  if (total == kSat)
    throw DomainError("ConstantTermOverflow", "size-0 structure count exceeds the 64-bit cap");
  switch (e->kind()) {
    case NodeKind::One: return {zero(), 1};
    case NodeKind::Sum: {
      std::vector<ExprPtr> rests;
      std::uint64_t c = 0;
      for (const auto& k : e->kids()) {
        Stripped s = strip0(sys, k);
        rests.push_back(s.rest);
        c = sat_add(c, s.count);
      }
      return {sum(std::move(rests)), c};
    }
    case NodeKind::Prod: {
      // fold pairwise: (a + x)(b + y) = (ab + xb + ya) + xy
      Stripped acc = strip0(sys, e->kids()[0]);
      for (std::size_t i = 1; i < e->kids().size(); ++i) {
        Stripped nxt = strip0(sys, e->kids()[i]);
        ExprPtr rest = sum({prod({acc.rest, nxt.rest}),
                            repeat_guarded(nxt.rest, acc.count),
                            repeat_guarded(acc.rest, nxt.count)});
        acc = {std::move(rest), sat_mul(acc.count, nxt.count)};
      }
      return acc;
    }
    case NodeKind::Seq:
    case NodeKind::Set: {
      Stripped ch = strip0(sys, e->child());
      bool is_seq = e->is(NodeKind::Seq);
      if (ch.count == 0) {
        // only the empty structure has size 0
        ExprPtr rest = is_seq ? seq(ch.rest, e->card().without_zero())
                              : set_of(ch.rest, e->card().without_zero());
        return {std::move(rest), 1};
      }
      // bounded constraint (unbounded would have tripped count0): expand
      std::vector<ExprPtr> rests;
      std::uint64_t c = 0;
      for (const auto& iv : e->card().intervals())
        for (std::uint64_t l = iv.lo; l <= iv.hi; ++l) {
          if (is_seq) {
            // (x + a)^l, ordered members
            std::uint64_t binom = 1;
            for (std::uint64_t j = 1; j <= l; ++j) {
              binom = sat_mul(binom, l - j + 1) / j;
              std::uint64_t mult = sat_mul(binom, sat_pow(ch.count, l - j));
              rests.push_back(repeat_guarded(power(ch.rest, j), mult));
            }
            c = sat_add(c, sat_pow(ch.count, l));
          } else {
            // sets of l members, j of them of positive size
            for (std::uint64_t j = 1; j <= l; ++j) {
              std::uint64_t mult = sat_multiset(ch.count, l - j);
              rests.push_back(
                  repeat_guarded(set_of(ch.rest, CardConstraint::exactly(j)), mult));
            }
            c = sat_add(c, sat_multiset(ch.count, l));
          }
        }
      return {sum(std::move(rests)), c};
    }
    case NodeKind::Cyc:
      throw DomainError("UnsupportedCompanion",
                        "cycle over a class with size-0 structures: " + to_string(e));
    case NodeKind::PSet: {
      Stripped ch = strip0(sys, e->child());
      if (ch.count == 0) return {pset_nonempty(ch.rest), 1};
      throw DomainError("UnsupportedCompanion",
                        "PSet over a class with size-0 structures: " + to_string(e));
    }
    default:
      throw DomainError("UnsupportedCompanion", "cannot strip size-0 part of " + to_string(e));
  }
}

}  // namespace

bool BoolMatrix::is_zero() const {
  for (char c : a_)
    if (c) return false;
  return true;
}

BoolMatrix BoolMatrix::mul(const BoolMatrix& x, const BoolMatrix& y) {
  BoolMatrix r(x.n_);
  for (std::size_t i = 0; i < x.n_; ++i)
    for (std::size_t k = 0; k < x.n_; ++k)
      if (x.get(i, k))
        for (std::size_t j = 0; j < x.n_; ++j)
          if (y.get(k, j)) r.set(i, j, true);
  return r;
}

bool BoolMatrix::nilpotent(int* order) const {
  // repeated squaring up to an exponent >= dim decides the test
  BoolMatrix p = *this;
  std::size_t e = 1;
  while (e < n_ && !p.is_zero()) {
    p = mul(p, p);
    e *= 2;
  }
  if (!p.is_zero()) return false;
  if (order) {
    BoolMatrix q = *this;
    int k = 1;
    while (!q.is_zero()) {
      q = mul(q, *this);
      ++k;
    }
    *order = k;
  }
  return true;
}

std::string to_string(WfReason r) {
  switch (r) {
    case WfReason::None: return "None";
    case WfReason::ZeroCoordinate: return "ZeroCoordinate";
    case WfReason::JacobianNotNilpotentAt0: return "JacobianNotNilpotentAt0";
    case WfReason::CompanionNotWFAt0: return "CompanionNotWFAt0";
    case WfReason::NotPartiallyPolynomialInMarker: return "NotPartiallyPolynomialInMarker";
    case WfReason::IntegralAlgebraicPartNotPolynomial: return "IntegralAlgebraicPartNotPolynomial";
    case WfReason::IntegralTailNotPolynomial: return "IntegralTailNotPolynomial";
  }
  return "?";
}

bool nonzero_eval(const SystemSpec& sys, const ExprPtr& e, const NonzeroProfile& profile,
                  const SortValuation& sorts) {
  switch (e->kind()) {
    case NodeKind::Zero: return false;
    case NodeKind::One: return true;
    case NodeKind::Atom: return sorts.nonzero(e->name());
    case NodeKind::Ref: {
      int i = sys.index_of(e->name());
      return i >= 0 && profile[static_cast<std::size_t>(i)];
    }
    case NodeKind::Sum:
      for (const auto& k : e->kids())
        if (nonzero_eval(sys, k, profile, sorts)) return true;
      return false;
    case NodeKind::Prod:
      for (const auto& k : e->kids())
        if (!nonzero_eval(sys, k, profile, sorts)) return false;
      return true;
    case NodeKind::Seq:
    case NodeKind::Set:
    case NodeKind::Cyc:
    case NodeKind::PSet:
      if (e->card().contains(0)) return true;  // the empty structure
      return nonzero_eval(sys, e->child(), profile, sorts);
    case NodeKind::Integral: return nonzero_eval(sys, e->child(), profile, sorts);
  }
  return false;
}

bool nonzero_eval(const SystemSpec& sys, const ExprPtr& e, const NonzeroProfile& profile,
                  bool atoms_zero) {
  return nonzero_eval(sys, e, profile,
                      atoms_zero ? SortValuation::all_zero() : SortValuation::all_nonzero());
}

NonzeroProfile iterate_profile(const SystemSpec& sys, const SortValuation& sorts,
                               std::size_t n) {
  NonzeroProfile profile(sys.size(), false);
  for (std::size_t r = 0; r < n; ++r) {
    NonzeroProfile next(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) {
      ExprPtr rhs = sys.equations[i].rhs;
      bool v = nonzero_eval(sys, rhs, profile, sorts);
      if (!v && sys.equations[i].integrand)
        v = nonzero_eval(sys, sys.equations[i].integrand, profile, sorts);
      next[i] = v;
    }
    profile = std::move(next);
  }
  return profile;
}

std::vector<int> zero_coordinates(const SystemSpec& sys) {
  NonzeroProfile p = iterate_profile(sys, SortValuation::all_nonzero(), sys.size());
  std::vector<int> out;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!p[i]) out.push_back(static_cast<int>(i));
  return out;
}

BoolMatrix bool_jacobian(const SystemSpec& sys, const NonzeroProfile& profile,
                         const SortValuation& sorts) {
  auto j = jacobian(sys);
  BoolMatrix b(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i)
    for (std::size_t k = 0; k < sys.size(); ++k)
      b.set(i, k, nonzero_eval(sys, j[i][k], profile, sorts));
  return b;
}

WellFoundedReport is_well_founded_at_zero(const SystemSpec& sys) {
  NonzeroProfile none(sys.size(), false);
  for (std::size_t i = 0; i < sys.size(); ++i)
    if (nonzero_eval(sys, sys.equations[i].rhs, none, SortValuation::all_zero()))
      throw DomainError("ConstantTermNonzero",
                        "H(0,0) != 0 in equation '" + sys.equations[i].name +
                            "'; use the general well-foundedness check");
  WellFoundedReport r;
  BoolMatrix j = bool_jacobian(sys, none, SortValuation::all_zero());
  if (!j.nilpotent(&r.nilpotence_order)) {
    r.reason = WfReason::JacobianNotNilpotentAt0;
    return r;
  }
  std::vector<int> zc = zero_coordinates(sys);
  if (!zc.empty()) {
    r.reason = WfReason::ZeroCoordinate;
    r.coordinate = zc.front();
    return r;
  }
  r.verdict = true;
  r.constant_term.assign(sys.size(), 0);
  return r;
}

SystemSpec companion_system(const SystemSpec& sys, std::vector<std::uint64_t>* counts) {
  SystemSpec k = sys;
  k.sorts.push_back(kCompanionMarker);
  if (counts) counts->clear();
  for (auto& eq : k.equations) {
    Stripped s = strip0(sys, eq.rhs);
    eq.rhs = sum({s.rest, repeat_guarded(atom(kCompanionMarker), s.count)});
    if (counts) counts->push_back(s.count);
  }
  return k;
}

namespace {

// True if the constructor node repeats members without an upper bound.
bool uncapped(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Seq:
    case NodeKind::Set:
    case NodeKind::Cyc:
    case NodeKind::PSet: return e.card().unbounded();
    default: return false;
  }
}

// Polynomiality of the solution under a sort valuation, allowing zero
// coordinates: prune them, then require (a) no uncapped constructor with a
// possibly-nonzero member class and (b) a nilpotent boolean Jacobian.
bool is_polynomial_impl(const SystemSpec& sys, const SortValuation& sorts) {
  NonzeroProfile profile = iterate_profile(sys, sorts, sys.size());
  std::function<bool(const ExprPtr&)> structurally_poly = [&](const ExprPtr& e) -> bool {
    if (uncapped(*e) && nonzero_eval(sys, e->child(), profile, sorts)) return false;
    for (const auto& kid : e->kids())
      if (!structurally_poly(kid)) return false;
    return true;
  };
  for (const auto& eq : sys.equations)
    if (!structurally_poly(eq.rhs)) return false;
  BoolMatrix j = bool_jacobian(sys, profile, sorts);
  for (std::size_t i = 0; i < sys.size(); ++i)
    for (std::size_t c = 0; c < sys.size(); ++c)
      if (!profile[c]) j.set(i, c, false);  // nothing flows through an empty coordinate
  return j.nilpotent();
}

// Can e produce a structure built from var-content alone? profile/sorts
// encode "the variable is nonzero, everything else is zero".
bool var_only_content(const SystemSpec& sys, const ExprPtr& e, const NonzeroProfile& profile,
                      const SortValuation& sorts) {
  return nonzero_eval(sys, e, profile, sorts);
}

bool polynomial_in_var(const SystemSpec& sys, const ExprPtr& e, const NonzeroProfile& profile,
                       const SortValuation& sorts) {
  if (uncapped(*e) && var_only_content(sys, e->child(), profile, sorts)) return false;
  for (const auto& kid : e->kids())
    if (!polynomial_in_var(sys, kid, profile, sorts)) return false;
  return true;
}

}  // namespace

bool is_polynomial(const SystemSpec& sys) {
  return is_polynomial_impl(sys, SortValuation::all_nonzero());
}

bool is_polynomial(const SystemSpec& sys, const SortValuation& sorts) {
  return is_polynomial_impl(sys, sorts);
}

bool polynomial_in_sort(const SystemSpec& sys, const ExprPtr& e, const std::string& sort) {
  return polynomial_in_var(sys, e, NonzeroProfile(sys.size(), false), SortValuation::only(sort));
}

bool polynomial_in_ref(const SystemSpec& sys, const ExprPtr& e, const std::string& name) {
  NonzeroProfile p(sys.size(), false);
  int i = sys.index_of(name);
  if (i >= 0) p[static_cast<std::size_t>(i)] = true;
  return polynomial_in_var(sys, e, p, SortValuation::all_zero());
}

bool is_partially_polynomial(const SystemSpec& sys, const std::string& marker) {
  // 1. the right-hand sides are polynomial in the marker sort
  for (const auto& eq : sys.equations)
    if (!polynomial_in_sort(sys, eq.rhs, marker)) return false;
  // 2. the system specialized to marker-only atoms has a polynomial solution
  SortValuation marker_only = SortValuation::only(marker);
  if (!is_polynomial_impl(sys, marker_only)) return false;
  // 3. Jacobian at (marker, 0, S0) nilpotent, S0 from iterating the
  //    specialized system
  NonzeroProfile s0 = iterate_profile(sys, marker_only, sys.size());
  if (!bool_jacobian(sys, s0, marker_only).nilpotent()) return false;
  // 4. polynomial dependence on every unknown with a nonzero specialized value
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (!s0[i]) continue;
    for (const auto& eq : sys.equations)
      if (!polynomial_in_ref(sys, eq.rhs, sys.equations[i].name)) return false;
  }
  return true;
}

WellFoundedReport is_well_founded(const SystemSpec& sys) {
  std::vector<std::uint64_t> counts;
  SystemSpec k = companion_system(sys, &counts);
  bool trivial_companion = true;
  for (std::uint64_t c : counts)
    if (c) trivial_companion = false;

  if (trivial_companion) {
    WellFoundedReport r = is_well_founded_at_zero(sys);
    return r;
  }

  WellFoundedReport inner = is_well_founded_at_zero(k);
  WellFoundedReport r;
  r.nilpotence_order = inner.nilpotence_order;
  if (!inner.verdict) {
    r.reason = WfReason::CompanionNotWFAt0;
    r.companion_detail = inner.reason;
    r.coordinate = inner.coordinate;
    return r;
  }
  if (!is_partially_polynomial(k, kCompanionMarker)) {
    r.reason = WfReason::NotPartiallyPolynomialInMarker;
    return r;
  }
  r.verdict = true;
  r.constant_term = constant_term_counts(sys);
  return r;
}

std::vector<std::uint64_t> constant_term_counts(const SystemSpec& sys) {
  return iterate_count0(sys, sys.size());
}

std::uint64_t size0_count(const SystemSpec& sys, const ExprPtr& e,
                          const std::vector<std::uint64_t>& v) {
  return count0(sys, e, v);
}

}  // namespace species
