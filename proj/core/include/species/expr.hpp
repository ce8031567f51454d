#pragma once

#include <memory>
#include <string>
#include <vector>

#include "species/card.hpp"

namespace species {

enum class NodeKind {
  Zero,
  One,
  Atom,      // an atomic sort (Z or a declared sort)
  Ref,       // reference to an equation of the enclosing system
  Sum,
  Prod,
  Seq,
  Set,
  Cyc,
  PSet,
  Integral,  // linear mode only
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree for combinatorial class descriptions.
/// Shared freely across threads; construct through the factory functions
/// below, which maintain the structural invariants (no unary sums/products,
/// no constructor over an empty cardinality set, ...).
class Expr {
 public:
  Expr(NodeKind k, std::string name, std::vector<ExprPtr> kids, CardConstraint card)
      : kind_(k), name_(std::move(name)), kids_(std::move(kids)), card_(std::move(card)) {}

  NodeKind kind() const { return kind_; }
  const std::string& name() const { return name_; }          // Atom / Ref
  const std::vector<ExprPtr>& kids() const { return kids_; }
  const ExprPtr& child() const { return kids_[0]; }          // unary constructors
  const CardConstraint& card() const { return card_; }       // Seq / Set / Cyc

  bool is(NodeKind k) const { return kind_ == k; }

 private:
  NodeKind kind_;
  std::string name_;
  std::vector<ExprPtr> kids_;
  CardConstraint card_;
};

// Factory functions; they simplify on the fly:
//   X+0 = X, X*0 = 0, X*1 = X, Seq_c(0) = [0 in c], Set_c(0) = [0 in c],
//   Cyc(0) = 0, PSet(0) = 1, constructors over an empty constraint = 0.
ExprPtr zero();
ExprPtr one();
ExprPtr atom(std::string sort);
ExprPtr ref(std::string name);
ExprPtr sum(std::vector<ExprPtr> terms);
ExprPtr prod(std::vector<ExprPtr> factors);
ExprPtr seq(ExprPtr child, CardConstraint c = CardConstraint::full());
ExprPtr set_of(ExprPtr child, CardConstraint c = CardConstraint::full());
ExprPtr cyc(ExprPtr child, CardConstraint c = CardConstraint::at_least(1));
ExprPtr pset(ExprPtr child);
ExprPtr pset_nonempty(ExprPtr child);  // PSet minus the empty set; internal use
ExprPtr integral(ExprPtr child);

ExprPtr repeated(const ExprPtr& e, std::uint64_t n);  // e + e + ... (n times)
ExprPtr power(const ExprPtr& e, std::uint64_t n);     // e * e * ... (n times)

bool structurally_equal(const Expr& a, const Expr& b);
std::string to_string(const Expr& e);
std::string to_string(const ExprPtr& e);

}  // namespace species
