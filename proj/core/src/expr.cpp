#include "species/expr.hpp"

#include <stdexcept>

namespace species {

namespace {

ExprPtr make(NodeKind k, std::string name = {}, std::vector<ExprPtr> kids = {},
             CardConstraint card = {}) {
  return std::make_shared<const Expr>(k, std::move(name), std::move(kids), std::move(card));
}

const ExprPtr kZero = make(NodeKind::Zero);
const ExprPtr kOne = make(NodeKind::One);

}  // namespace

ExprPtr zero() { return kZero; }
ExprPtr one() { return kOne; }

ExprPtr atom(std::string sort) { return make(NodeKind::Atom, std::move(sort)); }
ExprPtr ref(std::string name) { return make(NodeKind::Ref, std::move(name)); }

ExprPtr sum(std::vector<ExprPtr> terms) {
  std::vector<ExprPtr> flat;
  for (auto& t : terms) {
    if (t->is(NodeKind::Zero)) continue;
    if (t->is(NodeKind::Sum))
      flat.insert(flat.end(), t->kids().begin(), t->kids().end());
    else
      flat.push_back(std::move(t));
  }
  if (flat.empty()) return zero();
  if (flat.size() == 1) return flat[0];
  return make(NodeKind::Sum, {}, std::move(flat));
}

ExprPtr prod(std::vector<ExprPtr> factors) {
  std::vector<ExprPtr> flat;
  for (auto& f : factors) {
    if (f->is(NodeKind::Zero)) return zero();
    if (f->is(NodeKind::One)) continue;
    if (f->is(NodeKind::Prod))
      flat.insert(flat.end(), f->kids().begin(), f->kids().end());
    else
      flat.push_back(std::move(f));
  }
  if (flat.empty()) return one();
  if (flat.size() == 1) return flat[0];
  return make(NodeKind::Prod, {}, std::move(flat));
}

ExprPtr seq(ExprPtr child, CardConstraint c) {
  if (c.empty()) return zero();
  if (child->is(NodeKind::Zero)) return c.contains(0) ? one() : zero();
  return make(NodeKind::Seq, {}, {std::move(child)}, std::move(c));
}

ExprPtr set_of(ExprPtr child, CardConstraint c) {
  if (c.empty()) return zero();
  if (child->is(NodeKind::Zero)) return c.contains(0) ? one() : zero();
  return make(NodeKind::Set, {}, {std::move(child)}, std::move(c));
}

ExprPtr cyc(ExprPtr child, CardConstraint c) {
  c = c.clamped_at_least(1);  // a cycle has at least one member
  if (c.empty() || child->is(NodeKind::Zero)) return zero();
  return make(NodeKind::Cyc, {}, {std::move(child)}, std::move(c));
}

ExprPtr pset(ExprPtr child) {
  if (child->is(NodeKind::Zero)) return one();  // only the empty set
  return make(NodeKind::PSet, {}, {std::move(child)}, CardConstraint::full());
}

ExprPtr pset_nonempty(ExprPtr child) {
  if (child->is(NodeKind::Zero)) return zero();
  return make(NodeKind::PSet, {}, {std::move(child)}, CardConstraint::at_least(1));
}

ExprPtr integral(ExprPtr child) {
  if (child->is(NodeKind::Zero)) return zero();
  return make(NodeKind::Integral, {}, {std::move(child)});
}

ExprPtr repeated(const ExprPtr& e, std::uint64_t n) {
  if (n > 4096) throw std::overflow_error("repeated sum too large");
  std::vector<ExprPtr> terms(static_cast<std::size_t>(n), e);
  return sum(std::move(terms));
}

ExprPtr power(const ExprPtr& e, std::uint64_t n) {
  if (n > 4096) throw std::overflow_error("power too large");
  std::vector<ExprPtr> factors(static_cast<std::size_t>(n), e);
  return prod(std::move(factors));
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind() || a.name() != b.name() || !(a.card() == b.card()) ||
      a.kids().size() != b.kids().size())
    return false;
  for (std::size_t i = 0; i < a.kids().size(); ++i)
    if (!structurally_equal(*a.kids()[i], *b.kids()[i])) return false;
  return true;
}

namespace {

void print(const Expr& e, std::string& out, int parent_prec) {
  // precedence: sum 0, prod 1, factor 2
  switch (e.kind()) {
    case NodeKind::Zero: out += "0"; return;
    case NodeKind::One: out += "1"; return;
    case NodeKind::Atom: out += e.name(); return;
    case NodeKind::Ref: out += e.name(); return;
    case NodeKind::Sum: {
      bool paren = parent_prec > 0;
      if (paren) out += "(";
      for (std::size_t i = 0; i < e.kids().size(); ++i) {
        if (i) out += " + ";
        print(*e.kids()[i], out, 1);
      }
      if (paren) out += ")";
      return;
    }
    case NodeKind::Prod: {
      bool paren = parent_prec > 1;
      if (paren) out += "(";
      for (std::size_t i = 0; i < e.kids().size(); ++i) {
        if (i) out += "*";
        print(*e.kids()[i], out, 2);
      }
      if (paren) out += ")";
      return;
    }
    case NodeKind::Seq:
    case NodeKind::Set:
    case NodeKind::Cyc: {
      out += e.kind() == NodeKind::Seq ? "Seq(" : e.kind() == NodeKind::Set ? "Set(" : "Cyc(";
      print(*e.child(), out, 0);
      CardConstraint shown = e.card();
      bool trivial = e.kind() == NodeKind::Cyc ? shown == CardConstraint::at_least(1)
                                               : shown.is_full();
      if (!trivial) {
        out += ", ";
        out += to_string(shown);
      }
      out += ")";
      return;
    }
    case NodeKind::PSet:
      out += "PSet(";
      print(*e.child(), out, 0);
      if (!e.card().is_full()) out += ", " + to_string(e.card());  // internal form
      out += ")";
      return;
    case NodeKind::Integral:
      out += "Int(";
      print(*e.child(), out, 0);
      out += ")";
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out, 0);
  return out;
}

std::string to_string(const ExprPtr& e) { return to_string(*e); }

}  // namespace species
