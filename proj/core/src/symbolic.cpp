#include "species/symbolic.hpp"

#include <functional>

#include "species/errors.hpp"

namespace species {

namespace {

// Sum over i+j in [lo..hi] of  A^i * dA * A^j  -- all ways of marking one
// member of a sequence whose remaining length lies in [lo..hi].
ExprPtr marked_pairs(const ExprPtr& a, const ExprPtr& da, std::uint64_t lo, std::uint64_t hi) {
  std::vector<ExprPtr> terms;
  if (hi == CardConstraint::kInf) {
    // { i >= lo, any j }  +  { i < lo, j >= lo-i }
    terms.push_back(prod({seq(a, CardConstraint::at_least(lo)), da, seq(a)}));
    for (std::uint64_t i = 0; i < lo; ++i)
      terms.push_back(prod({power(a, i), da, seq(a, CardConstraint::at_least(lo - i))}));
  } else {
    for (std::uint64_t i = 0; i <= hi; ++i) {
      std::uint64_t jlo = lo > i ? lo - i : 0;
      terms.push_back(prod({power(a, i), da,
                            seq(a, CardConstraint::of({{jlo, hi - i}}))}));
    }
  }
  return sum(std::move(terms));
}

struct Var {
  bool is_sort;
  const std::string& name;
};

ExprPtr diff(const ExprPtr& e, const Var& v) {
  switch (e->kind()) {
    case NodeKind::Zero:
    case NodeKind::One:
      return zero();
    case NodeKind::Atom:
      return (v.is_sort && e->name() == v.name) ? one() : zero();
    case NodeKind::Ref:
      return (!v.is_sort && e->name() == v.name) ? one() : zero();
    case NodeKind::Sum: {
      std::vector<ExprPtr> kids;
      for (const auto& k : e->kids()) kids.push_back(diff(k, v));
      return sum(std::move(kids));
    }
    case NodeKind::Prod: {
      std::vector<ExprPtr> terms;
      for (std::size_t i = 0; i < e->kids().size(); ++i) {
        std::vector<ExprPtr> factors = e->kids();
        factors[i] = diff(factors[i], v);
        terms.push_back(prod(std::move(factors)));
      }
      return sum(std::move(terms));
    }
    case NodeKind::Seq: {
      ExprPtr da = diff(e->child(), v);
      if (da->is(NodeKind::Zero)) return zero();
      std::vector<ExprPtr> terms;
      for (const auto& iv : e->card().intervals()) {
        if (iv.hi == 0) continue;  // the empty sequence has no marked member
        std::uint64_t lo = iv.lo <= 1 ? 0 : iv.lo - 1;
        std::uint64_t hi = iv.hi == CardConstraint::kInf ? CardConstraint::kInf : iv.hi - 1;
        terms.push_back(marked_pairs(e->child(), da, lo, hi));
      }
      return sum(std::move(terms));
    }
    case NodeKind::Set: {
      ExprPtr da = diff(e->child(), v);
      if (da->is(NodeKind::Zero)) return zero();
      return prod({set_of(e->child(), e->card().shifted_down()), da});
    }
    case NodeKind::Cyc: {
      // breaking the cycle at the marked member leaves a sequence
      ExprPtr da = diff(e->child(), v);
      if (da->is(NodeKind::Zero)) return zero();
      return prod({seq(e->child(), e->card().shifted_down()), da});
    }
    case NodeKind::PSet: {
      // behaves as its own derivative, like Set
      ExprPtr da = diff(e->child(), v);
      if (da->is(NodeKind::Zero)) return zero();
      return prod({pset(e->child()), da});
    }
    case NodeKind::Integral:
      throw DomainError("IntegralDerivative",
                        "integral nodes are handled by the integral-system solver");
  }
  return zero();
}

}  // namespace

ExprPtr differentiate(const ExprPtr& e, const std::string& var) {
  return diff(e, Var{false, var});
}

ExprPtr differentiate_sort(const ExprPtr& e, const std::string& sort) {
  return diff(e, Var{true, sort});
}

std::vector<std::vector<ExprPtr>> jacobian(const SystemSpec& sys) {
  std::vector<std::vector<ExprPtr>> j(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    j[i].reserve(sys.size());
    for (std::size_t k = 0; k < sys.size(); ++k)
      j[i].push_back(differentiate(sys.equations[i].rhs, sys.equations[k].name));
  }
  return j;
}

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& bindings) {
  switch (e->kind()) {
    case NodeKind::Atom:
    case NodeKind::Ref: {
      auto it = bindings.find(e->name());
      return it == bindings.end() ? e : it->second;
    }
    case NodeKind::Sum:
    case NodeKind::Prod: {
      std::vector<ExprPtr> kids;
      for (const auto& k : e->kids()) kids.push_back(substitute(k, bindings));
      return e->kind() == NodeKind::Sum ? sum(std::move(kids)) : prod(std::move(kids));
    }
    case NodeKind::Seq: return seq(substitute(e->child(), bindings), e->card());
    case NodeKind::Set: return set_of(substitute(e->child(), bindings), e->card());
    case NodeKind::Cyc: return cyc(substitute(e->child(), bindings), e->card());
    case NodeKind::PSet: {
      ExprPtr child = substitute(e->child(), bindings);
      return e->card().contains(0) ? pset(std::move(child)) : pset_nonempty(std::move(child));
    }
    case NodeKind::Integral: return integral(substitute(e->child(), bindings));
    default: return e;
  }
}

}  // namespace species
