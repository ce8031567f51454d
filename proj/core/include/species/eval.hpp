#pragma once

#include <map>
#include <utility>

#include "species/analysis.hpp"
#include "species/series.hpp"
#include "species/system.hpp"

namespace species {

enum class SeriesKind { EGF, OGF };

inline const char* to_string(SeriesKind k) { return k == SeriesKind::EGF ? "egf" : "ogf"; }

/// Evaluates the labeled or unlabeled counting series of an expression, given
/// series for the unknowns. Unlabeled evaluation substitutes the unknowns at
/// powers of z internally, so the environment holds plain prefixes only.
///
/// Throws DomainError("CompositionUndefined") when an uncapped constructor
/// receives a series with nonzero constant term.
template <class R>
class SeriesEvaluator {
 public:
  using Ring = RingTraits<R>;

  SeriesEvaluator(const SystemSpec& sys, SeriesKind kind, const std::vector<Series<R>>& env)
      : sys_(sys), kind_(kind), env_(env) {}

  Series<R> eval(const ExprPtr& e, std::size_t order) {
    if (order == 0) return Series<R>(0);
    auto key = std::make_pair(e.get(), order);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Series<R> v = compute(e, order);
    memo_.emplace(std::move(key), v);
    return v;
  }

 private:
  static Series<R> one_series(std::size_t ord) {
    return Series<R>::constant(Ring::one(), ord);
  }

  Series<R> compute(const ExprPtr& e, std::size_t ord) {
    switch (e->kind()) {
      case NodeKind::Zero: return Series<R>(ord);
      case NodeKind::One: return one_series(ord);
      case NodeKind::Atom: return Series<R>::variable(ord);
      case NodeKind::Ref: {
        int i = sys_.index_of(e->name());
        if (i < 0) throw DomainError("UnboundName", "no series bound to '" + e->name() + "'");
        return env_[static_cast<std::size_t>(i)].zero_extended(ord).truncated(ord);
      }
      case NodeKind::Sum: {
        Series<R> acc(ord);
        for (const auto& k : e->kids()) acc = add(acc, eval(k, ord));
        return acc;
      }
      case NodeKind::Prod: {
        Series<R> acc = one_series(ord);
        for (const auto& k : e->kids()) acc = mul(acc, eval(k, ord), ord);
        return acc;
      }
      case NodeKind::Seq: return eval_seq(e, ord);
      case NodeKind::Set:
      case NodeKind::Cyc: return eval_polya(e, ord);
      case NodeKind::PSet: return eval_pset(e, ord);
      case NodeKind::Integral: return integrate(eval(e->child(), ord > 0 ? ord - 1 : 0)).zero_extended(ord);
    }
    return Series<R>(ord);
  }

  // child(z^k) mod z^ord; k = 1 returns the child directly.
  Series<R> child_at_power(const ExprPtr& child, std::size_t k, std::size_t ord) {
    if (k == 1) return eval(child, ord);
    std::size_t need = (ord + k - 1) / k;
    return subst_power(eval(child, need), k, ord);
  }

  Series<R> eval_seq(const ExprPtr& e, std::size_t ord) {
    Series<R> a = eval(e->child(), ord);
    Series<R> out(ord);
    for (const auto& iv : e->card().intervals()) {
      if (iv.hi == CardConstraint::kInf) {
        if (!Ring::is_zero(a[0]))
          throw DomainError("CompositionUndefined",
                            "unbounded Seq over a class with size-0 structures");
        Series<R> tail = inv(sub(one_series(ord), a));
        if (iv.lo > 0) tail = mul(power(a, iv.lo, ord), tail, ord);
        out = add(out, tail);
      } else {
        Series<R> p = power(a, iv.lo, ord);
        Series<R> s = p;
        for (std::uint64_t l = iv.lo; l < iv.hi; ++l) {
          p = mul(p, a, ord);
          s = add(s, p);
        }
        out = add(out, s);
      }
    }
    return out;
  }

  // u-polynomial coefficients (index = cardinality) of the bivariate form of
  // Set/Cyc, truncated at u^lmax. Handles size-0 members of the child.
  std::vector<Series<R>> bivariate(const ExprPtr& e, std::size_t ord, std::uint64_t lmax) {
    const ExprPtr& child = e->child();
    Series<R> a = eval(child, ord);
    auto arg_at = [&](std::size_t k) -> Series<R> {
      if (kind_ == SeriesKind::OGF) return child_at_power(child, k, ord);
      // labeled: only the k = 1 slot carries z; deeper slots see the size-0 count
      return k == 1 ? a : Series<R>::constant(a[0], ord);
    };
    std::vector<Series<R>> out(static_cast<std::size_t>(lmax) + 1, Series<R>(ord));
    if (e->is(NodeKind::Set)) {
      // exp of P(u) = sum_k u^k g_k / k via E_t = (1/t) sum_j j P_j E_{t-j}
      std::vector<Series<R>> p(lmax + 1, Series<R>(ord));
      for (std::size_t k = 1; k <= lmax; ++k)
        p[k] = scale(arg_at(k), Ring::div(Ring::one(), Ring::from_long(static_cast<long>(k))));
      out[0] = one_series(ord);
      for (std::size_t t = 1; t <= lmax; ++t) {
        Series<R> acc(ord);
        for (std::size_t j = 1; j <= t; ++j)
          acc = add(acc, scale(mul(p[j], out[t - j], ord), Ring::from_long(static_cast<long>(j))));
        out[t] = scale(acc, Ring::div(Ring::one(), Ring::from_long(static_cast<long>(t))));
      }
    } else {
      // sum_k phi(k)/k sum_{j>=1, kj<=lmax} u^{kj} g_k^j / j
      for (std::size_t k = 1; k <= lmax; ++k) {
        R fk = Ring::div(Ring::from_long(static_cast<long>(euler_phi(k))),
                         Ring::from_long(static_cast<long>(k)));
        Series<R> gk = arg_at(k);
        Series<R> pw = one_series(ord);
        for (std::size_t j = 1; k * j <= lmax; ++j) {
          pw = mul(pw, gk, ord);
          R coef = fk * Ring::div(Ring::one(), Ring::from_long(static_cast<long>(j)));
          ++tl_ring_mul_count;
          out[k * j] = add(out[k * j], scale(pw, coef));
        }
      }
    }
    return out;
  }

  // Full (cardinality-unconstrained) Set or Cyc over a zero-constant child.
  Series<R> full_polya(const ExprPtr& e, std::size_t ord) {
    const ExprPtr& child = e->child();
    if (e->is(NodeKind::Set)) {
      Series<R> arg(ord);
      if (kind_ == SeriesKind::EGF) {
        arg = eval(child, ord);
      } else {
        for (std::size_t k = 1; k < std::max<std::size_t>(ord, 2); ++k) {
          Series<R> gk = child_at_power(child, k, ord);
          arg = add(arg, scale(gk, Ring::div(Ring::one(), Ring::from_long(static_cast<long>(k)))));
        }
      }
      return exp(arg);
    }
    // Cyc
    Series<R> acc(ord);
    std::size_t kmax = kind_ == SeriesKind::EGF ? 1 : std::max<std::size_t>(ord - 1, 1);
    for (std::size_t k = 1; k <= kmax; ++k) {
      Series<R> gk = child_at_power(child, k, ord);
      Series<R> l = negate(log(sub(one_series(ord), gk)));
      R fk = Ring::div(Ring::from_long(static_cast<long>(euler_phi(k))),
                       Ring::from_long(static_cast<long>(k)));
      acc = add(acc, scale(l, fk));
    }
    return acc;
  }

  Series<R> eval_polya(const ExprPtr& e, std::size_t ord) {
    Series<R> a = eval(e->child(), ord);
    Series<R> out(ord);
    // bivariate block shared by all capped intervals and unbounded lower ends
    std::uint64_t lmax = 0;
    bool need_biv = false;
    for (const auto& iv : e->card().intervals()) {
      if (iv.hi != CardConstraint::kInf) {
        lmax = std::max(lmax, iv.hi);
        need_biv = true;
      } else if (iv.lo > 0) {
        lmax = std::max(lmax, iv.lo - 1);
        need_biv = true;
      }
    }
    std::vector<Series<R>> biv;
    if (need_biv) biv = bivariate(e, ord, lmax);
    for (const auto& iv : e->card().intervals()) {
      if (iv.hi == CardConstraint::kInf) {
        if (!Ring::is_zero(a[0]))
          throw DomainError("CompositionUndefined",
                            "unbounded constructor over a class with size-0 structures");
        Series<R> t = full_polya(e, ord);
        for (std::uint64_t l = 0; l < iv.lo; ++l) t = sub(t, biv[static_cast<std::size_t>(l)]);
        out = add(out, t);
      } else {
        for (std::uint64_t l = iv.lo; l <= iv.hi; ++l)
          out = add(out, biv[static_cast<std::size_t>(l)]);
      }
    }
    return out;
  }

  Series<R> eval_pset(const ExprPtr& e, std::size_t ord) {
    const ExprPtr& child = e->child();
    Series<R> a = eval(child, ord);
    Series<R> arg(ord);
    if (kind_ == SeriesKind::EGF) {
      arg = sub(a, subst_power(a, 2, ord));  // constant terms cancel
    } else {
      if (!Ring::is_zero(a[0]))
        throw DomainError("CompositionUndefined",
                          "PSet over a class with size-0 structures (unlabeled)");
      bool plus = true;
      for (std::size_t k = 1; k < std::max<std::size_t>(ord, 2); ++k) {
        Series<R> gk = child_at_power(child, k, ord);
        R c = Ring::div(Ring::one(), Ring::from_long(static_cast<long>(k)));
        arg = add(arg, scale(gk, plus ? c : -c));
        plus = !plus;
      }
    }
    Series<R> out = exp(arg);
    if (!e->card().contains(0)) out.at(0) = out[0] - Ring::one();  // drop the empty set
    return out;
  }

  const SystemSpec& sys_;
  SeriesKind kind_;
  const std::vector<Series<R>>& env_;
  std::map<std::pair<const Expr*, std::size_t>, Series<R>> memo_;
};

/// EGF of expr mod z^N for the given environment.
template <class R>
Series<R> egf_eval(const SystemSpec& sys, const ExprPtr& e, const std::vector<Series<R>>& env,
                   std::size_t n) {
  return SeriesEvaluator<R>(sys, SeriesKind::EGF, env).eval(e, n);
}

/// OGF of expr mod z^N; the environment holds plain prefixes, values at
/// powers are derived by substitution.
template <class R>
Series<R> ogf_eval(const SystemSpec& sys, const ExprPtr& e, const std::vector<Series<R>>& env,
                   std::size_t n) {
  return SeriesEvaluator<R>(sys, SeriesKind::OGF, env).eval(e, n);
}

}  // namespace species
