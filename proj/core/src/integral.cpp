#include "species/integral.hpp"

#include <functional>

#include "species/errors.hpp"
#include "species/eval.hpp"
#include "species/solve.hpp"
#include "species/symbolic.hpp"

namespace species {

namespace {

// side = false: line up H parts; true: G parts (0 when absent)
std::vector<ExprPtr> parts(const SystemSpec& sys, bool integrand) {
  std::vector<ExprPtr> v;
  for (const auto& eq : sys.equations)
    v.push_back(integrand ? (eq.integrand ? eq.integrand : zero()) : eq.rhs);
  return v;
}

// Size-0 counts of the algebraic part alone: Y(0) solves Y = H(0, Y).
std::vector<std::uint64_t> algebraic_counts(const SystemSpec& sys) {
  SystemSpec h_only = sys;
  for (auto& eq : h_only.equations) eq.integrand = nullptr;
  return constant_term_counts(h_only);
}

// The first-derivative system  Q = dH/dY Q + dH/dZ + G  with the original
// unknowns turned into atomic sorts, so partial-polynomiality machinery can
// ask about them.
SystemSpec derivative_system(const SystemSpec& sys) {
  std::map<std::string, ExprPtr> to_sort;
  for (const auto& eq : sys.equations) to_sort[eq.name] = atom(eq.name);

  SystemSpec q;
  q.mode = Mode::Classical;
  q.sorts = sys.sorts;
  for (const auto& eq : sys.equations) q.sorts.push_back(eq.name);

  std::vector<ExprPtr> g = parts(sys, true);
  for (std::size_t i = 0; i < sys.size(); ++i) {
    std::vector<ExprPtr> terms;
    for (std::size_t k = 0; k < sys.size(); ++k) {
      ExprPtr a = differentiate(sys.equations[i].rhs, sys.equations[k].name);
      terms.push_back(prod({substitute(a, to_sort), ref("q#" + sys.equations[k].name)}));
    }
    terms.push_back(substitute(differentiate_sort(sys.equations[i].rhs, "Z"), to_sort));
    terms.push_back(substitute(g[i], to_sort));
    q.equations.push_back({"q#" + sys.equations[i].name, sum(std::move(terms)), nullptr});
  }
  return q;
}

using RatVec = std::vector<Series<Rat>>;
using RatMat = SeriesMatrix<Rat>;

RatMat eval_matrix_exprs(const SystemSpec& sys, const std::vector<std::vector<ExprPtr>>& m,
                         const RatVec& env, std::size_t ord) {
  SeriesEvaluator<Rat> ev(sys, SeriesKind::EGF, env);
  RatMat out(sys.size(), ord);
  for (std::size_t i = 0; i < sys.size(); ++i)
    for (std::size_t j = 0; j < sys.size(); ++j) out.at(i, j) = ev.eval(m[i][j], ord);
  return out;
}

RatVec eval_vector_exprs(const SystemSpec& sys, const std::vector<ExprPtr>& v, const RatVec& env,
                         std::size_t ord) {
  SeriesEvaluator<Rat> ev(sys, SeriesKind::EGF, env);
  RatVec out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(ev.eval(e, ord));
  return out;
}

RatMat matrix_derivative(const RatMat& m) {
  RatMat out(m.dim(), m.order() > 0 ? m.order() - 1 : 0);
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out.at(i, j) = derivative(m.at(i, j));
  return out;
}

RatMat matrix_integrate(const RatMat& m, std::size_t ord) {
  RatMat out(m.dim(), ord);
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      out.at(i, j) = integrate(m.at(i, j)).zero_extended(ord).truncated(ord);
  return out;
}

}  // namespace

WellFoundedReport check_integral_wf(const SystemSpec& sys) {
  WellFoundedReport r;
  NonzeroProfile none(sys.size(), false);

  // condition 1: Jacobian of the algebraic part nilpotent at (0,0)
  BoolMatrix j0(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i)
    for (std::size_t k = 0; k < sys.size(); ++k)
      j0.set(i, k,
             nonzero_eval(sys, differentiate(sys.equations[i].rhs, sys.equations[k].name),
                          none, SortValuation::all_zero()));
  if (!j0.nilpotent(&r.nilpotence_order)) {
    r.reason = WfReason::JacobianNotNilpotentAt0;
    return r;
  }

  std::vector<std::uint64_t> counts = algebraic_counts(sys);
  bool has_size0 = false;
  for (std::uint64_t c : counts)
    if (c) has_size0 = true;

  if (has_size0) {
    // condition 2(a): H(0,Y) polynomial with a nilpotent Jacobian everywhere
    std::map<std::string, ExprPtr> z_to_zero;
    for (const auto& s : sys.sorts) z_to_zero[s] = zero();
    SystemSpec h0 = sys;
    for (auto& eq : h0.equations) {
      eq.rhs = substitute(eq.rhs, z_to_zero);
      eq.integrand = nullptr;
    }
    NonzeroProfile all(sys.size(), true);
    bool ok = true;
    std::function<bool(const ExprPtr&)> poly = [&](const ExprPtr& e) -> bool {
      bool uncapped = (e->is(NodeKind::Seq) || e->is(NodeKind::Set) || e->is(NodeKind::Cyc) ||
                       e->is(NodeKind::PSet)) &&
                      e->card().unbounded();
      if (uncapped && nonzero_eval(h0, e->child(), all, SortValuation::all_nonzero()))
        return false;
      for (const auto& k : e->kids())
        if (!poly(k)) return false;
      return true;
    };
    for (const auto& eq : h0.equations) ok = ok && poly(eq.rhs);
    if (ok) ok = bool_jacobian(h0, all, SortValuation::all_nonzero()).nilpotent();
    if (!ok) {
      r.reason = WfReason::IntegralAlgebraicPartNotPolynomial;
      r.note = "H(0,Y) must be polynomial with a nilpotent Jacobian";
      return r;
    }

    // condition 2(b): the enriched-tree system must stay polynomial in every
    // unknown with a nonzero size-0 value
    SystemSpec q = derivative_system(sys);
    for (std::size_t i = 0; i < sys.size(); ++i) {
      if (counts[i] == 0) continue;
      if (!is_partially_polynomial(q, sys.equations[i].name)) {
        r.reason = WfReason::IntegralTailNotPolynomial;
        r.coordinate = static_cast<int>(i);
        r.note = "derivative system is not polynomial in " + sys.equations[i].name;
        return r;
      }
    }
  }

  r.verdict = true;
  r.constant_term = counts;
  return r;
}

std::vector<Series<Rat>> variation_of_constants(const RatMat& w, const RatMat& wbar,
                                                const RatVec& b, std::size_t n) {
  std::size_t inner = n > 0 ? n - 1 : 0;
  RatVec wb = mul(wbar.zero_extended(inner).truncated(inner), b, inner);
  RatVec integ;
  integ.reserve(wb.size());
  for (auto& s : wb) integ.push_back(integrate(s).zero_extended(n).truncated(n));
  return mul(w.zero_extended(n), integ, n);
}

RatMat refine_fundamental(const RatMat& a, const RatMat& w, const RatMat& wbar, std::size_t n) {
  std::size_t inner = n > 0 ? n - 1 : 0;
  RatMat aw = mul(a.zero_extended(inner).truncated(inner), w.zero_extended(inner), inner);
  RatMat g = sub(aw, matrix_derivative(w.zero_extended(n)));
  RatMat inner_m = mul(wbar.zero_extended(inner), g, inner);
  RatMat integ = matrix_integrate(inner_m, n);
  return add(w.zero_extended(n), mul(w.zero_extended(n), integ, n));
}

std::vector<Series<Rat>> solve_integral(const SystemSpec& sys, std::size_t n) {
  if (n == 0) return RatVec(sys.size(), Series<Rat>(0));
  std::size_t m = sys.size();
  std::vector<ExprPtr> hs = parts(sys, false), gs = parts(sys, true);
  std::vector<std::vector<ExprPtr>> jac_h(m), jac_g(m);
  std::vector<ExprPtr> dh_dz;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      jac_h[i].push_back(differentiate(hs[i], sys.equations[k].name));
      jac_g[i].push_back(differentiate(gs[i], sys.equations[k].name));
    }
    dh_dz.push_back(differentiate_sort(hs[i], "Z"));
  }
  std::vector<std::uint64_t> counts = algebraic_counts(sys);

  struct State {
    RatMat u, mfund, mbar;
    RatVec y;
  };

  std::function<State(std::size_t)> rec = [&](std::size_t target) -> State {
    if (target == 1) {
      RatVec y0 = detail::constants_from_counts<Rat>(counts, 1);
      RatMat j = eval_matrix_exprs(sys, jac_h, y0, 1);
      RatMat u = constant_inverse(sub(RatMat::identity(m, 1), j), 1);
      return {std::move(u), RatMat::identity(m, 1), RatMat::identity(m, 1), std::move(y0)};
    }
    std::size_t h = (target + 1) / 2;
    State s = rec(h);

    RatMat jh = eval_matrix_exprs(sys, jac_h, s.y, h);
    RatMat u = s.u.zero_extended(h);
    RatMat step = add(mul(jh, u, h), sub(RatMat::identity(m, h), u));
    u = add(u, mul(u, step, h));

    RatMat jg = eval_matrix_exprs(sys, jac_g, s.y, h);
    RatMat mf = s.mfund.zero_extended(h);
    RatMat mbar = s.mbar.zero_extended(h);
    {
      std::size_t inner = h - 1 > 0 ? h - 1 : h;
      RatMat kum = mul(mul(jg.truncated(inner), u.truncated(inner).zero_extended(inner), inner),
                       mf.zero_extended(inner), inner);
      RatMat g = sub(kum, matrix_derivative(mf));
      RatMat integ = matrix_integrate(mul(mbar.truncated(inner).zero_extended(inner), g, inner), h);
      mf = add(mf, mul(mf, integ, h));
    }
    mbar = add(mbar, mul(mbar, sub(RatMat::identity(m, h), mul(mf, mbar, h)), h));

    std::size_t inner = target - 1;
    RatVec sl = eval_vector_exprs(sys, dh_dz, s.y, inner);
    RatVec sg = eval_vector_exprs(sys, gs, s.y, inner);
    RatMat jh_full = eval_matrix_exprs(sys, jac_h, s.y, inner);
    RatVec yext;
    for (const auto& yi : s.y) yext.push_back(yi.zero_extended(target));
    RatVec yprime;
    for (const auto& yi : yext) yprime.push_back(derivative(yi));
    RatVec rhs(m, Series<Rat>(inner));
    {
      RatVec jh_yp = mul(jh_full, yprime, inner);
      for (std::size_t i = 0; i < m; ++i)
        rhs[i] = add(sub(add(sl[i], jh_yp[i]), yprime[i].truncated(inner)), sg[i]);
    }
    RatVec integ = mul(mbar.zero_extended(inner), rhs, inner);
    RatVec integd;
    for (auto& s2 : integ) integd.push_back(integrate(s2).zero_extended(target).truncated(target));
    RatVec delta = mul(mul(u.zero_extended(target), mf.zero_extended(target), target), integd, target);
    for (std::size_t i = 0; i < m; ++i) yext[i] = add(yext[i], delta[i]);
    return {std::move(u), std::move(mf), std::move(mbar), std::move(yext)};
  };

  return rec(n).y;
}

std::vector<Series<Rat>> integral_fixed_point(const SystemSpec& sys, std::size_t n) {
  std::size_t m = sys.size();
  std::vector<ExprPtr> hs = parts(sys, false), gs = parts(sys, true);
  RatVec y(m, Series<Rat>(n));
  std::size_t limit = m * n + m + 1;
  for (std::size_t it = 0; it < limit; ++it) {
    RatVec hv = eval_vector_exprs(sys, hs, y, n);
    RatVec gv = eval_vector_exprs(sys, gs, y, n > 0 ? n - 1 : 0);
    RatVec next(m, Series<Rat>(n));
    for (std::size_t i = 0; i < m; ++i)
      next[i] = add(hv[i], integrate(gv[i]).zero_extended(n).truncated(n));
    if (next == y) return y;
    y = std::move(next);
  }
  throw DomainError("NonConvergence", "integral fixed point did not stabilize");
}

}  // namespace species
