#pragma once

#include <functional>
#include <limits>

#include "species/eval.hpp"
#include "species/series_matrix.hpp"
#include "species/symbolic.hpp"

namespace species {

template <class R>
struct SolveTrace {
  // Y snapshot after each precision level (optimized Newton) or each sweep
  // (fixed point); used by the convergence tests.
  std::vector<std::vector<Series<R>>> levels;
};

namespace detail {

template <class R>
std::vector<Series<R>> constants_from_counts(const std::vector<std::uint64_t>& counts,
                                             std::size_t order) {
  std::vector<Series<R>> v;
  v.reserve(counts.size());
  for (std::uint64_t c : counts) {
    if (c > static_cast<std::uint64_t>(std::numeric_limits<long>::max()))
      throw DomainError("ConstantTermOverflow", "size-0 count does not fit a ring constant");
    v.push_back(Series<R>::constant(RingTraits<R>::from_long(static_cast<long>(c)), order));
  }
  return v;
}

template <class R>
SeriesMatrix<R> eval_matrix(const SystemSpec& sys, const std::vector<std::vector<ExprPtr>>& j,
                            SeriesKind kind, const std::vector<Series<R>>& env,
                            std::size_t ord) {
  SeriesEvaluator<R> ev(sys, kind, env);
  SeriesMatrix<R> m(sys.size(), ord);
  for (std::size_t a = 0; a < sys.size(); ++a)
    for (std::size_t b = 0; b < sys.size(); ++b) m.at(a, b) = ev.eval(j[a][b], ord);
  return m;
}

template <class R>
std::vector<Series<R>> eval_rhs(const SystemSpec& sys, SeriesKind kind,
                                const std::vector<Series<R>>& env, std::size_t ord) {
  SeriesEvaluator<R> ev(sys, kind, env);
  std::vector<Series<R>> out;
  out.reserve(sys.size());
  for (const auto& eq : sys.equations) out.push_back(ev.eval(eq.rhs, ord));
  return out;
}

template <class R>
std::vector<Series<R>> extend_all(const std::vector<Series<R>>& v, std::size_t ord) {
  std::vector<Series<R>> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(s.zero_extended(ord).truncated(ord));
  return out;
}

}  // namespace detail

/// Zero-started fixed-point sweep; converges for every well-founded system
/// (slowly: at least one new correct coefficient every m sweeps). This is the
/// reference solver the fast path is checked against.
template <class R>
std::vector<Series<R>> joyal_solve(const SystemSpec& sys, SeriesKind kind, std::size_t n,
                                   SolveTrace<R>* trace = nullptr) {
  std::size_t m = sys.size();
  std::vector<Series<R>> y(m, Series<R>(n));
  std::size_t limit = m * n + m + 1;
  for (std::size_t it = 0; it < limit; ++it) {
    std::vector<Series<R>> next = detail::eval_rhs(sys, kind, y, n);
    if (trace) trace->levels.push_back(next);
    if (next == y) return y;
    y = std::move(next);
  }
  throw DomainError("NonConvergence",
                    "fixed-point iteration did not stabilize; the system is unlikely to be "
                    "well founded");
}

/// Optimized Newton solver: one inverse-refinement step and one solution step
/// per precision level, halving precision down the recursion. Output exactly
/// matches joyal_solve on well-founded input.
template <class R>
std::vector<Series<R>> newton_solve(const SystemSpec& sys, SeriesKind kind, std::size_t n,
                                    SolveTrace<R>* trace = nullptr) {
  if (n == 0) return std::vector<Series<R>>(sys.size(), Series<R>(0));
  auto jac = jacobian(sys);
  std::vector<std::uint64_t> counts = constant_term_counts(sys);

  struct State {
    SeriesMatrix<R> u;
    std::vector<Series<R>> y;
  };

  std::function<State(std::size_t)> rec = [&](std::size_t target) -> State {
    if (target == 1) {
      std::vector<Series<R>> y0 = detail::constants_from_counts<R>(counts, 1);
      SeriesMatrix<R> j0 = detail::eval_matrix(sys, jac, kind, y0, 1);
      SeriesMatrix<R> a = sub(SeriesMatrix<R>::identity(sys.size(), 1), j0);
      // exact inverse of Id - J(0, S(0)); J(0, S(0)) is nilpotent for
      // well-founded systems, so this is division-free
      return {constant_inverse(a, 1), std::move(y0)};
    }
    std::size_t h = (target + 1) / 2;
    State s = rec(h);
    SeriesMatrix<R> j = detail::eval_matrix(sys, jac, kind, s.y, h);
    SeriesMatrix<R> u = s.u.zero_extended(h);
    SeriesMatrix<R> step =
        add(mul(j, u, h), sub(SeriesMatrix<R>::identity(sys.size(), h), u));
    u = add(u, mul(u, step, h));
    std::vector<Series<R>> hy = detail::eval_rhs(sys, kind, s.y, target);
    std::vector<Series<R>> yext = detail::extend_all(s.y, target);
    std::vector<Series<R>> resid(sys.size(), Series<R>(target));
    for (std::size_t i = 0; i < sys.size(); ++i) resid[i] = sub(hy[i], yext[i]);
    std::vector<Series<R>> delta = mul(u.zero_extended(target), resid, target);
    for (std::size_t i = 0; i < sys.size(); ++i) yext[i] = add(yext[i], delta[i]);
    if (trace) trace->levels.push_back(yext);
    return {std::move(u), std::move(yext)};
  };

  return rec(n).y;
}

/// Plain Newton iteration (full matrix inversion every step); second oracle
/// for the optimized path.
template <class R>
std::vector<Series<R>> newton_solve_plain(const SystemSpec& sys, SeriesKind kind,
                                          std::size_t n) {
  if (n == 0) return std::vector<Series<R>>(sys.size(), Series<R>(0));
  auto jac = jacobian(sys);
  std::vector<Series<R>> y =
      detail::constants_from_counts<R>(constant_term_counts(sys), 1);
  std::size_t target = 1;
  while (target < n) {
    target = std::min(2 * target, n);
    SeriesMatrix<R> j = detail::eval_matrix(sys, jac, kind, y, target);
    SeriesMatrix<R> u =
        matrix_inv_newton(sub(SeriesMatrix<R>::identity(sys.size(), target), j));
    std::vector<Series<R>> hy = detail::eval_rhs(sys, kind, y, target);
    std::vector<Series<R>> yext = detail::extend_all(y, target);
    std::vector<Series<R>> resid(sys.size(), Series<R>(target));
    for (std::size_t i = 0; i < sys.size(); ++i) resid[i] = sub(hy[i], yext[i]);
    std::vector<Series<R>> delta = mul(u, resid, target);
    for (std::size_t i = 0; i < sys.size(); ++i) yext[i] = add(yext[i], delta[i]);
    y = std::move(yext);
  }
  return y;
}

}  // namespace species
