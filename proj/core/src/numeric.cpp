#include "species/numeric.hpp"

#include <cmath>
#include <functional>

#include "species/analysis.hpp"
#include "species/errors.hpp"
#include "species/solve.hpp"
#include "species/symbolic.hpp"

namespace species {

namespace {

constexpr double kSeqGuard = 1.0 - 1e-14;

// Dense m x m solve with partial pivoting.
std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b) {
  std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
    if (std::fabs(a[piv * n + col]) < 1e-300)
      throw DomainError("SingularLinearSystem",
                        "Jacobian is numerically singular; the point is probably outside "
                        "the disk of convergence");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[piv * n + j], a[col * n + j]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  return x;
}

double norm_inf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

[[noreturn]] void diverged(const char* what) {
  throw DomainError("NonConvergence", std::string(what) +
                                          "; the point is probably outside the disk of "
                                          "convergence");
}

// Evaluates expressions numerically, at alpha (labeled) or jointly at the
// powers alpha^k (unlabeled). ref(i, k) supplies the unknowns' values.
class NumericEval {
 public:
  NumericEval(const SystemSpec& sys, SeriesKind kind, double alpha,
              const std::vector<std::uint64_t>& counts,
              std::function<double(std::size_t, int)> ref)
      : sys_(sys), kind_(kind), alpha_(alpha), counts_(counts), ref_(std::move(ref)) {}

  // L: power sums of uncapped Set/Cyc/PSet stop at alpha^L.
  void set_tail_cut(int l) { tail_cut_ = l; }

  double eval(const ExprPtr& e, int k) const {
    switch (e->kind()) {
      case NodeKind::Zero: return 0.0;
      case NodeKind::One: return 1.0;
      case NodeKind::Atom: return std::pow(alpha_, k);
      case NodeKind::Ref: {
        int i = sys_.index_of(e->name());
        if (i < 0) throw DomainError("UnboundName", "no value bound to '" + e->name() + "'");
        return ref_(static_cast<std::size_t>(i), k);
      }
      case NodeKind::Sum: {
        double s = 0.0;
        for (const auto& kid : e->kids()) s += eval(kid, k);
        return s;
      }
      case NodeKind::Prod: {
        double p = 1.0;
        for (const auto& kid : e->kids()) p *= eval(kid, k);
        return p;
      }
      case NodeKind::Seq: return eval_seq(e, k);
      case NodeKind::Set:
      case NodeKind::Cyc: return eval_polya(e, k);
      case NodeKind::PSet: return eval_pset(e, k);
      case NodeKind::Integral:
        throw DomainError("UnsupportedNumeric", "integral systems have no numeric oracle");
    }
    return 0.0;
  }

 private:
  // child value in the slot of index j >= 1 of the cycle-index substitution
  // at outer level k
  double slot(const ExprPtr& child, int k, int j) const {
    if (kind_ == SeriesKind::OGF) return eval(child, k * j);
    if (j == 1) return eval(child, k);
    return static_cast<double>(size0_count(sys_, child, counts_));
  }

  double eval_seq(const ExprPtr& e, int k) const {
    double g = eval(e->child(), k);
    double out = 0.0;
    for (const auto& iv : e->card().intervals()) {
      if (iv.hi == CardConstraint::kInf) {
        if (g >= kSeqGuard) diverged("sequence member value reaches 1");
        out += std::pow(g, static_cast<double>(iv.lo)) / (1.0 - g);
      } else {
        for (std::uint64_t l = iv.lo; l <= iv.hi; ++l)
          out += std::pow(g, static_cast<double>(l));
      }
    }
    return out;
  }

  // u-polynomial of the bivariate Set/Cyc form, coefficients at outer level k.
  std::vector<double> bivariate(const ExprPtr& e, int k, std::uint64_t lmax) const {
    std::vector<double> out(lmax + 1, 0.0);
    if (e->is(NodeKind::Set)) {
      std::vector<double> p(lmax + 1, 0.0);
      for (std::uint64_t j = 1; j <= lmax; ++j)
        p[j] = slot(e->child(), k, static_cast<int>(j)) / static_cast<double>(j);
      out[0] = 1.0;
      for (std::uint64_t t = 1; t <= lmax; ++t) {
        double acc = 0.0;
        for (std::uint64_t j = 1; j <= t; ++j)
          acc += static_cast<double>(j) * p[j] * out[t - j];
        out[t] = acc / static_cast<double>(t);
      }
    } else {
      for (std::uint64_t j = 1; j <= lmax; ++j) {
        double fj = static_cast<double>(euler_phi(j)) / static_cast<double>(j);
        double gj = slot(e->child(), k, static_cast<int>(j));
        double pw = 1.0;
        for (std::uint64_t t = 1; j * t <= lmax; ++t) {
          pw *= gj;
          out[j * t] += fj * pw / static_cast<double>(t);
        }
      }
    }
    return out;
  }

  double full_polya(const ExprPtr& e, int k) const {
    if (e->is(NodeKind::Set)) {
      double arg = 0.0;
      int jmax = kind_ == SeriesKind::EGF ? 1 : std::max(1, tail_cut_ / std::max(k, 1));
      for (int j = 1; j <= jmax; ++j) {
        if (kind_ == SeriesKind::OGF && k * j > tail_cut_) break;
        arg += slot(e->child(), k, j) / j;
      }
      return std::exp(arg);
    }
    // Cyc
    double g1 = slot(e->child(), k, 1);
    if (g1 >= 1.0)
      throw DomainError("CycDivergent", "cycle member value reaches 1");
    double acc = 0.0;
    int jmax = kind_ == SeriesKind::EGF ? 1 : std::max(1, tail_cut_ / std::max(k, 1));
    for (int j = 1; j <= jmax; ++j) {
      if (kind_ == SeriesKind::OGF && k * j > tail_cut_) break;
      double gj = slot(e->child(), k, j);
      if (gj >= 1.0) throw DomainError("CycDivergent", "cycle member value reaches 1");
      acc += static_cast<double>(euler_phi(j)) / j * (-std::log1p(-gj));
    }
    return acc;
  }

  double eval_polya(const ExprPtr& e, int k) const {
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
    std::vector<double> biv;
    if (need_biv) biv = bivariate(e, k, lmax);
    double out = 0.0;
    for (const auto& iv : e->card().intervals()) {
      if (iv.hi == CardConstraint::kInf) {
        double t = full_polya(e, k);
        for (std::uint64_t l = 0; l < iv.lo; ++l) t -= biv[l];
        out += t;
      } else {
        for (std::uint64_t l = iv.lo; l <= iv.hi; ++l) out += biv[l];
      }
    }
    return out;
  }

  double eval_pset(const ExprPtr& e, int k) const {
    if (kind_ == SeriesKind::EGF)
      throw DomainError("UnsupportedNumeric",
                        "PSet has no labeled numeric rule; evaluate via series");
    double arg = 0.0;
    double sign = 1.0;
    for (int j = 1; k * j <= tail_cut_; ++j) {
      arg += sign * eval(e->child(), k * j) / j;
      sign = -sign;
    }
    double out = std::exp(arg);
    if (!e->card().contains(0)) out -= 1.0;
    return out;
  }

  const SystemSpec& sys_;
  SeriesKind kind_;
  double alpha_;
  const std::vector<std::uint64_t>& counts_;
  std::function<double(std::size_t, int)> ref_;
  int tail_cut_ = 1 << 20;
};

struct PolyaNode {
  PolyaKind kind;
  ExprPtr child;
};

void collect_polya_nodes(const ExprPtr& e, std::vector<PolyaNode>& out) {
  if (e->card().unbounded()) {
    if (e->is(NodeKind::Set)) out.push_back({PolyaKind::Set, e->child()});
    if (e->is(NodeKind::Cyc)) out.push_back({PolyaKind::Cyc, e->child()});
    if (e->is(NodeKind::PSet)) out.push_back({PolyaKind::PSet, e->child()});
  }
  for (const auto& k : e->kids()) collect_polya_nodes(k, out);
}

}  // namespace

std::vector<double> egf_value(const SystemSpec& sys, double alpha, double eps, int max_iter,
                              std::vector<std::vector<double>>* trace) {
  std::size_t m = sys.size();
  std::vector<std::uint64_t> counts = constant_term_counts(sys);
  std::vector<double> y(m, 0.0);
  NumericEval ev(sys, SeriesKind::EGF, alpha, counts,
                 [&y](std::size_t i, int) { return y[i]; });
  auto jac = jacobian(sys);
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> h(m), rhs(m);
    std::vector<double> a(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      h[i] = ev.eval(sys.equations[i].rhs, 1);
      rhs[i] = h[i] - y[i];
      for (std::size_t j = 0; j < m; ++j)
        a[i * m + j] = (i == j ? 1.0 : 0.0) - ev.eval(jac[i][j], 1);
    }
    std::vector<double> d = solve_linear(std::move(a), rhs);
    for (std::size_t i = 0; i < m; ++i) y[i] += d[i];
    if (trace) trace->push_back(y);
    if (norm_inf(d) < eps) {
      std::vector<double> resid(m);
      for (std::size_t i = 0; i < m; ++i) resid[i] = ev.eval(sys.equations[i].rhs, 1) - y[i];
      if (norm_inf(resid) < eps) return y;
    }
  }
  diverged("labeled-value iteration did not converge");
}

namespace {

ExprPtr dominant_rewrite(const ExprPtr& e) {
  switch (e->kind()) {
    case NodeKind::Sum:
    case NodeKind::Prod: {
      std::vector<ExprPtr> kids;
      for (const auto& k : e->kids()) kids.push_back(dominant_rewrite(k));
      return e->kind() == NodeKind::Sum ? sum(std::move(kids)) : prod(std::move(kids));
    }
    case NodeKind::Seq: return seq(dominant_rewrite(e->child()), e->card());
    case NodeKind::Set: return seq(dominant_rewrite(e->child()), e->card());
    case NodeKind::Cyc:
      return seq(dominant_rewrite(e->child()), e->card().clamped_at_least(1));
    case NodeKind::PSet: return seq(dominant_rewrite(e->child()), e->card());
    case NodeKind::Integral: return integral(dominant_rewrite(e->child()));
    default: return e;
  }
}

}  // namespace

SystemSpec dominant_system(const SystemSpec& sys) {
  SystemSpec d = sys;
  for (auto& eq : d.equations) {
    eq.rhs = dominant_rewrite(eq.rhs);
    if (eq.integrand) eq.integrand = dominant_rewrite(eq.integrand);
  }
  return d;
}

bool is_flat(const SystemSpec& sys) {
  std::function<bool(const ExprPtr&)> flat = [&](const ExprPtr& e) -> bool {
    if (e->is(NodeKind::Set) || e->is(NodeKind::Cyc) || e->is(NodeKind::PSet)) return false;
    for (const auto& k : e->kids())
      if (!flat(k)) return false;
    return true;
  };
  for (const auto& eq : sys.equations) {
    if (!flat(eq.rhs)) return false;
    if (eq.integrand && !flat(eq.integrand)) return false;
  }
  return true;
}

int truncation_order(const SystemSpec& sys, double rho, double eps) {
  SystemSpec dom = dominant_system(sys);
  std::vector<double> at_rho = egf_value(dom, rho, 1e-15, 400);
  std::size_t prefix = 2;
  std::vector<Series<double>> coeffs = newton_solve<double>(dom, SeriesKind::EGF, prefix);
  double r = norm_inf(at_rho);
  {
    // the constant term is always known
    std::vector<double> cur = at_rho;
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] -= coeffs[i][0];
    r = norm_inf(cur);
    at_rho = std::move(cur);
  }
  int n = 0;
  double scale = 1.0;
  while (r >= eps) {
    ++n;
    scale *= rho;
    if (static_cast<std::size_t>(n) >= prefix) {
      prefix *= 2;
      coeffs = newton_solve<double>(dom, SeriesKind::EGF, prefix);
    }
    for (std::size_t i = 0; i < at_rho.size(); ++i)
      at_rho[i] -= coeffs[i][static_cast<std::size_t>(n)] * scale;
    r = norm_inf(at_rho);
    if (n > 1 << 22) diverged("truncation-order scan did not terminate");
  }
  return n;
}

std::vector<double> polya_tail_gaps(PolyaKind kind, const std::function<double(int)>& values,
                                    double alpha, int count) {
  if (alpha < 0 || alpha >= 1)
    throw DomainError("NonConvergence", "power-sum bounds need 0 <= alpha < 1");
  std::vector<double> gaps;
  if (kind == PolyaKind::Cyc && values(1) >= 1.0)
    throw DomainError("CycDivergent", "cycle bound needs the member value below 1");
  double partial = 0.0;  // sum_{i<L} alpha^i / i
  double pw = 1.0;
  for (int l = 1; l <= count; ++l) {
    double al = std::pow(alpha, l);
    double delta = alpha == 0.0 ? 0.0 : values(l) / al;
    double gap;
    if (kind == PolyaKind::Cyc) {
      gap = delta * al / (1.0 - alpha);
    } else {
      double rest = -std::log1p(-alpha) - partial;  // sum_{i>=L} alpha^i / i
      gap = std::expm1(delta * rest);
    }
    gaps.push_back(gap);
    pw *= alpha;
    partial += pw / l;
  }
  return gaps;
}

TailBound polya_tail_length(PolyaKind kind, const std::function<double(int)>& values,
                            double alpha, double eps, int lmax) {
  if (alpha == 0.0) return {1, 0.0};
  if (kind == PolyaKind::Cyc && values(1) >= 1.0)
    throw DomainError("CycDivergent", "cycle bound needs the member value below 1");
  double partial = 0.0;
  double pw = 1.0;
  for (int l = 1; l <= lmax; ++l) {
    double al = std::pow(alpha, l);
    double delta = values(l) / al;
    double gap;
    if (kind == PolyaKind::Cyc) {
      gap = delta * al / (1.0 - alpha);
    } else {
      double rest = -std::log1p(-alpha) - partial;
      gap = std::expm1(delta * rest);
    }
    if (gap < eps) return {l, gap};
    pw *= alpha;
    partial += pw / l;
  }
  diverged("no admissible power-sum cut");
}

EvalState ogf_value(const SystemSpec& sys, const EvalRequest& req) {
  std::size_t m = sys.size();
  double alpha = req.point;
  EvalState st;
  std::vector<std::uint64_t> counts = constant_term_counts(sys);

  if (alpha == 0.0) {
    st.values.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) st.values[i] = static_cast<double>(counts[i]);
    st.values_at_powers.assign(static_cast<std::size_t>(std::max(req.powers, 1)), st.values);
    st.converged = true;
    return st;
  }

  if (is_flat(sys)) {
    // labeled and unlabeled series coincide; evaluate pointwise
    int k_count = std::max(req.powers, 1);
    for (int k = 1; k <= k_count; ++k) {
      std::vector<std::vector<double>> trace;
      st.values_at_powers.push_back(
          egf_value(sys, std::pow(alpha, k), req.eps, req.max_iter, &trace));
      st.iterations = std::max(st.iterations, static_cast<int>(trace.size()));
    }
    st.values = st.values_at_powers.front();
    st.converged = true;
    return st;
  }

  if (alpha < 0 || alpha >= 1)
    diverged("unlabeled series of a non-flat constructible class diverge at |alpha| >= 1");

  // dominant radius: hint or probe by bisection on the flat majorant
  SystemSpec dom = dominant_system(sys);
  double rho;
  if (req.radius) {
    rho = *req.radius;
  } else {
    double lo = 0.0, hi = 1.0;
    for (int step = 0; step < 20; ++step) {
      double mid = 0.5 * (lo + hi);
      try {
        egf_value(dom, mid, 1e-9, 80);
        lo = mid;
      } catch (const DomainError&) {
        hi = mid;
      }
    }
    rho = lo;
    if (rho <= 0.0) diverged("the dominant system has no usable disk");
  }

  int k_powers = std::max(req.powers, 1);
  while (std::pow(alpha, k_powers + 1) > rho) {
    ++k_powers;
    if (k_powers > 4096) diverged("no power threshold brings the tail inside the disk");
  }

  double rho_tail = std::pow(alpha, k_powers + 1);
  // the scan returns the highest kept index; the prefix needs one more slot
  st.truncation_order = truncation_order(sys, rho_tail, req.eps) + 1;

  std::vector<PolyaNode> polya;
  for (const auto& eq : sys.equations) collect_polya_nodes(eq.rhs, polya);
  double node_eps = req.eps / static_cast<double>(std::max<std::size_t>(polya.size(), 1));

  auto jac = jacobian(sys);

  std::vector<std::vector<double>> y(static_cast<std::size_t>(k_powers),
                                     std::vector<double>(m, 0.0));
  st.tail_series = detail::constants_from_counts<double>(counts, 1);
  int tail_cut = k_powers + 8;

  auto ref_value = [&](std::size_t i, int k) -> double {
    if (k <= k_powers) return y[static_cast<std::size_t>(k - 1)][i];
    return value_at(st.tail_series[i], std::pow(alpha, k));
  };
  NumericEval ev(sys, SeriesKind::OGF, alpha, counts, ref_value);

  std::size_t level = 0;
  for (int it = 1; it <= req.max_iter; ++it) {
    // advance the series prefix one doubling step, capped by the certified order
    std::size_t target = std::min<std::size_t>(
        std::size_t{1} << std::min<std::size_t>(level + 1, 30),
        static_cast<std::size_t>(st.truncation_order));
    target = std::max<std::size_t>(target, 1);
    st.tail_series = newton_solve<double>(sys, SeriesKind::OGF, target);
    ++level;

    // certified cut for the power sums, per uncapped node, budget split evenly
    int l = k_powers + 1;
    ev.set_tail_cut(std::max(tail_cut, l));
    for (const auto& node : polya) {
      auto child_values = [&](int k) { return ev.eval(node.child, k); };
      TailBound tb = polya_tail_length(node.kind, child_values, alpha, node_eps);
      l = std::max(l, tb.length);
    }
    tail_cut = l;
    ev.set_tail_cut(tail_cut);

    // one Newton sweep on the value sequence
    std::vector<std::vector<double>> next = y;
    double delta = 0.0;
    for (int k = 1; k <= k_powers; ++k) {
      std::vector<double> h(m), rhs(m), a(m * m, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        h[i] = ev.eval(sys.equations[i].rhs, k);
        rhs[i] = h[i] - y[static_cast<std::size_t>(k - 1)][i];
        for (std::size_t j = 0; j < m; ++j)
          a[i * m + j] = (i == j ? 1.0 : 0.0) - ev.eval(jac[i][j], k);
      }
      std::vector<double> d = solve_linear(std::move(a), rhs);
      for (std::size_t i = 0; i < m; ++i) {
        next[static_cast<std::size_t>(k - 1)][i] += d[i];
        delta = std::max(delta, std::fabs(d[i]));
      }
    }
    y = std::move(next);
    st.iterations = it;
    if (delta < req.eps) {
      st.converged = true;
      break;
    }
  }
  if (!st.converged) diverged("unlabeled-value iteration did not converge");

  st.values_at_powers = y;
  st.values = y.front();
  st.tail_length = tail_cut;
  return st;
}

}  // namespace species
