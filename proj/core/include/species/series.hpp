#pragma once

#include <cstddef>
#include <vector>

#include "species/rings.hpp"

namespace species {

/// Block size below which multiplication stays schoolbook. 16 keeps the
/// doubling cost ratio of the solvers in the subquadratic regime from order
/// 128 on; raise it for rings with cheap coefficient products.
inline std::size_t& karatsuba_threshold() {
  static std::size_t t = 16;
  return t;
}

/// Dense truncated power series over R, known modulo z^order().
/// order() == coefficient count; arithmetic never reports coefficients
/// beyond the minimum order of its operands.
template <class R>
class Series {
 public:
  using Ring = RingTraits<R>;

  explicit Series(std::size_t order) : c_(order, Ring::zero()) {}

  static Series constant(const R& v, std::size_t order) {
    Series s(order);
    if (order > 0) s.c_[0] = v;
    return s;
  }

  static Series variable(std::size_t order) {  // the series z
    Series s(order);
    if (order > 1) s.c_[1] = Ring::one();
    return s;
  }

  std::size_t order() const { return c_.size(); }
  const R& operator[](std::size_t i) const { return c_[i]; }
  R& at(std::size_t i) { return c_[i]; }
  const std::vector<R>& coeffs() const { return c_; }

  bool is_zero() const {
    for (const R& x : c_)
      if (!Ring::is_zero(x)) return false;
    return true;
  }

  /// Index of the first nonzero coefficient, or order() when none.
  std::size_t valuation() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!Ring::is_zero(c_[i])) return i;
    return c_.size();
  }

  Series truncated(std::size_t n) const {
    Series s(std::min(n, c_.size()));
    for (std::size_t i = 0; i < s.order(); ++i) s.c_[i] = c_[i];
    return s;
  }

  /// The same polynomial viewed modulo a higher power. Only meaningful for
  /// values known exactly (solver iterates), not for bare truncations.
  Series zero_extended(std::size_t n) const {
    if (n <= c_.size()) return truncated(n);
    Series s(n);
    for (std::size_t i = 0; i < c_.size(); ++i) s.c_[i] = c_[i];
    return s;
  }

  friend bool operator==(const Series& a, const Series& b) {
    if (a.order() != b.order()) return false;
    for (std::size_t i = 0; i < a.order(); ++i)
      if (!(a.c_[i] == b.c_[i])) return false;
    return true;
  }

 private:
  std::vector<R> c_;
};

namespace detail {

template <class R>
void schoolbook(const R* a, std::size_t na, const R* b, std::size_t nb, R* out,
                std::size_t nout) {
  for (std::size_t i = 0; i < na; ++i) {
    if (RingTraits<R>::is_zero(a[i])) continue;
    std::size_t jmax = std::min(nb, nout > i ? nout - i : 0);
    for (std::size_t j = 0; j < jmax; ++j) {
      out[i + j] += a[i] * b[j];
      ++tl_ring_mul_count;
    }
  }
}

// Full product of two length-n blocks into out[0..2n-2] (added in place).
template <class R>
void karatsuba(const R* a, const R* b, std::size_t n, R* out) {
  if (n <= karatsuba_threshold()) {
    schoolbook(a, n, b, n, out, 2 * n - 1);
    return;
  }
  std::size_t h = (n + 1) / 2;
  std::size_t r = n - h;  // r <= h
  std::vector<R> p0(2 * h - 1, RingTraits<R>::zero());
  karatsuba(a, b, h, p0.data());
  std::vector<R> a1(h, RingTraits<R>::zero()), b1(h, RingTraits<R>::zero());
  for (std::size_t i = 0; i < r; ++i) a1[i] = a[h + i];
  for (std::size_t i = 0; i < r; ++i) b1[i] = b[h + i];
  std::vector<R> p2(2 * h - 1, RingTraits<R>::zero());
  karatsuba(a1.data(), b1.data(), h, p2.data());
  std::vector<R> sa(h), sb(h);
  for (std::size_t i = 0; i < h; ++i) sa[i] = a[i] + a1[i];
  for (std::size_t i = 0; i < h; ++i) sb[i] = b[i] + b1[i];
  std::vector<R> p1(2 * h - 1, RingTraits<R>::zero());
  karatsuba(sa.data(), sb.data(), h, p1.data());
  for (std::size_t i = 0; i < 2 * h - 1; ++i) {
    out[i] += p0[i];
    out[h + i] += p1[i] - p0[i] - p2[i];
    if (2 * h + i < 2 * n - 1) out[2 * h + i] += p2[i];
  }
}

}  // namespace detail

template <class R>
Series<R> add(const Series<R>& a, const Series<R>& b) {
  std::size_t n = std::min(a.order(), b.order());
  Series<R> s(n);
  for (std::size_t i = 0; i < n; ++i) s.at(i) = a[i] + b[i];
  return s;
}

template <class R>
Series<R> sub(const Series<R>& a, const Series<R>& b) {
  std::size_t n = std::min(a.order(), b.order());
  Series<R> s(n);
  for (std::size_t i = 0; i < n; ++i) s.at(i) = a[i] - b[i];
  return s;
}

template <class R>
Series<R> negate(const Series<R>& a) {
  Series<R> s(a.order());
  for (std::size_t i = 0; i < a.order(); ++i) s.at(i) = -a[i];
  return s;
}

template <class R>
Series<R> scale(const Series<R>& a, const R& f) {
  Series<R> s(a.order());
  for (std::size_t i = 0; i < a.order(); ++i) {
    s.at(i) = a[i] * f;
    ++tl_ring_mul_count;
  }
  return s;
}

/// Product modulo z^out_order (defaults to min of the operand orders).
template <class R>
Series<R> mul(const Series<R>& a, const Series<R>& b, std::size_t out_order) {
  Series<R> s(out_order);
  if (out_order == 0) return s;
  std::size_t na = std::min(a.order(), out_order);
  std::size_t nb = std::min(b.order(), out_order);
  // trim trailing zeros; keeps Karatsuba from padding sparse operands
  while (na > 0 && RingTraits<R>::is_zero(a[na - 1])) --na;
  while (nb > 0 && RingTraits<R>::is_zero(b[nb - 1])) --nb;
  if (na == 0 || nb == 0) return s;
  std::size_t n = std::max(na, nb);
  if (std::min(na, nb) <= karatsuba_threshold()) {
    std::vector<R> out(std::min(out_order, na + nb - 1), RingTraits<R>::zero());
    detail::schoolbook(&a[0], na, &b[0], nb, out.data(), out.size());
    for (std::size_t i = 0; i < out.size(); ++i) s.at(i) = std::move(out[i]);
    return s;
  }
  std::vector<R> pa(n, RingTraits<R>::zero()), pb(n, RingTraits<R>::zero());
  for (std::size_t i = 0; i < na; ++i) pa[i] = a[i];
  for (std::size_t i = 0; i < nb; ++i) pb[i] = b[i];
  std::vector<R> out(2 * n - 1, RingTraits<R>::zero());
  detail::karatsuba(pa.data(), pb.data(), n, out.data());
  for (std::size_t i = 0; i < std::min(out_order, out.size()); ++i) s.at(i) = std::move(out[i]);
  return s;
}

template <class R>
Series<R> mul(const Series<R>& a, const Series<R>& b) {
  return mul(a, b, std::min(a.order(), b.order()));
}

/// Reciprocal by precision-doubling: b <- b + b(1 - a b).
template <class R>
Series<R> inv(const Series<R>& a) {
  if (a.order() == 0 || RingTraits<R>::is_zero(a[0]))
    throw DomainError("ZeroConstantTerm", "series reciprocal needs an invertible constant term");
  std::size_t n = a.order();
  Series<R> b = Series<R>::constant(RingTraits<R>::div(RingTraits<R>::one(), a[0]), 1);
  std::size_t p = 1;
  while (p < n) {
    p = std::min(2 * p, n);
    Series<R> ab = mul(a.truncated(p), b.zero_extended(p), p);
    Series<R> e = sub(Series<R>::constant(RingTraits<R>::one(), p), ab);
    b = add(b.zero_extended(p), mul(b.zero_extended(p), e, p));
  }
  return b;
}

template <class R>
Series<R> derivative(const Series<R>& a) {
  if (a.order() <= 1) return Series<R>(0);
  Series<R> s(a.order() - 1);
  for (std::size_t i = 1; i < a.order(); ++i) s.at(i - 1) = a[i] * RingTraits<R>::from_long(static_cast<long>(i));
  return s;
}

template <class R>
Series<R> integrate(const Series<R>& a) {
  Series<R> s(a.order() + 1);
  for (std::size_t i = 0; i < a.order(); ++i)
    s.at(i + 1) = RingTraits<R>::div(a[i], RingTraits<R>::from_long(static_cast<long>(i + 1)));
  return s;
}

/// Integration leaves the integer ring; this spelling promotes to rationals.
inline Series<Rat> integrate_promoted(const Series<BigInt>& a) {
  Series<Rat> s(a.order() + 1);
  for (std::size_t i = 0; i < a.order(); ++i) s.at(i + 1) = Rat(a[i]) / Rat(static_cast<long>(i + 1));
  return s;
}

/// exp by the coupled iteration with a simultaneous reciprocal:
///   m <- m + m Int(mbar (a' m - m')),  mbar <- mbar + mbar (1 - m mbar).
template <class R>
Series<R> exp(const Series<R>& a) {
  static_assert(RingTraits<R>::exact || true);
  if (a.order() == 0) return Series<R>(0);
  if (!RingTraits<R>::is_zero(a[0]))
    throw DomainError("NonzeroConstantTerm", "series exp needs a zero constant term");
  std::size_t n = a.order();
  Series<R> da = derivative(a);
  Series<R> m = Series<R>::constant(RingTraits<R>::one(), 1);
  Series<R> mbar = m;
  std::size_t p = 1;
  while (p < n) {
    std::size_t p2 = std::min(2 * p, n);
    if (p > 1) {
      Series<R> mm = mul(m.truncated(p), mbar.zero_extended(p), p);
      Series<R> e = sub(Series<R>::constant(RingTraits<R>::one(), p), mm);
      mbar = add(mbar.zero_extended(p), mul(mbar.zero_extended(p), e, p));
    }
    Series<R> g = sub(mul(da.truncated(p2 - 1), m.zero_extended(p2 - 1), p2 - 1),
                      derivative(m.zero_extended(p2)));
    Series<R> integrand = mul(mbar.zero_extended(p2 - 1), g, p2 - 1);
    m = add(m.zero_extended(p2), mul(m.zero_extended(p2), integrate(integrand), p2));
    p = p2;
  }
  return m;
}

/// log a = Int(a'/a); needs a(0) = 1.
template <class R>
Series<R> log(const Series<R>& a) {
  if (a.order() == 0) return Series<R>(0);
  if (!(a[0] == RingTraits<R>::one()))
    throw DomainError("NonUnitConstantTerm", "series log needs constant term 1");
  if (a.order() == 1) return Series<R>(1);
  Series<R> da = derivative(a);
  Series<R> q = mul(da, inv(a.truncated(a.order() - 1)), a.order() - 1);
  return integrate(q);
}

/// a(z^k) mod z^out_order; no ring multiplications.
template <class R>
Series<R> subst_power(const Series<R>& a, std::size_t k, std::size_t out_order) {
  if (k == 0) throw DomainError("BadArgument", "subst_power needs k >= 1");
  Series<R> s(out_order);
  for (std::size_t j = 0; j < a.order(); ++j) {
    if (j != 0 && j > (out_order - 1) / k) break;
    std::size_t idx = j * k;
    if (idx >= out_order) break;
    s.at(idx) = a[j];
  }
  return s;
}

template <class R>
Series<R> subst_power(const Series<R>& a, std::size_t k) {
  return subst_power(a, k, a.order());
}

template <class R>
Series<R> power(const Series<R>& a, std::uint64_t e, std::size_t out_order) {
  Series<R> r = Series<R>::constant(RingTraits<R>::one(), out_order);
  Series<R> base = a.zero_extended(out_order).truncated(out_order);
  while (e > 0) {
    if (e & 1) r = mul(r, base, out_order);
    e >>= 1;
    if (e) base = mul(base, base, out_order);
  }
  return r;
}

/// Horner evaluation (used by the numeric oracle on double series).
template <class R>
double value_at(const Series<R>& a, double x) {
  double acc = 0.0;
  for (std::size_t i = a.order(); i-- > 0;) acc = acc * x + RingTraits<R>::to_double(a[i]);
  return acc;
}

}  // namespace species
