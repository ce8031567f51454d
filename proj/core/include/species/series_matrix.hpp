#pragma once

#include "species/series.hpp"

namespace species {

/// Square matrix of truncated series sharing one order.
template <class R>
class SeriesMatrix {
 public:
  SeriesMatrix(std::size_t n, std::size_t order)
      : n_(n), e_(n * n, Series<R>(order)) {}

  static SeriesMatrix identity(std::size_t n, std::size_t order) {
    SeriesMatrix m(n, order);
    for (std::size_t i = 0; i < n; ++i)
      m.at(i, i) = Series<R>::constant(RingTraits<R>::one(), order);
    return m;
  }

  std::size_t dim() const { return n_; }
  std::size_t order() const { return e_.empty() ? 0 : e_[0].order(); }

  const Series<R>& at(std::size_t i, std::size_t j) const { return e_[i * n_ + j]; }
  Series<R>& at(std::size_t i, std::size_t j) { return e_[i * n_ + j]; }

  SeriesMatrix truncated(std::size_t p) const {
    SeriesMatrix m(n_, std::min(p, order()));
    for (std::size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i].truncated(m.order());
    return m;
  }

  SeriesMatrix zero_extended(std::size_t p) const {
    SeriesMatrix m(n_, std::max(p, order()));
    for (std::size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i].zero_extended(m.order());
    return m;
  }

 private:
  std::size_t n_;
  std::vector<Series<R>> e_;
};

template <class R>
SeriesMatrix<R> add(const SeriesMatrix<R>& a, const SeriesMatrix<R>& b) {
  std::size_t ord = std::min(a.order(), b.order());
  SeriesMatrix<R> m(a.dim(), ord);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      m.at(i, j) = add(a.at(i, j).truncated(ord), b.at(i, j).truncated(ord));
  return m;
}

template <class R>
SeriesMatrix<R> sub(const SeriesMatrix<R>& a, const SeriesMatrix<R>& b) {
  std::size_t ord = std::min(a.order(), b.order());
  SeriesMatrix<R> m(a.dim(), ord);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      m.at(i, j) = sub(a.at(i, j).truncated(ord), b.at(i, j).truncated(ord));
  return m;
}

template <class R>
SeriesMatrix<R> mul(const SeriesMatrix<R>& a, const SeriesMatrix<R>& b, std::size_t ord) {
  SeriesMatrix<R> m(a.dim(), ord);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) {
      Series<R> acc(ord);
      for (std::size_t k = 0; k < a.dim(); ++k)
        acc = add(acc, mul(a.at(i, k).zero_extended(ord), b.at(k, j).zero_extended(ord), ord));
      m.at(i, j) = std::move(acc);
    }
  return m;
}

template <class R>
std::vector<Series<R>> mul(const SeriesMatrix<R>& a, const std::vector<Series<R>>& v,
                           std::size_t ord) {
  std::vector<Series<R>> out;
  out.reserve(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    Series<R> acc(ord);
    for (std::size_t k = 0; k < a.dim(); ++k)
      acc = add(acc, mul(a.at(i, k).zero_extended(ord), v[k].zero_extended(ord), ord));
    out.push_back(std::move(acc));
  }
  return out;
}

namespace detail {

/// Inverse of the constant matrix c (n x n, row-major). First tries the
/// geometric sum that applies when c = Id - N with N nilpotent (always the
/// case for the Jacobians of well-founded systems, and division-free), then
/// falls back to Gaussian elimination.
template <class R>
std::vector<R> invert_constant(std::vector<R> c, std::size_t n) {
  using T = RingTraits<R>;
  std::vector<R> nil(n * n);
  for (std::size_t i = 0; i < n * n; ++i) nil[i] = -c[i];
  for (std::size_t i = 0; i < n; ++i) nil[i * n + i] = nil[i * n + i] + T::one();
  std::vector<R> pw = nil, acc(n * n, T::zero());
  for (std::size_t i = 0; i < n; ++i) acc[i * n + i] = T::one();
  bool nilpotent = false;
  for (std::size_t k = 0; k < n; ++k) {
    bool zero = true;
    for (const R& x : pw)
      if (!T::is_zero(x)) zero = false;
    if (zero) {
      nilpotent = true;
      break;
    }
    for (std::size_t i = 0; i < n * n; ++i) acc[i] = acc[i] + pw[i];
    // pw <- pw * nil
    std::vector<R> nx(n * n, T::zero());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k2 = 0; k2 < n; ++k2)
        if (!T::is_zero(pw[i * n + k2]))
          for (std::size_t j = 0; j < n; ++j) nx[i * n + j] = nx[i * n + j] + pw[i * n + k2] * nil[k2 * n + j];
    pw = std::move(nx);
  }
  {
    bool zero = true;
    for (const R& x : pw)
      if (!T::is_zero(x)) zero = false;
    if (zero) nilpotent = true;
  }
  if (nilpotent) return acc;

  // Gauss-Jordan with partial pivoting (needs division in R).
  std::vector<R> a = std::move(c);
  std::vector<R> b(n * n, T::zero());
  for (std::size_t i = 0; i < n; ++i) b[i * n + i] = T::one();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && T::is_zero(a[piv * n + col])) ++piv;
    if (piv == n)
      throw DomainError("SingularConstantTerm", "matrix constant term is not invertible");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a[piv * n + j], a[col * n + j]);
        std::swap(b[piv * n + j], b[col * n + j]);
      }
    R d = a[col * n + col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col * n + j] = T::div(a[col * n + j], d);
      b[col * n + j] = T::div(b[col * n + j], d);
    }
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || T::is_zero(a[row * n + col])) continue;
      R f = a[row * n + col];
      for (std::size_t j = 0; j < n; ++j) {
        a[row * n + j] = a[row * n + j] - f * a[col * n + j];
        b[row * n + j] = b[row * n + j] - f * b[col * n + j];
      }
    }
  }
  return b;
}

}  // namespace detail

/// Inverse of the constant coefficient matrix M(0), as a width-1 series
/// matrix of the requested order.
template <class R>
SeriesMatrix<R> constant_inverse(const SeriesMatrix<R>& m, std::size_t out_order) {
  std::size_t n = m.dim();
  std::vector<R> c(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c[i * n + j] = m.at(i, j).order() ? m.at(i, j)[0] : RingTraits<R>::zero();
  std::vector<R> inv0 = detail::invert_constant(std::move(c), n);
  SeriesMatrix<R> out(n, out_order);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.at(i, j) = Series<R>::constant(inv0[i * n + j], out_order).truncated(out_order);
  return out;
}

/// Whole-matrix reciprocal by precision doubling:
///   B <- B + B (Id - M B).
template <class R>
SeriesMatrix<R> matrix_inv_newton(const SeriesMatrix<R>& m) {
  std::size_t n = m.order();
  SeriesMatrix<R> b = constant_inverse(m, 1);
  std::size_t p = 1;
  while (p < n) {
    p = std::min(2 * p, n);
    SeriesMatrix<R> e = sub(SeriesMatrix<R>::identity(m.dim(), p),
                            mul(m.truncated(p), b.zero_extended(p), p));
    b = add(b.zero_extended(p), mul(b.zero_extended(p), e, p));
  }
  return b;
}

}  // namespace species
