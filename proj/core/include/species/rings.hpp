#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <cstdio>
#include <string>

#include "species/errors.hpp"

namespace species {

using BigInt = mpz_class;
using Rat = mpq_class;

/// Count of coefficient multiplications performed by series arithmetic on
/// this thread. Used by the complexity checks and the benchmarks.
inline thread_local std::uint64_t tl_ring_mul_count = 0;

inline std::uint64_t ring_mul_count() { return tl_ring_mul_count; }
inline void reset_ring_mul_count() { tl_ring_mul_count = 0; }

template <class R>
struct RingTraits;

template <>
struct RingTraits<Rat> {
  static constexpr bool exact = true;
  static Rat zero() { return Rat(0); }
  static Rat one() { return Rat(1); }
  static Rat from_long(long v) { return Rat(v); }
  static bool is_zero(const Rat& x) { return sgn(x) == 0; }
  static Rat div(const Rat& a, const Rat& b) {
    if (is_zero(b)) throw DomainError("DivisionByZero", "rational division by zero");
    return Rat(a / b);
  }
  static std::string str(const Rat& x) { return x.get_str(); }
  static double to_double(const Rat& x) { return x.get_d(); }
};

template <>
struct RingTraits<BigInt> {
  static constexpr bool exact = true;
  static BigInt zero() { return BigInt(0); }
  static BigInt one() { return BigInt(1); }
  static BigInt from_long(long v) { return BigInt(v); }
  static bool is_zero(const BigInt& x) { return sgn(x) == 0; }
  static BigInt div(const BigInt& a, const BigInt& b) {
    if (is_zero(b)) throw DomainError("DivisionByZero", "integer division by zero");
    if (!mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()))
      throw DomainError("NonIntegerCoefficient",
                        "operation leaves the integer coefficient ring; use rationals");
    BigInt q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
  }
  static std::string str(const BigInt& x) { return x.get_str(); }
  static double to_double(const BigInt& x) { return x.get_d(); }
};

template <>
struct RingTraits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double from_long(long v) { return static_cast<double>(v); }
  static bool is_zero(double x) { return x == 0.0; }
  static double div(double a, double b) {
    if (b == 0.0) throw DomainError("DivisionByZero", "float division by zero");
    return a / b;
  }
  static std::string str(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
  static double to_double(double x) { return x; }
};

inline std::uint64_t euler_phi(std::uint64_t n) {
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

}  // namespace species
