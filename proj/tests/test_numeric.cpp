#include <doctest.h>

#include <cmath>

#include "species/numeric.hpp"
#include "species/solve.hpp"

using namespace species;

TEST_SUITE_BEGIN("numeric");

namespace {

const char* kCatalan = "T = Z * Seq(T);";
const char* kCayley = "G = Z * Set(G);";

}  // namespace

TEST_CASE("labeled rooted-tree value at 0.1") {
  std::vector<double> v = egf_value(parse_system(kCayley), 0.1, 1e-14, 60);
  CHECK(std::fabs(v[0] - 0.11183255915896296483) < 1e-15);
}

TEST_CASE("plane-tree value at 0.1") {
  std::vector<double> v = egf_value(parse_system(kCatalan), 0.1, 1e-14, 60);
  CHECK(std::fabs(v[0] - 0.112701665379258311482) < 1e-15);
}

TEST_CASE("value at zero is the size-0 count") {
  std::vector<double> v = egf_value(parse_system("Y1 = 1 + Z*Y1; Y2 = 1 + Y1*Y1;"), 0.0,
                                    1e-12, 60);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 2.0);
}

TEST_CASE("labeled iterates increase toward the value") {
  std::vector<std::vector<double>> trace;
  egf_value(parse_system(kCayley), 0.2, 1e-13, 60, &trace);
  for (std::size_t i = 1; i < trace.size(); ++i)
    CHECK(trace[i][0] >= trace[i - 1][0] - 1e-15);
}

TEST_CASE("points outside the disk are reported, not returned") {
  CHECK_THROWS_AS(egf_value(parse_system(kCatalan), 0.4, 1e-12, 60), DomainError);
}

TEST_CASE("flat majorant rewrite") {
  SystemSpec dom = dominant_system(parse_system(kCayley));
  CHECK(to_string(dom) == "G = Z*Seq(G);\n");
  SystemSpec sp = dominant_system(
      parse_system("S = Seq(Z + P, card >= 2); P = Set(Z + S, card >= 2);"));
  CHECK(to_string(sp) == "S = Seq(Z + P, card >= 2);\nP = Seq(Z + S, card >= 2);\n");
  CHECK(is_flat(sp));
  // flat input is untouched
  SystemSpec cat = parse_system(kCatalan);
  CHECK(to_string(dominant_system(cat)) == to_string(cat));
  // cycles keep their nonempty floor
  SystemSpec cy = dominant_system(parse_system("A = Z*Cyc(A);"));
  CHECK(to_string(cy) == "A = Z*Seq(A, card >= 1);\n");
}

TEST_CASE("truncation order for the plane-tree majorant at 1/10") {
  SystemSpec sys = parse_system(kCatalan);
  int n = truncation_order(sys, 0.1, 1e-6);
  CHECK(n == 9);
  // residual after stripping 9 terms: about 0.74e-6
  double u = egf_value(sys, 0.1, 1e-15, 60)[0];
  auto c = newton_solve<double>(sys, SeriesKind::OGF, 10);
  double resid = u;
  for (std::size_t i = 0; i < 10; ++i) resid -= c[0][i] * std::pow(0.1, static_cast<double>(i));
  CHECK(resid > 0.5e-6);
  CHECK(resid < 1.0e-6);
}

TEST_CASE("truncation order is 0 when the tolerance swallows the value") {
  CHECK(truncation_order(parse_system(kCatalan), 0.1, 1.0) == 0);
}

TEST_CASE("power-sum cut for z + z^2 at 0.3") {
  auto values = [](int k) {
    double a = std::pow(0.3, k);
    return a + a * a;
  };
  TailBound tb = polya_tail_length(PolyaKind::Set, values, 0.3, 1e-6);
  CHECK(tb.length == 10);
  CHECK(tb.bound < 1e-6);

  std::vector<double> gaps = polya_tail_gaps(PolyaKind::Set, values, 0.3, 10);
  std::vector<double> expect{0.59,     0.064,    0.012,     0.0027,    0.00065,
                             0.00016,  0.000042, 0.000011,  0.0000030, 0.00000081};
  REQUIRE(gaps.size() == expect.size());
  for (std::size_t i = 0; i < gaps.size(); ++i)
    CHECK(gaps[i] == doctest::Approx(expect[i]).epsilon(0.01));
}

TEST_CASE("power-sum cut at zero point is immediate") {
  auto values = [](int) { return 0.0; };
  TailBound tb = polya_tail_length(PolyaKind::Set, values, 0.0, 1e-9);
  CHECK(tb.length == 1);
  CHECK(tb.bound == 0.0);
}

TEST_CASE("cycle bound requires the member value below one") {
  auto values = [](int) { return 1.2; };
  CHECK_THROWS_AS(polya_tail_length(PolyaKind::Cyc, values, 0.3, 1e-6), DomainError);
}

TEST_CASE("set tail bound brackets the true value") {
  // members z + z^2, exact value exp(sum_{k<=1000} Y(a^k)/k)
  for (double a : {0.1, 0.2, 0.3}) {
    auto yv = [&](int k) {
      double x = std::pow(a, k);
      return x + x * x;
    };
    double exact = 0.0;
    for (int k = 1; k <= 1000; ++k) exact += yv(k) / k;
    exact = std::exp(exact);
    for (int l = 1; l <= 12; ++l) {
      double lower = 0.0;
      for (int i = 1; i < l; ++i) lower += yv(i) / i;
      lower = std::exp(lower);
      double gap = polya_tail_gaps(PolyaKind::Set, yv, a, l).back();
      CHECK(lower <= exact * (1 + 1e-12));
      CHECK(exact <= lower * (1 + gap) * (1 + 1e-12));
    }
  }
}

TEST_CASE("unlabeled rooted-tree values at powers of 0.3") {
  EvalRequest req;
  req.kind = SeriesKind::OGF;
  req.point = 0.3;
  req.eps = 1e-13;
  req.powers = 4;
  EvalState st = ogf_value(parse_system(kCayley), req);
  CHECK(st.converged);
  // reference values: exact rational partial sums of the coefficient series
  // (1500 terms, fully converged: the term ratio at 0.3 is about 0.887)
  CHECK(std::fabs(st.values_at_powers[0][0] - 0.55713908064707529) < 1e-12);
  CHECK(std::fabs(st.values_at_powers[1][0] - 0.099887147197752865) < 1e-12);
  CHECK(std::fabs(st.values_at_powers[2][0] - 0.027770629189489096) < 1e-12);
}

TEST_CASE("unlabeled value of a flat system matches the labeled one") {
  EvalRequest req;
  req.kind = SeriesKind::OGF;
  req.point = 0.1;
  req.eps = 1e-14;
  EvalState st = ogf_value(parse_system(kCatalan), req);
  CHECK(std::fabs(st.values[0] - 0.1127016653792583) < 1e-14);
}

TEST_CASE("unlabeled value at zero is exact") {
  EvalRequest req;
  req.kind = SeriesKind::OGF;
  req.point = 0.0;
  EvalState st = ogf_value(parse_system("Y1 = 1 + Z*Y1; Y2 = 1 + Y1*Y1;"), req);
  CHECK(st.values[0] == 1.0);
  CHECK(st.values[1] == 2.0);
}

TEST_CASE("unlabeled evaluation is deterministic") {
  EvalRequest req;
  req.kind = SeriesKind::OGF;
  req.point = 0.25;
  req.eps = 1e-12;
  SystemSpec sys = parse_system(kCayley);
  EvalState a = ogf_value(sys, req);
  EvalState b = ogf_value(sys, req);
  CHECK(a.values_at_powers == b.values_at_powers);
  CHECK(a.iterations == b.iterations);
  CHECK(a.tail_length == b.tail_length);
}

TEST_CASE("value agrees with the truncated-series partial sum") {
  SystemSpec sys = parse_system(kCayley);
  double alpha = 0.05;  // well inside the disk
  EvalRequest req;
  req.kind = SeriesKind::OGF;
  req.point = alpha;
  req.eps = 1e-12;
  EvalState st = ogf_value(sys, req);
  int n = truncation_order(sys, alpha, 1e-12);
  auto c = newton_solve<double>(sys, SeriesKind::OGF, static_cast<std::size_t>(n) + 1);
  double partial = 0.0;
  for (int i = 0; i <= n; ++i)
    partial += c[0][static_cast<std::size_t>(i)] * std::pow(alpha, i);
  CHECK(std::fabs(st.values[0] - partial) < 3e-12);
}

TEST_CASE("hybrid evaluation of a two-equation system with power sums") {
  SystemSpec sp = parse_system("S = Seq(Z + P, card >= 2); P = Set(Z + S, card >= 2);");
  double alpha = 0.05;
  EvalRequest req;
  req.kind = SeriesKind::OGF;
  req.point = alpha;
  req.eps = 1e-12;
  EvalState st = ogf_value(sp, req);
  auto c = newton_solve<Rat>(sp, SeriesKind::OGF, 64);
  for (std::size_t i = 0; i < 2; ++i) {
    Rat s = 0, a = 1, x(1, 20);
    for (std::size_t n = 0; n < 64; ++n) {
      s += c[i][n] * a;
      a *= x;
    }
    CHECK(std::fabs(st.values[i] - s.get_d()) < 1e-11);
  }
}

TEST_CASE("hybrid evaluation of a class with size-0 structures") {
  SystemSpec sys = parse_system("Y = Set(Z*Y);");
  REQUIRE(is_well_founded(sys).verdict);
  double alpha = 0.05;
  EvalRequest req;
  req.kind = SeriesKind::OGF;
  req.point = alpha;
  req.eps = 1e-12;
  EvalState st = ogf_value(sys, req);
  auto c = newton_solve<Rat>(sys, SeriesKind::OGF, 64);
  Rat s = 0, a = 1, x(1, 20);
  for (std::size_t n = 0; n < 64; ++n) {
    s += c[0][n] * a;
    a *= x;
  }
  CHECK(std::fabs(st.values[0] - s.get_d()) < 1e-11);
}

TEST_CASE("hybrid evaluation of the distinct-branch tree class") {
  SystemSpec sys = parse_system("A = Z * PSet(A);");
  double alpha = 0.2;
  EvalRequest req;
  req.kind = SeriesKind::OGF;
  req.point = alpha;
  req.eps = 1e-12;
  EvalState st = ogf_value(sys, req);
  auto c = newton_solve<Rat>(sys, SeriesKind::OGF, 96);
  Rat s = 0, a = 1, x(1, 5);
  for (std::size_t n = 0; n < 96; ++n) {
    s += c[0][n] * a;
    a *= x;
  }
  CHECK(std::fabs(st.values[0] - s.get_d()) < 1e-10);
}

TEST_CASE("numeric dominance") {
  SystemSpec cayley = parse_system(kCayley);
  double a = 0.2;
  double g = ogf_value(cayley, {SeriesKind::OGF, a, 1e-12, 200, 4, {}}).values[0];
  double t = ogf_value(dominant_system(cayley), {SeriesKind::OGF, a, 1e-12, 200, 4, {}})
                 .values[0];
  CHECK(g <= t + 1e-12);
}

TEST_SUITE_END();
