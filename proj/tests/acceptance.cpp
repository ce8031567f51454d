// Acceptance suite: one check per release criterion, one line per criterion.
// Exits nonzero when any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "species/integral.hpp"
#include "species/numeric.hpp"
#include "species/solve.hpp"

using namespace species;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string run_cli(const std::string& args, int* status) {
  std::string cmd = std::string(SPECIES_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return "";
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  *status = WEXITSTATUS(pclose(p));
  return out;
}

std::string data(const std::string& name) { return std::string(SPECIES_DATA_DIR) + "/" + name; }

bool int_row_matches(const Series<Rat>& s, std::size_t from, const std::vector<long>& want) {
  for (std::size_t i = 0; i < want.size(); ++i) {
    Rat c = s[from + i];
    if (c.get_den() != 1 || c.get_num() != want[i]) return false;
  }
  return true;
}

Outcome criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  int status = 0;
  std::string out = run_cli("count --kind ogf --terms 16 " + data("catalan.spec"), &status);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string expect =
      "T: 0 1 1 2 5 14 42 132 429 1430 4862 16796 58786 208012 742900 2674440\n";
  if (status != 0 || out != expect) return {false, "unexpected output"};
  if (secs >= 1.0) return {false, "took " + std::to_string(secs) + " s"};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.0f ms", secs * 1000);
  return {true, buf};
}

Outcome criterion2() {
  auto y = newton_solve<Rat>(parse_system("G = Z * Set(G);"), SeriesKind::EGF, 11);
  Rat fact(1);
  std::vector<long> expect{1, 2, 9, 64, 625, 7776, 117649, 2097152, 43046721, 1000000000};
  for (std::size_t n = 1; n <= 10; ++n) {
    fact *= Rat(static_cast<long>(n));
    if (y[0][n] * fact != Rat(expect[n - 1]))
      return {false, "mismatch at n = " + std::to_string(n)};
  }
  return {true, "f_n = n^(n-1), n = 1..10"};
}

Outcome criterion3() {
  auto y = newton_solve<Rat>(parse_system("G = Z * Set(G);"), SeriesKind::OGF, 11);
  if (!int_row_matches(y[0], 1, {1, 1, 2, 4, 9, 20, 48, 115, 286, 719}))
    return {false, "coefficient mismatch"};
  return {true, "n = 1..10 exact"};
}

Outcome criterion4() {
  auto y = newton_solve<Rat>(parse_system("A = Z * PSet(A);"), SeriesKind::OGF, 13);
  if (!int_row_matches(y[0], 1, {1, 1, 1, 2, 3, 6, 12, 25, 52, 113, 247, 548}))
    return {false, "coefficient mismatch"};
  return {true, "n = 1..12 exact"};
}

Outcome criterion5() {
  SystemSpec sys = parse_system(
      "mode linear; Y1 = Z + Int(Y2); Y2 = Int(Seq(Y1) * (1 + Y2));");
  auto y = solve_integral(sys, 9);
  std::vector<Rat> expect{Rat(0),     Rat(1),       Rat(1, 2),     Rat(1, 3),
                          Rat(7, 24), Rat(3, 10),   Rat(49, 144),  Rat(173, 420),
                          Rat(21059, 40320)};
  for (std::size_t i = 0; i < expect.size(); ++i)
    if (y[0][i] != expect[i]) return {false, "mismatch at z^" + std::to_string(i)};
  return {true, "exact rationals to z^8"};
}

Outcome criterion6() {
  struct Case {
    const char* text;
    bool verdict;
    WfReason reason;
  };
  std::vector<Case> cases{
      {"Y = Y;", false, WfReason::JacobianNotNilpotentAt0},
      {"Y = Y + Z*Y;", false, WfReason::JacobianNotNilpotentAt0},
      {"Y = Z*Y;", false, WfReason::ZeroCoordinate},
      {"Y1 = 1 + Z*Y1; Y2 = 1 + Y1*Y1;", true, WfReason::None},
      {"Y1 = 1 + Y2*Y1; Y2 = 1;", false, WfReason::NotPartiallyPolynomialInMarker},
  };
  for (const auto& c : cases) {
    WellFoundedReport r = is_well_founded(parse_system(c.text));
    if (r.verdict != c.verdict || r.reason != c.reason)
      return {false,
              std::string("wrong verdict for ") + c.text + " (" + to_string(r.reason) + ")"};
  }
  return {true, "5 verdicts with matching reasons"};
}

Outcome criterion7() {
  std::vector<std::vector<double>> trace;
  std::vector<double> v = egf_value(parse_system("G = Z * Set(G);"), 0.1, 1e-15, 30, &trace);
  double expect = 0.11183255915896296;
  double rel = std::fabs(v[0] - expect) / expect;
  if (rel >= 1e-14) return {false, "relative error " + std::to_string(rel)};
  if (trace.size() > 30) return {false, "too many iterations"};
  return {true, std::to_string(trace.size()) + " iterations"};
}

Outcome criterion8() {
  EvalRequest req;
  req.kind = SeriesKind::OGF;
  req.point = 0.3;
  req.eps = 1e-13;
  req.powers = 4;
  EvalState st = ogf_value(parse_system("G = Z * Set(G);"), req);
  std::array<double, 3> stated{0.55713917793231456, 0.099887162357064255,
                               0.027770629192262428};
  // the same quantities from exact 1500-term rational partial sums of the
  // (independently verified) coefficient sequence
  std::array<double, 3> series_value{0.55713908064707529, 0.099887147197752865,
                                     0.027770629189489096};
  std::ostringstream note;
  bool pass = true;
  for (std::size_t k = 0; k < 3; ++k) {
    double got = st.values_at_powers[k][0];
    if (std::fabs(got - stated[k]) >= 1e-12) {
      pass = false;
      note << " k=" << k + 1 << ": |got-stated| = " << std::fabs(got - stated[k])
           << " (|got-series| = " << std::fabs(got - series_value[k]) << ");";
    }
  }
  EvalRequest flat;
  flat.kind = SeriesKind::OGF;
  flat.point = 0.1;
  flat.eps = 1e-15;
  EvalState cat = ogf_value(parse_system("T = Z * Seq(T);"), flat);
  if (std::fabs(cat.values[0] - 0.1127016653792583) >= 1e-14) {
    pass = false;
    note << " catalan point value off;";
  } else {
    note << " catalan@0.1 ok;";
  }
  if (!pass)
    note << " [the pinned reference digits are inconsistent with the exact series value;"
            " kept as pinned]";
  return {pass, note.str()};
}

Outcome criterion9() {
  auto values = [](int k) {
    double a = std::pow(0.3, k);
    return a + a * a;
  };
  TailBound tb = polya_tail_length(PolyaKind::Set, values, 0.3, 1e-6);
  if (tb.length != 10) return {false, "L = " + std::to_string(tb.length)};
  std::vector<double> gaps = polya_tail_gaps(PolyaKind::Set, values, 0.3, 10);
  std::vector<double> expect{0.59,    0.064,    0.012,    0.0027,    0.00065,
                             0.00016, 0.000042, 0.000011, 0.0000030, 0.00000081};
  for (std::size_t i = 0; i < expect.size(); ++i) {
    double rel = std::fabs(gaps[i] - expect[i]) / expect[i];
    if (rel > 0.05)  // two significant figures
      return {false, "gap " + std::to_string(i + 1) + " off: " + std::to_string(gaps[i])};
  }
  return {true, "L = 10, gap sequence reproduced"};
}

Outcome criterion10() {
  SystemSpec sys = parse_system("T = Z * Seq(T);");
  int n = truncation_order(sys, 0.1, 1e-6);
  if (n != 9) return {false, "terms = " + std::to_string(n)};
  double u = egf_value(sys, 0.1, 1e-15, 60)[0];
  auto c = newton_solve<double>(sys, SeriesKind::OGF, 10);
  double resid = u;
  for (std::size_t i = 0; i < 10; ++i)
    resid -= c[0][i] * std::pow(0.1, static_cast<double>(i));
  if (!(resid > 0.5e-6 && resid < 1.0e-6)) return {false, "residual " + std::to_string(resid)};
  char buf[64];
  std::snprintf(buf, sizeof buf, "9 terms, residual %.2e", resid);
  return {true, buf};
}

Outcome criterion11() {
  std::vector<const char*> bundle{
      "T = Z * Seq(T);", "G = Z * Set(G);",
      "S = Seq(Z + P, card >= 2); P = Set(Z + S, card >= 2);",
      "Y1 = 1 + Z*Y1; Y2 = 1 + Y1*Y1;", "A = Z * PSet(A);"};
  // (a) fast solver equals the fixed-point reference, both series kinds
  for (const char* text : bundle) {
    SystemSpec sys = parse_system(text);
    for (SeriesKind kind : {SeriesKind::EGF, SeriesKind::OGF}) {
      auto slow = joyal_solve<Rat>(sys, kind, 64);
      auto fast = newton_solve<Rat>(sys, kind, 64);
      for (std::size_t i = 0; i < sys.size(); ++i)
        if (!(slow[i] == fast[i])) return {false, std::string("(a) mismatch: ") + text};
    }
  }
  // (b) prefix stability across levels
  for (const char* text : bundle) {
    SystemSpec sys = parse_system(text);
    SolveTrace<Rat> trace;
    newton_solve<Rat>(sys, SeriesKind::OGF, 64, &trace);
    for (std::size_t l = 1; l < trace.levels.size(); ++l)
      for (std::size_t i = 0; i < sys.size(); ++i) {
        const auto& prev = trace.levels[l - 1][i];
        const auto& cur = trace.levels[l][i];
        for (std::size_t t = 0; t < prev.order(); ++t)
          if (!(prev[t] == cur[t])) return {false, "(b) prefix changed"};
      }
  }
  // (c) flat classes: labeled equals unlabeled
  for (const char* text : {"T = Z * Seq(T);", "Y1 = 1 + Z*Y1; Y2 = 1 + Y1*Y1;",
                           "S = Seq(Z + P, card >= 2); P = Seq(Z + S, card >= 2);"}) {
    SystemSpec sys = parse_system(text);
    auto egf = newton_solve<Rat>(sys, SeriesKind::EGF, 64);
    auto ogf = newton_solve<Rat>(sys, SeriesKind::OGF, 64);
    for (std::size_t i = 0; i < sys.size(); ++i)
      if (!(egf[i] == ogf[i])) return {false, "(c) flat series differ"};
  }
  // (d) dominance, coefficientwise to 20
  {
    SystemSpec cayley = parse_system("G = Z * Set(G);");
    auto g = newton_solve<Rat>(cayley, SeriesKind::OGF, 21);
    auto t = newton_solve<Rat>(dominant_system(cayley), SeriesKind::OGF, 21);
    for (std::size_t i = 0; i < 21; ++i)
      if (g[0][i] > t[0][i]) return {false, "(d) majorant violated"};
    SystemSpec sp = parse_system("S = Seq(Z + P, card >= 2); P = Set(Z + S, card >= 2);");
    auto a = newton_solve<Rat>(sp, SeriesKind::OGF, 21);
    auto b = newton_solve<Rat>(dominant_system(sp), SeriesKind::OGF, 21);
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < 21; ++i)
        if (a[c][i] > b[c][i]) return {false, "(d) majorant violated"};
  }
  // (e) multiplication-count scaling of the fast solver
  SystemSpec cat = parse_system("T = Z * Seq(T);");
  std::vector<std::uint64_t> cost;
  for (std::size_t n : {128u, 256u, 512u, 1024u}) {
    reset_ring_mul_count();
    newton_solve<BigInt>(cat, SeriesKind::OGF, n);
    cost.push_back(ring_mul_count());
  }
  std::ostringstream ratios;
  ratios.precision(3);
  for (std::size_t i = 1; i < cost.size(); ++i) {
    double r = static_cast<double>(cost[i]) / static_cast<double>(cost[i - 1]);
    ratios << (i > 1 ? ", " : "") << r;
    if (r > 3.5) return {false, "(e) cost ratio " + std::to_string(r)};
  }
  return {true, "(a)-(d) exact; (e) ratios " + ratios.str()};
}

Outcome criterion12() {
  SystemSpec cat = parse_system("T = Z * Seq(T);");
  auto t0 = std::chrono::steady_clock::now();
  auto y = newton_solve<BigInt>(cat, SeriesKind::OGF, 4096);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // spot-check a known value before trusting the timing
  if (y[0][15] != BigInt(2674440)) return {false, "wrong coefficients"};
  if (secs >= 30.0) return {false, "took " + std::to_string(secs) + " s"};
  char buf[64];
  std::snprintf(buf, sizeof buf, "4096 exact terms in %.2f s", secs);
  return {true, buf};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Entry> entries{
      {1, "plane-tree coefficients via the CLI, under 1 s", criterion1},
      {2, "labeled rooted-tree counts n^(n-1)", criterion2},
      {3, "unlabeled rooted-tree counts", criterion3},
      {4, "distinct-branch tree counts (PSet)", criterion4},
      {5, "mobile-tree labeled series (integral system)", criterion5},
      {6, "well-foundedness verdicts and reasons", criterion6},
      {7, "labeled numeric value, rooted trees at 0.1", criterion7},
      {8, "unlabeled numeric values at powers of 0.3 / 0.1", criterion8},
      {9, "power-sum cut length and gap sequence", criterion9},
      {10, "truncation order at rho = 0.1", criterion10},
      {11, "property suites (oracle equality, stability, flatness, dominance, cost)",
       criterion11},
      {12, "scale run: 4096 exact terms under 30 s", criterion12},
  };
  int failures = 0;
  for (const auto& e : entries) {
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    std::printf("[%s] %2d. %s%s%s\n", o.pass ? "PASS" : "FAIL", e.id, e.name,
                o.detail.empty() ? "" : " -- ", o.detail.c_str());
    if (!o.pass) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
