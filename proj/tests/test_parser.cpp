#include <doctest.h>

#include "species/errors.hpp"
#include "species/system.hpp"

using namespace species;

TEST_SUITE_BEGIN("parser");

TEST_CASE("catalan maps to product of atom and sequence") {
  SystemSpec sys = parse_system("T = Z * Seq(T);");
  REQUIRE(sys.size() == 1);
  const Expr& rhs = *sys.equations[0].rhs;
  REQUIRE(rhs.kind() == NodeKind::Prod);
  REQUIRE(rhs.kids().size() == 2);
  CHECK(rhs.kids()[0]->kind() == NodeKind::Atom);
  CHECK(rhs.kids()[0]->name() == "Z");
  const Expr& s = *rhs.kids()[1];
  REQUIRE(s.kind() == NodeKind::Seq);
  CHECK(s.card().is_full());
  CHECK(s.child()->kind() == NodeKind::Ref);
  CHECK(s.child()->name() == "T");
}

TEST_CASE("two-equation system with lower-bounded cardinalities") {
  SystemSpec sys = parse_system("S = Seq(Z + P, card >= 2); P = Set(Z + S, card >= 2);");
  REQUIRE(sys.size() == 2);
  CHECK(sys.equations[0].name == "S");
  CHECK(sys.equations[1].name == "P");
  CHECK(sys.equations[0].rhs->kind() == NodeKind::Seq);
  CHECK(sys.equations[0].rhs->card() == CardConstraint::at_least(2));
  CHECK(sys.equations[1].rhs->kind() == NodeKind::Set);
}

TEST_CASE("syntax error carries the position of the stray token") {
  try {
    parse_system("A = Z;; ");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.col() == 7);
  }
}

TEST_CASE("duplicate equation names are rejected") {
  CHECK_THROWS_AS(parse_system("A = Z; A = Z;"), ParseError);
}

TEST_CASE("unknown references are rejected") {
  CHECK_THROWS_AS(parse_system("A = B;"), ParseError);
}

TEST_CASE("reserved words cannot name equations") {
  CHECK_THROWS_AS(parse_system("Seq = Z;"), ParseError);
  CHECK_THROWS_AS(parse_system("Z = Z;"), ParseError);
}

TEST_CASE("cardinality spellings") {
  SystemSpec sys = parse_system(
      "A = Set(Z, card = 3) + Set(Z, card <= 2) + Set(Z, card in [1..2, 5..inf]);");
  const auto& kids = sys.equations[0].rhs->kids();
  REQUIRE(kids.size() == 3);
  CHECK(kids[0]->card() == CardConstraint::exactly(3));
  CHECK(kids[1]->card() == CardConstraint::at_most(2));
  CHECK(kids[2]->card() ==
        CardConstraint::of({{1, 2}, {5, CardConstraint::kInf}}));
}

TEST_CASE("cycle cardinality zero is dropped by normalization") {
  SystemSpec sys = parse_system("A = Z + Cyc(Z, card <= 2);");
  // Cyc with card in {0,1,2} normalizes to {1,2}
  const Expr& c = *sys.equations[0].rhs->kids()[1];
  REQUIRE(c.kind() == NodeKind::Cyc);
  CHECK(c.card() == CardConstraint::of({{1, 2}}));
  // a pure size-0 cycle is the empty class
  SystemSpec z = parse_system("A = Z + Cyc(Z, card = 0);");
  CHECK(z.equations[0].rhs->kind() == NodeKind::Atom);
}

TEST_CASE("constraint normalization is idempotent") {
  std::vector<std::vector<CardConstraint::Interval>> raws{
      {{3, 5}, {1, 2}},                       // adjacent, out of order
      {{0, CardConstraint::kInf}},            // full
      {{2, 4}, {4, 9}, {20, CardConstraint::kInf}},  // overlapping
      {{7, 3}},                               // empty after filtering
      {{0, 0}, {2, 2}, {4, 4}},
  };
  for (auto& raw : raws) {
    CardConstraint once = CardConstraint::of(raw);
    CardConstraint twice = CardConstraint::of(once.intervals());
    CHECK(once == twice);
  }
  CHECK(CardConstraint::of({{1, 2}, {3, 5}}) == CardConstraint::of({{1, 5}}));
}

TEST_CASE("declared sorts parse as atoms") {
  SystemSpec sys = parse_system("sort U; A = Z * U;");
  CHECK(sys.is_sort("U"));
  const Expr& rhs = *sys.equations[0].rhs;
  CHECK(rhs.kids()[1]->kind() == NodeKind::Atom);
  CHECK(rhs.kids()[1]->name() == "U");
}

TEST_CASE("comments and whitespace are skipped") {
  SystemSpec sys = parse_system("# heading\nT = Z * # inline\n  Seq(T);\n");
  CHECK(sys.size() == 1);
}

TEST_CASE("integral nodes need linear mode") {
  CHECK_THROWS_AS(parse_system("B = Z + Int(B*B);"), ParseError);
  SystemSpec sys = parse_system("mode linear; B = Z + Int(B*B);");
  REQUIRE(sys.mode == Mode::Linear);
  CHECK(sys.equations[0].rhs->kind() == NodeKind::Atom);
  REQUIRE(sys.equations[0].integrand != nullptr);
  CHECK(sys.equations[0].integrand->kind() == NodeKind::Prod);
}

TEST_CASE("nested integrals are rejected") {
  CHECK_THROWS_AS(parse_system("mode linear; B = Z * Int(B);"), ParseError);
  CHECK_THROWS_AS(parse_system("mode linear; B = Int(Int(B));"), ParseError);
}

TEST_CASE("PSet takes no cardinality and is banned in linear mode") {
  CHECK_THROWS_AS(parse_system("A = PSet(Z, card >= 1);"), ParseError);
  CHECK_THROWS_AS(parse_system("mode linear; A = Z + Int(PSet(A));"), ParseError);
}

TEST_CASE("print-parse-print is a fixed point") {
  for (const char* text : {
           "T = Z * Seq(T);",
           "S = Seq(Z + P, card >= 2); P = Set(Z + S, card >= 2);",
           "Y1 = 1 + Z*Y1; Y2 = 1 + Y1*Y1;",
           "A = Z * PSet(A);",
           "sort U; A = Cyc(Z * U + A, card in [2..4, 7..inf]);",
           "mode linear; B = Z + Int(B * B);",
       }) {
    SystemSpec sys = parse_system(text);
    std::string once = to_string(sys);
    std::string twice = to_string(parse_system(once));
    CHECK(once == twice);
  }
}

TEST_SUITE_END();
