#include <cctype>
#include <functional>
#include <map>
#include <set>

#include "species/errors.hpp"
#include "species/system.hpp"

namespace species {

namespace {

struct Token {
  enum Type { Ident, Nat, Sym, End } type = End;
  std::string text;
  std::uint64_t value = 0;  // Nat
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) { next(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    next();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(tok_.line, tok_.col, msg);
  }

 private:
  void next() {
    skip_space();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= s_.size()) {
      tok_.type = Token::End;
      tok_.text = "<end of input>";
      return;
    }
    char c = s_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        advance();
      tok_.type = Token::Ident;
      tok_.text = s_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      std::uint64_t v = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        std::uint64_t d = static_cast<std::uint64_t>(s_[pos_] - '0');
        if (v > (CardConstraint::kInf - d) / 10)
          throw ParseError(line_, col_, "number literal too large");
        v = v * 10 + d;
        advance();
      }
      tok_.type = Token::Nat;
      tok_.text = s_.substr(start, pos_ - start);
      tok_.value = v;
      return;
    }
    // multi-char symbols first
    for (const char* sym : {">=", "<=", ".."}) {
      if (s_.compare(pos_, 2, sym) == 0) {
        tok_.type = Token::Sym;
        tok_.text = sym;
        advance();
        advance();
        return;
      }
    }
    if (std::string("+*=();,[]").find(c) != std::string::npos) {
      tok_.type = Token::Sym;
      tok_.text = std::string(1, c);
      advance();
      return;
    }
    throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
  }

  void skip_space() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '#') {  // line comment
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

const std::set<std::string> kReserved = {"Seq", "Set",  "Cyc", "PSet", "Int",   "card",
                                         "in",  "inf",  "sort", "mode", "linear", "Z"};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  SystemSpec run() {
    SystemSpec sys;
    sys.sorts = {"Z"};
    if (lex_.peek().type == Token::Ident && lex_.peek().text == "mode") {
      lex_.take();
      expect_ident("linear");
      expect_sym(";");
      sys.mode = Mode::Linear;
    }
    while (lex_.peek().type == Token::Ident && lex_.peek().text == "sort") {
      lex_.take();
      Token name = lex_.take();
      if (name.type != Token::Ident || kReserved.count(name.text))
        throw ParseError(name.line, name.col, "expected a fresh sort name");
      for (const auto& s : sys.sorts)
        if (s == name.text)
          throw ParseError(name.line, name.col, "duplicate sort '" + name.text + "'");
      sys.sorts.push_back(name.text);
      expect_sym(";");
    }
    if (lex_.peek().type == Token::End) lex_.fail("expected at least one equation");
    while (lex_.peek().type != Token::End) parse_equation(sys);
    resolve(sys);
    split_integrals(sys);
    return sys;
  }

 private:
  void parse_equation(SystemSpec& sys) {
    Token name = lex_.take();
    if (name.type != Token::Ident)
      throw ParseError(name.line, name.col, "expected an equation name, got '" + name.text + "'");
    if (kReserved.count(name.text))
      throw ParseError(name.line, name.col, "'" + name.text + "' is reserved");
    if (sys.index_of(name.text) >= 0)
      throw ParseError(name.line, name.col, "duplicate equation name '" + name.text + "'");
    for (const auto& s : sys.sorts)
      if (s == name.text)
        throw ParseError(name.line, name.col, "'" + name.text + "' is already a sort");
    expect_sym("=");
    ExprPtr rhs = parse_expr();
    expect_sym(";");
    sys.equations.push_back({name.text, std::move(rhs), nullptr});
  }

  ExprPtr parse_expr() {
    std::vector<ExprPtr> terms;
    terms.push_back(parse_term());
    while (lex_.peek().type == Token::Sym && lex_.peek().text == "+") {
      lex_.take();
      terms.push_back(parse_term());
    }
    return sum(std::move(terms));
  }

  ExprPtr parse_term() {
    std::vector<ExprPtr> factors;
    factors.push_back(parse_factor());
    while (lex_.peek().type == Token::Sym && lex_.peek().text == "*") {
      lex_.take();
      factors.push_back(parse_factor());
    }
    return prod(std::move(factors));
  }

  ExprPtr parse_factor() {
    Token t = lex_.peek();
    if (t.type == Token::Nat) {
      lex_.take();
      if (t.value == 0) return zero();
      if (t.value == 1) return one();
      throw ParseError(t.line, t.col, "only the constants 0 and 1 are classes");
    }
    if (t.type == Token::Sym && t.text == "(") {
      lex_.take();
      ExprPtr e = parse_expr();
      expect_sym(")");
      return e;
    }
    if (t.type != Token::Ident)
      throw ParseError(t.line, t.col, "expected a factor, got '" + t.text + "'");
    lex_.take();
    if (t.text == "Seq" || t.text == "Set" || t.text == "Cyc" || t.text == "PSet")
      return parse_ctor(t);
    if (t.text == "Int") {
      expect_sym("(");
      ExprPtr child = parse_expr();
      expect_sym(")");
      return integral(std::move(child));
    }
    if (t.text == "Z") return atom("Z");
    if (kReserved.count(t.text))
      throw ParseError(t.line, t.col, "'" + t.text + "' is reserved");
    return ref(t.text);  // resolved to Atom/Ref later
  }

  ExprPtr parse_ctor(const Token& head) {
    expect_sym("(");
    ExprPtr child = parse_expr();
    CardConstraint c = CardConstraint::full();
    bool explicit_card = false;
    if (lex_.peek().type == Token::Sym && lex_.peek().text == ",") {
      lex_.take();
      c = parse_card();
      explicit_card = true;
    }
    expect_sym(")");
    if (head.text == "PSet") {
      if (explicit_card)
        throw ParseError(head.line, head.col, "PSet does not take a cardinality constraint");
      return pset(std::move(child));
    }
    if (head.text == "Seq") return seq(std::move(child), std::move(c));
    if (head.text == "Set") return set_of(std::move(child), std::move(c));
    return cyc(std::move(child), std::move(c));  // card 0 dropped by normalization
  }

  CardConstraint parse_card() {
    expect_ident("card");
    Token op = lex_.take();
    if (op.type == Token::Ident && op.text == "in") {
      expect_sym("[");
      std::vector<CardConstraint::Interval> ivs;
      ivs.push_back(parse_range());
      while (lex_.peek().type == Token::Sym && lex_.peek().text == ",") {
        lex_.take();
        ivs.push_back(parse_range());
      }
      expect_sym("]");
      return CardConstraint::of(std::move(ivs));
    }
    if (op.type == Token::Sym && (op.text == ">=" || op.text == "<=" || op.text == "=")) {
      Token n = lex_.take();
      if (n.type != Token::Nat) throw ParseError(n.line, n.col, "expected a number");
      if (op.text == ">=") return CardConstraint::at_least(n.value);
      if (op.text == "<=") return CardConstraint::at_most(n.value);
      return CardConstraint::exactly(n.value);
    }
    throw ParseError(op.line, op.col, "expected >=, <=, = or 'in' after 'card'");
  }

  CardConstraint::Interval parse_range() {
    Token lo = lex_.take();
    if (lo.type != Token::Nat) throw ParseError(lo.line, lo.col, "expected a number");
    expect_sym("..");
    Token hi = lex_.take();
    std::uint64_t hival;
    if (hi.type == Token::Nat)
      hival = hi.value;
    else if (hi.type == Token::Ident && hi.text == "inf")
      hival = CardConstraint::kInf;
    else
      throw ParseError(hi.line, hi.col, "expected a number or 'inf'");
    if (hival < lo.value) throw ParseError(lo.line, lo.col, "empty range");
    return {lo.value, hival};
  }

  void expect_sym(const std::string& s) {
    Token t = lex_.take();
    if (t.type != Token::Sym || t.text != s)
      throw ParseError(t.line, t.col, "expected '" + s + "', got '" + t.text + "'");
  }

  void expect_ident(const std::string& s) {
    Token t = lex_.take();
    if (t.type != Token::Ident || t.text != s)
      throw ParseError(t.line, t.col, "expected '" + s + "', got '" + t.text + "'");
  }

  // Turn provisional Ref nodes whose name is a declared sort into atoms and
  // reject names that are neither sorts nor equations.
  void resolve(SystemSpec& sys) {
    std::function<ExprPtr(const ExprPtr&)> walk = [&](const ExprPtr& e) -> ExprPtr {
      switch (e->kind()) {
        case NodeKind::Ref:
          if (sys.is_sort(e->name())) return atom(e->name());
          if (sys.index_of(e->name()) < 0)
            throw ParseError(1, 1, "reference to unknown name '" + e->name() + "'");
          return e;
        case NodeKind::Sum:
        case NodeKind::Prod: {
          std::vector<ExprPtr> kids;
          for (const auto& k : e->kids()) kids.push_back(walk(k));
          return e->kind() == NodeKind::Sum ? sum(std::move(kids)) : prod(std::move(kids));
        }
        case NodeKind::Seq: return seq(walk(e->child()), e->card());
        case NodeKind::Set: return set_of(walk(e->child()), e->card());
        case NodeKind::Cyc: return cyc(walk(e->child()), e->card());
        case NodeKind::PSet: return pset(walk(e->child()));
        case NodeKind::Integral: return integral(walk(e->child()));
        default: return e;
      }
    };
    for (auto& eq : sys.equations) eq.rhs = walk(eq.rhs);
  }

  // Linear mode:  Y = H + Int(G1) + Int(G2) + ...  becomes rhs H, integrand
  // G1+G2+...  Integrals anywhere else are rejected, as is any integral in
  // classical mode.
  void split_integrals(SystemSpec& sys) {
    auto contains_integral = [](const ExprPtr& e) {
      std::function<bool(const ExprPtr&)> walk = [&](const ExprPtr& x) -> bool {
        if (x->is(NodeKind::Integral)) return true;
        for (const auto& k : x->kids())
          if (walk(k)) return true;
        return false;
      };
      return walk(e);
    };
    auto contains_pset = [](const ExprPtr& e) {
      std::function<bool(const ExprPtr&)> walk = [&](const ExprPtr& x) -> bool {
        if (x->is(NodeKind::PSet)) return true;
        for (const auto& k : x->kids())
          if (walk(k)) return true;
        return false;
      };
      return walk(e);
    };
    for (auto& eq : sys.equations) {
      if (sys.mode == Mode::Classical) {
        if (contains_integral(eq.rhs))
          throw ParseError(1, 1, "Int(...) requires a 'mode linear;' directive");
        continue;
      }
      if (contains_pset(eq.rhs)) throw ParseError(1, 1, "PSet is not available in linear mode");
      std::vector<ExprPtr> keep, under;
      std::vector<ExprPtr> terms =
          eq.rhs->is(NodeKind::Sum) ? eq.rhs->kids() : std::vector<ExprPtr>{eq.rhs};
      for (const auto& t : terms) {
        if (t->is(NodeKind::Integral)) {
          if (contains_integral(t->child()))
            throw ParseError(1, 1,
                             "nested Int(...) is not supported (introduce an auxiliary "
                             "variable)");
          under.push_back(t->child());
        } else {
          if (contains_integral(t))
            throw ParseError(1, 1,
                             "Int(...) must be a top-level summand of an equation "
                             "(introduce an auxiliary variable)");
          keep.push_back(t);
        }
      }
      eq.rhs = sum(std::move(keep));
      eq.integrand = sum(std::move(under));
    }
  }

  Lexer lex_;
};

}  // namespace

SystemSpec parse_system(const std::string& text) { return Parser(text).run(); }

std::string to_string(const SystemSpec& sys) {
  std::string out;
  if (sys.mode == Mode::Linear) out += "mode linear;\n";
  for (const auto& s : sys.sorts)
    if (s != "Z") out += "sort " + s + ";\n";
  for (const auto& eq : sys.equations) {
    out += eq.name + " = ";
    bool have_h = !eq.rhs->is(NodeKind::Zero);
    if (have_h || !eq.integrand || eq.integrand->is(NodeKind::Zero))
      out += to_string(eq.rhs);
    if (eq.integrand && !eq.integrand->is(NodeKind::Zero)) {
      if (have_h) out += " + ";
      out += "Int(" + to_string(eq.integrand) + ")";
    }
    out += ";\n";
  }
  return out;
}

}  // namespace species
