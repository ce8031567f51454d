#pragma once

#include <optional>
#include <string>
#include <vector>

#include "species/expr.hpp"

namespace species {

enum class Mode { Classical, Linear };

struct Equation {
  std::string name;
  ExprPtr rhs;        // algebraic part H_i
  ExprPtr integrand;  // G_i of  Y_i = H_i + Int(G_i); null outside linear mode
};

/// An ordered system of equations  Y_i = H_i(Z, Y_1..Y_m)  (classical mode)
/// or  Y_i = H_i + Int(G_i)  over ordered structures (linear mode).
struct SystemSpec {
  Mode mode = Mode::Classical;
  std::vector<std::string> sorts;  // atomic sorts; always contains "Z"
  std::vector<Equation> equations;

  std::size_t size() const { return equations.size(); }

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < equations.size(); ++i)
      if (equations[i].name == name) return static_cast<int>(i);
    return -1;
  }

  bool is_sort(const std::string& name) const {
    for (const auto& s : sorts)
      if (s == name) return true;
    return false;
  }

  bool has_integral_part() const {
    for (const auto& eq : equations)
      if (eq.integrand && !eq.integrand->is(NodeKind::Zero)) return true;
    return false;
  }
};

/// Parses the textual system format. Throws ParseError on bad input.
SystemSpec parse_system(const std::string& text);

std::string to_string(const SystemSpec& sys);

}  // namespace species
