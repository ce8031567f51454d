#pragma once

#include <map>
#include <string>
#include <vector>

#include "species/system.hpp"

namespace species {

/// Derivative with respect to the unknown named `var` (a Ref target).
/// Constructors with cardinality constraints are differentiated interval by
/// interval; the result is again a plain expression (no subtraction nodes).
ExprPtr differentiate(const ExprPtr& e, const std::string& var);

/// Derivative with respect to an atomic sort (same rules, the atom is the
/// active variable). Used by the integral-system solver for dH/dZ.
ExprPtr differentiate_sort(const ExprPtr& e, const std::string& sort);

/// Matrix entry (i,j) = d H_i / d Y_j, simplified.
std::vector<std::vector<ExprPtr>> jacobian(const SystemSpec& sys);

/// Capture-free simultaneous substitution for named atoms and references.
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& bindings);

}  // namespace species
