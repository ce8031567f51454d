#pragma once

#include "species/analysis.hpp"
#include "species/series_matrix.hpp"

namespace species {

/// Decides whether the integral system  Y = H(Z,Y) + Int(G(T,Y(T)))  has a
/// unique ordered-structure solution. The verdict and any failing condition
/// go in the report; constant_term holds Y(0) = H^m(0,0) on success.
WellFoundedReport check_integral_wf(const SystemSpec& sys);

/// First n coefficients of the labeled counting series of the solution,
/// by the doubling recursion on (U, M, M^-1, Y). Coefficients are rational:
/// integration forces denominators.
std::vector<Series<Rat>> solve_integral(const SystemSpec& sys, std::size_t n);

/// W Int(W^-1 B) mod z^n: the particular solution of Y' = A Y + B built from
/// a fundamental matrix W (W(0) = Id) and its approximate inverse.
std::vector<Series<Rat>> variation_of_constants(const SeriesMatrix<Rat>& w,
                                                const SeriesMatrix<Rat>& wbar,
                                                const std::vector<Series<Rat>>& b,
                                                std::size_t n);

/// One doubling refinement of the fundamental solution of Y' = A Y:
/// W + W Int(W^-1 (A W - W')) mod z^n.
SeriesMatrix<Rat> refine_fundamental(const SeriesMatrix<Rat>& a, const SeriesMatrix<Rat>& w,
                                     const SeriesMatrix<Rat>& wbar, std::size_t n);

/// Reference solver: plain contraction  Y <- H(z,Y) + Int(G(z,Y))  iterated
/// to a fixed point mod z^n. Slow; used to cross-check solve_integral.
std::vector<Series<Rat>> integral_fixed_point(const SystemSpec& sys, std::size_t n);

}  // namespace species
