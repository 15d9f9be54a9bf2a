#pragma once

#include <random>
#include <vector>

#include "alternant/evaluable.hpp"
#include "alternant/spline.hpp"

namespace testsupport {

// Deterministic per-test RNG; salt separates independent test sites.
std::mt19937 seeded_rng(unsigned salt);

// Smooth random target: a0 + a1*t + a2*sin(w1*t + p1) + a3*cos(w2*t + p2).
alternant::EvaluableFunction random_smooth(std::mt19937& rng,
                                           alternant::Interval dom);

// Random knot vector with 1..max_interior well-separated interior knots and
// per-piece degrees in 1..max_degree.
alternant::KnotVector random_knots(std::mt19937& rng, alternant::Interval dom,
                                   int max_interior, int max_degree);

// Random continuous spline over kv: per-piece coefficients in [-scale, scale]
// (normalized piece coordinates), constants stitched for continuity.
alternant::Spline random_continuous_spline(std::mt19937& rng,
                                           const alternant::KnotVector& kv,
                                           double scale);

struct LatticeSearchResult {
  bool found = false;
  long combos_tested = 0;
};

// Brute-force search for an admissible one-sided correction at interior knot
// `knot_index` with residual sign `s`: candidates are continuous piecewise
// polynomials on the active side (pieces knot_index..p when `left`, else
// 0..knot_index-1), zero on the other side, with coefficients drawn from the
// lattice {-1, -1/2, 0, 1/2, 1} in normalized piece coordinates.  A candidate
// is admissible when it anchors with sign s at the knot and a small step
// sigma - lambda*delta does not degrade the deviation.  Independent of the
// pair-counting existence machinery.
LatticeSearchResult lattice_family_search(const alternant::Spline& sigma,
                                          const alternant::EvaluableFunction& f,
                                          int knot_index, int s, bool left,
                                          double theta_value);

// Longest alternating-sign subsequence at the given level among the sample
// abscissae (dense grid plus refined local extremizers of g): the recount
// that certifies maximality of the greedy alternance extraction.
int longest_alternating_count(const alternant::EvaluableFunction& g,
                              double level, int grid_size);

}  // namespace testsupport
