#pragma once

#include <vector>

#include "alternant/evaluable.hpp"
#include "alternant/extrema.hpp"
#include "alternant/polynomial.hpp"
#include "alternant/spline.hpp"

namespace alternant {
namespace oracle {

// Discrete linear minimax: coefficients minimizing max_i |rows[i].c - values[i]|.
// Solved by a two-phase dense simplex on the exact LP dual with Bland's rule
// (deterministic); the optimal basis is the classical reference set of the
// exchange method.
struct MinimaxSolution {
  std::vector<double> coefficients;
  double value = 0.0;             // the minimax deviation
  std::vector<int> reference;     // active sample indices (size = dim + 1)
};

MinimaxSolution linear_minimax(const std::vector<std::vector<double>>& rows,
                               const std::vector<double>& values);

struct PolyMinimaxResult {
  Polynomial polynomial;
  double value = 0.0;
  std::vector<double> reference;  // active grid abscissae

  explicit PolyMinimaxResult(Polynomial p) : polynomial(std::move(p)) {}
};

// Best degree-n polynomial on a uniform grid (grid minimax).  Requires
// grid_size >= 4 * (degree + 2) so the reference has room to alternate.
PolyMinimaxResult grid_minimax_poly(const EvaluableFunction& f, int degree,
                                    int grid_size);

struct SplineMinimaxResult {
  Spline spline;
  double value = 0.0;
  std::vector<double> reference;

  explicit SplineMinimaxResult(Spline s) : spline(std::move(s)) {}
};

// Best continuous spline over the knot vector on a uniform grid.  The basis
// stacks a global constant with per-piece ramp powers continued as constants,
// so continuity holds identically and the LP needs no equality rows.
// Requires the grid to cover every piece with >= 4 * (n_i + 2) points.
SplineMinimaxResult grid_minimax_spline(const EvaluableFunction& f,
                                        const KnotVector& kv, int grid_size);

struct ScanAlternance {
  std::vector<double> points;  // strictly increasing attainment abscissae
  int eps = 0;                 // sign at the first point
  double big_m = 0.0;          // refined max |g|
  int k() const { return static_cast<int>(points.size()) - 1; }
};

// Greedy left-to-right extraction of a maximal beta-alternating point set
// from grid samples enriched with locally refined extrema.  Independent of
// the pair-based construction; used to cross-check k and eps.
ScanAlternance scan_alternance(const EvaluableFunction& g, double beta,
                               int grid_size = kDefaultGrid,
                               double tol = -1.0);

}  // namespace oracle
}  // namespace alternant
