#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "alternant/evaluable.hpp"

namespace alternant {

constexpr int kDefaultGrid = 4097;

// One-sided extremum estimate: the refined best value, every refined
// extremizer whose value ties the best within refine_tol (strictly
// increasing), and the parameters that produced it.
struct ExtremumEstimate {
  double value = 0.0;
  std::vector<double> argpoints;
  int grid_size = 0;
  double refine_tol = 0.0;
};

struct ExtremaPair {
  ExtremumEstimate max;
  ExtremumEstimate min;
};

// Scans a uniform grid of grid_size points, golden-refines every local
// extremum bracket to refine_tol in the abscissa, and applies the tie rule.
// refine_tol < 0 selects the default 1e-12 * domain length; grid_size >= 33.
ExtremaPair extrema(const EvaluableFunction& g, int grid_size = kDefaultGrid,
                    double refine_tol = -1.0);

// max(|max|, |min|) over the domain — the uniform norm estimate.
double sup_norm(const EvaluableFunction& g, int grid_size = kDefaultGrid,
                double refine_tol = -1.0);

// Shift making max + min = 0: returns (shift, g - shift) with
// shift = (max + min) / 2.
std::pair<double, EvaluableFunction> recentre(const EvaluableFunction& g,
                                              int grid_size = kDefaultGrid,
                                              double refine_tol = -1.0);

// Estimate of inf{ |t - s| : |g(t) - g(s)| >= delta } by a grid-pair scan
// followed by local bisection tightening; returns the domain length when no
// pair qualifies.  delta must be > 0.
double inverse_modulus(const EvaluableFunction& g, double delta,
                       int grid_size = kDefaultGrid);

namespace detail {

// Callable-level core shared by the public API and by inner loops that work
// on residuals without constructing EvaluableFunction wrappers.

// Golden-section maximization over [lo, hi] down to abscissa tolerance xtol;
// returns (argmax, max value).
std::pair<double, double> golden_max(const std::function<double(double)>& fn,
                                     double lo, double hi, double xtol);

struct ScanResult {
  double max_value;
  std::vector<double> max_points;
  double min_value;
  std::vector<double> min_points;
};

// Grid scan + bracket refinement + tie rule on a raw callable.
ScanResult scan_extrema(const std::function<double(double)>& fn, double lo,
                        double hi, int grid_size, double xtol);

// max |fn| over [lo, hi] via scan_extrema.
double sup_norm(const std::function<double(double)>& fn, double lo, double hi,
                int grid_size, double xtol);

// Abscissae of every golden-refined local extremum (maxima and minima,
// endpoints included), sorted and deduplicated.  Used to enrich sample sets
// where tangential level attainments must not be missed.
std::vector<double> local_extremizers(const std::function<double(double)>& fn,
                                      double lo, double hi, int grid_size,
                                      double xtol);

}  // namespace detail

}  // namespace alternant
