#pragma once

#include <utility>
#include <vector>

#include "alternant/evaluable.hpp"
#include "alternant/extrema.hpp"
#include "alternant/polynomial.hpp"

namespace alternant {

// Maximal beta-alternance of a recentred function g (max g = -min g = M > 0):
// pairs [t_i^-, t_i^+] on which eps * (-1)^i * g reaches beta * M, separated
// by regions where |g| stays below that level.  k() is the number of sign
// alternations; the alternance certifies that no polynomial of degree
// <= k()-1 approximates g better than beta * ||g||.
struct AlternatingSequence {
  double beta = 0.0;
  int eps = 0;         // sign of g on the first pair
  double big_m = 0.0;  // M = ||g||
  double level = 0.0;  // beta * M, the working threshold
  std::vector<std::pair<double, double>> pairs;  // (t_i^-, t_i^+), k()+1 of them
  std::vector<double> peaks;  // per-pair argmax of the signed function

  int k() const { return static_cast<int>(pairs.size()) - 1; }
};

// Builds the alternance by a left-to-right scan of a merged sample set
// (uniform grid plus refined local extremizers) with bisection-refined level
// crossings.  Level comparisons use tol (absolute; < 0 selects 1e-9 * M).
// Throws std::invalid_argument when g is degenerate (M <= tol) or not
// recentred (|max + min| > 10 * tol).
AlternatingSequence build_beta_alternance(const EvaluableFunction& g,
                                          double beta, double tol = -1.0,
                                          int grid_size = kDefaultGrid);

// k of the alternance alone.
int count_k(const EvaluableFunction& g, double beta, double tol = -1.0,
            int grid_size = kDefaultGrid);

struct DeviationCheck {
  bool holds = false;
  double deviation = 0.0;  // ||g - p||
  double threshold = 0.0;  // beta * M
};

// Verifies the lower-bound certificate: every polynomial p with
// deg(p) <= k-1 has ||g - p|| >= beta * M.  Throws when p's degree bound
// exceeds k-1 (the certificate says nothing about higher degrees).
DeviationCheck min_polynomial_deviation_check(const EvaluableFunction& g,
                                              const AlternatingSequence& seq,
                                              const Polynomial& p,
                                              int grid_size = kDefaultGrid);

}  // namespace alternant
