#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "alternant/alternance.hpp"
#include "alternant/evaluable.hpp"
#include "alternant/spline_fit.hpp"

namespace alternant {

struct FreeKnotParams {
  FitParams fit;                    // inner fixed-knot solver configuration
  double beta_cert = 1.0 - 1e-7;    // certification level used by theta
  double extreme_rtol = 1e-6;       // |dev| >= theta*(1 - rtol) marks a knot extreme
  double neutral_band = 1e-8;       // relative band for a vanishing slope jump
  double tol = -1.0;                // degenerate threshold on theta (auto when < 0)
  double grow_tol = 1e-9;           // allowed relative deviation growth in a move
  int barrier_samples = 5;
  unsigned seed = 0x5eedU;
};

// theta(x): the certified fixed-knot deviation at knot configuration x.
struct ThetaResult {
  Spline sigma;
  double value = 0.0;
  SplineFitReport report;

  explicit ThetaResult(Spline s, SplineFitReport r)
      : sigma(std::move(s)), report(std::move(r)) {}
};

ThetaResult theta(const EvaluableFunction& f, const KnotVector& kv,
                  const FreeKnotParams& params = {});

// Empirical local Lipschitz estimate of theta: max over random perturbations
// within the given radius of |theta(y) - theta(x)| / ||y - x||_1.
double lipschitz_probe(const EvaluableFunction& f, const KnotVector& kv,
                       double radius, int samples,
                       const FreeKnotParams& params = {});

struct KnotClass {
  int index = 0;       // interior knot index, 1..p
  double x = 0.0;
  bool extreme = false;
  int s = 0;           // sign of sigma - f at the knot (0 when not extreme)
  double jump = 0.0;   // s * (sigma'_left - sigma'_right)(x)
  std::string kind;    // "unstable" | "neutral" | "stable" | "non-extreme"
};

std::vector<KnotClass> classify_knots(const Spline& sigma,
                                      const EvaluableFunction& f,
                                      double theta_value,
                                      const FreeKnotParams& params = {});

// A one-sided correction family: polynomials delta_k on a contiguous piece
// range, continuous across interior junctions of the range, vanishing at the
// far end, sign-matched with the alternation so that sigma - lambda*delta
// does not degrade the deviation for small lambda > 0.  It is generally NOT
// continuous at the knot it was built for.
struct DeltaFamily {
  std::vector<Polynomial> pieces;  // size p+1; identically zero off the range
  int knot = -1;
  int first_piece = -1;
  int last_piece = -1;
  int stage = -1;      // piece at which the zero tail/head begins
  bool merged = false; // stage closed by a gap root landing on the stage knot
  std::vector<double> roots;
};

// Pair index of the alternation containing (or nearest, with matching sign
// parity) the abscissa x; s is the residual sign at x.
int pair_of_knot(const AlternatingSequence& seq, double x, int s);

// Existence of the family that permits moving knot x_i left (modifying
// pieces i..p) or right (modifying pieces 0..i-1).  nullopt means no family
// exists: every stage of the capacity/matching automaton is infeasible.
std::optional<DeltaFamily> exists_delta_left(const AlternatingSequence& seq,
                                             const KnotVector& kv,
                                             int knot_index, int s);
std::optional<DeltaFamily> exists_delta_right(const AlternatingSequence& seq,
                                              const KnotVector& kv,
                                              int knot_index, int s);

// Pure pair-count verdicts (window counts versus piece capacities along an
// anchored chain).  Generically agree with the constructive automaton; the
// check reports disagreements rather than trusting these.
bool count_left_family_exists(const AlternatingSequence& seq,
                              const KnotVector& kv, int knot_index, int s);
bool count_right_family_exists(const AlternatingSequence& seq,
                               const KnotVector& kv, int knot_index, int s);

// Largest lambda (up to a small relative growth allowance) for which
// sup |sigma - lambda*delta - f| stays within theta; by convexity the whole
// segment [0, lambda] is then valid.
double max_nondegrading_lambda(const Spline& sigma, const EvaluableFunction& f,
                               const DeltaFamily& family, double theta_value,
                               double grow_tol = 1e-9,
                               int grid_size = kDefaultGrid);

struct KnotMoveResult {
  KnotVector kv;
  Spline sigma;
  double new_knot = 0.0;
  double lambda = 0.0;

  KnotMoveResult(KnotVector k, Spline s) : kv(std::move(k)), sigma(std::move(s)) {}
};

// Executes the move: subtracts lambda*delta on the family's side, relocates
// the knot to the junction where the corrected side meets the untouched one,
// and rebases the two bracketing pieces onto their new intervals.  nullopt
// when no junction exists within the admissible window (retry smaller lambda).
std::optional<KnotMoveResult> knot_move(const Spline& sigma, int knot_index,
                                        const DeltaFamily& family,
                                        double lambda);

struct KnotMoveRecord {
  int knot = -1;
  std::string direction;  // "left" | "right"
  bool exists = false;
  bool count_check_agrees = true;
  std::vector<int> witness_degrees;  // root count per active piece
  double lambda = 0.0;
  double new_knot = std::numeric_limits<double>::quiet_NaN();
  double theta_after = std::numeric_limits<double>::quiet_NaN();
  bool improved = false;
};

struct BarrierInfo {
  int i_minus = -1;
  int i_zero = -1;
  int i_plus = -1;
  int j_minus = -1;
  int j_plus = -1;
  int samples = 0;
  bool verified = false;
  double worst_margin = 0.0;  // min over samples of theta(y) - theta(x)
};

struct WMinimalityReport {
  double theta = 0.0;
  std::optional<Spline> sigma;
  std::vector<KnotClass> knots;
  std::vector<KnotMoveRecord> moves;
  std::optional<BarrierInfo> barrier;
  std::string verdict;  // "necessary-condition-holds" | "violated-at" | "degenerate"
  int violated_knot = -1;
  std::string violated_direction;
};

WMinimalityReport check_w_minimality(const EvaluableFunction& f,
                                     const KnotVector& kv,
                                     const FreeKnotParams& params = {});

struct DescentResult {
  std::vector<double> theta_history;  // initial theta, then after each move
  std::vector<double> knot_trace;     // moved-knot position after each move
  std::optional<Spline> sigma;
  int moves = 0;
  // "necessary-condition-holds" | "degenerate" | "max-moves" | "stalled"
  // ("stalled": families exist but no executed move improved numerically)
  std::string status;
};

DescentResult descend_free_knots(const EvaluableFunction& f, KnotVector kv,
                                 int max_moves,
                                 const FreeKnotParams& params = {});

}  // namespace alternant
