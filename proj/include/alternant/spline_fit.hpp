#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "alternant/alternance.hpp"
#include "alternant/poly_fit.hpp"
#include "alternant/spline.hpp"

namespace alternant {

// Optimality certificate: the window [x_{i1}, x_{i2}] is touched by at least
// (sum of the piece dimensions between the cuts) + 2 alternance pairs, so no
// spline over these knots beats beta * ||sigma - f||.
struct CsCertificate {
  int i1 = 0;
  int i2 = 0;
  int count = 0;     // card J(i1, i2)
  int required = 0;  // 2 + n_{i1} + ... + n_{i2-1}
  int stop_step = -1;  // gap index at which the placement ran out of room
  std::vector<int> pair_indices;  // members of J(i1, i2)
  // Placement state at the stop (empty when found by exhaustive scan):
  std::vector<int> used;                     // r_i per piece
  std::vector<std::vector<int>> piece_gaps;  // gaps placed in each piece
};

// Successful placement: one intermediary point per gap, each strictly inside
// a piece, at most n_i of them per piece.
struct IntermediaryPoints {
  std::vector<double> xi;                      // gap j -> xi_j, k of them
  std::vector<std::vector<int>> piece_gaps;    // piece i -> gap indices J(i)
  std::vector<int> used;                       // r_i = |J(i)|
};

using IntermediaryOutcome = std::variant<CsCertificate, IntermediaryPoints>;

// Exhaustive scan for a certificate window, first hit in lexicographic
// (i2 - i1, i1) order; nullopt when no window is saturated.
std::optional<CsCertificate> check_cs(const AlternatingSequence& seq,
                                      const KnotVector& kv);

// The four-case left-to-right placement: midpoint inside the piece while
// room remains, knot-shifted midpoint when the gap crosses into a full
// piece's successor, and the certificate backtrack when a gap is confined to
// a piece that is already full.
IntermediaryOutcome build_intermediary_points(const AlternatingSequence& seq,
                                              const KnotVector& kv);

// Piecewise alternating correction: delta_0 = -gamma_0, delta_i = alpha_i *
// gamma_i with alpha_i > 0 chosen for continuity, where gamma_i is the
// piece-local root product sign-matched to the global one.
Spline delta_from_xi(const IntermediaryPoints& ip, int eps,
                     const KnotVector& kv);

struct SplineStepResult {
  double lambda = 0.0;
  double norm_after = 0.0;
};

// Finds lambda > 0 with ||sigma + lambda*delta - f|| < ||sigma - f||:
// safe-step seed from delta's pair values, halving until the norm drops,
// then a golden polish.  Throws when no decrease exists down to the step
// tolerance (which the placement construction rules out).
SplineStepResult spline_step(const Spline& sigma, const EvaluableFunction& f,
                             const Spline& delta,
                             const AlternatingSequence& seq,
                             int grid_size = kDefaultGrid);

struct SplineFitReport {
  Spline spline;
  double final_norm = 0.0;
  int iterations = 0;
  std::vector<double> beta_history;
  std::optional<CsCertificate> certificate;
  AlternatingSequence alternation;
  std::string status;  // "beta-plus-optimal" | "max-iterations" | "degenerate"

  explicit SplineFitReport(Spline s) : spline(std::move(s)) {}
};

// Fixed-knot analogue of the polynomial descent: linear-interpolant start,
// recentre, alternance, placement; a certificate at beta_max stops, a
// certificate below beta_max raises beta, a placement yields a descent step
// and lowers beta.
SplineFitReport fixed_knot_fit(const EvaluableFunction& f,
                               const KnotVector& kv,
                               const FitParams& params = {});

}  // namespace alternant
