#pragma once

#include <vector>

#include "alternant/evaluable.hpp"
#include "alternant/polynomial.hpp"

namespace alternant {

// Knot grid x_0 < ... < x_{p+1} with per-piece degree caps n_0..n_p (>= 1).
struct KnotVector {
  std::vector<double> knots;
  std::vector<int> degrees;

  KnotVector(std::vector<double> knots_, std::vector<int> degrees_);

  int piece_count() const { return static_cast<int>(degrees.size()); }
  Interval domain() const { return Interval(knots.front(), knots.back()); }
  Interval piece_interval(int i) const {
    return Interval(knots[i], knots[i + 1]);
  }
  // Piece containing t; knots resolve to the LEFT piece by convention.
  int piece_index(double t) const;
};

// Continuous piecewise polynomial over a KnotVector.  Pieces are stored in
// the Chebyshev basis of their own piece interval.
class Spline {
 public:
  Spline(KnotVector kv, std::vector<Polynomial> pieces);

  // Piecewise chord of f: the classical starting point of the fixed-knot
  // descent (continuous by construction).
  static Spline interpolate_linear(const KnotVector& kv,
                                   const EvaluableFunction& f);

  double operator()(double t) const;

  const KnotVector& knots() const { return kv_; }
  int piece_count() const { return kv_.piece_count(); }
  const Polynomial& piece(int i) const { return pieces_[i]; }

  Spline plus_constant(double c) const;
  // this + lambda * other over the same knot vector.
  Spline add_scaled(const Spline& other, double lambda) const;

  // max over interior knots of |left value - right value|; ~0 for a valid
  // spline.
  double continuity_defect() const;

  // One-sided slopes at interior knot i (1..p): left is piece i-1's
  // derivative, right is piece i's.
  double derivative_left(int knot_index) const;
  double derivative_right(int knot_index) const;

 private:
  KnotVector kv_;
  std::vector<Polynomial> pieces_;
};

inline double spline_eval(const Spline& s, double t) { return s(t); }

EvaluableFunction residual(const Spline& sigma, const EvaluableFunction& f);

}  // namespace alternant
