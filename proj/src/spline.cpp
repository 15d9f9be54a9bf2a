#include "alternant/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alternant {

KnotVector::KnotVector(std::vector<double> knots_, std::vector<int> degrees_)
    : knots(std::move(knots_)), degrees(std::move(degrees_)) {
  if (knots.size() < 2 || degrees.size() + 1 != knots.size()) {
    throw std::invalid_argument("knot vector needs p+2 knots and p+1 degrees");
  }
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!std::isfinite(knots[i]) || !(knots[i] < knots[i + 1])) {
      throw std::invalid_argument("knots must be finite and strictly increasing");
    }
  }
  for (int n : degrees) {
    if (n < 1) throw std::invalid_argument("piece degrees must be >= 1");
  }
}

int KnotVector::piece_index(double t) const {
  // First knot >= t among x_1..x_{p+1}; its left neighbour's piece wins, so a
  // knot abscissa evaluates on the piece ending there.
  auto it = std::lower_bound(knots.begin() + 1, knots.end(), t);
  int j = static_cast<int>(it - knots.begin());
  return std::min(std::max(j - 1, 0), piece_count() - 1);
}

Spline::Spline(KnotVector kv, std::vector<Polynomial> pieces)
    : kv_(std::move(kv)), pieces_(std::move(pieces)) {
  if (static_cast<int>(pieces_.size()) != kv_.piece_count()) {
    throw std::invalid_argument("piece count must match the knot vector");
  }
  for (int i = 0; i < kv_.piece_count(); ++i) {
    if (pieces_[i].degree_bound() > kv_.degrees[i]) {
      throw std::invalid_argument("piece degree exceeds its cap");
    }
    const Interval want = kv_.piece_interval(i);
    const Interval& have = pieces_[i].interval();
    if (have.lo != want.lo || have.hi != want.hi) {
      throw std::invalid_argument("piece interval must match its knot span");
    }
  }
}

Spline Spline::interpolate_linear(const KnotVector& kv,
                                  const EvaluableFunction& f) {
  std::vector<Polynomial> pieces;
  pieces.reserve(kv.piece_count());
  for (int i = 0; i < kv.piece_count(); ++i) {
    Interval iv = kv.piece_interval(i);
    const double fa = f(iv.lo), fb = f(iv.hi);
    const double slope = (fb - fa) / iv.length();
    pieces.push_back(
        Polynomial::from_monomial(iv, {fa - slope * iv.lo, slope}));
  }
  return Spline(kv, std::move(pieces));
}

double Spline::operator()(double t) const {
  const double x = kv_.domain().clamp(t);
  return pieces_[kv_.piece_index(x)](x);
}

Spline Spline::plus_constant(double c) const {
  std::vector<Polynomial> pieces;
  pieces.reserve(pieces_.size());
  for (const auto& p : pieces_) pieces.push_back(p.plus_constant(c));
  return Spline(kv_, std::move(pieces));
}

Spline Spline::add_scaled(const Spline& other, double lambda) const {
  if (other.kv_.knots != kv_.knots) {
    throw std::invalid_argument("spline arithmetic needs matching knots");
  }
  std::vector<Polynomial> pieces;
  pieces.reserve(pieces_.size());
  for (size_t i = 0; i < pieces_.size(); ++i) {
    pieces.push_back(pieces_[i] + other.pieces_[i].scaled(lambda));
  }
  return Spline(kv_, std::move(pieces));
}

double Spline::continuity_defect() const {
  double defect = 0.0;
  for (int i = 1; i < kv_.piece_count(); ++i) {
    const double x = kv_.knots[i];
    defect = std::max(defect, std::abs(pieces_[i - 1](x) - pieces_[i](x)));
  }
  return defect;
}

double Spline::derivative_left(int knot_index) const {
  if (knot_index < 1 || knot_index > piece_count() - 1 + 1) {
    throw std::invalid_argument("derivative_left needs 1 <= i <= p+1");
  }
  return pieces_[knot_index - 1].derivative()(kv_.knots[knot_index]);
}

double Spline::derivative_right(int knot_index) const {
  if (knot_index < 0 || knot_index > piece_count() - 1) {
    throw std::invalid_argument("derivative_right needs 0 <= i <= p");
  }
  return pieces_[knot_index].derivative()(kv_.knots[knot_index]);
}

EvaluableFunction residual(const Spline& sigma, const EvaluableFunction& f) {
  EvaluableFunction fcopy = f;
  Spline scopy = sigma;
  return EvaluableFunction::callable(
      f.domain(), [scopy, fcopy](double t) { return scopy(t) - fcopy(t); },
      "spline-residual(" + f.label() + ")");
}

}  // namespace alternant
