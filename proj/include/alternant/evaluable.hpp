#pragma once

#include <functional>
#include <string>
#include <vector>

namespace alternant {

// Closed interval [lo, hi] with lo < hi; the domain of every function here.
struct Interval {
  double lo;
  double hi;

  Interval(double lo_, double hi_);

  double length() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }

  // Accepts t within a round-off margin of the interval and clamps it onto
  // [lo, hi]; throws std::domain_error beyond that margin.
  double clamp(double t) const;
  bool contains(double t, double slack = 0.0) const {
    return t >= lo - slack && t <= hi + slack;
  }
};

// Immutable scalar function on a fixed interval.  Instances are built from a
// named formula, a strictly increasing sample table (piecewise linear), or a
// residual/shift composition; evaluation outside the domain (beyond round-off)
// throws std::domain_error.
class EvaluableFunction {
 public:
  // Named formulas: "abs", "runge", "sin", "cos", "exp", "poly:c0,c1,...".
  static EvaluableFunction builtin(const std::string& name, Interval domain);

  // Piecewise-linear interpolant of (t, v) samples; t strictly increasing,
  // domain = [t.front(), t.back()].
  static EvaluableFunction tabulated(std::vector<double> t,
                                     std::vector<double> v);

  // Wraps an arbitrary deterministic callable.  This is the composition
  // primitive used by residual() and by tests; the callable must be pure.
  static EvaluableFunction callable(Interval domain,
                                    std::function<double(double)> fn,
                                    std::string label = "callable");

  double operator()(double t) const { return fn_(domain_.clamp(t)) - offset_; }

  const Interval& domain() const { return domain_; }
  const std::string& label() const { return label_; }
  double offset() const { return offset_; }

  // g - c on the same domain (used by recentring).
  EvaluableFunction shifted(double c) const;

 private:
  EvaluableFunction(Interval domain, std::function<double(double)> fn,
                    std::string label)
      : domain_(domain), fn_(std::move(fn)), label_(std::move(label)) {}

  Interval domain_;
  std::function<double(double)> fn_;
  std::string label_;
  double offset_ = 0.0;
};

inline double eval(const EvaluableFunction& g, double t) { return g(t); }

}  // namespace alternant
