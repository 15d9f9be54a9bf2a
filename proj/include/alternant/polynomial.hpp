#pragma once

#include <functional>
#include <vector>

#include "alternant/evaluable.hpp"

namespace alternant {

// Polynomial in the Chebyshev basis of its interval: p(t) = sum c_j T_j(u),
// u = (2t - lo - hi) / (hi - lo).  Evaluation extrapolates smoothly outside
// the interval (pieces of a spline are global polynomials restricted to their
// piece), so no domain check is applied.
class Polynomial {
 public:
  Polynomial(Interval iv, std::vector<double> cheb_coeffs);

  static Polynomial constant(Interval iv, double value);
  // Coefficients in the monomial basis of t: mono[j] multiplies t^j.
  static Polynomial from_monomial(Interval iv, const std::vector<double>& mono);
  // scale * prod_r (r - t); an empty root list gives the constant `scale`.
  static Polynomial from_roots(Interval iv, double scale,
                               const std::vector<double>& roots);
  // Interpolates fn at the degree+1 Chebyshev nodes of iv (exact when fn is a
  // polynomial of degree <= degree).
  static Polynomial fit_callable(Interval iv,
                                 const std::function<double(double)>& fn,
                                 int degree);

  double operator()(double t) const;  // Clenshaw

  int degree_bound() const { return static_cast<int>(c_.size()) - 1; }
  const Interval& interval() const { return iv_; }
  const std::vector<double>& chebyshev_coefficients() const { return c_; }
  std::vector<double> monomial_coefficients() const;  // in powers of t

  Polynomial derivative() const;
  Polynomial mul_linear(double root) const;  // (root - t) * p
  Polynomial scaled(double s) const;
  Polynomial plus_constant(double s) const;
  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;

  // Exact re-expression in the Chebyshev basis of another interval (the
  // polynomial as a function is unchanged; its degree bound is preserved).
  Polynomial rebase(Interval target) const;

 private:
  Interval iv_;
  std::vector<double> c_;
};

}  // namespace alternant
