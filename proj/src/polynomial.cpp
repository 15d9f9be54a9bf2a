#include "alternant/polynomial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace alternant {

namespace {

void require_same_interval(const Interval& a, const Interval& b) {
  if (a.lo != b.lo || a.hi != b.hi) {
    throw std::invalid_argument("polynomial arithmetic needs matching intervals");
  }
}

}  // namespace

Polynomial::Polynomial(Interval iv, std::vector<double> cheb_coeffs)
    : iv_(iv), c_(std::move(cheb_coeffs)) {
  if (c_.empty()) c_.push_back(0.0);
}

Polynomial Polynomial::constant(Interval iv, double value) {
  return Polynomial(iv, {value});
}

Polynomial Polynomial::fit_callable(Interval iv,
                                    const std::function<double(double)>& fn,
                                    int degree) {
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  const int n = degree + 1;
  // Chebyshev-Gauss nodes; the nodal sums reproduce coefficients exactly for
  // polynomials of degree <= n-1.
  std::vector<double> theta(n), vals(n);
  const double mid = iv.midpoint(), half = 0.5 * iv.length();
  for (int k = 0; k < n; ++k) {
    theta[k] = std::numbers::pi * (k + 0.5) / n;
    vals[k] = fn(mid + half * std::cos(theta[k]));
  }
  std::vector<double> c(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += vals[k] * std::cos(j * theta[k]);
    c[j] = (j == 0 ? 1.0 : 2.0) * acc / n;
  }
  return Polynomial(iv, std::move(c));
}

Polynomial Polynomial::from_monomial(Interval iv,
                                     const std::vector<double>& mono) {
  if (mono.empty()) return constant(iv, 0.0);
  auto horner = [&mono](double t) {
    double acc = 0.0;
    for (size_t j = mono.size(); j-- > 0;) acc = acc * t + mono[j];
    return acc;
  };
  return fit_callable(iv, horner, static_cast<int>(mono.size()) - 1);
}

Polynomial Polynomial::from_roots(Interval iv, double scale,
                                  const std::vector<double>& roots) {
  Polynomial p = constant(iv, scale);
  for (double r : roots) p = p.mul_linear(r);
  return p;
}

double Polynomial::operator()(double t) const {
  const double u = (2.0 * t - iv_.lo - iv_.hi) / iv_.length();
  double b1 = 0.0, b2 = 0.0;
  for (size_t j = c_.size(); j-- > 1;) {
    double b0 = 2.0 * u * b1 - b2 + c_[j];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + c_[0];
}

std::vector<double> Polynomial::monomial_coefficients() const {
  const int n = degree_bound();
  // T_j in powers of u by the three-term recurrence.
  std::vector<std::vector<double>> T(n + 1);
  T[0] = {1.0};
  if (n >= 1) T[1] = {0.0, 1.0};
  for (int j = 2; j <= n; ++j) {
    T[j].assign(j + 1, 0.0);
    for (int d = 0; d <= j - 1; ++d) T[j][d + 1] += 2.0 * T[j - 1][d];
    for (int d = 0; d <= j - 2; ++d) T[j][d] -= T[j - 2][d];
  }
  std::vector<double> in_u(n + 1, 0.0);
  for (int j = 0; j <= n; ++j) {
    for (int d = 0; d < static_cast<int>(T[j].size()); ++d) {
      in_u[d] += c_[j] * T[j][d];
    }
  }
  // u = s t + r; Horner in coefficient arithmetic (multiply by (s t + r), add).
  const double s = 2.0 / iv_.length();
  const double r = -(iv_.lo + iv_.hi) / iv_.length();
  std::vector<double> out = {in_u[n]};
  for (int j = n - 1; j >= 0; --j) {
    std::vector<double> next(out.size() + 1, 0.0);
    for (size_t d = 0; d < out.size(); ++d) {
      next[d + 1] += s * out[d];
      next[d] += r * out[d];
    }
    next[0] += in_u[j];
    out = std::move(next);
  }
  return out;
}

Polynomial Polynomial::derivative() const {
  const int n = degree_bound();
  if (n == 0) return constant(iv_, 0.0);
  std::vector<double> d(n, 0.0);
  // Backward recurrence for d/du of a Chebyshev series.
  double dp1 = 0.0, dp2 = 0.0;  // d_{j+1}, d_{j+2}
  for (int j = n - 1; j >= 0; --j) {
    double dj = dp2 + 2.0 * (j + 1) * c_[j + 1];
    d[j] = dj;
    dp2 = dp1;
    dp1 = dj;
  }
  d[0] *= 0.5;
  const double chain = 2.0 / iv_.length();
  for (double& v : d) v *= chain;
  return Polynomial(iv_, std::move(d));
}

Polynomial Polynomial::mul_linear(double root) const {
  const int n = degree_bound();
  const double mid = iv_.midpoint(), half = 0.5 * iv_.length();
  // (root - t) p = (root - mid) p - half * (u p); u T_j = (T_{j+1}+T_{|j-1|})/2.
  std::vector<double> out(n + 2, 0.0);
  const double a = root - mid;
  for (int j = 0; j <= n; ++j) out[j] += a * c_[j];
  for (int j = 0; j <= n; ++j) {
    if (j == 0) {
      out[1] += -half * c_[0];
    } else {
      out[j + 1] += -0.5 * half * c_[j];
      out[j - 1] += -0.5 * half * c_[j];
    }
  }
  return Polynomial(iv_, std::move(out));
}

Polynomial Polynomial::scaled(double s) const {
  std::vector<double> out = c_;
  for (double& v : out) v *= s;
  return Polynomial(iv_, std::move(out));
}

Polynomial Polynomial::plus_constant(double s) const {
  std::vector<double> out = c_;
  out[0] += s;
  return Polynomial(iv_, std::move(out));
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  require_same_interval(iv_, other.iv_);
  std::vector<double> out(std::max(c_.size(), other.c_.size()), 0.0);
  for (size_t j = 0; j < c_.size(); ++j) out[j] += c_[j];
  for (size_t j = 0; j < other.c_.size(); ++j) out[j] += other.c_[j];
  return Polynomial(iv_, std::move(out));
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  return *this + other.scaled(-1.0);
}

Polynomial Polynomial::rebase(Interval target) const {
  const Polynomial& self = *this;
  return fit_callable(
      target, [&self](double t) { return self(t); }, degree_bound());
}

}  // namespace alternant
