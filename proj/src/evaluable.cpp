#include "alternant/evaluable.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace alternant {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::invalid_argument("interval requires finite lo < hi");
  }
}

double Interval::clamp(double t) const {
  // Round-off slack: scaled to the interval's magnitude so that abscissae
  // produced by bisection/golden refinement never trip the domain check.
  const double slack =
      64.0 * std::numeric_limits<double>::epsilon() *
      std::max({std::abs(lo), std::abs(hi), 1.0});
  if (t < lo - slack || t > hi + slack) {
    throw std::domain_error("evaluation point outside the function domain");
  }
  return std::min(hi, std::max(lo, t));
}

namespace {

std::vector<double> parse_poly_coeffs(const std::string& spec) {
  std::vector<double> coeffs;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double c = std::stod(item, &used);
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) {
      throw std::invalid_argument("bad coefficient in poly spec: " + item);
    }
    coeffs.push_back(c);
  }
  if (coeffs.empty()) {
    throw std::invalid_argument("poly spec needs at least one coefficient");
  }
  return coeffs;
}

}  // namespace

EvaluableFunction EvaluableFunction::builtin(const std::string& name,
                                             Interval domain) {
  if (name == "abs") {
    return EvaluableFunction(domain, [](double t) { return std::abs(t); }, name);
  }
  if (name == "runge") {
    return EvaluableFunction(
        domain, [](double t) { return 1.0 / (1.0 + 25.0 * t * t); }, name);
  }
  if (name == "sin") {
    return EvaluableFunction(domain, [](double t) { return std::sin(t); }, name);
  }
  if (name == "cos") {
    return EvaluableFunction(domain, [](double t) { return std::cos(t); }, name);
  }
  if (name == "exp") {
    return EvaluableFunction(domain, [](double t) { return std::exp(t); }, name);
  }
  if (name.rfind("poly:", 0) == 0) {
    auto coeffs = parse_poly_coeffs(name.substr(5));
    return EvaluableFunction(
        domain,
        [coeffs](double t) {
          double acc = 0.0;
          for (size_t j = coeffs.size(); j-- > 0;) acc = acc * t + coeffs[j];
          return acc;
        },
        name);
  }
  throw std::invalid_argument("unknown builtin function: " + name);
}

EvaluableFunction EvaluableFunction::tabulated(std::vector<double> t,
                                               std::vector<double> v) {
  if (t.size() != v.size() || t.size() < 2) {
    throw std::invalid_argument("tabulated function needs >= 2 matching samples");
  }
  for (size_t i = 0; i + 1 < t.size(); ++i) {
    if (!(t[i] < t[i + 1])) {
      throw std::invalid_argument("tabulated abscissae must be strictly increasing");
    }
  }
  Interval domain(t.front(), t.back());
  auto ts = std::make_shared<std::vector<double>>(std::move(t));
  auto vs = std::make_shared<std::vector<double>>(std::move(v));
  return EvaluableFunction(
      domain,
      [ts, vs](double x) {
        auto it = std::upper_bound(ts->begin(), ts->end(), x);
        size_t hi = std::min<size_t>(ts->size() - 1,
                                     std::max<ptrdiff_t>(1, it - ts->begin()));
        size_t lo = hi - 1;
        double w = ((*ts)[hi] == (*ts)[lo])
                       ? 0.0
                       : (x - (*ts)[lo]) / ((*ts)[hi] - (*ts)[lo]);
        return (1.0 - w) * (*vs)[lo] + w * (*vs)[hi];
      },
      "tabulated");
}

EvaluableFunction EvaluableFunction::callable(Interval domain,
                                              std::function<double(double)> fn,
                                              std::string label) {
  if (!fn) throw std::invalid_argument("callable function must be non-empty");
  return EvaluableFunction(domain, std::move(fn), std::move(label));
}

EvaluableFunction EvaluableFunction::shifted(double c) const {
  EvaluableFunction g = *this;
  g.offset_ += c;
  return g;
}

}  // namespace alternant
