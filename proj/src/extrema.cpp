#include "alternant/extrema.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alternant {
namespace detail {

std::pair<double, double> golden_max(const std::function<double(double)>& fn,
                                     double lo, double hi, double xtol) {
  if (hi <= lo) return {lo, fn(lo)};
  static const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = fn(c), fd = fn(d);
  double best_x = fc >= fd ? c : d;
  double best_v = std::max(fc, fd);
  while (b - a > xtol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = fn(d);
    }
    double x = fc >= fd ? c : d;
    double v = std::max(fc, fd);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return {best_x, best_v};
}

namespace {

struct Candidate {
  double t;
  double value;
};

// Local maxima of the sampled sequence: both endpoints always qualify; an
// interior sample qualifies when it is >= both neighbours and strictly above
// at least one (so constant stretches contribute only their edges).
std::vector<Candidate> refine_max_candidates(
    const std::function<double(double)>& fn, const std::vector<double>& ts,
    const std::vector<double>& vs, double xtol) {
  const size_t n = ts.size();
  std::vector<Candidate> out;
  auto refine = [&](size_t i, double lo, double hi) {
    auto [x, v] = golden_max(fn, lo, hi, xtol);
    if (v >= vs[i]) {
      out.push_back({x, v});
    } else {
      out.push_back({ts[i], vs[i]});
    }
  };
  refine(0, ts[0], ts[1]);
  for (size_t i = 1; i + 1 < n; ++i) {
    if (vs[i] >= vs[i - 1] && vs[i] >= vs[i + 1] &&
        (vs[i] > vs[i - 1] || vs[i] > vs[i + 1])) {
      refine(i, ts[i - 1], ts[i + 1]);
    }
  }
  refine(n - 1, ts[n - 2], ts[n - 1]);
  return out;
}

}  // namespace

ScanResult scan_extrema(const std::function<double(double)>& fn, double lo,
                        double hi, int grid_size, double xtol) {
  if (grid_size < 33) {
    throw std::invalid_argument("grid_size must be at least 33");
  }
  if (!(xtol > 0.0)) {
    throw std::invalid_argument("refinement tolerance must be positive");
  }
  const size_t n = static_cast<size_t>(grid_size);
  std::vector<double> ts(n), vs(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (size_t i = 0; i < n; ++i) {
    ts[i] = (i + 1 == n) ? hi : lo + h * static_cast<double>(i);
    vs[i] = fn(ts[i]);
  }

  auto neg = [&fn](double t) { return -fn(t); };
  std::vector<double> neg_vs(n);
  for (size_t i = 0; i < n; ++i) neg_vs[i] = -vs[i];

  auto collect = [&](std::vector<Candidate> cands, bool negate) {
    double best = cands.front().value;
    for (const auto& c : cands) best = std::max(best, c.value);
    std::vector<double> pts;
    for (const auto& c : cands) {
      if (c.value >= best - xtol) pts.push_back(c.t);
    }
    std::sort(pts.begin(), pts.end());
    // Merge refinements that converged to the same extremizer.
    std::vector<double> merged;
    for (double t : pts) {
      if (merged.empty() || t - merged.back() > 8.0 * xtol) {
        merged.push_back(t);
      }
    }
    return std::pair<double, std::vector<double>>(negate ? -best : best,
                                                  std::move(merged));
  };

  ScanResult res;
  auto [maxv, maxpts] = collect(refine_max_candidates(fn, ts, vs, xtol), false);
  auto [minv, minpts] =
      collect(refine_max_candidates(neg, ts, neg_vs, xtol), true);
  res.max_value = maxv;
  res.max_points = std::move(maxpts);
  res.min_value = minv;
  res.min_points = std::move(minpts);
  return res;
}

double sup_norm(const std::function<double(double)>& fn, double lo, double hi,
                int grid_size, double xtol) {
  ScanResult r = scan_extrema(fn, lo, hi, grid_size, xtol);
  return std::max(std::abs(r.max_value), std::abs(r.min_value));
}

std::vector<double> local_extremizers(const std::function<double(double)>& fn,
                                      double lo, double hi, int grid_size,
                                      double xtol) {
  const size_t n = static_cast<size_t>(grid_size);
  std::vector<double> ts(n), vs(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (size_t i = 0; i < n; ++i) {
    ts[i] = (i + 1 == n) ? hi : lo + h * static_cast<double>(i);
    vs[i] = fn(ts[i]);
  }
  auto neg = [&fn](double t) { return -fn(t); };
  std::vector<double> neg_vs(n);
  for (size_t i = 0; i < n; ++i) neg_vs[i] = -vs[i];

  std::vector<double> pts;
  for (const auto& c : refine_max_candidates(fn, ts, vs, xtol)) {
    pts.push_back(c.t);
  }
  for (const auto& c : refine_max_candidates(neg, ts, neg_vs, xtol)) {
    pts.push_back(c.t);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> merged;
  for (double t : pts) {
    if (merged.empty() || t - merged.back() > xtol) merged.push_back(t);
  }
  return merged;
}

}  // namespace detail

namespace {

double default_xtol(const Interval& domain, double refine_tol) {
  return refine_tol > 0.0 ? refine_tol : 1e-12 * domain.length();
}

}  // namespace

ExtremaPair extrema(const EvaluableFunction& g, int grid_size,
                    double refine_tol) {
  const Interval& dom = g.domain();
  const double xtol = default_xtol(dom, refine_tol);
  auto fn = [&g](double t) { return g(t); };
  detail::ScanResult r =
      detail::scan_extrema(fn, dom.lo, dom.hi, grid_size, xtol);
  ExtremaPair out;
  out.max = {r.max_value, std::move(r.max_points), grid_size, xtol};
  out.min = {r.min_value, std::move(r.min_points), grid_size, xtol};
  return out;
}

double sup_norm(const EvaluableFunction& g, int grid_size, double refine_tol) {
  const Interval& dom = g.domain();
  auto fn = [&g](double t) { return g(t); };
  return detail::sup_norm(fn, dom.lo, dom.hi, grid_size,
                          default_xtol(dom, refine_tol));
}

std::pair<double, EvaluableFunction> recentre(const EvaluableFunction& g,
                                              int grid_size,
                                              double refine_tol) {
  ExtremaPair ex = extrema(g, grid_size, refine_tol);
  double shift = 0.5 * (ex.max.value + ex.min.value);
  return {shift, g.shifted(shift)};
}

double inverse_modulus(const EvaluableFunction& g, double delta,
                       int grid_size) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("inverse modulus needs delta > 0");
  }
  if (grid_size < 33) {
    throw std::invalid_argument("grid_size must be at least 33");
  }
  const Interval& dom = g.domain();
  const size_t n = static_cast<size_t>(grid_size);
  std::vector<double> ts(n), vs(n);
  const double h = dom.length() / static_cast<double>(n - 1);
  for (size_t i = 0; i < n; ++i) {
    ts[i] = (i + 1 == n) ? dom.hi : dom.lo + h * static_cast<double>(i);
    vs[i] = g(ts[i]);
  }

  double best = dom.length();
  size_t bi = 0, bj = n - 1;
  bool found = false;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n && ts[j] - ts[i] < best; ++j) {
      if (std::abs(vs[j] - vs[i]) >= delta) {
        best = ts[j] - ts[i];
        bi = i;
        bj = j;
        found = true;
        break;  // larger j only widens the gap
      }
    }
  }
  if (!found) return dom.length();

  // Local tightening: bisect each endpoint of the winning pair against the
  // other.  Any pair holding the gap is a valid upper bound on the infimum,
  // so both phases preserve correctness while shrinking the distance; on a
  // monotone winning segment the result converges to the exact infimum.
  double a = ts[bi], b = ts[bj];
  const double fb_fixed = vs[bj];
  const double xtol = 1e-14 * dom.length();
  {
    // Largest a' in [a, b] keeping |g(b) - g(a')| >= delta.
    double lo = a, hi = b;
    for (int iter = 0; iter < 60 && hi - lo > xtol; ++iter) {
      const double m = 0.5 * (lo + hi);
      if (std::abs(fb_fixed - g(m)) >= delta) {
        lo = m;
      } else {
        hi = m;
      }
    }
    a = lo;
  }
  const double fa_fixed = g(a);
  {
    // Smallest b' in [a, b] keeping |g(b') - g(a)| >= delta.
    double lo = a, hi = b;
    for (int iter = 0; iter < 60 && hi - lo > xtol; ++iter) {
      const double m = 0.5 * (lo + hi);
      if (std::abs(g(m) - fa_fixed) >= delta) {
        hi = m;
      } else {
        lo = m;
      }
    }
    b = hi;
  }
  return std::min(best, b - a);
}

}  // namespace alternant
