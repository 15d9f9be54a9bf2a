#include "alternant/alternance.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace alternant {

namespace {

// Merged sample set: uniform grid plus refined local extremizers.  The
// extremizers matter because at beta -> 1 the level is attained tangentially
// at extrema and a bare grid never reaches it.
struct Samples {
  std::vector<double> t;
  std::vector<double> v;
};

Samples merged_samples(const EvaluableFunction& g, int grid_size,
                       double xtol) {
  const Interval& dom = g.domain();
  auto fn = [&g](double x) { return g(x); };
  std::vector<double> pts =
      detail::local_extremizers(fn, dom.lo, dom.hi, grid_size, xtol);
  const size_t n = static_cast<size_t>(grid_size);
  const double h = dom.length() / static_cast<double>(n - 1);
  for (size_t i = 0; i < n; ++i) {
    pts.push_back((i + 1 == n) ? dom.hi : dom.lo + h * static_cast<double>(i));
  }
  std::sort(pts.begin(), pts.end());
  Samples s;
  for (double x : pts) {
    if (s.t.empty() || x - s.t.back() > 1e-3 * xtol) {
      s.t.push_back(x);
      s.v.push_back(g(x));
    }
  }
  return s;
}

// State shared by the crossing searches of one construction run.
struct LevelScanner {
  const EvaluableFunction& g;
  const Samples& s;
  double level;    // beta * M
  double tol_lvl;  // slack on level comparisons
  double xtol;     // bisection tolerance on abscissae

  size_t first_index_at_or_after(double t0) const {
    return static_cast<size_t>(
        std::lower_bound(s.t.begin(), s.t.end(), t0 - 0.5 * xtol) -
        s.t.begin());
  }

  // Leftmost t >= start with c * g(t) >= level.  Returns nullopt when no
  // sample at or after start attains.  The start point itself is assumed NOT
  // to attain (its signed value sits at -level or below by construction),
  // except for the very first search where start is the domain edge.
  std::optional<double> first_at_or_above(double c, double start) const {
    size_t idx = first_index_at_or_after(start);
    while (idx < s.t.size() && c * s.v[idx] < level - tol_lvl) ++idx;
    if (idx == s.t.size()) return std::nullopt;
    double right = s.t[idx];
    double left = (idx == 0) ? right : std::max(start, s.t[idx - 1]);
    if (left >= right) return right;
    auto h = [&](double x) { return c * g(x) - level; };
    if (h(right) < 0.0) return right;  // tangential attainment within the band
    if (h(left) >= 0.0) return left;   // start already attains (first search)
    // h(left) < 0 <= h(right): bisect for the crossing, answer on the
    // attaining side.
    while (right - left > xtol) {
      double mid = 0.5 * (left + right);
      if (h(mid) >= 0.0) {
        right = mid;
      } else {
        left = mid;
      }
    }
    return right;
  }

  // Rightmost t in [lo, hi] with c * g(t) >= level.  lo itself attains by
  // construction, so the result falls back to lo when no sample qualifies.
  double last_at_or_above(double c, double lo, double hi) const {
    size_t begin = first_index_at_or_after(lo);
    size_t end = static_cast<size_t>(
        std::upper_bound(s.t.begin(), s.t.end(), hi + 0.5 * xtol) -
        s.t.begin());
    size_t found = end;
    for (size_t idx = end; idx-- > begin;) {
      if (c * s.v[idx] >= level - tol_lvl) {
        found = idx;
        break;
      }
    }
    if (found == end) return lo;
    double left = s.t[found];
    double right = (found + 1 < s.t.size()) ? std::min(s.t[found + 1], hi) : hi;
    if (right <= left) return left;
    auto h = [&](double x) { return c * g(x) - level; };
    if (h(left) < 0.0) return left;  // tangential band; stay at the sample
    if (h(right) >= 0.0) return right;
    while (right - left > xtol) {
      double mid = 0.5 * (left + right);
      if (h(mid) >= 0.0) {
        left = mid;
      } else {
        right = mid;
      }
    }
    return left;
  }
};

}  // namespace

AlternatingSequence build_beta_alternance(const EvaluableFunction& g,
                                          double beta, double tol,
                                          int grid_size) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("beta must lie in (0, 1]");
  }
  const Interval& dom = g.domain();
  const double xtol = 1e-12 * dom.length();

  ExtremaPair ex = extrema(g, grid_size, xtol);
  const double big_m = std::max(ex.max.value, -ex.min.value);
  // The default slack is relative to the deviation but floored at the
  // double-precision evaluation noise, so near-zero residuals of O(1)
  // functions are not misread as uncentred.
  const double tol_lvl =
      tol > 0.0 ? tol : std::max(1e-9 * big_m, 1e-14 * std::max(1.0, big_m));
  if (!(big_m > tol_lvl) || !(big_m > 0.0)) {
    throw std::invalid_argument(
        "degenerate residual: max magnitude below tolerance");
  }
  if (std::abs(ex.max.value + ex.min.value) > 10.0 * tol_lvl) {
    throw std::invalid_argument(
        "function must be recentred (max + min = 0) before the alternance");
  }

  Samples samples = merged_samples(g, grid_size, xtol);
  LevelScanner scan{g, samples, beta * big_m, tol_lvl, xtol};

  // t_0^-: leftmost attainment of |g| at the level; eps is g's sign there.
  double t0 = dom.lo;
  {
    size_t idx = 0;
    while (idx < samples.t.size() &&
           std::abs(samples.v[idx]) < scan.level - tol_lvl) {
      ++idx;
    }
    if (idx == samples.t.size()) {
      throw std::logic_error("alternance scan lost the maximum attainment");
    }
    double right = samples.t[idx];
    double left = (idx == 0) ? right : samples.t[idx - 1];
    if (left < right) {
      auto h = [&](double x) { return std::abs(g(x)) - scan.level; };
      if (h(right) >= 0.0 && h(left) < 0.0) {
        while (right - left > xtol) {
          double mid = 0.5 * (left + right);
          if (h(mid) >= 0.0) {
            right = mid;
          } else {
            left = mid;
          }
        }
      }
    }
    t0 = right;
  }
  const int eps = g(t0) >= 0.0 ? 1 : -1;

  AlternatingSequence seq;
  seq.beta = beta;
  seq.eps = eps;
  seq.big_m = big_m;
  seq.level = beta * big_m;

  std::vector<double> minus = {t0};
  std::vector<double> plus;
  // Pair pi carries sign eps * (-1)^pi; the loop alternates searches for the
  // next opposite attainment and closes the previous pair behind it.
  for (int pi = 0;; ++pi) {
    const double c_next = (pi % 2 == 0) ? -eps : eps;
    std::optional<double> next_minus =
        scan.first_at_or_above(c_next, minus[pi]);
    const double c_cur = (pi % 2 == 0) ? eps : -eps;
    if (!next_minus) {
      plus.push_back(scan.last_at_or_above(c_cur, minus[pi], dom.hi));
      break;
    }
    plus.push_back(scan.last_at_or_above(c_cur, minus[pi], *next_minus));
    minus.push_back(*next_minus);
  }

  seq.pairs.reserve(minus.size());
  for (size_t i = 0; i < minus.size(); ++i) {
    if (minus[i] > plus[i] + xtol || (i + 1 < minus.size() &&
                                      plus[i] >= minus[i + 1])) {
      throw std::logic_error("alternance pairs out of order");
    }
    seq.pairs.emplace_back(minus[i], std::max(minus[i], plus[i]));
  }

  seq.peaks.reserve(seq.pairs.size());
  for (size_t i = 0; i < seq.pairs.size(); ++i) {
    const auto& [lo, hi] = seq.pairs[i];
    if (hi - lo <= xtol) {
      seq.peaks.push_back(0.5 * (lo + hi));
      continue;
    }
    const double c = (i % 2 == 0) ? eps : -eps;
    auto signed_g = [&](double x) { return c * g(x); };
    seq.peaks.push_back(detail::golden_max(signed_g, lo, hi, xtol).first);
  }
  return seq;
}

int count_k(const EvaluableFunction& g, double beta, double tol,
            int grid_size) {
  return build_beta_alternance(g, beta, tol, grid_size).k();
}

DeviationCheck min_polynomial_deviation_check(const EvaluableFunction& g,
                                              const AlternatingSequence& seq,
                                              const Polynomial& p,
                                              int grid_size) {
  if (p.degree_bound() > seq.k() - 1) {
    throw std::invalid_argument(
        "certificate only bounds polynomials of degree <= k-1");
  }
  const Interval& dom = g.domain();
  const double xtol = 1e-12 * dom.length();
  auto res = [&](double t) { return g(t) - p(t); };
  double dev = detail::sup_norm(res, dom.lo, dom.hi, grid_size, xtol);
  // The alternating peaks witness the bound directly; fold them in so the
  // check never fails through grid underestimation.
  for (double w : seq.peaks) dev = std::max(dev, std::abs(res(w)));
  DeviationCheck out;
  out.deviation = dev;
  out.threshold = seq.beta * seq.big_m;
  out.holds = dev >= out.threshold * (1.0 - 1e-9);
  return out;
}

}  // namespace alternant
