#include "alternant/free_knot.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>

#include "alternant/extrema.hpp"

namespace alternant {

namespace {

int sign_of(double v) { return v >= 0.0 ? 1 : -1; }

double domain_len(const KnotVector& kv) { return kv.domain().length(); }

// Sign of the recentred residual on pair ell: eps * (-1)^ell.
int pair_sign(const AlternatingSequence& seq, int ell) {
  return (ell % 2 == 0) ? seq.eps : -seq.eps;
}

// Places one root per window (closed gaps between consecutive alternation
// pairs), each strictly inside a piece, respecting per-piece degree budgets.
// Scanning from the near end of the piece range makes the greedy exact for
// this staircase structure: windows and pieces are both ordered intervals.
std::optional<std::vector<std::pair<int, double>>> match_windows(
    const std::vector<std::pair<double, double>>& windows,
    const KnotVector& kv, int piece_lo, int piece_hi, std::vector<int>& used,
    bool leftmost) {
  const double min_len = 1e-10 * domain_len(kv);
  std::vector<std::pair<int, double>> placed;
  const auto try_place = [&](const std::pair<double, double>& w) -> bool {
    const int start = leftmost ? piece_lo : piece_hi;
    const int step = leftmost ? 1 : -1;
    for (int k = start; k >= piece_lo && k <= piece_hi; k += step) {
      if (used[static_cast<std::size_t>(k)] >=
          kv.degrees[static_cast<std::size_t>(k)])
        continue;
      const double ovlo = std::max(w.first, kv.knots[static_cast<std::size_t>(k)]);
      const double ovhi =
          std::min(w.second, kv.knots[static_cast<std::size_t>(k) + 1]);
      if (ovhi - ovlo <= min_len) continue;
      placed.emplace_back(k, 0.5 * (ovlo + ovhi));
      ++used[static_cast<std::size_t>(k)];
      return true;
    }
    return false;
  };
  for (const auto& w : windows)
    if (!try_place(w)) return std::nullopt;
  return placed;
}

// Builds the family polynomials from per-piece root sets: the anchored piece
// carries sign s at the knot, the continuity chain propagates scales across
// interior junctions, and the whole family is normalized to sup ~ 1.  The
// alternation-sign invariant is then verified at every peak in the range.
DeltaFamily assemble_family(const KnotVector& kv, const AlternatingSequence& seq,
                            int knot, int s, int first, int last, int stage,
                            bool merged,
                            std::map<int, std::vector<double>> roots_by_piece,
                            bool anchor_left) {
  const int pieces = kv.piece_count();
  for (auto& [k, rs] : roots_by_piece) std::sort(rs.begin(), rs.end());
  static const std::vector<double> kNoRoots;
  const auto roots_of = [&](int k) -> const std::vector<double>& {
    const auto it = roots_by_piece.find(k);
    return it == roots_by_piece.end() ? kNoRoots : it->second;
  };

  std::vector<Polynomial> polys;
  polys.reserve(static_cast<std::size_t>(pieces));
  for (int k = 0; k < pieces; ++k)
    polys.push_back(Polynomial::constant(kv.piece_interval(k), 0.0));

  if (anchor_left) {
    polys[static_cast<std::size_t>(first)] = Polynomial::from_roots(
        kv.piece_interval(first), static_cast<double>(s), roots_of(first));
    for (int k = first + 1; k <= last; ++k) {
      const double xk = kv.knots[static_cast<std::size_t>(k)];
      const double carry = polys[static_cast<std::size_t>(k - 1)](xk);
      double prod = 1.0;
      for (double r : roots_of(k)) prod *= r - xk;
      polys[static_cast<std::size_t>(k)] = Polynomial::from_roots(
          kv.piece_interval(k), carry / prod, roots_of(k));
    }
  } else {
    const double xi = kv.knots[static_cast<std::size_t>(knot)];
    double prod = 1.0;
    for (double r : roots_of(last)) prod *= r - xi;
    polys[static_cast<std::size_t>(last)] = Polynomial::from_roots(
        kv.piece_interval(last), static_cast<double>(s) / prod, roots_of(last));
    for (int k = last - 1; k >= first; --k) {
      const double xk1 = kv.knots[static_cast<std::size_t>(k) + 1];
      const double carry = polys[static_cast<std::size_t>(k + 1)](xk1);
      double prod_k = 1.0;
      for (double r : roots_of(k)) prod_k *= r - xk1;
      polys[static_cast<std::size_t>(k)] = Polynomial::from_roots(
          kv.piece_interval(k), carry / prod_k, roots_of(k));
    }
  }

  double maxabs = 0.0;
  for (int k = first; k <= last; ++k) {
    const Interval iv = kv.piece_interval(k);
    for (int q = 0; q <= 64; ++q) {
      const double t = iv.lo + iv.length() * q / 64.0;
      maxabs = std::max(maxabs, std::fabs(polys[static_cast<std::size_t>(k)](t)));
    }
  }
  if (!(maxabs > 0.0))
    throw std::logic_error("correction family is identically zero");
  for (int k = first; k <= last; ++k)
    polys[static_cast<std::size_t>(k)] =
        polys[static_cast<std::size_t>(k)].scaled(1.0 / maxabs);

  const double lo_span = kv.knots[static_cast<std::size_t>(first)];
  const double hi_span = kv.knots[static_cast<std::size_t>(last) + 1];
  for (std::size_t ell = 0; ell < seq.peaks.size(); ++ell) {
    const double pk = seq.peaks[ell];
    if (pk < lo_span || pk > hi_span) continue;
    const double v = polys[static_cast<std::size_t>(kv.piece_index(pk))](pk);
    if (pair_sign(seq, static_cast<int>(ell)) * v < -1e-7)
      throw std::logic_error("correction family sign chain broken");
  }

  DeltaFamily fam;
  fam.knot = knot;
  fam.first_piece = first;
  fam.last_piece = last;
  fam.stage = stage;
  fam.merged = merged;
  fam.pieces = std::move(polys);
  for (const auto& [k, rs] : roots_by_piece)
    fam.roots.insert(fam.roots.end(), rs.begin(), rs.end());
  std::sort(fam.roots.begin(), fam.roots.end());
  return fam;
}

int count_extremes(const std::vector<KnotClass>& classes) {
  int n = 0;
  for (const auto& c : classes)
    if (c.extreme) ++n;
  return n;
}

}  // namespace

int pair_of_knot(const AlternatingSequence& seq, double x, int s) {
  if (seq.pairs.empty())
    throw std::invalid_argument("pair_of_knot: empty alternation");
  if (s != 1 && s != -1)
    throw std::invalid_argument("pair_of_knot: s must be +1 or -1");
  int best = -1;
  double bestd = std::numeric_limits<double>::infinity();
  for (std::size_t ell = 0; ell < seq.pairs.size(); ++ell) {
    if (pair_sign(seq, static_cast<int>(ell)) != s) continue;
    const double d = std::max(
        {seq.pairs[ell].first - x, x - seq.pairs[ell].second, 0.0});
    if (d < bestd) {
      bestd = d;
      best = static_cast<int>(ell);
    }
  }
  if (best < 0)
    throw std::invalid_argument("pair_of_knot: no pair matches the sign");
  const double span =
      std::max(seq.pairs.back().second - seq.pairs.front().first, 1e-12);
  if (bestd > 0.25 * span)
    throw std::invalid_argument(
        "pair_of_knot: abscissa is not near a matching pair");
  return best;
}

std::optional<DeltaFamily> exists_delta_left(const AlternatingSequence& seq,
                                             const KnotVector& kv,
                                             int knot_index, int s) {
  const int p = kv.piece_count() - 1;
  if (knot_index < 1 || knot_index > p)
    throw std::invalid_argument("exists_delta_left: interior knot required");
  const int i = knot_index;
  const int j = pair_of_knot(seq, kv.knots[static_cast<std::size_t>(i)], s);
  const int last_pair = seq.k();
  const double len = domain_len(kv);
  const double tolm = 1e-9 * len;
  const double tol_merge = 1e-6 * len;

  int cap_sum = 0;
  for (int r = i; r <= p; ++r) {
    cap_sum += kv.degrees[static_cast<std::size_t>(r)];
    int q = j;
    while (q + 1 <= last_pair &&
           seq.pairs[static_cast<std::size_t>(q) + 1].first <=
               kv.knots[static_cast<std::size_t>(r) + 1] + tolm)
      ++q;
    const int m = q - j + 1;
    // Flip confinement: the m-1 sign changes needed between the windowed
    // pairs all live left of x_{r+1}, so no later stage can recover either.
    if (m >= cap_sum + 2) return std::nullopt;

    std::vector<std::pair<double, double>> windows;
    for (int ell = j; ell < q; ++ell)
      windows.emplace_back(seq.pairs[static_cast<std::size_t>(ell)].second,
                           seq.pairs[static_cast<std::size_t>(ell) + 1].first);

    if (r < p) {
      const bool merged =
          m == cap_sum + 1 &&
          std::fabs(seq.pairs[static_cast<std::size_t>(q)].first -
                    kv.knots[static_cast<std::size_t>(r) + 1]) <= tol_merge;
      if (m <= cap_sum || merged) {
        std::vector<int> used(static_cast<std::size_t>(p + 1), 0);
        auto wins = windows;
        if (merged) wins.pop_back();  // that flip merges with the zero root
        const auto placed = match_windows(wins, kv, i, r, used, true);
        if (placed &&
            used[static_cast<std::size_t>(r)] < kv.degrees[static_cast<std::size_t>(r)]) {
          std::map<int, std::vector<double>> by_piece;
          for (const auto& [k, root] : *placed) by_piece[k].push_back(root);
          by_piece[r].push_back(kv.knots[static_cast<std::size_t>(r) + 1]);
          return assemble_family(kv, seq, i, s, i, r, r, merged,
                                 std::move(by_piece), true);
        }
      }
    } else if (m <= cap_sum + 1) {
      std::vector<int> used(static_cast<std::size_t>(p + 1), 0);
      const auto placed = match_windows(windows, kv, i, p, used, true);
      if (placed) {
        std::map<int, std::vector<double>> by_piece;
        for (const auto& [k, root] : *placed) by_piece[k].push_back(root);
        return assemble_family(kv, seq, i, s, i, p, p, false,
                               std::move(by_piece), true);
      }
    }
  }
  return std::nullopt;
}

std::optional<DeltaFamily> exists_delta_right(const AlternatingSequence& seq,
                                              const KnotVector& kv,
                                              int knot_index, int s) {
  const int p = kv.piece_count() - 1;
  if (knot_index < 1 || knot_index > p)
    throw std::invalid_argument("exists_delta_right: interior knot required");
  const int i = knot_index;
  const int j = pair_of_knot(seq, kv.knots[static_cast<std::size_t>(i)], s);
  const double len = domain_len(kv);
  const double tolm = 1e-9 * len;
  const double tol_merge = 1e-6 * len;

  int cap_sum = 0;
  for (int r = i - 1; r >= 0; --r) {
    cap_sum += kv.degrees[static_cast<std::size_t>(r)];
    int lmin = j;
    while (lmin - 1 >= 0 &&
           seq.pairs[static_cast<std::size_t>(lmin) - 1].second >=
               kv.knots[static_cast<std::size_t>(r)] - tolm)
      --lmin;
    const int m = j - lmin + 1;
    if (m >= cap_sum + 2) return std::nullopt;

    std::vector<std::pair<double, double>> windows;
    for (int ell = lmin; ell < j; ++ell)
      windows.emplace_back(seq.pairs[static_cast<std::size_t>(ell)].second,
                           seq.pairs[static_cast<std::size_t>(ell) + 1].first);

    if (r > 0) {
      const bool merged =
          m == cap_sum + 1 &&
          std::fabs(seq.pairs[static_cast<std::size_t>(lmin)].second -
                    kv.knots[static_cast<std::size_t>(r)]) <= tol_merge;
      if (m <= cap_sum || merged) {
        std::vector<int> used(static_cast<std::size_t>(p + 1), 0);
        auto wins = windows;
        if (merged) wins.erase(wins.begin());
        const auto placed = match_windows(wins, kv, r, i - 1, used, false);
        if (placed &&
            used[static_cast<std::size_t>(r)] < kv.degrees[static_cast<std::size_t>(r)]) {
          std::map<int, std::vector<double>> by_piece;
          for (const auto& [k, root] : *placed) by_piece[k].push_back(root);
          by_piece[r].push_back(kv.knots[static_cast<std::size_t>(r)]);
          return assemble_family(kv, seq, i, s, r, i - 1, r, merged,
                                 std::move(by_piece), false);
        }
      }
    } else if (m <= cap_sum + 1) {
      std::vector<int> used(static_cast<std::size_t>(p + 1), 0);
      const auto placed = match_windows(windows, kv, 0, i - 1, used, false);
      if (placed) {
        std::map<int, std::vector<double>> by_piece;
        for (const auto& [k, root] : *placed) by_piece[k].push_back(root);
        return assemble_family(kv, seq, i, s, 0, i - 1, 0, false,
                               std::move(by_piece), false);
      }
    }
  }
  return std::nullopt;
}

bool count_left_family_exists(const AlternatingSequence& seq,
                              const KnotVector& kv, int knot_index, int s) {
  const int p = kv.piece_count() - 1;
  const int j = pair_of_knot(seq, kv.knots[static_cast<std::size_t>(knot_index)], s);
  const int last_pair = seq.k();
  const double tolm = 1e-9 * domain_len(kv);
  int cap_sum = 0;
  for (int r = knot_index; r <= p; ++r) {
    cap_sum += kv.degrees[static_cast<std::size_t>(r)];
    int q = j;
    while (q + 1 <= last_pair &&
           seq.pairs[static_cast<std::size_t>(q) + 1].first <=
               kv.knots[static_cast<std::size_t>(r) + 1] + tolm)
      ++q;
    const int m = q - j + 1;
    if (m <= cap_sum) return true;
    if (m >= cap_sum + 2) return false;
  }
  return true;
}

bool count_right_family_exists(const AlternatingSequence& seq,
                               const KnotVector& kv, int knot_index, int s) {
  const int j = pair_of_knot(seq, kv.knots[static_cast<std::size_t>(knot_index)], s);
  const double tolm = 1e-9 * domain_len(kv);
  int cap_sum = 0;
  for (int r = knot_index - 1; r >= 0; --r) {
    cap_sum += kv.degrees[static_cast<std::size_t>(r)];
    int lmin = j;
    while (lmin - 1 >= 0 &&
           seq.pairs[static_cast<std::size_t>(lmin) - 1].second >=
               kv.knots[static_cast<std::size_t>(r)] - tolm)
      --lmin;
    const int m = j - lmin + 1;
    if (m <= cap_sum) return true;
    if (m >= cap_sum + 2) return false;
  }
  return true;
}

ThetaResult theta(const EvaluableFunction& f, const KnotVector& kv,
                  const FreeKnotParams& params) {
  FitParams fit = params.fit;
  fit.beta_max = params.beta_cert;
  fit.beta_min = std::min(fit.beta_min, fit.beta_max);
  SplineFitReport rep = fixed_knot_fit(f, kv, fit);
  Spline sigma = rep.spline;
  ThetaResult out(std::move(sigma), std::move(rep));
  out.value = out.report.final_norm;
  return out;
}

double lipschitz_probe(const EvaluableFunction& f, const KnotVector& kv,
                       double radius, int samples,
                       const FreeKnotParams& params) {
  if (radius <= 0.0 || samples <= 0) return 0.0;
  const int p = kv.piece_count() - 1;
  if (p < 1) return 0.0;
  const double base = theta(f, kv, params).value;
  std::mt19937 rng(params.seed);
  std::uniform_real_distribution<double> jitter(-radius, radius);
  double min_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= p; ++k)
    min_gap = std::min(min_gap, kv.piece_interval(k).length());
  min_gap *= 1e-3;

  double best = 0.0;
  for (int sample = 0; sample < samples; ++sample) {
    std::vector<double> y = kv.knots;
    for (int i = 1; i <= p; ++i) y[static_cast<std::size_t>(i)] += jitter(rng);
    for (int i = 1; i <= p; ++i) {
      const double lo = y[static_cast<std::size_t>(i) - 1] + min_gap;
      const double hi = kv.knots.back() - (p + 1 - i) * min_gap;
      y[static_cast<std::size_t>(i)] =
          std::clamp(y[static_cast<std::size_t>(i)], lo, hi);
    }
    double l1 = 0.0;
    for (int i = 1; i <= p; ++i)
      l1 += std::fabs(y[static_cast<std::size_t>(i)] -
                      kv.knots[static_cast<std::size_t>(i)]);
    if (l1 < 1e-300) continue;
    const double val = theta(f, KnotVector(y, kv.degrees), params).value;
    best = std::max(best, std::fabs(val - base) / l1);
  }
  return best;
}

std::vector<KnotClass> classify_knots(const Spline& sigma,
                                      const EvaluableFunction& f,
                                      double theta_value,
                                      const FreeKnotParams& params) {
  const KnotVector& kv = sigma.knots();
  const int p = kv.piece_count() - 1;
  std::vector<KnotClass> out;
  out.reserve(static_cast<std::size_t>(std::max(p, 0)));
  for (int i = 1; i <= p; ++i) {
    KnotClass c;
    c.index = i;
    c.x = kv.knots[static_cast<std::size_t>(i)];
    const double dev = sigma(c.x) - f(c.x);
    c.extreme =
        theta_value > 0.0 &&
        std::fabs(dev) >= theta_value * (1.0 - params.extreme_rtol);
    if (!c.extreme) {
      c.kind = "non-extreme";
      out.push_back(c);
      continue;
    }
    c.s = sign_of(dev);
    const double dl = sigma.derivative_left(i);
    const double dr = sigma.derivative_right(i);
    c.jump = c.s * (dl - dr);
    const double scale = std::max({1.0, std::fabs(dl), std::fabs(dr)});
    if (std::fabs(c.jump) <= params.neutral_band * scale)
      c.kind = "neutral";
    else if (c.jump > 0.0)
      c.kind = "unstable";
    else
      c.kind = "stable";
    out.push_back(c);
  }
  return out;
}

double max_nondegrading_lambda(const Spline& sigma, const EvaluableFunction& f,
                               const DeltaFamily& family, double theta_value,
                               double grow_tol, int grid_size) {
  const KnotVector& kv = sigma.knots();
  const int pieces = kv.piece_count();
  const double len = domain_len(kv);
  const double xtol = 1e-12 * len;
  const int per_grid = std::max(513, grid_size / std::max(pieces, 1));

  const auto phi = [&](double lambda) {
    double worst = 0.0;
    for (int k = 0; k < pieces; ++k) {
      const Interval iv = kv.piece_interval(k);
      const auto fn = [&, k](double t) {
        return sigma.piece(k)(t) -
               lambda * family.pieces[static_cast<std::size_t>(k)](t) - f(t);
      };
      worst = std::max(worst, detail::sup_norm(fn, iv.lo, iv.hi, per_grid, xtol));
    }
    return worst;
  };

  double sup_delta = 0.0;
  for (int k = family.first_piece; k <= family.last_piece; ++k) {
    const Interval iv = kv.piece_interval(k);
    const auto fn = [&, k](double t) {
      return family.pieces[static_cast<std::size_t>(k)](t);
    };
    sup_delta = std::max(sup_delta, detail::sup_norm(fn, iv.lo, iv.hi, 257, xtol));
  }
  if (!(sup_delta > 0.0) || !(theta_value > 0.0)) return 0.0;

  const double target = theta_value * (1.0 + grow_tol);
  double lam = 0.25 * theta_value / sup_delta;
  double lo = 0.0, hi = 0.0;
  if (phi(lam) <= target) {
    lo = lam;
    for (int it = 0; it < 200; ++it) {
      const double next = lam * 2.0;
      if (next > 1e12 * theta_value / sup_delta) return lo;
      if (phi(next) > target) {
        hi = next;
        break;
      }
      lam = next;
      lo = lam;
    }
    if (hi == 0.0) return lo;
  } else {
    hi = lam;
    for (int it = 0; it < 80; ++it) {
      lam *= 0.5;
      if (phi(lam) <= target) {
        lo = lam;
        break;
      }
      hi = lam;
    }
    if (lo == 0.0) return 0.0;
  }
  // phi is convex in lambda, so validity on [0, lo] follows from phi(lo) ok.
  for (int it = 0; it < 60 && hi - lo > 1e-6 * lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) <= target)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

std::optional<KnotMoveResult> knot_move(const Spline& sigma, int knot_index,
                                        const DeltaFamily& family,
                                        double lambda) {
  const KnotVector& kv = sigma.knots();
  const int p = kv.piece_count() - 1;
  if (knot_index < 1 || knot_index > p)
    throw std::invalid_argument("knot_move: interior knot index required");
  if (family.knot != knot_index)
    throw std::invalid_argument("knot_move: family was built for another knot");
  if (!(lambda > 0.0))
    throw std::invalid_argument("knot_move: lambda must be positive");
  const int i = knot_index;
  const bool left_move = family.first_piece == i;
  if (!left_move && family.last_piece != i - 1)
    throw std::invalid_argument("knot_move: family does not border the knot");

  const double xi = kv.knots[static_cast<std::size_t>(i)];
  const Polynomial& edge = left_move ? family.pieces[static_cast<std::size_t>(i)]
                                     : family.pieces[static_cast<std::size_t>(i) - 1];
  // Junction equation: the corrected side must meet the untouched side.
  const auto junction_gap = [&](double t) {
    const double at = xi + t;
    const double base =
        left_move ? sigma.piece(i)(at) -
                        sigma.piece(i - 1)(at)
                  : sigma.piece(i - 1)(at) -
                        sigma.piece(i)(at);
    return base - lambda * edge(at);
  };
  const double h0 = junction_gap(0.0);
  if (h0 == 0.0) return std::nullopt;
  const double gap = left_move ? xi - kv.knots[static_cast<std::size_t>(i) - 1]
                               : kv.knots[static_cast<std::size_t>(i) + 1] - xi;
  const double cap = gap * (1.0 - 1e-3);
  const double dir = left_move ? -1.0 : 1.0;
  double lo_t = 0.0, hi_t = 0.0;
  bool found = false;
  for (double h = cap * 1e-9;; h = std::min(h * 2.0, cap)) {
    const double t = dir * h;
    if (junction_gap(t) * h0 < 0.0) {
      hi_t = t;
      found = true;
      break;
    }
    lo_t = t;
    if (h >= cap) break;
  }
  if (!found) return std::nullopt;
  const double len = domain_len(kv);
  for (int it = 0; it < 200 && std::fabs(hi_t - lo_t) > 1e-15 * len; ++it) {
    const double mid = 0.5 * (lo_t + hi_t);
    if (junction_gap(mid) * h0 < 0.0)
      hi_t = mid;
    else
      lo_t = mid;
  }
  const double tstar = 0.5 * (lo_t + hi_t);
  if (std::fabs(tstar) < 1e-12 * len) return std::nullopt;
  const double y = xi + tstar;

  std::vector<double> knots = kv.knots;
  knots[static_cast<std::size_t>(i)] = y;
  KnotVector nkv(knots, kv.degrees);
  std::vector<Polynomial> pieces;
  pieces.reserve(static_cast<std::size_t>(p + 1));
  for (int k = 0; k <= p; ++k) {
    const std::size_t ku = static_cast<std::size_t>(k);
    if (left_move) {
      if (k < i - 1) {
        pieces.push_back(sigma.piece(static_cast<int>(ku)));
      } else if (k == i - 1) {
        pieces.push_back(sigma.piece(static_cast<int>(ku)).rebase(nkv.piece_interval(k)));
      } else {
        Polynomial q = sigma.piece(static_cast<int>(ku)) - family.pieces[ku].scaled(lambda);
        pieces.push_back(k == i ? q.rebase(nkv.piece_interval(k)) : std::move(q));
      }
    } else {
      if (k > i) {
        pieces.push_back(sigma.piece(static_cast<int>(ku)));
      } else if (k == i) {
        pieces.push_back(sigma.piece(static_cast<int>(ku)).rebase(nkv.piece_interval(k)));
      } else {
        Polynomial q = sigma.piece(static_cast<int>(ku)) - family.pieces[ku].scaled(lambda);
        pieces.push_back(k == i - 1 ? q.rebase(nkv.piece_interval(k))
                                    : std::move(q));
      }
    }
  }
  Spline moved(nkv, std::move(pieces));
  KnotMoveResult out(std::move(nkv), std::move(moved));
  out.new_knot = y;
  out.lambda = lambda;
  return out;
}

namespace {

struct MoveOutcome {
  double lambda = 0.0;
  double new_knot = std::numeric_limits<double>::quiet_NaN();
  double theta_after = std::numeric_limits<double>::quiet_NaN();
  bool improved = false;
  std::optional<ThetaResult> after;
};

// Executes a family move with the largest non-degrading lambda, halving on
// junction failure; the refit at the new configuration is the arbiter.
MoveOutcome try_move(const EvaluableFunction& f, const ThetaResult& th,
                     const DeltaFamily& family, const FreeKnotParams& params,
                     int extremes_before) {
  MoveOutcome out;
  double lam = max_nondegrading_lambda(th.sigma, f, family, th.value,
                                       params.grow_tol, params.fit.grid_size);
  if (!(lam > 0.0)) return out;
  lam *= 0.999;
  const double strict = std::max(1e-12, 1e-9 * th.value);
  int fits = 0;
  for (int attempt = 0; attempt < 12 && fits < 4; ++attempt) {
    const auto mv = knot_move(th.sigma, family.knot, family, lam);
    if (!mv) {
      lam *= 0.5;
      continue;
    }
    ThetaResult after = theta(f, mv->kv, params);
    ++fits;
    if (!out.after.has_value() || after.value < out.theta_after) {
      out.lambda = lam;
      out.new_knot = mv->new_knot;
      out.theta_after = after.value;
      out.after = std::move(after);
    }
    if (out.theta_after < th.value - strict) break;
    lam *= 0.5;
  }
  if (out.after.has_value()) {
    out.improved = out.theta_after < th.value - strict;
    if (!out.improved && out.theta_after <= th.value + strict) {
      const int extremes_after = count_extremes(
          classify_knots(out.after->sigma, f, out.after->value, params));
      out.improved = extremes_after < extremes_before;
    }
  }
  return out;
}

std::optional<BarrierInfo> compute_barrier(const EvaluableFunction& f,
                                           const KnotVector& kv,
                                           const ThetaResult& th,
                                           const FreeKnotParams& params) {
  if (!th.report.certificate.has_value()) return std::nullopt;
  const CsCertificate& cert = *th.report.certificate;
  if (cert.stop_step < 0 || cert.used.empty()) return std::nullopt;
  const AlternatingSequence& seq = th.report.alternation;
  if (seq.pairs.empty()) return std::nullopt;
  const int p = kv.piece_count() - 1;
  const int i0 = cert.i2 - 1;
  if (i0 < 0 || i0 > p ||
      cert.used.size() != static_cast<std::size_t>(p + 1))
    return std::nullopt;

  BarrierInfo b;
  b.i_zero = i0;
  int im = i0;
  while (im - 1 >= 0 && cert.used[static_cast<std::size_t>(im) - 1] ==
                            kv.degrees[static_cast<std::size_t>(im) - 1])
    --im;
  b.i_minus = im;

  const double tolx = 1e-12 * domain_len(kv);
  const auto window_count = [&](int l) {
    const double lo = kv.knots[static_cast<std::size_t>(l)];
    const double hi = kv.knots[static_cast<std::size_t>(l) + 1];
    int n = 0;
    for (const auto& pr : seq.pairs) {
      const bool plus_in = pr.second >= lo - tolx && pr.second <= hi + tolx;
      const bool minus_in = pr.first >= lo - tolx && pr.first <= hi + tolx;
      if (plus_in || minus_in) ++n;
    }
    return n;
  };
  if (window_count(i0) < kv.degrees[static_cast<std::size_t>(i0)])
    return std::nullopt;
  int ip = i0;
  while (ip + 1 <= p &&
         window_count(ip + 1) >= kv.degrees[static_cast<std::size_t>(ip) + 1])
    ++ip;
  b.i_plus = ip;

  const int n_pairs = static_cast<int>(seq.pairs.size());
  int jm = -1;
  for (int jj = 0; jj < n_pairs; ++jj) {
    if (seq.pairs[static_cast<std::size_t>(jj)].second >=
        kv.knots[static_cast<std::size_t>(b.i_minus)] - tolx) {
      jm = jj;
      break;
    }
  }
  int jp = -1;
  for (int jj = n_pairs - 1; jj >= 0; --jj) {
    if (seq.pairs[static_cast<std::size_t>(jj)].first <=
        kv.knots[static_cast<std::size_t>(b.i_plus) + 1] + tolx) {
      jp = jj;
      break;
    }
  }
  if (jm < 0 || jp < 0) return std::nullopt;
  b.j_minus = jm;
  b.j_plus = jp;

  std::mt19937 rng(params.seed ^ 0x9e3779b9U);
  const double margin = 1e-6 * domain_len(kv);
  const double slack = 1e-6 * th.value + 1e-12;
  int ok = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int sample = 0; sample < params.barrier_samples; ++sample) {
    std::vector<double> y = kv.knots;
    bool any = false;
    if (b.i_minus >= 1) {
      const double lo = kv.knots[static_cast<std::size_t>(b.i_minus)];
      const double hi =
          std::min(seq.pairs[static_cast<std::size_t>(b.j_minus)].second,
                   kv.knots[static_cast<std::size_t>(b.i_minus) + 1] - margin);
      if (hi > lo) {
        y[static_cast<std::size_t>(b.i_minus)] =
            std::uniform_real_distribution<double>(lo, hi)(rng);
        any = true;
      }
    }
    if (b.i_plus + 1 <= p) {
      const double hi = kv.knots[static_cast<std::size_t>(b.i_plus) + 1];
      const double lo =
          std::max(seq.pairs[static_cast<std::size_t>(b.j_plus)].first,
                   kv.knots[static_cast<std::size_t>(b.i_plus)] + margin);
      if (hi > lo) {
        y[static_cast<std::size_t>(b.i_plus) + 1] =
            std::uniform_real_distribution<double>(lo, hi)(rng);
        any = true;
      }
    }
    if (!any) {
      ++ok;
      worst = std::min(worst, 0.0);
      continue;
    }
    const double tv = theta(f, KnotVector(y, kv.degrees), params).value;
    worst = std::min(worst, tv - th.value);
    if (tv >= th.value - slack) ++ok;
  }
  b.samples = params.barrier_samples;
  b.verified = ok == params.barrier_samples;
  b.worst_margin = std::isfinite(worst) ? worst : 0.0;
  return b;
}

double degenerate_threshold(const EvaluableFunction& f,
                            const FreeKnotParams& params) {
  if (params.tol > 0.0) return params.tol;
  return 1e-10 * std::max(1.0, sup_norm(f, params.fit.grid_size));
}

}  // namespace

WMinimalityReport check_w_minimality(const EvaluableFunction& f,
                                     const KnotVector& kv,
                                     const FreeKnotParams& params) {
  WMinimalityReport rep;
  ThetaResult th = theta(f, kv, params);
  rep.theta = th.value;
  rep.sigma = th.sigma;
  if (th.value <= degenerate_threshold(f, params) ||
      th.report.alternation.pairs.empty()) {
    rep.verdict = "degenerate";
    return rep;
  }

  rep.knots = classify_knots(th.sigma, f, th.value, params);
  const AlternatingSequence& seq = th.report.alternation;
  const int extremes_before = count_extremes(rep.knots);
  bool violated = false;
  for (const KnotClass& cls : rep.knots) {
    if (!cls.extreme || cls.kind != "unstable") continue;
    for (int d = 0; d < 2; ++d) {
      const bool left = d == 0;
      KnotMoveRecord rec;
      rec.knot = cls.index;
      rec.direction = left ? "left" : "right";
      std::optional<DeltaFamily> fam;
      bool count_says = false;
      try {
        fam = left ? exists_delta_left(seq, kv, cls.index, cls.s)
                   : exists_delta_right(seq, kv, cls.index, cls.s);
        count_says = left
                         ? count_left_family_exists(seq, kv, cls.index, cls.s)
                         : count_right_family_exists(seq, kv, cls.index, cls.s);
      } catch (const std::invalid_argument&) {
        fam.reset();
      }
      rec.exists = fam.has_value();
      rec.count_check_agrees = fam.has_value() == count_says;
      if (fam.has_value()) {
        for (int k = fam->first_piece; k <= fam->last_piece; ++k)
          rec.witness_degrees.push_back(
              fam->pieces[static_cast<std::size_t>(k)].degree_bound());
        if (!violated) {
          const MoveOutcome mo = try_move(f, th, *fam, params, extremes_before);
          rec.lambda = mo.lambda;
          rec.new_knot = mo.new_knot;
          rec.theta_after = mo.theta_after;
          rec.improved = mo.improved;
          if (mo.improved) {
            violated = true;
            rep.verdict = "violated-at";
            rep.violated_knot = cls.index;
            rep.violated_direction = rec.direction;
          }
        }
      }
      rep.moves.push_back(std::move(rec));
    }
  }
  if (!violated) rep.verdict = "necessary-condition-holds";
  rep.barrier = compute_barrier(f, kv, th, params);
  return rep;
}

DescentResult descend_free_knots(const EvaluableFunction& f, KnotVector kv,
                                 int max_moves, const FreeKnotParams& params) {
  DescentResult res;
  ThetaResult th = theta(f, kv, params);
  res.theta_history.push_back(th.value);
  const double tol_deg = degenerate_threshold(f, params);
  while (res.moves < max_moves) {
    if (th.value <= tol_deg || th.report.alternation.pairs.empty()) {
      res.status = "degenerate";
      break;
    }
    const std::vector<KnotClass> classes =
        classify_knots(th.sigma, f, th.value, params);
    const int extremes_before = count_extremes(classes);
    const AlternatingSequence& seq = th.report.alternation;
    const KnotVector cur = th.sigma.knots();
    bool any_family = false;
    bool moved = false;
    for (const KnotClass& cls : classes) {
      if (!cls.extreme || cls.kind != "unstable") continue;
      for (int d = 0; d < 2 && !moved; ++d) {
        std::optional<DeltaFamily> fam;
        try {
          fam = d == 0 ? exists_delta_left(seq, cur, cls.index, cls.s)
                       : exists_delta_right(seq, cur, cls.index, cls.s);
        } catch (const std::invalid_argument&) {
          continue;
        }
        if (!fam.has_value()) continue;
        any_family = true;
        MoveOutcome mo = try_move(f, th, *fam, params, extremes_before);
        if (mo.improved) {
          th = std::move(*mo.after);
          res.theta_history.push_back(th.value);
          res.knot_trace.push_back(mo.new_knot);
          ++res.moves;
          moved = true;
        }
      }
      if (moved) break;
    }
    if (!moved) {
      res.status = any_family ? "stalled" : "necessary-condition-holds";
      break;
    }
  }
  if (res.status.empty()) res.status = "max-moves";
  res.sigma = th.sigma;
  return res;
}

}  // namespace alternant
