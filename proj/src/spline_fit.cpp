#include "alternant/spline_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace alternant {

namespace {

// card J(i1, i2) with the pair list: a pair belongs when either endpoint
// falls inside [x_{i1}, x_{i2}] (closed, with round-off slack).
std::vector<int> window_pairs(const AlternatingSequence& seq,
                              const KnotVector& kv, int i1, int i2,
                              double tolx) {
  std::vector<int> members;
  const double lo = kv.knots[i1] - tolx, hi = kv.knots[i2] + tolx;
  for (size_t j = 0; j < seq.pairs.size(); ++j) {
    const auto& [tm, tp] = seq.pairs[j];
    if ((tm >= lo && tm <= hi) || (tp >= lo && tp <= hi)) {
      members.push_back(static_cast<int>(j));
    }
  }
  return members;
}

int required_count(const KnotVector& kv, int i1, int i2) {
  int need = 2;
  for (int l = i1; l < i2; ++l) need += kv.degrees[l];
  return need;
}

}  // namespace

std::optional<CsCertificate> check_cs(const AlternatingSequence& seq,
                                      const KnotVector& kv) {
  const double tolx = 1e-12 * kv.domain().length();
  const int last = static_cast<int>(kv.knots.size()) - 1;
  for (int span = 1; span <= last; ++span) {
    for (int i1 = 0; i1 + span <= last; ++i1) {
      const int i2 = i1 + span;
      std::vector<int> members = window_pairs(seq, kv, i1, i2, tolx);
      const int need = required_count(kv, i1, i2);
      if (static_cast<int>(members.size()) >= need) {
        CsCertificate cert;
        cert.i1 = i1;
        cert.i2 = i2;
        cert.count = static_cast<int>(members.size());
        cert.required = need;
        cert.pair_indices = std::move(members);
        return cert;
      }
    }
  }
  return std::nullopt;
}

IntermediaryOutcome build_intermediary_points(const AlternatingSequence& seq,
                                              const KnotVector& kv) {
  const Interval dom = kv.domain();
  const double tolx = 1e-12 * dom.length();
  const int p_pieces = kv.piece_count();
  const int k = seq.k();

  IntermediaryPoints ip;
  ip.piece_gaps.assign(p_pieces, {});
  ip.used.assign(p_pieces, 0);

  auto piece_of = [&](double t) {
    // Left-closed convention [x_i, x_{i+1}); a point at (or within round-off
    // of) a knot belongs to the piece starting there.
    auto it = std::upper_bound(kv.knots.begin(), kv.knots.end(), t + tolx);
    int j = static_cast<int>(it - kv.knots.begin()) - 1;
    return std::min(std::max(j, 0), p_pieces - 1);
  };

  for (int j = 0; j < k; ++j) {
    const double t_plus = seq.pairs[j].second;
    const double t_next_minus = seq.pairs[j + 1].first;
    const int i = piece_of(t_plus);
    const double x_right = kv.knots[i + 1];

    if (t_next_minus <= x_right + tolx) {
      if (ip.used[i] < kv.degrees[i]) {
        // Case 1: the gap fits in the piece and the piece has room.
        ip.xi.push_back(0.5 * (t_plus + t_next_minus));
        ip.piece_gaps[i].push_back(j);
        ++ip.used[i];
      } else {
        // Case 4: the gap is confined to a full piece — certificate.
        int cur = i;
        while (true) {
          if (ip.piece_gaps[cur].empty()) {
            throw std::logic_error("certificate backtrack hit an empty piece");
          }
          const int first_gap = ip.piece_gaps[cur].front();
          if (seq.pairs[first_gap].second >= kv.knots[cur] - tolx) break;
          --cur;
        }
        CsCertificate cert;
        cert.i1 = cur;
        cert.i2 = i + 1;
        cert.stop_step = j;
        cert.required = required_count(kv, cert.i1, cert.i2);
        cert.pair_indices = window_pairs(seq, kv, cert.i1, cert.i2, tolx);
        cert.count = static_cast<int>(cert.pair_indices.size());
        cert.used = ip.used;
        cert.piece_gaps = ip.piece_gaps;
        if (cert.count < cert.required) {
          // The backtrack is certified by construction; a tolerance corner
          // that breaks the count falls back to the exhaustive scan.
          auto full = check_cs(seq, kv);
          if (!full) {
            throw std::logic_error(
                "placement stopped without a verifiable certificate");
          }
          full->stop_step = j;
          return *full;
        }
        return cert;
      }
    } else {
      if (ip.used[i] < kv.degrees[i]) {
        // Case 2: the gap crosses the knot; stay in the current piece.
        ip.xi.push_back(0.5 * (t_plus + x_right));
        ip.piece_gaps[i].push_back(j);
        ++ip.used[i];
      } else {
        // Case 3: full piece, gap crosses into the next one.
        if (i + 1 >= p_pieces) {
          throw std::logic_error("gap escapes the domain");
        }
        const double next = std::min(kv.knots[i + 2], t_next_minus);
        ip.xi.push_back(0.5 * (x_right + next));
        if (ip.used[i + 1] != 0) {
          throw std::logic_error("entered a piece that was already seeded");
        }
        ip.piece_gaps[i + 1].push_back(j);
        ip.used[i + 1] = 1;
      }
    }
  }
  return ip;
}

Spline delta_from_xi(const IntermediaryPoints& ip, int eps,
                     const KnotVector& kv) {
  if (eps != 1 && eps != -1) {
    throw std::invalid_argument("eps must be +1 or -1");
  }
  const int p_pieces = kv.piece_count();

  // Sign of the global product eps * prod (xi - s): exact via root counting.
  auto global_sign = [&](double s) {
    int below = 0;
    for (double x : ip.xi) {
      if (x < s) ++below;
    }
    return (below % 2 == 0) ? eps : -eps;
  };

  std::vector<Polynomial> pieces;
  pieces.reserve(p_pieces);
  double carry = 0.0;  // delta_{i-1}(x_i)
  for (int i = 0; i < p_pieces; ++i) {
    Interval iv = kv.piece_interval(i);
    std::vector<double> roots;
    for (int j : ip.piece_gaps[i]) roots.push_back(ip.xi[j]);

    // Piece-local sign epsilon_i matching the global product away from the
    // local roots.
    double sample = iv.midpoint();
    {
      double best_dist = -1.0;
      for (double cand :
           {iv.lo + 0.25 * iv.length(), iv.midpoint(), iv.lo + 0.75 * iv.length()}) {
        double dist = std::numeric_limits<double>::infinity();
        for (double r : roots) dist = std::min(dist, std::abs(cand - r));
        if (dist > best_dist) {
          best_dist = dist;
          sample = cand;
        }
      }
    }
    int local_parity = 0;
    for (double r : roots) {
      if (r < sample) ++local_parity;
    }
    const int local_sign = (local_parity % 2 == 0) ? 1 : -1;

    double scale;  // multiplies prod (r - t)
    if (i == 0) {
      // delta_0 = -gamma_0: unit magnitude, opposing the global pattern.
      scale = -static_cast<double>(global_sign(sample) * local_sign);
    } else {
      // Continuity pins the scale; the roots of this piece sit strictly
      // right of its left knot, so the product there never vanishes.
      double prod_at_knot = 1.0;
      for (double r : roots) prod_at_knot *= (r - iv.lo);
      scale = carry / prod_at_knot;
    }
    Polynomial piece = Polynomial::from_roots(iv, scale, roots);
    // The correction must oppose the alternating product everywhere off its
    // roots — the continuity chain preserves this by construction.
    if (!(piece(sample) * global_sign(sample) < 0.0)) {
      throw std::logic_error("correction sign chain broken");
    }
    carry = piece(iv.hi);
    pieces.push_back(std::move(piece));
  }
  return Spline(kv, std::move(pieces));
}

SplineStepResult spline_step(const Spline& sigma, const EvaluableFunction& f,
                             const Spline& delta,
                             const AlternatingSequence& seq, int grid_size) {
  const Interval dom = f.domain();
  const double xtol = 1e-12 * dom.length();

  // Safe-step seed: |delta| on the pairs is minimized at pair endpoints or at
  // interior knots caught inside a pair (the pieces are root-free there, so
  // log-concavity pins the piece minima to interval ends).
  double m_minus = std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : seq.pairs) {
    m_minus = std::min(m_minus,
                       std::min(std::abs(delta(lo)), std::abs(delta(hi))));
    for (double x : delta.knots().knots) {
      if (x > lo && x < hi) {
        m_minus = std::min(m_minus, std::abs(delta(x)));
      }
    }
  }
  auto dfn = [&delta](double t) { return delta(t); };
  const double m_plus =
      detail::sup_norm(dfn, dom.lo, dom.hi, grid_size, xtol);
  if (!(m_plus > 0.0)) {
    throw std::invalid_argument("delta vanishes identically");
  }

  auto norm_at = [&](double lambda) {
    auto fn = [&, lambda](double t) {
      return sigma(t) + lambda * delta(t) - f(t);
    };
    return detail::sup_norm(fn, dom.lo, dom.hi, grid_size, xtol);
  };

  const double norm_before = seq.big_m;
  double lambda = seq.big_m * (1.0 - seq.beta) / (m_minus + m_plus);
  const double lambda_tol = 1e-14 * std::max(1.0, lambda);
  double achieved = norm_at(lambda);
  while (achieved >= norm_before && lambda > lambda_tol) {
    lambda *= 0.5;
    achieved = norm_at(lambda);
  }
  if (achieved >= norm_before) {
    throw std::runtime_error(
        "step failure: no descent along delta down to the step tolerance");
  }

  auto neg = [&](double l) { return -norm_at(l); };
  auto [lam, negv] = detail::golden_max(neg, 0.0, 2.0 * lambda, 1e-4 * lambda);
  SplineStepResult out;
  if (-negv < achieved) {
    out.lambda = lam;
    out.norm_after = -negv;
  } else {
    out.lambda = lambda;
    out.norm_after = achieved;
  }
  return out;
}

SplineFitReport fixed_knot_fit(const EvaluableFunction& f,
                               const KnotVector& kv, const FitParams& params) {
  if (!(params.beta_min > 0.0 && params.beta_min <= params.beta_max &&
        params.beta_max <= 1.0)) {
    throw std::invalid_argument("need 0 < beta_min <= beta_max <= 1");
  }
  const Interval dom_f = f.domain();
  const Interval dom_kv = kv.domain();
  const double tolx = 1e-12 * dom_f.length();
  if (std::abs(dom_f.lo - dom_kv.lo) > tolx ||
      std::abs(dom_f.hi - dom_kv.hi) > tolx) {
    throw std::invalid_argument("knot vector must span the function domain");
  }
  const double fnorm = sup_norm(f, params.grid_size);
  const double tol_degenerate =
      params.tol > 0.0 ? params.tol : 1e-10 * std::max(1.0, fnorm);

  Spline sigma = Spline::interpolate_linear(kv, f);
  SplineFitReport report{sigma};
  report.status = "max-iterations";
  double beta = params.beta_min;
  int iter = 0;

  while (iter < params.max_iter) {
    ++iter;
    EvaluableFunction g = residual(sigma, f);
    ExtremaPair ex = extrema(g, params.grid_size, tolx);
    const double shift = 0.5 * (ex.max.value + ex.min.value);
    sigma = sigma.plus_constant(-shift);
    const double norm = 0.5 * (ex.max.value - ex.min.value);
    report.final_norm = norm;
    if (norm <= tol_degenerate) {
      report.status = "degenerate";
      break;
    }
    g = residual(sigma, f);
    AlternatingSequence seq =
        build_beta_alternance(g, beta, -1.0, params.grid_size);
    report.beta_history.push_back(beta);
    report.alternation = seq;

    IntermediaryOutcome outcome = build_intermediary_points(seq, kv);
    if (std::holds_alternative<CsCertificate>(outcome)) {
      report.certificate = std::get<CsCertificate>(outcome);
      if (beta >= params.beta_max * (1.0 - 1e-15)) {
        report.status = "beta-plus-optimal";
        break;
      }
      beta = std::min(params.gamma_up * beta, params.beta_max);
      continue;
    }

    // A beta-step shrinks the norm by at most (1 - beta) * norm: the safe
    // step is capped at lambda <= M (1 - beta) / (m- + m+) and the decrease
    // by lambda * m+.  Once that ceiling falls below the evaluation noise of
    // the residual (a cancellation of values of size ~ max(1, ||f||)), no
    // verifiable descent exists in double precision and the loop state can
    // never change again; stop with the best iterate, as the iteration cap
    // eventually would.
    const double step_noise =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, fnorm);
    if ((1.0 - beta) * norm <= step_noise) break;

    const auto& ip = std::get<IntermediaryPoints>(outcome);
    Spline delta = delta_from_xi(ip, seq.eps, kv);
    SplineStepResult step =
        spline_step(sigma, f, delta, seq, params.grid_size);
    sigma = sigma.add_scaled(delta, step.lambda);
    report.final_norm = step.norm_after;
    report.certificate.reset();
    beta = std::max(params.beta_min, params.gamma_down * beta);
  }

  report.iterations = iter;
  report.spline = sigma;
  return report;
}

}  // namespace alternant
