#include "alternant/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace alternant {
namespace oracle {

namespace {

// Gaussian elimination with partial pivoting; a is n*n row-major (copied).
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::fabs(a[static_cast<std::size_t>(col) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::fabs(a[static_cast<std::size_t>(r) * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (!(best > 0.0)) throw std::runtime_error("singular basis matrix");
    if (piv != col) {
      for (int c = col; c < n; ++c)
        std::swap(a[static_cast<std::size_t>(piv) * n + c],
                  a[static_cast<std::size_t>(col) * n + c]);
      std::swap(b[piv], b[col]);
    }
    const double d = a[static_cast<std::size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double factor = a[static_cast<std::size_t>(r) * n + col] / d;
      if (factor == 0.0) continue;
      a[static_cast<std::size_t>(r) * n + col] = 0.0;
      for (int c = col + 1; c < n; ++c)
        a[static_cast<std::size_t>(r) * n + c] -=
            factor * a[static_cast<std::size_t>(col) * n + c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c)
      s -= a[static_cast<std::size_t>(r) * n + c] * x[c];
    x[r] = s / a[static_cast<std::size_t>(r) * n + r];
  }
  return x;
}

// Dual LP of the discrete minimax problem, in equality standard form:
//   max  sum_i (u_i - v_i) values[i]
//   s.t. sum_i (u_i - v_i) rows[i] = 0,  sum_i (u_i + v_i) = 1,  u, v >= 0.
// Columns 0..m-1 are u, m..2m-1 are v, >= 2m are phase-1 artificials.
// The simplex multipliers of the optimal basis are exactly the primal
// minimax solution: y[0..D-1] the coefficients, y[D] the deviation.
class DualSimplex {
 public:
  DualSimplex(const std::vector<std::vector<double>>& rows,
              const std::vector<double>& values)
      : rows_(rows), values_(values), m_(static_cast<int>(rows.size())),
        dim_(static_cast<int>(rows.front().size())), n_eq_(dim_ + 1) {
    double scale = 1.0;
    for (double v : values_) scale = std::max(scale, std::fabs(v));
    rc_tol_ = 1e-11 * scale;
    ratio_tol_ = 1e-12;
  }

  MinimaxSolution solve() {
    basis_.resize(static_cast<std::size_t>(n_eq_));
    for (int r = 0; r < n_eq_; ++r) basis_[r] = 2 * m_ + r;
    in_basis_.assign(static_cast<std::size_t>(2 * m_ + n_eq_), false);
    for (int id : basis_) in_basis_[static_cast<std::size_t>(id)] = true;

    run_phase(/*phase1=*/true);
    if (basic_values_sum_artificial() > 1e-8)
      throw std::runtime_error("phase 1 failed to reach feasibility");
    drive_out_artificials();
    run_phase(/*phase1=*/false);

    std::vector<double> y = multipliers(/*phase1=*/false);
    MinimaxSolution sol;
    sol.coefficients.assign(y.begin(), y.begin() + dim_);
    sol.value = y[static_cast<std::size_t>(dim_)];
    std::set<int> ref;
    for (int id : basis_)
      if (id < 2 * m_) ref.insert(id % m_);
    sol.reference.assign(ref.begin(), ref.end());
    return sol;
  }

 private:
  // Column `id` of the equality matrix.
  void column(int id, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(n_eq_), 0.0);
    if (id >= 2 * m_) {
      out[static_cast<std::size_t>(id - 2 * m_)] = 1.0;
      return;
    }
    const int i = id % m_;
    const double sign = id < m_ ? 1.0 : -1.0;
    for (int d = 0; d < dim_; ++d)
      out[static_cast<std::size_t>(d)] = sign * rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
    out[static_cast<std::size_t>(dim_)] = 1.0;
  }

  double objective(int id, bool phase1) const {
    if (phase1) return id >= 2 * m_ ? -1.0 : 0.0;
    if (id >= 2 * m_) return 0.0;
    const int i = id % m_;
    return (id < m_ ? 1.0 : -1.0) * values_[static_cast<std::size_t>(i)];
  }

  std::vector<double> basis_matrix() const {
    std::vector<double> b(static_cast<std::size_t>(n_eq_) * n_eq_, 0.0);
    std::vector<double> col;
    for (int c = 0; c < n_eq_; ++c) {
      column(basis_[static_cast<std::size_t>(c)], col);
      for (int r = 0; r < n_eq_; ++r)
        b[static_cast<std::size_t>(r) * n_eq_ + c] = col[static_cast<std::size_t>(r)];
    }
    return b;
  }

  std::vector<double> basic_solution() const {
    std::vector<double> rhs(static_cast<std::size_t>(n_eq_), 0.0);
    rhs[static_cast<std::size_t>(n_eq_ - 1)] = 1.0;
    return solve_dense(basis_matrix(), rhs);
  }

  double basic_values_sum_artificial() const {
    const std::vector<double> xb = basic_solution();
    double s = 0.0;
    for (int r = 0; r < n_eq_; ++r)
      if (basis_[static_cast<std::size_t>(r)] >= 2 * m_)
        s += std::fabs(xb[static_cast<std::size_t>(r)]);
    return s;
  }

  std::vector<double> multipliers(bool phase1) const {
    const std::vector<double> b = basis_matrix();
    std::vector<double> bt(static_cast<std::size_t>(n_eq_) * n_eq_);
    for (int r = 0; r < n_eq_; ++r)
      for (int c = 0; c < n_eq_; ++c)
        bt[static_cast<std::size_t>(c) * n_eq_ + r] = b[static_cast<std::size_t>(r) * n_eq_ + c];
    std::vector<double> cb(static_cast<std::size_t>(n_eq_));
    for (int r = 0; r < n_eq_; ++r)
      cb[static_cast<std::size_t>(r)] = objective(basis_[static_cast<std::size_t>(r)], phase1);
    return solve_dense(std::move(bt), std::move(cb));
  }

  // Entering rule: Dantzig (most positive reduced cost, smallest id on ties)
  // for speed on massively degenerate fine grids; a long streak of degenerate
  // pivots switches to Bland's smallest-id rule, which is cycle-free, until a
  // pivot makes progress again.  Among min-ratio rows the smallest basis id
  // leaves.  Deterministic throughout.
  void run_phase(bool phase1) {
    const long max_iter = 2000L * (m_ + n_eq_) + 10000L;
    std::vector<double> col;
    long degenerate_streak = 0;
    for (long iter = 0; iter < max_iter; ++iter) {
      const std::vector<double> y = multipliers(phase1);
      const bool bland = degenerate_streak > 50L * n_eq_;
      int entering = -1;
      double best_rc = rc_tol_;
      for (int id = 0; id < 2 * m_; ++id) {
        if (in_basis_[static_cast<std::size_t>(id)]) continue;
        column(id, col);
        double rc = objective(id, phase1);
        for (int r = 0; r < n_eq_; ++r) rc -= y[static_cast<std::size_t>(r)] * col[static_cast<std::size_t>(r)];
        if (bland) {
          if (rc > rc_tol_) {
            entering = id;
            break;
          }
        } else if (rc > best_rc) {
          best_rc = rc;
          entering = id;
        }
      }
      if (entering < 0) return;

      column(entering, col);
      const std::vector<double> dir = solve_dense(basis_matrix(), col);
      const std::vector<double> xb = basic_solution();
      int leave_row = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < n_eq_; ++r) {
        if (dir[static_cast<std::size_t>(r)] <= ratio_tol_) continue;
        const double ratio = std::max(xb[static_cast<std::size_t>(r)], 0.0) / dir[static_cast<std::size_t>(r)];
        if (ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 &&
             (leave_row < 0 || basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave_row)]))) {
          best_ratio = ratio;
          leave_row = r;
        }
      }
      if (leave_row < 0) throw std::runtime_error("dual LP unbounded");
      if (best_ratio <= 1e-12) {
        ++degenerate_streak;
      } else {
        degenerate_streak = 0;
      }
      in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave_row)])] = false;
      basis_[static_cast<std::size_t>(leave_row)] = entering;
      in_basis_[static_cast<std::size_t>(entering)] = true;
    }
    throw std::runtime_error("simplex iteration limit exceeded");
  }

  // Degenerate pivots replacing zero-level artificials by real columns where
  // the basis stays nonsingular; a stuck artificial marks a redundant row.
  void drive_out_artificials() {
    std::vector<double> col;
    for (int r = 0; r < n_eq_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < 2 * m_) continue;
      for (int id = 0; id < 2 * m_; ++id) {
        if (in_basis_[static_cast<std::size_t>(id)]) continue;
        column(id, col);
        std::vector<double> dir;
        try {
          dir = solve_dense(basis_matrix(), col);
        } catch (const std::runtime_error&) {
          break;
        }
        if (std::fabs(dir[static_cast<std::size_t>(r)]) > 1e-9) {
          in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = false;
          basis_[static_cast<std::size_t>(r)] = id;
          in_basis_[static_cast<std::size_t>(id)] = true;
          break;
        }
      }
    }
  }

  const std::vector<std::vector<double>>& rows_;
  const std::vector<double>& values_;
  const int m_;
  const int dim_;
  const int n_eq_;
  double rc_tol_;
  double ratio_tol_;
  std::vector<int> basis_;
  std::vector<bool> in_basis_;
};

std::vector<double> uniform_grid(const Interval& iv, int grid_size) {
  std::vector<double> t(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i)
    t[static_cast<std::size_t>(i)] =
        iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / (grid_size - 1);
  t.back() = iv.hi;
  return t;
}

}  // namespace

MinimaxSolution linear_minimax(const std::vector<std::vector<double>>& rows,
                               const std::vector<double>& values) {
  if (rows.empty() || rows.size() != values.size())
    throw std::invalid_argument("linear_minimax: inconsistent system");
  const std::size_t dim = rows.front().size();
  if (dim == 0 || rows.size() <= dim)
    throw std::invalid_argument("linear_minimax: need more samples than unknowns");
  for (const auto& r : rows)
    if (r.size() != dim)
      throw std::invalid_argument("linear_minimax: ragged rows");
  return DualSimplex(rows, values).solve();
}

PolyMinimaxResult grid_minimax_poly(const EvaluableFunction& f, int degree,
                                    int grid_size) {
  if (degree < 0) throw std::invalid_argument("grid_minimax_poly: negative degree");
  if (grid_size < 4 * (degree + 2))
    throw std::invalid_argument("grid_minimax_poly: grid too coarse for degree");
  const Interval iv = f.domain();
  const std::vector<double> ts = uniform_grid(iv, grid_size);
  const int dim = degree + 1;
  std::vector<std::vector<double>> rows(ts.size(),
                                        std::vector<double>(static_cast<std::size_t>(dim)));
  std::vector<double> vals(ts.size());
  const double mid = 0.5 * (iv.lo + iv.hi);
  const double half = 0.5 * (iv.hi - iv.lo);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double u = (ts[i] - mid) / half;
    double tm1 = 1.0, t0 = u;
    rows[i][0] = 1.0;
    if (dim > 1) rows[i][1] = u;
    for (int j = 2; j < dim; ++j) {
      const double t1 = 2.0 * u * t0 - tm1;
      rows[i][static_cast<std::size_t>(j)] = t1;
      tm1 = t0;
      t0 = t1;
    }
    vals[i] = f(ts[i]);
  }
  MinimaxSolution sol = linear_minimax(rows, vals);
  PolyMinimaxResult out{Polynomial(iv, sol.coefficients)};
  out.value = sol.value;
  for (int idx : sol.reference) out.reference.push_back(ts[static_cast<std::size_t>(idx)]);
  return out;
}

SplineMinimaxResult grid_minimax_spline(const EvaluableFunction& f,
                                        const KnotVector& kv, int grid_size) {
  const Interval dom = kv.domain();
  const std::vector<double> ts = uniform_grid(dom, grid_size);
  const int pieces = kv.piece_count();
  for (int i = 0; i < pieces; ++i) {
    const Interval piv = kv.piece_interval(i);
    long count = 0;
    for (double t : ts)
      if (t >= piv.lo - 1e-15 && t <= piv.hi + 1e-15) ++count;
    if (count < 4L * (kv.degrees[static_cast<std::size_t>(i)] + 2))
      throw std::invalid_argument("grid_minimax_spline: grid too coarse for a piece");
  }

  int dim = 1;
  std::vector<int> offset(static_cast<std::size_t>(pieces));
  for (int i = 0; i < pieces; ++i) {
    offset[static_cast<std::size_t>(i)] = dim;
    dim += kv.degrees[static_cast<std::size_t>(i)];
  }
  // Basis: phi_0 = 1; for piece i and power d, the ramp ((t-x_i)/len_i)^d
  // continued by 0 to the left and 1 to the right.  Continuous by shape.
  const auto basis_at = [&](double t, std::vector<double>& row) {
    row.assign(static_cast<std::size_t>(dim), 0.0);
    row[0] = 1.0;
    for (int i = 0; i < pieces; ++i) {
      const Interval piv = kv.piece_interval(i);
      const int deg = kv.degrees[static_cast<std::size_t>(i)];
      double u;
      if (t <= piv.lo)
        u = 0.0;
      else if (t >= piv.hi)
        u = 1.0;
      else
        u = (t - piv.lo) / piv.length();
      double p = 1.0;
      for (int d = 1; d <= deg; ++d) {
        p *= u;
        row[static_cast<std::size_t>(offset[static_cast<std::size_t>(i)] + d - 1)] = p;
      }
    }
  };

  std::vector<std::vector<double>> rows(ts.size());
  std::vector<double> vals(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    basis_at(ts[i], rows[i]);
    vals[i] = f(ts[i]);
  }
  MinimaxSolution sol = linear_minimax(rows, vals);

  std::vector<Polynomial> piece_polys;
  piece_polys.reserve(static_cast<std::size_t>(pieces));
  std::vector<double> row;
  for (int q = 0; q < pieces; ++q) {
    const Interval piv = kv.piece_interval(q);
    const auto combo = [&](double t) {
      basis_at(t, row);
      double s = 0.0;
      for (int d = 0; d < dim; ++d) s += sol.coefficients[static_cast<std::size_t>(d)] * row[static_cast<std::size_t>(d)];
      return s;
    };
    piece_polys.push_back(Polynomial::fit_callable(
        piv, combo, kv.degrees[static_cast<std::size_t>(q)]));
  }
  SplineMinimaxResult out{Spline(kv, std::move(piece_polys))};
  out.value = sol.value;
  for (int idx : sol.reference) out.reference.push_back(ts[static_cast<std::size_t>(idx)]);
  return out;
}

namespace {

// Local ternary-search refinement of |g| over [lo, hi]; code path independent
// of the golden-section helper used by the construction under test.
double refine_abs_peak(const EvaluableFunction& g, double lo, double hi,
                       double xtol) {
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > xtol; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (std::fabs(g(m1)) < std::fabs(g(m2)))
      a = m1;
    else
      b = m2;
  }
  return 0.5 * (a + b);
}

}  // namespace

ScanAlternance scan_alternance(const EvaluableFunction& g, double beta,
                               int grid_size, double tol) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("scan_alternance: beta must be in (0, 1]");
  if (grid_size < 33) throw std::invalid_argument("scan_alternance: grid too small");
  const Interval dom = g.domain();
  const double len = dom.length();
  const double xtol = 1e-13 * std::max(len, 1.0);

  std::vector<double> ts = uniform_grid(dom, grid_size);
  std::vector<double> vs(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) vs[i] = g(ts[i]);

  // Collect refined candidates for peaks of |g|.
  std::vector<double> cand = ts;
  const std::size_t n = ts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = std::fabs(vs[i]);
    const bool left_ok = i == 0 || ai >= std::fabs(vs[i - 1]);
    const bool right_ok = i + 1 == n || ai >= std::fabs(vs[i + 1]);
    if (left_ok && right_ok) {
      const double lo = i == 0 ? ts[0] : ts[i - 1];
      const double hi = i + 1 == n ? ts[n - 1] : ts[i + 1];
      cand.push_back(refine_abs_peak(g, lo, hi, xtol));
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end(),
                         [&](double a, double b) { return b - a < xtol; }),
             cand.end());

  double big_m = 0.0;
  for (double t : cand) big_m = std::max(big_m, std::fabs(g(t)));
  const double tol_lvl = tol > 0.0 ? tol : 1e-9 * big_m;
  if (!(big_m > tol_lvl))
    throw std::invalid_argument("scan_alternance: function is numerically zero");
  const double level = beta * big_m - tol_lvl;

  ScanAlternance out;
  out.big_m = big_m;
  int last_sign = 0;
  double last_mag = 0.0;
  for (double t : cand) {
    const double v = g(t);
    if (std::fabs(v) < level) continue;
    const int s = v >= 0.0 ? 1 : -1;
    if (s == last_sign) {
      // Same block: keep the strongest witness.
      if (std::fabs(v) > last_mag) {
        out.points.back() = t;
        last_mag = std::fabs(v);
      }
    } else {
      out.points.push_back(t);
      last_sign = s;
      last_mag = std::fabs(v);
      if (out.points.size() == 1) out.eps = s;
    }
  }
  if (out.points.empty())
    throw std::logic_error("scan_alternance: no attainment found");
  return out;
}

}  // namespace oracle
}  // namespace alternant
