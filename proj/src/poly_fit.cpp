#include "alternant/poly_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace alternant {

EvaluableFunction residual(const Polynomial& sigma,
                           const EvaluableFunction& f) {
  EvaluableFunction fcopy = f;
  Polynomial scopy = sigma;
  return EvaluableFunction::callable(
      f.domain(),
      [scopy, fcopy](double t) { return scopy(t) - fcopy(t); },
      "residual(" + f.label() + ")");
}

Polynomial init_linear(const EvaluableFunction& f) {
  const Interval& dom = f.domain();
  const double fa = f(dom.lo), fb = f(dom.hi);
  const double slope = (fb - fa) / dom.length();
  return Polynomial::from_monomial(dom, {fa - slope * dom.lo, slope});
}

std::vector<double> midpoints(const AlternatingSequence& seq) {
  std::vector<double> xi;
  xi.reserve(seq.pairs.size() - 1);
  for (size_t i = 0; i + 1 < seq.pairs.size(); ++i) {
    xi.push_back(0.5 * (seq.pairs[i].second + seq.pairs[i + 1].first));
  }
  return xi;
}

Polynomial gamma_from_xi(int eps, const std::vector<double>& xi, Interval iv) {
  if (eps != 1 && eps != -1) {
    throw std::invalid_argument("eps must be +1 or -1");
  }
  return Polynomial::from_roots(iv, static_cast<double>(eps), xi);
}

SafeStep safe_step(const EvaluableFunction& g, const AlternatingSequence& seq,
                   const Polynomial& gamma, int grid_size) {
  const Interval& dom = g.domain();
  const double xtol = 1e-12 * dom.length();
  SafeStep out;
  out.m_minus = std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : seq.pairs) {
    out.m_minus = std::min(out.m_minus,
                           std::min(std::abs(gamma(lo)), std::abs(gamma(hi))));
  }
  auto gfn = [&gamma](double t) { return gamma(t); };
  out.m_plus = detail::sup_norm(gfn, dom.lo, dom.hi, grid_size, xtol);
  if (!(out.m_plus > 0.0)) {
    throw std::invalid_argument("gamma vanishes identically");
  }
  out.rho = out.m_minus / out.m_plus;
  out.lambda_bar = seq.big_m * (1.0 - seq.beta) / (out.m_minus + out.m_plus);
  out.bound = (1.0 + seq.beta * out.rho) / (1.0 + out.rho) * seq.big_m;
  return out;
}

StepSearchResult line_search_lambda(const EvaluableFunction& g,
                                    const Polynomial& gamma, double lambda_hi,
                                    int grid_size) {
  StepSearchResult out;
  const Interval& dom = g.domain();
  const double xtol = 1e-12 * dom.length();
  int evals = 0;
  auto phi = [&](double lambda) {
    ++evals;
    auto fn = [&, lambda](double t) { return g(t) - lambda * gamma(t); };
    return detail::sup_norm(fn, dom.lo, dom.hi, grid_size, xtol);
  };
  if (!(lambda_hi > 0.0)) {
    out.lambda = 0.0;
    out.mu = phi(0.0);
    out.evaluations = evals;
    return out;
  }
  auto neg_phi = [&phi](double lambda) { return -phi(lambda); };
  auto [lam, neg_mu] =
      detail::golden_max(neg_phi, 0.0, lambda_hi, 1e-4 * lambda_hi);
  out.lambda = lam;
  out.mu = -neg_mu;
  out.evaluations = evals;
  return out;
}

double gamma_k_bound(int k, double r) {
  if (k < 2) {
    throw std::invalid_argument("the extremal bound needs k >= 2");
  }
  if (!(r >= 0.0)) {
    throw std::invalid_argument("radius must be nonnegative");
  }
  // c_{2q} = (1 * 3 * ... * (2q-1))^2, c_{2q+1} = c_{2q} * (2q+1).
  const int q = k / 2;
  double c = 1.0;
  for (int j = 1; j < 2 * q; j += 2) c *= static_cast<double>(j) * j;
  if (k % 2 == 1) c *= static_cast<double>(2 * q + 1);
  return c * std::pow(r, k);
}

double reduction_rate_bound(int k, double mu, double beta, double length) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(mu >= 0.0) || !(length > 0.0)) {
    throw std::invalid_argument("mu >= 0 and length > 0 required");
  }
  const double e = std::exp(1.0);
  const double base = (k - 1) * mu / (2.0 * e * length);
  const double tau = (e / k) * std::pow(base, k);
  return 1.0 - (1.0 - beta) * tau / (1.0 + tau);
}

FitReport remez_fit(const EvaluableFunction& f, int degree,
                    const FitParams& params) {
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  if (!(params.beta_min > 0.0 && params.beta_min <= params.beta_max &&
        params.beta_max <= 1.0)) {
    throw std::invalid_argument("need 0 < beta_min <= beta_max <= 1");
  }
  const Interval& dom = f.domain();
  const double xtol = 1e-12 * dom.length();
  const double fnorm = sup_norm(f, params.grid_size);
  const double tol_degenerate =
      params.tol > 0.0 ? params.tol : 1e-10 * std::max(1.0, fnorm);

  Polynomial sigma =
      degree >= 1 ? init_linear(f)
                  : Polynomial::constant(
                        dom, 0.5 * (extrema(f, params.grid_size).max.value +
                                    extrema(f, params.grid_size).min.value));

  FitReport report{sigma};
  report.degree = degree;
  double beta = params.beta_min;
  int iter = 0;
  report.status = "max-iterations";

  while (iter < params.max_iter) {
    ++iter;
    EvaluableFunction g = residual(sigma, f);
    ExtremaPair ex = extrema(g, params.grid_size, xtol);
    const double shift = 0.5 * (ex.max.value + ex.min.value);
    sigma = sigma.plus_constant(-shift);
    const double norm = 0.5 * (ex.max.value - ex.min.value);
    if (norm <= tol_degenerate) {
      report.status = "degenerate";
      report.final_norm = norm;
      break;
    }
    g = residual(sigma, f);
    AlternatingSequence seq =
        build_beta_alternance(g, beta, -1.0, params.grid_size);
    report.beta_history.push_back(beta);
    report.final_norm = norm;

    if (seq.k() >= degree + 1) {
      if (beta >= params.beta_max * (1.0 - 1e-15)) {
        report.status = "beta-plus-optimal";
        report.alternation = seq;
        break;
      }
      beta = std::min(params.gamma_up * beta, params.beta_max);
      report.alternation = seq;
      continue;
    }

    std::vector<double> xi = midpoints(seq);
    Polynomial gamma = gamma_from_xi(seq.eps, xi, dom);
    SafeStep ss = safe_step(g, seq, gamma, params.grid_size);
    StepSearchResult ls =
        line_search_lambda(g, gamma, 2.0 * ss.lambda_bar, params.grid_size);

    double lambda = ls.lambda;
    double norm_after = ls.mu;
    if (!(norm_after <= ss.bound * (1.0 + 1e-12))) {
      lambda = ss.lambda_bar;
      auto fn = [&](double t) { return g(t) - lambda * gamma(t); };
      norm_after =
          detail::sup_norm(fn, dom.lo, dom.hi, params.grid_size, xtol);
    }
    sigma = sigma - gamma.scaled(lambda);

    if (params.on_gamma_step) {
      GammaStepInfo info;
      info.iteration = iter;
      info.beta = beta;
      info.k = seq.k();
      info.eps = seq.eps;
      info.lambda = lambda;
      info.lambda_bar = ss.lambda_bar;
      info.safe_bound = ss.bound;
      info.rho = ss.rho;
      info.m_minus = ss.m_minus;
      info.m_plus = ss.m_plus;
      info.norm_before = norm;
      info.norm_after = norm_after;
      info.residual_before = &g;
      info.gamma = &gamma;
      params.on_gamma_step(info);
    }

    report.alternation = seq;
    report.final_norm = norm_after;
    beta = std::max(params.beta_min, params.gamma_down * beta);
  }

  report.iterations = iter;
  report.polynomial = sigma;
  return report;
}

}  // namespace alternant
