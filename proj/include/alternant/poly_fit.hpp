#pragma once

#include <functional>
#include <string>
#include <vector>

#include "alternant/alternance.hpp"
#include "alternant/evaluable.hpp"
#include "alternant/extrema.hpp"
#include "alternant/polynomial.hpp"

namespace alternant {

// Residual sigma - f as an immutable function on f's domain.
EvaluableFunction residual(const Polynomial& sigma, const EvaluableFunction& f);

// The chord through (a, f(a)) and (b, f(b)) — the descent's starting point.
Polynomial init_linear(const EvaluableFunction& f);

// xi_i = (t_i^+ + t_{i+1}^-) / 2 for consecutive pairs: one sign-change
// witness strictly inside each gap.  k() of them.
std::vector<double> midpoints(const AlternatingSequence& seq);

// gamma = eps * prod (xi_i - t): the alternating polynomial matched to the
// sign pattern of the sequence.
Polynomial gamma_from_xi(int eps, const std::vector<double>& xi, Interval iv);

struct SafeStep {
  double lambda_bar = 0.0;  // ||g||(1-beta) / (m_minus + m_plus)
  double bound = 0.0;       // (1 + beta*rho)/(1 + rho) * ||g||
  double m_minus = 0.0;     // min over pairs of |gamma| at the pair endpoints
  double m_plus = 0.0;      // max |gamma| on the domain
  double rho = 0.0;         // m_minus / m_plus
};

// The step size that provably contracts the norm: ||g - lambda_bar*gamma||
// <= bound < ||g|| whenever beta < 1.
SafeStep safe_step(const EvaluableFunction& g, const AlternatingSequence& seq,
                   const Polynomial& gamma, int grid_size = kDefaultGrid);

struct StepSearchResult {
  double lambda = 0.0;
  double mu = 0.0;  // achieved sup norm ||g - lambda*gamma||
  int evaluations = 0;
};

// Golden-section search of lambda -> ||g - lambda*gamma|| over [0, lambda_hi]
// (the objective is convex).  lambda_hi <= 0 returns lambda = 0 with ||g||.
StepSearchResult line_search_lambda(const EvaluableFunction& g,
                                    const Polynomial& gamma, double lambda_hi,
                                    int grid_size = kDefaultGrid);

// Gamma_k(r) = c_k r^k, the sharp lower bound for max |gamma| given that the
// roots keep distance 2r from some point of the interval; k >= 2.
double gamma_k_bound(int k, double r);

// Per-step contraction factor bound: 1 - (1-beta) * tau / (1 + tau) with
// tau = (e/k) * ((k-1) * mu / (2e*length))^k; mu is the inverse modulus of
// the residual at 2*beta*||g||.
double reduction_rate_bound(int k, double mu, double beta, double length);

struct GammaStepInfo {
  int iteration = 0;
  double beta = 0.0;
  int k = 0;
  int eps = 0;
  double lambda = 0.0;
  double lambda_bar = 0.0;
  double safe_bound = 0.0;
  double rho = 0.0;
  double m_minus = 0.0;
  double m_plus = 0.0;
  double norm_before = 0.0;
  double norm_after = 0.0;
  // Valid only for the duration of the observer call.
  const EvaluableFunction* residual_before = nullptr;
  const Polynomial* gamma = nullptr;
};

struct FitParams {
  double beta_min = 0.5;
  double beta_max = 0.99;
  double gamma_down = 0.9;
  double gamma_up = 1.1;
  int max_iter = 500;
  double tol = -1.0;  // degenerate threshold; < 0 selects 1e-10 * max(1, ||f||)
  int grid_size = kDefaultGrid;
  std::function<void(const GammaStepInfo&)> on_gamma_step;
};

struct FitReport {
  int degree = 0;
  Polynomial polynomial;
  double final_norm = 0.0;
  int iterations = 0;
  std::vector<double> beta_history;
  AlternatingSequence alternation;
  std::string status;  // "beta-plus-optimal" | "max-iterations" | "degenerate"

  explicit FitReport(Polynomial p) : polynomial(std::move(p)) {}
};

// Alternance-guided descent: recentre, read the beta-alternance of the
// residual, and either certify (k >= n+1 at beta_max), raise beta, or
// subtract a safe multiple of the alternating polynomial.  Terminates in
// finitely many steps with beta_max * ||sigma - f|| <= min over degree-n
// polynomials of ||p - f||.
FitReport remez_fit(const EvaluableFunction& f, int degree,
                    const FitParams& params = {});

}  // namespace alternant
