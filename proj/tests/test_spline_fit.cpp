#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>
#include <variant>
#include <vector>

#include "alternant/evaluable.hpp"
#include "alternant/extrema.hpp"
#include "alternant/oracle.hpp"
#include "alternant/poly_fit.hpp"
#include "alternant/spline_fit.hpp"
#include "support/test_support.hpp"

using namespace alternant;

namespace {

AlternatingSequence point_sequence(std::vector<double> points, int eps) {
  AlternatingSequence seq;
  seq.beta = 0.9;
  seq.eps = eps;
  seq.big_m = 1.0;
  seq.level = 0.9;
  for (double t : points) {
    seq.pairs.emplace_back(t, t);
    seq.peaks.push_back(t);
  }
  return seq;
}

}  // namespace

TEST_CASE("knot vector basics") {
  const KnotVector kv({0.0, 0.5, 1.0}, {1, 2});
  CHECK(kv.piece_count() == 2);
  CHECK(kv.piece_index(0.25) == 0);
  CHECK(kv.piece_index(0.75) == 1);
  CHECK(kv.piece_index(0.5) == 0);  // knots resolve left
  CHECK_THROWS_AS(KnotVector({0.0, 0.0, 1.0}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(KnotVector({0.0, 1.0}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(KnotVector({0.0, 0.5, 1.0}, {1}), std::invalid_argument);
}

TEST_CASE("piecewise chord interpolation is continuous and interpolating") {
  const auto f = EvaluableFunction::builtin("runge", {-1.0, 1.0});
  const KnotVector kv({-1.0, -0.2, 0.4, 1.0}, {2, 1, 3});
  const Spline s = Spline::interpolate_linear(kv, f);
  CHECK(s.continuity_defect() <= 1e-12);
  for (double x : kv.knots) CHECK(s(x) == doctest::Approx(f(x)).epsilon(1e-12));
}

TEST_CASE("saturated window detection on crafted sequences") {
  const KnotVector kv({0.0, 0.5, 1.0}, {1, 1});
  // Three pairs inside [0, 0.5]: that window needs 2 + 1 = 3, saturated.
  const auto cert =
      check_cs(point_sequence({0.1, 0.2, 0.3, 0.9}, 1), kv);
  REQUIRE(cert.has_value());
  CHECK(cert->i1 == 0);
  CHECK(cert->i2 == 1);
  CHECK(cert->count == 3);
  CHECK(cert->required == 3);
  // Two spread-out pairs saturate nothing.
  CHECK(!check_cs(point_sequence({0.1, 0.9}, 1), kv).has_value());
}

TEST_CASE("placement: plain midpoints while the piece has room") {
  const KnotVector kv({0.0, 1.0}, {2});
  const auto outcome =
      build_intermediary_points(point_sequence({0.1, 0.4, 0.9}, 1), kv);
  REQUIRE(std::holds_alternative<IntermediaryPoints>(outcome));
  const auto& ip = std::get<IntermediaryPoints>(outcome);
  REQUIRE(ip.xi.size() == 2);
  CHECK(ip.xi[0] == doctest::Approx(0.25));
  CHECK(ip.xi[1] == doctest::Approx(0.65));
  CHECK(ip.used[0] == 2);
}

TEST_CASE("placement: a gap confined to a full piece yields the certificate") {
  const KnotVector kv({0.0, 0.5, 1.0}, {1, 1});
  const auto outcome =
      build_intermediary_points(point_sequence({0.1, 0.2, 0.3, 0.9}, 1), kv);
  REQUIRE(std::holds_alternative<CsCertificate>(outcome));
  const auto& cert = std::get<CsCertificate>(outcome);
  CHECK(cert.i1 == 0);
  CHECK(cert.i2 == 1);
  CHECK(cert.count == 3);
  CHECK(cert.required == 3);
  CHECK(cert.stop_step == 1);
  REQUIRE(cert.used.size() == 2);
  CHECK(cert.used[0] == 1);
}

TEST_CASE("placement: crossing into a full piece's successor, then backtrack") {
  const KnotVector kv({0.0, 0.5, 1.0}, {1, 1});
  const auto outcome =
      build_intermediary_points(point_sequence({0.1, 0.2, 0.6, 0.9}, 1), kv);
  // Gap 1 crosses the knot into piece 1 (case 3); gap 2 is then confined to
  // the full piece 1, and the backtrack certifies the full window.
  REQUIRE(std::holds_alternative<CsCertificate>(outcome));
  const auto& cert = std::get<CsCertificate>(outcome);
  CHECK(cert.i1 == 0);
  CHECK(cert.i2 == 2);
  CHECK(cert.count == 4);
  CHECK(cert.required == 4);
}

TEST_CASE("placement outcome agrees with the exhaustive window scan") {
  // Exhaustive-scan certificate and placement failure coincide on random
  // point patterns (the dual routes must not be collapsed).
  auto rng = testsupport::seeded_rng(7);
  std::uniform_real_distribution<double> pos(0.01, 0.99);
  std::uniform_int_distribution<int> npairs(2, 8);
  const KnotVector kv({0.0, 0.35, 0.7, 1.0}, {1, 2, 1});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> pts;
    const int m = npairs(rng);
    for (int i = 0; i < m; ++i) pts.push_back(pos(rng));
    std::sort(pts.begin(), pts.end());
    bool distinct = true;
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (pts[i] - pts[i - 1] < 1e-4) distinct = false;
    if (!distinct) continue;
    const auto seq = point_sequence(pts, 1);
    const auto outcome = build_intermediary_points(seq, kv);
    const auto scan = check_cs(seq, kv);
    if (std::holds_alternative<CsCertificate>(outcome)) {
      CHECK(scan.has_value());
    } else {
      // A successful placement proves no window is saturated.
      CHECK(!scan.has_value());
      const auto& ip = std::get<IntermediaryPoints>(outcome);
      CHECK(ip.xi.size() == pts.size() - 1);
      for (std::size_t j = 0; j < ip.xi.size(); ++j) {
        CHECK(ip.xi[j] > pts[j] - 1e-12);
        CHECK(ip.xi[j] < pts[j + 1] + 1e-12);
      }
      for (int i = 0; i < kv.piece_count(); ++i)
        CHECK(ip.used[static_cast<std::size_t>(i)] <=
              kv.degrees[static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("the correction spline opposes the alternating pattern") {
  const KnotVector kv({0.0, 0.5, 1.0}, {1, 1});
  IntermediaryPoints ip;
  ip.xi = {0.25, 0.75};
  ip.piece_gaps = {{0}, {1}};
  ip.used = {1, 1};
  const Spline delta = delta_from_xi(ip, 1, kv);
  CHECK(delta.continuity_defect() <= 1e-12);
  CHECK(delta(0.25) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(delta(0.75) == doctest::Approx(0.0).epsilon(1e-12));
  // eps * (0.25 - s)(0.75 - s) is positive left of 0.25; delta must oppose.
  CHECK(delta(0.1) < 0.0);
  CHECK(delta(0.5) > 0.0);  // pattern negative between the roots
  CHECK(delta(0.9) < 0.0);
}

TEST_CASE("descent step strictly reduces the residual norm") {
  const auto f = EvaluableFunction::builtin("runge", {-1.0, 1.0});
  const KnotVector kv({-1.0, 0.0, 1.0}, {2, 2});
  Spline sigma = Spline::interpolate_linear(kv, f);
  const auto ex = extrema(residual(sigma, f));
  sigma = sigma.plus_constant(-0.5 * (ex.max.value + ex.min.value));
  const auto g = residual(sigma, f);
  const auto seq = build_beta_alternance(g, 0.5);
  const auto outcome = build_intermediary_points(seq, kv);
  REQUIRE(std::holds_alternative<IntermediaryPoints>(outcome));
  const Spline delta =
      delta_from_xi(std::get<IntermediaryPoints>(outcome), seq.eps, kv);
  const auto step = spline_step(sigma, f, delta, seq);
  CHECK(step.lambda > 0.0);
  CHECK(step.norm_after < seq.big_m);
}

TEST_CASE("an exact spline target is reproduced immediately") {
  const auto f = EvaluableFunction::builtin("abs", {-1.0, 1.0});
  const auto rep = fixed_knot_fit(f, KnotVector({-1.0, 0.0, 1.0}, {1, 1}));
  CHECK(rep.status == "degenerate");
  CHECK(rep.final_norm <= 1e-10);
}

TEST_CASE("misplaced-knot deviation matches the analytic value") {
  // Best continuous piecewise line to |t| with the knot at x: x / (1 + x).
  const auto f = EvaluableFunction::builtin("abs", {-1.0, 1.0});
  const auto rep = fixed_knot_fit(f, KnotVector({-1.0, 0.3, 1.0}, {1, 1}));
  CHECK(rep.status == "beta-plus-optimal");
  CHECK(rep.final_norm == doctest::Approx(0.3 / 1.3).epsilon(1e-4));
  REQUIRE(rep.certificate.has_value());
  CHECK(rep.certificate->count >= rep.certificate->required);
  CHECK(rep.spline.continuity_defect() <= 1e-9);
}

TEST_CASE("a single piece reduces to the polynomial descent") {
  const auto f = EvaluableFunction::builtin("exp", {-1.0, 1.0});
  const auto srep = fixed_knot_fit(f, KnotVector({-1.0, 1.0}, {3}));
  const auto prep = remez_fit(f, 3);
  CHECK(srep.status == "beta-plus-optimal");
  // Both land in [optimum, optimum / beta_max].
  CHECK(std::fabs(srep.final_norm - prep.final_norm) <=
        0.02 * std::max(srep.final_norm, prep.final_norm));
}

TEST_CASE("random instances: certification, descent, and local stability") {
  for (unsigned salt = 0; salt < 8; ++salt) {
    auto rng = testsupport::seeded_rng(3000 + salt);
    const Interval dom{-1.0, 1.0};
    const auto f = testsupport::random_smooth(rng, dom);
    const auto kv = testsupport::random_knots(rng, dom, 3, 3);
    const auto rep = fixed_knot_fit(f, kv);
    INFO("salt ", salt);
    REQUIRE((rep.status == "beta-plus-optimal" || rep.status == "degenerate"));
    const Spline chord = Spline::interpolate_linear(kv, f);
    const double chord_norm = sup_norm(residual(chord, f));
    CHECK(rep.final_norm <= chord_norm * (1.0 + 1e-9) + 1e-12);
    CHECK(rep.spline.continuity_defect() <= 1e-8 * std::max(1.0, chord_norm));
    if (rep.status != "beta-plus-optimal") continue;
    REQUIRE(rep.certificate.has_value());
    CHECK(rep.certificate->count >= rep.certificate->required);

    // No small continuous perturbation improves the certified deviation
    // beyond the certification slack.
    const double theta = rep.final_norm;
    for (int probe = 0; probe < 20; ++probe) {
      const Spline delta = testsupport::random_continuous_spline(rng, kv, 1.0);
      const double dnorm = sup_norm(residual(delta, EvaluableFunction::callable(
                                                        dom, [](double) { return 0.0; },
                                                        "zero")),
                                    1025);
      if (dnorm < 1e-9) continue;
      for (double rel : {1e-4, -1e-4, 1e-3, -1e-3}) {
        const double lambda = rel * theta / dnorm;
        const Spline cand = rep.spline.add_scaled(delta, lambda);
        const double norm = sup_norm(residual(cand, f), 2049);
        CHECK(norm >= theta * FitParams{}.beta_max - 1e-9);
      }
    }
  }
}

TEST_CASE("certified deviation brackets the grid reference") {
  for (unsigned salt = 0; salt < 3; ++salt) {
    auto rng = testsupport::seeded_rng(4000 + salt);
    const Interval dom{-1.0, 1.0};
    const auto f = testsupport::random_smooth(rng, dom);
    const auto kv = testsupport::random_knots(rng, dom, 2, 2);
    const auto rep = fixed_knot_fit(f, kv);
    if (rep.status != "beta-plus-optimal") continue;
    const auto ref = oracle::grid_minimax_spline(f, kv, 4097);
    CHECK(ref.value <= rep.final_norm * (1.0 + 1e-9) + 1e-12);
    CHECK(FitParams{}.beta_max * rep.final_norm <= ref.value + 1e-4);
  }
}
