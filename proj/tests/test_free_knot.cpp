// Unit tests for the free-knot machinery: the certified per-configuration
// deviation, knot classification, one-sided correction families, knot moves,
// the local-optimality check, and the greedy descent.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "alternant/extrema.hpp"
#include "alternant/free_knot.hpp"
#include "alternant/spline_fit.hpp"

#include "support/test_support.hpp"

using namespace alternant;

namespace {

EvaluableFunction abs_fn() {
  return EvaluableFunction::builtin("abs", Interval(-1.0, 1.0));
}

EvaluableFunction squared_fn() {
  return EvaluableFunction::builtin("poly:0,0,1", Interval(-1.0, 1.0));
}

KnotVector kinked(double x) { return KnotVector({-1.0, x, 1.0}, {1, 1}); }

// |t| on [-1, 1] tilted by c*t: the tilt shifts the best spline by the same
// linear term, so the deviation and the residual geometry are unchanged.
EvaluableFunction tilted_abs(double c) {
  return EvaluableFunction::callable(
      Interval(-1.0, 1.0), [c](double t) { return std::fabs(t) + c * t; },
      "tilted-abs");
}

}  // namespace

TEST_CASE("theta of the kinked line matches the closed form x over 1+x") {
  const EvaluableFunction f = abs_fn();
  for (double x : {0.2, 0.3, 0.5}) {
    CAPTURE(x);
    const ThetaResult th = theta(f, kinked(x));
    CHECK(th.value == doctest::Approx(x / (1.0 + x)).epsilon(1e-6));
    CHECK(th.report.status == "beta-plus-optimal");
    REQUIRE(th.report.certificate.has_value());
    const CsCertificate& cert = *th.report.certificate;
    CHECK(cert.i1 == 0);
    CHECK(cert.i2 == 1);
    CHECK(cert.count == 3);
    CHECK(cert.required == 3);
    CHECK(cert.stop_step == 1);
    CHECK(cert.used == std::vector<int>{1, 0});
    // The outer piece carries a flat residual at -theta.
    const double mid = 0.5 * (x + 1.0);
    CHECK(th.sigma(mid) - f(mid) ==
          doctest::Approx(-th.value).epsilon(1e-6));
  }
}

TEST_CASE("theta degenerates when the kink is a knot") {
  const ThetaResult th = theta(abs_fn(), kinked(0.0) /* knot at the kink */);
  CHECK(th.value <= 1e-9);
  CHECK(th.report.status == "degenerate");
}

TEST_CASE("knot classification separates unstable stable neutral non-extreme") {
  const KnotVector kv({-1.0, 0.0, 1.0}, {1, 1});
  const EvaluableFunction zero = EvaluableFunction::callable(
      kv.domain(), [](double) { return 0.0; }, "zero");
  const auto sigma_with_slopes = [&](double dl, double dr) {
    std::vector<Polynomial> pieces;
    pieces.push_back(
        Polynomial::from_monomial(kv.piece_interval(0), {0.1, dl}));
    pieces.push_back(
        Polynomial::from_monomial(kv.piece_interval(1), {0.1, dr}));
    return Spline(kv, std::move(pieces));
  };

  SUBCASE("kink against the residual sign is unstable") {
    const auto classes =
        classify_knots(sigma_with_slopes(0.05, -0.2), zero, 0.1);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].index == 1);
    CHECK(classes[0].extreme);
    CHECK(classes[0].s == 1);
    CHECK(classes[0].jump == doctest::Approx(0.25));
    CHECK(classes[0].kind == "unstable");
  }
  SUBCASE("kink along the residual sign is stable") {
    const auto classes =
        classify_knots(sigma_with_slopes(0.05, 0.2), zero, 0.1);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].jump == doctest::Approx(-0.15));
    CHECK(classes[0].kind == "stable");
  }
  SUBCASE("vanishing slope jump is neutral") {
    const auto classes =
        classify_knots(sigma_with_slopes(0.05, 0.05 + 1e-12), zero, 0.1);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].kind == "neutral");
  }
  SUBCASE("knot below the deviation level is non-extreme") {
    const auto classes =
        classify_knots(sigma_with_slopes(0.05, -0.2), zero, 0.5);
    REQUIRE(classes.size() == 1);
    CHECK_FALSE(classes[0].extreme);
    CHECK(classes[0].kind == "non-extreme");
    CHECK(classes[0].s == 0);
  }
}

TEST_CASE("the misplaced kink knot is an unstable extreme with known jump") {
  const EvaluableFunction f = abs_fn();
  const double x = 0.3;
  const ThetaResult th = theta(f, kinked(x));
  const auto classes = classify_knots(th.sigma, f, th.value);
  REQUIRE(classes.size() == 1);
  CHECK(classes[0].index == 1);
  CHECK(classes[0].x == doctest::Approx(x));
  CHECK(classes[0].extreme);
  CHECK(classes[0].s == -1);
  // sigma' left = (x-1)/(1+x), sigma' right = 1: jump = 2/(1+x).
  CHECK(classes[0].jump == doctest::Approx(2.0 / (1.0 + x)).epsilon(1e-5));
  CHECK(classes[0].kind == "unstable");
}

TEST_CASE("pair lookup locates the level window holding the knot") {
  const EvaluableFunction f = abs_fn();
  const ThetaResult th = theta(f, kinked(0.3));
  const AlternatingSequence& seq = th.report.alternation;
  REQUIRE(seq.k() == 2);
  CHECK(seq.eps == -1);
  CHECK(pair_of_knot(seq, 0.3, -1) == 2);
  CHECK(pair_of_knot(seq, -1.0, -1) == 0);
  CHECK(pair_of_knot(seq, 0.0, 1) == 1);
  CHECK_THROWS_AS(pair_of_knot(seq, 0.3, 0), std::invalid_argument);
  AlternatingSequence empty_seq;
  CHECK_THROWS_AS(pair_of_knot(empty_seq, 0.0, 1), std::invalid_argument);
}

TEST_CASE("left family at the misplaced kink is the flat outer correction") {
  const EvaluableFunction f = abs_fn();
  const double x = 0.3;
  const KnotVector kv = kinked(x);
  const ThetaResult th = theta(f, kv);
  const AlternatingSequence& seq = th.report.alternation;

  const auto fam = exists_delta_left(seq, kv, 1, -1);
  REQUIRE(fam.has_value());
  CHECK(fam->knot == 1);
  CHECK(fam->first_piece == 1);
  CHECK(fam->last_piece == 1);
  CHECK(fam->roots.empty());
  // Normalized flat correction -1 on the outer piece, zero elsewhere.
  for (double t : {x, 0.5, 0.8, 1.0})
    CHECK(fam->pieces[1](t) == doctest::Approx(-1.0));
  CHECK(fam->pieces[0](-0.5) == 0.0);
  CHECK(count_left_family_exists(seq, kv, 1, -1));

  CHECK_FALSE(exists_delta_right(seq, kv, 1, -1).has_value());
  CHECK_FALSE(count_right_family_exists(seq, kv, 1, -1));

  // The flat residual leaves room for lambda approximately 2 theta before the
  // corrected side degrades the deviation.
  const double lam = max_nondegrading_lambda(th.sigma, f, *fam, th.value);
  CHECK(lam > 1.9 * th.value);
  CHECK(lam < 2.1 * th.value);
}

TEST_CASE("a knot move lands on the junction the slope jump predicts") {
  const EvaluableFunction f = abs_fn();

  SUBCASE("positive knot moves left") {
    const double x = 0.3;
    const KnotVector kv = kinked(x);
    const ThetaResult th = theta(f, kv);
    const auto fam = exists_delta_left(th.report.alternation, kv, 1, -1);
    REQUIRE(fam.has_value());

    const double lambda = 1e-5;
    const auto mv = knot_move(th.sigma, 1, *fam, lambda);
    REQUIRE(mv.has_value());
    const double predicted =
        lambda * fam->pieces[1](x) /
        (th.sigma.derivative_right(1) - th.sigma.derivative_left(1));
    CHECK(mv->new_knot - x == doctest::Approx(predicted).epsilon(1e-6));
    CHECK(mv->new_knot < x);
    CHECK(mv->kv.knots[1] == mv->new_knot);
    CHECK(mv->sigma.continuity_defect() < 1e-9);

    // A macroscopic move strictly improves the refit deviation.
    const auto big = knot_move(th.sigma, 1, *fam, 0.1);
    REQUIRE(big.has_value());
    CHECK(theta(f, big->kv).value < th.value - 1e-3);
  }

  SUBCASE("negative knot moves right through the mirrored family") {
    const double x = -0.35;
    const KnotVector kv = kinked(x);
    const ThetaResult th = theta(f, kv);
    CHECK(th.value == doctest::Approx(0.35 / 1.35).epsilon(1e-6));
    const auto fam = exists_delta_right(th.report.alternation, kv, 1, -1);
    REQUIRE(fam.has_value());
    CHECK(fam->first_piece == 0);
    CHECK(fam->last_piece == 0);
    CHECK_FALSE(exists_delta_left(th.report.alternation, kv, 1, -1).has_value());

    const double lambda = 1e-5;
    const auto mv = knot_move(th.sigma, 1, *fam, lambda);
    REQUIRE(mv.has_value());
    const double predicted =
        lambda * fam->pieces[0](x) /
        (th.sigma.derivative_left(1) - th.sigma.derivative_right(1));
    CHECK(mv->new_knot - x == doctest::Approx(predicted).epsilon(1e-6));
    CHECK(mv->new_knot > x);
  }
}

TEST_CASE("minimality check flags the movable knot and descent removes it") {
  const EvaluableFunction f = abs_fn();

  const WMinimalityReport rep = check_w_minimality(f, kinked(0.3));
  CHECK(rep.theta == doctest::Approx(0.3 / 1.3).epsilon(1e-6));
  CHECK(rep.verdict == "violated-at");
  CHECK(rep.violated_knot == 1);
  CHECK(rep.violated_direction == "left");
  REQUIRE(!rep.moves.empty());
  const KnotMoveRecord& first = rep.moves.front();
  CHECK(first.knot == 1);
  CHECK(first.direction == "left");
  CHECK(first.exists);
  CHECK(first.count_check_agrees);
  CHECK(first.improved);
  CHECK(first.theta_after < rep.theta);
  CHECK(first.witness_degrees == std::vector<int>{0});

  const DescentResult dsc = descend_free_knots(f, kinked(0.3), 30);
  REQUIRE(!dsc.theta_history.empty());
  CHECK(dsc.theta_history.front() == doctest::Approx(0.3 / 1.3).epsilon(1e-6));
  for (std::size_t i = 1; i < dsc.theta_history.size(); ++i)
    CHECK(dsc.theta_history[i] <= dsc.theta_history[i - 1] + 1e-12);
  CHECK(dsc.theta_history.back() < 0.02);
  CHECK(dsc.moves <= 30);
  CHECK(!dsc.status.empty());
  REQUIRE(dsc.sigma.has_value());
  CHECK(dsc.sigma->continuity_defect() < 1e-8);

  const WMinimalityReport at_kink = check_w_minimality(f, kinked(0.0));
  CHECK(at_kink.verdict == "degenerate");
  const DescentResult dsc0 = descend_free_knots(f, kinked(0.0), 30);
  CHECK(dsc0.status == "degenerate");
  CHECK(dsc0.moves == 0);
}

TEST_CASE("the symmetric parabola admits no family and certifies a barrier") {
  const EvaluableFunction f = squared_fn();
  const KnotVector kv({-1.0, 0.0, 1.0}, {1, 1});

  const ThetaResult th = theta(f, kv);
  CHECK(th.value == doctest::Approx(0.125).epsilon(1e-8));
  CHECK(th.report.status == "beta-plus-optimal");
  const AlternatingSequence& seq = th.report.alternation;
  REQUIRE(seq.k() == 4);
  CHECK(seq.eps == -1);
  const double expected_peaks[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  REQUIRE(seq.peaks.size() == 5);
  for (int i = 0; i < 5; ++i)
    CHECK(seq.peaks[i] == doctest::Approx(expected_peaks[i]).epsilon(1e-5));

  REQUIRE(th.report.certificate.has_value());
  const CsCertificate& cert = *th.report.certificate;
  CHECK(cert.i1 == 0);
  CHECK(cert.i2 == 1);
  CHECK(cert.count == 3);
  CHECK(cert.required == 3);
  CHECK(cert.stop_step == 1);
  CHECK(cert.used == std::vector<int>{1, 0});
  CHECK(cert.pair_indices == std::vector<int>{0, 1, 2});

  // Both one-sided families are blocked: three same-window alternations
  // against capacity one on either side.
  CHECK_FALSE(exists_delta_left(seq, kv, 1, -1).has_value());
  CHECK_FALSE(exists_delta_right(seq, kv, 1, -1).has_value());
  CHECK_FALSE(count_left_family_exists(seq, kv, 1, -1));
  CHECK_FALSE(count_right_family_exists(seq, kv, 1, -1));

  const WMinimalityReport rep = check_w_minimality(f, kv);
  CHECK(rep.verdict == "necessary-condition-holds");
  CHECK(rep.violated_knot == -1);
  REQUIRE(rep.knots.size() == 1);
  CHECK(rep.knots[0].kind == "unstable");
  CHECK(rep.knots[0].s == -1);
  CHECK(rep.knots[0].jump == doctest::Approx(2.0).epsilon(1e-6));
  REQUIRE(rep.moves.size() == 2);
  for (const KnotMoveRecord& mv : rep.moves) {
    CHECK_FALSE(mv.exists);
    CHECK(mv.count_check_agrees);
  }
  REQUIRE(rep.barrier.has_value());
  const BarrierInfo& b = *rep.barrier;
  CHECK(b.i_minus == 0);
  CHECK(b.i_zero == 0);
  CHECK(b.i_plus == 1);
  CHECK(b.j_minus == 0);
  CHECK(b.j_plus == 4);
  CHECK(b.samples == 5);
  CHECK(b.verified);
  CHECK(b.worst_margin == 0.0);
}

TEST_CASE("junction displacement matches the slope formula across instances") {
  // Ten kinked instances: positive knots move left, mirrored negative knots
  // (with a tilt, which changes the slopes but not the residual geometry)
  // move right.  The first-order displacement per unit lambda must match
  // delta_edge(x) / (slope difference) to high relative accuracy.
  for (int inst = 0; inst < 10; ++inst) {
    const bool mirrored = inst >= 5;
    const double mag = 0.1 * (1 + inst % 5);
    const double x = mirrored ? -mag : mag;
    const EvaluableFunction f = mirrored ? tilted_abs(0.25) : tilted_abs(0.0);
    CAPTURE(inst);
    CAPTURE(x);

    const KnotVector kv = kinked(x);
    const ThetaResult th = theta(f, kv);
    const auto classes = classify_knots(th.sigma, f, th.value);
    REQUIRE(classes.size() == 1);
    REQUIRE(classes[0].kind == "unstable");
    const int s = classes[0].s;

    const auto fam =
        mirrored ? exists_delta_right(th.report.alternation, kv, 1, s)
                 : exists_delta_left(th.report.alternation, kv, 1, s);
    REQUIRE(fam.has_value());

    const double lambda = 1e-5 * th.value;
    const auto mv = knot_move(th.sigma, 1, *fam, lambda);
    REQUIRE(mv.has_value());
    const double measured = (mv->new_knot - x) / lambda;
    const double dl = th.sigma.derivative_left(1);
    const double dr = th.sigma.derivative_right(1);
    const double formula = mirrored ? fam->pieces[0](x) / (dl - dr)
                                    : fam->pieces[1](x) / (dr - dl);
    CHECK(measured == doctest::Approx(formula).epsilon(1e-4));
  }
}

TEST_CASE("family existence agrees with a brute-force lattice search") {
  // Deterministic kinked instances on both sides plus random smooth ones;
  // every automaton answer must match an exhaustive low-resolution search
  // over piecewise-polynomial corrections.
  struct Comparison {
    int ran = 0;
  } tally;

  const auto compare_all = [&](const EvaluableFunction& f,
                               const KnotVector& kv) {
    const ThetaResult th = theta(f, kv);
    if (th.value <= 1e-9 || th.report.alternation.pairs.empty()) return;
    const auto classes = classify_knots(th.sigma, f, th.value);
    for (const KnotClass& cls : classes) {
      if (!cls.extreme) continue;
      for (bool left : {true, false}) {
        std::optional<DeltaFamily> fam;
        try {
          fam = left ? exists_delta_left(th.report.alternation, kv, cls.index,
                                         cls.s)
                     : exists_delta_right(th.report.alternation, kv, cls.index,
                                          cls.s);
        } catch (const std::invalid_argument&) {
          continue;
        }
        const bool counted =
            left ? count_left_family_exists(th.report.alternation, kv,
                                            cls.index, cls.s)
                 : count_right_family_exists(th.report.alternation, kv,
                                             cls.index, cls.s);
        const testsupport::LatticeSearchResult lattice =
            testsupport::lattice_family_search(th.sigma, f, cls.index, cls.s,
                                                left, th.value);
        CAPTURE(cls.index);
        CAPTURE(left);
        CHECK(fam.has_value() == lattice.found);
        CHECK(counted == fam.has_value());
        if (fam.has_value()) {
          const double edge = left ? fam->pieces[cls.index](cls.x)
                                   : fam->pieces[cls.index - 1](cls.x);
          CHECK(cls.s * edge > 0.0);
          CHECK(max_nondegrading_lambda(th.sigma, f, *fam, th.value) > 0.0);
        }
        ++tally.ran;
      }
    }
  };

  compare_all(abs_fn(), kinked(0.3));
  compare_all(abs_fn(), kinked(-0.4));
  compare_all(squared_fn(), KnotVector({-1.0, 0.0, 1.0}, {1, 1}));
  for (unsigned salt : {9100u, 9101u, 9102u, 9103u}) {
    auto rng = testsupport::seeded_rng(salt);
    const Interval dom(-1.0, 1.0);
    const KnotVector kv = testsupport::random_knots(rng, dom, 2, 2);
    const EvaluableFunction f = testsupport::random_smooth(rng, dom);
    compare_all(f, kv);
  }
  CHECK(tally.ran >= 6);
}

TEST_CASE("the deviation responds to knot jitter at a stable bounded rate") {
  const EvaluableFunction f = abs_fn();
  const KnotVector kv = kinked(0.3);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double radius : {1e-2, 1e-3, 1e-4}) {
    const double rate = lipschitz_probe(f, kv, radius, 6);
    CAPTURE(radius);
    CHECK(rate > 0.05);
    CHECK(rate < 5.0);
    lo = std::min(lo, rate);
    hi = std::max(hi, rate);
  }
  CHECK(hi / lo < 10.0);
}
