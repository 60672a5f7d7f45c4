#include <cmath>
#include <vector>

#include "blowup/ode_predictor.hpp"
#include "doctest.h"

using namespace blowup;

namespace {

// reference values computed with 50-digit arithmetic
constexpr double kA = 2.5479339784876071;          // t_plus(1, 0, 1)
constexpr double kTPlusRest = 2.1032731579881814;  // t_plus(1, 1, 0)
constexpr double kTPlusNegRest = 3.6429759718313724;   // t_plus(1, -1, 0)
constexpr double kBStar01 = -0.9085602964160698;       // b_star(1, 0, -1)
constexpr double kTMinus01 = 1.2739669892438033;       // t_minus(1, 0, -1)
constexpr double kTTotal01 = 5.0958679569752138;       // full collapse + divergence
constexpr double kBStarHalf = 0.9331277892043121;      // b_star(1, 1, -0.5)
constexpr double kTMinusHalf = 0.2738771777050595;     // t_minus(1, 1, -0.5)
constexpr double kTPlusHalf = 2.1773343181799221;      // t_plus from that turning point
constexpr double kTTotalHalf = 2.4512114958849817;

}  // namespace

TEST_CASE("energy constant by direct substitution") {
  CHECK(energy_constant(CriticalData<double>{1, 1, 0}) == doctest::Approx(-2.0 / 3.0));
  CHECK(energy_constant(CriticalData<double>{1, 0, 1}) == doctest::Approx(0.5));
  CHECK(energy_constant(CriticalData<double>{0.15, 2, 3}) == doctest::Approx(3.7));
}

TEST_CASE("divergence time from rest-free ascent") {
  const auto v = classify(CriticalData<double>{1, 0, 1});
  CHECK(v.case_tag == Prop1Case::DivergesUp);
  REQUIRE(v.t_plus.has_value());
  CHECK(*v.t_plus == doctest::Approx(kA).epsilon(1e-9));
  CHECK(*v.t_total == doctest::Approx(kA).epsilon(1e-9));
  CHECK_FALSE(v.t_minus.has_value());
  CHECK_FALSE(v.b_star.has_value());
}

TEST_CASE("zero data stays constant") {
  const auto v = classify(CriticalData<double>{1, 0, 0});
  CHECK(v.case_tag == Prop1Case::Constant);
  CHECK_FALSE(v.t_plus.has_value());
  CHECK_FALSE(v.t_minus.has_value());
  CHECK_FALSE(v.t_total.has_value());
}

TEST_CASE("rest starts diverge when displaced") {
  const auto up = classify(CriticalData<double>{1, 1, 0});
  CHECK(up.case_tag == Prop1Case::DivergesFromRest);
  CHECK(*up.t_plus == doctest::Approx(kTPlusRest).epsilon(1e-9));

  const auto neg = classify(CriticalData<double>{1, -1, 0});
  CHECK(neg.case_tag == Prop1Case::DivergesFromRest);
  CHECK(*neg.t_plus == doctest::Approx(kTPlusNegRest).epsilon(1e-9));
}

TEST_CASE("descending starts collapse, turn, and diverge") {
  const auto v = classify(CriticalData<double>{1, 0, -1});
  CHECK(v.case_tag == Prop1Case::CollapsesThenDiverges);
  CHECK_FALSE(v.marginal);
  CHECK(*v.b_star == doctest::Approx(kBStar01).epsilon(1e-10));
  CHECK(*v.t_minus == doctest::Approx(kTMinus01).epsilon(1e-9));
  CHECK(*v.t_total == doctest::Approx(kTTotal01).epsilon(1e-9));

  const auto h = classify(CriticalData<double>{1, 1, -0.5});
  CHECK(h.case_tag == Prop1Case::CollapsesThenDiverges);
  CHECK(*h.b_star == doctest::Approx(kBStarHalf).epsilon(1e-10));
  CHECK(*h.b_star < 1.0);
  CHECK(*h.t_minus == doctest::Approx(kTMinusHalf).epsilon(1e-9));
  CHECK(*h.t_plus == doctest::Approx(kTPlusHalf).epsilon(1e-9));
  CHECK(*h.t_total == doctest::Approx(kTTotalHalf).epsilon(1e-9));
}

TEST_CASE("marginal descent toward the rest level carries no times") {
  // pick db0 so the energy constant is exactly zero in floating point
  const double alpha = 1.0, b0 = 1.0;
  double db0 = -std::sqrt(4.0 / 3.0 * alpha * b0 * b0 * b0);
  bool found = false;
  for (int k = -32; k <= 32 && !found; ++k) {
    double cand = db0;
    for (int s = 0; s < std::abs(k); ++s)
      cand = std::nextafter(cand, k > 0 ? 0.0 : -10.0);
    if (energy_constant(CriticalData<double>{alpha, b0, cand}) == 0.0) {
      db0 = cand;
      found = true;
    }
  }
  REQUIRE(found);
  const auto v = classify(CriticalData<double>{alpha, b0, db0});
  CHECK(v.case_tag == Prop1Case::CollapsesThenDiverges);
  CHECK(v.marginal);
  CHECK(*v.b_star == 0.0);
  CHECK_FALSE(v.t_plus.has_value());
  CHECK_FALSE(v.t_minus.has_value());
  CHECK_FALSE(v.t_total.has_value());
}

TEST_CASE("cube-root scaling of the divergence time") {
  CHECK(t_plus(CriticalData<double>{8, 0, 1}) == doctest::Approx(kA / 2).epsilon(1e-9));

  double lo = 1e300, hi = -1e300;
  for (double la = -2; la <= 2; la += 1)
    for (double ld = -2; ld <= 2; ld += 1) {
      const double a = std::pow(10.0, la), d = std::pow(10.0, ld);
      const double s = t_plus(CriticalData<double>{a, 0, d}) * std::cbrt(a * d);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  CHECK((hi - lo) / (0.5 * (hi + lo)) < 1e-8);
  CHECK(lo == doctest::Approx(kA).epsilon(1e-8));
}

TEST_CASE("time integrals reject the wrong branch") {
  CHECK_THROWS_AS(t_plus(CriticalData<double>{1, 0, -1}), std::domain_error);
  CHECK_THROWS_AS(t_plus(CriticalData<double>{1, 0, 0}), std::domain_error);
  CHECK_THROWS_AS(t_minus_and_bstar(CriticalData<double>{1, 0, 1}), std::domain_error);
  CHECK_THROWS_AS(t_minus_and_bstar(CriticalData<double>{1, 1, 0}), std::domain_error);
  CHECK_THROWS_AS(classify(CriticalData<double>{0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(classify(CriticalData<double>{-1, 0, 1}), std::invalid_argument);
}

TEST_CASE("descent time vanishes continuously at the rest point") {
  const double h = 1e-4;
  const auto [tm, bs] = t_minus_and_bstar(CriticalData<double>{1, 1, -h});
  CHECK(tm < 1e-3);
  CHECK(bs == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("reduced ode crossing matches the quadrature time") {
  const CriticalData<double> cd{1, 0, 1};
  const double tp = t_plus(cd);

  const double threshold = 1e6;
  const auto traj = integrate_reduced_ode(cd, 10.0, threshold);
  REQUIRE(traj.end == ReducedEnd::CrossedThreshold);
  REQUIRE(traj.crossing_time.has_value());
  // time still missing above the threshold: 2/sqrt((4/3) a b) tail ~ sqrt(3/a)/sqrt(B)
  const double tail = std::sqrt(3.0 / cd.alpha) / std::sqrt(threshold);
  CHECK(std::abs(*traj.crossing_time + tail - tp) / tp < 1e-4);

  // the raw crossing at a higher threshold is itself within 1e-3 relative
  const auto t8 = integrate_reduced_ode(cd, 10.0, 1e8);
  REQUIRE(t8.crossing_time.has_value());
  CHECK(std::abs(*t8.crossing_time - tp) / tp < 1e-3);
}

TEST_CASE("rest solution stays at rest") {
  const auto traj = integrate_reduced_ode(CriticalData<double>{1, 0, 0}, 1.0, 10.0);
  CHECK(traj.end == ReducedEnd::ReachedTEnd);
  for (double b : traj.b) CHECK(b == 0.0);
  for (double db : traj.db) CHECK(db == 0.0);
}

TEST_CASE("trajectories conserve the energy form") {
  const CriticalData<double> cd{1, 0.5, 1.3};
  const double c = energy_constant(cd);
  const auto traj = integrate_reduced_ode(cd, 10.0, 1e6);
  REQUIRE(traj.t.size() > 10);
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double e =
        traj.db[i] * traj.db[i] / 2 - 2.0 / 3.0 * cd.alpha * traj.b[i] * traj.b[i] * traj.b[i];
    const double scale = std::max(1.0, traj.db[i] * traj.db[i] / 2);
    CHECK(std::abs(e - c) / scale < 1e-9);
  }
}

TEST_CASE("closed-form profile and its residual") {
  const auto v0 = closed_form_oracle(1.0, 1.0, 0.0);
  CHECK(v0.f == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(v0.fp == doctest::Approx(3.0).epsilon(1e-15));

  // f'' = 4 alpha f^2 as an identity of the closed form
  const double alpha = 0.7, t0 = 2.3;
  for (int i = 0; i < 100; ++i) {
    const double t = t0 * double(i) / 100.0;
    const auto v = closed_form_oracle(alpha, t0, t);
    const double fpp = 9.0 / (alpha * std::pow(t0 - t, 4));
    CHECK(fpp == doctest::Approx(4 * alpha * v.f * v.f).epsilon(1e-13));
  }

  // the profile diverges approaching t0
  CHECK(closed_form_oracle(1.0, 1.0, 1.0 - 1e-8).f > 1e15);
  CHECK_THROWS_AS(closed_form_oracle(1.0, 1.0, 1.0), std::domain_error);

  // f solves the b-equation once alpha is doubled: track it numerically
  const CriticalData<double> cd{2 * alpha, closed_form_oracle(alpha, t0, 0.0).f,
                                closed_form_oracle(alpha, t0, 0.0).fp};
  std::vector<double> times;
  for (int i = 1; i <= 8; ++i) times.push_back(0.2 * t0 * double(i) / 8.0);
  const auto traj = integrate_reduced_ode(cd, times.back(), 1e9, times);
  REQUIRE(traj.t.size() == times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto ref = closed_form_oracle(alpha, t0, times[i]);
    CHECK(traj.b[i] == doctest::Approx(ref.f).epsilon(1e-8));
    CHECK(traj.db[i] == doctest::Approx(ref.fp).epsilon(1e-8));
  }
}
