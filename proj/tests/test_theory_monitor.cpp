#include <cmath>
#include <utility>
#include <vector>

#include "blowup/theory_monitor.hpp"
#include "blowup/wave_solver.hpp"
#include "doctest.h"

using namespace blowup;

namespace {
constexpr double kPi = 3.14159265358979323846;

// K = L^3/6 for u = (tau + X - xi)(xi - tau - X0); every monitor integral has
// a short closed form against this field
std::vector<FieldState<double>> traveling_parabola_stack(const Grid<double>& g, double X,
                                                         double X0, double dt, int last) {
  std::vector<FieldState<double>> snaps;
  for (int j = 0; j <= last; ++j) {
    FieldState<double> s;
    s.t = j * dt;
    s.u = Vec<double>(g.n_points);
    s.v = Vec<double>(g.n_points);
    for (Index i = 0; i < g.n_points; ++i) {
      const double x = g.coord(i);
      s.u[i] = (s.t + X - x) * (x - s.t - X0);
      s.v[i] = (x - s.t - X0) - (s.t + X - x);
    }
    snaps.push_back(std::move(s));
  }
  return snaps;
}

Vec<double> gaussian_samples(const Grid<double>& g, double a, double k) {
  Vec<double> f(g.n_points);
  for (Index i = 0; i < g.n_points; ++i) {
    const double x = g.coord(i);
    f[i] = a * std::exp(-k * x * x);
  }
  return f;
}
}  // namespace

TEST_CASE("rescaling to the normalized equation maps gaussian data exactly") {
  const Parameters<double> p{3.0, 4.0};
  InitialCondition<double> ic{GaussianSpec<double>{2.0, 5.0, 1.0}, QuadraticSpec<double>{1.25}};
  const auto [nic, scale] = rescale_to_normalized(p, ic);
  CHECK(scale.alpha == 3.0);
  CHECK(scale.beta == 4.0);

  const auto& gsp = std::get<GaussianSpec<double>>(nic.u0);
  CHECK(gsp.amplitude == doctest::Approx(1.5).epsilon(1e-15));  // a * alpha / beta
  CHECK(gsp.k == doctest::Approx(20.0).epsilon(1e-15));         // k * beta
  CHECK(gsp.center == doctest::Approx(0.5).epsilon(1e-15));     // c / sqrt(beta)
  const auto& qsp = std::get<QuadraticSpec<double>>(nic.ut0);
  CHECK(qsp.coeff == doctest::Approx(3.75).epsilon(1e-15));  // q * alpha

  // identity parameters change nothing
  const auto [id, s1] = rescale_to_normalized({1.0, 1.0}, ic);
  CHECK(std::get<GaussianSpec<double>>(id.u0).amplitude == 2.0);
  CHECK(std::get<GaussianSpec<double>>(id.u0).k == 5.0);
  CHECK(std::get<QuadraticSpec<double>>(id.ut0).coeff == 1.25);
  (void)s1;
}

TEST_CASE("rescaling rejects samples and degenerate coefficients") {
  InitialCondition<double> samp{SamplesSpec<double>{Vec<double>::Zero(8)}, ZeroSpec{}};
  CHECK_THROWS_AS(rescale_to_normalized({1.0, 1.0}, samp), std::invalid_argument);

  InitialCondition<double> ok;
  CHECK_THROWS_AS(rescale_to_normalized({0.0, 1.0}, ok), std::invalid_argument);
  CHECK_THROWS_AS(rescale_to_normalized({1.0, 0.0}, ok), std::invalid_argument);
}

TEST_CASE("rescaled runs share the blowup instant") {
  // with beta = 1 the map only scales the amplitude, so the two discrete
  // systems are conjugate and must diverge together
  const auto g = build_grid<double>(GridKind::Periodic1D, 512, -kPi, kPi);
  InitialCondition<double> ic{GaussianSpec<double>{-1.0, 1184.352528130723, 0.0}, ZeroSpec{}};
  const Parameters<double> p{3.0, 1.0};
  const auto [nic, scale] = rescale_to_normalized(p, ic);
  (void)scale;

  SolverConfig<double> cfg;
  cfg.rel_tol = 1e-8;
  cfg.abs_tol = 1e-10;
  cfg.t_max = 1.0;
  cfg.blow_threshold = 1e6;

  // the normalized field is (alpha/beta) times larger, so the divergence
  // threshold (and the absolute error floor) must be mapped along with it
  SolverConfig<double> cfg_n = cfg;
  cfg_n.blow_threshold = cfg.blow_threshold * (p.alpha / p.beta);
  cfg_n.abs_tol = cfg.abs_tol * (p.alpha / p.beta);

  const auto ra = run(ic, p, g, cfg);
  const auto rn = run(nic, {1.0, 1.0}, g, cfg_n);
  REQUIRE(ra.outcome.kind == OutcomeKind::Blowup);
  REQUIRE(rn.outcome.kind == OutcomeKind::Blowup);
  CHECK(std::abs(ra.outcome.t_event - rn.outcome.t_event) / rn.outcome.t_event < 0.01);
}

TEST_CASE("M assembles the half field plus the half right-tail integral") {
  const auto g = build_grid<double>(GridKind::Periodic1D, 1024, -kPi, kPi);
  const double X = 1.0;

  // pure f: M == f/2 verbatim on the nodes
  const Vec<double> f = gaussian_samples(g, 0.01, 50.0);
  const Vec<double> zero = Vec<double>::Zero(g.n_points);
  const auto Mf = compute_M(f, zero, g, X);
  Index i0 = 0;
  while (g.coord(i0) < 0.0) ++i0;
  for (Index j = 0; j < Mf.values.size(); ++j) CHECK(Mf.values[j] == f[i0 + j] / 2.0);
  CHECK(Mf.at(0.0) == doctest::Approx(0.005).epsilon(1e-12));

  // pure g: M(x) = (1/2) int_x^X g, with the gaussian tail integral in erf form
  const auto Mg = compute_M(zero, f, g, X);
  const double c = 0.01 * std::sqrt(kPi / 50.0) / 4.0;
  for (double x : {0.0, 0.3, 0.6}) {
    const double exact = c * (std::erf(std::sqrt(50.0) * X) - std::erf(std::sqrt(50.0) * x));
    CHECK(Mg.at(x) == doctest::Approx(exact).scale(1.0).epsilon(1e-8));
  }
}

TEST_CASE("M rejects data that leaks past the window") {
  const auto g = build_grid<double>(GridKind::Periodic1D, 1024, -kPi, kPi);
  const Vec<double> zero = Vec<double>::Zero(g.n_points);
  Vec<double> off(g.n_points);
  for (Index i = 0; i < g.n_points; ++i) {
    const double d = g.coord(i) - 2.0;
    off[i] = std::exp(-50.0 * d * d);
  }
  CHECK_THROWS_AS(compute_M(off, zero, g, 1.0), std::domain_error);
  CHECK_THROWS_AS(compute_M(zero, zero, g, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_M(zero, zero, g, -1.0), std::invalid_argument);

  const auto coarse = build_grid<double>(GridKind::Periodic1D, 16, -kPi, kPi);
  const Vec<double> z16 = Vec<double>::Zero(16);
  CHECK_THROWS_AS(compute_M(z16, z16, coarse, 1.0), std::invalid_argument);
}

TEST_CASE("epsilon integrates M over the annulus") {
  MProfile<double> M;
  M.x0 = 0.0;
  M.dx = 0.01;
  M.values = Vec<double>::Constant(201, 0.5);
  CHECK(epsilon_of(M, 0.2, 1.0) == doctest::Approx(0.4).epsilon(1e-13));
  CHECK_THROWS_AS(epsilon_of(M, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("theorem hypothesis tracks the sign of the data") {
  const auto g = build_grid<double>(GridKind::Periodic1D, 1024, -kPi, kPi);
  const Vec<double> f = gaussian_samples(g, 0.01, 50.0);
  const Vec<double> zero = Vec<double>::Zero(g.n_points);

  const auto pos = make_theorem_inputs(f, zero, g, 1.0, 0.25);
  CHECK(pos.hypothesis_met);
  CHECK(pos.epsilon > 0.0);
  CHECK(pos.X1 == doctest::Approx(0.375).epsilon(1e-15));

  const auto neg = make_theorem_inputs(Vec<double>(-f), zero, g, 1.0, 0.25);
  CHECK_FALSE(neg.hypothesis_met);
  CHECK(neg.epsilon < 0.0);

  const auto none = make_theorem_inputs(zero, zero, g, 1.0, 0.25);
  CHECK_FALSE(none.hypothesis_met);  // epsilon must be strictly positive
  CHECK(none.epsilon == 0.0);

  CHECK_THROWS_AS(make_theorem_inputs(f, zero, g, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(make_theorem_inputs(f, zero, g, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("monitor integrals match the closed forms on a polynomial field") {
  const auto g = build_grid<double>(GridKind::Periodic1D, 1024, -kPi, kPi);
  const double X = 0.8, X0 = 0.2, L = X - X0, dt = 0.02;
  const auto snaps = traveling_parabola_stack(g, X, X0, dt, 25);

  TheoremInputs<double> in;
  in.X = X;
  in.X0 = X0;
  in.X1 = (X - X0) / 2.0;
  in.epsilon = 0.0;
  in.hypothesis_met = false;  // the polynomial field is not theorem data

  const auto rep = monitor_H(snaps, g, in, 4);
  REQUIRE(rep.times.size() == 11);  // nodes from t = X1 = 0.3 to t = 0.5
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double t = rep.times[i];
    const double s = t - in.X1;
    CHECK(rep.H[i] == doctest::Approx(L * L * L * s * s / 12.0).scale(1.0).epsilon(1e-9));
    CHECK(rep.Hp[i] == doctest::Approx(L * L * L * s / 6.0).scale(1.0).epsilon(1e-9));
    CHECK(rep.Hpp[i] == doctest::Approx(L * L * L / 6.0).scale(1.0).epsilon(1e-9));
  }

  REQUIRE(rep.checks.size() == 4);
  CHECK(rep.checks[0].id == "C1");
  CHECK(rep.checks[0].status == CheckStatus::Pass);  // H and H' vanish at X1
  CHECK(rep.checks[1].id == "C2");
  CHECK(rep.checks[1].status == CheckStatus::HypothesisUnmet);
  CHECK(rep.checks[2].id == "C3");
  CHECK(rep.checks[2].status == CheckStatus::Pass);
  CHECK(rep.c4_times.size() <= 4);

  // the weighted slope functional is exactly -H here
  const double F = monitor_F(snaps, g, in, 0.4);
  CHECK(F == doctest::Approx(-L * L * L * 0.01 / 12.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("the J kernel double integral collapses to its closed form") {
  for (double t : {0.3, 0.7, 1.1}) {
    const double closed = J_closed_form(t, 0.8, 0.2);
    CHECK(J_by_quadrature(t, 0.8, 0.2) == doctest::Approx(closed).epsilon(1e-12));
  }
  CHECK(J_closed_form(0.7, 0.8, 0.2) == doctest::Approx(0.36 * 0.49 / 4.0).epsilon(1e-15));
}

TEST_CASE("a positive-mass run satisfies every divergence inequality") {
  const auto g = build_grid<double>(GridKind::Periodic1D, 1024, -kPi, kPi);
  const double X = 0.8, X0 = 0.2, X1 = 0.3;
  InitialCondition<double> ic{GaussianSpec<double>{0.01, 50.0, 0.0}, ZeroSpec{}};

  SolverConfig<double> cfg;
  cfg.rel_tol = 1e-9;
  cfg.abs_tol = 1e-12;
  cfg.snapshot_times = monitor_schedule(X1, 0.55, 0.025);
  cfg.t_max = cfg.snapshot_times.back();
  cfg.boundary_threshold = 1.0;

  const auto r = run(ic, {1.0, 1.0}, g, cfg);
  REQUIRE(r.outcome.kind == OutcomeKind::MaxTimeReached);
  std::vector<FieldState<double>> stack(r.snapshots.begin(), r.snapshots.end() - 1);
  REQUIRE(stack.size() == cfg.snapshot_times.size());

  const auto in = make_theorem_inputs(stack.front().u, stack.front().v, g, X, X0);
  REQUIRE(in.hypothesis_met);
  const auto rep = monitor_H(stack, g, in, 4);
  CHECK(rep.hypothesis_met);
  CHECK(rep.G0 == in.epsilon);
  REQUIRE(rep.checks.size() == 4);
  for (const auto& c : rep.checks) {
    CAPTURE(c.id);
    CHECK(c.status == CheckStatus::Pass);
    CHECK(c.margin >= -rep.tol_abs);
  }
}

TEST_CASE("monitor schedule lands X1 on a node and fills the horizon") {
  const auto tA = monitor_schedule(0.3, 1.0, 0.025);
  REQUIRE(tA.size() == 41);
  CHECK(tA.front() == 0.0);
  CHECK(tA[12] == doctest::Approx(0.3).epsilon(1e-14));
  for (std::size_t j = 1; j < tA.size(); ++j)
    CHECK(tA[j] - tA[j - 1] == doctest::Approx(0.025).epsilon(1e-12));

  // awkward target spacing shrinks to divide X1 evenly
  const auto tB = monitor_schedule(0.3, 1.0, 0.07);
  const double dt = tB[1] - tB[0];
  CHECK(dt == doctest::Approx(0.06).epsilon(1e-12));
  CHECK(tB.back() <= 1.0 + 1e-12);

  CHECK_THROWS_AS(monitor_schedule(0.0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(monitor_schedule(0.5, 0.4, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(monitor_schedule(0.5, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("monitor preconditions are enforced") {
  const Index n = 256;
  const auto g = build_grid<double>(GridKind::Periodic1D, n, -kPi, kPi);
  TheoremInputs<double> in;
  in.X = 0.8;
  in.X0 = 0.2;
  in.X1 = 0.3;

  auto stack_of = [&](std::vector<double> ts) {
    std::vector<FieldState<double>> s(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) {
      s[j].t = ts[j];
      s[j].u = Vec<double>::Zero(n);
      s[j].v = Vec<double>::Zero(n);
    }
    return s;
  };

  const auto radial = build_grid<double>(GridKind::Radial3D, 257, 0.0, kPi);
  CHECK_THROWS_AS(monitor_H(stack_of({0.0, 0.01, 0.02}), radial, in), std::invalid_argument);
  CHECK_THROWS_AS(monitor_H(stack_of({0.0, 0.01}), g, in), std::invalid_argument);
  CHECK_THROWS_AS(monitor_H(stack_of({0.5, 0.51, 0.52}), g, in), std::invalid_argument);
  CHECK_THROWS_AS(monitor_H(stack_of({0.0, 0.01, 0.03}), g, in), std::invalid_argument);

  // spacing above (X - X0)/20
  std::vector<double> coarse;
  for (int j = 0; j <= 12; ++j) coarse.push_back(j * 0.05);
  CHECK_THROWS_AS(monitor_H(stack_of(coarse), g, in), std::invalid_argument);

  // X1 between nodes
  std::vector<double> offgrid;
  for (int j = 0; j <= 40; ++j) offgrid.push_back(j * 0.018);
  CHECK_THROWS_AS(monitor_H(stack_of(offgrid), g, in), std::invalid_argument);

  // support window leaves the domain before X1
  TheoremInputs<double> wide;
  wide.X = 3.0;
  wide.X0 = 1.0;
  wide.X1 = 1.0;
  std::vector<double> ts;
  for (int j = 0; j <= 20; ++j) ts.push_back(j * 0.1);
  CHECK_THROWS_AS(monitor_H(stack_of(ts), g, wide), std::runtime_error);
}

TEST_CASE("epsilon timeline walks snapshots while the cone fits") {
  const Index n = 1024;
  const auto g = build_grid<double>(GridKind::Periodic1D, n, -kPi, kPi);
  std::vector<FieldState<double>> snaps(3);
  for (int j = 0; j < 3; ++j) {
    snaps[j].t = 0.1 * j;
    snaps[j].u = Vec<double>::Zero(n);
    snaps[j].v = Vec<double>::Zero(n);
  }

  // zero data: epsilon identically zero until X + t outgrows the box
  const auto tl = epsilon_timeline(snaps, g, 3.0, 0.25);
  REQUIRE(tl.size() == 2);  // t = 0.2 would need X_t = 3.2 > x_max
  CHECK(tl[0].second == 0.0);
  CHECK(tl[1].second == 0.0);

  // data escaping the light cone stops the walk instead of throwing
  auto leaky = snaps;
  for (Index i = 0; i < n; ++i) {
    const double d = g.coord(i) - 2.9;
    leaky[1].u[i] = std::exp(-10.0 * d * d);
  }
  const auto tl2 = epsilon_timeline(leaky, g, 2.0, 0.25);
  CHECK(tl2.size() == 1);

  CHECK_THROWS_AS(epsilon_timeline(snaps, g, 2.0, 1.5), std::invalid_argument);
}
