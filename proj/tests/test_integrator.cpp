#include <doctest.h>

#include <cmath>
#include <limits>

#include "hillgate/integrator.hpp"
#include "hillgate/chains.hpp"
#include "hillgate/quadrature.hpp"
#include "hillgate/stats.hpp"

using namespace hillgate;

namespace {

MetastablePair test_pair_1d() {
  return {LevelSetRegion::ball({-1.0}, 0.3, SetLabel::A),
          LevelSetRegion::ball({1.0}, 0.3, SetLabel::B)};
}

ForceField zero_force_1d() {
  return ForceField::custom([](const Vec&, Vec& f) { f.assign(1, 0.0); }, 1);
}

}  // namespace

TEST_SUITE_BEGIN("integrator");

TEST_CASE("euler-maruyama free flight") {
  SimParams params;
  params.thermo = {0.0 + 1e-12, 1.0};  // gamma ~ 0
  params.thermo.gamma = 1e-12;
  params.scheme = Scheme::euler_maruyama;
  params.dt = 0.25;
  params.noise_scale = 0.0;
  RngStream rng(1, 0);
  const auto y = step({{2.0}, {1.5}}, zero_force_1d(), params, rng);
  CHECK(y.q[0] == doctest::Approx(2.0 + 0.25 * 1.5));
  CHECK(y.p[0] == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("euler-maruyama harmonic hand step") {
  SimParams params;
  params.thermo = {1e-12, 1.0};
  params.scheme = Scheme::euler_maruyama;
  params.dt = 0.1;
  params.noise_scale = 0.0;
  const auto field = ForceField::conservative(PotentialSpec::harmonic({0.0}, 1.0), 1);
  RngStream rng(1, 0);
  const auto y = step({{1.0}, {0.0}}, field, params, rng);
  CHECK(y.p[0] == doctest::Approx(-0.1));
  CHECK(y.q[0] == doctest::Approx(1.0));
}

TEST_CASE("baoab O-step damping") {
  SimParams params;
  params.thermo = {1.0, 1.0};
  params.scheme = Scheme::baoab;
  params.dt = 0.2;
  params.noise_scale = 0.0;
  RngStream rng(1, 0);
  // F = 0: kicks vanish, drift moves q, O-step scales p by exp(-gamma dt)
  const auto y = step({{0.0}, {1.0}}, zero_force_1d(), params, rng);
  CHECK(y.p[0] == doctest::Approx(std::exp(-0.2)));
}

TEST_CASE("noiseless frictionless baoab is time reversible") {
  // gamma = 0, noise off: the scheme reduces to velocity Verlet, and one step
  // from the momentum-reversed end state retraces the step exactly
  const auto field = ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1);
  SimParams params;
  params.thermo = {1e-300, 1.0};  // exp(-gamma dt) rounds to 1 exactly
  params.dt = 0.05;
  params.noise_scale = 0.0;
  RngStream rng(1, 0);
  const PhasePoint x0{{0.3}, {1.1}};
  const auto x1 = step(x0, field, params, rng);
  const auto back = step(x1.momentum_reversed(), field, params, rng);
  CHECK(back.q[0] == doctest::Approx(x0.q[0]).epsilon(1e-13));
  CHECK(back.p[0] == doctest::Approx(-x0.p[0]).epsilon(1e-13));
}

TEST_CASE("numerical blowup is reported") {
  SimParams params;
  params.thermo = {1.0, 1.0};
  params.dt = 1.0;
  params.noise_scale = 0.0;
  const auto bad = ForceField::custom(
      [](const Vec&, Vec& f) { f.assign(1, std::numeric_limits<double>::infinity()); }, 1);
  RngStream rng(1, 0);
  CHECK_THROWS_AS(step({{0.0}, {0.0}}, bad, params, rng), Error);
}

TEST_CASE("detect_crossing: line-sphere closed form") {
  SimParams params;
  params.dt = 2.0;
  const auto region = LevelSetRegion::ball({0.0}, 1.0, SetLabel::A);
  const PhasePoint before{{-2.0}, {1.0}};
  const PhasePoint after{{0.0}, {1.0}};
  const auto ev = detect_crossing(before, after, 10.0, region, params);
  REQUIRE(ev.has_value());
  CHECK(ev->x.q[0] == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(ev->time == doctest::Approx(11.0).epsilon(1e-8));
  CHECK(ev->side == BoundarySide::gamma_minus);
  CHECK(ev->set_label == SetLabel::A);
}

TEST_CASE("detect_crossing: no sign change") {
  SimParams params;
  const auto region = LevelSetRegion::ball({0.0}, 1.0, SetLabel::A);
  CHECK(!detect_crossing({{-2.0}, {1.0}}, {{-1.5}, {1.0}}, 0.0, region, params).has_value());
  CHECK(!detect_crossing({{-0.5}, {1.0}}, {{0.5}, {1.0}}, 0.0, region, params).has_value());
}

TEST_CASE("detect_crossing: tangential event is discarded and counted") {
  SimParams params;
  params.dt = 1.0;
  const auto region = LevelSetRegion::ball({0.0, 0.0}, 1.0, SetLabel::A);
  const double s75 = std::sqrt(0.75);
  // chord crosses the circle at (-0.5, sqrt(0.75)); p there is exactly tangent
  const Vec p_tan = {s75, 0.5};
  EventCounters counters;
  const auto ev = detect_crossing({{-0.5, 1.0}, p_tan}, {{-0.5, 0.8}, p_tan}, 0.0, region,
                                  params, &counters);
  CHECK(!ev.has_value());
  CHECK(counters.gamma_zero_discards == 1);
}

TEST_CASE("detect_crossing localizes the closed-form line-sphere root") {
  RngStream rng(512, 0);
  SimParams params;
  params.dt = 1.0;
  const auto region = LevelSetRegion::ball({0.25, -0.5}, 0.8, SetLabel::A);
  const Vec c = region.center();
  int tested = 0;
  while (tested < 200) {
    PhasePoint a{{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)},
                 {rng.normal(), rng.normal()}};
    PhasePoint b{{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)},
                 {rng.normal(), rng.normal()}};
    const bool in_a = region.phi(a.q) < 0.0;
    const bool in_b = region.phi(b.q) < 0.0;
    if (in_a == in_b) continue;
    ++tested;
    // earliest root of the quadratic |a + s (b - a) - c|^2 = r^2 in [0, 1]
    const Vec d = b.q - a.q;
    const Vec ac = a.q - c;
    const double A = dot(d, d), B = 2.0 * dot(ac, d), C = dot(ac, ac) - 0.64;
    const double disc = std::sqrt(B * B - 4.0 * A * C);
    double s_exact = (-B - disc) / (2.0 * A);
    if (s_exact < 0.0 || s_exact > 1.0) s_exact = (-B + disc) / (2.0 * A);
    EventCounters counters;
    const auto ev = detect_crossing(a, b, 0.0, region, params, &counters);
    if (!ev.has_value()) {
      // only tangential configurations may be dropped
      CHECK(counters.gamma_zero_discards + counters.side_mismatch_discards >= 1);
      continue;
    }
    CHECK(ev->time == doctest::Approx(s_exact).epsilon(1e-6));
    CHECK(region.phi(ev->x.q) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ev->side == (in_a ? BoundarySide::gamma_plus : BoundarySide::gamma_minus));
  }
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(5, 1), b(5, 1), c(5, 2);
  bool all_equal = true;
  for (int i = 0; i < 64; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    if (x != c.uniform()) all_equal = false;
  }
  CHECK(!all_equal);
  RngStream base(9, 0);
  RngStream s1 = base.substream(3), s2 = base.substream(3), s3 = base.substream(4);
  CHECK(s1.uniform() == s2.uniform());
  CHECK(s1.uniform() != s3.uniform());
}

TEST_CASE("run_until_entry: deterministic drift into A") {
  // strong harmonic pull toward the center of A, no noise
  const auto field = ForceField::conservative(PotentialSpec::harmonic({-1.0}, 4.0), 1);
  const auto pair = test_pair_1d();
  SimParams params;
  params.thermo = {1.0, 1.0};
  params.dt = 1e-3;
  params.noise_scale = 0.0;
  RngStream rng(1, 0);
  const auto r = run_until_entry({{0.0}, {0.0}}, field, pair, params, rng);
  CHECK(r.event.set_label == SetLabel::A);
  CHECK(r.event.side == BoundarySide::gamma_minus);
  CHECK(r.event.x.q[0] == doctest::Approx(-0.7).epsilon(1e-6));
  CHECK(r.elapsed > 0.0);
}

TEST_CASE("runs from a boundary start alternate and reproduce") {
  const auto field = ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1);
  const auto pair = test_pair_1d();
  SimParams params;
  params.thermo = {1.0, 1.0};
  params.dt = 1e-3;
  SUBCASE("starting on Gamma+ of A gives a Gamma- event next") {
    RngStream rng(123, 5);
    const auto r = run_until_entry({{-0.7}, {0.8}}, field, pair, params, rng);
    CHECK(r.event.side == BoundarySide::gamma_minus);
  }
  SUBCASE("same seed and stream reproduce the event bit for bit") {
    RngStream rng1(42, 9), rng2(42, 9);
    const auto r1 = run_until_entry({{0.0}, {0.1}}, field, pair, params, rng1);
    const auto r2 = run_until_entry({{0.0}, {0.1}}, field, pair, params, rng2);
    CHECK(r1.event.time == r2.event.time);
    CHECK(r1.event.x.q[0] == r2.event.x.q[0]);
    CHECK(r1.event.x.p[0] == r2.event.x.p[0]);
    CHECK(r1.steps == r2.steps);
  }
  SUBCASE("run_until_exit mirrors run_until_entry under momentum reversal") {
    // with the time-reversible scheme disabled noise-wise, exits from inside
    // behave like entries of the reflected state; here just exercise the API
    RngStream rng(7, 0);
    const auto r = run_until_exit({{-1.0}, {0.05}}, field, pair, params, rng);
    CHECK(r.event.side == BoundarySide::gamma_plus);
    CHECK(r.event.set_label == SetLabel::A);
  }
}

TEST_CASE("timeout carries partial elapsed time") {
  const auto field = ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1);
  const auto pair = test_pair_1d();
  SimParams params;
  params.thermo = {1.0, 1.0};
  params.dt = 1e-3;
  params.max_steps = 50;
  RngStream rng(3, 0);
  try {
    (void)run_until_entry({{0.0}, {0.0}}, field, pair, params, rng);
    FAIL("expected TimeoutError");
  } catch (const TimeoutError& e) {
    CHECK(e.code() == Errc::timeout);
    CHECK(e.elapsed() == doctest::Approx(50 * 1e-3));
    CHECK(e.steps() == 50);
  }
}

TEST_CASE("collected chains alternate, increase in time, and integrate G=1 to elapsed time") {
  const auto field = ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1);
  const auto pair = test_pair_1d();
  SimParams params;
  params.thermo = {1.0, 1.0};
  params.dt = 1e-3;
  RngStream rng(2024, 3);
  const auto chain = run_collect_chain({{0.0}, {0.0}}, field, pair, params, rng, 200,
                                       [](const Vec&, const Vec&) { return 1.0; });
  REQUIRE(chain.size() == 200);
  REQUIRE(chain.accumulators.size() == 200);
  for (std::size_t i = 1; i < chain.size(); ++i) {
    CHECK(chain.events[i].time > chain.events[i - 1].time);
    CHECK(chain.events[i].side != chain.events[i - 1].side);
    const double elapsed = chain.events[i].time - chain.events[i - 1].time;
    CHECK(std::abs(chain.accumulators[i] - elapsed) <= params.dt);
  }
  SUBCASE("determinism of whole chains") {
    RngStream rng2(2024, 3);
    const auto chain2 = run_collect_chain({{0.0}, {0.0}}, field, pair, params, rng2, 200,
                                          [](const Vec&, const Vec&) { return 1.0; });
    for (std::size_t i = 0; i < chain.size(); ++i) {
      CHECK(chain.events[i].time == chain2.events[i].time);
      CHECK(chain.events[i].x.p[0] == chain2.events[i].x.p[0]);
    }
  }
}

TEST_CASE("2d radial double well: chain structure and entry-velocity law") {
  const auto field = ForceField::conservative(
      PotentialSpec::radial_double_well({-1.0, 0.0}, {1.0, 0.0}, 1.0), 2);
  const MetastablePair pair(LevelSetRegion::ball({-1.0, 0.0}, 0.4, SetLabel::A),
                            LevelSetRegion::ball({1.0, 0.0}, 0.4, SetLabel::B));
  const double beta = 1.5;
  SimParams params;
  params.thermo = {1.0, beta};
  params.dt = 1e-3;
  RngStream rng(314, 0);
  const auto chain =
      run_collect_chain({{-1.0, 0.0}, {0.0, 0.0}}, field, pair, params, rng, 6000);
  for (std::size_t i = 1; i < chain.size(); ++i) {
    CHECK(chain.events[i].time > chain.events[i - 1].time);
    CHECK(chain.events[i].side != chain.events[i - 1].side);
  }
  const auto entries = entry_subchain(chain);
  std::vector<double> abs_pn;
  for (std::size_t i = 200; i < entries.size(); i += 20) {
    const auto& e = entries.events[i];
    const auto n = pair.region(e.set_label).outward_normal(e.x.q, {1e-6, 1e-10});
    CHECK(dot(e.x.p, n) < 0.0);
    abs_pn.push_back(std::abs(dot(e.x.p, n)));
  }
  CHECK(ks_test_p(abs_pn, [&](double x) { return rayleigh_cdf(x, beta); }) > 0.01);
}

TEST_CASE("equilibrium sanity: long-run averages match 1d Gibbs quadrature") {
  const auto field = ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1);
  SimParams params;
  params.thermo = {1.0, 1.0};
  params.dt = 1e-3;
  params.scheme = Scheme::baoab;
  RngStream rng(777, 0);
  PhasePoint x{{0.9}, {0.0}};

  double s_pos = 0.0, s_vel = 0.0;
  const long long n = 10'000'000;
  simulate_steps(x, field, params, rng, n, [&](const Vec& q, const Vec& p) {
    s_pos += 1.0 / (1.0 + q[0] * q[0]);
    s_vel += (std::abs(p[0]) > 1.0) ? 1.0 : 0.0;
  });
  const double avg_pos = s_pos / n;
  const double avg_vel = s_vel / n;

  // quadrature oracle: positions under exp(-V), velocities standard normal
  auto wpos = [&](double q) { return std::exp(-field.potential_energy({q})); };
  const double zq = gauss_legendre(wpos, -4.0, 4.0, 200);
  const double ref_pos =
      gauss_legendre([&](double q) { return wpos(q) / (1.0 + q * q); }, -4.0, 4.0, 200) / zq;
  const double ref_vel = 2.0 * 0.5 * std::erfc(1.0 / std::sqrt(2.0));

  CHECK(std::abs(avg_pos - ref_pos) <= 0.02 * std::abs(ref_pos));
  CHECK(std::abs(avg_vel - ref_vel) <= 0.02 * std::abs(ref_vel));
}

TEST_SUITE_END();
