#include <doctest.h>

#include <cmath>

#include "hillgate/estimators.hpp"
#include "hillgate/stats.hpp"

using namespace hillgate;

namespace {

ForceField double_well() {
  return ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1);
}

MetastablePair pair_1d() {
  return {LevelSetRegion::ball({-1.0}, 0.3, SetLabel::A),
          LevelSetRegion::ball({1.0}, 0.3, SetLabel::B)};
}

SimParams sim_1d() {
  SimParams p;
  p.thermo = {1.0, 1.0};
  p.dt = 1e-3;
  return p;
}

BoundaryMeasureSpec spec_A(BoundarySide side, double beta = 1.0) {
  return {LevelSetRegion::ball({-1.0}, 0.3, SetLabel::A), double_well(), beta, side};
}

BoundaryChain entry_chain_from(const std::vector<SetLabel>& labels,
                               const std::vector<double>& times) {
  BoundaryChain c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CrossingEvent e;
    e.x.q = {0.0};
    e.x.p = {-1.0};
    e.time = times[i];
    e.side = BoundarySide::gamma_minus;
    e.set_label = labels[i];
    c.events.push_back(e);
  }
  return c;
}

}  // namespace

TEST_SUITE_BEGIN("estimators");

TEST_CASE("hill_statistic closed-form cases") {
  SUBCASE("degenerate: all hits with constant time") {
    std::vector<ExcursionSample> xs(10, {2.5, true, 2.5});
    const auto e = hill_statistic(xs);
    CHECK(e.value == doctest::Approx(2.5));
    CHECK(e.std_error == doctest::Approx(0.0));
  }
  SUBCASE("two samples give (1+3)/2 / (1/2) = 4") {
    std::vector<ExcursionSample> xs = {{1.0, false, 1.0}, {3.0, true, 3.0}};
    CHECK(hill_statistic(xs).value == doctest::Approx(4.0));
  }
  SUBCASE("zero hits is an error pointing to AMS") {
    std::vector<ExcursionSample> xs = {{1.0, false, 1.0}};
    CHECK_THROWS_WITH_AS(hill_statistic(xs),
                         doctest::Contains("ams_probability"), Error);
  }
  SUBCASE("observable mode with G = 1 equals mean-time mode") {
    std::vector<ExcursionSample> xs = {{1.0, false, 1.0}, {3.0, true, 3.0},
                                       {0.5, true, 0.5}};
    CHECK(hill_statistic(xs, HillMode::observable).value ==
          doctest::Approx(hill_statistic(xs, HillMode::mean_time).value));
  }
}

TEST_CASE("decomposed hill") {
  SUBCASE("p = 1 reduces to the reach term") {
    HillComponents c;
    c.tau_stay = {7.0, 0.1, 5, "", 0};
    c.p_reach = {1.0, 0.0, 5, "", 0};
    c.tau_reach = {4.0, 0.2, 5, "", 0};
    CHECK(decomposed_hill(c).value == doctest::Approx(4.0));
  }
  SUBCASE("2 * 3 + 5 = 11") {
    HillComponents c;
    c.tau_stay = {2.0, 0.0, 5, "", 0};
    c.p_reach = {0.25, 0.0, 5, "", 0};
    c.tau_reach = {5.0, 0.0, 5, "", 0};
    CHECK(decomposed_hill(c).value == doctest::Approx(11.0));
  }
  SUBCASE("invalid probability") {
    HillComponents c;
    c.p_reach = {0.0, 0.0, 5, "", 0};
    CHECK_THROWS_AS(decomposed_hill(c), Error);
  }
  SUBCASE("algebraic identity with hill_statistic on shared samples") {
    RngStream rng(4, 0);
    std::vector<ExcursionSample> xs;
    for (int i = 0; i < 200; ++i)
      xs.push_back({rng.uniform(0.1, 3.0), rng.uniform() < 0.3, 0.0});
    xs[0].hit_B = true;  // ensure at least one hit
    CHECK(decomposed_hill(xs).value ==
          doctest::Approx(hill_statistic(xs).value).epsilon(1e-12));
  }
}

TEST_CASE("direct transition time") {
  using L = SetLabel;
  SUBCASE("mean of durations") {
    const auto chain = entry_chain_from({L::A, L::B, L::A, L::B}, {0.0, 2.5, 3.0, 6.5});
    const auto e = direct_transition_time(chain);
    CHECK(e.value == doctest::Approx(3.0));
    CHECK(e.n_samples == 2);
  }
  SUBCASE("insufficient data") {
    const auto chain = entry_chain_from({L::A, L::B}, {0.0, 2.5});
    CHECK_THROWS_AS(direct_transition_time(chain), Error);
  }
  SUBCASE("pooled mean across replicas equals concatenated mean") {
    RngStream rng(6, 0);
    std::vector<double> all;
    double pooled_num = 0.0;
    double pooled_den = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<SetLabel> labels;
      std::vector<double> times;
      double t = 0.0;
      for (int i = 0; i < 40; ++i) {
        labels.push_back(i % 2 == 0 ? L::A : L::B);
        t += rng.uniform(0.1, 1.0);
        times.push_back(t);
      }
      const auto ts = transition_samples(entry_chain_from(labels, times));
      for (const auto& s : ts) {
        all.push_back(s.duration);
        pooled_num += s.duration;
        pooled_den += 1.0;
      }
    }
    const auto ms = mean_stderr(all);
    CHECK(ms.mean == doctest::Approx(pooled_num / pooled_den));
  }
}

TEST_CASE("G = 1 transition statistic equals the transition time within quadrature error") {
  const auto field = double_well();
  const auto pair = pair_1d();
  const auto params = sim_1d();
  RngStream rng(808, 0);
  const auto chain = run_collect_chain({{-1.0}, {0.0}}, field, pair, params, rng, 3000,
                                       [](const Vec&, const Vec&) { return 1.0; });
  const auto entries = entry_subchain(chain);
  const auto ts = transition_samples(entries);
  REQUIRE(ts.size() >= 2);
  // with G = 1 the rectangle rule telescopes to the elapsed time exactly, up
  // to floating-point accumulation
  for (const auto& t : ts)
    CHECK(std::abs(t.g_integral - t.duration) <= 1e-9 * (1.0 + t.duration));
  const auto a = direct_transition_time(entries);
  const auto b = direct_transition_statistic(entries);
  CHECK(std::abs(a.value - b.value) <= 1e-9 * (1.0 + a.value));
}

TEST_CASE("capacity estimate") {
  using L = SetLabel;
  SUBCASE("A,B,A,B pair frequencies") {
    const auto c = capacity_estimate({L::A, L::B, L::A, L::B});
    CHECK(c.ab.value == doctest::Approx(2.0 / 3.0));
    CHECK(c.ba.value == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("single-label chain gives zero") {
    const auto c = capacity_estimate({L::A, L::A, L::A});
    CHECK(c.ab.value == doctest::Approx(0.0));
    CHECK(c.ba.value == doctest::Approx(0.0));
  }
}

TEST_CASE("collect_excursions: structure, determinism, thread-independence") {
  const auto field = double_well();
  const auto pair = pair_1d();
  const auto params = sim_1d();
  const auto spec = spec_A(BoundarySide::gamma_minus);
  const std::size_t n = 64;
  const auto a =
      collect_excursions(pair, field, params, spec, {}, RngStream(1234, 0), n, 1);
  const auto b =
      collect_excursions(pair, field, params, spec, {}, RngStream(1234, 0), n, 4);
  REQUIRE(a.size() == n);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(a[i].tau1 > 0.0);
    CHECK(a[i].tau1 == b[i].tau1);
    CHECK(a[i].hit_B == b[i].hit_B);
    hits += a[i].hit_B;
  }
  CHECK(hits <= n);
  SUBCASE("G = 1 integral tracks tau within quadrature error") {
    const auto c = collect_excursions(pair, field, params, spec, {}, RngStream(77, 0), 16, 2,
                                      [](const Vec&, const Vec&) { return 1.0; });
    for (const auto& s : c)
      CHECK(std::abs(s.g_integral - s.tau1) <= 3.0 * params.dt);
  }
}

TEST_CASE("censored excursions abort the batch with a count") {
  const auto field = double_well();
  const auto pair = pair_1d();
  SimParams params = sim_1d();
  params.max_steps = 20;  // nothing finishes in 20 steps
  const auto spec = spec_A(BoundarySide::gamma_minus);
  CHECK_THROWS_WITH_AS(
      (void)collect_excursions(pair, field, params, spec, {}, RngStream(1, 0), 8, 2),
      doctest::Contains("censored"), TimeoutError);
}

TEST_CASE("plus-side initialization reproduces and matches the minus side") {
  const auto field = double_well();
  const auto pair = pair_1d();
  const auto params = sim_1d();
  const auto spec_plus = spec_A(BoundarySide::gamma_plus);
  const auto spec_minus = spec_A(BoundarySide::gamma_minus);

  const std::size_t n = 1500;
  const auto ps = plus_side_initialization(pair, field, params, spec_plus, spec_minus, {},
                                           RngStream(9, 0), n, 4);
  const auto ps2 = plus_side_initialization(pair, field, params, spec_plus, spec_minus, {},
                                            RngStream(9, 0), n, 2);
  CHECK(ps.tau_leg == ps2.tau_leg);
  CHECK(ps.hit_B == ps2.hit_B);

  const auto p_plus = plus_side_hit_probability(ps);
  const auto xs = collect_excursions(pair, field, params, spec_minus, {}, RngStream(10, 0), n, 4);
  double k = 0.0;
  for (const auto& s : xs) k += s.hit_B;
  const double p_minus = k / n;
  const double se_minus = std::sqrt(p_minus * (1.0 - p_minus) / n);
  const double se = std::sqrt(se_minus * se_minus + p_plus.std_error * p_plus.std_error);
  CHECK(std::abs(p_plus.value - p_minus) <= 3.0 * se);

  SUBCASE("additive time correction") {
    const auto total = plus_side_mean_time(ps);
    std::vector<double> tau1(n);
    for (std::size_t i = 0; i < n; ++i) tau1[i] = xs[i].tau1;
    const auto ms = mean_stderr(tau1);
    const double comb = std::sqrt(ms.std_error * ms.std_error +
                                  total.std_error * total.std_error);
    CHECK(std::abs(total.value - ms.mean) <= 3.0 * comb);
  }
}

TEST_CASE("ams: deterministic telescoping cases") {
  const auto pair = pair_1d();
  SimParams params = sim_1d();
  params.noise_scale = 0.0;

  AmsParams ams;
  ams.n_replicas = 8;
  ams.kill_count = 7;
  ams.reaction_coordinate = [](const Vec& q) { return q[0]; };
  ams.level_B = 0.7;

  SUBCASE("deterministic flow into B gives exactly 1") {
    // force pushes everything toward the center of B
    const auto to_b = ForceField::conservative(PotentialSpec::harmonic({1.0}, 6.0), 1);
    const BoundaryMeasureSpec start{pair.region_a(), to_b, 1.0, BoundarySide::gamma_plus};
    const auto r = ams_probability(pair, to_b, params, start, {}, ams, RngStream(21, 0));
    CHECK(r.p_hat.value == doctest::Approx(1.0));
    CHECK(r.iterations == 0);
    for (double d : r.reactive_durations) CHECK(d > 0.0);
  }
  SUBCASE("deterministic return to A is an extinction error") {
    const auto to_a = ForceField::conservative(PotentialSpec::harmonic({-1.0}, 6.0), 1);
    const BoundaryMeasureSpec start{pair.region_a(), to_a, 1.0, BoundarySide::gamma_plus};
    CHECK_THROWS_AS(
        (void)ams_probability(pair, to_a, params, start, {}, ams, RngStream(22, 0)), Error);
  }
}

TEST_CASE("ams agrees with crude Monte Carlo and is seed-exchangeable") {
  const auto field = double_well();
  const auto pair = pair_1d();
  SimParams params = sim_1d();
  const double beta = 1.0;
  ThermoParams th{1.0, beta};
  params.thermo = th;
  const BoundaryMeasureSpec spec_plus{pair.region_a(), field, beta, BoundarySide::gamma_plus};
  const BoundaryMeasureSpec spec_minus{pair.region_a(), field, beta,
                                       BoundarySide::gamma_minus};

  // crude estimate from the plus side
  const auto ps = plus_side_initialization(pair, field, params, spec_plus, spec_minus, {},
                                           RngStream(300, 0), 4000, 4);
  const auto crude = plus_side_hit_probability(ps);

  AmsParams ams;
  ams.n_replicas = 64;
  ams.kill_count = 4;
  ams.reaction_coordinate = [](const Vec& q) { return q[0]; };
  ams.level_B = 0.7;

  std::vector<double> group1, group2;
  for (int rep = 0; rep < 6; ++rep) {
    group1.push_back(
        ams_probability(pair, field, params, spec_plus, {}, ams, RngStream(500, rep)).p_hat.value);
    group2.push_back(
        ams_probability(pair, field, params, spec_plus, {}, ams, RngStream(600, rep)).p_hat.value);
  }
  const auto m1 = mean_stderr(group1);
  const auto m2 = mean_stderr(group2);
  const double se12 = std::sqrt(m1.std_error * m1.std_error + m2.std_error * m2.std_error);
  CHECK(std::abs(m1.mean - m2.mean) <= 3.0 * se12);

  std::vector<double> pooled = group1;
  pooled.insert(pooled.end(), group2.begin(), group2.end());
  const auto mp = mean_stderr(pooled);
  const double se = std::sqrt(mp.std_error * mp.std_error + crude.std_error * crude.std_error);
  CHECK(std::abs(mp.mean - crude.value) <= 3.0 * se);
}

TEST_SUITE_END();
