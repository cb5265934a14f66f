#include <doctest.h>

#include "hillgate/fields.hpp"
#include "hillgate/rng.hpp"

using namespace hillgate;

TEST_SUITE_BEGIN("fields");

TEST_CASE("double well force values") {
  const auto f = ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1);
  CHECK(f.force({0.0})[0] == doctest::Approx(0.0));
  CHECK(f.force({1.0})[0] == doctest::Approx(0.0));
  CHECK(f.force({2.0})[0] == doctest::Approx(-24.0));
}

TEST_CASE("hamiltonian values") {
  const auto f = ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1);
  CHECK(f.hamiltonian({0.0}, {0.0}) == doctest::Approx(1.0));
  CHECK(f.hamiltonian({1.0}, {2.0}) == doctest::Approx(2.0));
  CHECK(f.hamiltonian({2.0}, {0.0}) == doctest::Approx(9.0));
}

TEST_CASE("gibbs log density") {
  const auto f = ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1);
  CHECK(f.gibbs_log_density({1.0}, {0.0}, 1.0) == doctest::Approx(0.0));
  CHECK(f.gibbs_log_density({0.0}, {0.0}, 2.0) == doctest::Approx(-2.0));
  CHECK(f.gibbs_log_density({0.0}, {1.0}, 1.0) == doctest::Approx(-1.5));
}

TEST_CASE("dimension mismatch and custom-field restrictions") {
  const auto f = ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1);
  CHECK_THROWS_AS(f.force({0.0, 0.0}), Error);
  const auto c = ForceField::custom([](const Vec&, Vec& out) { out[0] = 1.0; }, 1);
  CHECK_THROWS_AS(c.hamiltonian({0.0}, {0.0}), Error);
  CHECK_THROWS_AS(c.gibbs_log_density({0.0}, {0.0}, 1.0), Error);
  CHECK(c.force({0.0})[0] == doctest::Approx(1.0));
}

namespace {

void check_gradient(const ForceField& f, RngStream& rng, double lo, double hi) {
  const int d = f.dimension();
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    Vec q(d);
    for (double& x : q) x = rng.uniform(lo, hi);
    const Vec force = f.force(q);
    for (int i = 0; i < d; ++i) {
      Vec qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const double fd = -(f.potential_energy(qp) - f.potential_energy(qm)) / (2.0 * h);
      CHECK(std::abs(force[i] - fd) <= 1e-5 * (1.0 + std::abs(force[i])));
    }
  }
}

}  // namespace

TEST_CASE("finite-difference gradient check for all built-ins") {
  RngStream rng(42, 0);
  check_gradient(ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1), rng,
                 -3.0, 3.0);
  check_gradient(ForceField::conservative(
                     PotentialSpec::radial_double_well({-1.0, 0.0}, {1.0, 0.0}, 1.0), 2),
                 rng, -3.0, 3.0);
  check_gradient(ForceField::conservative(PotentialSpec::harmonic({0.5, -0.5}, 2.0), 2), rng,
                 -3.0, 3.0);
}

TEST_CASE("built-in forces stay finite") {
  RngStream rng(7, 0);
  const auto f = ForceField::conservative(PotentialSpec::double_well_1d(1.0, 1.0), 1);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec q = {rng.uniform(-50.0, 50.0)};
    CHECK(all_finite(f.force(q)));
    CHECK(std::isfinite(f.potential_energy(q)));
  }
}

TEST_CASE("hamiltonian momentum-reversal symmetry") {
  RngStream rng(11, 0);
  const auto f = ForceField::conservative(
      PotentialSpec::radial_double_well({-1.0, 0.0}, {1.0, 0.0}, 1.0), 2);
  for (int trial = 0; trial < 100; ++trial) {
    Vec q = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    Vec p = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    Vec pm = {-p[0], -p[1]};
    CHECK(f.hamiltonian(q, p) == doctest::Approx(f.hamiltonian(q, pm)).epsilon(1e-14));
  }
}

TEST_SUITE_END();
