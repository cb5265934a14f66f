import math

import pytest

import hillgate as hg


@pytest.fixture
def system():
    field = hg.ForceField.conservative(hg.PotentialSpec.double_well_1d(1.0, 1.0), 1)
    pair = hg.MetastablePair(
        hg.LevelSetRegion.ball([-1.0], 0.3, hg.SetLabel.A),
        hg.LevelSetRegion.ball([1.0], 0.3, hg.SetLabel.B),
    )
    params = hg.SimParams()
    params.thermo = hg.ThermoParams(gamma=1.0, beta=1.0)
    params.dt = 1e-3
    return field, pair, params


def test_field_values():
    field = hg.ForceField.conservative(hg.PotentialSpec.double_well_1d(1.0, 1.0), 1)
    assert field.force([2.0])[0] == pytest.approx(-24.0)
    assert field.hamiltonian([0.0], [0.0]) == pytest.approx(1.0)
    assert field.gibbs_log_density([0.0], [1.0], 1.0) == pytest.approx(-1.5)


def test_geometry():
    pair = hg.MetastablePair(
        hg.LevelSetRegion.ball([-1.0], 0.3, hg.SetLabel.A),
        hg.LevelSetRegion.ball([1.0], 0.3, hg.SetLabel.B),
    )
    assert pair.locate([-1.0]) == hg.Location.inside_A
    assert pair.locate([0.0]) == hg.Location.outside
    region = pair.region(hg.SetLabel.A)
    assert region.outward_normal([-0.7])[0] == pytest.approx(1.0)


def test_chain_collection_and_reactive_indexing(system):
    field, pair, params = system
    rng = hg.RngStream(2024, 0)
    chain = hg.run_collect_chain(hg.PhasePoint([0.0], [0.0]), field, pair, params, rng, 100)
    assert len(chain) == 100
    sides = [e.side for e in chain.events]
    for a, b in zip(sides, sides[1:]):
        assert a != b
    entries = hg.entry_subchain(chain)
    idx = hg.reactive_indexing(hg.labels_of(entries))
    for a, b in zip(idx.eta_re_A, idx.eta_re_B):
        assert a < b


def test_reactive_indexing_example():
    L = hg.SetLabel
    idx = hg.reactive_indexing([L.B, L.B, L.A, L.A, L.B, L.A])
    assert list(idx.eta_re_A) == [2, 5]
    assert list(idx.eta_re_B) == [4]
    assert list(idx.eta_ex_A) == [3]
    assert list(idx.eta_ex_B) == [4]


def test_boundary_sampler_and_density(system):
    field, pair, params = system
    spec = hg.BoundaryMeasureSpec(
        pair.region(hg.SetLabel.A), field, 1.0, hg.BoundarySide.gamma_minus
    )
    sampler = hg.BoundarySampler(spec)
    rng = hg.RngStream(7, 0)
    x = sampler.sample(rng)
    assert abs(pair.region(hg.SetLabel.A).phi(x.q)) < 1e-12
    assert sampler.density(x) > 0.0
    p = hg.velocity_from_gaussians([1.0], 4.0, hg.BoundarySide.gamma_minus, [3.0, 4.0])
    assert p[0] == pytest.approx(-2.5)


def test_hill_estimate_runs(system):
    field, pair, params = system
    spec = hg.BoundaryMeasureSpec(
        pair.region(hg.SetLabel.A), field, 1.0, hg.BoundarySide.gamma_minus
    )
    xs = hg.collect_excursions(
        pair, field, params, spec, rng=hg.RngStream(5, 0), n=200, n_threads=2
    )
    est = hg.hill_statistic(xs)
    assert est.value > 0.0
    assert est.std_error >= 0.0
    dec = hg.decomposed_hill(xs)
    assert dec.value == pytest.approx(est.value, rel=1e-12)


def test_determinism(system):
    field, pair, params = system
    spec = hg.BoundaryMeasureSpec(
        pair.region(hg.SetLabel.A), field, 1.0, hg.BoundarySide.gamma_minus
    )
    a = hg.collect_excursions(pair, field, params, spec, rng=hg.RngStream(9, 0), n=32)
    b = hg.collect_excursions(
        pair, field, params, spec, rng=hg.RngStream(9, 0), n=32, n_threads=4
    )
    assert [s.tau1 for s in a] == [s.tau1 for s in b]


def test_oracle_identities():
    chain = hg.oracle.random_chain(6, seed=11)
    pi = hg.oracle.stationary(chain)
    g = [1.0 if l == hg.SetLabel.A else 0.0 for l in chain.partition]
    lhs = hg.oracle.hill_lhs(chain, g)
    rhs = hg.oracle.hill_rhs(chain, pi, g)
    assert lhs == pytest.approx(rhs, abs=1e-10)
    lo, hi = hg.oracle.representation_check(chain, pi, [0, 2], g)
    assert lo == pytest.approx(hi, abs=1e-10)


def test_z_constants(system):
    field, pair, params = system
    zp, zm = hg.z_constants(pair, field, 1.0)
    assert zp == pytest.approx(zm, rel=1e-10)


def test_errors_are_typed():
    with pytest.raises(hg.HillgateError):
        hg.LevelSetRegion.ball([0.0], 1.0, hg.SetLabel.A).outward_normal([0.5])
