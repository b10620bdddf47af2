import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metricdeform.deform import (
    PowerDensity,
    brute_force_chain_metric,
    canonical_density,
    chain_metric,
    chain_weights,
    compute_ledger,
    deform,
    deform_with_gauge,
    flatten,
    infinity_estimates,
    invert,
    product_deform_demo,
    sphericalize,
    transform,
)
from metricdeform.errors import EmptyFarAnnulusWarning, NotPerfectAtBase, PreconditionError

from conftest import line_space, planar_spaces


def test_sphericalized_grid(grid10):
    deformed = sphericalize(grid10, 1.0)
    k = np.arange(10)
    assert deformed.kind == "sphericalize"
    assert deformed.m0 == 1.0
    np.testing.assert_array_equal(deformed.retained, k)
    np.testing.assert_allclose(deformed.rho, (k + 1.0) ** -2, rtol=1e-15)
    assert deformed.dhat[0, 1] == pytest.approx(1.25, rel=1e-15)
    np.testing.assert_allclose(deformed.nuhat, deformed.rho)
    assert not deformed.space.unbounded


def test_chain_metric_is_a_metric(grid10):
    dhat = sphericalize(grid10, 2.0).dhat
    np.testing.assert_array_equal(dhat, dhat.T)
    assert np.all(np.diag(dhat) == 0)
    assert np.all(dhat[~np.eye(10, dtype=bool)] > 0)
    through = dhat[:, :, None] + dhat[None, :, :]
    assert np.all(dhat[:, None, :] <= through * (1 + 1e-12))


@given(
    planar_spaces(max_points=6),
    st.lists(st.floats(min_value=0.01, max_value=10.0), min_size=6, max_size=6),
)
@settings(max_examples=60, deadline=None)
def test_chain_metric_matches_exhaustive_chains(space, rho):
    rho = np.asarray(rho[: space.n])
    fast = chain_metric(space.dist, rho)
    slow = brute_force_chain_metric(chain_weights(space.dist, rho))
    np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=1e-12)
    assert np.all(fast <= chain_weights(space.dist, rho) + 1e-12)


def test_brute_force_refuses_large_spaces():
    with pytest.raises(ValueError):
        brute_force_chain_metric(np.zeros((9, 9)))


def test_sphericalize_needs_an_unbounded_truncation(two_point):
    with pytest.raises(PreconditionError):
        sphericalize(two_point, 1.0)
    with pytest.raises(PreconditionError, match="scales above 1"):
        sphericalize(line_space([0.0, 1.0], unbounded=True), 1.0)


def test_flatten_rejects_unbounded_truncations(grid10):
    with pytest.raises(PreconditionError):
        flatten(grid10, 1.0)


def test_flatten_needs_a_perfect_base(family):
    with pytest.raises(NotPerfectAtBase):
        flatten(family("cluster"), 1.0)


def test_flatten_drops_the_base(cantor):
    deformed = flatten(cantor(3), 1.0)
    assert deformed.dropped_base
    assert deformed.n == 7
    assert 0 not in deformed.retained.tolist()
    assert deformed.space.unbounded


@pytest.mark.parametrize("depth", [2, 4, 6])
def test_flattened_cantor_grows_with_depth(cantor, depth):
    # the base's nearest neighbour pays at least 1 / nu(base) for any step
    deformed = flatten(cantor(depth), 1.0)
    assert deformed.dhat.max() >= 2.0**depth * (1 - 1e-12)


def test_invert_needs_a_punctured_truncation(grid10):
    with pytest.raises(PreconditionError, match="punctured"):
        invert(grid10, 1.0)


def test_invert_punctured_grid(family):
    space = family("punctured", n=8, depth=4)
    deformed = invert(space, 1.0)
    assert deformed.kind == "invert"
    assert deformed.n == space.n - 1
    assert deformed.dropped_base
    assert not deformed.space.punctured


def test_transform_dispatch_checks_m0(grid10, cantor):
    assert transform(grid10, "sphericalize", 1.0, m0=1).kind == "sphericalize"
    assert transform(cantor(3), "flatten", 1.0).kind == "flatten"
    with pytest.raises(PreconditionError, match="m0"):
        transform(cantor(3), "flatten", 1.0, m0=1)
    with pytest.raises(PreconditionError, match="unknown transform"):
        transform(grid10, "stretch", 1.0)


def test_custom_density_deformation(grid10):
    density = PowerDensity(2.0)
    deformed = deform(grid10, density, 0.5)
    assert deformed.kind == "custom"
    assert deformed.m0 is None
    np.testing.assert_allclose(deformed.nuhat, density(grid10.radii) ** 0.5)
    with pytest.raises(PreconditionError):
        deformed.gauge


def test_gauge_deformation_matches_canonical(grid10):
    deformed = sphericalize(grid10, 1.0)
    rho, dhat, nuhat = deform_with_gauge(
        grid10.dist, grid10.mass, deformed.gauge, deformed.gauge_mass, 1.0
    )
    np.testing.assert_allclose(rho, deformed.rho, rtol=1e-14)
    np.testing.assert_allclose(dhat, deformed.dhat, rtol=1e-14)
    np.testing.assert_allclose(nuhat, deformed.nuhat, rtol=1e-14)


def test_infinity_estimates_bracket(grid10):
    deformed = sphericalize(grid10, 1.0)
    est = deformed.infinity
    assert est.far_index == 9
    assert not est.fallback
    assert est.lower[9] == 0.0
    assert est.lower[0] == pytest.approx(
        canonical_density(grid10, 1, 1.0).integral(0.0, 9.0), rel=1e-14
    )
    assert np.all(est.lower <= est.upper * (1 + 1e-9))
    assert np.all(np.diff(est.lower) < 0)


def test_infinity_estimates_fall_back_to_two_points(grid10):
    deformed = sphericalize(grid10, 1.0)
    with pytest.warns(EmptyFarAnnulusWarning):
        est = infinity_estimates(deformed, kappa=1.0)
    assert est.fallback
    assert est.spread == deformed.dhat[9, 8]


def test_infinity_estimates_need_sphericalization(cantor):
    with pytest.raises(PreconditionError):
        infinity_estimates(flatten(cantor(3), 1.0))


def test_product_metric_collapses_through_far_points(family):
    space = family("grid", n=64)
    report = product_deform_demo(space, PowerDensity(2.0))
    assert (report.z1, report.z2) == (0, 1)
    assert report.direct == pytest.approx(0.25)
    assert report.collapses
    assert report.d_tilde <= report.min_two_hop
    assert all(row.two_hop <= row.bound * (1 + 1e-12) for row in report.far_points)


def test_product_metric_without_collapse(family):
    report = product_deform_demo(family("grid", n=64), PowerDensity(0.5))
    assert not report.collapses
    assert report.d_tilde == pytest.approx(report.direct)


def test_product_demo_needs_an_unbounded_truncation(cantor):
    with pytest.raises(PreconditionError):
        product_deform_demo(cantor(3), PowerDensity(2.0))


def test_ledger_on_sphericalized_grid(grid10):
    ledger = compute_ledger(sphericalize(grid10, 1.0))
    assert ledger.annulus == (1.0, 2.25)
    assert ledger.anchors == 2
    assert ledger.excluded == 72
    assert ledger.C_nu == 3.0
    assert 0 < ledger.value("c0") < 1.0
    assert ledger.c1.value <= ledger.C1.value
    assert ledger.c2.value <= 1.0 <= ledger.C2.value
    assert ledger.C_prime.value >= 3.0 * ledger.C1.value


def test_ledger_witnesses_are_source_indices(cantor):
    ledger = compute_ledger(flatten(cantor(3), 1.0))
    witnesses = [ledger.a1.witness, ledger.c1.witness, ledger.C2.witness]
    for witness in filter(None, witnesses):
        assert 0 not in witness


def test_ledger_needs_a_canonical_density(grid10):
    with pytest.raises(PreconditionError):
        compute_ledger(deform(grid10, PowerDensity(1.0), 1.0))
