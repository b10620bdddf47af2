import json
import math

import pytest

from metricdeform.errors import PreconditionError
from metricdeform.verify import constant_density_duality, duality_report, run_statements

from conftest import line_space


@pytest.mark.parametrize("c, sigma", [(2.0, 1.0), (0.5, 2.0), (3.0, 0.5)])
def test_constant_density_round_trip(grid10, c, sigma):
    report = constant_density_duality(grid10, c, sigma)
    assert report.passed
    assert report.min_ratio == pytest.approx(4.0)
    assert report.max_ratio == pytest.approx(4.0)
    assert report.windows["measure"] == pytest.approx((1.0, 1.0))


def test_constant_round_trip_ignores_massless_points():
    space = line_space([0.0, 1.0, 3.0], mass=[0.0, 1.0, 2.0], punctured=True)
    assert constant_density_duality(space, 2.0, 1.0).passed


def test_sphere_then_flatten(grid10):
    report = duality_report(grid10, 1.0, "sphere-then-flatten")
    assert report.statement == "duality-sphere-then-flatten"
    assert 0 < report.min_ratio <= report.max_ratio < math.inf
    assert report.details["dropped_points"] >= 1
    assert f"dropped-infinity-proxy:{report.details['dropped_points']}" in report.flags
    for lo, hi in report.windows.values():
        assert 0 < lo <= hi < math.inf


def test_flatten_then_sphere(cantor):
    report = duality_report(cantor(4), 1.0, "flatten-then-sphere")
    assert 0 < report.min_ratio <= report.max_ratio < math.inf
    assert report.samples > 0
    assert report.details["dropped_points"] == 0
    assert all(0 not in pair for pair in (report.witness_min, report.witness_max))


def test_round_trip_preconditions(grid10, cantor):
    with pytest.raises(PreconditionError):
        duality_report(grid10, 1.0, "flatten-then-sphere")
    with pytest.raises(PreconditionError):
        duality_report(cantor(3), 1.0, "sphere-then-flatten")
    with pytest.raises(PreconditionError):
        duality_report(grid10, 1.0, "sideways")


def test_inapplicable_round_trip_is_reported(grid10):
    run = run_statements(grid10, ["duality"])
    by_name = {r.statement: r for r in run.reports}
    assert not by_name["duality-flatten-then-sphere"].applicable
    assert by_name["duality-sphere-then-flatten"].applicable
    assert by_name["duality-constant-density"].passed
    assert run.params["kind"] == "sphericalize"
    assert "timestamp" not in json.loads(run.to_json())
