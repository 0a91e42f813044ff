import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from agslice import sl2model as sm
from agslice.errors import DegenerateInput, OutOfDisk


def hyperboloid_distance(z, w):
    """Independent closed form via cosh d = 1 + 2|z-w|^2/((1-|z|^2)(1-|w|^2))."""
    return float(np.arccosh(1 + 2 * abs(z - w) ** 2 / ((1 - abs(z) ** 2) * (1 - abs(w) ** 2))))


def radial_integral(r):
    return quad(lambda t: 2 / (1 - t * t), 0, r, epsabs=1e-13, epsrel=1e-13)[0]


disc = st.builds(lambda r, a: r * np.exp(1j * a), st.floats(0, 0.95), st.floats(0, 2 * np.pi))


def test_distance_examples():
    assert sm.poincare_distance(0.3j, 0.3j) == 0.0
    assert abs(sm.poincare_distance(-0.5, 0.5) - 2 * np.arctanh(0.8)) < 1e-12
    assert abs(sm.poincare_distance(-0.5, 0.5) - 2.19722) < 1e-5
    for r in (0.1, 0.5, 0.9):
        assert abs(sm.poincare_distance(0, r) - radial_integral(r)) < 1e-10


@given(disc, disc)
def test_distance_matches_hyperboloid(z, w):
    assert abs(sm.poincare_distance(z, w) - hyperboloid_distance(z, w)) < 1e-8 * (1 + hyperboloid_distance(z, w))


def test_distance_outside_disc():
    with pytest.raises(OutOfDisk):
        sm.poincare_distance(1.0, 0.0)


@given(st.integers(0, 10_000), disc, disc)
def test_orbit_parameter_invariant(seed, z, w):
    p = sm.BidiskPoint.in_discs(z, w)
    g = sm.random_sl2(np.random.default_rng(seed), 0.5)
    q = sm.mobius_act(g, p)
    assert q.chart == "D0xD0"
    if not p.on_diagonal:
        assert abs(sm.orbit_parameter(p) - sm.orbit_parameter(q)) < 1e-10 * (1 + sm.orbit_parameter(p))


def test_action_basics(rng):
    p = sm.BidiskPoint.in_discs(0.2 + 0.1j, -0.4)
    q = sm.mobius_act(np.eye(2), p)
    assert q.z.same_as(p.z) and q.w.same_as(p.w)
    origin_inf = sm.BidiskPoint(sm.SpherePoint.finite(0), sm.SpherePoint.infinity())
    assert origin_inf.chart == "D0xDinf"
    r = sm.mobius_act(sm.rotation(0.77), origin_inf)
    assert r.z.same_as(origin_inf.z) and r.w.same_as(origin_inf.w)
    sig = sm.BidiskPoint.in_discs(-0.5, 0.5)
    for _ in range(10):
        assert sm.mobius_act(sm.random_sl2(rng), sig).chart == "D0xD0"
    with pytest.raises(DegenerateInput):
        sm.mobius_act(2 * np.eye(2), sig)
    with pytest.raises(OutOfDisk):
        sm.BidiskPoint.in_discs(2.0, 0.0)


def test_sphere_charts():
    assert sm.SpherePoint.finite(3.0) == sm.SpherePoint("inf", complex(1 / 3))
    assert sm.SpherePoint.finite(1j).region == "S1"
    assert sm.SpherePoint.infinity().region == "Dinf"


def test_gap_examples():
    assert sm.supporting_curve_gap(0.5, 0) == 0.0
    g = sm.supporting_curve_gap(0.5, 0.1)
    assert g == pytest.approx(0.036367644170875124, abs=1e-14)
    oracle = hyperboloid_distance(-0.4, 0.6) - hyperboloid_distance(-0.5, 0.5)
    assert abs(g - oracle) < 1e-12
    for y in (0.01, -0.05, 0.2):
        assert sm.supporting_curve_gap(0.5, 1j * y) > 0
    with pytest.raises(OutOfDisk):
        sm.supporting_curve_gap(0.5, 0.6)
    with pytest.raises(OutOfDisk):
        sm.supporting_curve_gap(1.2, 0)


@given(st.floats(0.05, 0.9), st.floats(0.001, 0.09))
def test_gap_increases_along_real_axis(s, x):
    a, b = sm.supporting_curve_gap(s, x), sm.supporting_curve_gap(s, x * 1.1)
    assert 0 < a < b
    assert sm.supporting_curve_gap(s, -x) > 0


def test_gap_grid_summary():
    grid = sm.gap_grid()
    summ = grid.summary()
    assert summ["points"] + summ["skipped"] == 8 * 2821
    assert summ["nonnegative"] and summ["zero_only_at_origin"] and summ["monotone_along_real_axis"]
    assert summ["min_gap_away_from_origin"] > 1e-6


def test_ag_interval():
    rep = sm.ag_interval_check()
    assert rep["endpoint_error"] < 1e-15
    assert rep["midpoint"] == "Interior"
    assert rep["segment_interior_ok"]
    assert np.allclose(rep["segment_end"], -np.array(rep["segment_start"]))


def test_entire_curve_witness():
    w = sm.EntireCurveWitness()
    assert w.check([0, 0.5, 3 + 4j, 100j])
    p = w(0.3)
    assert p.chart == "D0xDinf" and not p.on_diagonal
