import threading

import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import HalfspaceIntersection

from agslice import agpoly, rootsys
from agslice.agpoly import Kind
from agslice.errors import (DegenerateInput, NoGenericPoint, NotGenericFace, RankTooLarge,
                            UnboundedPolytope)

F = Fraction
Q = np.pi / 4
RANK2 = ["sl 3 R", "sp 2 R", "so 2 3", "su 2 2", "so 2 2", "su 2 3"]


def poly(label):
    return agpoly.build(rootsys.restricted_root_data(label))


def scipy_vertices(P):
    """Oracle: qhull halfspace intersection in intrinsic coordinates."""
    R = P.intrinsic_roots()
    hs = np.hstack([R, -np.full((len(R), 1), agpoly.HALF_PI)])
    hi = HalfspaceIntersection(hs, np.zeros(P.rank))
    pts = []
    for v in hi.intersections:
        if not any(np.linalg.norm(v - q) < 1e-9 for q in pts):
            pts.append(v)
    return np.array([P.to_ambient(y) for y in pts])


def same_set(a, b, tol=1e-9):
    return len(a) == len(b) and all(min(np.linalg.norm(x - y) for y in b) < tol for x in a)


def test_a1_interval():
    P = poly("sl 2 R")
    V = agpoly.vertices(P)
    assert np.allclose(V, [[-Q, Q], [Q, -Q]], atol=1e-15, rtol=0)


def test_a2_hexagon():
    P = poly("sl 3 R")
    V = agpoly.vertices(P)
    assert len(V) == 6
    assert any(np.allclose(v, [np.pi / 3, -np.pi / 6, -np.pi / 6]) for v in V)


@pytest.mark.parametrize("label", RANK2 + ["sl 4 R", "sp 3 R", "so 3 3"])
def test_vertices_match_qhull(label):
    P = poly(label)
    assert same_set(agpoly.vertices(P), scipy_vertices(P))


def test_c2_square():
    V = agpoly.vertices(poly("sp 2 R"))
    assert same_set(V, np.array([[a, b] for a in (Q, -Q) for b in (Q, -Q)]))


@pytest.mark.parametrize("label", RANK2)
def test_vertices_weyl_closed(label):
    P = poly(label)
    V = agpoly.vertices(P)
    for w in P.rrs.weyl_group():
        assert same_set(V, V @ w.as_array().T)


def test_rank_too_large():
    with pytest.raises(RankTooLarge):
        agpoly.vertices(poly("sl 5 R"))


def test_unbounded():
    rrs = rootsys.restricted_root_data("sl 3 R")
    keep = tuple(r for r in rrs.roots if r[2] == 0)
    sub = rootsys.RestrictedRootSystem(rrs.label, 2, keep, {r: 1 for r in keep})
    with pytest.raises(UnboundedPolytope):
        agpoly.build(sub)


def test_json_shape():
    import json
    d = json.loads(poly("sl 2 R").to_json())
    assert d["halfspaces"][0][1] == 1.5707963267948966
    assert len(d["vertices"]) == 2


# -- classification ----------------------------------------------------------

def test_classify_examples():
    P = poly("sl 3 R")
    assert agpoly.contains(P, [0, 0, 0]).kind is Kind.INTERIOR
    assert agpoly.contains(P, [np.pi / 3, -np.pi / 6, -np.pi / 6]).kind is Kind.EDGE
    assert agpoly.contains(P, [1.0, -1.0, 0.0]).kind is Kind.OUTSIDE
    face = agpoly.contains(P, [np.pi / 4, -np.pi / 4, 0])
    assert face.kind is Kind.GENERIC_FACE
    assert face.active_roots == {(F(1), F(-1), F(0)), (F(-1), F(1), F(0))}


def test_point_off_subspace():
    with pytest.raises(DegenerateInput):
        agpoly.contains(poly("sl 3 R"), [1, 0, 0])


def test_facets_skip_short_roots():
    assert sorted(agpoly.facets(poly("su 1 2"))) == [(F(-2),), (F(2),)]
    sp = agpoly.facets(poly("sp 2 R"))
    assert all(sum(abs(a) for a in r) == 2 and max(abs(a) for a in r) == 2 for r in sp)
    so = agpoly.facets(poly("so 2 3"))
    assert len(so) == 4 and all(sum(abs(a) for a in r) == 2 for r in so)


def test_short_root_has_no_generic_point():
    with pytest.raises(NoGenericPoint):
        agpoly.sample_boundary_generic(poly("sp 2 R"), (F(1), F(1)), seed=0)


def _interior_point(P, coords):
    """Scale a direction into the body; tiny directions map to the origin."""
    y = np.array(coords[: P.rank])
    top = np.abs(P.intrinsic_roots() @ y).max()
    if top < 1e-9:
        return P.to_ambient(0 * y)
    return P.to_ambient(y * (agpoly.HALF_PI * 0.98 / top) * min(1.0, np.linalg.norm(y)))


coords = st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3)


@given(st.sampled_from(RANK2 + ["sl 4 R"]), coords, st.floats(-1.5, 1.5))
def test_weyl_and_central_invariance(label, c, scale):
    P = poly(label)
    A = P.to_ambient(np.array(c[: P.rank]) * scale)
    kind = agpoly.contains(P, A).kind
    assert agpoly.contains(P, -A).kind is kind
    for g in P.rrs.weyl_generators():
        assert agpoly.contains(P, np.array(g, dtype=float) @ A).kind is kind


@given(st.sampled_from(RANK2), coords, coords, st.floats(0, 1))
def test_convexity(label, c1, c2, mu):
    P = poly(label)
    A, B = _interior_point(P, c1), _interior_point(P, c2)
    assert agpoly.contains(P, A).kind is Kind.INTERIOR
    assert agpoly.contains(P, mu * A + (1 - mu) * B).kind is Kind.INTERIOR


@pytest.mark.parametrize("label", RANK2)
def test_vertex_duality(label):
    P = poly(label)
    R = P.rrs.root_array()
    for v in agpoly.vertices(P):
        active = R[np.abs(R @ v - agpoly.HALF_PI) < 1e-9]
        assert np.linalg.matrix_rank(active @ P.basis.T) == P.rank
        for n in active:
            assert agpoly.contains(P, v + 1e-6 * n).kind is Kind.OUTSIDE


# -- sampling and segments ---------------------------------------------------

@pytest.mark.parametrize("label", ["sl 2 R", "sl 3 R", "su 1 2", "sp 2 R", "so 2 3", "sl 4 R"])
def test_samples_are_generic(label):
    P = poly(label)
    for r in agpoly.facets(P):
        A = agpoly.sample_boundary_generic(P, r, seed=11)
        assert agpoly.is_boundary_generic(P, A, r)
        assert np.array_equal(A, agpoly.sample_boundary_generic(P, r, seed=11))


def test_segment_endpoints_and_interior():
    P = poly("sl 3 R")
    r = (F(1), F(-1), F(0))
    A = agpoly.sample_boundary_generic(P, r, seed=3)
    seg = agpoly.slice_segment(P, A, r, n=50)
    assert len(seg) == 52
    assert all(s.kind is Kind.INTERIOR for s in seg[1:-1])
    assert seg[0].kind is Kind.GENERIC_FACE and seg[-1].kind is Kind.GENERIC_FACE
    assert np.allclose(seg[-1].point, P.rrs.reflect(r, A))


def test_segment_rejects_edge():
    P = poly("sl 3 R")
    with pytest.raises(NotGenericFace):
        agpoly.slice_segment(P, [np.pi / 3, -np.pi / 6, -np.pi / 6], (F(1), F(0), F(-1)))


def test_concurrent_vertices():
    P = poly("so 3 3")
    out = []
    threads = [threading.Thread(target=lambda: out.append(P.vertices)) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(o is out[0] for o in out)
