from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg as sla

from agslice import agpoly, sl2slice
from agslice import matrealize as mr
from agslice.errors import NoTripleFound, NotGenericFace, NotNilpotent

H2 = np.diag([1.0, -1.0])
E12 = np.array([[0.0, 1.0], [0.0, 0.0]])
E21 = E12.T
ALPHA = (Fraction(1), Fraction(-1))


def embed(M):
    out = np.zeros((3, 3), dtype=complex)
    out[:2, :2] = M
    return out


def bracket(a, b):
    return a @ b - b @ a


def check_triple(R, t, tol=1e-9):
    assert max(t.bracket_residuals().values()) < tol
    assert max(t.sigma_types.values()) < tol
    assert np.linalg.norm(np.linalg.matrix_power(t.E, R.n)) < tol


@pytest.fixture(scope="module")
def sl2_slice():
    R = mr.load_real_form("sl 2 R")
    P = agpoly.build(R.rrs)
    return R, P, sl2slice.construct_slice(R, P, [np.pi / 4, -np.pi / 4], ALPHA)


def test_sl2_example_triple(sl2_slice):
    R, _, sl = sl2_slice
    t = sl.triple
    assert np.allclose(t.E, 0.5j * (H2 + E12 - E21), atol=1e-12)
    assert np.allclose(t.H, -(E12 + E21), atol=1e-12)
    assert np.allclose(t.F, 0.5j * (-H2 + E12 - E21), atol=1e-12)
    assert np.allclose(t.E - t.F, 1j * H2, atol=1e-12)
    check_triple(R, t)
    assert np.allclose(t.e, 1j * t.E) and np.allclose(t.f, -1j * t.F)


def test_sl2_example_segment(sl2_slice):
    _, _, sl = sl2_slice
    assert np.allclose(sl.segment[0].point, [np.pi / 4, -np.pi / 4])
    assert np.allclose(sl.segment[-1].point, [-np.pi / 4, np.pi / 4])
    assert all(s.kind is agpoly.Kind.INTERIOR for s in sl.segment[1:-1])
    assert sl.segment[0].kind is agpoly.Kind.GENERIC_FACE
    assert sl.segment[-1].kind is agpoly.Kind.GENERIC_FACE


def test_scale_covariance(sl2_slice):
    R, _, sl = sl2_slice
    for c in (0.5, 3.0):
        t = sl2slice.jacobson_morozov(R, sl.h_basis, sl.q_basis, c * sl.triple.E)
        assert np.allclose(t.H, sl.triple.H, atol=1e-12)
        assert np.allclose(t.F, sl.triple.F / c, atol=1e-12)
        s = sl.triple.scaled(c)
        assert np.allclose(s.F, t.F) and np.allclose(s.E, t.E)


def test_jacobson_morozov_errors(sl2_slice):
    R, _, sl = sl2_slice
    with pytest.raises(NotNilpotent):
        sl2slice.jacobson_morozov(R, sl.h_basis, sl.q_basis, 1j * H2)
    with pytest.raises(NotNilpotent):
        sl2slice.jacobson_morozov(R, sl.h_basis, sl.q_basis, np.zeros((2, 2)))
    with pytest.raises(NoTripleFound):
        # nilpotent but in the wrong sigma-eigenspace
        sl2slice.jacobson_morozov(R, sl.h_basis, sl.q_basis, E12)


def test_embedded_triple_in_sl3():
    R = mr.load_real_form("sl 3 R")
    P = agpoly.build(R.rrs)
    c = 0.05
    A = [np.pi / 4 + c, -np.pi / 4 + c, -2 * c]
    root = (Fraction(1), Fraction(-1), Fraction(0))
    sl = sl2slice.construct_slice(R, P, A, root)
    E = embed(0.5j * (H2 + E12 - E21))
    t = sl2slice.jacobson_morozov(R, sl.h_basis, sl.q_basis, E)
    check_triple(R, t)
    assert np.allclose(t.H, embed(-(E12 + E21)), atol=1e-10)
    assert np.allclose(t.F, embed(0.5j * (-H2 + E12 - E21)), atol=1e-10)
    # the pipeline picks the same triple, supported on the upper-left block
    assert np.allclose(sl.triple.E, E, atol=1e-10)


def all_faces(label, seed=3):
    R = mr.load_real_form(label)
    P = agpoly.build(R.rrs)
    for r in agpoly.facets(P):
        A = agpoly.sample_boundary_generic(P, r, seed=seed, margin=0.05)
        yield R, P, A, r, sl2slice.construct_slice(R, P, A, r)


@pytest.mark.parametrize("label", ["sl 2 R", "sl 3 R", "su 1 2", "sp 2 R", "so 2 3", "su 1 3"])
def test_certificates_every_face(label):
    for R, P, A, r, sl in all_faces(label):
        check_triple(R, sl.triple)
        hl = R.coroot_matrix(r)
        assert np.linalg.norm(sl.triple.E - sl.triple.F - 1j * hl) < 1e-8
        assert abs(sl.coroot_coefficient - 1) < 1e-8
        seg = sl.segment
        assert all(s.kind is agpoly.Kind.INTERIOR for s in seg[1:-1])
        assert np.allclose(seg[-1].point, R.rrs.reflect(r, A), atol=1e-12)
        assert sl.certificates["unipotent part nontrivial"] > 1e-8


def test_sl3_root_plane():
    R = mr.load_real_form("sl 3 R")
    P = agpoly.build(R.rrs)
    root = (Fraction(1), Fraction(-1), Fraction(0))
    A = agpoly.sample_boundary_generic(P, root, seed=11)
    E = sl2slice.construct_slice(R, P, A, root).triple.E
    mask = np.zeros((3, 3), bool)
    mask[:2, :2] = True
    assert np.allclose(E[~mask], 0, atol=1e-10)


def test_edge_point_rejected():
    R = mr.load_real_form("sl 3 R")
    P = agpoly.build(R.rrs)
    edge = [np.pi / 3, -np.pi / 6, -np.pi / 6]
    assert agpoly.contains(P, edge).kind is agpoly.Kind.EDGE
    with pytest.raises(NotGenericFace):
        sl2slice.construct_slice(R, P, edge, (Fraction(1), Fraction(-1), Fraction(0)))


def test_isotropy(sl2_slice):
    R, _, sl = sl2_slice
    rep = sl2slice.isotropy_dimension_check(R, sl.triple, sl.A)
    assert rep.ok and max(rep.fixed_errors) < 1e-10 and rep.moved_by > 1e-3
    assert sl2slice.isotropy_dimension_check(R, sl.triple, sl.A, ts=(0.0,)).fixed_errors == (0.0,)
    assert not sl2slice.isotropy_dimension_check(R, sl.triple, sl.A, generator=sl.triple.E).ok


def test_conjugation_unperturbed(sl2_slice):
    R, _, sl = sl2_slice
    rep = sl2slice.verify_conjugation_lemma(R, sl.triple, sl.h_basis)
    assert rep.ok and rep.coefficients == (0.0,)


def test_conjugation_sl2_perturbed(sl2_slice):
    R, _, sl = sl2_slice
    G = R.mat(sl.h_basis[:, 0])
    rep = sl2slice.verify_conjugation_lemma(R, sl.triple.conjugated(sla.expm(0.1 * G)), sl.h_basis)
    assert rep.ok and rep.residual < 1e-6
    assert np.isclose(abs(rep.coefficients[0]), 0.1, atol=1e-8)


def test_conjugation_sl3_perturbed(rng):
    R = mr.load_real_form("sl 3 R")
    P = agpoly.build(R.rrs)
    root = (Fraction(1), Fraction(-1), Fraction(0))
    sl = sl2slice.construct_slice(R, P, agpoly.sample_boundary_generic(P, root, seed=5), root)
    c = 0.05 * rng.standard_normal(sl.h_basis.shape[1])
    g = sla.expm(R.mat(sl.h_basis @ c))
    rep = sl2slice.verify_conjugation_lemma(R, sl.triple.conjugated(g), sl.h_basis)
    assert rep.ok and rep.residual < 1e-6


def test_slice_json(sl2_slice):
    import json
    _, _, sl = sl2_slice
    d = json.loads(json.dumps(sl.to_dict()))
    assert d["certificates"]["coefficient = 1"] < 1e-8
