"""sl2-triples inside boundary centralizers and the three-dimensional slices they generate.

At a boundary-generic point ``A`` with ``lam(A) = pi/2`` the centralizer
``l`` of ``eta(exp iA)`` splits as ``h + q``. The nilpotent ``E`` is taken in
the real span of ``i h_lam`` and ``i X_lam`` (``X_lam`` a tau-fixed root
vector for the pair ``+-lam``), with coefficients fixed by ``tr(E^2) = 0``:
``E = i(h_lam/2 + beta X_lam)``, ``beta > 0``. With that normalization the
completed triple satisfies ``E - F = i h_lam``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import least_squares

from . import agpoly, jordan
from .agpoly import AGPolytope, Kind
from .errors import (CertificateFailure, NotGenericFace, NotNilpotent, NoTripleFound, SearchFailed)
from .matrealize import (RealFormRealization, eta, fixed_subalgebra, real_span,
                         restricted_root_decomposition)
from .rootsys import coroot

BRACKET_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Sl2Triple:
    E: np.ndarray
    H: np.ndarray
    F: np.ndarray
    root: tuple | None = None
    h_lambda: np.ndarray | None = None
    sigma_types: dict = field(default_factory=dict)

    def bracket_residuals(self) -> dict:
        def br(a, b):
            return a @ b - b @ a
        E, H, F = self.E, self.H, self.F
        return {
            "[E,F] = H": float(np.linalg.norm(br(E, F) - H)),
            "[H,E] = 2E": float(np.linalg.norm(br(H, E) - 2 * E)),
            "[H,F] = -2F": float(np.linalg.norm(br(H, F) + 2 * F)),
        }

    def scaled(self, c: float) -> "Sl2Triple":
        return Sl2Triple(c * self.E, self.H, self.F / c, self.root, self.h_lambda, dict(self.sigma_types))

    def conjugated(self, g) -> "Sl2Triple":
        gi = np.linalg.inv(g)
        return Sl2Triple(g @ self.E @ gi, g @ self.H @ gi, g @ self.F @ gi, self.root,
                         self.h_lambda, dict(self.sigma_types))

    @property
    def e(self):
        return 1j * self.E

    @property
    def f(self):
        return -1j * self.F


def _is_nilpotent(E, tol=1e-10) -> bool:
    n = E.shape[0]
    nE = np.linalg.norm(E, 2)
    if nE == 0:
        return False
    return np.linalg.norm(np.linalg.matrix_power(E / nE, n), 2) < tol


def jacobson_morozov(R: RealFormRealization, h_basis: np.ndarray, q_basis: np.ndarray, E,
                     tol: float = BRACKET_TOL) -> Sl2Triple:
    """Complete the nilpotent ``E`` in ``q`` to ``(E, H, F)`` with ``H`` in ``h`` and ``F`` in ``q``.

    ``h_basis`` and ``q_basis`` are realified column bases (sigma = +1 and -1
    parts of a sigma-stable subalgebra). ``H = [E, W]`` is the least-norm
    solution of ``[[E, W], E] = 2E`` over ``W`` in ``q``; ``F`` is then the
    unique element of ``q`` with ``[E,F] = H`` and ``[H,F] = -2F``.
    """
    E = np.asarray(E, dtype=complex)
    if not _is_nilpotent(E):
        raise NotNilpotent("E is not a nonzero nilpotent matrix")
    vE = R.vec(E)
    if q_basis.shape[1] == 0 or np.linalg.norm(vE - q_basis @ (q_basis.T @ vE)) > 1e-9 * np.linalg.norm(vE):
        raise NoTripleFound("E is not in the sigma = -1 part of the subalgebra")
    adE = R.ad_real(E)
    lhs = -adE @ adE @ q_basis
    w, *_ = np.linalg.lstsq(lhs, 2 * vE, rcond=None)
    if np.linalg.norm(lhs @ w - 2 * vE) > tol * max(1.0, np.linalg.norm(vE)):
        raise NoTripleFound("no H in [E, q] with [H, E] = 2E")
    vH = adE @ (q_basis @ w)
    vH = h_basis @ (h_basis.T @ vH)
    adH = R.ad_real_vec(vH)
    D = 2 * R.dim
    sys = np.vstack([adE @ q_basis, (adH + 2 * np.eye(D)) @ q_basis])
    rhs = np.concatenate([vH, np.zeros(D)])
    y, *_ = np.linalg.lstsq(sys, rhs, rcond=None)
    if np.linalg.norm(sys @ y - rhs) > tol * max(1.0, np.linalg.norm(vH)):
        raise NoTripleFound("no F completing the triple")
    triple = Sl2Triple(E, R.mat(vH), R.mat(q_basis @ y))
    res = triple.bracket_residuals()
    scale = max(1.0, np.linalg.norm(triple.F), np.linalg.norm(E))
    if max(res.values()) > tol * scale ** 2:
        raise NoTripleFound(f"triple brackets fail: {res}")
    types = {
        "sigma(E) = -E": float(np.linalg.norm(R.sigma(triple.E) + triple.E)),
        "sigma(F) = -F": float(np.linalg.norm(R.sigma(triple.F) + triple.F)),
        "sigma(H) = H": float(np.linalg.norm(R.sigma(triple.H) - triple.H)),
    }
    return Sl2Triple(triple.E, triple.H, triple.F, sigma_types=types)


def nilpotent_in_rank_one_span(R: RealFormRealization, root, j: int = 0) -> np.ndarray:
    """``E = i(h/2 + beta X)`` with ``tr(E^2) = 0`` and ``beta > 0``."""
    dec = restricted_root_decomposition(R)
    tb = dec.tau_stable_basis(root)
    h = R.coroot_matrix(root)
    X = R.element(tb.X[:, j])
    th = np.trace(h @ h).real
    tx = np.trace(X @ X).real
    if tx >= 0:
        raise NoTripleFound("root vector combination has nonnegative trace square")
    beta = 0.5 * np.sqrt(th / -tx)
    return 1j * (0.5 * h + beta * X)


@dataclass(frozen=True, eq=False)
class SliceResult:
    triple: Sl2Triple
    A: np.ndarray
    root: tuple
    x: np.ndarray                # exp(E) exp(iA)
    semisimple_part: np.ndarray  # eta(exp iA)
    h_basis: np.ndarray
    q_basis: np.ndarray
    segment: list
    certificates: dict
    coroot_coefficient: float

    def to_dict(self) -> dict:
        from .serialize import matrix_to_json
        return {
            "A": [float(a) for a in self.A],
            "root": [str(a) for a in self.root],
            "E": matrix_to_json(self.triple.E),
            "H": matrix_to_json(self.triple.H),
            "F": matrix_to_json(self.triple.F),
            "certificates": dict(self.certificates),
            "coroot_coefficient": self.coroot_coefficient,
            "segment_samples": [s.to_dict() for s in self.segment],
        }


def construct_slice(R: RealFormRealization, P: AGPolytope, A, root, tol: float = 1e-8,
                    n_segment: int = 50) -> SliceResult:
    """Triple, base point and certificates for the slice through ``exp(iA)``."""
    A = np.asarray(A, dtype=float)
    root = tuple(root)
    st = agpoly.contains(P, A)
    if st.kind is not Kind.GENERIC_FACE or root not in st.active_roots \
            or abs(P.rrs.evaluate(root, A) - agpoly.HALF_PI) > 1e-9:
        raise NotGenericFace(f"A is not on the generic face where {[str(a) for a in root]} = pi/2")
    a_exp = sla.expm(1j * R.a_matrix(A))
    s = eta(R, a_exp).matrix
    fx = fixed_subalgebra(R, s)
    if fx.h is None:
        raise CertificateFailure("centralizer split", detail="eta(exp iA) is not sigma-compatible")
    E = nilpotent_in_rank_one_span(R, root)
    triple = jacobson_morozov(R, fx.h, fx.q, E)
    h_vec = np.array([float(c) for c in coroot(root)])
    triple = Sl2Triple(triple.E, triple.H, triple.F, root, h_vec, triple.sigma_types)

    certs = {}
    # (i) E - F on the line through i h_lambda, with coefficient 1
    Z = R.vec(triple.E - triple.F)
    ih = R.vec(1j * R.a_matrix(h_vec))
    c = float(Z @ ih / (ih @ ih))
    certs["E - F in R i h_lambda"] = float(np.linalg.norm(Z - c * ih))
    certs["coefficient = 1"] = abs(c - 1.0)
    # (ii) the segment A - t h_lambda stays interior and ends at the reflection
    try:
        segment = agpoly.slice_segment(P, A, root, h_vec, n=n_segment)
        certs["segment containment"] = 0.0
    except Exception as exc:
        raise CertificateFailure("segment containment", detail=str(exc)) from exc
    # (iii) the base point exp(E) exp(iA) has non-semisimple eta
    x = sla.expm(triple.E) @ a_exp
    jp = jordan.multiplicative_jordan(eta(R, x))
    certs["unipotent part nontrivial"] = jp.unipotent_defect
    for name, err in certs.items():
        if name == "unipotent part nontrivial":
            if not err > jordan.SEMISIMPLE_TOL:
                raise CertificateFailure(name, error=err)
        elif not err <= tol:
            raise CertificateFailure(name, error=err)
    for name, err in triple.sigma_types.items():
        if not err <= tol:
            raise CertificateFailure(name, error=err)
    return SliceResult(triple, A, root, x, s, fx.h, fx.q, segment, certs, c)


@dataclass(frozen=True)
class IsotropyReport:
    ok: bool
    fixed_errors: tuple
    moved_by: float


def isotropy_dimension_check(R: RealFormRealization, triple: Sl2Triple, A, ts=(0.3, 1.0, -2.0),
                             generator=None, tol: float = 1e-8) -> IsotropyReport:
    """``exp(tG)`` fixes ``eta(exp iA)`` for ``G = H`` (default) while ``exp(E)`` moves it."""
    G = triple.H if generator is None else np.asarray(generator)
    a_exp = sla.expm(1j * R.a_matrix(np.asarray(A, dtype=float)))
    base = eta(R, a_exp).matrix
    scale = max(1.0, np.linalg.norm(base, 2))
    errs = tuple(float(np.linalg.norm(eta(R, sla.expm(t * G) @ a_exp).matrix - base, 2) / scale)
                 for t in ts)
    moved = float(np.linalg.norm(eta(R, sla.expm(triple.E) @ a_exp).matrix - base, 2) / scale)
    ok = all(e < tol for e in errs) and moved > 1e3 * tol
    return IsotropyReport(bool(ok), errs, moved)


@dataclass(frozen=True)
class ConjugationReport:
    ok: bool
    residual: float
    coefficients: tuple


def _ia_projector(R: RealFormRealization) -> np.ndarray:
    dec = restricted_root_decomposition(R)
    Q = real_span(R, dec.a_space, imaginary=True)
    return Q


def verify_conjugation_lemma(R: RealFormRealization, triple: Sl2Triple, h_basis: np.ndarray,
                             tol: float = 1e-6, max_nfev: int = 400) -> ConjugationReport:
    """Find ``h = exp(sum c_k H_k)``, ``H_k`` in ``h_basis``, with ``Ad(h)(E - F)`` in ``i a``.

    Returns at once when ``E - F`` already lies in ``i a``; otherwise runs a
    bounded least-squares search from ``c = 0``. Raises :class:`SearchFailed`
    when the residual stays above ``tol``.
    """
    Q = _ia_projector(R)
    Z = triple.E - triple.F

    def resid_vec(Zm):
        v = R.vec(Zm)
        return v - Q @ (Q.T @ v)

    r0 = float(np.linalg.norm(resid_vec(Z)))
    k = h_basis.shape[1]
    if r0 < tol:
        return ConjugationReport(True, r0, tuple([0.0] * k))
    mats = [R.mat(h_basis[:, i]) for i in range(k)]

    def fun(c):
        g = sla.expm(np.einsum("k,kij->ij", c, np.array(mats)))
        return resid_vec(g @ Z @ np.linalg.inv(g))

    sol = least_squares(fun, np.zeros(k), max_nfev=max_nfev, xtol=1e-14, ftol=1e-14, gtol=1e-14)
    res = float(np.linalg.norm(sol.fun))
    if res >= tol:
        raise SearchFailed(f"conjugation search stopped at residual {res:.2e}")
    return ConjugationReport(True, res, tuple(float(c) for c in sol.x))
