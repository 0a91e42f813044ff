"""The polytope ``{A : |lam(A)| < pi/2 for every restricted root lam}``.

Points are given in the ambient diagonal coordinates of the root system
(see :mod:`agslice.rootsys`). Internally the body lives on the subspace and
is handled in orthonormal *intrinsic* coordinates ``y = B @ A``.
"""

from __future__ import annotations

import enum
import itertools
import json
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (DegenerateInput, NoGenericPoint, NotGenericFace, RankTooLarge,
                     SegmentEscapes, UnboundedPolytope)
from .rootsys import RestrictedRootSystem, coroot, reflection_matrix

HALF_PI = np.pi / 2
DEFAULT_TOL = 1e-9
GENERIC_MARGIN = 1e-3


class Kind(str, enum.Enum):
    INTERIOR = "Interior"
    GENERIC_FACE = "GenericFace"
    EDGE = "Edge"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class BoundaryStratum:
    point: tuple
    active_roots: frozenset
    kind: Kind

    @property
    def is_boundary(self) -> bool:
        return self.kind in (Kind.GENERIC_FACE, Kind.EDGE)

    def to_dict(self):
        return {
            "point": list(self.point),
            "kind": self.kind.value,
            "active_roots": sorted([str(a) for a in r] for r in self.active_roots),
        }


@dataclass
class AGPolytope:
    rrs: RestrictedRootSystem
    halfspaces: tuple
    _vertices: np.ndarray | None = field(default=None, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def rank(self) -> int:
        return self.rrs.rank

    @property
    def roots(self) -> tuple:
        return self.rrs.roots

    @property
    def basis(self) -> np.ndarray:
        return self.rrs.subspace_basis

    def root_values(self, point) -> np.ndarray:
        return self.rrs.root_array() @ np.asarray(point, dtype=float)

    def intrinsic_roots(self) -> np.ndarray:
        return self.rrs.root_array() @ self.basis.T

    def to_ambient(self, y) -> np.ndarray:
        return self.basis.T @ np.asarray(y, dtype=float)

    def to_intrinsic(self, point) -> np.ndarray:
        return self.basis @ np.asarray(point, dtype=float)

    @property
    def vertices(self) -> np.ndarray:
        # memoized; readers see either nothing or the finished array
        if self._vertices is None:
            with self._lock:
                if self._vertices is None:
                    self._vertices = _enumerate_vertices(self)
        return self._vertices

    def to_dict(self) -> dict:
        out = {
            "label": self.rrs.label.to_dict(),
            "halfspaces": [[[float(a) for a in r], HALF_PI] for r, _ in self.halfspaces],
        }
        if self.rank <= 3:
            out["vertices"] = [list(map(float, v)) for v in self.vertices]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def build(rrs: RestrictedRootSystem) -> AGPolytope:
    """Halfspace representation, one bound ``lam(A) < pi/2`` per root."""
    poly = AGPolytope(rrs, tuple((r, HALF_PI) for r in rrs.roots))
    if np.linalg.matrix_rank(poly.intrinsic_roots()) < rrs.rank:
        raise UnboundedPolytope(f"roots of {rrs.label} do not span the dual space")
    return poly


def contains(P: AGPolytope, point, tol: float = DEFAULT_TOL) -> BoundaryStratum:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    point = np.asarray(point, dtype=float)
    if point.shape != (P.rrs.ambient_dim,) or not P.rrs.in_subspace(point):
        raise DegenerateInput(f"point {point} is not in the abelian subspace of {P.rrs.label}")
    vals = P.root_values(point)
    top = np.max(np.abs(vals))
    if top < HALF_PI - tol:
        return BoundaryStratum(tuple(float(a) for a in point), frozenset(), Kind.INTERIOR)
    active = frozenset(r for r, v in zip(P.roots, vals) if abs(v) >= HALF_PI - tol)
    if top > HALF_PI + tol:
        return BoundaryStratum(tuple(float(a) for a in point), active, Kind.OUTSIDE)
    kind = Kind.GENERIC_FACE if len(active) == 2 else Kind.EDGE
    return BoundaryStratum(tuple(float(a) for a in point), active, kind)


def distance_to_half_pi_lattice(value: float) -> float:
    r = np.mod(value, HALF_PI)
    return float(min(r, HALF_PI - r))


def is_boundary_generic(P: AGPolytope, point, root=None, margin: float = GENERIC_MARGIN,
                        tol: float = DEFAULT_TOL) -> bool:
    """One active pair ``+-lam`` and every other root value away from ``(pi/2) Z``."""
    st = contains(P, point, tol)
    if st.kind is not Kind.GENERIC_FACE:
        return False
    if root is not None and tuple(root) not in st.active_roots:
        return False
    vals = P.root_values(point)
    return all(distance_to_half_pi_lattice(v) > margin
               for r, v in zip(P.roots, vals) if r not in st.active_roots)


def _face_lp(P: AGPolytope, root):
    """Max slack ``d`` with ``root = pi/2`` and ``mu <= pi/2 - d`` for the rest."""
    R = P.intrinsic_roots()
    lam = np.array(root, dtype=float) @ P.basis.T
    others = [i for i, r in enumerate(P.roots) if r != tuple(root) and r != tuple(-a for a in root)]
    k = P.rank
    c = np.zeros(k + 1)
    c[-1] = -1.0
    if others:
        A_ub = np.hstack([R[others], np.ones((len(others), 1))])
        b_ub = np.full(len(others), HALF_PI)
    else:
        A_ub, b_ub = None, None
    A_eq = np.hstack([lam, [0.0]])[None, :]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[HALF_PI],
                  bounds=[(None, None)] * k + [(None, 1.0)], method="highs")
    if res.status != 0:
        return None, -np.inf
    return res.x[:k], float(res.x[-1])


def facets(P: AGPolytope, slack_tol: float = 1e-9) -> list:
    """Roots whose hyperplane meets the closed body in a codimension-one face."""
    out = []
    for r in P.roots:
        _, slack = _face_lp(P, r)
        if slack > slack_tol:
            out.append(r)
    return out


def sample_boundary_generic(P: AGPolytope, root, seed: int = 0, margin: float = GENERIC_MARGIN,
                            max_tries: int = 1000) -> np.ndarray:
    """Random boundary-generic point on the face ``root = pi/2``.

    Deterministic given ``seed``. Raises :class:`NoGenericPoint` if the face
    is lower dimensional or rejection sampling exceeds ``max_tries``.
    """
    root = tuple(root)
    if root not in P.roots:
        raise DegenerateInput(f"{root} is not a root")
    center, slack = _face_lp(P, root)
    if center is None or slack <= 1e-9:
        raise NoGenericPoint(f"the hyperplane of {[str(a) for a in root]} does not meet the body in a face")
    lam = np.array(root, dtype=float) @ P.basis.T
    R = P.intrinsic_roots()
    others = [i for i, r in enumerate(P.roots) if r != root and r != tuple(-a for a in root)]
    ker = _null_space_row(lam)
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        if ker.shape[1] == 0:
            y = center
        else:
            u = ker @ rng.standard_normal(ker.shape[1])
            u /= np.linalg.norm(u)
            rates = R[others] @ u
            room = HALF_PI - R[others] @ center
            steps = [rm / rt for rm, rt in zip(room, rates) if rt > 1e-14]
            r_max = min(steps) if steps else 1.0
            y = center + rng.uniform(0.0, 0.95) * r_max * u
        A = P.to_ambient(y)
        if is_boundary_generic(P, A, root, margin):
            return A
        if ker.shape[1] == 0:
            break
    raise NoGenericPoint(f"no boundary-generic point found on face {[str(a) for a in root]}")


def _null_space_row(row: np.ndarray) -> np.ndarray:
    _, s, vt = np.linalg.svd(row[None, :])
    return vt[1:].T


def slice_segment(P: AGPolytope, A, root, h=None, n: int = 50, tol: float = DEFAULT_TOL) -> list:
    """Strata along ``A - t h`` for ``t = 0``, ``n`` interior samples and ``t = pi/2``.

    ``A`` must be a generic face point with ``root(A) = pi/2`` and
    ``root(h) = 2``. The last endpoint must be the reflection of ``A``.
    """
    A = np.asarray(A, dtype=float)
    root = tuple(root)
    st = contains(P, A, tol)
    if st.kind is not Kind.GENERIC_FACE or root not in st.active_roots \
            or abs(P.rrs.evaluate(root, A) - HALF_PI) > tol:
        raise NotGenericFace(f"{A} is not on the generic face of {[str(a) for a in root]}")
    if h is None:
        h = np.array(coroot(root), dtype=float)
    h = np.asarray(h, dtype=float)
    ts = [0.0] + [HALF_PI * k / (n + 1) for k in range(1, n + 1)] + [HALF_PI]
    strata = [contains(P, A - t * h, tol) for t in ts]
    for t, s in zip(ts[1:-1], strata[1:-1]):
        if s.kind is not Kind.INTERIOR:
            raise SegmentEscapes(f"sample t={t} is {s.kind.value}; check the coroot normalization")
    if not strata[-1].is_boundary:
        raise SegmentEscapes("the far endpoint of the segment is not a boundary point")
    reflected = np.array(reflection_matrix(root), dtype=float) @ A
    if np.linalg.norm(np.array(strata[-1].point) - reflected) > 1e-9:
        raise SegmentEscapes("the far endpoint is not the reflection of A")
    return strata


def _enumerate_vertices(P: AGPolytope) -> np.ndarray:
    if P.rank > 3:
        raise RankTooLarge("vertex enumeration is limited to rank <= 3")
    R = P.intrinsic_roots()
    cands = []
    for subset in itertools.combinations(range(len(R)), P.rank):
        M = R[list(subset)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        y = np.linalg.solve(M, np.full(P.rank, HALF_PI))
        if np.max(np.abs(R @ y)) <= HALF_PI + 1e-9:
            if not any(np.linalg.norm(y - c) < 1e-9 for c in cands):
                cands.append(y)
    pts = np.array([P.to_ambient(y) for y in cands])
    order = np.lexsort(np.round(pts, 12).T[::-1])
    return pts[order]


def vertices(P: AGPolytope) -> np.ndarray:
    """Extreme points of the closed body, ambient coordinates (rank <= 3)."""
    return P.vertices


def polygon_2d(P: AGPolytope) -> np.ndarray:
    """Rank-2 vertices as intrinsic planar coordinates, in counterclockwise order."""
    if P.rank != 2:
        raise RankTooLarge("polygon output needs rank 2")
    ys = np.array([P.to_intrinsic(v) for v in P.vertices])
    ang = np.arctan2(ys[:, 1], ys[:, 0])
    return ys[np.argsort(ang)]
