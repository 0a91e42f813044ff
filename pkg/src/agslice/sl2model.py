"""SL(2,R) acting diagonally on P^1 x P^1 minus the diagonal, in disc coordinates.

A point of ``P^1`` is stored in one of two affine charts: ``"0"`` with
coordinate ``zeta`` (used when ``|zeta| <= 1``) or ``"inf"`` with coordinate
``1/zeta``. The unit disc ``D0`` is ``|zeta| < 1`` in chart ``"0"``, its
complement disc ``Dinf`` is ``|1/zeta| < 1`` in chart ``"inf"``; ``infinity``
is chart ``"inf"`` with coordinate 0. Real matrices act through the Cayley
transform, so rotations fix 0 and infinity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import agpoly, rootsys
from .errors import DegenerateInput, OutOfDisk

CAYLEY = np.array([[1.0, -1.0j], [1.0, 1.0j]])
CAYLEY_INV = np.linalg.inv(CAYLEY)


@dataclass(frozen=True)
class SpherePoint:
    chart: str      # "0" or "inf"
    coord: complex

    @classmethod
    def from_homogeneous(cls, a: complex, b: complex) -> "SpherePoint":
        if abs(a) <= abs(b):
            return cls("0", complex(a / b))
        return cls("inf", complex(b / a))

    @classmethod
    def finite(cls, zeta: complex) -> "SpherePoint":
        return cls.from_homogeneous(complex(zeta), 1.0)

    @classmethod
    def infinity(cls) -> "SpherePoint":
        return cls("inf", 0j)

    def homogeneous(self) -> np.ndarray:
        return np.array([self.coord, 1.0]) if self.chart == "0" else np.array([1.0, self.coord])

    @property
    def region(self) -> str:
        if abs(abs(self.coord) - 1.0) < 1e-14:
            return "S1"
        return "D0" if self.chart == "0" else "Dinf"

    def same_as(self, other: "SpherePoint", tol: float = 1e-12) -> bool:
        u, v = self.homogeneous(), other.homogeneous()
        return abs(u[0] * v[1] - u[1] * v[0]) <= tol * np.linalg.norm(u) * np.linalg.norm(v)


@dataclass(frozen=True)
class BidiskPoint:
    z: SpherePoint
    w: SpherePoint

    @classmethod
    def in_discs(cls, z: complex, w: complex) -> "BidiskPoint":
        p = cls(SpherePoint.finite(z), SpherePoint.finite(w))
        if p.chart != "D0xD0":
            raise OutOfDisk(f"({z}, {w}) is not in D0 x D0")
        return p

    @property
    def chart(self) -> str:
        return f"{self.z.region}x{self.w.region}"

    @property
    def on_diagonal(self) -> bool:
        return self.z.same_as(self.w)


def _check_unimodular(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.shape != (2, 2) or abs(np.linalg.det(g) - 1.0) > 1e-10:
        raise DegenerateInput("expected a real 2x2 matrix with determinant 1")
    return g


def mobius_act_point(g, p: SpherePoint) -> SpherePoint:
    G = CAYLEY @ _check_unimodular(g) @ CAYLEY_INV
    a, b = G @ p.homogeneous()
    return SpherePoint.from_homogeneous(a, b)


def mobius_act(g, p: BidiskPoint) -> BidiskPoint:
    """Diagonal action of a real unimodular matrix."""
    return BidiskPoint(mobius_act_point(g, p.z), mobius_act_point(g, p.w))


def rotation(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def random_sl2(rng, scale: float = 1.0) -> np.ndarray:
    X = scale * rng.standard_normal((2, 2))
    X[1, 1] = -X[0, 0]
    from scipy.linalg import expm
    return expm(X).real


def poincare_distance(z: complex, w: complex) -> float:
    """Hyperbolic distance in the unit disc, ``2 artanh |(z - w)/(1 - conj(z) w)|``."""
    if abs(z) >= 1 or abs(w) >= 1:
        raise OutOfDisk(f"{z} or {w} is not in the open unit disc")
    r = abs((z - w) / (1 - np.conj(z) * w))
    return float(2.0 * np.arctanh(r))


def orbit_parameter(p: BidiskPoint) -> float:
    """Distance between the two components; constant on orbits in ``D0 x D0``."""
    if p.chart != "D0xD0":
        raise OutOfDisk("orbit parameter is defined here on D0 x D0")
    return poincare_distance(p.z.coord, p.w.coord)


def supporting_curve_gap(s: float, z: complex) -> float:
    """``d(-s + z, s + z) - d(-s, s)``."""
    if not 0 < s < 1:
        raise OutOfDisk("s must lie in (0, 1)")
    return poincare_distance(-s + z, s + z) - poincare_distance(-s, s)


@dataclass(frozen=True)
class GapGrid:
    rows: np.ndarray  # columns s, x, y, gap
    skipped: int

    def summary(self, small: float = 0.05) -> dict:
        s, x, y, g = self.rows.T
        r = np.hypot(x, y)
        at_zero = r < 1e-12
        mono = True
        for sv in np.unique(s):
            for sign in (1, -1):
                sel = (s == sv) & (np.abs(y) < 1e-12) & (sign * x >= -1e-12)
                order = np.argsort(np.abs(x[sel]))
                gaps = g[sel][order]
                mono &= bool(np.all(np.diff(gaps) > 0))
        return {
            "points": int(len(g)),
            "skipped": int(self.skipped),
            "min_gap": float(g.min()),
            "nonnegative": bool(np.all(g >= -1e-15)),
            "zero_only_at_origin": bool(np.all(np.abs(g[~at_zero]) > 0) and np.all(np.abs(g[at_zero]) < 1e-15)),
            "min_gap_away_from_origin": float(g[r >= small - 1e-12].min()),
            "monotone_along_real_axis": mono,
        }


def gap_grid(s_values=None, radius: float = 0.3, step: float = 0.01) -> GapGrid:
    """Gap on ``|z| <= radius`` for each ``s``; points leaving the disc are skipped."""
    if s_values is None:
        s_values = np.round(np.arange(1, 9) / 10, 10)
    k = int(round(radius / step))
    ticks = np.arange(-k, k + 1) * step
    rows, skipped = [], 0
    for s in s_values:
        for x in ticks:
            for y in ticks:
                if x * x + y * y > radius * radius + 1e-12:
                    continue
                z = complex(x, y)
                if abs(-s + z) >= 1 or abs(s + z) >= 1:
                    skipped += 1
                    continue
                rows.append((s, x, y, supporting_curve_gap(s, z)))
    return GapGrid(np.array(rows), skipped)


def ag_interval_check() -> dict:
    """Endpoints of the rank-one polytope along ``h_alpha`` and its slice segment."""
    rrs = rootsys.restricted_root_data("sl 2 R")
    P = agpoly.build(rrs)
    alpha = rrs.positive_roots[0]
    h = np.array([float(c) for c in rootsys.coroot(alpha)])
    ends = sorted(float(v @ h / (h @ h)) for v in P.vertices)
    A = ends[1] * h
    seg = agpoly.slice_segment(P, A, alpha, h)
    return {
        "endpoints": ends,
        "endpoint_error": max(abs(ends[0] + np.pi / 4), abs(ends[1] - np.pi / 4)),
        "midpoint": agpoly.contains(P, 0 * h).kind.value,
        "segment_start": list(seg[0].point),
        "segment_end": list(seg[-1].point),
        "segment_interior_ok": all(st.kind is agpoly.Kind.INTERIOR for st in seg[1:-1]),
    }


@dataclass(frozen=True)
class EntireCurveWitness:
    """The non-constant entire curve ``zeta -> (zeta, infinity)`` in ``P^1 x P^1`` minus the diagonal."""

    def __call__(self, zeta: complex) -> BidiskPoint:
        return BidiskPoint(SpherePoint.finite(zeta), SpherePoint.infinity())

    def check(self, samples) -> bool:
        pts = [self(z) for z in samples]
        off_diag = not any(p.on_diagonal for p in pts)
        nonconstant = any(not pts[0].z.same_as(p.z) for p in pts[1:])
        return bool(off_diag and nonconstant)
