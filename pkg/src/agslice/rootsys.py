"""Restricted root systems of the classical real forms.

Roots are exact rational covectors in the *standard diagonal coordinates*
of the maximal abelian subspace:

* ``sl(n, R)``: coordinates ``(a_1, ..., a_n)`` of a diagonal matrix, with
  the trace-zero hyperplane as the actual subspace (ambient dimension ``n``,
  rank ``n - 1``);
* ``sp(n, R)``: ``diag(a_1..a_n, -a_1..-a_n)``;
* ``su(p, q)`` and ``so(p, q)`` with ``p <= q``: ``t_i`` is the coefficient
  of ``E_{i,p+i} + E_{p+i,i}``.

The standard dot product on these coordinates is a positive multiple of
the trace form, so it computes coroots: ``h = 2 lam / (lam, lam)``.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInput, RankTooLarge, UnsupportedForm

Covector = tuple  # tuple[Fraction, ...]

MAX_ENUMERATION_RANK = 4


@dataclass(frozen=True, order=True)
class FormLabel:
    """Identifier of a classical real form.

    ``family`` is one of ``sl``, ``su``, ``so``, ``sp``. ``p`` is ``n`` for
    ``sl``/``sp`` (with ``q = 0``); for ``su``/``so`` the pair is stored with
    ``p <= q``.
    """

    family: str
    p: int
    q: int = 0

    def __post_init__(self):
        fam = self.family
        if fam in ("sl", "sp"):
            if self.q != 0 or self.p < (2 if fam == "sl" else 1):
                raise UnsupportedForm(f"bad parameters for {fam}: {self.p}, {self.q}")
        elif fam in ("su", "so"):
            p, q = sorted((self.p, self.q))
            if p < 1 or (fam == "so" and p + q < 3):
                raise UnsupportedForm(f"{fam}({self.p},{self.q}) is not a supported semisimple form")
            object.__setattr__(self, "p", p)
            object.__setattr__(self, "q", q)
        else:
            raise UnsupportedForm(f"unknown family {fam!r}")

    @property
    def matrix_size(self) -> int:
        if self.family == "sl":
            return self.p
        if self.family == "sp":
            return 2 * self.p
        return self.p + self.q

    @property
    def rank(self) -> int:
        if self.family == "sl":
            return self.p - 1
        return self.p

    @property
    def ambient_dim(self) -> int:
        return self.p

    def __str__(self):
        if self.family in ("sl", "sp"):
            return f"{self.family}({self.p},R)"
        return f"{self.family}({self.p},{self.q})"

    def to_dict(self):
        if self.family in ("sl", "sp"):
            return {"family": self.family, "n": self.p, "field": "R"}
        return {"family": self.family, "p": self.p, "q": self.q}

    @classmethod
    def from_dict(cls, d):
        if d["family"] in ("sl", "sp"):
            return cls(d["family"], int(d["n"]))
        return cls(d["family"], int(d["p"]), int(d["q"]))

    @classmethod
    def parse(cls, text: str | Sequence[str]) -> "FormLabel":
        """Parse ``"sl 3 R"``, ``"sl(3,R)"``, ``"su 2 1"``, ``["sp", "2", "R"]``."""
        if not isinstance(text, str):
            text = " ".join(text)
        tokens = [t for t in re.split(r"[\s,()]+", text.strip()) if t]
        if not tokens:
            raise UnsupportedForm("empty form label")
        fam = tokens[0].lower()
        nums = []
        for t in tokens[1:]:
            if t.upper() in ("R", "RR"):
                continue
            try:
                nums.append(int(t))
            except ValueError:
                raise UnsupportedForm(f"cannot parse form label {text!r}") from None
        if fam in ("sl", "sp") and len(nums) == 1:
            return cls(fam, nums[0])
        if fam in ("su", "so") and len(nums) == 2:
            return cls(fam, nums[0], nums[1])
        raise UnsupportedForm(f"cannot parse form label {text!r}")


# ---------------------------------------------------------------------------
# rational helpers

def _vec(*entries) -> Covector:
    return tuple(Fraction(e) for e in entries)


def _unit(dim: int, i: int, c=1) -> Covector:
    v = [Fraction(0)] * dim
    v[i] = Fraction(c)
    return tuple(v)


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _neg(u):
    return tuple(-a for a in u)


def _scale(c, u):
    return tuple(Fraction(c) * a for a in u)


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def coroot(root: Covector) -> Covector:
    """The element ``h`` of the abelian subspace with ``root(h) = 2``."""
    n2 = _dot(root, root)
    if n2 == 0:
        raise DegenerateInput("zero root has no coroot")
    return _scale(Fraction(2) / n2, root)


def reflection_matrix(root: Covector) -> tuple:
    """Exact matrix of ``A -> A - root(A) h_root`` on ambient coordinates."""
    h = coroot(root)
    d = len(root)
    return tuple(
        tuple((Fraction(1) if i == j else Fraction(0)) - h[i] * root[j] for j in range(d))
        for i in range(d)
    )


def _matvec(m, v):
    return tuple(_dot(row, v) for row in m)


def _matmul(a, b):
    cols = list(zip(*b))
    return tuple(tuple(_dot(row, c) for c in cols) for row in a)


def _is_positive(root: Covector) -> bool:
    for a in root:
        if a != 0:
            return a > 0
    return False


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeylElement:
    matrix: tuple
    word: tuple

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    def apply(self, point) -> np.ndarray:
        return self.as_array() @ np.asarray(point, dtype=float)


@dataclass(frozen=True)
class RestrictedRootSystem:
    label: FormLabel
    rank: int
    roots: tuple  # tuple of Covector, sorted
    multiplicities: dict = field(compare=False)
    type_name: str = ""

    def __post_init__(self):
        roots = set(self.roots)
        for r in self.roots:
            if all(a == 0 for a in r):
                raise DegenerateInput("0 is not a root")
            if _neg(r) not in roots:
                raise DegenerateInput(f"root {r} has no negative")

    # -- coordinates -------------------------------------------------------
    @property
    def ambient_dim(self) -> int:
        return len(self.roots[0])

    @property
    def subspace_basis(self) -> np.ndarray:
        """Orthonormal rows spanning the abelian subspace in ambient coordinates."""
        d = self.ambient_dim
        if self.label.family == "sl":
            # orthonormal complement of (1, ..., 1)
            m = np.eye(d) - np.full((d, d), 1.0 / d)
            u, s, _ = np.linalg.svd(m)
            return u[:, : d - 1].T.copy()
        return np.eye(d)

    def in_subspace(self, point, tol=1e-9) -> bool:
        point = np.asarray(point, dtype=float)
        b = self.subspace_basis
        return bool(np.linalg.norm(point - b.T @ (b @ point)) <= tol * max(1.0, np.linalg.norm(point)))

    def root_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=float)

    def evaluate(self, root: Covector, point) -> float:
        return float(np.dot(np.array(root, dtype=float), np.asarray(point, dtype=float)))

    @property
    def positive_roots(self) -> tuple:
        return tuple(r for r in self.roots if _is_positive(r))

    @property
    def simple_roots(self) -> tuple:
        pos = self.positive_roots
        pos_set = set(pos)
        # indivisible positive roots that are not sums of two positive roots
        indivisible = [r for r in pos if _scale(Fraction(1, 2), r) not in pos_set]
        sums = {_add(a, b) for a in indivisible for b in indivisible}
        return tuple(r for r in indivisible if r not in sums)

    def coroot(self, root) -> Covector:
        return coroot(tuple(Fraction(a) for a in root))

    def weyl_generators(self) -> tuple:
        return tuple(reflection_matrix(r) for r in self.simple_roots)

    def reflect(self, root, point) -> np.ndarray:
        return np.array(reflection_matrix(tuple(root)), dtype=float) @ np.asarray(point, dtype=float)

    def multiplicity(self, root) -> int:
        return self.multiplicities[tuple(root)]

    def root_index(self, root) -> int:
        return self.roots.index(tuple(Fraction(a) for a in root))

    # -- Weyl group --------------------------------------------------------
    def weyl_group(self) -> list:
        """All Weyl elements, breadth first over the simple reflections."""
        if self.rank > MAX_ENUMERATION_RANK:
            raise RankTooLarge(f"Weyl group enumeration is capped at rank {MAX_ENUMERATION_RANK}")
        gens = self.weyl_generators()
        d = self.ambient_dim
        ident = tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))
        seen = {ident: ()}
        frontier = [ident]
        while frontier:
            nxt = []
            for m in frontier:
                for k, g in enumerate(gens):
                    w = _matmul(g, m)
                    if w not in seen:
                        seen[w] = (k,) + seen[m]
                        nxt.append(w)
            frontier = nxt
        return [WeylElement(m, word) for m, word in seen.items()]

    def to_dict(self) -> dict:
        return {
            "label": self.label.to_dict(),
            "rank": self.rank,
            "type": self.type_name,
            "roots": [[[str(a) for a in r], self.multiplicities[r]] for r in self.roots],
            "weyl_generators": [[[str(a) for a in row] for row in m] for m in self.weyl_generators()],
        }

    @classmethod
    def from_dict(cls, d) -> "RestrictedRootSystem":
        roots = []
        mult = {}
        for coords, m in d["roots"]:
            r = tuple(Fraction(c) for c in coords)
            roots.append(r)
            mult[r] = int(m)
        return cls(FormLabel.from_dict(d["label"]), int(d["rank"]), tuple(sorted(roots)), mult, d.get("type", ""))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def weyl_orbit(rrs: RestrictedRootSystem, point, tol=1e-9) -> np.ndarray:
    """Orbit of ``point`` under the group generated by root reflections."""
    gens = [np.array(g, dtype=float) for g in rrs.weyl_generators()]
    start = np.asarray(point, dtype=float)
    orbit = [start]
    frontier = [start]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = g @ p
                if not any(np.linalg.norm(q - o) <= tol for o in orbit):
                    orbit.append(q)
                    nxt.append(q)
        frontier = nxt
    return np.array(orbit)


def stabilizer_order(rrs: RestrictedRootSystem, point, tol=1e-9) -> int:
    point = np.asarray(point, dtype=float)
    return sum(1 for w in rrs.weyl_group() if np.linalg.norm(w.apply(point) - point) <= tol)


# ---------------------------------------------------------------------------
# the classification table

def _pm_pairs(dim, i, j, ci, cj):
    """The four roots ``+-ci e_i +- cj e_j``."""
    out = []
    for si, sj in itertools.product((1, -1), repeat=2):
        v = [Fraction(0)] * dim
        v[i] = Fraction(si * ci)
        v[j] = Fraction(sj * cj)
        out.append(tuple(v))
    return out


def restricted_root_data(label) -> RestrictedRootSystem:
    """Table-driven restricted root system of a classical real form."""
    if not isinstance(label, FormLabel):
        label = FormLabel.parse(label)
    fam, p, q = label.family, label.p, label.q
    mult: dict = {}

    def put(r, m):
        if m > 0:
            mult[r] = mult.get(r, 0) + m

    if fam == "sl":
        n = p
        for i, j in itertools.permutations(range(n), 2):
            put(_add(_unit(n, i), _unit(n, j, -1)), 1)
        type_name = f"A{n - 1}"
    elif fam == "sp":
        n = p
        for i, j in itertools.combinations(range(n), 2):
            for r in _pm_pairs(n, i, j, 1, 1):
                put(r, 1)
        for i in range(n):
            put(_unit(n, i, 2), 1)
            put(_unit(n, i, -2), 1)
        type_name = f"C{n}" if n > 1 else "A1"
    elif fam == "so":
        for i, j in itertools.combinations(range(p), 2):
            for r in _pm_pairs(p, i, j, 1, 1):
                put(r, 1)
        for i in range(p):
            put(_unit(p, i, 1), q - p)
            put(_unit(p, i, -1), q - p)
        if q == p:
            type_name = f"D{p}" if p > 1 else "?"
        else:
            type_name = f"B{p}" if p > 1 else "A1"
    else:  # su
        for i, j in itertools.combinations(range(p), 2):
            for r in _pm_pairs(p, i, j, 1, 1):
                put(r, 2)
        for i in range(p):
            put(_unit(p, i, 2), 1)
            put(_unit(p, i, -2), 1)
            put(_unit(p, i, 1), 2 * (q - p))
            put(_unit(p, i, -1), 2 * (q - p))
        if q == p:
            type_name = f"C{p}" if p > 1 else "A1"
        else:
            type_name = f"BC{p}"
    roots = tuple(sorted(mult))
    return RestrictedRootSystem(label, label.rank, roots, mult, type_name)


SUPPORTED_MAX_SIZE = 6


def supported_labels(max_size: int = SUPPORTED_MAX_SIZE) -> list:
    """Every supported label whose matrix size is at most ``max_size``."""
    out = []
    for n in range(2, max_size + 1):
        out.append(FormLabel("sl", n))
    for n in range(1, max_size // 2 + 1):
        out.append(FormLabel("sp", n))
    for fam in ("su", "so"):
        for p in range(1, max_size):
            for q in range(p, max_size - p + 1):
                try:
                    out.append(FormLabel(fam, p, q))
                except UnsupportedForm:
                    pass
    return out


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalCrossingResult:
    ok: bool
    witness: tuple | None = None
    ranks: dict = field(default_factory=dict, compare=False, repr=False)

    def __bool__(self):
        return self.ok


def normal_crossing_check(hyperplanes: Iterable, rtol: float = 1e-9) -> NormalCrossingResult:
    """Check that every subfamily of hyperplanes meets in the expected codimension.

    ``hyperplanes`` are nonzero linear functionals on ``V`` (rows of length
    ``dim V``), i.e. hyperplanes of ``P(V)``. A subfamily ``I`` must have
    rank ``min(|I|, dim V)``; subsets are enumerated by size, then
    lexicographically, and the first failure (1-based indices) is the witness.
    """
    hs = np.atleast_2d(np.asarray(list(hyperplanes), dtype=complex))
    if hs.size == 0:
        return NormalCrossingResult(True)
    norms = np.linalg.norm(hs, axis=1)
    if np.any(norms == 0) or np.any(norms <= rtol * norms.max()):
        raise DegenerateInput("zero functional does not define a hyperplane")
    hs = hs / norms[:, None]
    dim_v = hs.shape[1]
    ranks = {}
    for size in range(2, min(len(hs), dim_v) + 1):
        for subset in itertools.combinations(range(len(hs)), size):
            sv = np.linalg.svd(hs[list(subset)], compute_uv=False)
            rank = int(np.sum(sv > rtol * sv[0]))
            ranks[subset] = rank
            if rank < size:
                return NormalCrossingResult(False, tuple(i + 1 for i in subset), ranks)
    return NormalCrossingResult(True, None, ranks)
