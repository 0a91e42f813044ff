"""Multiplicative Jordan decomposition of eta-values and the lifting procedure.

Eigenvalues of a matrix with nontrivial Jordan blocks are only determined to
about ``eps**(1/k)``; the decomposition therefore groups eigenvalues into
clusters, takes each cluster's invariant subspace from a reordered Schur form
(well conditioned even when the eigenvalues inside are not), and uses the
cluster mean (a trace, hence accurate) as the semisimple eigenvalue.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import (CertificateFailure, ClusterAmbiguity, InconsistentSystem, NotADerivation,
                     NotSemisimple, NotUnipotent, SingularInput)
from .matrealize import RealFormRealization, RealLinearAutomorphism, eta

CLUSTER_TOL = 1e-3
CLUSTER_SPREAD = 20.0
SEMISIMPLE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralClusters:
    """Eigenvalue clusters with a block-diagonalizing basis.

    ``M = W diag(T_1, ..., T_m) W_inv`` where each triangular block ``T_k``
    carries one cluster; ``W`` comes from a reordered complex Schur form
    decoupled by triangular Sylvester solves.
    """

    centers: np.ndarray       # complex, one per cluster
    blocks: tuple             # (start, stop) of each cluster on the diagonal
    W: np.ndarray
    W_inv: np.ndarray
    min_separation: float
    max_radius: float

    @property
    def sizes(self) -> tuple:
        return tuple(b - a for a, b in self.blocks)

    def apply(self, f) -> np.ndarray:
        """``f(s)`` for the semisimple part ``s``, as a real matrix."""
        d = np.concatenate([np.full(b - a, f(c)) for (a, b), c in zip(self.blocks, self.centers)])
        out = (self.W * d) @ self.W_inv
        if np.linalg.norm(out.imag) > 1e-8 * max(1.0, np.linalg.norm(out.real)):
            raise InconsistentSystem("spectral function of a real matrix is not real")
        return out.real


def _decouple(T: np.ndarray, blocks) -> tuple:
    """Unit block-triangular ``V`` with ``V^-1 T V`` block diagonal."""
    n = T.shape[0]
    T = T.copy()
    V = np.eye(n, dtype=complex)
    V_inv = np.eye(n, dtype=complex)
    for a, b in blocks[:-1]:
        X, scale, info = sla.lapack.ztrsyl(T[a:b, a:b], T[b:, b:], -T[a:b, b:], isgn=-1)
        if info < 0:
            raise InconsistentSystem("triangular Sylvester solve failed")
        if info == 1:
            raise ClusterAmbiguity("clusters too close for block decoupling")
        X = X / scale
        T[a:b, b:] = 0.0
        V[:, b:] += V[:, a:b] @ X
        V_inv[a:b, :] -= X @ V_inv[b:, :]
    return V, V_inv


def _cluster(eigs: np.ndarray, tol: float) -> list:
    """Single-linkage groups of indices at distance <= tol."""
    n = len(eigs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    close = np.abs(eigs[:, None] - eigs[None, :]) <= tol
    for i, j in zip(*np.nonzero(np.triu(close, 1))):
        parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: (np.mean(eigs[g]).real, np.mean(eigs[g]).imag))


def spectral_clusters(M, tol: float = CLUSTER_TOL, spread_factor: float = CLUSTER_SPREAD) -> SpectralClusters:
    """Group eigenvalues within ``tol`` (relative); ambiguous if clusters are not well apart.

    Clusters count as well apart when their mutual distance exceeds
    ``spread_factor`` times the largest cluster radius.
    """
    M = np.asarray(M, dtype=float)
    T, Z = sla.schur(M.astype(complex), output="complex")
    eigs = np.diag(T).copy()
    scale = max(1.0, np.max(np.abs(eigs)))
    groups = _cluster(eigs, tol * scale)
    centers = np.array([np.mean(eigs[g]) for g in groups])
    radius = max(float(np.max(np.abs(eigs[g] - c))) for g, c in zip(groups, centers))
    sep = np.inf
    if len(groups) > 1:
        sep = min(float(np.min(np.abs(eigs[g][:, None] - eigs[h][None, :])))
                  for a, g in enumerate(groups) for h in groups[a + 1:])
        if sep < max(spread_factor * radius, 1e-8 * scale):
            raise ClusterAmbiguity(f"eigenvalue clusters {sep:.2e} apart with spread {radius:.2e}")
    label = np.empty(len(eigs), dtype=int)
    for k, g in enumerate(groups):
        label[g] = k
    # move clusters to the front one at a time; earlier ones stay in place
    for k in range(len(groups) - 1):
        select = (label <= k).astype(np.int32)
        T, Z, _, _, _, _, info = sla.lapack.ztrsen(select, T, Z, job="N")
        if info != 0:
            raise ClusterAmbiguity("Schur reordering failed")
        label = np.array([int(np.argmin(np.abs(centers - z))) for z in np.diag(T)])
    blocks, start = [], 0
    for k, g in enumerate(groups):
        stop = start + len(g)
        if not np.all(label[start:stop] == k):
            raise ClusterAmbiguity("Schur reordering did not isolate the clusters")
        blocks.append((start, stop))
        start = stop
    V, V_inv = _decouple(T, blocks)
    W = Z @ V
    if np.linalg.cond(V) > 1e10:
        raise ClusterAmbiguity("cluster subspaces are nearly dependent")
    return SpectralClusters(centers, tuple(blocks), W, V_inv @ Z.conj().T, float(sep), radius)


@dataclass(frozen=True, eq=False)
class JordanParts:
    s: RealLinearAutomorphism
    u: RealLinearAutomorphism
    xi: np.ndarray | None = None
    N: np.ndarray | None = None
    clusters: SpectralClusters | None = field(default=None, repr=False)

    @property
    def unipotent_defect(self) -> float:
        return float(np.linalg.norm(self.u.matrix - np.eye(self.u.matrix.shape[0]), 2))


def multiplicative_jordan(M, tol: float = CLUSTER_TOL, spread_factor: float = CLUSTER_SPREAD) -> JordanParts:
    """``M = s u = u s`` with ``s`` semisimple and ``u`` unipotent."""
    M = M.matrix if isinstance(M, RealLinearAutomorphism) else np.asarray(M, dtype=float)
    if np.linalg.cond(M) > 1e13:
        raise SingularInput("matrix is numerically singular")
    cl = spectral_clusters(M, tol, spread_factor)
    s = cl.apply(lambda z: z)
    s_inv = cl.apply(lambda z: 1.0 / z)
    u = s_inv @ M
    D = u - np.eye(M.shape[0])
    nd = np.linalg.norm(D, 2)
    if nd > SEMISIMPLE_TOL:
        longest = max(cl.sizes)
        P = np.linalg.matrix_power(D / nd, min(longest + 1, M.shape[0]))
        if np.linalg.norm(P, 2) > 1e-6:
            raise ClusterAmbiguity("residual factor is not unipotent; clusters are unreliable")
    return JordanParts(RealLinearAutomorphism(s), RealLinearAutomorphism(u), clusters=cl)


def nilpotency_degree(D, tol: float = 1e-10) -> int:
    """Smallest ``k`` with ``|D^k| <= tol |D|^k``."""
    D = np.asarray(D)
    nd = np.linalg.norm(D, 2)
    if nd == 0:
        return 0
    P = np.eye(D.shape[0])
    Dn = D / nd
    for k in range(1, D.shape[0] + 1):
        P = P @ Dn
        if np.linalg.norm(P, 2) <= tol:
            return k
    raise NotUnipotent("matrix is not nilpotent")


def nilpotent_log(u, tol: float = 1e-12) -> np.ndarray:
    """``log u`` by the terminating series in ``u - I``."""
    u = u.matrix if isinstance(u, RealLinearAutomorphism) else np.asarray(u)
    D = u - np.eye(u.shape[0])
    if np.linalg.norm(D, 2) < tol:
        return np.zeros_like(D)
    deg = nilpotency_degree(D)
    out = np.zeros_like(D)
    P = np.eye(u.shape[0], dtype=D.dtype)
    for k in range(1, deg):
        P = P @ D
        out = out + ((-1) ** (k + 1) / k) * P
    return out


@functools.lru_cache(maxsize=None)
def _ad_stack(R: RealFormRealization) -> np.ndarray:
    D = 2 * R.dim
    eye = np.eye(D)
    return np.array([R.ad_real_vec(eye[k]).ravel() for k in range(D)]).T


def derivation_defect(R: RealFormRealization, xi: np.ndarray, samples: int = 12, seed: int = 0) -> float:
    D = xi.shape[0]
    rng = np.random.default_rng(seed)
    worst = 0.0
    scale = max(1.0, np.linalg.norm(xi, 2))
    for _ in range(samples):
        u, v = rng.standard_normal(D), rng.standard_normal(D)
        lhs = xi @ R.bracket_vec(u, v)
        rhs = R.bracket_vec(xi @ u, v) + R.bracket_vec(u, xi @ v)
        worst = max(worst, np.linalg.norm(lhs - rhs) / (scale * np.linalg.norm(u) * np.linalg.norm(v)))
    return worst


def ad_preimage(R: RealFormRealization, xi, tol: float = 1e-8) -> np.ndarray:
    """The unique ``N`` in ``gc`` with ``ad(N) = xi``, as a complex matrix."""
    xi = np.asarray(xi, dtype=float)
    if not np.any(xi):
        return np.zeros((R.n, R.n), dtype=complex)
    if derivation_defect(R, xi) > tol:
        raise NotADerivation("xi does not satisfy the Leibniz rule on brackets")
    A = _ad_stack(R)
    v, *_ = np.linalg.lstsq(A, xi.ravel(), rcond=None)
    resid = np.linalg.norm(A @ v - xi.ravel()) / max(1.0, np.linalg.norm(xi))
    if resid > tol:
        raise InconsistentSystem(f"ad(N) = xi has no solution (residual {resid:.2e})")
    return R.mat(v)


@dataclass(frozen=True, eq=False)
class LiftResult:
    N: np.ndarray
    s: RealLinearAutomorphism
    u: RealLinearAutomorphism
    xi: np.ndarray
    certificates: dict  # name -> error


def lift_jordan(R: RealFormRealization, x, tol: float = 1e-8) -> LiftResult:
    """Nilpotent ``N`` with ``u = Ad(exp N)``, shifting ``x`` onto the semisimple part.

    Certificates, each relative to the scale of its terms:
    ``sigma(N) = -N``, ``s(N) = N`` and ``eta(exp(N/2) x) = s``.
    """
    M = eta(R, x).matrix
    jp = multiplicative_jordan(M)
    s = jp.s.matrix
    if jp.unipotent_defect < SEMISIMPLE_TOL:
        xi = np.zeros_like(M)
        N = np.zeros((R.n, R.n), dtype=complex)
    else:
        xi = nilpotent_log(jp.u)
        N = ad_preimage(R, xi, tol=max(tol, 1e-8))
    nN = max(1.0, np.linalg.norm(N))
    nvec = R.vec(N)
    shifted = eta(R, sla.expm(0.5 * N) @ np.asarray(x, dtype=complex)).matrix
    certs = {
        "sigma(N) = -N": float(np.linalg.norm(R.sigma(N) + N) / nN),
        "s(N) = N": float(np.linalg.norm(s @ nvec - nvec) / (nN * max(1.0, np.linalg.norm(s, 2)))),
        "eta(exp(N/2) x) = s": float(np.linalg.norm(shifted - s, 2) / max(1.0, np.linalg.norm(s, 2))),
    }
    for name, err in certs.items():
        if not err <= tol:
            raise CertificateFailure(name, error=err)
    return LiftResult(N, jp.s, jp.u, xi, certs)


def elliptic_hyperbolic_split(s, tol: float = SEMISIMPLE_TOL) -> tuple:
    """``s = s_ell s_hyp``: unit-circle and positive-real spectral parts."""
    S = s.matrix if isinstance(s, RealLinearAutomorphism) else np.asarray(s, dtype=float)
    jp = multiplicative_jordan(S)
    if jp.unipotent_defect > tol * max(1.0, np.linalg.norm(S, 2)):
        raise NotSemisimple("matrix has a nontrivial unipotent part")
    cl = jp.clusters
    s_ell = cl.apply(lambda z: z / abs(z))
    s_hyp = cl.apply(lambda z: abs(z))
    return RealLinearAutomorphism(s_ell), RealLinearAutomorphism(s_hyp)


def ellipticity_test(R: RealFormRealization, x, tol: float = SEMISIMPLE_TOL) -> bool:
    """True iff ``eta(x)`` is semisimple with spectrum on the unit circle."""
    M = eta(R, x).matrix
    jp = multiplicative_jordan(M)
    if jp.unipotent_defect >= tol:
        return False
    dev = np.max(np.abs(np.abs(jp.clusters.centers) - 1.0))
    if tol <= dev < 1e3 * tol:
        raise ClusterAmbiguity(f"eigenvalue moduli deviate from 1 by {dev:.2e}")
    return bool(dev < tol)


@dataclass(frozen=True)
class DecayReport:
    times: tuple
    distances: tuple
    ratios: tuple
    expected: tuple
    ok: bool


def degeneration_decay(R: RealFormRealization, x, H, s, times=(-1.0, -2.0, -4.0),
                       rel: float = 0.2) -> DecayReport:
    """``|eta(exp(tH) x) - s|`` against the predicted ``exp(2t)`` rate."""
    S = s.matrix if isinstance(s, RealLinearAutomorphism) else np.asarray(s)
    x = np.asarray(x, dtype=complex)
    dists = tuple(float(np.linalg.norm(eta(R, sla.expm(t * H) @ x).matrix - S, 2)) for t in times)
    ratios = tuple(dists[i] / dists[i + 1] for i in range(len(times) - 1))
    expected = tuple(float(np.exp(2 * (times[i] - times[i + 1]))) for i in range(len(times) - 1))
    ok = all(abs(r / e - 1) <= rel for r, e in zip(ratios, expected))
    return DecayReport(tuple(times), dists, ratios, expected, ok)
