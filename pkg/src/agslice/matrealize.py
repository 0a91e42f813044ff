"""Matrix models of the classical real forms and the map eta.

Conventions
-----------
The complexified algebra ``gc`` is a matrix algebra (``sl(n,C)``,
``so(n,C)`` or ``sp(2n,C)``) with a complex basis ``B_1..B_N`` that is
fixed by ``sigma``, hence a real basis of the real form ``g``. The basis is
orthonormal for the Hermitian product ``tr(X^H Y)``, so complex coordinates
are ``c_k = tr(B_k^H X)``.

``gc`` viewed as a real vector space uses the interleaved basis
``(B_1, iB_1, B_2, iB_2, ...)``; a real-linear map is a ``2N x 2N`` real
matrix in that basis. ``sigma`` is then ``diag(1, -1, 1, -1, ...)``.

The Cartan involution is ``theta(X) = -X^H`` on every model, and
``tau = theta o sigma`` is its holomorphic extension from ``g``.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import rootsys
from .errors import (ClusterAmbiguity, DegenerateInput, InconsistentSystem, InvolutionMismatch,
                     NotInGroup, SingularInput, ThresholdAmbiguity, UnsupportedForm)
from .rootsys import FormLabel, restricted_root_data

ALGEBRA_TOL = 1e-10
GROUP_TOL = 1e-10


# ---------------------------------------------------------------------------
# real/complex bookkeeping

def realify(M: np.ndarray) -> np.ndarray:
    """Real ``2N x 2N`` matrix of a complex-linear map in the interleaved basis."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    out = np.empty((2 * n, 2 * n))
    out[0::2, 0::2] = M.real
    out[0::2, 1::2] = -M.imag
    out[1::2, 0::2] = M.imag
    out[1::2, 1::2] = M.real
    return out


def to_real(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    v = np.empty(c.shape[:-1] + (2 * c.shape[-1],))
    v[..., 0::2] = c.real
    v[..., 1::2] = c.imag
    return v


def from_real(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[..., 0::2] + 1j * v[..., 1::2]


def _J(p, q):
    return np.diag([1.0] * p + [-1.0] * q).astype(complex)


def _Omega(n):
    om = np.zeros((2 * n, 2 * n), dtype=complex)
    om[:n, n:] = np.eye(n)
    om[n:, :n] = -np.eye(n)
    return om


def _unit(n, i, j):
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RealFormRealization:
    """A real form ``g`` inside its complexification, with ``sigma, tau, theta``.

    ``coord_matrices`` are the matrices dual to the ambient diagonal
    coordinates of the root system (for ``sl`` these are ``E_kk``, which are
    not traceless; only trace-zero combinations belong to ``a``). Group
    elements are plain invertible complex matrices acting through ``Ad``.
    """

    label: FormLabel
    n: int
    basis: np.ndarray            # (N, n, n) complex
    coord_matrices: np.ndarray   # (ambient, n, n)
    form: np.ndarray | None      # J for su/so, Omega for sp
    sigma_r: np.ndarray
    tau_r: np.ndarray
    theta_r: np.ndarray
    tau_c: np.ndarray            # tau on complex coordinates (real N x N)
    ad_c: np.ndarray             # (N, N, N): ad(B_k) on complex coordinates
    k_coords: np.ndarray         # real coefficient vectors spanning k
    p_coords: np.ndarray
    base_point_tag: str = "x0 (isotropy K^C)"
    rrs: rootsys.RestrictedRootSystem | None = field(default=None)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.label.rank

    @property
    def a_basis(self) -> np.ndarray:
        """Commuting hermitian elements of ``p`` spanning ``a``."""
        b = self.rrs.subspace_basis
        return np.einsum("ka,aij->kij", b, self.coord_matrices)

    # -- coordinates -------------------------------------------------------
    def coords(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        flat = self.basis.reshape(self.dim, -1).conj()
        return flat @ X.reshape(X.shape[:-2] + (-1,)).T if X.ndim == 2 else \
            np.einsum("kf,...f->...k", flat, X.reshape(X.shape[:-2] + (-1,)))

    def element(self, c) -> np.ndarray:
        return np.einsum("...k,kij->...ij", np.asarray(c, dtype=complex), self.basis)

    def vec(self, X) -> np.ndarray:
        """Real interleaved coordinates of a matrix in ``gc``."""
        return to_real(self.coords(X))

    def mat(self, v) -> np.ndarray:
        return self.element(from_real(v))

    def membership_residual(self, X) -> float:
        X = np.asarray(X, dtype=complex)
        return float(np.linalg.norm(X - self.element(self.coords(X))))

    def a_matrix(self, A) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(A, dtype=float), self.coord_matrices)

    def coroot_matrix(self, root) -> np.ndarray:
        return self.a_matrix(np.array(rootsys.coroot(tuple(root)), dtype=float))

    # -- brackets and adjoint actions ------------------------------------
    def bracket(self, X, Y) -> np.ndarray:
        return X @ Y - Y @ X

    def bracket_vec(self, u, v) -> np.ndarray:
        return self.vec(self.bracket(self.mat(u), self.mat(v)))

    def ad_complex(self, X) -> np.ndarray:
        return np.einsum("k,kij->ij", self.coords(X), self.ad_c)

    def ad_real(self, X) -> np.ndarray:
        return realify(self.ad_complex(X))

    def ad_real_vec(self, v) -> np.ndarray:
        return realify(np.einsum("k,kij->ij", from_real(v), self.ad_c))

    def Ad_complex(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=complex)
        gi = np.linalg.inv(g)
        conj = np.einsum("ij,kjl,lm->kim", g, self.basis, gi)
        return self.coords(conj).T

    def Ad_real(self, g) -> np.ndarray:
        return realify(self.Ad_complex(g))

    # -- involutions on elements -----------------------------------------
    def sigma(self, X):
        X = np.asarray(X, dtype=complex)
        if self.label.family == "su":
            return -self.form @ X.conj().T @ self.form
        return X.conj()

    def theta(self, X):
        return -np.asarray(X, dtype=complex).conj().T

    def tau(self, X):
        return self.theta(self.sigma(X))

    def sigma_group(self, g):
        g = np.asarray(g, dtype=complex)
        if self.label.family == "su":
            return self.form @ np.linalg.inv(g.conj().T) @ self.form
        return g.conj()

    def theta_group(self, g):
        return np.linalg.inv(np.asarray(g, dtype=complex).conj().T)

    def tau_group(self, g):
        return self.theta_group(self.sigma_group(g))

    # -- group membership -------------------------------------------------
    def in_complex_group(self, g, tol=GROUP_TOL) -> bool:
        g = np.asarray(g, dtype=complex)
        scale = max(1.0, np.linalg.norm(g) ** 2)
        fam = self.label.family
        if fam in ("sl", "su"):
            return abs(np.linalg.det(g) - 1) <= tol * max(1.0, np.linalg.norm(g) ** self.n)
        return np.linalg.norm(g.T @ self.form @ g - self.form) <= tol * scale

    def in_group(self, g, tol=GROUP_TOL) -> bool:
        g = np.asarray(g, dtype=complex)
        fixed = np.linalg.norm(self.sigma_group(g) - g) <= tol * max(1.0, np.linalg.norm(g))
        return bool(fixed and self.in_complex_group(g, tol))

    # -- random samplers --------------------------------------------------
    def random_g(self, rng, scale=0.5) -> np.ndarray:
        """Random element of ``g`` (real coefficients)."""
        c = rng.standard_normal(self.dim)
        return self.element(scale * c / np.linalg.norm(c))

    def random_gc(self, rng, scale=0.5) -> np.ndarray:
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return self.element(scale * c / np.linalg.norm(c))

    def random_k(self, rng, scale=0.5) -> np.ndarray:
        if self.k_coords.shape[1] == 0:
            return np.zeros((self.n, self.n), dtype=complex)
        c = self.k_coords @ rng.standard_normal(self.k_coords.shape[1])
        return self.element(scale * c / np.linalg.norm(c))

    def random_kc(self, rng, scale=0.5) -> np.ndarray:
        if self.k_coords.shape[1] == 0:
            return np.zeros((self.n, self.n), dtype=complex)
        m = self.k_coords.shape[1]
        c = self.k_coords @ (rng.standard_normal(m) + 1j * rng.standard_normal(m))
        return self.element(scale * c / np.linalg.norm(c))

    def random_p(self, rng, scale=0.5) -> np.ndarray:
        c = self.p_coords @ rng.standard_normal(self.p_coords.shape[1])
        return self.element(scale * c / np.linalg.norm(c))

    def random_group_element(self, rng, scale=0.5) -> np.ndarray:
        return sla.expm(self.random_g(rng, scale))

    def random_complex_group_element(self, rng, scale=0.5) -> np.ndarray:
        return sla.expm(self.random_gc(rng, scale))

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        from .serialize import matrix_to_json
        return {
            "label": self.label.to_dict(),
            "n": self.n,
            "dim": self.dim,
            "basis": [matrix_to_json(b) for b in self.basis],
            "coord_matrices": [matrix_to_json(b) for b in self.coord_matrices],
            "a_basis": [matrix_to_json(b) for b in self.a_basis],
            "base_point": self.base_point_tag,
        }

    @classmethod
    def from_dict(cls, d) -> "RealFormRealization":
        from .serialize import matrix_from_json
        R = load_real_form(FormLabel.from_dict(d["label"]))
        basis = np.array([matrix_from_json(b) for b in d["basis"]])
        if basis.shape != R.basis.shape or not np.allclose(basis, R.basis, atol=1e-12):
            raise DegenerateInput("realization file does not match the tabulated model")
        return R

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# construction

def _member_residuals(label: FormLabel, n: int, form):
    fam = label.family
    if fam in ("sl", "su"):
        return lambda X: np.array([np.trace(X)])
    return lambda X: (X.T @ form + form @ X).ravel()


def _coord_matrices(label: FormLabel) -> np.ndarray:
    fam, p, q = label.family, label.p, label.q
    n = label.matrix_size
    mats = []
    if fam == "sl":
        mats = [_unit(n, k, k) for k in range(n)]
    elif fam == "sp":
        mats = [_unit(n, k, k) - _unit(n, p + k, p + k) for k in range(p)]
    else:
        mats = [_unit(n, k, p + k) + _unit(n, p + k, k) for k in range(p)]
    return np.array(mats)


def _real_basis(label: FormLabel, n: int, form) -> np.ndarray:
    member = _member_residuals(label, n, form)
    probe = RealFormRealization.__new__(RealFormRealization)
    object.__setattr__(probe, "label", label)
    object.__setattr__(probe, "form", form)
    cols = []
    for k in range(2 * n * n):
        X = np.zeros(n * n, dtype=complex)
        X[k // 2] = 1.0 if k % 2 == 0 else 1j
        X = X.reshape(n, n)
        res = np.concatenate([member(X), (probe.sigma(X) - X).ravel()])
        cols.append(np.concatenate([res.real, res.imag]))
    null = sla.null_space(np.array(cols).T, rcond=1e-12)
    mats = (null[0::2] + 1j * null[1::2]).T.reshape(-1, n, n)
    return mats


def load_real_form(label, params=None) -> RealFormRealization:
    """Build and verify the matrix model of a supported form (size <= 6)."""
    if not isinstance(label, FormLabel):
        label = FormLabel.parse(label if params is None else f"{label} {params}")
    return _load_real_form(label)


@functools.lru_cache(maxsize=None)
def _load_real_form(label: FormLabel) -> RealFormRealization:
    n = label.matrix_size
    if n > rootsys.SUPPORTED_MAX_SIZE:
        raise UnsupportedForm(f"{label}: matrix size {n} exceeds {rootsys.SUPPORTED_MAX_SIZE}")
    fam = label.family
    form = None
    if fam in ("su", "so"):
        form = _J(label.p, label.q)
    elif fam == "sp":
        form = _Omega(label.p)
    basis = _real_basis(label, n, form)
    N = basis.shape[0]
    flat_conj = basis.reshape(N, -1).conj()

    def coords(X):
        return flat_conj @ X.ravel()

    gram = flat_conj @ basis.reshape(N, -1).T
    if np.linalg.norm(gram - np.eye(N)) > 1e-10:
        raise InvolutionMismatch("basis of g is not hermitian-orthonormal")

    ad_c = np.empty((N, N, N), dtype=complex)
    for k in range(N):
        br = np.einsum("ij,mjl->mil", basis[k], basis) - np.einsum("mij,jl->mil", basis, basis[k])
        ad_c[k] = (flat_conj @ br.reshape(N, -1).T)
        closure = np.linalg.norm(np.einsum("jm,jil->mil", ad_c[k], basis) - br)
        if closure > ALGEBRA_TOL:
            raise InvolutionMismatch(f"brackets of the basis leave the span ({closure:.2e})")

    probe = RealFormRealization.__new__(RealFormRealization)
    object.__setattr__(probe, "label", label)
    object.__setattr__(probe, "form", form)
    tau_c = np.array([coords(probe.tau(b)) for b in basis]).T
    if np.linalg.norm(tau_c.imag) > 1e-10:
        raise InvolutionMismatch("tau does not preserve g")
    tau_c = tau_c.real
    sigma_r = np.diag([1.0, -1.0] * N)
    tau_r = realify(tau_c)
    theta_r = sigma_r @ tau_r
    ident = np.eye(2 * N)
    for name, m in (("sigma", sigma_r), ("tau", tau_r), ("theta", theta_r)):
        if np.linalg.norm(m @ m - ident) > 1e-10:
            raise InvolutionMismatch(f"{name} is not an involution")
    if np.linalg.norm(sigma_r @ tau_r - tau_r @ sigma_r) > 1e-10:
        raise InvolutionMismatch("sigma and tau do not commute")

    w, v = np.linalg.eigh((tau_c + tau_c.T) / 2)
    k_coords = v[:, w > 0]
    p_coords = v[:, w < 0]
    for name, arr in (("basis", basis), ("ad", ad_c), ("tau", tau_c), ("k", k_coords), ("p", p_coords)):
        arr.setflags(write=False)
    R = RealFormRealization(
        label=label, n=n, basis=basis, coord_matrices=_coord_matrices(label), form=form,
        sigma_r=sigma_r, tau_r=tau_r, theta_r=theta_r, tau_c=tau_c, ad_c=ad_c,
        k_coords=k_coords, p_coords=p_coords, rrs=restricted_root_data(label),
    )
    for A in R.a_basis:
        if R.membership_residual(A) > ALGEBRA_TOL or np.linalg.norm(R.theta(A) + A) > ALGEBRA_TOL:
            raise InvolutionMismatch("a is not contained in p")
    return R


# ---------------------------------------------------------------------------
# root decomposition

@dataclass(frozen=True, eq=False)
class RestrictedRootDecomposition:
    """Joint eigenspaces of ``ad(a)`` on ``g``; bases are real coefficient columns."""

    realization: RealFormRealization
    centralizer_m: np.ndarray
    a_space: np.ndarray
    root_spaces: dict
    covectors: dict  # snapped root -> measured float covector

    def multiplicity(self, root) -> int:
        return self.root_spaces[tuple(root)].shape[1]

    def root_element(self, root, j=0) -> np.ndarray:
        return self.realization.element(self.root_spaces[tuple(root)][:, j])

    def tau_stable_basis(self, root) -> "TauStableBasis":
        R = self.realization
        L = self.root_spaces[tuple(root)]
        Lm = R.tau_c @ L
        return TauStableBasis(tuple(root), L, Lm, L + Lm, L - Lm)


@dataclass(frozen=True, eq=False)
class TauStableBasis:
    """``L_lam^j``, ``L_-lam^j = tau(L_lam^j)``, ``X = L + L_-``, ``Y = L - L_-``."""

    root: tuple
    L: np.ndarray
    L_minus: np.ndarray
    X: np.ndarray
    Y: np.ndarray

    @property
    def multiplicity(self) -> int:
        return self.L.shape[1]


class RootTableMismatch(ClusterAmbiguity):
    pass


def _canonical_signs(R: RealFormRealization, V: np.ndarray) -> np.ndarray:
    """Flip columns so the first sizable matrix entry of each has positive real part."""
    V = V.copy()
    for j in range(V.shape[1]):
        flat = R.element(V[:, j]).ravel()
        big = np.flatnonzero(np.abs(flat) > 1e-6 * np.max(np.abs(flat)))[0]
        z = flat[big]
        if (z.real if abs(z.real) > 1e-9 else z.imag) < 0:
            V[:, j] = -V[:, j]
    return V


_WEIGHTS = np.array([1.0, np.sqrt(2.0), np.sqrt(3.0), np.sqrt(5.0), np.sqrt(7.0), np.sqrt(11.0)])


@functools.lru_cache(maxsize=None)
def restricted_root_decomposition(R: RealFormRealization, rel_tol: float = 1e-7) -> RestrictedRootDecomposition:
    ads = np.array([R.ad_complex(C).real for C in R.coord_matrices])
    # a generic combination on the subspace; weights are rationally independent
    w = R.rrs.subspace_basis.T @ (R.rrs.subspace_basis @ _WEIGHTS[: ads.shape[0]])
    gen = np.einsum("k,kij->ij", w, ads)
    gen = (gen + gen.T) / 2
    vals, vecs = np.linalg.eigh(gen)
    scale = max(1.0, np.max(np.abs(vals)))
    clusters = [[0]]
    for i in range(1, len(vals)):
        gap = vals[i] - vals[i - 1]
        if gap <= rel_tol * scale:
            clusters[-1].append(i)
        elif gap <= 1e3 * rel_tol * scale:
            raise ClusterAmbiguity(f"eigenvalue gap {gap:.2e} is inside the ambiguity band")
        else:
            clusters.append([i])
    table = {tuple(float(a) for a in r): r for r in R.rrs.roots}
    spaces, covs = {}, {}
    zero = None
    for cl in clusters:
        V = vecs[:, cl]
        cov = np.array([np.trace(V.T @ a @ V) / len(cl) for a in ads])
        for a, c in zip(ads, cov):
            if np.linalg.norm(a @ V - c * V) > 1e-6 * scale:
                raise ClusterAmbiguity("a generic eigenspace is not a joint eigenspace")
        if np.linalg.norm(cov) < 1e-6:
            zero = V
            continue
        match = [r for fr, r in table.items() if np.linalg.norm(np.array(fr) - cov) < 1e-6]
        if len(match) != 1:
            raise RootTableMismatch(f"measured covector {np.round(cov, 8)} is not in the root table")
        spaces[match[0]] = _canonical_signs(R, V)
        covs[match[0]] = cov
    for r in R.rrs.roots:
        got = spaces.get(r)
        if got is None or got.shape[1] != R.rrs.multiplicities[r]:
            raise RootTableMismatch(f"root {[str(a) for a in r]}: multiplicity mismatch")
    if zero is None:
        raise RootTableMismatch("missing zero weight space")
    tz = zero.T @ R.tau_c @ zero
    tw, tv = np.linalg.eigh((tz + tz.T) / 2)
    m_space = zero @ tv[:, tw > 0]
    a_space = zero @ tv[:, tw < 0]
    if a_space.shape[1] != R.rank:
        raise RootTableMismatch("zero weight space does not contain a of the right rank")
    return RestrictedRootDecomposition(R, m_space, a_space, spaces, covs)


def ad_exp_iA_block(R: RealFormRealization, A, root, j: int = 0) -> np.ndarray:
    """``Ad(exp iA)`` on the plane ``(X_[lam]^j, Y_[lam]^j)`` (columns are images).

    ``[[cosh lam(iA), sinh lam(iA)], [sinh lam(iA), cosh lam(iA)]]``.
    """
    z = 1j * R.rrs.evaluate(tuple(root), A)
    return np.array([[np.cosh(z), np.sinh(z)], [np.sinh(z), np.cosh(z)]])


def ad_exp_iA_block_direct(R: RealFormRealization, A, root, j: int = 0) -> np.ndarray:
    """Same block by exponentiating and conjugating matrices."""
    dec = restricted_root_decomposition(R)
    tb = dec.tau_stable_basis(root)
    X = R.element(tb.X[:, j])
    Y = R.element(tb.Y[:, j])
    g = sla.expm(1j * R.a_matrix(A))
    gi = sla.expm(-1j * R.a_matrix(A))
    basis = np.stack([X.ravel(), Y.ravel()], axis=1)
    cols = []
    for Z in (X, Y):
        img = (g @ Z @ gi).ravel()
        coef, *_ = np.linalg.lstsq(basis, img, rcond=None)
        if np.linalg.norm(basis @ coef - img) > 1e-9 * max(1.0, np.linalg.norm(img)):
            raise InconsistentSystem("the (X, Y) plane is not Ad(exp iA)-stable")
        cols.append(coef)
    return np.array(cols).T


# ---------------------------------------------------------------------------
# eta

@dataclass(frozen=True, eq=False)
class RealLinearAutomorphism:
    matrix: np.ndarray
    source: np.ndarray | None = None

    def __matmul__(self, other):
        if isinstance(other, RealLinearAutomorphism):
            return RealLinearAutomorphism(self.matrix @ other.matrix)
        return self.matrix @ other

    def inverse(self):
        return RealLinearAutomorphism(np.linalg.inv(self.matrix))


def automorphism_defect(R: RealFormRealization, M: np.ndarray, pairs=None, rng=None) -> float:
    """Max of ``|M[X,Y] - [MX, MY]|`` over basis pairs (relative to ``|M|^2``)."""
    D = M.shape[0]
    if pairs is None:
        rng = rng or np.random.default_rng(0)
        pairs = [tuple(rng.integers(0, D, 2)) for _ in range(8)]
    worst = 0.0
    norm = max(1.0, np.linalg.norm(M, 2)) ** 2
    for i, j in pairs:
        ei = np.zeros(D)
        ej = np.zeros(D)
        ei[i] = 1.0
        ej[j] = 1.0
        lhs = M @ R.bracket_vec(ei, ej)
        rhs = R.bracket_vec(M @ ei, M @ ej)
        worst = max(worst, np.linalg.norm(lhs - rhs) / norm)
    return worst


def eta(R: RealFormRealization, x, check: bool = False) -> RealLinearAutomorphism:
    """``sigma o Ad(x) o tau o Ad(x^-1)`` as a real ``2N x 2N`` matrix."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (R.n, R.n):
        raise SingularInput(f"expected a {R.n}x{R.n} matrix")
    if np.linalg.cond(x) > 1e12:
        raise SingularInput("group element is numerically singular")
    Ad = R.Ad_real(x)
    Adi = R.Ad_real(np.linalg.inv(x))
    M = R.sigma_r @ Ad @ R.tau_r @ Adi
    if check:
        defect = automorphism_defect(R, M)
        if defect > 1e-8:
            raise InconsistentSystem(f"eta(x) fails to preserve brackets ({defect:.2e})")
    return RealLinearAutomorphism(M, x)


def eta_congruence(R: RealFormRealization, x, y, tol: float = 1e-8) -> bool:
    """True iff ``eta(x) = eta(y)``, i.e. ``y`` lies in ``x N^C``."""
    ex, ey = eta(R, x).matrix, eta(R, y).matrix
    return bool(np.linalg.norm(ex - ey, 2) <= tol * max(1.0, np.linalg.norm(ex, 2)))


def group_action(R: RealFormRealization, h, phi: np.ndarray) -> np.ndarray:
    """``h.phi = Ad(h) o phi o Ad(h^-1)``."""
    return R.Ad_real(h) @ phi @ R.Ad_real(np.linalg.inv(h))


@dataclass(frozen=True, eq=False)
class FixedSubalgebra:
    basis: np.ndarray             # 2N x d, orthonormal real columns
    h: np.ndarray | None = None   # sigma = +1 part
    q: np.ndarray | None = None   # sigma = -1 part
    singular_values: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def _orth(M, tol=0.5):
    if M.shape[1] == 0:
        return M
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    return u[:, s > tol]


def fixed_subalgebra(R: RealFormRealization, z, tol: float = 1e-8, band: float = 1e-5) -> FixedSubalgebra:
    """Kernel of ``z - I``, split into ``sigma`` eigenspaces when ``z`` allows it."""
    Z = z.matrix if isinstance(z, RealLinearAutomorphism) else np.asarray(z, dtype=float)
    D = Z.shape[0]
    scale = max(1.0, np.linalg.norm(Z, 2))
    _, s, vt = np.linalg.svd(Z - np.eye(D))
    amb = (s >= tol * scale) & (s < band * scale)
    if np.any(amb):
        raise ThresholdAmbiguity(f"singular values {s[amb]} sit at the kernel cut")
    K = vt[s < tol * scale].T
    sig = R.sigma_r
    compatible = (np.linalg.norm(sig @ Z @ sig - np.linalg.inv(Z)) <= 1e-8 * scale ** 2
                  or np.linalg.norm(sig @ Z @ sig - Z) <= 1e-8 * scale)
    if not compatible:
        return FixedSubalgebra(K, singular_values=s)
    h = _orth((K + sig @ K) / 2)
    q = _orth((K - sig @ K) / 2)
    return FixedSubalgebra(K, h, q, s)


def subspace_distance(U: np.ndarray, V: np.ndarray) -> float:
    """Largest principal-angle sine between two column spans (inf if dims differ)."""
    U, V = _orth(U, 1e-9), _orth(V, 1e-9)
    if U.shape[1] != V.shape[1]:
        return np.inf
    if U.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(V - U @ (U.T @ V), 2))


def real_span(R: RealFormRealization, coeffs: np.ndarray, imaginary: bool = False) -> np.ndarray:
    """Columns of real coefficient vectors (of ``g``) as realified vectors, times ``i`` if asked."""
    c = np.asarray(coeffs, dtype=complex)
    if imaginary:
        c = 1j * c
    return to_real(c.T).T


def expected_centralizer(R: RealFormRealization, root) -> tuple:
    """``(h, q)`` spans of ``m + g[lam]^-tau`` and ``i a + i g[lam]^tau``."""
    dec = restricted_root_decomposition(R)
    tb = dec.tau_stable_basis(root)
    h = np.hstack([real_span(R, dec.centralizer_m), real_span(R, tb.Y)])
    q = np.hstack([real_span(R, dec.a_space, True), real_span(R, tb.X, True)])
    return h, q


# ---------------------------------------------------------------------------
# Iwasawa

@dataclass(frozen=True, eq=False)
class IwasawaFactors:
    k: np.ndarray
    a: np.ndarray
    n: np.ndarray
    log_a: np.ndarray  # ambient coordinates
    error: float


def positive_chamber_element(R: RealFormRealization) -> np.ndarray:
    """Ambient point on which exactly the lexicographically positive roots are positive."""
    d = R.rrs.ambient_dim
    v = np.array([0.1 ** k for k in range(d)])
    b = R.rrs.subspace_basis
    return b.T @ (b @ v)


def iwasawa_decompose(R: RealFormRealization, g) -> IwasawaFactors:
    """``g = k a n`` with ``k`` in ``K``, ``a`` in ``exp a`` and ``n`` in ``N``."""
    g = np.asarray(g, dtype=complex)
    if g.shape != (R.n, R.n) or not R.in_group(g, 1e-9):
        raise NotInGroup("element is not in the real group")
    H0 = R.a_matrix(positive_chamber_element(R))
    w, W = np.linalg.eigh(H0)
    W = W[:, ::-1]
    c = W.conj().T @ g @ W
    Q, T = np.linalg.qr(c)
    ph = np.diag(T) / np.abs(np.diag(T))
    Q = Q * ph
    T = ph.conj()[:, None] * T
    d = np.real(np.diag(T))
    k = W @ Q @ W.conj().T
    a = W @ np.diag(d) @ W.conj().T
    an = W @ T @ W.conj().T
    n = np.diag(1.0 / d) @ T
    n = W @ n @ W.conj().T
    log_a_mat = W @ np.diag(np.log(d)) @ W.conj().T
    C = R.coord_matrices.reshape(len(R.coord_matrices), -1).T
    log_a, *_ = np.linalg.lstsq(C, log_a_mat.ravel(), rcond=None)
    log_a = log_a.real
    err = float(np.linalg.norm(k @ a @ n - g) / max(1.0, np.linalg.norm(g)))
    checks = [
        np.linalg.norm(k.conj().T @ k - np.eye(R.n)),
        np.linalg.norm(R.a_matrix(log_a) - log_a_mat),
        np.linalg.norm(np.linalg.matrix_power(n - np.eye(R.n), R.n)),
        0.0 if R.in_group(k, 1e-8) and R.in_group(n, 1e-8) else 1.0,
    ]
    if max(checks) > 1e-8 or err > 1e-10:
        raise InconsistentSystem(f"Iwasawa factors failed verification ({max(checks):.2e}, {err:.2e})")
    return IwasawaFactors(k, a, n, log_a, err)
