"""End-to-end verification sweep: eleven numbered checks with seeded sampling.

Each check returns a :class:`CheckRecord`; the report is deterministic for a
given seed (no timings, checks sorted by key, ``sort_keys`` JSON). Runtime is
measured separately by callers that care about it.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.integrate import quad
from scipy.optimize import linprog

from . import agpoly, jordan, matrealize as mr, rootsys, sl2model, sl2slice
from .errors import AGError, ClusterAmbiguity

SLICE_FORMS = ("sl 2 R", "sl 3 R", "su 2 1", "sp 2 R")
SMALL_SIZE = 4
MAX_RESAMPLES = 20


@dataclass
class CheckRecord:
    key: str
    title: str
    anchor: str
    status: str
    max_error: float
    samples: int
    seed: int
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


@dataclass
class VerificationReport:
    suite: str
    seed: int
    checks: list

    @property
    def summary(self) -> dict:
        passed = sum(c.passed for c in self.checks)
        return {"total": len(self.checks), "passed": passed, "failed": len(self.checks) - passed}

    def to_dict(self) -> dict:
        checks = sorted(self.checks, key=lambda c: c.key)
        return {"suite": self.suite, "seed": self.seed, "summary": self.summary,
                "checks": [asdict(c) for c in checks]}

    def to_json(self) -> str:
        return json.dumps(_clean(self.to_dict()), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d) -> "VerificationReport":
        return cls(d["suite"], d["seed"], [CheckRecord(**c) for c in d["checks"]])


def _clean(obj):
    """Plain JSON types; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    return obj


def _record(key, title, anchor, ok, err, samples, seed, **detail) -> CheckRecord:
    return CheckRecord(key, title, anchor, "PASS" if ok else "FAIL", float(err), int(samples), int(seed),
                       _clean(detail))


def _rng(seed, k):
    return np.random.default_rng([seed, k])


def _root_str(r):
    return "(" + ",".join(str(a) for a in r) + ")"


# --------------------------------------------------------------------------- 1

def check_interval(seed: int) -> CheckRecord:
    rep = sl2model.ag_interval_check()
    ok = rep["endpoint_error"] <= 1e-12 and rep["midpoint"] == "Interior" and rep["segment_interior_ok"]
    return _record("01", "rank-one interval", "polytope of sl(2,R) is (-pi/4, pi/4) h", ok,
                   rep["endpoint_error"], 1, seed, endpoints=rep["endpoints"])


# --------------------------------------------------------------------------- 2

def pair_lp_vertices(P: agpoly.AGPolytope) -> np.ndarray:
    """Independent vertex oracle: an LP feasibility problem per pair of root hyperplanes."""
    R = P.intrinsic_roots()
    pts = []
    for i in range(len(R)):
        for j in range(i + 1, len(R)):
            M = R[[i, j]]
            if np.linalg.matrix_rank(M) < 2:
                continue
            res = linprog(np.zeros(2), A_ub=R, b_ub=np.full(len(R), agpoly.HALF_PI),
                          A_eq=M, b_eq=np.full(2, agpoly.HALF_PI), bounds=[(None, None)] * 2,
                          method="highs")
            if res.status == 0:
                y = res.x
                if not any(np.linalg.norm(y - q) < 1e-9 for q in pts):
                    pts.append(y)
    return np.array([P.to_ambient(y) for y in pts])


def _same_set(a, b, tol) -> float:
    if len(a) != len(b):
        return np.inf
    return max(max(min(np.linalg.norm(x - y) for y in b) for x in a),
               max(min(np.linalg.norm(x - y) for y in a) for x in b))


def check_a2_polytope(seed: int) -> CheckRecord:
    rrs = rootsys.restricted_root_data("sl 3 R")
    P = agpoly.build(rrs)
    V = agpoly.vertices(P)
    oracle = pair_lp_vertices(P)
    err = _same_set(V, oracle, 1e-9)
    weyl_err = 0.0
    for w in rrs.weyl_group():
        W = w.as_array()
        weyl_err = max(weyl_err, _same_set(V, V @ W.T, 1e-9))
    ok = err <= 1e-9 and weyl_err <= 1e-9
    return _record("02", "A2 vertices against LP oracle", "hexagon of sl(3,R), Weyl closed", ok,
                   max(err, weyl_err), len(V), seed, vertices=len(V), oracle_vertices=len(oracle),
                   weyl_order=len(rrs.weyl_group()))


# --------------------------------------------------------------------------- 3

def _random_a(R, rng, scale=1.0):
    b = R.rrs.subspace_basis
    return b.T @ (scale * rng.standard_normal(b.shape[0]))


def check_block_law(seed: int, n_samples: int = 100) -> CheckRecord:
    worst, total, per_form = 0.0, 0, {}
    for k, label in enumerate(rootsys.supported_labels(SMALL_SIZE)):
        R = mr.load_real_form(label)
        dec = mr.restricted_root_decomposition(R)
        rng = _rng(seed, 300 + k)
        roots = R.rrs.roots
        form_worst = 0.0
        for _ in range(n_samples):
            A = _random_a(R, rng)
            r = roots[rng.integers(len(roots))]
            j = int(rng.integers(dec.multiplicity(r)))
            B = mr.ad_exp_iA_block(R, A, r, j)
            D = mr.ad_exp_iA_block_direct(R, A, r, j)
            form_worst = max(form_worst, float(np.max(np.abs(B - D))))
        per_form[str(label)] = form_worst
        worst = max(worst, form_worst)
        total += n_samples
    return _record("03", "cosh/sinh block law", "Ad(exp iA) on tau-stable root planes", worst <= 1e-10,
                   worst, total, seed, per_form=per_form)


# --------------------------------------------------------------------------- 4

def check_eta_identities(seed: int, n_samples: int = 50) -> CheckRecord:
    worst, total, per_form = 0.0, 0, {}
    for k, label in enumerate(rootsys.supported_labels()):
        R = mr.load_real_form(label)
        rng = _rng(seed, 400 + k)
        errs = [0.0, 0.0, 0.0]
        for _ in range(n_samples):
            x = R.random_complex_group_element(rng)
            h = R.random_group_element(rng)
            ex = mr.eta(R, x).matrix
            errs[0] = max(errs[0], np.linalg.norm(mr.eta(R, h @ x).matrix - mr.group_action(R, h, ex), 2))
            errs[1] = max(errs[1], np.linalg.norm(mr.eta(R, R.tau_group(x)).matrix - R.tau_r @ ex @ R.tau_r, 2))
            errs[2] = max(errs[2], np.linalg.norm(R.sigma_r @ ex @ R.sigma_r - np.linalg.inv(ex), 2))
        per_form[str(label)] = {"equivariance": errs[0], "tau": errs[1], "sigma": errs[2]}
        worst = max(worst, *errs)
        total += n_samples
    return _record("04", "eta identities", "equivariance, tau-intertwining, sigma-inversion", worst <= 1e-8,
                   worst, total, seed, per_form=per_form)


# --------------------------------------------------------------------------- 5, 6, 7

def _slice_samples(R, P, seed_base, count, margin=0.05):
    """Yield ``(root, A, slice)`` cycling over facets; clustering ambiguities trigger a resample."""
    faces = agpoly.facets(P)
    made, attempt, resamples = 0, 0, 0
    while made < count:
        r = faces[made % len(faces)]
        try:
            A = agpoly.sample_boundary_generic(P, r, seed=seed_base + attempt, margin=margin)
            sl = sl2slice.construct_slice(R, P, A, r)
        except ClusterAmbiguity:
            resamples += 1
            attempt += 1
            if resamples > MAX_RESAMPLES * count:
                raise
            continue
        attempt += 1
        made += 1
        yield r, A, sl, resamples


def check_jordan_lifting(seed: int, n_samples: int = 25) -> CheckRecord:
    worst, total, failures, per_form = 0.0, 0, [], {}
    for k, label in enumerate(rootsys.supported_labels(SMALL_SIZE)):
        R = mr.load_real_form(label)
        P = agpoly.build(R.rrs)
        form_worst, n_err, resamples = 0.0, 0.0, 0
        for r, A, sl, resamples in _slice_samples(R, P, 10_000 * seed + 500 * k, n_samples):
            try:
                lift = jordan.lift_jordan(R, sl.x)
                form_worst = max(form_worst, *lift.certificates.values())
                n_err = max(n_err, float(np.linalg.norm(lift.N + 2 * sl.triple.E)))
                if jordan.ellipticity_test(R, sl.x):
                    failures.append(f"{label}: exp(E)exp(iA) reported elliptic")
                a_exp = sla.expm(1j * R.a_matrix(A))
                if not jordan.ellipticity_test(R, a_exp):
                    failures.append(f"{label}: exp(iA) reported non-elliptic")
            except AGError as exc:
                failures.append(f"{label} {_root_str(r)}: {type(exc).__name__}: {exc}")
        per_form[str(label)] = {"certificate_error": form_worst, "N_plus_2E": n_err, "resamples": resamples}
        worst = max(worst, form_worst)
        total += n_samples
    ok = worst <= 1e-8 and not failures
    return _record("05", "Jordan lifting round trip", "certificates of the lifted nilpotent", ok, worst,
                   total, seed, failures=failures[:10], per_form=per_form)


def check_decay(seed: int) -> CheckRecord:
    worst, total, failures, rows = 0.0, 0, [], []
    for k, label in enumerate(SLICE_FORMS):
        R = mr.load_real_form(label)
        P = agpoly.build(R.rrs)
        for r, A, sl, _ in _slice_samples(R, P, 10_000 * seed + 600 + 50 * k, len(agpoly.facets(P))):
            rep = jordan.degeneration_decay(R, sl.x, sl.triple.H, sl.semisimple_part)
            dev = max(abs(a / b - 1) for a, b in zip(rep.ratios, rep.expected))
            worst = max(worst, dev)
            total += 1
            rows.append({"form": str(R.label), "root": _root_str(r), "distances": list(rep.distances),
                         "ratios": list(rep.ratios)})
            if not rep.ok:
                failures.append(f"{R.label} {_root_str(r)}")
    return _record("06", "degeneration decay", "eta(exp(tH) x) tends to s at rate exp(2t)",
                   not failures, worst, total, seed, failures=failures, samples_detail=rows,
                   expected_ratios=[float(np.exp(2)), float(np.exp(4))])


def check_slices(seed: int) -> CheckRecord:
    worst, total, failures, rows = 0.0, 0, [], []
    for k, label in enumerate(SLICE_FORMS):
        R = mr.load_real_form(label)
        P = agpoly.build(R.rrs)
        for r in agpoly.facets(P):
            try:
                A = agpoly.sample_boundary_generic(P, r, seed=10_000 * seed + 700 + k)
                sl = sl2slice.construct_slice(R, P, A, r, n_segment=50)
                err = max(sl.certificates["E - F in R i h_lambda"], sl.certificates["coefficient = 1"])
                interior = sum(st.kind is agpoly.Kind.INTERIOR for st in sl.segment[1:-1])
                worst = max(worst, err)
                rows.append({"form": str(R.label), "root": _root_str(r), "coroot_error": err,
                             "interior_samples": interior})
                if interior != 50:
                    failures.append(f"{R.label} {_root_str(r)}: {interior} interior samples")
            except AGError as exc:
                failures.append(f"{R.label} {_root_str(r)}: {type(exc).__name__}: {exc}")
            total += 1
    ok = worst <= 1e-8 and not failures
    return _record("07", "slice certificates", "E - F = i h_lambda and the segment stays inside", ok,
                   worst, total, seed, failures=failures, faces=rows)


# --------------------------------------------------------------------------- 8

def check_centralizers(seed: int) -> CheckRecord:
    worst, total, failures = 0.0, 0, []
    for k, label in enumerate(rootsys.supported_labels()):
        R = mr.load_real_form(label)
        dec = mr.restricted_root_decomposition(R)
        P = agpoly.build(R.rrs)
        for r in agpoly.facets(P):
            A = agpoly.sample_boundary_generic(P, r, seed=10_000 * seed + 800 + k)
            z = mr.eta(R, sla.expm(1j * R.a_matrix(A)))
            fx = mr.fixed_subalgebra(R, z)
            h, q = mr.expected_centralizer(R, r)
            expected = dec.centralizer_m.shape[1] + 2 * dec.multiplicity(r) + R.rank
            dist = max(mr.subspace_distance(fx.h, h), mr.subspace_distance(fx.q, q))
            worst = max(worst, dist)
            total += 1
            if fx.dim != expected or dist > 1e-8:
                failures.append(f"{R.label} {_root_str(r)}: dim {fx.dim} vs {expected}")
    return _record("08", "boundary centralizer dimensions", "m + g[lam]^-tau + i a + i g[lam]^tau",
                   not failures, worst, total, seed, failures=failures)


# --------------------------------------------------------------------------- 9

def geodesic_integral(a: float, b: float) -> float:
    """Length of the diameter segment ``[a, b]`` for the metric ``2|dx|/(1 - x^2)``."""
    val, _ = quad(lambda x: 2.0 / (1.0 - x * x), a, b, epsabs=1e-13, epsrel=1e-13)
    return float(val)


def check_supporting_curves(seed: int) -> CheckRecord:
    summ = sl2model.gap_grid().summary()
    d = sl2model.poincare_distance(-0.5, 0.5)
    e1 = abs(d - 2 * np.arctanh(0.8))
    e2 = abs(d - geodesic_integral(-0.5, 0.5))
    ok = (summ["nonnegative"] and summ["zero_only_at_origin"] and summ["monotone_along_real_axis"]
          and summ["min_gap_away_from_origin"] > 1e-6 and e1 <= 1e-9 and e2 <= 1e-6)
    return _record("09", "supporting-curve gap grid", "d(-s+z, s+z) >= d(-s, s)", ok, max(e1, e2),
                   summ["points"], seed, grid=summ, distance=d, formula_error=e1, integral_error=e2)


# --------------------------------------------------------------------------- 10

def check_normal_crossing(seed: int, n_families: int = 20, m: int = 2) -> CheckRecord:
    rng = _rng(seed, 1000)
    failures = []
    for i in range(n_families):
        fam = rng.standard_normal((2 * m + 1, m + 1)) + 1j * rng.standard_normal((2 * m + 1, m + 1))
        if not rootsys.normal_crossing_check(fam):
            failures.append(f"family {i} rejected")
        k = int(rng.integers(len(fam)))
        pos = int(rng.integers(len(fam) + 1))
        dup = np.insert(fam, pos, fam[k], axis=0)
        src = k + 1 if k < pos else k + 2
        want = tuple(sorted((src, pos + 1)))
        res = rootsys.normal_crossing_check(dup)
        if res.ok or res.witness != want:
            failures.append(f"family {i} duplicate: witness {res.witness}, want {want}")
    return _record("10", "normal crossing families", "generic 2m+1 hyperplanes in P^m", not failures, 0.0,
                   2 * n_families, seed, failures=failures)


# --------------------------------------------------------------------------- driver

CHECKS = {
    "01": check_interval, "02": check_a2_polytope, "03": check_block_law, "04": check_eta_identities,
    "05": check_jordan_lifting, "06": check_decay, "07": check_slices, "08": check_centralizers,
    "09": check_supporting_curves, "10": check_normal_crossing,
}


def run_suite(seed: int = 7, only=None, timings: dict | None = None) -> VerificationReport:
    checks = []
    for key, fn in CHECKS.items():
        if only is not None and key not in only:
            continue
        t0 = time.perf_counter()
        try:
            rec = fn(seed)
        except Exception as exc:  # a crashed check is a failed check, never a missing one
            rec = _record(key, fn.__name__, "", False, np.inf, 0, seed, error=f"{type(exc).__name__}: {exc}")
        if timings is not None:
            timings[rec.key] = time.perf_counter() - t0
        checks.append(rec)
    return VerificationReport("agslice-verify", seed, checks)


def verify(seed: int = 7, timings: dict | None = None) -> VerificationReport:
    """Run checks 1-10 twice and add check 11 comparing the two serialized reports."""
    first = run_suite(seed, timings=timings)
    second = run_suite(seed)
    same = first.to_json() == second.to_json()
    first.checks.append(_record("11", "determinism", "two runs with one seed serialize identically", same,
                                0.0 if same else 1.0, 2, seed))
    return first
