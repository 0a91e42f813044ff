"""Command-line interface.

Every subcommand prints one JSON document on stdout. With ``--out DIR`` (or
``AGSLICE_REPORT_DIR``) the same document is written to ``DIR/<command>.json``
together with any CSV tables and figures. Failures print a JSON diagnostic
``{"error": <class>, "message": ...}`` on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import agpoly, jordan, matrealize as mr, rootsys, sl2model, sl2slice
from .errors import AGError, DegenerateInput
from .serialize import matrix_from_json, matrix_to_json

REPORT_ENV = "AGSLICE_REPORT_DIR"
EXIT_ERROR = 1
EXIT_USAGE = 2


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _out_dir(args) -> Path | None:
    d = args.out or os.environ.get(REPORT_ENV)
    if not d:
        return None
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _label(args) -> rootsys.FormLabel:
    tokens = list(args.form or []) + ([args.form_flag] if args.form_flag else [])
    if not tokens:
        raise DegenerateInput("a form label is required, e.g. 'sl 3 R'")
    return rootsys.FormLabel.parse(tokens)


def _coords(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.replace(";", ",").split(",") if t.strip()])
    except ValueError:
        raise DegenerateInput(f"cannot parse coordinates {text!r}") from None


def _rounding_tol(text: str, rrs) -> float:
    """Boundary band implied by the number of decimals typed in ``--coords``."""
    decimals = []
    for t in text.replace(";", ",").split(","):
        t = t.strip().lower()
        if not t:
            continue
        mant = t.split("e")[0]
        d = len(mant.split(".")[1]) if "." in mant else 0
        if "e" in t:
            d -= int(t.split("e")[1])
        decimals.append(d)
    if not decimals:
        return agpoly.DEFAULT_TOL
    l1 = max(float(np.sum(np.abs(r))) for r in rrs.root_array())
    return max(agpoly.DEFAULT_TOL, l1 * 0.5 * 10.0 ** (-min(decimals)))


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def _real_matrix(M) -> list:
    return [[float(v) for v in row] for row in np.asarray(M)]


def _root_str(r) -> list:
    return [str(a) for a in r]


def _load_group_element(args, complex_group: bool = True):
    """``(R, x)`` from ``--input`` (``{"form": ..., "matrix": ...}``).

    Without ``--input`` a seeded random element of the form's group is used.
    """
    if not args.input:
        R = mr.load_real_form(_label(args))
        rng = np.random.default_rng(args.seed)
        x = R.random_complex_group_element(rng) if complex_group else R.random_group_element(rng)
        return R, x
    with open(args.input) as fh:
        data = json.load(fh)
    form = data.get("form")
    label = rootsys.FormLabel.from_dict(form) if isinstance(form, dict) else rootsys.FormLabel.parse(form)
    R = mr.load_real_form(label)
    x = matrix_from_json(data["matrix"])
    if x.shape != (R.n, R.n):
        raise DegenerateInput(f"matrix must be {R.n}x{R.n} for {label}")
    return R, x


def _pick_root(P, index: int):
    roots = P.roots
    if not 0 <= index < len(roots):
        raise DegenerateInput(f"root index {index} out of range 0..{len(roots) - 1}")
    return roots[index]


# --------------------------------------------------------------------------- commands

def cmd_roots(args, out):
    rrs = rootsys.restricted_root_data(_label(args))
    rep = rrs.to_dict()
    rep["positive_roots"] = [_root_str(r) for r in rrs.positive_roots]
    rep["simple_roots"] = [_root_str(r) for r in rrs.simple_roots]
    if rrs.rank <= rootsys.MAX_ENUMERATION_RANK:
        rep["weyl_order"] = len(rrs.weyl_group())
    return rep


def cmd_polytope(args, out):
    rrs = rootsys.restricted_root_data(_label(args))
    P = agpoly.build(rrs)
    rep = P.to_dict()
    rep["facets"] = [_root_str(r) for r in agpoly.facets(P)]
    if rrs.rank == 1:
        h = np.array([float(c) for c in rootsys.coroot(rrs.positive_roots[0])])
        rep["interval_along_coroot"] = sorted(float(v @ h / (h @ h)) for v in P.vertices)
    if rrs.rank == 2 and out is not None:
        from . import plotting
        poly = agpoly.polygon_2d(P)
        _write_csv(out / "polytope_vertices.csv", ["y1", "y2"], poly)
        plotting.polygon_figure(poly, str(rrs.label), out / "polytope.svg")
        rep["artifacts"] = ["polytope.svg", "polytope_vertices.csv"]
    return rep


def cmd_check_point(args, out):
    rrs = rootsys.restricted_root_data(_label(args))
    P = agpoly.build(rrs)
    if not args.coords:
        raise DegenerateInput("--coords is required")
    A = _coords(args.coords)
    tol = args.tol if args.tol is not None else _rounding_tol(args.coords, rrs)
    st = agpoly.contains(P, A, tol)
    rep = st.to_dict()
    rep["boundary_generic"] = agpoly.is_boundary_generic(P, A, tol=tol)
    rep["root_values"] = [float(v) for v in P.root_values(A)]
    rep["tol"] = tol
    return rep


def _slice(args):
    label = _label(args)
    R = mr.load_real_form(label)
    P = agpoly.build(R.rrs)
    root = _pick_root(P, args.root if args.root is not None else 0)
    if args.coords:
        A = _coords(args.coords)
    else:
        A = agpoly.sample_boundary_generic(P, root, seed=args.seed)
    return R, P, A, root, sl2slice.construct_slice(R, P, A, root)


def cmd_slice(args, out):
    R, P, A, root, sl = _slice(args)
    rep = sl.to_dict()
    rep["form"] = str(R.label)
    iso = sl2slice.isotropy_dimension_check(R, sl.triple, A)
    rep["isotropy"] = {"ok": iso.ok, "fixed_errors": list(iso.fixed_errors), "moved_by": iso.moved_by}
    conj = sl2slice.verify_conjugation_lemma(R, sl.triple, sl.h_basis)
    rep["conjugation"] = {"ok": conj.ok, "residual": conj.residual}
    if out is not None and R.rank == 2:
        from . import plotting
        pts = np.array([P.to_intrinsic(st.point) for st in sl.segment])
        plotting.polygon_figure(agpoly.polygon_2d(P), f"{R.label} slice segment", out / "slice.svg", pts)
        _write_csv(out / "slice_segment.csv", ["y1", "y2", "kind"],
                   [(p[0], p[1], st.kind.value) for p, st in zip(pts, sl.segment)])
        rep["artifacts"] = ["slice.svg", "slice_segment.csv"]
    return rep


def cmd_jordan(args, out):
    if args.input:
        R, x = _load_group_element(args)
    else:
        R, _, _, _, sl = _slice(args)
        x = sl.x
    lift = jordan.lift_jordan(R, x, tol=args.tol if args.tol is not None else 1e-8)
    return {
        "form": str(R.label),
        "x": matrix_to_json(x),
        "s": _real_matrix(lift.s.matrix),
        "u": _real_matrix(lift.u.matrix),
        "N": matrix_to_json(lift.N),
        "certificates": lift.certificates,
        "elliptic": jordan.ellipticity_test(R, x),
    }


def cmd_eta(args, out):
    R, x = _load_group_element(args)
    M = mr.eta(R, x, check=True).matrix
    return {"form": str(R.label), "x": matrix_to_json(x), "basis": "interleaved (B1, iB1, B2, iB2, ...)", "eta": _real_matrix(M)}


def cmd_iwasawa(args, out):
    R, g = _load_group_element(args, complex_group=False)
    f = mr.iwasawa_decompose(R, g)
    return {"form": str(R.label), "g": matrix_to_json(g), "k": matrix_to_json(f.k), "a": matrix_to_json(f.a),
            "n": matrix_to_json(f.n), "log_a": [float(v) for v in f.log_a], "error": f.error}


def cmd_roots_decompose(args, out):
    R = mr.load_real_form(_label(args))
    dec = mr.restricted_root_decomposition(R)
    rep = R.to_dict()
    rep["dim_m"] = dec.centralizer_m.shape[1]
    rep["dim_a"] = dec.a_space.shape[1]
    rep["root_spaces"] = [
        {"root": _root_str(r), "multiplicity": dec.multiplicity(r),
         "measured": [float(v) for v in dec.covectors[r]],
         "table_multiplicity": R.rrs.multiplicities[r]}
        for r in R.rrs.roots
    ]
    return rep


def cmd_sl2_demo(args, out):
    grid = sl2model.gap_grid()
    rep = {"summary": grid.summary(), "interval": sl2model.ag_interval_check(),
           "distance_minus_half_half": sl2model.poincare_distance(-0.5, 0.5),
           "gap_s0.5_z0.1": sl2model.supporting_curve_gap(0.5, 0.1),
           "entire_curve_witness": sl2model.EntireCurveWitness().check([0, 1, 2j, -5 + 3j])}
    if out is not None:
        from . import plotting
        _write_csv(out / "gap_grid.csv", ["s", "x", "y", "gap"], grid.rows)
        plotting.gap_figure(grid.rows, 0.5, out / "gap_grid.svg")
        rep["artifacts"] = ["gap_grid.csv", "gap_grid.svg"]
    return rep


def cmd_verify(args, out):
    from . import verify
    report = verify.verify(seed=args.seed)
    for c in sorted(report.checks, key=lambda c: c.key):
        print(f"{c.status} {c.key} {c.title} (max error {c.max_error:.3g})", file=sys.stderr)
    if out is not None:
        from . import plotting
        keys = [c.key for c in sorted(report.checks, key=lambda c: c.key)]
        recs = sorted(report.checks, key=lambda c: c.key)
        _write_csv(out / "verify_checks.csv", ["key", "title", "status", "max_error", "samples"],
                   [(c.key, c.title, c.status, c.max_error, c.samples) for c in recs])
        plotting.error_figure(keys, [c.max_error for c in recs], [c.status for c in recs],
                              out / "verify_errors.svg")
    return report


COMMANDS = {
    "roots": (cmd_roots, "restricted root system of a form"),
    "polytope": (cmd_polytope, "halfspaces, vertices and facets of the polytope"),
    "check-point": (cmd_check_point, "classify a point of a (ambient coordinates)"),
    "slice": (cmd_slice, "sl2-triple and certificates at a boundary-generic point"),
    "jordan": (cmd_jordan, "Jordan parts and lifted nilpotent of eta(x)"),
    "eta": (cmd_eta, "eta(x) as a real matrix"),
    "iwasawa": (cmd_iwasawa, "k a n factorization of a group element"),
    "roots-decompose": (cmd_roots_decompose, "numerical root decomposition of the matrix model"),
    "sl2-demo": (cmd_sl2_demo, "SL(2,R) model: gap grid, interval, distance checks"),
    "verify": (cmd_verify, "run the full verification sweep"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agslice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("form", nargs="*", help="form label tokens, e.g. sl 3 R")
        p.add_argument("--form", dest="form_flag", help="form label as one string")
        p.add_argument("--coords", help="comma-separated ambient coordinates")
        p.add_argument("--root", type=int, help="index into the sorted root list")
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--tol", type=float)
        p.add_argument("--out", help=f"report directory (default ${REPORT_ENV})")
        p.add_argument("--input", help="JSON file with {form, matrix}")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fn, _ = COMMANDS[args.command]
    try:
        out = _out_dir(args)
        result = fn(args, out)
    except (AGError, OSError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(_dump({"error": type(exc).__name__, "message": str(exc), "command": args.command}))
        return EXIT_ERROR
    if args.command == "verify":
        text = result.to_json()
        status = 0 if result.summary["failed"] == 0 else EXIT_ERROR
    else:
        text = _dump(_to_plain(result))
        status = 0
    sys.stdout.write(text)
    if out is not None:
        (out / f"{args.command}.json").write_text(text)
    return status


def _to_plain(obj):
    from .verify import _clean
    return _clean(obj)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
