"""Command line front end.

Verbs
-----
point      stability report for one ``(beta, e)`` or one mass triple
masses     central configuration of a mass triple
e0-tables  closed-form indices of the circular orbit
atlas      degenerate curves and a region grid, written to files
validate   the acceptance checks

Every number is written with 17 significant digits, in JSON and in CSV.
Errors print a JSON object to stderr; the exit status is 2 for bad input,
3 for integration or convergence failure, 4 for ambiguity or a
classification conflict and 1 for a failed validation.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .atlas import (
    ON_CURVE_TOL,
    order_check,
    region_grid,
    scan_slice,
    scan_slices,
    theorem_prediction,
    trace_curves,
    worker_count,
)
from .central_config import MassTriple, central_config
from .errors import EulerStabError, InputError
from .index_theory import analytic_e0_tables, classify
from .monodromy import DEFAULT_ATOL, DEFAULT_RTOL, EssentialSystem, monodromy
from .spectral import index_pair

__all__ = ["main", "build_parser", "to_json", "fmt_float"]

# a beta typed with six digits sits ~1e-6 from a curve
POINT_NULL_RTOL = 1e-5
POINT_CURVE_TOL = 1e-5


# ----------------------------------------------------------------------
# serialization

def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _plain(obj):
    """Convert numpy scalars, arrays and complex numbers to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _emit(obj, out, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.write(pad + json.dumps(k) + ": ")
            _emit(v, out, indent, level + 1)
            out.write(",\n" if i + 1 < len(obj) else "\n")
        out.write(end + "}")
    elif isinstance(obj, list):
        if not obj or all(not isinstance(v, (dict, list)) for v in obj):
            out.write("[" + ", ".join(_scalar(v) for v in obj) + "]")
            return
        out.write("[\n")
        for i, v in enumerate(obj):
            out.write(pad)
            _emit(v, out, indent, level + 1)
            out.write(",\n" if i + 1 < len(obj) else "\n")
        out.write(end + "]")
    else:
        out.write(_scalar(obj))


def _scalar(v) -> str:
    if isinstance(v, float):
        return fmt_float(v) if math.isfinite(v) else "null"
    return json.dumps(v)


def to_json(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits and non-finite values as null.

    The standard encoder always writes the shortest round-trip repr, so
    the float formatting is done here.
    """
    buf = io.StringIO()
    _emit(_plain(obj), buf, indent, 0)
    return buf.getvalue() + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _write(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# ----------------------------------------------------------------------
# argument helpers

def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from exc
    if n is not None and len(vals) != n:
        raise InputError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _omega(text: str) -> complex:
    vals = _floats(text)
    if len(vals) == 1:
        return complex(vals[0])
    if len(vals) == 2:
        return complex(vals[0], vals[1])
    raise InputError(f"omega must be 're' or 're,im', got {text!r}")


def _load_config(path: str) -> dict:
    """Key-value pairs from a config file (``key = value``, ``#`` comments)."""
    p = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    try:
        p.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise InputError(f"malformed config file {path}: {exc}") from exc
    return {k.replace("-", "_"): v for k, v in p["run"].items()}


def _apply_config(parser, sub, argv):
    """Re-parse with config-file values as defaults so that flags win."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    values = _load_config(args.config)
    known = {a.dest: a for a in sub[args.command]._actions}
    defaults = {}
    for k, v in values.items():
        if k not in known:
            raise InputError(f"unknown config key {k!r} for {args.command}")
        act = known[k]
        if act.type is not None:
            try:
                v = act.type(v)
            except (TypeError, ValueError) as exc:
                raise InputError(f"bad value for {k}: {v!r}") from exc
        defaults[k] = v
    sub[args.command].set_defaults(**defaults)
    return parser.parse_args(argv)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="eulerstab", description="Linear stability of elliptic Euler solutions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    sub = {}

    def add(name, help_text, out_help="output file (default stdout)"):
        p = subs.add_parser(name, help=help_text)
        p.add_argument("--config", help="file of key = value defaults")
        p.add_argument("--out", help=out_help)
        sub[name] = p
        return p

    p = add("point", "stability report at one point")
    p.add_argument("--beta", type=float)
    p.add_argument("--masses", type=str, help="m1,m2,m3")
    p.add_argument("--ecc", type=float, required=False)
    p.add_argument("--omega", type=str, action="append", default=[],
                   help="extra point on the unit circle as 're,im' (repeatable)")
    p.add_argument("--null-rtol", type=float, default=POINT_NULL_RTOL,
                   help="relative size below which eigenvalues count as zero")
    p.add_argument("--rtol", type=float, default=DEFAULT_RTOL)
    p.add_argument("--atol", type=float, default=DEFAULT_ATOL)
    p.add_argument("--no-region", action="store_true", help="skip locating the curves")

    p = add("masses", "central configuration of a mass triple")
    p.add_argument("--masses", type=str, required=False, help="m1,m2,m3")
    p.add_argument("--p", type=float, default=1.0, help="semi-latus rectum")

    p = add("e0-tables", "closed-form circular-orbit indices")
    p.add_argument("--beta", type=str, help="comma-separated beta values")
    p.add_argument("--beta-max", type=float, default=7.0)
    p.add_argument("--steps", type=int, default=71)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = add("atlas", "degenerate curves and region grid",
            out_help="output directory (default atlas_out)")
    p.add_argument("--beta-max", type=float, default=12.0, help="right end of each slice")
    p.add_argument("--e-max", type=float, default=0.9)
    p.add_argument("--e-steps", type=int, default=91, help="slices from e=0 to e-max")
    p.add_argument("--beta-step", type=float, default=0.02, help="scan step before bisection")
    p.add_argument("--grid-beta-steps", type=int, default=25)
    p.add_argument("--grid-e-steps", type=int, default=10)
    p.add_argument("--workers", type=int, default=None,
                   help="process count (default all CPUs, capped by $EULERSTAB_WORKERS)")
    p.set_defaults(out="atlas_out")

    p = add("validate", "run the acceptance checks")
    p.add_argument("--rtol", type=float, default=DEFAULT_RTOL, help="integrator rtol")
    p.add_argument("--atol", type=float, default=None, help="integrator atol")
    p.add_argument("--only", type=str, help="comma-separated check numbers")
    return parser, sub


# ----------------------------------------------------------------------
# commands

def _index_record(ip):
    return {"index": ip.index, "nullity": ip.nullity, "N": ip.N,
            "converged": ip.converged, "ambiguous": ip.ambiguous}


def _region(beta, ecc):
    """Theorem case at ``(beta, e)`` from freshly scanned slices."""
    bm = min(50.0, max(2.0, 1.5 * beta + 1.0))
    while True:
        sp = scan_slice(1, ecc, bm)
        sm = scan_slice(-1, ecc, bm)
        c1, c2 = sp.crossings, sm.crossings
        gammas = [0.5 * (c1[2 * k] + c1[2 * k + 1]) for k in range(len(c1) // 2)]
        pairs = [(c2[2 * k], c2[2 * k + 1]) for k in range(len(c2) // 2)]
        try:
            return theorem_prediction(beta, pairs, gammas, tol=POINT_CURVE_TOL)
        except InputError:
            if bm >= 50.0:
                raise
            bm = min(50.0, 2 * bm)


def cmd_point(args):
    report = {}
    if args.masses:
        cc = central_config(MassTriple(*_floats(args.masses, 3)))
        beta = cc.beta
        report["central_config"] = _cc_record(cc)
    elif args.beta is not None:
        beta = args.beta
    else:
        raise InputError("point needs --beta or --masses")
    if args.ecc is None:
        raise InputError("point needs --ecc")
    ecc = args.ecc
    system = EssentialSystem(beta, ecc)
    mono = monodromy(system, rtol=args.rtol, atol=args.atol)
    cls = classify(mono, snap_tol=max(1e-5, args.null_rtol),
                   null_rtol=max(1e-8, args.null_rtol))
    omegas = [1.0, -1.0] + [_omega(w) for w in args.omega]
    indices = {}
    for w in omegas:
        if abs(abs(w) - 1) > 1e-12:
            raise InputError(f"omega must lie on the unit circle, got {w}")
        ip = index_pair(beta, ecc, w, null_rtol=args.null_rtol)
        rec = _index_record(ip)
        rec["monodromy_nullity"] = mono.kernel_dimension(w, rtol=max(1e-8, args.null_rtol))
        key = "1" if w == 1 else "-1" if w == -1 else f"{w.real:.6g}{w.imag:+.6g}i"
        indices[key] = rec
    report.update({
        "beta": beta,
        "ecc": ecc,
        "monodromy": {
            "entries": mono.entries,
            "eigenvalues": list(mono.eigenvalues()),
            "symplectic_defect": mono.symplectic_defect,
            "det_defect": mono.det_defect,
            "backward_residual": mono.backward_residual,
        },
        "indices": indices,
        "normal_form": cls.label,
        "normal_form_detail": str(cls.tag) if cls.tag is not None else None,
        "classification_notes": list(cls.notes),
    })
    if not args.no_region:
        pred = _region(beta, ecc)
        report["region"] = {
            "case": pred.case, "n": pred.n, "i_1": pred.i_plus, "nu_1": pred.nu_plus,
            "i_-1": pred.i_minus, "nu_-1": pred.nu_minus, "normal_form": pred.label,
        }
        got = (indices["1"]["index"], indices["1"]["nullity"],
               indices["-1"]["index"], indices["-1"]["nullity"], cls.label)
        want = (pred.i_plus, pred.nu_plus, pred.i_minus, pred.nu_minus, pred.label)
        report["region"]["conflict"] = got != want
    _write(to_json(report), args.out)
    if report.get("region", {}).get("conflict"):
        return 4
    return 0


def _cc_record(cc):
    return {"masses": list(cc.masses.as_tuple()), "x": cc.x, "alpha": cc.alpha,
            "beta": cc.beta, "delta": cc.delta, "mu": cc.mu, "sigma": cc.sigma,
            "p": cc.p, "quintic_residual": cc.residual}


def cmd_masses(args):
    if not args.masses:
        raise InputError("masses needs --masses m1,m2,m3")
    cc = central_config(MassTriple(*_floats(args.masses, 3)), p=args.p)
    _write(to_json(_cc_record(cc)), args.out)
    return 0


E0_HEADER = ("beta", "theta", "alpha1", "i_1", "nu_1", "i_-1", "nu_-1", "branch")


def cmd_e0_tables(args):
    if args.beta:
        betas = _floats(args.beta)
    else:
        if args.steps < 2:
            raise InputError("--steps must be at least 2")
        betas = list(np.linspace(0.0, args.beta_max, args.steps))
    tables = [analytic_e0_tables(b) for b in betas]
    if args.format == "csv":
        rows = [(t.beta, t.theta, t.alpha1, t.i_plus, t.nu_plus, t.i_minus, t.nu_minus, t.branch)
                for t in tables]
        _write(_csv_text(E0_HEADER, rows), args.out)
    else:
        _write(to_json([t.as_dict() for t in tables]), args.out)
    return 0


CURVE_HEADER = ("label", "e", "beta", "multiplicity", "N_used")
GRID_HEADER = ("e", "beta", "i_1", "nu_1", "i_-1", "nu_-1", "normal_form")


def cmd_atlas(args):
    if not (0 < args.e_max < 1) or args.e_steps < 2:
        raise InputError("need 0 < e_max < 1 and e_steps >= 2")
    if args.grid_beta_steps < 2 or args.grid_e_steps < 2:
        raise InputError("grid steps must be at least 2")
    e_grid = [float(e) for e in np.linspace(0.0, args.e_max, args.e_steps)]
    workers = worker_count(args.workers)
    curves = []
    for om in (1.0, -1.0):
        slices = scan_slices(om, e_grid, args.beta_max, args.beta_step, workers)
        curves += trace_curves(om, e_grid, args.beta_max, slices=slices)
    curves.sort(key=lambda c: (c.expected_start, c.label.endswith("+")))
    orders = [order_check(curves, e) for e in e_grid]
    betas = np.linspace(0.0, args.beta_max, args.grid_beta_steps)
    eccs = np.linspace(0.0, args.e_max, args.grid_e_steps)
    grid = region_grid(betas, eccs, workers=workers)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = [r for c in curves for r in c.rows()]
    (out / "curves.csv").write_text(_csv_text(CURVE_HEADER, rows))
    (out / "grid.csv").write_text(_csv_text(GRID_HEADER, grid.rows()))
    summary = {
        "config": {"beta_max": args.beta_max, "e_max": args.e_max, "e_steps": args.e_steps,
                   "beta_step": args.beta_step, "grid_beta_steps": args.grid_beta_steps,
                   "grid_e_steps": args.grid_e_steps, "on_curve_tol": ON_CURVE_TOL},
        "curves": [{
            "label": c.label, "omega": c.omega, "expected_start": c.expected_start,
            "start_beta": c.start_beta, "samples": len(c.samples),
            "e_last": c.samples[-1][0], "max_gap": max(c.gap),
            "split": any(g > 1e-6 for g in c.gap) if c.omega == -1 else False,
            "diagnostics": list(c.diagnostics),
        } for c in curves],
        "ordering_violations": [{"e": o.ecc, "pairs": [list(p) for p in o.violations]}
                                for o in orders if not o.ok],
    }
    (out / "atlas.json").write_text(to_json(summary))
    sys.stdout.write(f"wrote {len(curves)} curves and {len(grid.cells)} grid cells to {out}\n")
    return 0


def cmd_validate(args):
    from .validation import run_checks

    only = None
    if args.only:
        only = {int(t) for t in args.only.split(",")}
    results = run_checks(rtol=args.rtol, atol=args.atol, only=only,
                         progress=lambda r: print(r.line(), flush=True))
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed} of {len(results)} checks passed")
    if args.out:
        Path(args.out).write_text(to_json([r.as_dict() for r in results]))
    return 1 if failed else 0


COMMANDS = {"point": cmd_point, "masses": cmd_masses, "e0-tables": cmd_e0_tables,
            "atlas": cmd_atlas, "validate": cmd_validate}


def main(argv=None) -> int:
    parser, sub = build_parser()
    try:
        args = _apply_config(parser, sub, argv)
        return COMMANDS[args.command](args)
    except EulerStabError as exc:
        sys.stderr.write(to_json(exc.to_dict()))
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
