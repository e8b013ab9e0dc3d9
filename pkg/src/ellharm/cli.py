"""Command-line frontend.

Subcommands
-----------
transform     Cartesian -> ellipsoidal coordinate table with round-trip residuals
lame          evaluate a first-kind function E_n^p on a grid of s values
harmonic      evaluate interior/exterior solid harmonics at Cartesian points
gamma         table of normalization constants up to a degree
coulomb       degree-by-degree convergence of the Coulomb-kernel expansion
solvation     semi-analytic solvation energy for a charge file
born-limit    near-sphere sweep of the solvation energy toward the Born value
bem-validate  BEM refinement study cross-checked against the semi-analytic energy

Exit codes: 0 success, 2 validation error, 3 numerical failure.  Failures
emit a machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys as _sys

import numpy as np

from . import bem, coords, harmonics, solvation
from .errors import NumericalError, ValidationError
from .lame1 import eval_lame, lame_function

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


# ----------------------------------------------------------------------
# plumbing
# ----------------------------------------------------------------------

def _parse_triple(text, name):
    parts = text.split(",")
    if len(parts) != 3:
        raise ValidationError(f"{name} must be three comma-separated numbers")
    try:
        return tuple(float(v) for v in parts)
    except ValueError as exc:
        raise ValidationError(f"bad {name}: {exc}") from None


def read_charge_file(path):
    """One charge per line: ``x y z q``, blank lines and # comments ignored."""
    charges = []
    try:
        fh = open(path)
    except OSError as exc:
        raise ValidationError(f"cannot read charge file {path}: {exc}") from None
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValidationError(
                    f"{path}:{lineno}: expected 'x y z q', got {line!r}")
            try:
                x, y, z, q = map(float, parts)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: non-numeric field") from None
            charges.append(solvation.PointCharge(x, y, z, q))
    if not charges:
        raise ValidationError(f"charge file {path} contains no charges")
    return charges


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_table(args, config, columns, rows, units, extra=None):
    """Emit rows as CSV (default) or JSON, to --out or stdout."""
    payload_hash = _config_hash(config)
    if args.format == "json":
        doc = {
            "config": config,
            "config_hash": payload_hash,
            "units": units,
            "columns": columns,
            "rows": rows,
        }
        if extra:
            doc["diagnostics"] = extra
        text = json.dumps(doc, indent=2, default=float) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# config_hash: {payload_hash}\n")
        buf.write(f"# units: {units}\n")
        for key, val in sorted(config.items()):
            buf.write(f"# {key}: {val}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row[c] for c in columns])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)


def _system(args):
    a, b, c = _parse_triple(args.semiaxes, "--semiaxes")
    return coords.new_system(a, b, c)


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_transform(args):
    sys = _system(args)
    pts = []
    if args.brick:
        n = args.brick
        # n^3 points per octant strictly inside each octant's valid box
        base = np.linspace(0.15, 0.85, n)
        for sx in (1, -1):
            for sy in (1, -1):
                for sz in (1, -1):
                    for x in base * sys.a * 0.9:
                        for y in base * sys.b * 0.9:
                            for z in base * sys.c * 0.9:
                                pts.append((sx * x, sy * y, sz * z))
    elif args.points:
        for chunk in args.points.split(";"):
            pts.append(_parse_triple(chunk, "--points entry"))
    else:
        raise ValidationError("transform needs --points or --brick")
    rows = []
    for (x, y, z) in pts:
        p = coords.cart_to_ell(sys, x, y, z)
        xr, yr, zr = coords.ell_to_cart(sys, p)
        rows.append({
            "x": x, "y": y, "z": z,
            "lambda": p.lam, "mu": p.mu, "nu": p.nu,
            "s_lambda": p.s_lambda, "s_mu": p.s_mu, "s_nu": p.s_nu,
            "roundtrip_residual": max(abs(xr - x), abs(yr - y), abs(zr - z)),
        })
    config = {"semiaxes": args.semiaxes, "subcommand": "transform",
              "brick": args.brick, "points": args.points}
    write_table(args, config,
                ["x", "y", "z", "lambda", "mu", "nu",
                 "s_lambda", "s_mu", "s_nu", "roundtrip_residual"],
                rows, units="lengths in input units (Angstrom)")


def cmd_lame(args):
    sys = _system(args)
    f = lame_function(sys, args.degree, args.p, n_max=max(args.degree, args.order))
    svals = [float(v) for v in args.s.split(",")]
    rows = [{"s": s, "E": eval_lame(f, s)} for s in svals]
    config = {"semiaxes": args.semiaxes, "subcommand": "lame",
              "degree": args.degree, "p": args.p, "s": args.s}
    write_table(args, config, ["s", "E"], rows,
                units="dimensionless (leading coefficient unity)",
                extra={"separation_constant": f.separation_constant,
                       "class": f.cls.tag})


def cmd_harmonic(args):
    sys = _system(args)
    idx = harmonics.HarmonicIndex(args.degree, args.p)
    rows = []
    for chunk in args.points.split(";"):
        x, y, z = _parse_triple(chunk, "--points entry")
        pt = coords.cart_to_ell(sys, x, y, z)
        row = {"x": x, "y": y, "z": z,
               "interior": harmonics.interior_solid(sys, idx, pt)}
        if abs(pt.lam) > sys.k * (1 + 1e-12):
            row["exterior"] = harmonics.exterior_solid(sys, idx, pt)
        else:
            row["exterior"] = float("nan")
        rows.append(row)
    config = {"semiaxes": args.semiaxes, "subcommand": "harmonic",
              "degree": args.degree, "p": args.p, "points": args.points}
    write_table(args, config, ["x", "y", "z", "interior", "exterior"], rows,
                units="harmonics dimensionless in Angstrom^n scaling")


def cmd_gamma(args):
    sys = _system(args)
    table = harmonics.build_normalization_table(sys, args.order,
                                                quad_order=args.quad_order)
    rows = [{"n": n, "p": p, "gamma": table.gamma[(n, p)],
             "error_estimate": table.error_estimates[(n, p)]}
            for (n, p) in sorted(table.gamma)]
    config = {"semiaxes": args.semiaxes, "subcommand": "gamma",
              "order": args.order, "quad_order": args.quad_order}
    write_table(args, config, ["n", "p", "gamma", "error_estimate"], rows,
                units="Angstrom^(2n+1) scaling per index")


def cmd_coulomb(args):
    sys = _system(args)
    source = _parse_triple(args.source, "--source")
    field = _parse_triple(args.field, "--field")
    exp = harmonics.coulomb_expand(sys, source, field, args.order)
    exact = 1.0 / float(np.linalg.norm(np.subtract(field, source)))
    rows = []
    for n in range(args.order + 1):
        degree_diag = [exp.diagnostics[(n, p)] for p in range(1, 2 * n + 2)]
        rows.append({
            "n": n,
            "partial_sum": exp.partial_sums[n],
            "abs_error": abs(exp.partial_sums[n] - exact),
            "max_absE": max(d["absE"] for d in degree_diag),
            "max_absF": max(d["absF"] for d in degree_diag),
            "min_gamma": min(d["gamma"] for d in degree_diag),
            "cancellation_flag": int(n in exp.cancellation_degrees),
        })
    config = {"semiaxes": args.semiaxes, "subcommand": "coulomb",
              "source": args.source, "field": args.field, "order": args.order}
    write_table(args, config,
                ["n", "partial_sum", "abs_error", "max_absE", "max_absF",
                 "min_gamma", "cancellation_flag"],
                rows, units="potential in 1/Angstrom (unit charges)",
                extra={"exact": exact,
                       "cancellation_degrees": exp.cancellation_degrees})


def cmd_solvation(args):
    sys = _system(args)
    if not args.charges:
        raise ValidationError("solvation needs --charges FILE")
    charges = read_charge_file(args.charges)
    diel = solvation.DielectricModel(args.eps1, args.eps2)
    report = solvation.solvation_energy(sys, charges, diel, N=args.order)
    rows = [{"N": report.N, "energy_kcal_per_mol": report.energy_kcal,
             "energy_e2_per_angstrom": report.energy_gaussian}]
    config = {"semiaxes": args.semiaxes, "subcommand": "solvation",
              "charges": args.charges, "eps1": args.eps1, "eps2": args.eps2,
              "order": args.order}
    write_table(args, config,
                ["N", "energy_kcal_per_mol", "energy_e2_per_angstrom"],
                rows, units="kcal/mol and e^2/Angstrom")


def cmd_born_limit(args):
    deltas = [float(v) for v in args.deltas.split(",")]
    diel = solvation.DielectricModel(args.eps1, args.eps2)
    exact = solvation.born_energy(1.0, 1.0, diel)
    rows = []
    for d in deltas:
        sys = coords.new_system(1.0 + d, 1.0 + d / 5.0, 1.0 + d / 10.0)
        report = solvation.solvation_energy(
            sys, [solvation.PointCharge(0, 0, 0, 1.0)], diel, N=args.order)
        rows.append({"delta": d, "energy_kcal_per_mol": report.energy_kcal,
                     "born_kcal_per_mol": exact,
                     "deviation": abs(report.energy_kcal - exact)})
    config = {"subcommand": "born-limit", "deltas": args.deltas,
              "eps1": args.eps1, "eps2": args.eps2, "order": args.order}
    write_table(args, config,
                ["delta", "energy_kcal_per_mol", "born_kcal_per_mol", "deviation"],
                rows, units="kcal/mol")


def cmd_bem_validate(args):
    sys = _system(args)
    if not args.charges:
        raise ValidationError("bem-validate needs --charges FILE")
    charges = read_charge_file(args.charges)
    diel = solvation.DielectricModel(args.eps1, args.eps2)
    semi = solvation.solvation_energy(sys, charges, diel, N=args.order)
    refinements = [int(v) for v in args.refinements.split(",")]
    study = bem.convergence_study(
        lambda r: bem.mesh_ellipsoid(sys, r), charges, diel, refinements,
        reference=semi.energy_kcal)
    rows = [{"refinement": r, "panels": n, "energy_kcal_per_mol": e,
             "deviation": d}
            for r, n, e, d in zip(refinements, study.panel_counts,
                                  study.energies, study.deviations)]
    config = {"semiaxes": args.semiaxes, "subcommand": "bem-validate",
              "charges": args.charges, "eps1": args.eps1, "eps2": args.eps2,
              "order": args.order, "refinements": args.refinements}
    write_table(args, config,
                ["refinement", "panels", "energy_kcal_per_mol", "deviation"],
                rows, units="kcal/mol",
                extra={"semi_analytic_kcal": semi.energy_kcal,
                       "fitted_slope": study.fitted_slope,
                       "richardson_limit_kcal": study.richardson_limit})


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def _add_common(parser, suppress):
    """Common flags, attachable before or after the subcommand.

    The copies attached to subparsers use SUPPRESS defaults so they do not
    clobber values given before the subcommand name.
    """
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--semiaxes", default=d("2,1.5,1"),
                        help="a,b,c semiaxes in Angstrom (default 2,1.5,1)")
    parser.add_argument("--order", type=int, default=d(12),
                        help="truncation degree N (default 12)")
    parser.add_argument("--eps1", type=float, default=d(4.0),
                        help="interior permittivity (default 4)")
    parser.add_argument("--eps2", type=float, default=d(80.0),
                        help="exterior permittivity (default 80)")
    parser.add_argument("--charges", default=d(None),
                        help="charge file: 'x y z q' per line, # comments")
    parser.add_argument("--format", choices=("csv", "json"), default=d("csv"),
                        help="output format (default csv)")
    parser.add_argument("--out", default=d(None),
                        help="output path (default stdout)")


def build_parser():
    ap = argparse.ArgumentParser(prog="ellharm", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_common(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        p = sub.add_parser(name, **kw)
        _add_common(p, suppress=True)
        return p

    p = add_parser("transform", help="coordinate transform table")
    p.add_argument("--points", help="semicolon-separated x,y,z triples")
    p.add_argument("--brick", type=int,
                   help="generate an n^3-per-octant test brick (8*n^3 rows)")
    p.set_defaults(func=cmd_transform)

    p = add_parser("lame", help="first-kind function values")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--p", type=int, required=True, help="order 1..2n+1")
    p.add_argument("--s", required=True, help="comma-separated evaluation points")
    p.set_defaults(func=cmd_lame)

    p = add_parser("harmonic", help="solid harmonic values")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--points", required=True,
                   help="semicolon-separated x,y,z triples")
    p.set_defaults(func=cmd_harmonic)

    p = add_parser("gamma", help="normalization constants table")
    p.add_argument("--quad-order", type=int, default=64)
    p.set_defaults(func=cmd_gamma)

    p = add_parser("coulomb", help="Coulomb-kernel expansion convergence")
    p.add_argument("--source", required=True, help="x,y,z of the source")
    p.add_argument("--field", required=True, help="x,y,z of the field point")
    p.set_defaults(func=cmd_coulomb)

    p = add_parser("solvation", help="semi-analytic solvation energy")
    p.set_defaults(func=cmd_solvation)

    p = add_parser("born-limit", help="near-sphere Born-limit sweep")
    p.add_argument("--deltas", default="1,0.3,0.1,0.03,0.01,0.003,0.001")
    p.set_defaults(func=cmd_born_limit)

    p = add_parser("bem-validate", help="BEM refinement cross-check")
    p.add_argument("--refinements", default="1,2,3,4",
                   help="comma-separated icosphere refinement levels")
    p.set_defaults(func=cmd_bem_validate)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed a message; normalize bad-usage exits to 2
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    try:
        args.func(args)
        return EXIT_OK
    except (ValidationError, ValueError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, _sys.stderr)
        _sys.stderr.write("\n")
        return EXIT_VALIDATION
    except NumericalError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, _sys.stderr)
        _sys.stderr.write("\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
