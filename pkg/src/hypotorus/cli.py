"""Command-line interface.

Subcommands: classify, resonances, solve, witness.  Reports are deterministic
JSON (timing_seconds last, everything else byte-stable for identical inputs
and flags); bulk data travels as CSV.  --figures additionally renders PNG
charts next to the chosen output.  Exit codes: 0 GH or plain success,
10 NotGH, 20 undetermined at the scan bounds, 1 input error, 11 resonant
mode in a solve, 12 witness precondition failure.  Worker threads follow the
HYPO_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from hypotorus import __version__
from hypotorus.coeffs import (CoefficientField, FieldContext, field_to_csv,
                              field_to_csv_text)
from hypotorus.classify import Outcome, classify
from hypotorus.reportio import canonical_json, sha256_hex, write_json
from hypotorus.solver import ResonantModeError, solve_system
from hypotorus.specfile import LoadedSpec, SpecFileError, load_spec
from hypotorus.spectrum import enumerate_eigenvalues
from hypotorus.witness import (WitnessPreconditionError,
                               witness_infinite_zero_set, witness_mixed,
                               witness_sign_change, witness_symbol_decay)

__all__ = ["main"]

EXIT_GH = 0
EXIT_NOT_GH = 10
EXIT_UNDETERMINED = 20
EXIT_INPUT = 1
EXIT_RESONANT = 11
EXIT_WITNESS_PRECONDITION = 12


def _tool_header(loaded: LoadedSpec, command: str) -> dict:
    return {
        "tool": {"name": "hypotorus", "version": __version__},
        "command": command,
        "input": {"path": loaded.path, "sha256": sha256_hex(loaded.data)},
    }


def _deliver(report: dict, out, started: float) -> None:
    report["timing_seconds"] = time.perf_counter() - started
    if out:
        write_json(out, report)
    else:
        sys.stdout.write(canonical_json(report))


def _figure_target(args) -> tuple:
    out = getattr(args, "out", None)
    base = Path(out).resolve().parent if out else Path.cwd()
    stem = f"{Path(args.spec).stem}_{args.command}"
    return base, stem


def _cmd_classify(args) -> int:
    started = time.perf_counter()
    loaded = load_spec(args.spec)
    factors = tuple(float(s) for s in args.sigma_grid.split(","))
    if any(f <= 0 for f in factors):
        raise SpecFileError("--sigma-grid factors must be positive")
    verdict = classify(loaded.spec, bounds=(args.tau_max, args.j_max),
                       sigma_factors=factors)
    report = {
        **_tool_header(loaded, "classify"),
        "bounds": {"tau_max": args.tau_max, "j_max": args.j_max},
        "sigma_factors": list(factors),
        "verdict": verdict.to_json_dict(),
    }
    if args.figures:
        from hypotorus import figures
        outdir, stem = _figure_target(args)
        paths = [figures.render_coefficients(loaded.spec, outdir, stem)]
        cert = verdict.certificate
        if hasattr(cert, "reports"):
            paths.append(figures.render_diophantine(cert.reports, outdir, stem))
        elif hasattr(cert, "report") and hasattr(cert.report, "rows"):
            paths.append(figures.render_diophantine(
                [(cert.sigma, cert.report)], outdir, stem))
        if verdict.witness is not None:
            paths.extend(figures.render_witness(verdict.witness, outdir, stem))
        report["figures"] = paths
    _deliver(report, args.out, started)
    return {Outcome.GH: EXIT_GH, Outcome.NotGH: EXIT_NOT_GH,
            Outcome.UndeterminedAtBounds: EXIT_UNDETERMINED}[verdict.outcome]


def _resonance_rows(spec, J: int) -> list:
    lam = enumerate_eigenvalues(spec.operator, J)
    rows = []
    for j in range(1, J + 1):
        lam_j = lam[j - 1]
        gaps = []
        for r in range(1, spec.m + 1):
            a0, b0 = spec.a0(r), spec.b0(r)
            if isinstance(a0, Fraction) and isinstance(lam_j, int):
                x = a0 * lam_j
                fl = x.numerator // x.denominator
                dist_a = float(min(x - fl, 1 - (x - fl)))
            else:
                x = float(a0) * float(lam_j)
                dist_a = abs(x - round(x))
            gaps.append(max(dist_a, abs(float(b0) * float(lam_j))))
        rows.append((j, float(lam_j), tuple(gaps)))
    return rows


def _cmd_resonances(args) -> int:
    started = time.perf_counter()
    loaded = load_spec(args.spec)
    rows = _resonance_rows(loaded.spec, args.j_max)
    header = ["j", "lambda"] + [f"gap_{r}" for r in range(1, loaded.spec.m + 1)]

    def write_rows(fh):
        w = csv.writer(fh)
        w.writerow(header)
        for j, lam_j, gaps in rows:
            w.writerow([j, repr(lam_j)] + [repr(g) for g in gaps])

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_rows(fh)
    else:
        write_rows(sys.stdout)
    if args.figures:
        from hypotorus import figures
        outdir, stem = _figure_target(args)
        figures.render_resonances(rows, outdir, stem)
    del started
    return 0


def _read_rhs_csv(path, spec) -> list:
    meta = spec.operator.meta
    ctx = FieldContext(mu=spec.mu, n=meta.n, M=meta.M)
    expected = ["r"] + [f"tau_{k}" for k in range(1, spec.m + 1)] + ["j", "re", "im"]
    per_r: dict = {r: {} for r in range(1, spec.m + 1)}
    box, jmax = 0, 1
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected:
            raise SpecFileError(
                f"right-hand-side CSV header {header} != expected {expected}")
        for line, row in enumerate(reader, start=2):
            if len(row) != len(expected):
                raise SpecFileError(f"{path}:{line}: wrong column count")
            r = int(row[0])
            if not (1 <= r <= spec.m):
                raise SpecFileError(f"{path}:{line}: equation index {r} "
                                    f"outside [1, {spec.m}]")
            tau = tuple(int(c) for c in row[1:1 + spec.m])
            j = int(row[1 + spec.m])
            per_r[r][(tau, j)] = complex(float(row[-2]), float(row[-1]))
            box = max(box, max((abs(c) for c in tau), default=0))
            jmax = max(jmax, j)
    return [CoefficientField(spec.m, box, jmax, per_r[r], ctx)
            for r in range(1, spec.m + 1)]


def _cmd_solve(args) -> int:
    started = time.perf_counter()
    loaded = load_spec(args.spec)
    rhs = _read_rhs_csv(args.rhs_csv, loaded.spec)
    result = solve_system(loaded.spec, rhs)
    out_csv = args.out_csv or f"{Path(args.spec).stem}_solution.csv"
    field_to_csv(result.u, out_csv)
    report = {
        **_tool_header(loaded, "solve"),
        "rhs_csv": str(args.rhs_csv),
        "solution_csv": str(out_csv),
        "route": result.route,
        "residual": result.residual,
        "residual_per_equation": list(result.per_equation),
        "compatibility_ok": result.compatibility_ok,
        "entries": len(result.u),
    }
    if args.figures:
        from hypotorus import figures
        outdir, stem = _figure_target(args)
        report["figures"] = [
            figures.render_field_decay(result.u, outdir, stem, "solution")]
    _deliver(report, args.out, started)
    return 0


def _read_pairs_csv(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[-1] not in ("ell", "j") or \
                any(h != f"tau_{k}" for k, h in enumerate(header[:-1], start=1)):
            raise SpecFileError(
                f"pairs CSV must have columns tau_1..tau_p plus ell (or j); "
                f"got {header}")
        p = len(header) - 1
        pairs = []
        for line, row in enumerate(reader, start=2):
            if len(row) < p + 1:
                raise SpecFileError(f"{path}:{line}: wrong column count")
            pairs.append((tuple(int(c) for c in row[:p]), int(row[p])))
    return pairs


def _cmd_witness(args) -> int:
    started = time.perf_counter()
    loaded = load_spec(args.spec)
    spec = loaded.spec
    if args.kind in ("symbol-decay", "mixed") and not args.pairs_csv:
        raise SpecFileError(f"--kind {args.kind} requires --pairs-csv")
    if args.kind == "mixed" and args.ell is None:
        raise SpecFileError("--kind mixed requires --ell")

    if args.kind == "sign-change":
        witness = witness_sign_change(spec, args.j_max)
    elif args.kind == "infinite-zero-set":
        witness = witness_infinite_zero_set(spec, args.j_max)
    elif args.kind == "symbol-decay":
        witness = witness_symbol_decay(spec, _read_pairs_csv(args.pairs_csv))
    else:
        witness = witness_mixed(spec, args.ell, _read_pairs_csv(args.pairs_csv))

    report = {
        **_tool_header(loaded, "witness"),
        "kind_requested": args.kind,
        **witness.to_json_dict(),
        "u_csv": field_to_csv_text(witness.u_field),
        "f_csv": [field_to_csv_text(f) for f in witness.f_fields],
    }
    if args.figures:
        from hypotorus import figures
        outdir, stem = _figure_target(args)
        report["figures"] = figures.render_witness(witness, outdir, stem)
    _deliver(report, args.out, started)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypotorus",
        description="Global hypoellipticity verdicts, resonance scans, "
                    "per-mode solves, and singular witnesses for "
                    "time-periodic evolution systems.")
    parser.add_argument("--version", action="version",
                        version=f"hypotorus {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="decide GH / NotGH / undetermined")
    p.add_argument("spec", help="TOML system description")
    p.add_argument("--tau-max", type=int, default=32,
                   help="resonance scan box for ||tau|| (default 32)")
    p.add_argument("--j-max", type=int, default=128,
                   help="number of modes scanned (default 128)")
    p.add_argument("--sigma-grid", default="1,2,4",
                   help="comma-separated multiples of M*mu sampled for "
                        "condition II (default 1,2,4)")
    p.add_argument("--out", help="write the JSON report here (default stdout)")
    p.add_argument("--figures", action="store_true",
                   help="render PNG figures next to the output")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("resonances", help="per-mode resonance gaps as CSV")
    p.add_argument("spec")
    p.add_argument("--j-max", type=int, default=128)
    p.add_argument("--csv", help="write the table here (default stdout)")
    p.add_argument("--figures", action="store_true")
    p.set_defaults(fn=_cmd_resonances, out=None)

    p = sub.add_parser("solve", help="solve L_r u = f_r from a coefficient CSV")
    p.add_argument("spec")
    p.add_argument("rhs_csv",
                   help="columns r, tau_1..tau_m, j, re, im")
    p.add_argument("--out-csv", help="solution field CSV "
                   "(default <spec>_solution.csv)")
    p.add_argument("--out", help="JSON report path (default stdout)")
    p.add_argument("--figures", action="store_true")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("witness", help="construct and verify a singular witness")
    p.add_argument("spec")
    p.add_argument("--kind", required=True,
                   choices=["sign-change", "infinite-zero-set",
                            "symbol-decay", "mixed"])
    p.add_argument("--j-max", type=int, default=16,
                   help="modes for the sign-change / zero-set kinds")
    p.add_argument("--ell", type=int,
                   help="leading zero-b block size for --kind mixed")
    p.add_argument("--pairs-csv",
                   help="small-symbol pairs: columns tau_1..tau_p, ell")
    p.add_argument("--out", help="JSON bundle path (default stdout)")
    p.add_argument("--figures", action="store_true")
    p.set_defaults(fn=_cmd_witness)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ResonantModeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESONANT
    except WitnessPreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WITNESS_PRECONDITION
    except (SpecFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
