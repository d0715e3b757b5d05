"""Command-line interface.

Subcommands compute the closed forms, run the discrete solvers, and verify
scenario files.  All output is JSON (stdout or --out); exit codes: 0 all
satisfied, 1 an inequality violated beyond tolerance, 2 invalid input,
3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from ..dilatations import (DilatationParams, inner_dilatation,
                           linear_dilatation, mean_inner_dilatation,
                           mean_outer_dilatation, outer_dilatation)
from ..errors import (ConvergenceError, InvalidInputError, ParameterError,
                      PmoduliError, PreconditionError)
from ..mappings import AxisStretchMap
from ..moduli import (RingSpec, lower_criterion_integral, ring_criterion_bound,
                      ring_module, transfer_parameters)
from ..quadrature import QuadratureSpec
from ..weights import RadialWeight
from ..discrete import (discrete_p_capacity, discrete_p_module,
                        export_field_csv, extremal_ring_metric,
                        sample_joining_curves, sample_separating_surfaces)
from .reports import dump_json, report_to_json
from .runner import grid_for_ring, run_scenario
from .scenario import parse_scenario_file

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_INVALID = 2
EXIT_NO_CONVERGENCE = 3


def _emit(payload: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _parse_matrix(text: str) -> np.ndarray:
    rows = [r for r in text.split(";") if r.strip()]
    mat = [[float(v) for v in row.split(",")] for row in rows]
    return np.asarray(mat, dtype=float)


def _add_common(parser):
    parser.add_argument("--out", default=None, help="write JSON to this path")
    parser.add_argument("--json", action="store_true",
                        help="output is always JSON; accepted for clarity")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pmoduli",
        description="p-moduli, capacities, and dilatations: closed forms, "
                    "discrete oracles, and scenario verification")
    sub = ap.add_subparsers(dest="command", required=True)

    rm = sub.add_parser("ring-module", help="closed-form ring curve module")
    rm.add_argument("--n", type=int, required=True)
    rm.add_argument("--p", type=float, required=True)
    rm.add_argument("--a", type=float, required=True)
    rm.add_argument("--b", type=float, required=True)
    _add_common(rm)

    cap = sub.add_parser("capacity", help="discrete p-capacity of a ring condenser")
    cap.add_argument("--n", type=int, required=True)
    cap.add_argument("--p", type=float, required=True)
    cap.add_argument("--a", type=float, required=True)
    cap.add_argument("--b", type=float, required=True)
    cap.add_argument("--cells", type=int, default=None)
    cap.add_argument("--boundary", choices=["cut", "staircase"], default="cut")
    cap.add_argument("--csv", default=None, help="export the potential as CSV")
    _add_common(cap)

    dm = sub.add_parser("discrete-module", help="discrete module of a sampled family")
    dm.add_argument("--n", type=int, required=True)
    dm.add_argument("--p", type=float, required=True)
    dm.add_argument("--a", type=float, required=True)
    dm.add_argument("--b", type=float, required=True)
    dm.add_argument("--cells", type=int, default=None)
    dm.add_argument("--family", choices=["joining", "separating"],
                    default="joining")
    dm.add_argument("--count", type=int, default=None)
    dm.add_argument("--csv", default=None, help="export the metric as CSV")
    _add_common(dm)

    dil = sub.add_parser("dilatation", help="pointwise dilatations of a matrix")
    dil.add_argument("--matrix", required=True,
                     help="row-major, rows separated by ';' (e.g. '1,0;0,2')")
    dil.add_argument("--alpha", type=float, default=None)
    dil.add_argument("--kind", choices=["inner", "outer", "linear", "all"],
                     default="all")
    _add_common(dil)

    md = sub.add_parser("mean-dilatation", help="mean dilatation of the cube example")
    md.add_argument("--kind", choices=["inner", "outer"], required=True)
    md.add_argument("--c", type=float, required=True)
    md.add_argument("--n", type=int, default=2)
    md.add_argument("--alpha", type=float, default=None)
    md.add_argument("--beta", type=float, default=None)
    md.add_argument("--gamma", type=float, default=None)
    md.add_argument("--delta", type=float, default=None)
    md.add_argument("--cells", type=int, default=64)
    md.add_argument("--rule", choices=["midpoint", "gauss2"], default="gauss2")
    _add_common(md)

    cr = sub.add_parser("criterion", help="radial criterion bounds")
    cr.add_argument("which", choices=["ring", "lower"])
    cr.add_argument("--n", type=int, required=True)
    cr.add_argument("--p", type=float, required=True)
    cr.add_argument("--q0", type=float, default=1.0, help="constant weight value")
    cr.add_argument("--r1", type=float, required=True)
    cr.add_argument("--r2", type=float, required=True)
    _add_common(cr)

    tr = sub.add_parser("transfer", help="lower-to-ring parameter transfer")
    tr.add_argument("--n", type=int, required=True)
    tr.add_argument("--p", type=float, required=True)
    _add_common(tr)

    vf = sub.add_parser("verify", help="run a scenario file")
    vf.add_argument("scenario", help="path to a .scn scenario file")
    _add_common(vf)

    rp = sub.add_parser("report", help="summarize report JSON files")
    rp.add_argument("files", nargs="+")
    _add_common(rp)
    return ap


def _cmd_ring_module(args) -> int:
    value = ring_module(args.n, args.p, args.a, args.b)
    _emit(dump_json({"value": value}) + "\n", args.out)
    return EXIT_OK


def _cmd_capacity(args) -> int:
    ring = RingSpec(dim=args.n, center=(0.0,) * args.n, r1=args.a, r2=args.b)
    cells = args.cells or (256 if args.n == 2 else 48)
    grid = grid_for_ring(ring, cells)
    sol = discrete_p_capacity(grid, ring, args.p, boundary=args.boundary)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            export_field_csv(grid, sol.potential, fh)
    payload = {"value": sol.value, "iterations": sol.iterations,
               "gradNorm": sol.grad_norm, "diagnostics": sol.diagnostics}
    _emit(dump_json(payload) + "\n", args.out)
    return EXIT_OK


def _cmd_discrete_module(args) -> int:
    ring = RingSpec(dim=args.n, center=(0.0,) * args.n, r1=args.a, r2=args.b)
    cells = args.cells or (256 if args.n == 2 else 48)
    grid = grid_for_ring(ring, cells)
    if args.family == "joining":
        count = args.count or (512 if args.n == 2 else 4096)
        family = sample_joining_curves(ring, grid, count)
        warm = extremal_ring_metric(grid, ring, args.p)
    else:
        count = args.count or (128 if args.n == 2 else 48)
        family = sample_separating_surfaces(ring, grid, count)
        warm = None
    sol = discrete_p_module(grid, family, args.p, warm_rho=warm)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            export_field_csv(grid, sol.rho, fh)
    payload = {"value": sol.value, "dualBound": sol.dual_bound,
               "dualGap": sol.dual_gap, "iterations": sol.iterations,
               "maxConstraintViolation": sol.max_constraint_violation,
               "diagnostics": sol.diagnostics}
    _emit(dump_json(payload) + "\n", args.out)
    return EXIT_OK


def _cmd_dilatation(args) -> int:
    mat = _parse_matrix(args.matrix)
    payload = {}
    if args.kind in ("inner", "all"):
        if args.alpha is None:
            raise ParameterError("inner dilatation needs --alpha")
        payload["inner"] = inner_dilatation(mat, args.alpha)
    if args.kind in ("outer", "all"):
        if args.alpha is None:
            raise ParameterError("outer dilatation needs --alpha")
        payload["outer"] = outer_dilatation(mat, args.alpha)
    if args.kind in ("linear", "all"):
        payload["linear"] = linear_dilatation(mat)
    _emit(dump_json(payload) + "\n", args.out)
    return EXIT_OK


def _cmd_mean_dilatation(args) -> int:
    mapping = AxisStretchMap(args.c, args.n)
    quad = QuadratureSpec(cells_per_axis=args.cells, rule=args.rule)
    if args.kind == "inner":
        if args.alpha is None or args.beta is None:
            raise ParameterError("inner mean dilatation needs --alpha and --beta")
        params = DilatationParams(alpha=args.alpha, beta=args.beta)
        result = mean_inner_dilatation(mapping, params, quad)
    else:
        if args.gamma is None or args.delta is None:
            raise ParameterError("outer mean dilatation needs --gamma and --delta")
        params = DilatationParams(alpha=1.0, gamma=args.gamma, delta=args.delta)
        result = mean_outer_dilatation(mapping, params, quad)
    payload = {"divergent": result.divergent,
               "value": (math.nan if result.divergent else result.value),
               "refinementLevels": list(result.levels)}
    _emit(dump_json(payload) + "\n", args.out)
    return EXIT_OK


def _cmd_criterion(args) -> int:
    ring = RingSpec(dim=args.n, center=(0.0,) * args.n, r1=args.r1, r2=args.r2)
    weight = RadialWeight.constant(args.q0)
    if args.which == "ring":
        res = ring_criterion_bound(ring, args.p, weight)
        payload = {"integralI": res.integral, "bound": res.bound,
                   "flaggedInfinite": res.flagged_infinite}
    else:
        res = lower_criterion_integral(ring, args.p, weight)
        payload = {"value": res.value, "s": res.s,
                   "flaggedInfinite": res.flagged_infinite}
    _emit(dump_json(payload) + "\n", args.out)
    return EXIT_OK


def _cmd_transfer(args) -> int:
    _emit(dump_json(transfer_parameters(args.n, args.p)) + "\n", args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    scenario = parse_scenario_file(args.scenario)
    report = run_scenario(scenario)
    _emit(report_to_json(report), args.out)
    return EXIT_OK if report.satisfied else EXIT_VIOLATED


def _cmd_report(args) -> int:
    import json
    rows = []
    all_ok = True
    for path in args.files:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        ok = bool(data.get("satisfied"))
        all_ok = all_ok and ok
        rows.append({
            "scenario": data.get("scenario", "?"),
            "theorem": data.get("theorem", "?"),
            "lhs": data.get("lhs"), "rhs": data.get("rhs"),
            "satisfied": ok, "relGap": data.get("relGap"),
        })
    _emit(dump_json({"reports": rows, "allSatisfied": all_ok}) + "\n", args.out)
    return EXIT_OK if all_ok else EXIT_VIOLATED


_COMMANDS = {
    "ring-module": _cmd_ring_module,
    "capacity": _cmd_capacity,
    "discrete-module": _cmd_discrete_module,
    "dilatation": _cmd_dilatation,
    "mean-dilatation": _cmd_mean_dilatation,
    "criterion": _cmd_criterion,
    "transfer": _cmd_transfer,
    "verify": _cmd_verify,
    "report": _cmd_report,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, matching the invalid-input code
        return int(exc.code) if exc.code is not None else EXIT_INVALID
    try:
        return _COMMANDS[args.command](args)
    except (InvalidInputError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_VIOLATED
    except ConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except PmoduliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
