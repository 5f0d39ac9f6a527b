"""Command-line front end.

Subcommands: classify | moments | pgf | extinction | simulate | invert |
selftest | validate.  Every subcommand is a thin adapter over the library;
no numerical logic lives here.

Exit codes: 0 success, 1 validation/selftest failure, 2 usage error,
3 numerical error (the structured error name and offending parameters are
printed to stderr).

Output is plain CSV (default) or JSON; floats serialize with repr (shortest
round-trip decimal) and complex values as "re+imi" strings.  Output is
uncolored, so NO_COLOR needs no special handling.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import NumericsError
from .model import ModelParams, classify, params_from_config
from .moments import expected_counts
from .asymptotics import extinction_curve
from .oracle import SimulationCaps, invert_pgf, simulate
from .pgf import backward_residual, pgf_a
from .validation import cross_validate, selftest_specfun

__all__ = ["main", "build_parser"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, complex):
        sign = "+" if v.imag >= 0 else "-"
        return f"{v.real!r}{sign}{abs(v.imag)!r}i"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, complex):
        return _fmt(v)
    return v


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_rows(args, header: list[str], rows: list[list], trailer: str | None = None):
    if args.format == "json":
        payload = [dict(zip(header, (_jsonable(v) for v in row))) for row in rows]
        _emit(args, json.dumps(payload, indent=2))
        return
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    if trailer:
        lines.append(trailer)
    _emit(args, "\n".join(lines))


def _params(args) -> ModelParams:
    overrides = {"alpha": args.alpha, "p": args.p,
                 "lambda_a": args.lambda_a, "lambda_b": args.lambda_b}
    if args.config:
        return params_from_config(args.config, overrides)
    if args.alpha is None or args.p is None:
        raise ValueError("--alpha and --p are required (or use --config)")
    return ModelParams(alpha=args.alpha, p=args.p,
                       lambda_a=args.lambda_a if args.lambda_a is not None else 1.0,
                       lambda_b=args.lambda_b if args.lambda_b is not None else 1.0)


def _t_grid(spec: str) -> list[float]:
    try:
        start_s, stop_s, steps_s = spec.split(":")
        start, stop, steps = float(start_s), float(stop_s), int(steps_s)
    except ValueError:
        raise ValueError(f"--t-grid wants start:stop:steps, got {spec!r}") from None
    if steps < 1 or stop < start or start < 0:
        raise ValueError(f"bad --t-grid {spec!r}")
    if steps == 1:
        return [start]
    h = (stop - start) / (steps - 1)
    return [start + i * h for i in range(steps)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stembranch",
        description="Two-type branching processes: exact PGFs, extinction "
                    "asymptotics, simulation, and cross-validation.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="per-progeny commitment probability of A")
    common.add_argument("--p", type=float, help="per-progeny loss probability of B (q = 1-p)")
    common.add_argument("--lambda-a", type=float, dest="lambda_a", help="A division rate (default 1)")
    common.add_argument("--lambda-b", type=float, dest="lambda_b", help="B division rate (default 1)")
    common.add_argument("--config", help="key=value parameter file (alpha, p, lambda_a, lambda_b)")
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[common],
                   help="print which closed-form regime the parameters fall in")

    p_m = sub.add_parser("moments", parents=[common], help="expected counts over a time grid")
    p_m.add_argument("--t-grid", default="0:10:11", help="start:stop:steps (default 0:10:11)")

    p_p = sub.add_parser("pgf", parents=[common], help="evaluate the joint PGF F_A(x, y, t)")
    p_p.add_argument("--x", type=float, required=True)
    p_p.add_argument("--y", type=float, required=True)
    p_p.add_argument("--t", type=float, required=True)
    p_p.add_argument("--method", choices=("closed", "ode", "auto"), default="auto")

    p_e = sub.add_parser("extinction", parents=[common], help="extinction probability curve")
    p_e.add_argument("--method", choices=("exact", "asymptotic", "ode", "mc", "fixed-point"),
                     default="exact")
    p_e.add_argument("--t-grid", default="0:20:21")
    p_e.add_argument("--replicates", type=int, default=10_000)
    p_e.add_argument("--seed", type=int, default=0)

    p_s = sub.add_parser("simulate", parents=[common], help="exact stochastic simulation")
    p_s.add_argument("--replicates", type=int, default=1)
    p_s.add_argument("--t-max", type=float, required=True)
    p_s.add_argument("--seed", type=int, default=0)
    p_s.add_argument("--max-cells", type=int, default=SimulationCaps.max_cells)
    p_s.add_argument("--max-events", type=int, default=SimulationCaps.max_events)
    p_s.add_argument("--emit", choices=("summary", "trajectories"), default="summary")

    p_i = sub.add_parser("invert", parents=[common], help="joint pmf grid by PGF inversion")
    p_i.add_argument("--t", type=float, required=True)
    p_i.add_argument("--j-max", type=int, default=15)
    p_i.add_argument("--k-max", type=int, default=15)

    p_t = sub.add_parser("selftest", parents=[common], help="special-function identity table")
    p_t.add_argument("--specfun", action="store_true",
                     help="run the special-function identity suite")

    p_v = sub.add_parser("validate", parents=[common], help="closed-form vs oracle cross-validation")
    p_v.add_argument("--suite", choices=("quick", "full"), default="quick")
    return parser


def _cmd_classify(args) -> int:
    regime = classify(_params(args))
    _emit(args, regime.theorem_branch.value)
    return 0


def _cmd_moments(args) -> int:
    params = _params(args)
    rows = []
    for t in _t_grid(args.t_grid):
        m = expected_counts(params, t)
        rows.append([m.t, m.e_a, m.e_b])
    _emit_rows(args, ["t", "E_A", "E_B"], rows)
    return 0


def _cmd_pgf(args) -> int:
    if not (0.0 <= args.x <= 1.0 and 0.0 <= args.y <= 1.0):
        raise ValueError("--x and --y must lie in [0, 1]")
    params = _params(args)
    res = pgf_a(args.x, args.y, args.t, params, method=args.method)
    residual = backward_residual(args.x, args.y, args.t, params, method=args.method)
    _emit_rows(args, ["value", "method", "backward_residual"],
               [[res.value, res.method, residual]])
    return 0


def _cmd_extinction(args) -> int:
    params = _params(args)
    curve = extinction_curve(params, _t_grid(args.t_grid), args.method,
                             replicates=args.replicates, seed=args.seed)
    _emit_rows(args, ["t", "value", "method"],
               [[t, v, args.method] for t, v in curve])
    return 0


def _cmd_simulate(args) -> int:
    params = _params(args)
    caps = SimulationCaps(max_cells=args.max_cells, max_events=args.max_events)
    if args.emit == "trajectories":
        lines = []
        for rep in range(args.replicates):
            traj = simulate(params, args.t_max, args.seed + rep, caps)
            for t, za, zb in traj.events:
                record = {"t": t, "za": int(za), "zb": int(zb)}
                if args.replicates > 1:
                    record["rep"] = rep
                lines.append(json.dumps(record))
        _emit(args, "\n".join(lines))
        return 0
    rows = []
    for rep in range(args.replicates):
        traj = simulate(params, args.t_max, args.seed + rep, caps)
        za, zb = traj.final_state()
        rows.append([rep, za, zb, int(za == 0 and zb == 0), int(traj.truncated)])
    _emit_rows(args, ["replicate", "z_a", "z_b", "extinct", "truncated"], rows)
    return 0


def _cmd_invert(args) -> int:
    params = _params(args)
    grid = invert_pgf(params, args.t, args.j_max, args.k_max)
    header = ["j\\k"] + [str(k) for k in range(args.k_max + 1)]
    rows = [[j] + [float(v) for v in grid.probs[j]] for j in range(args.j_max + 1)]
    _emit_rows(args, header, rows, trailer=f"truncation_mass,{_fmt(grid.truncation_mass)}")
    return 0


def _cmd_selftest(args) -> int:
    rows = selftest_specfun()
    _emit_rows(args, ["function", "identity", "max_rel_err", "tolerance", "status"],
               [[r["function"], r["identity"], r["max_rel_err"], r["tolerance"], r["status"]]
                for r in rows])
    return 1 if any(r["status"] == "FAIL" for r in rows) else 0


def _cmd_validate(args) -> int:
    report = cross_validate(args.suite)
    if args.format == "json":
        _emit(args, report.to_json())
    else:
        header = ["label", "alpha", "p", "lambda_a", "lambda_b", "t", "x", "y",
                  "closed", "ode", "mc", "mc_half_width_99", "abs_discrepancy", "status"]
        rows = [[c.row()[h] for h in header] for c in report.cases]
        summary = (f"summary,Pass={report.summary['Pass']},Fail={report.summary['Fail']},"
                   f"Skipped={report.summary['Skipped']},runtime_s={report.runtime_s!r}")
        _emit_rows(args, header, rows, trailer=summary)
    return 1 if report.failed else 0


_DISPATCH = {
    "classify": _cmd_classify,
    "moments": _cmd_moments,
    "pgf": _cmd_pgf,
    "extinction": _cmd_extinction,
    "simulate": _cmd_simulate,
    "invert": _cmd_invert,
    "selftest": _cmd_selftest,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses its own exit codes; keep 2 for usage
        return int(exc.code) if exc.code else 0
    try:
        return _DISPATCH[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
