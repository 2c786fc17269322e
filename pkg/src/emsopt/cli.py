"""Command-line interface.

Exit codes: 0 success, 1 solve found the model infeasible, 2 usage or
schema errors, 3 a solver limit was reached before optimality was proven.
"""

from __future__ import annotations

import argparse
import sys

from .coverage import build_coverage_matrices
from .dynamics import run_horizon
from .errors import InvalidInstanceError, SchemaError
from .evaluation import ModelKind
from .generator import generate_case_instance
from .io import load_events, load_instance, load_penalties, save_instance
from .instance import PenaltyMatrix, validate_instance
from .milp import build_milp, export_lp
from .reporting import alpha_sweep, default_alpha_grid, write_results_csv
from .solver import SolverConfig, SolverStatus, solve

__all__ = ["main", "build_parser"]


def _parse_kinds(text: str) -> list[ModelKind]:
    kinds = []
    for part in text.split(","):
        part = part.strip().lower()
        if part == "rp":
            kinds.append(ModelKind.RP)
        elif part == "drp":
            kinds.append(ModelKind.DRP)
        else:
            raise SchemaError(f"unknown model {part!r}, expected rp or drp")
    if not kinds:
        raise SchemaError("no model given")
    return kinds


def _solver_config(args) -> SolverConfig:
    return SolverConfig(node_limit=args.node_limit, time_limit=args.time_limit)


def _load_penalties(args, instance) -> PenaltyMatrix:
    if getattr(args, "penalties", None):
        return load_penalties(args.penalties, instance.m, instance.fleet_size)
    return PenaltyMatrix.zeros(instance.m, instance.fleet_size)


def _grid(args) -> tuple[float, ...]:
    if getattr(args, "alpha_grid", None):
        try:
            return tuple(float(v) for v in args.alpha_grid.split(","))
        except ValueError:
            raise SchemaError(f"bad alpha grid {args.alpha_grid!r}") from None
    return default_alpha_grid(args.alpha_from, args.alpha_to, args.alpha_step)


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    if args.alpha is not None:
        instance = instance.with_alpha(args.alpha)
    cov = build_coverage_matrices(instance.travel_time, instance.r1, instance.r2)
    penalties = _load_penalties(args, instance)
    (kind,) = _parse_kinds(args.model)
    solution = solve(instance, cov, penalties, kind, _solver_config(args))

    print(f"model: {kind.value}")
    print(f"alpha: {instance.alpha:.2f}")
    print(f"status: {solution.status.value}")
    print(f"nodes: {solution.nodes_explored}")
    if solution.deployment is not None:
        ev = solution.evaluation
        print(f"deployment: {list(solution.deployment.as_ids())}")
        print(f"objective: {ev.objective:.6f}")
        print(f"single_covered: {ev.single_covered}")
        print(f"double_covered: {ev.double_covered}")
    if solution.status is SolverStatus.INFEASIBLE:
        cov_check = solve(
            instance.with_alpha(0.0), cov, penalties, kind, _solver_config(args)
        )
        print("infeasible: no deployment satisfies the coverage constraints")
        if cov_check.status is SolverStatus.INFEASIBLE:
            only = instance.fleet_size
            for i in range(instance.n):
                if not cov.delta[i].any():
                    print(f"violation (constraint 2): point {i + 1} unreachable within r2")
            if all(cov.delta[i].any() for i in range(instance.n)):
                print(
                    f"violation (constraint 2): {only} ambulances cannot cover "
                    "every point within r2"
                )
        else:
            cid = kind.proportional_constraint_id
            print(
                f"violation (constraint {cid}): required proportion "
                f"{instance.alpha:.2f} not attainable"
            )
        return 1
    if solution.status is SolverStatus.LIMIT_REACHED:
        print("limit reached before optimality was proven")
        return 3
    return 0


def cmd_sweep(args) -> int:
    instance = load_instance(args.instance)
    kinds = _parse_kinds(args.models)
    penalties = _load_penalties(args, instance)
    grid = _grid(args)
    rows = alpha_sweep(instance, kinds, grid, penalties, _solver_config(args))
    write_results_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    instance = load_instance(args.instance)
    events = load_events(args.events)
    kinds = _parse_kinds(args.model)
    grid = _grid(args)
    initial = None
    if args.penalties:
        initial = load_penalties(args.penalties, instance.m, instance.fleet_size)
    rows = []
    for kind in kinds:
        trace = run_horizon(
            instance,
            events,
            kind,
            grid,
            _solver_config(args),
            num_periods=args.periods,
            operating_alpha=args.operating_alpha,
            initial_penalties=initial,
        )
        rows.extend(trace.rows)
    write_results_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_export_lp(args) -> int:
    instance = load_instance(args.instance)
    if args.alpha is not None:
        instance = instance.with_alpha(args.alpha)
    cov = build_coverage_matrices(instance.travel_time, instance.r1, instance.r2)
    penalties = _load_penalties(args, instance)
    (kind,) = _parse_kinds(args.model)
    lp = build_milp(instance, cov, penalties, kind)
    export_lp(lp, args.out)
    print(f"wrote {len(lp.variables)} variables, {len(lp.constraints)} rows to {args.out}")
    return 0


def cmd_validate(args) -> int:
    try:
        instance = load_instance(args.instance)
    except InvalidInstanceError as exc:
        for message in exc.report.errors:
            print(f"error: {message}")
        for message in exc.report.warnings:
            print(f"warning: {message}")
        return 2
    report = validate_instance(instance)
    for message in report.warnings:
        print(f"warning: {message}")
    if args.penalties:
        load_penalties(args.penalties, instance.m, instance.fleet_size)
        print("penalties: ok")
    print(
        f"ok: {instance.n} points, {instance.m} stations, "
        f"{instance.fleet_size} ambulances"
    )
    return 0


def cmd_generate(args) -> int:
    instance = generate_case_instance(args.seed)
    save_instance(instance, args.out)
    print(f"wrote seed-{args.seed} instance to {args.out}")
    return 0


def _add_limits(parser):
    parser.add_argument("--node-limit", type=int, default=None)
    parser.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")


def _add_grid(parser):
    parser.add_argument("--alpha-from", type=float, default=0.90)
    parser.add_argument("--alpha-to", type=float, default=1.00)
    parser.add_argument("--alpha-step", type=float, default=0.01)
    parser.add_argument(
        "--alpha-grid",
        default=None,
        help="explicit comma-separated proportions, overrides from/to/step",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emsopt",
        description="Exact ambulance location and relocation optimization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one model at one proportion")
    p.add_argument("--instance", required=True)
    p.add_argument("--model", required=True, help="rp or drp")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--penalties", default=None)
    _add_limits(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve a proportion grid, write CSV")
    p.add_argument("--instance", required=True)
    p.add_argument("--models", default="rp,drp")
    p.add_argument("--penalties", default=None)
    p.add_argument("--out", required=True)
    _add_grid(p)
    _add_limits(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="run the multi-period relocation protocol")
    p.add_argument("--instance", required=True)
    p.add_argument("--events", required=True)
    p.add_argument("--model", default="rp,drp", help="rp, drp, or rp,drp")
    p.add_argument("--periods", type=int, default=None)
    p.add_argument("--operating-alpha", type=float, default=None)
    p.add_argument("--penalties", default=None, help="initial-period penalty matrix")
    p.add_argument("--out", required=True)
    _add_grid(p)
    _add_limits(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export-lp", help="write the binary program in LP format")
    p.add_argument("--instance", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--penalties", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("validate", help="check an instance document")
    p.add_argument("--instance", required=True)
    p.add_argument("--penalties", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="write a seeded case-scale instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, InvalidInstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
