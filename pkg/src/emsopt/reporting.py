"""Sweep experiments, model comparison tables and CSV emission.

The CSV layout mirrors the coverage-versus-proportion figures this toolkit
is built to produce: one row per (period, model, alpha) carrying the solve
status, objective, single/double coverage counts and the relocation cost
of the chosen deployment. Output is byte-deterministic except for the
wall-clock column.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .coverage import build_coverage_matrices
from .evaluation import ModelKind
from .instance import Deployment, Instance, PenaltyMatrix
from .solver import SolverConfig, SolverStatus, Solution, solve

__all__ = [
    "SweepRow",
    "PeriodRecord",
    "HorizonTrace",
    "sweep_row",
    "alpha_sweep",
    "ComparisonRow",
    "compare_report",
    "format_comparison",
    "write_results_csv",
    "default_alpha_grid",
    "CSV_HEADER",
]

CSV_HEADER = (
    "period,model,alpha,status,objective,single_covered,double_covered,"
    "relocation_cost,wall_ms"
)

_KIND_ORDER = {ModelKind.RP: 0, ModelKind.DRP: 1}


@dataclass(frozen=True)
class SweepRow:
    """One solved (period, model, alpha) cell."""

    period: int
    model: ModelKind
    alpha: float
    status: SolverStatus
    objective: float | None
    single_covered: int | None
    double_covered: int | None
    relocation_cost: float | None
    wall_time: float  # seconds

    def sort_key(self):
        return (self.period, _KIND_ORDER[self.model], self.alpha)


@dataclass(frozen=True)
class PeriodRecord:
    """The deployment that actually moved the fleet in one period."""

    period: int
    available: tuple[int, ...]
    operating_alpha: float | None
    deployment: Deployment | None


@dataclass(frozen=True)
class HorizonTrace:
    rows: tuple[SweepRow, ...]
    periods: tuple[PeriodRecord, ...]

    @classmethod
    def from_rows(cls, rows, periods) -> "HorizonTrace":
        return cls(
            rows=tuple(sorted(rows, key=SweepRow.sort_key)),
            periods=tuple(periods),
        )


def sweep_row(
    period: int,
    kind: ModelKind,
    alpha: float,
    solution: Solution,
    penalties: PenaltyMatrix,
) -> SweepRow:
    """Condense a solution into one CSV-ready row."""
    objective = single = double = cost = None
    if solution.deployment is not None and solution.evaluation is not None:
        ev = solution.evaluation
        objective = ev.objective
        single = ev.single_covered
        double = ev.double_covered
        stations = solution.deployment.station_of
        cost = float(
            sum(penalties.values[j, k] for k, j in enumerate(stations))
        )
    return SweepRow(
        period=period,
        model=kind,
        alpha=float(alpha),
        status=solution.status,
        objective=objective,
        single_covered=single,
        double_covered=double,
        relocation_cost=cost,
        wall_time=solution.wall_time,
    )


def default_alpha_grid(
    start: float = 0.90, stop: float = 1.00, step: float = 0.01
) -> tuple[float, ...]:
    """Inclusive proportion grid, rounded so 0.90..1.00 lands exactly."""
    if step <= 0:
        raise ValueError("step must be positive")
    values = []
    i = 0
    while True:
        a = round(start + i * step, 10)
        if a > stop + step * 1e-9:
            break
        values.append(a)
        i += 1
    return tuple(values)


def alpha_sweep(
    instance: Instance,
    kinds,
    alpha_grid,
    penalties: PenaltyMatrix | None = None,
    config: SolverConfig | None = None,
) -> list[SweepRow]:
    """Solve one period for every (model, alpha) pair on the grid.

    Rows come back sorted by (model, alpha) with period fixed at 1.
    Infeasible proportions are recorded, not raised.
    """
    if penalties is None:
        penalties = PenaltyMatrix.zeros(instance.m, instance.fleet_size)
    cov = build_coverage_matrices(instance.travel_time, instance.r1, instance.r2)
    rows = []
    for kind in kinds:
        for alpha in alpha_grid:
            sol = solve(instance.with_alpha(float(alpha)), cov, penalties, kind, config)
            rows.append(sweep_row(1, kind, float(alpha), sol, penalties))
    rows.sort(key=SweepRow.sort_key)
    return rows


@dataclass(frozen=True)
class ComparisonRow:
    """Side-by-side coverage of the two models at one (period, alpha)."""

    period: int
    alpha: float
    rp_single: int | None
    rp_double: int | None
    drp_single: int | None
    drp_double: int | None
    delta_single: int | None  # DRP - RP, when both solved
    delta_double: int | None


def compare_report(rows) -> list[ComparisonRow]:
    """Pair up RP and DRP rows on the same grid and take coverage deltas.

    Raises ``ValueError`` when the two models were not run on identical
    (period, alpha) grids.
    """
    by_cell: dict[tuple[int, float], dict[ModelKind, SweepRow]] = {}
    for row in rows:
        cell = by_cell.setdefault((row.period, row.alpha), {})
        if row.model in cell:
            raise ValueError(
                f"duplicate row for period {row.period}, model {row.model.value}, "
                f"alpha {row.alpha}"
            )
        cell[row.model] = row
    out = []
    for (period, alpha) in sorted(by_cell):
        cell = by_cell[(period, alpha)]
        if set(cell) != {ModelKind.RP, ModelKind.DRP}:
            missing = ({ModelKind.RP, ModelKind.DRP} - set(cell)).pop()
            raise ValueError(
                f"mismatched grids: no {missing.value} row for period {period}, "
                f"alpha {alpha}"
            )
        rp, drp = cell[ModelKind.RP], cell[ModelKind.DRP]
        both = rp.single_covered is not None and drp.single_covered is not None
        out.append(
            ComparisonRow(
                period=period,
                alpha=alpha,
                rp_single=rp.single_covered,
                rp_double=rp.double_covered,
                drp_single=drp.single_covered,
                drp_double=drp.double_covered,
                delta_single=(drp.single_covered - rp.single_covered) if both else None,
                delta_double=(drp.double_covered - rp.double_covered) if both else None,
            )
        )
    return out


def format_comparison(comparison) -> str:
    """Plain-text table of a comparison report."""
    header = (
        f"{'period':>6} {'alpha':>6} {'RP single':>9} {'RP double':>9} "
        f"{'DRP single':>10} {'DRP double':>10} {'d single':>8} {'d double':>8}"
    )
    lines = [header]
    for row in comparison:
        def cell(value, width):
            return f"{'-' if value is None else value:>{width}}"

        lines.append(
            f"{row.period:>6} {row.alpha:>6.2f} {cell(row.rp_single, 9)} "
            f"{cell(row.rp_double, 9)} {cell(row.drp_single, 10)} "
            f"{cell(row.drp_double, 10)} {cell(row.delta_single, 8)} "
            f"{cell(row.delta_double, 8)}"
        )
    return "\n".join(lines)


def _csv_line(row: SweepRow) -> str:
    objective = "" if row.objective is None else f"{row.objective:.6f}"
    single = "" if row.single_covered is None else str(row.single_covered)
    double = "" if row.double_covered is None else str(row.double_covered)
    cost = "" if row.relocation_cost is None else f"{row.relocation_cost:.6f}"
    return (
        f"{row.period},{row.model.value},{row.alpha:.2f},{row.status.value},"
        f"{objective},{single},{double},{cost},{row.wall_time * 1000.0:.3f}"
    )


def write_results_csv(rows_or_trace, destination=None) -> str:
    """Render rows (or a horizon trace) as CSV; optionally write to a path.

    Rows are sorted by (period, model, alpha). Everything except the final
    wall_ms column is reproducible byte for byte across runs.
    """
    rows = getattr(rows_or_trace, "rows", rows_or_trace)
    ordered = sorted(rows, key=SweepRow.sort_key)
    text = "\n".join([CSV_HEADER] + [_csv_line(r) for r in ordered]) + "\n"
    if destination is None:
        return text
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(os.fspath(destination), "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
