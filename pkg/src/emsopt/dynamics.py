"""Period-to-period relocation protocol.

A planning horizon is a sequence of periods. The first period starts with
all relocation penalties at zero, so the solve is a pure coverage
maximization. Between periods the penalties are refreshed from the
inter-station distance matrix: moving ambulance ``k`` from its current
station to station ``j`` costs the distance between the two stations, and
staying put is free. Dispatch events remove a vehicle from the available
fleet (it is out on a mission); return events bring it back at an explicit
station. Each period is then re-solved for every requested coverage
proportion, and one designated "operating" proportion decides where the
fleet actually moves.

The per-period results are collected into a
:class:`~emsopt.reporting.HorizonTrace` for CSV emission and model
comparison.
"""

from __future__ import annotations

import enum
from bisect import insort
from dataclasses import dataclass

import numpy as np

from .coverage import build_coverage_matrices
from .errors import InvalidInstanceError
from .evaluation import ModelKind
from .instance import (
    Ambulance,
    Instance,
    PenaltyMatrix,
    validate_instance,
)
from .reporting import HorizonTrace, PeriodRecord, sweep_row
from .solver import SolverConfig, SolverStatus, solve

__all__ = [
    "EventKind",
    "Event",
    "PeriodState",
    "init_penalties",
    "update_penalties",
    "apply_event",
    "run_horizon",
]


class EventKind(enum.Enum):
    DISPATCH = "dispatch"
    RETURN = "return"


@dataclass(frozen=True)
class Event:
    """An exogenous fleet change taking effect at the start of a period."""

    period: int
    kind: EventKind
    ambulance: int  # 0-based ambulance index
    station: int | None = None  # return events only

    def __post_init__(self):
        if self.kind is EventKind.RETURN and self.station is None:
            raise ValueError("return events must name the station the vehicle is at")


@dataclass(frozen=True)
class PeriodState:
    """Fleet situation at one period: who is available, where, at what cost."""

    period: int
    fleet: tuple[int, ...]  # every ambulance index of the instance
    available: tuple[int, ...]  # sorted subset of fleet
    positions: tuple[int, ...]  # station per available entry
    penalties: PenaltyMatrix  # (m, len(available))

    def __post_init__(self):
        if len(self.available) != len(self.positions):
            raise ValueError("positions must align with the available fleet")
        if self.penalties.fleet_size != len(self.available):
            raise ValueError(
                f"penalty matrix has {self.penalties.fleet_size} columns for "
                f"{len(self.available)} available ambulances"
            )

    @property
    def busy(self) -> tuple[int, ...]:
        avail = set(self.available)
        return tuple(k for k in self.fleet if k not in avail)


def init_penalties(m: int, fleet: int) -> PenaltyMatrix:
    """Zero penalties for the opening period."""
    if m < 1 or fleet < 1:
        raise ValueError("need at least one station and one ambulance")
    return PenaltyMatrix.zeros(m, fleet)


def update_penalties(state: PeriodState, station_distance) -> PenaltyMatrix:
    """Distance-based penalties: relocating costs the inter-station distance.

    Column ``k`` of the result is the distance from ambulance ``k``'s
    current station to every station, so keeping a vehicle where it is
    costs nothing.
    """
    sd = np.asarray(station_distance, dtype=float)
    if sd.ndim != 2 or sd.shape[0] != sd.shape[1]:
        raise ValueError(f"station_distance must be square, got shape {sd.shape}")
    if any(not 0 <= p < sd.shape[0] for p in state.positions):
        raise ValueError("a position lies outside the station range")
    if not state.positions:
        return PenaltyMatrix(np.zeros((sd.shape[0], 0)))
    return PenaltyMatrix(sd[np.asarray(state.positions, dtype=np.int64), :].T)


def apply_event(state: PeriodState, event: Event) -> PeriodState:
    """Fold one event into the state.

    Dispatching removes the ambulance and its penalty column; returning
    reinstates it at the given station with a zero penalty column (a
    vehicle fresh from a mission carries no relocation history this
    period). The available list stays sorted by ambulance index.
    """
    k = event.ambulance
    if k not in state.fleet:
        raise ValueError(f"unknown ambulance {k + 1}")
    available = list(state.available)
    positions = list(state.positions)
    values = state.penalties.values

    if event.kind is EventKind.DISPATCH:
        if k not in available:
            raise ValueError(f"ambulance {k + 1} is busy and cannot be dispatched")
        idx = available.index(k)
        available.pop(idx)
        positions.pop(idx)
        values = np.delete(values, idx, axis=1)
    else:
        if k in available:
            raise ValueError(f"ambulance {k + 1} is already available")
        station = event.station
        if not 0 <= station < values.shape[0]:
            raise ValueError(f"return station {station} outside 0..{values.shape[0] - 1}")
        insort(available, k)
        idx = available.index(k)
        positions.insert(idx, station)
        values = np.insert(values, idx, 0.0, axis=1)

    return PeriodState(
        period=state.period,
        fleet=state.fleet,
        available=tuple(available),
        positions=tuple(positions),
        penalties=PenaltyMatrix(values),
    )


def _period_instance(instance: Instance, state: PeriodState) -> Instance:
    ambulances = tuple(
        Ambulance(idx, state.positions[idx])
        for idx in range(len(state.available))
    )
    return instance.with_fleet(ambulances)


def run_horizon(
    instance: Instance,
    events,
    kind: ModelKind,
    alpha_grid,
    config: SolverConfig | None = None,
    *,
    num_periods: int | None = None,
    operating_alpha: float | None = None,
    initial_penalties: PenaltyMatrix | None = None,
) -> HorizonTrace:
    """Run the relocation protocol for one model over several periods.

    Per period: refresh penalties from the previous period's positions
    (period 1 uses ``initial_penalties``, zeros by default), apply that
    period's events, then solve once per entry of ``alpha_grid``. The
    deployment of the operating proportion (the smallest feasible one by
    default, or ``operating_alpha`` if given) moves the fleet; if every
    proportion is infeasible the fleet stays where it is and the horizon
    continues.

    Reproducible: identical instance, events and config give a
    bit-identical trace apart from wall-clock fields.
    """
    report = validate_instance(instance)
    if not report.ok:
        raise InvalidInstanceError(report)
    events = sorted(events, key=lambda e: e.period)
    alpha_grid = [float(a) for a in alpha_grid]
    if operating_alpha is not None and operating_alpha not in alpha_grid:
        raise ValueError(f"operating alpha {operating_alpha} is not in the grid")
    if num_periods is None:
        num_periods = max([1] + [e.period for e in events])

    cov = build_coverage_matrices(instance.travel_time, instance.r1, instance.r2)
    m = instance.m
    fleet = tuple(range(instance.fleet_size))
    available = fleet
    positions = instance.home_stations

    rows = []
    records = []
    for period in range(1, num_periods + 1):
        if period == 1:
            penalties = (
                initial_penalties
                if initial_penalties is not None
                else PenaltyMatrix.zeros(m, len(available))
            )
            if penalties.values.shape != (m, len(available)):
                raise ValueError(
                    f"initial penalties shaped {penalties.values.shape}, "
                    f"need ({m}, {len(available)})"
                )
            state = PeriodState(period, fleet, available, positions, penalties)
        else:
            carry = PeriodState(
                period, fleet, available, positions,
                PenaltyMatrix.zeros(m, len(available)),
            )
            penalties = update_penalties(carry, instance.station_distance)
            state = PeriodState(period, fleet, available, positions, penalties)

        for event in events:
            if event.period == period:
                state = apply_event(state, event)

        period_inst = _period_instance(instance, state)
        solutions = {}
        for alpha in alpha_grid:
            sol = solve(period_inst.with_alpha(alpha), cov, state.penalties, kind, config)
            solutions[alpha] = sol
            rows.append(sweep_row(period, kind, alpha, sol, state.penalties))

        chosen_alpha = None
        if operating_alpha is not None:
            if solutions[operating_alpha].status is SolverStatus.OPTIMAL:
                chosen_alpha = operating_alpha
        else:
            for alpha in sorted(alpha_grid):
                if solutions[alpha].status is SolverStatus.OPTIMAL:
                    chosen_alpha = alpha
                    break

        deployment = None
        if chosen_alpha is not None:
            deployment = solutions[chosen_alpha].deployment
            positions = deployment.station_of
        else:
            positions = state.positions
        available = state.available
        records.append(
            PeriodRecord(
                period=period,
                available=state.available,
                operating_alpha=chosen_alpha,
                deployment=deployment,
            )
        )

    return HorizonTrace.from_rows(rows, records)
