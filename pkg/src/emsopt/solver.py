"""Exact search over deployments: depth-first branch-and-bound plus oracle.

Fixing the ambulance positions determines the best coverage decision in
closed form (see :mod:`emsopt.evaluation`), so the whole binary program
collapses to a search over capacity-respecting station assignments. The
search branches on ambulances in index order; the children of a node are
the stations with remaining capacity.

The node bound is admissible by construction: the coverage term can never
exceed the everything-covered value, and every still-unassigned ambulance
must pay at least its cheapest penalty. A node is cut only when its bound
is strictly below the incumbent (by more than the tolerance), so equal
optima are never lost and the lexicographic tie-break is exact.

Symmetry breaking treats ambulances with identical penalty columns as
interchangeable and forces their station indices to be nondecreasing; the
lexicographically smallest optimum always survives this restriction.

Coverage state is kept as point-bitmask integers, which makes one node a
handful of integer operations regardless of how many points there are.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .coverage import CoverageMatrices
from .errors import EnumerationLimitError
from .evaluation import (
    ABS_TOL,
    REL_TOL,
    Evaluation,
    ModelKind,
    evaluate_deployment,
    objective_weights,
)
from .instance import Deployment, Instance, PenaltyMatrix

__all__ = [
    "SolverStatus",
    "SolverConfig",
    "Solution",
    "solve",
    "brute_force",
    "node_bound",
    "BRUTE_FORCE_LIMIT",
]

BRUTE_FORCE_LIMIT = 10**7


class SolverStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    LIMIT_REACHED = "LimitReached"


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the exact search.

    ``pruning`` exists for diagnostics: disabling it replays the search
    without the bound cut, which must reproduce the same optimum.
    """

    node_limit: int | None = None
    time_limit: float | None = None  # seconds
    symmetry_breaking: bool = True
    tie_break: str = "lexicographic"
    pruning: bool = True

    def __post_init__(self):
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node_limit must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.tie_break != "lexicographic":
            raise ValueError(f"unsupported tie_break rule {self.tie_break!r}")


@dataclass(frozen=True, eq=False)
class Solution:
    status: SolverStatus
    deployment: Deployment | None
    evaluation: Evaluation | None
    nodes_explored: int
    best_bound: float
    wall_time: float

    @property
    def objective(self) -> float | None:
        return None if self.evaluation is None else self.evaluation.objective


def _check_dims(instance, cov, penalties):
    n, m, fleet = instance.n, instance.m, instance.fleet_size
    if cov.gamma.shape != (n, m):
        raise ValueError(
            f"coverage matrices shaped {cov.gamma.shape}, instance needs ({n}, {m})"
        )
    if penalties.values.shape != (m, fleet):
        raise ValueError(
            f"penalty matrix shaped {penalties.values.shape}, "
            f"instance needs ({m}, {fleet})"
        )


def _full_value(instance: Instance, kind: ModelKind) -> float:
    w1, w2, _ = objective_weights(instance, kind)
    return float(np.sum(w1) + np.sum(w2))


def node_bound(
    instance: Instance,
    penalties: PenaltyMatrix,
    assigned_stations,
    kind: ModelKind,
) -> float:
    """Admissible upper bound on the best completion of a partial assignment.

    ``assigned_stations`` fixes the first ambulances in index order. The
    bound assumes full coverage for free and charges each unassigned
    ambulance only its cheapest possible penalty, so it never underestimates
    any completion's objective.
    """
    assigned = list(assigned_stations)
    fleet = instance.fleet_size
    if len(assigned) > fleet:
        raise ValueError("partial assignment longer than the fleet")
    M = penalties.values
    pen = sum(float(M[j, k]) for k, j in enumerate(assigned))
    remaining = 0.0
    if fleet and len(assigned) < fleet:
        remaining = float(M[:, len(assigned):].min(axis=0).sum())
    return _full_value(instance, kind) - pen - remaining


def _incumbent_solution(
    instance, cov, penalties, kind, status, best_dep, nodes, best_bound, t0
) -> Solution:
    deployment = evaluation = None
    if best_dep is not None:
        deployment = Deployment(best_dep)
        evaluation = evaluate_deployment(instance, cov, deployment, penalties, kind)
    return Solution(
        status=status,
        deployment=deployment,
        evaluation=evaluation,
        nodes_explored=nodes,
        best_bound=best_bound,
        wall_time=perf_counter() - t0,
    )


def solve(
    instance: Instance,
    cov: CoverageMatrices,
    penalties: PenaltyMatrix,
    kind: ModelKind,
    config: SolverConfig | None = None,
) -> Solution:
    """Find a provably optimal feasible deployment, or prove there is none.

    Deterministic: identical inputs and config always return the same
    solution, and among equal-objective optima the lexicographically
    smallest station vector wins. Infeasibility is established by
    exhausting the (symmetry-reduced) search space; a limit interrupt
    returns the incumbent with status ``LimitReached``. Results under a
    ``time_limit`` depend on machine speed; all other runs are
    reproducible bit for bit.
    """
    config = config or SolverConfig()
    t0 = perf_counter()
    _check_dims(instance, cov, penalties)
    n, m, fleet = instance.n, instance.m, instance.fleet_size

    w1, w2, wp = objective_weights(instance, kind)
    w1_of = w1.tolist()
    w2_of = w2.tolist()
    wp_of = wp.tolist()
    full_value = float(np.sum(w1) + np.sum(w2))
    alpha_rhs = float(instance.alpha * np.sum(wp))
    prop_slack = REL_TOL * max(1.0, abs(alpha_rhs))

    gbits = cov.gamma_bits
    dbits = cov.delta_bits
    full_mask = cov.full_mask

    # A point no station can reach within r2 makes every deployment violate
    # the absolute-coverage constraint; certify infeasibility immediately.
    reachable = 0
    for col in dbits:
        reachable |= col
    if reachable != full_mask:
        return _incumbent_solution(
            instance, cov, penalties, kind,
            SolverStatus.INFEASIBLE, None, 0, -math.inf, t0,
        )

    M = penalties.values
    M_of = [M[j].tolist() for j in range(m)]
    caps = instance.capacities.tolist()

    # Cheapest-penalty suffix sums for the bound.
    min_pen = [float(M[:, k].min()) if m else 0.0 for k in range(fleet)]
    suffix = [0.0] * (fleet + 1)
    for k in range(fleet - 1, -1, -1):
        suffix[k] = suffix[k + 1] + min_pen[k]
    root_bound = full_value - suffix[0]

    # Children ordered cheapest penalty first so the dive finds a strong
    # incumbent early; ties fall back to station index.
    child_order = [
        sorted(range(m), key=lambda j, k=k: (M_of[j][k], j)) for k in range(fleet)
    ]

    # prev_same[k]: nearest earlier ambulance with an identical penalty
    # column; symmetry breaking forces station_of[k] >= its station.
    prev_same = [-1] * fleet
    if config.symmetry_breaking:
        for k in range(fleet):
            for q in range(k - 1, -1, -1):
                if np.array_equal(M[:, q], M[:, k]):
                    prev_same[k] = q
                    break

    node_limit = config.node_limit
    deadline = None if config.time_limit is None else t0 + config.time_limit
    pruning = config.pruning

    best_obj = -math.inf
    best_dep: tuple[int, ...] | None = None
    station_of = [0] * fleet
    nodes = 0
    aborted = False

    def dfs(k, c1_once, c1_twice, c2_once, value, prop, pen):
        nonlocal best_obj, best_dep, nodes, aborted
        if k == fleet:
            if c2_once == full_mask and prop >= alpha_rhs - prop_slack:
                obj = value - pen
                if obj > best_obj + ABS_TOL:
                    best_obj = obj
                    best_dep = tuple(station_of)
                elif obj >= best_obj - ABS_TOL and best_dep is not None:
                    cand = tuple(station_of)
                    if cand < best_dep:
                        best_dep = cand
            return
        floor = station_of[prev_same[k]] if prev_same[k] >= 0 else 0
        suffix_next = suffix[k + 1]
        for j in child_order[k]:
            if caps[j] == 0 or j < floor:
                continue
            if node_limit is not None and nodes >= node_limit:
                aborted = True
                return
            nodes += 1
            if deadline is not None and nodes % 1024 == 0 and perf_counter() > deadline:
                aborted = True
                return
            pen_child = pen + M_of[j][k]
            if pruning and full_value - pen_child - suffix_next <= best_obj - ABS_TOL:
                continue
            g = gbits[j]
            new1 = g & ~c1_once
            new2 = g & c1_once & ~c1_twice
            dv = 0.0
            dp = 0.0
            bits = new1
            while bits:
                low = bits & -bits
                i = low.bit_length() - 1
                dv += w1_of[i]
                dp += wp_of[i]
                bits ^= low
            bits = new2
            while bits:
                low = bits & -bits
                dv += w2_of[low.bit_length() - 1]
                bits ^= low
            station_of[k] = j
            caps[j] -= 1
            dfs(
                k + 1,
                c1_once | g,
                c1_twice | new2,
                c2_once | dbits[j],
                value + dv,
                prop + dp,
                pen_child,
            )
            caps[j] += 1
            if aborted:
                return

    dfs(0, 0, 0, 0, 0.0, 0.0, 0.0)

    if aborted:
        bound = max(best_obj, root_bound) if best_dep is not None else root_bound
        return _incumbent_solution(
            instance, cov, penalties, kind,
            SolverStatus.LIMIT_REACHED, best_dep, nodes, bound, t0,
        )
    if best_dep is None:
        return _incumbent_solution(
            instance, cov, penalties, kind,
            SolverStatus.INFEASIBLE, None, nodes, -math.inf, t0,
        )
    return _incumbent_solution(
        instance, cov, penalties, kind,
        SolverStatus.OPTIMAL, best_dep, nodes, best_obj, t0,
    )


def brute_force(
    instance: Instance,
    cov: CoverageMatrices,
    penalties: PenaltyMatrix,
    kind: ModelKind,
) -> Solution:
    """Exhaustive enumeration of all capacity-feasible deployments.

    The verification oracle: it shares nothing with the branch-and-bound
    search beyond the closed-form deployment evaluator. Guarded to
    ``m ** fleet <= 10**7`` raw assignments.
    """
    t0 = perf_counter()
    _check_dims(instance, cov, penalties)
    m, fleet = instance.m, instance.fleet_size
    if m == 0 and fleet > 0:
        return _incumbent_solution(
            instance, cov, penalties, kind,
            SolverStatus.INFEASIBLE, None, 0, -math.inf, t0,
        )
    if m > 0 and m**fleet > BRUTE_FORCE_LIMIT:
        raise EnumerationLimitError(
            f"{m}^{fleet} assignments exceed the enumeration guard "
            f"of {BRUTE_FORCE_LIMIT}"
        )
    caps = instance.capacities.tolist()
    best_obj = -math.inf
    best_dep = None
    evaluated = 0
    for combo in itertools.product(range(m), repeat=fleet):
        used = [0] * m
        ok = True
        for j in combo:
            used[j] += 1
            if used[j] > caps[j]:
                ok = False
                break
        if not ok:
            continue
        evaluated += 1
        ev = evaluate_deployment(instance, cov, Deployment(combo), penalties, kind)
        if ev.feasible and ev.objective > best_obj + ABS_TOL:
            best_obj = ev.objective
            best_dep = combo
    if best_dep is None:
        return _incumbent_solution(
            instance, cov, penalties, kind,
            SolverStatus.INFEASIBLE, None, evaluated, -math.inf, t0,
        )
    return _incumbent_solution(
        instance, cov, penalties, kind,
        SolverStatus.OPTIMAL, best_dep, evaluated, best_obj, t0,
    )
