"""Closed-form evaluation of a fixed deployment under either model.

Once the ambulances are placed, the coverage indicators are not free
decisions: with nonnegative demand weights, the best choice is always
``x1[i] = (c1[i] >= 1)`` and ``x2[i] = (c1[i] >= 2)``. That pair
simultaneously maximizes the objective of both models and the left-hand
side of the proportional-coverage constraint, so evaluating a deployment
reduces to counting. This is what lets the exact solver search over
deployments only.

Model kinds:

* ``RP``  — objective ``sum_i d[i] * x2[i] - penalty``; proportional
  constraint (3) weighs ``x1`` by ``d``.
* ``DRP`` — objective ``sum_i (d1[i] * x1[i] + d2[i] * x2[i]) - penalty``;
  proportional constraint (12) weighs ``x1`` by ``d1``.

Both share the absolute-coverage constraint (2): every point reachable
within r2 by at least one assigned ambulance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .coverage import CoverageMatrices, coverage_counts
from .instance import Deployment, Instance, PenaltyMatrix, check_deployment

__all__ = [
    "ModelKind",
    "Evaluation",
    "greedy_coverage_decision",
    "evaluate_deployment",
    "feasibility_certificate",
    "objective_weights",
    "ABS_TOL",
    "REL_TOL",
]

# Absolute tolerance for objective comparisons; relative tolerance for the
# proportional-coverage inequality (scaled by max(1, |rhs|)).
ABS_TOL = 1e-9
REL_TOL = 1e-9


class ModelKind(enum.Enum):
    RP = "RP"
    DRP = "DRP"

    @property
    def proportional_constraint_id(self) -> int:
        return 3 if self is ModelKind.RP else 12


def objective_weights(
    instance: Instance, kind: ModelKind
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-point weights ``(w1, w2, wp)`` for a model kind.

    ``w1``/``w2`` weigh single/double coverage in the objective and ``wp``
    weighs single coverage in the proportional constraint.
    """
    if kind is ModelKind.RP:
        return np.zeros(instance.n), instance.d, instance.d
    return instance.d1, instance.d2, instance.d1


def proportional_ok(lhs: float, rhs: float) -> bool:
    return lhs >= rhs - REL_TOL * max(1.0, abs(rhs))


@dataclass(frozen=True, eq=False)
class Evaluation:
    """Verdict and value of one deployment under one model."""

    feasible: bool
    objective: float
    x1: np.ndarray  # bool: covered at least once within r1
    x2: np.ndarray  # bool: covered at least twice within r1
    c1: np.ndarray  # int: ambulances within r1
    c2: np.ndarray  # int: ambulances within r2
    violations: tuple[tuple[int, str], ...]

    @property
    def single_covered(self) -> int:
        return int(self.x1.sum())

    @property
    def double_covered(self) -> int:
        return int(self.x2.sum())


def greedy_coverage_decision(c1) -> tuple[np.ndarray, np.ndarray]:
    """Optimal coverage indicators for given within-r1 counts.

    Among all binary ``(x1, x2)`` with ``x1 + x2 <= c1`` and ``x2 <= x1``,
    the returned pair dominates every other choice term by term for any
    nonnegative weights.
    """
    c1 = np.asarray(c1)
    return c1 >= 1, c1 >= 2


def evaluate_deployment(
    instance: Instance,
    cov: CoverageMatrices,
    deployment: Deployment,
    penalties: PenaltyMatrix,
    kind: ModelKind,
) -> Evaluation:
    """Evaluate a fixed deployment: objective, implied x, feasibility.

    Infeasibility is a verdict (``feasible=False`` plus violations), not an
    error; only dimension mismatches raise. The objective is reported even
    for infeasible deployments (useful as a diagnostic).
    """
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

    violations: list[tuple[int, str]] = []
    c1, c2 = coverage_counts(cov, deployment)  # also validates station range
    x1, x2 = greedy_coverage_decision(c1)
    w1, w2, wp = objective_weights(instance, kind)

    for i in np.flatnonzero(c2 == 0):
        violations.append(
            (2, f"point {i + 1} is not covered within r2 by any ambulance")
        )

    lhs = float(wp[x1].sum())
    rhs = float(instance.alpha * wp.sum())
    if not proportional_ok(lhs, rhs):
        cid = kind.proportional_constraint_id
        violations.append(
            (
                cid,
                f"covered demand {lhs:.6f} below required "
                f"{instance.alpha:.2f} of total ({rhs:.6f})",
            )
        )

    violations.extend(check_deployment(instance, deployment))

    k_idx = np.arange(fleet)
    stations = np.asarray(deployment.station_of, dtype=np.int64)
    penalty = float(penalties.values[stations, k_idx].sum()) if fleet else 0.0
    objective = float(w1[x1].sum() + w2[x2].sum()) - penalty

    return Evaluation(
        feasible=not violations,
        objective=objective,
        x1=x1,
        x2=x2,
        c1=c1,
        c2=c2,
        violations=tuple(violations),
    )


def feasibility_certificate(
    instance: Instance,
    cov: CoverageMatrices,
    deployment: Deployment,
    kind: ModelKind,
) -> tuple[tuple[int, str], ...]:
    """Constraint violations of a deployment, empty iff it is feasible.

    Each entry names the violated constraint id (2 for absolute coverage,
    3/12 for the proportional requirement, 7 for station capacity) and the
    offending indices. Penalties never affect feasibility.
    """
    penalties = PenaltyMatrix.zeros(instance.m, instance.fleet_size)
    return evaluate_deployment(instance, cov, deployment, penalties, kind).violations
