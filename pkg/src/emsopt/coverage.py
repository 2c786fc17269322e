"""Accessibility matrices and per-point coverage counts.

``gamma[i, j]`` says whether station ``j`` reaches point ``i`` within the
tight threshold ``r1``; ``delta[i, j]`` within the loose threshold ``r2``.
Both comparisons are inclusive. Since ``r1 < r2``, gamma implies delta.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .instance import Deployment

__all__ = ["CoverageMatrices", "build_coverage_matrices", "coverage_counts"]


@dataclass(frozen=True, eq=False)
class CoverageMatrices:
    gamma: np.ndarray  # (n, m) bool: reachable within r1
    delta: np.ndarray  # (n, m) bool: reachable within r2

    def __post_init__(self):
        g = np.array(self.gamma, dtype=bool)
        d = np.array(self.delta, dtype=bool)
        if g.ndim != 2 or g.shape != d.shape:
            raise ValueError(
                f"gamma shape {g.shape} and delta shape {d.shape} must match"
            )
        g.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "delta", d)

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    @property
    def m(self) -> int:
        return self.gamma.shape[1]

    @cached_property
    def _gamma_int(self) -> np.ndarray:
        return self.gamma.astype(np.int64)

    @cached_property
    def _delta_int(self) -> np.ndarray:
        return self.delta.astype(np.int64)

    # Station columns packed as point-bitmasks; the exact search flips
    # coverage state with a couple of integer ops per node instead of a
    # row sweep. Observable results are identical to the plain double sum.
    @cached_property
    def gamma_bits(self) -> tuple[int, ...]:
        return _pack_columns(self.gamma)

    @cached_property
    def delta_bits(self) -> tuple[int, ...]:
        return _pack_columns(self.delta)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n) - 1


def _pack_columns(matrix: np.ndarray) -> tuple[int, ...]:
    cols = []
    for j in range(matrix.shape[1]):
        mask = 0
        for i in np.flatnonzero(matrix[:, j]):
            mask |= 1 << int(i)
        cols.append(mask)
    return tuple(cols)


def build_coverage_matrices(travel_time, r1: float, r2: float) -> CoverageMatrices:
    """Threshold a travel-time matrix into the two accessibility matrices.

    Comparison is inclusive: a point exactly ``r1`` minutes away counts as
    covered. Raises ``ValueError`` unless ``r1 < r2`` and all entries are
    finite and nonnegative.
    """
    if not r1 < r2:
        raise ValueError(f"r1 < r2 required, got r1={r1}, r2={r2}")
    t = np.asarray(travel_time, dtype=float)
    if t.ndim != 2:
        raise ValueError(f"travel_time must be 2-D, got shape {t.shape}")
    if not np.isfinite(t).all():
        raise ValueError("travel_time entries must be finite")
    if (t < 0).any():
        raise ValueError("travel_time entries must be nonnegative")
    return CoverageMatrices(gamma=t <= r1, delta=t <= r2)


def coverage_counts(
    cov: CoverageMatrices, deployment: Deployment
) -> tuple[np.ndarray, np.ndarray]:
    """Per-point counts of ambulances within r1 (``c1``) and r2 (``c2``).

    Equivalent to the double sum over stations and ambulances of the
    accessibility indicator times the assignment indicator.
    """
    counts = deployment.station_counts(cov.m)
    c1 = cov._gamma_int @ counts
    c2 = cov._delta_int @ counts
    return c1, c2
