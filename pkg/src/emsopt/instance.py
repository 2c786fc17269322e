"""Problem data containers and validation.

An :class:`Instance` bundles everything a single planning period needs:
demand points with their call intensities, candidate stations with
ambulance capacities, the fleet, a travel-time matrix from stations to
demand points, an inter-station distance matrix (used for relocation
penalties), the two response-time thresholds ``r1 < r2`` and the
proportional-coverage target ``alpha``.

All indices are 0-based in memory; the file formats and human-facing
reports use 1-based ids (see :mod:`emsopt.io`).

Instances, penalty matrices and deployments are immutable after
construction and safe to share between concurrent solver calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "DemandPoint",
    "Station",
    "Ambulance",
    "Instance",
    "PenaltyMatrix",
    "Deployment",
    "ValidationReport",
    "validate_instance",
    "check_deployment",
]


def _readonly(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DemandPoint:
    """One demand zone.

    ``d1`` is the mean intensity of all service requests at the point and
    ``d2`` the mean intensity of simultaneous requests (a second call
    arriving while the covering vehicle is busy in the same zone).
    ``d`` is the generic demand weight; it defaults to ``d1`` when omitted.
    """

    id: int
    d1: float
    d2: float
    d: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "d1", float(self.d1))
        object.__setattr__(self, "d2", float(self.d2))
        object.__setattr__(self, "d", float(self.d1 if self.d is None else self.d))


@dataclass(frozen=True)
class Station:
    """A service centre with room for at most ``capacity`` ambulances."""

    id: int
    capacity: int


@dataclass(frozen=True)
class Ambulance:
    """A vehicle and the station it currently waits at."""

    id: int
    home_station: int


@dataclass(frozen=True, eq=False)
class Instance:
    points: tuple[DemandPoint, ...]
    stations: tuple[Station, ...]
    ambulances: tuple[Ambulance, ...]
    travel_time: np.ndarray  # (n, m): minutes from station j to point i
    station_distance: np.ndarray  # (m, m): symmetric, zero diagonal
    r1: float
    r2: float
    alpha: float = 0.9

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "stations", tuple(self.stations))
        object.__setattr__(self, "ambulances", tuple(self.ambulances))
        object.__setattr__(self, "travel_time", _readonly(self.travel_time))
        object.__setattr__(self, "station_distance", _readonly(self.station_distance))
        object.__setattr__(self, "r1", float(self.r1))
        object.__setattr__(self, "r2", float(self.r2))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.stations)

    @property
    def fleet_size(self) -> int:
        return len(self.ambulances)

    @cached_property
    def d(self) -> np.ndarray:
        return _readonly([p.d for p in self.points])

    @cached_property
    def d1(self) -> np.ndarray:
        return _readonly([p.d1 for p in self.points])

    @cached_property
    def d2(self) -> np.ndarray:
        return _readonly([p.d2 for p in self.points])

    @cached_property
    def capacities(self) -> np.ndarray:
        return _readonly([s.capacity for s in self.stations], dtype=np.int64)

    @cached_property
    def home_stations(self) -> tuple[int, ...]:
        return tuple(a.home_station for a in self.ambulances)

    def with_alpha(self, alpha: float) -> "Instance":
        """Copy of this instance with a different coverage proportion."""
        return Instance(
            self.points,
            self.stations,
            self.ambulances,
            self.travel_time,
            self.station_distance,
            self.r1,
            self.r2,
            alpha,
        )

    def with_fleet(self, ambulances) -> "Instance":
        """Copy of this instance with a different fleet (same geometry)."""
        return Instance(
            self.points,
            self.stations,
            ambulances,
            self.travel_time,
            self.station_distance,
            self.r1,
            self.r2,
            self.alpha,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.points == other.points
            and self.stations == other.stations
            and self.ambulances == other.ambulances
            and np.array_equal(self.travel_time, other.travel_time)
            and np.array_equal(self.station_distance, other.station_distance)
            and self.r1 == other.r1
            and self.r2 == other.r2
            and self.alpha == other.alpha
        )


@dataclass(frozen=True, eq=False)
class PenaltyMatrix:
    """Relocation penalties, one column per ambulance.

    ``values[j, k]`` is the cost of stationing ambulance ``k`` at station
    ``j`` in the current period. Entries must be finite and nonnegative.
    """

    values: np.ndarray  # (m, fleet)

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"penalty matrix must be 2-D, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("penalty matrix entries must be finite")
        if (arr < 0).any():
            raise ValueError("penalty matrix entries must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, m: int, fleet: int) -> "PenaltyMatrix":
        return cls(np.zeros((m, fleet)))

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def fleet_size(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PenaltyMatrix):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class Deployment:
    """An assignment of every available ambulance to one station.

    ``station_of[k]`` is the 0-based station index of ambulance ``k``. The
    vector encoding makes the one-station-per-ambulance rule structural;
    capacity compliance is checked by :func:`check_deployment`.
    """

    station_of: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "station_of", tuple(int(j) for j in self.station_of))

    @property
    def fleet_size(self) -> int:
        return len(self.station_of)

    def station_counts(self, m: int) -> np.ndarray:
        """Number of ambulances placed at each of the ``m`` stations."""
        if any(j < 0 or j >= m for j in self.station_of):
            raise ValueError("deployment references a station outside 0..m-1")
        return np.bincount(np.asarray(self.station_of, dtype=np.int64), minlength=m)

    def as_ids(self) -> tuple[int, ...]:
        """1-based station ids, for reports."""
        return tuple(j + 1 for j in self.station_of)


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_instance`: violations are data, not errors."""

    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_instance(instance: Instance) -> ValidationReport:
    """Check every structural invariant of an instance.

    Returns a report whose ``errors`` list is empty exactly when the
    instance is usable by the evaluators and solvers. The relation
    ``d2 <= d1`` is reported as a warning only: simultaneous calls being a
    sub-stream of all calls is a modelling convention, not a hard rule.
    Idempotent and side-effect free.
    """
    errors: list[str] = []
    warnings: list[str] = []
    n, m, fleet = instance.n, instance.m, instance.fleet_size

    if n == 0:
        errors.append("instance has no demand points")
    if m == 0:
        errors.append("instance has no stations")

    for pos, p in enumerate(instance.points):
        if p.id != pos:
            errors.append(f"point at position {pos} has id {p.id}, expected {pos}")
        if p.d < 0 or p.d1 < 0 or p.d2 < 0:
            errors.append(f"point {pos + 1}: demand intensities must be nonnegative")
        if p.d2 > p.d1:
            warnings.append(
                f"point {pos + 1}: simultaneous intensity d2={p.d2} exceeds d1={p.d1}"
            )

    total_capacity = 0
    for pos, s in enumerate(instance.stations):
        if s.id != pos:
            errors.append(f"station at position {pos} has id {s.id}, expected {pos}")
        if s.capacity != int(s.capacity):
            errors.append(f"station {pos + 1}: capacity must be an integer")
        elif s.capacity < 0:
            errors.append(f"station {pos + 1}: capacity must be nonnegative")
        else:
            total_capacity += int(s.capacity)
    if total_capacity < fleet:
        errors.append(
            f"insufficient total capacity: sum of U_j = {total_capacity} "
            f"< fleet size {fleet}"
        )

    for pos, a in enumerate(instance.ambulances):
        if a.id != pos:
            errors.append(f"ambulance at position {pos} has id {a.id}, expected {pos}")
        if not (0 <= a.home_station < m):
            errors.append(
                f"ambulance {pos + 1}: home station {a.home_station} outside 0..{m - 1}"
            )

    t = instance.travel_time
    if t.shape != (n, m):
        errors.append(f"travel_time shape {t.shape} does not match (n, m) = ({n}, {m})")
    else:
        if not np.isfinite(t).all():
            errors.append("travel_time entries must be finite")
        if (t < 0).any():
            errors.append("travel_time entries must be nonnegative")

    sd = instance.station_distance
    if sd.shape != (m, m):
        errors.append(
            f"station_distance shape {sd.shape} does not match (m, m) = ({m}, {m})"
        )
    else:
        if not np.isfinite(sd).all():
            errors.append("station_distance entries must be finite")
        if (sd < 0).any():
            errors.append("station_distance entries must be nonnegative")
        if np.isfinite(sd).all() and not np.array_equal(sd, sd.T):
            errors.append("station_distance must be symmetric")
        if sd.shape[0] == m and m > 0 and np.isfinite(sd).all() and np.diag(sd).any():
            errors.append("station_distance must have a zero diagonal")

    if not (instance.r1 > 0 and instance.r2 > 0):
        errors.append("thresholds r1 and r2 must be positive")
    if not instance.r1 < instance.r2:
        errors.append("r1 < r2 required")
    if not (0.0 <= instance.alpha <= 1.0):
        errors.append(f"alpha = {instance.alpha} outside [0, 1]")

    return ValidationReport(errors=errors, warnings=warnings)


def check_deployment(instance: Instance, deployment: Deployment) -> list[tuple[int, str]]:
    """Capacity violations of a deployment, as ``(constraint_id, detail)`` pairs.

    The vector encoding already guarantees one station per ambulance
    (constraint 6); what remains is the per-station capacity bound
    (constraint 7). Raises ``ValueError`` on dimension mismatch.
    """
    if deployment.fleet_size != instance.fleet_size:
        raise ValueError(
            f"deployment has {deployment.fleet_size} entries for a fleet of "
            f"{instance.fleet_size}"
        )
    counts = deployment.station_counts(instance.m)
    violations = []
    for j in np.flatnonzero(counts > instance.capacities):
        violations.append(
            (
                7,
                f"station {j + 1} holds {int(counts[j])} ambulances, "
                f"capacity {int(instance.capacities[j])}",
            )
        )
    return violations
