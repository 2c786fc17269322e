"""Shared fixtures: the two-point tiny instance and seeded random instances."""

from __future__ import annotations

import numpy as np

from emsopt import (
    Ambulance,
    DemandPoint,
    Instance,
    PenaltyMatrix,
    Station,
)

T1_TRAVEL = ((5.0, 20.0), (12.0, 5.0))


def t1_instance(
    alpha: float = 0.5,
    fleet: int = 1,
    capacities: tuple[int, ...] = (1, 1),
    travel: tuple = T1_TRAVEL,
    r1: float = 7.0,
    r2: float = 15.0,
) -> Instance:
    """Two points (d=d1=[3,2], d2=[1,1]), two stations, tiny fleet."""
    points = [DemandPoint(0, 3.0, 1.0), DemandPoint(1, 2.0, 1.0)]
    stations = [Station(j, capacities[j]) for j in range(2)]
    ambulances = [Ambulance(k, 0) for k in range(fleet)]
    distance = np.array([[0.0, 4.0], [4.0, 0.0]])
    return Instance(
        points, stations, ambulances, np.array(travel), distance, r1, r2, alpha
    )


def random_instance(seed: int, n_max: int = 8, m_max: int = 5, k_max: int = 4):
    """Seeded small instance plus penalties, sized for brute-force checking.

    Travel times straddle both thresholds so gamma and delta vary; the
    penalty matrix is zero in a
    fraction of draws and sparse otherwise; alpha cycles through the
    interesting corners including 0 and 1.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    fleet = int(rng.integers(1, k_max + 1))
    r1 = 5.0 + 5.0 * rng.random()
    r2 = r1 + 1.0 + 5.0 * rng.random()
    travel = rng.uniform(0.0, 1.4 * r2, size=(n, m))

    d1 = rng.uniform(0.1, 5.0, size=n)
    d2 = d1 * rng.uniform(0.0, 1.0, size=n)
    if rng.random() < 0.3:
        d = rng.uniform(0.1, 5.0, size=n)
    else:
        d = d1.copy()
    points = [
        DemandPoint(i, float(d1[i]), float(d2[i]), float(d[i])) for i in range(n)
    ]

    capacities = rng.integers(1, fleet + 1, size=m)
    while capacities.sum() < fleet:
        capacities[int(rng.integers(0, m))] += 1
    stations = [Station(j, int(capacities[j])) for j in range(m)]

    remaining = capacities.copy()
    homes = []
    for _ in range(fleet):
        j = int(rng.choice(np.flatnonzero(remaining > 0)))
        remaining[j] -= 1
        homes.append(j)
    ambulances = [Ambulance(k, homes[k]) for k in range(fleet)]

    raw = rng.uniform(0.0, 10.0, size=(m, m))
    distance = (raw + raw.T) / 2.0
    np.fill_diagonal(distance, 0.0)

    alpha = float(rng.choice([0.0, 0.5, 0.9, 1.0]))
    instance = Instance(
        points, stations, ambulances, travel, distance, r1, r2, alpha
    )

    if rng.random() < 0.4:
        penalties = PenaltyMatrix.zeros(m, fleet)
    else:
        values = rng.uniform(0.0, 3.0, size=(m, fleet))
        values[rng.random(size=(m, fleet)) < 0.3] = 0.0
        penalties = PenaltyMatrix(values)
    return instance, penalties


def strip_wall_ms(csv_text: str) -> str:
    """Drop the trailing wall-clock column so runs can be compared exactly."""
    lines = csv_text.strip("\n").split("\n")
    return "\n".join(line.rsplit(",", 1)[0] for line in lines)
