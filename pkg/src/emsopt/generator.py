"""Seeded synthetic instances at the case-study scale.

The real call data behind the motivating deployment study is not public,
so experiments run on synthetic instances with the same dimensions: 47
demand zones, 12 candidate stations, 8 ambulances, a 10-minute outer
response threshold. Travel times are drawn so that every zone is
reachable within the tight threshold from a few stations and within the
loose threshold from several, which keeps the interesting proportion range
(0.90 to 1.00) mostly feasible without making coverage trivial.
"""

from __future__ import annotations

import numpy as np

from .instance import Ambulance, DemandPoint, Instance, Station

__all__ = ["generate_case_instance", "CASE_N", "CASE_M", "CASE_FLEET"]

CASE_N = 47
CASE_M = 12
CASE_FLEET = 8


def generate_case_instance(
    seed: int,
    n: int = CASE_N,
    m: int = CASE_M,
    fleet: int = CASE_FLEET,
    r1: float = 7.0,
    r2: float = 10.0,
    alpha: float = 0.9,
) -> Instance:
    """Deterministic random instance; same seed, same instance.

    Each demand point gets two stations inside ``r1``, two more inside
    ``r2`` and distant times everywhere else, so r2-reachability from at
    least two stations holds by construction while double coverage stays
    scarce enough that the models have to trade it off against the
    proportional requirement. Intensities are near-uniform with the
    simultaneous stream a fraction of the simple one.
    """
    if m < 4:
        raise ValueError("need at least 4 stations for the travel-time layout")
    rng = np.random.default_rng(seed)

    coords = rng.uniform(0.0, 20.0, size=(m, 2))
    diff = coords[:, None, :] - coords[None, :, :]
    station_distance = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(station_distance, 0.0)

    travel_time = rng.uniform(r2 + 0.5, 3.0 * r2, size=(n, m))
    for i in range(n):
        special = rng.choice(m, size=4, replace=False)
        near, mid = special[:2], special[2:]
        travel_time[i, near] = rng.uniform(2.0, r1 - 0.2, size=2)
        travel_time[i, mid] = rng.uniform(r1 + 0.5, r2 - 0.1, size=2)

    d1 = rng.uniform(0.5, 1.5, size=n)
    d2 = d1 * rng.uniform(0.1, 0.6, size=n)
    points = [DemandPoint(i, float(d1[i]), float(d2[i])) for i in range(n)]

    capacities = rng.integers(1, 4, size=m)
    stations = [Station(j, int(capacities[j])) for j in range(m)]

    remaining = capacities.copy()
    homes = []
    for _ in range(fleet):
        open_stations = np.flatnonzero(remaining > 0)
        j = int(rng.choice(open_stations))
        remaining[j] -= 1
        homes.append(j)
    ambulances = [Ambulance(k, homes[k]) for k in range(fleet)]

    return Instance(
        points, stations, ambulances, travel_time, station_distance, r1, r2, alpha
    )
