"""Instance, event and penalty file formats (JSON).

The instance document is flat and hand-writable::

    {
      "r1": 7.0,
      "r2": 15.0,
      "alpha": 0.5,
      "points": [{"id": 1, "d1": 3.0, "d2": 1.0, "d": 3.0}, ...],
      "stations": [{"id": 1, "capacity": 1}, ...],
      "ambulances": [{"id": 1, "home_station": 1}, ...],
      "travel_time": [[...m values...], ... n rows ...],
      "station_distance": [[...m values...], ... m rows ...]
    }

Ids are 1-based and sequential in files; ``d`` and ``alpha`` are optional
(``d`` defaults to ``d1``, ``alpha`` to 0.9). An events document is a list
of ``{"period": t, "kind": "dispatch"|"return", "ambulance": k,
"station": j}`` objects (station only for returns). A penalties document
is a bare 2-D array, stations by rows and ambulances by columns.

Malformed documents raise :class:`~emsopt.errors.SchemaError` with a
path-qualified message; a structurally sound document whose data breaks an
instance invariant raises :class:`~emsopt.errors.InvalidInstanceError`.
"""

from __future__ import annotations

import json
import os
from collections.abc import Mapping

from .dynamics import Event, EventKind
from .errors import InvalidInstanceError, SchemaError
from .instance import (
    Ambulance,
    DemandPoint,
    Instance,
    PenaltyMatrix,
    Station,
    validate_instance,
)

__all__ = [
    "load_instance",
    "save_instance",
    "load_events",
    "save_events",
    "load_penalties",
    "DEFAULT_ALPHA",
]

DEFAULT_ALPHA = 0.9


def _read_document(source):
    if isinstance(source, (Mapping, list)):
        return source
    try:
        if hasattr(source, "read"):
            return json.load(source)
        with open(os.fspath(source), "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc


def _require(doc, key, path=""):
    if key not in doc:
        where = f"{path}.{key}" if path else key
        raise SchemaError(f"{where}: missing required field")
    return doc[key]


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _integer(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{path}: expected an integer, got {value!r}")
    return value


def _sequential_id(entry, pos, path):
    got = _integer(_require(entry, "id", path), f"{path}.id")
    if got != pos + 1:
        raise SchemaError(f"{path}.id: expected sequential id {pos + 1}, got {got}")
    return pos


def _matrix(value, rows, cols, path):
    if not isinstance(value, list) or len(value) != rows:
        raise SchemaError(f"{path}: expected {rows} rows")
    out = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaError(f"{path}[{i}]: expected {cols} values")
        out.append([_number(v, f"{path}[{i}][{j}]") for j, v in enumerate(row)])
    return out


def load_instance(source) -> Instance:
    """Parse and validate an instance document (path, file object or dict)."""
    doc = _read_document(source)
    if not isinstance(doc, Mapping):
        raise SchemaError("top level: expected an object")

    raw_points = _require(doc, "points")
    if not isinstance(raw_points, list) or not raw_points:
        raise SchemaError("points: expected a non-empty list")
    points = []
    for pos, entry in enumerate(raw_points):
        path = f"points[{pos}]"
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{path}: expected an object")
        _sequential_id(entry, pos, path)
        d1 = _number(_require(entry, "d1", path), f"{path}.d1")
        d2 = _number(_require(entry, "d2", path), f"{path}.d2")
        d = _number(entry["d"], f"{path}.d") if "d" in entry else None
        points.append(DemandPoint(pos, d1, d2, d))

    raw_stations = _require(doc, "stations")
    if not isinstance(raw_stations, list) or not raw_stations:
        raise SchemaError("stations: expected a non-empty list")
    stations = []
    for pos, entry in enumerate(raw_stations):
        path = f"stations[{pos}]"
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{path}: expected an object")
        _sequential_id(entry, pos, path)
        capacity = _integer(_require(entry, "capacity", path), f"{path}.capacity")
        stations.append(Station(pos, capacity))

    raw_ambulances = _require(doc, "ambulances")
    if not isinstance(raw_ambulances, list):
        raise SchemaError("ambulances: expected a list")
    ambulances = []
    for pos, entry in enumerate(raw_ambulances):
        path = f"ambulances[{pos}]"
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{path}: expected an object")
        _sequential_id(entry, pos, path)
        home = _integer(_require(entry, "home_station", path), f"{path}.home_station")
        if not 1 <= home <= len(stations):
            raise SchemaError(
                f"{path}.home_station: station id {home} outside 1..{len(stations)}"
            )
        ambulances.append(Ambulance(pos, home - 1))

    n, m = len(points), len(stations)
    travel_time = _matrix(_require(doc, "travel_time"), n, m, "travel_time")
    station_distance = _matrix(
        _require(doc, "station_distance"), m, m, "station_distance"
    )
    r1 = _number(_require(doc, "r1"), "r1")
    r2 = _number(_require(doc, "r2"), "r2")
    alpha = _number(doc["alpha"], "alpha") if "alpha" in doc else DEFAULT_ALPHA

    instance = Instance(
        points, stations, ambulances, travel_time, station_distance, r1, r2, alpha
    )
    report = validate_instance(instance)
    if not report.ok:
        raise InvalidInstanceError(report)
    return instance


def save_instance(instance: Instance, destination=None) -> str:
    """Serialize an instance to JSON text; round-trips exactly through load."""
    doc = {
        "r1": instance.r1,
        "r2": instance.r2,
        "alpha": instance.alpha,
        "points": [
            {"id": p.id + 1, "d": p.d, "d1": p.d1, "d2": p.d2} for p in instance.points
        ],
        "stations": [
            {"id": s.id + 1, "capacity": int(s.capacity)} for s in instance.stations
        ],
        "ambulances": [
            {"id": a.id + 1, "home_station": a.home_station + 1}
            for a in instance.ambulances
        ],
        "travel_time": instance.travel_time.tolist(),
        "station_distance": instance.station_distance.tolist(),
    }
    text = json.dumps(doc, indent=2) + "\n"
    if destination is None:
        return text
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(os.fspath(destination), "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def load_events(source) -> tuple[Event, ...]:
    """Parse an events document into Event objects (0-based indices)."""
    doc = _read_document(source)
    if not isinstance(doc, list):
        raise SchemaError("top level: expected a list of events")
    events = []
    for pos, entry in enumerate(doc):
        path = f"events[{pos}]"
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{path}: expected an object")
        period = _integer(_require(entry, "period", path), f"{path}.period")
        if period < 1:
            raise SchemaError(f"{path}.period: must be >= 1")
        kind_raw = _require(entry, "kind", path)
        try:
            kind = EventKind(kind_raw)
        except ValueError:
            raise SchemaError(
                f"{path}.kind: expected 'dispatch' or 'return', got {kind_raw!r}"
            ) from None
        ambulance = _integer(_require(entry, "ambulance", path), f"{path}.ambulance")
        if ambulance < 1:
            raise SchemaError(f"{path}.ambulance: must be >= 1")
        station = None
        if kind is EventKind.RETURN:
            station = _integer(_require(entry, "station", path), f"{path}.station") - 1
        events.append(Event(period, kind, ambulance - 1, station))
    return tuple(events)


def save_events(events, destination=None) -> str:
    """Serialize events back to the 1-based JSON form."""
    doc = []
    for e in events:
        entry = {"period": e.period, "kind": e.kind.value, "ambulance": e.ambulance + 1}
        if e.station is not None:
            entry["station"] = e.station + 1
        doc.append(entry)
    text = json.dumps(doc, indent=2) + "\n"
    if destination is None:
        return text
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(os.fspath(destination), "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def load_penalties(source, m: int, fleet: int) -> PenaltyMatrix:
    """Parse a penalties document and check it against the instance dims."""
    doc = _read_document(source)
    values = _matrix(doc, m, fleet, "penalties")
    try:
        return PenaltyMatrix(values)
    except ValueError as exc:
        raise SchemaError(f"penalties: {exc}") from exc
