import numpy as np
import pytest

from emsopt import (
    Ambulance,
    DemandPoint,
    Deployment,
    Instance,
    PenaltyMatrix,
    Station,
    check_deployment,
    validate_instance,
)
from helpers import t1_instance


def test_t1_is_valid():
    report = validate_instance(t1_instance())
    assert report.ok
    assert report.errors == []
    assert report.warnings == []


def test_equal_thresholds_rejected():
    inst = t1_instance(r1=10.0, r2=10.0)
    report = validate_instance(inst)
    assert not report.ok
    assert any("r1 < r2 required" in e for e in report.errors)


def test_insufficient_capacity_detected():
    points = [DemandPoint(i, 1.0, 0.5) for i in range(3)]
    stations = [Station(0, 2), Station(1, 3)]
    ambulances = [Ambulance(k, 0) for k in range(8)]
    inst = Instance(
        points,
        stations,
        ambulances,
        np.ones((3, 2)),
        np.zeros((2, 2)),
        7.0,
        15.0,
        0.5,
    )
    report = validate_instance(inst)
    assert any("insufficient total capacity" in e for e in report.errors)


def test_validate_is_idempotent():
    inst = t1_instance(r1=10.0, r2=10.0)
    first = validate_instance(inst)
    second = validate_instance(inst)
    assert first.errors == second.errors
    assert first.warnings == second.warnings


def test_d2_above_d1_is_warning_not_error():
    points = [DemandPoint(0, 1.0, 2.0), DemandPoint(1, 2.0, 1.0)]
    stations = [Station(0, 1), Station(1, 1)]
    inst = Instance(
        points,
        stations,
        [Ambulance(0, 0)],
        np.ones((2, 2)),
        np.zeros((2, 2)),
        7.0,
        15.0,
        0.5,
    )
    report = validate_instance(inst)
    assert report.ok
    assert any("d2" in w for w in report.warnings)


def test_dimension_mismatch_reported():
    inst = t1_instance()
    bad = Instance(
        inst.points,
        inst.stations,
        inst.ambulances,
        np.ones((3, 2)),
        inst.station_distance,
        7.0,
        15.0,
        0.5,
    )
    report = validate_instance(bad)
    assert any("travel_time shape" in e for e in report.errors)


def test_asymmetric_station_distance_reported():
    inst = t1_instance()
    bad = Instance(
        inst.points,
        inst.stations,
        inst.ambulances,
        inst.travel_time,
        np.array([[0.0, 1.0], [2.0, 0.0]]),
        7.0,
        15.0,
        0.5,
    )
    report = validate_instance(bad)
    assert any("symmetric" in e for e in report.errors)


def test_alpha_out_of_range_reported():
    report = validate_instance(t1_instance(alpha=1.5))
    assert any("alpha" in e for e in report.errors)


def test_d_defaults_to_d1():
    p = DemandPoint(0, 3.0, 1.0)
    assert p.d == 3.0
    q = DemandPoint(0, 3.0, 1.0, d=5.0)
    assert q.d == 5.0


def test_instance_arrays_are_immutable():
    inst = t1_instance()
    with pytest.raises(ValueError):
        inst.travel_time[0, 0] = 99.0
    penalties = PenaltyMatrix.zeros(2, 1)
    with pytest.raises(ValueError):
        penalties.values[0, 0] = 1.0


def test_penalty_matrix_rejects_bad_entries():
    with pytest.raises(ValueError):
        PenaltyMatrix(np.array([[-1.0]]))
    with pytest.raises(ValueError):
        PenaltyMatrix(np.array([[np.inf]]))
    with pytest.raises(ValueError):
        PenaltyMatrix(np.array([1.0, 2.0]))


def test_check_deployment_capacity():
    inst = t1_instance(fleet=2, capacities=(1, 1))
    assert check_deployment(inst, Deployment((0, 1))) == []
    violations = check_deployment(inst, Deployment((0, 0)))
    assert len(violations) == 1
    cid, detail = violations[0]
    assert cid == 7
    assert "station 1" in detail


def test_check_deployment_dimension_errors():
    inst = t1_instance()
    with pytest.raises(ValueError):
        check_deployment(inst, Deployment((0, 1)))
    with pytest.raises(ValueError):
        check_deployment(inst, Deployment((5,)))


def test_with_alpha_preserves_everything_else():
    inst = t1_instance(alpha=0.5)
    other = inst.with_alpha(0.9)
    assert other.alpha == 0.9
    assert other.points == inst.points
    assert np.array_equal(other.travel_time, inst.travel_time)
    assert inst == t1_instance(alpha=0.5)
    assert inst != other
