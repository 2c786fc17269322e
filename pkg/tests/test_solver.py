import itertools

import numpy as np
import pytest

from emsopt import (
    Deployment,
    EnumerationLimitError,
    ModelKind,
    PenaltyMatrix,
    SolverConfig,
    SolverStatus,
    brute_force,
    build_coverage_matrices,
    evaluate_deployment,
    node_bound,
    solve,
)
from helpers import random_instance, t1_instance


def _cov(instance):
    return build_coverage_matrices(instance.travel_time, instance.r1, instance.r2)


def test_t1_drp_optimum():
    inst = t1_instance()
    sol = solve(inst, _cov(inst), PenaltyMatrix.zeros(2, 1), ModelKind.DRP)
    assert sol.status is SolverStatus.OPTIMAL
    assert sol.deployment.station_of == (0,)
    assert sol.objective == pytest.approx(3.0, abs=1e-9)
    assert sol.best_bound == pytest.approx(sol.objective, abs=1e-9)


def test_t1_two_ambulances_rp_stacks_station_one():
    inst = t1_instance(fleet=2, capacities=(2, 2))
    for kind in ModelKind:
        sol = solve(inst, _cov(inst), PenaltyMatrix.zeros(2, 2), kind)
        assert sol.status is SolverStatus.OPTIMAL
        if kind is ModelKind.RP:
            assert sol.deployment.station_of == (0, 0)
            assert sol.objective == pytest.approx(3.0, abs=1e-9)


def test_t1_disconnected_is_infeasible():
    inst = t1_instance(travel=((5.0, 20.0), (20.0, 5.0)))
    sol = solve(inst, _cov(inst), PenaltyMatrix.zeros(2, 1), ModelKind.DRP)
    assert sol.status is SolverStatus.INFEASIBLE
    assert sol.deployment is None


def test_brute_force_matches_solve_on_t1():
    inst = t1_instance()
    cov = _cov(inst)
    zeros = PenaltyMatrix.zeros(2, 1)
    for kind in ModelKind:
        a = solve(inst, cov, zeros, kind)
        b = brute_force(inst, cov, zeros, kind)
        assert a.status == b.status
        assert a.objective == pytest.approx(b.objective, abs=1e-9)
        assert a.deployment.station_of == b.deployment.station_of


def test_oracle_equivalence_random_instances():
    for seed in range(60):
        instance, penalties = random_instance(seed)
        cov = _cov(instance)
        for kind in ModelKind:
            exact = solve(instance, cov, penalties, kind)
            oracle = brute_force(instance, cov, penalties, kind)
            assert exact.status == oracle.status, f"seed {seed} {kind}"
            if exact.status is SolverStatus.OPTIMAL:
                assert exact.objective == pytest.approx(
                    oracle.objective, abs=1e-9
                ), f"seed {seed} {kind}"
                assert exact.deployment.station_of == oracle.deployment.station_of


def test_equivalent_stations_yield_equal_objectives():
    # identical coverage columns and penalties: every arrangement of the
    # same multiset scores identically
    instance, _ = random_instance(5, n_max=4, m_max=3, k_max=3)
    travel = np.tile(instance.travel_time[:, :1], (1, instance.m))
    inst = type(instance)(
        instance.points,
        instance.stations,
        instance.ambulances,
        travel,
        instance.station_distance,
        instance.r1,
        instance.r2,
        0.0,
    )
    cov = _cov(inst)
    zeros = PenaltyMatrix.zeros(inst.m, inst.fleet_size)
    values = set()
    for combo in itertools.product(range(inst.m), repeat=inst.fleet_size):
        dep = Deployment(combo)
        if (dep.station_counts(inst.m) > inst.capacities).any():
            continue
        ev = evaluate_deployment(inst, cov, dep, zeros, ModelKind.DRP)
        values.add(round(ev.objective, 9))
    assert len(values) == 1


def test_alpha_zero_everything_feasible_when_delta_full():
    instance, _ = random_instance(8, n_max=4, m_max=3, k_max=2)
    travel = np.zeros((instance.n, instance.m))
    inst = type(instance)(
        instance.points,
        instance.stations,
        instance.ambulances,
        travel,
        instance.station_distance,
        instance.r1,
        instance.r2,
        0.0,
    )
    cov = _cov(inst)
    zeros = PenaltyMatrix.zeros(inst.m, inst.fleet_size)
    for combo in itertools.product(range(inst.m), repeat=inst.fleet_size):
        dep = Deployment(combo)
        if (dep.station_counts(inst.m) > inst.capacities).any():
            continue
        ev = evaluate_deployment(inst, cov, dep, zeros, ModelKind.RP)
        assert ev.feasible


def test_node_bound_full_coverage_values():
    inst = t1_instance()
    zeros = PenaltyMatrix.zeros(2, 1)
    assert node_bound(inst, zeros, [], ModelKind.RP) == pytest.approx(5.0)
    assert node_bound(inst, zeros, [], ModelKind.DRP) == pytest.approx(7.0)


def test_node_bound_admissible_against_completions():
    for seed in range(25):
        instance, penalties = random_instance(seed, n_max=5, m_max=4, k_max=3)
        cov = _cov(instance)
        rng = np.random.default_rng(seed + 500)
        depth = int(rng.integers(0, instance.fleet_size + 1))
        prefix = [int(rng.integers(0, instance.m)) for _ in range(depth)]
        for kind in ModelKind:
            bound = node_bound(instance, penalties, prefix, kind)
            # best completion by enumeration
            best = -np.inf
            rest = instance.fleet_size - depth
            for tail in itertools.product(range(instance.m), repeat=rest):
                dep = Deployment(tuple(prefix) + tail)
                if (dep.station_counts(instance.m) > instance.capacities).any():
                    continue
                ev = evaluate_deployment(instance, cov, dep, penalties, kind)
                if ev.feasible:
                    best = max(best, ev.objective)
            if best > -np.inf:
                assert bound >= best - 1e-9, f"seed {seed} {kind}"


def test_bound_equals_objective_at_fully_double_covered_leaf():
    inst = t1_instance(fleet=2, capacities=(2, 2), travel=((5.0, 5.0), (5.0, 5.0)))
    cov = _cov(inst)
    zeros = PenaltyMatrix.zeros(2, 2)
    dep = Deployment((0, 1))
    ev = evaluate_deployment(inst, cov, dep, zeros, ModelKind.DRP)
    assert ev.double_covered == inst.n
    assert node_bound(inst, zeros, dep.station_of, ModelKind.DRP) == pytest.approx(
        ev.objective, abs=1e-9
    )


def test_pruning_replay_identical_optima():
    for seed in range(20):
        instance, penalties = random_instance(seed)
        cov = _cov(instance)
        for kind in ModelKind:
            pruned = solve(instance, cov, penalties, kind)
            replay = solve(
                instance, cov, penalties, kind, SolverConfig(pruning=False)
            )
            assert pruned.status == replay.status
            if pruned.status is SolverStatus.OPTIMAL:
                assert pruned.objective == pytest.approx(
                    replay.objective, abs=1e-9
                )
                assert pruned.deployment.station_of == replay.deployment.station_of


def test_symmetry_breaking_never_changes_objective():
    for seed in range(20):
        instance, penalties = random_instance(seed)
        cov = _cov(instance)
        for kind in ModelKind:
            on = solve(instance, cov, penalties, kind)
            off = solve(
                instance, cov, penalties, kind, SolverConfig(symmetry_breaking=False)
            )
            assert on.status == off.status
            if on.status is SolverStatus.OPTIMAL:
                assert on.objective == pytest.approx(off.objective, abs=1e-9)
                assert on.deployment.station_of == off.deployment.station_of


def test_alpha_monotonicity():
    for seed in range(10):
        instance, penalties = random_instance(seed)
        cov = _cov(instance)
        for kind in ModelKind:
            previous = np.inf
            seen_infeasible = False
            for alpha in (0.0, 0.25, 0.5, 0.75, 0.9, 1.0):
                sol = solve(instance.with_alpha(alpha), cov, penalties, kind)
                if sol.status is SolverStatus.INFEASIBLE:
                    seen_infeasible = True
                else:
                    assert not seen_infeasible, "feasibility returned after vanishing"
                    assert sol.objective <= previous + 1e-9
                    previous = sol.objective


def test_demand_scaling_preserves_argmax():
    for seed in range(10):
        instance, _ = random_instance(seed)
        zeros = PenaltyMatrix.zeros(instance.m, instance.fleet_size)
        scaled_points = [
            type(p)(p.id, p.d1 * 7.3, p.d2 * 7.3, p.d * 7.3) for p in instance.points
        ]
        scaled = type(instance)(
            scaled_points,
            instance.stations,
            instance.ambulances,
            instance.travel_time,
            instance.station_distance,
            instance.r1,
            instance.r2,
            instance.alpha,
        )
        cov = _cov(instance)
        for kind in ModelKind:
            base = solve(instance, cov, zeros, kind)
            big = solve(scaled, cov, zeros, kind)
            assert base.status == big.status
            if base.status is SolverStatus.OPTIMAL:
                assert base.deployment.station_of == big.deployment.station_of
                assert big.objective == pytest.approx(
                    7.3 * base.objective, rel=1e-9
                )


def test_node_limit_reaches_limit_status():
    instance, penalties = random_instance(2, n_max=8, m_max=5, k_max=4)
    cov = _cov(instance)
    sol = solve(instance, cov, penalties, ModelKind.DRP, SolverConfig(node_limit=1))
    assert sol.status is SolverStatus.LIMIT_REACHED
    assert sol.nodes_explored <= 1
    full = solve(instance, cov, penalties, ModelKind.DRP)
    assert sol.best_bound >= (full.best_bound - 1e-9)


def test_brute_force_guard():
    instance, penalties = random_instance(0)
    cov = _cov(instance)
    import emsopt.solver as solver_mod

    original = solver_mod.BRUTE_FORCE_LIMIT
    solver_mod.BRUTE_FORCE_LIMIT = 1
    try:
        with pytest.raises(EnumerationLimitError):
            brute_force(instance, cov, penalties, ModelKind.RP)
    finally:
        solver_mod.BRUTE_FORCE_LIMIT = original


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(node_limit=0)
    with pytest.raises(ValueError):
        SolverConfig(time_limit=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(tie_break="random")


def test_determinism_same_inputs_same_solution():
    instance, penalties = random_instance(17)
    cov = _cov(instance)
    a = solve(instance, cov, penalties, ModelKind.DRP)
    b = solve(instance, cov, penalties, ModelKind.DRP)
    assert a.status == b.status
    assert a.nodes_explored == b.nodes_explored
    assert a.deployment.station_of == b.deployment.station_of
    assert a.objective == b.objective
