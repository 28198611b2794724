"""Shared fixtures: bundled scenarios and the randomized-draw generator."""

from __future__ import annotations

import random
from dataclasses import dataclass

import pytest

from ecobot import (
    AppProfile,
    CpuModelParams,
    EventModelParams,
    MotorModelParams,
    PlantModels,
    Scenario,
    bundled_scenario_path,
    feasible_argmin,
    frontier,
    load_scenario,
    steady_state,
    sweep,
    throughput_error,
)

APPS = ("reconstruction", "corner_filtered", "corner")
ENVS = ("low", "medium", "high")


@pytest.fixture(scope="session")
def default_scenario() -> Scenario:
    return load_scenario(bundled_scenario_path("default"))


@pytest.fixture(scope="session")
def mixed_scenario() -> Scenario:
    return load_scenario(bundled_scenario_path("mixed"))


@dataclass(frozen=True)
class Draw:
    """One randomized problem instance with its brute-force optimum."""

    models: PlantModels
    app: AppProfile
    entropy: float
    argmin_point: object
    argmin_cost: float

    def evaluate(self, point):
        ss = steady_state(
            self.models, self.app, self.entropy, point.dvfs_index, point.speed_index
        )
        cost = (ss.p_motor_w + ss.p_cpu_w) / ss.speed_mps
        return cost, throughput_error(ss.throughput, self.app) == 0


def _draw_models(rng: random.Random):
    motor = MotorModelParams(
        idle_w=rng.uniform(2.0, 6.0),
        linear_w_per_mps=rng.uniform(0.5, 3.0),
        cubic_w_per_mps3=rng.uniform(0.08, 0.5),
    )
    cpu = CpuModelParams(
        static_w_per_v=rng.uniform(1.0, 4.0),
        switching_j_per_v2_cycle=rng.uniform(2e-9, 8e-9),
        idle_utilization_floor=rng.uniform(0.0, 0.1),
        effective_ipc=4.0,
    )
    events = EventModelParams(
        base_rate_ev_per_s=rng.uniform(0.0, 2e4),
        gain_ev_per_unit_mps=rng.uniform(1e5, 4e5),
    )
    app = AppProfile("draw", cycles_per_event=rng.uniform(200.0, 2400.0))
    entropy = rng.uniform(0.8, 7.0)
    return PlantModels(motor=motor, cpu=cpu, events=events), app, entropy


def has_search_structure(grid, models) -> bool:
    """The problem shape the climb is built for.

    Feasibility is staircase-closed by construction of the plant models; on
    top of that the energy frontier must exist, have a single strictly
    interior minimum, cover a contiguous speed range, and move by at most
    one DVFS level between adjacent speeds so it is connected under the
    climb's one-step moves.
    """
    front = frontier(grid, models)
    if len(front) < 3:
        return False
    costs = [p.j_per_m for p in front]
    diffs = [b - a for a, b in zip(costs, costs[1:])]
    if any(d == 0 for d in diffs):
        return False
    signs = [d > 0 for d in diffs]
    flips = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    if signs[0] or not signs[-1] or flips != 1:
        return False
    speeds = [p.speed_index for p in front]
    if speeds != list(range(speeds[0], speeds[0] + len(speeds))):
        return False
    return all(b.dvfs_index - a.dvfs_index <= 1 for a, b in zip(front, front[1:]))


def structured_draws(n: int, seed: int = 20260810, distance_m: float = 100.0):
    """Yield ``n`` random instances that preserve the search structure."""
    rng = random.Random(seed)
    produced = 0
    attempts = 0
    while produced < n:
        attempts += 1
        if attempts > 100 * n:
            raise RuntimeError("draw generator acceptance rate collapsed")
        models, app, entropy = _draw_models(rng)
        grid = sweep(entropy, distance_m, models, app)
        optimum = feasible_argmin(grid)
        if optimum is None or not has_search_structure(grid, models):
            continue
        produced += 1
        yield Draw(
            models=models,
            app=app,
            entropy=entropy,
            argmin_point=optimum[0],
            argmin_cost=optimum[1],
        )
