"""Controller tests: initialization, neighbors, the climb, and the tick loop."""

from __future__ import annotations

import math

import pytest

from conftest import structured_draws
from ecobot import (
    AppProfile,
    BaselineKind,
    ControllerParams,
    DvfsLevel,
    DvfsTable,
    Measurements,
    Neighborhood,
    OperatingPoint,
    PerformanceManager,
    PlantModels,
    SpeedLadder,
    baseline_config,
    climb,
    default_dvfs_table,
    default_speed_ladder,
    initialize,
    neighbors,
    steady_state,
    throughput_error,
)

DVFS = default_dvfs_table()
SPEEDS = default_speed_ladder()
PARAMS = ControllerParams()


class TestInitialize:
    def test_conservative_corner(self):
        assert initialize(DVFS, SPEEDS) == OperatingPoint(11, 0)

    def test_degenerate_grid(self):
        one_dvfs = DvfsTable((DvfsLevel(1e9, 1.0),))
        one_speed = SpeedLadder((1.0,))
        assert initialize(one_dvfs, one_speed) == OperatingPoint(0, 0)

    @pytest.mark.parametrize("entropy", [1.2, 4.0, 6.0])
    @pytest.mark.parametrize("cpe", [300.0, 800.0, 1600.0])
    def test_corner_is_feasible_in_default_scenarios(self, entropy, cpe):
        models = PlantModels()
        app = AppProfile("a", cpe)
        point = initialize(models.dvfs, models.speeds)
        ss = steady_state(models, app, entropy, point.dvfs_index, point.speed_index)
        assert throughput_error(ss.throughput, app) == 0


class TestNeighbors:
    def test_interior_moore_count(self):
        got = neighbors(OperatingPoint(5, 5), DVFS, SPEEDS, Neighborhood.MOORE_8)
        assert len(got) == 8

    def test_corner_von_neumann_count(self):
        got = neighbors(OperatingPoint(0, 0), DVFS, SPEEDS, Neighborhood.VON_NEUMANN_4)
        assert got == [OperatingPoint(0, 1), OperatingPoint(1, 0)]

    def test_enumeration_order_is_sorted(self):
        got = neighbors(OperatingPoint(5, 5), DVFS, SPEEDS, Neighborhood.MOORE_8)
        assert got == sorted(got)

    @pytest.mark.parametrize("nb", list(Neighborhood))
    def test_all_grid_points_bounds_and_distance(self, nb):
        # oracle: brute-force bound/distance check over the whole grid
        for i in range(len(DVFS)):
            for j in range(len(SPEEDS)):
                got = neighbors(OperatingPoint(i, j), DVFS, SPEEDS, nb)
                assert len(set(got)) == len(got)
                for p in got:
                    assert 0 <= p.dvfs_index < len(DVFS)
                    assert 0 <= p.speed_index < len(SPEEDS)
                    di = abs(p.dvfs_index - i)
                    dj = abs(p.speed_index - j)
                    assert (p.dvfs_index, p.speed_index) != (i, j)
                    if nb is Neighborhood.MOORE_8:
                        assert max(di, dj) == 1
                    else:
                        assert di + dj == 1


class TestClimb:
    def test_already_optimal_returns_start_after_one_sweep(self):
        start = OperatingPoint(5, 5)

        def ev(p):
            return (
                abs(p.dvfs_index - 5) + abs(p.speed_index - 5) + 1.0,
                True,
            )

        res = climb(start, ev, DVFS, SPEEDS, PARAMS)
        assert res.point == start
        assert res.moves == 0
        assert res.evaluations == 9  # start plus its 8 neighbors

    def test_monotone_corridor_reaches_far_end(self):
        # 1-D corridor: only speed index 0 is feasible; cost falls with dvfs
        def ev(p):
            return (float(p.dvfs_index), p.speed_index == 0)

        res = climb(OperatingPoint(11, 0), ev, DVFS, SPEEDS, PARAMS)
        assert res.point == OperatingPoint(0, 0)
        assert res.feasible

    def test_infeasible_start_with_no_feasible_neighbor_flags(self):
        def ev(p):
            return (1.0, False)

        res = climb(OperatingPoint(5, 5), ev, DVFS, SPEEDS, PARAMS)
        assert res.point == OperatingPoint(5, 5)
        assert not res.feasible
        assert math.isinf(res.cost_jpm)

    def test_two_hundred_structured_draws_match_brute_force(self):
        # oracle: exhaustive feasible argmin of the sweep grid
        for draw in structured_draws(200, seed=97):
            res = climb(
                initialize(draw.models.dvfs, draw.models.speeds),
                draw.evaluate,
                draw.models.dvfs,
                draw.models.speeds,
                PARAMS,
            )
            assert res.feasible
            assert (
                res.point == draw.argmin_point
                or abs(res.cost_jpm - draw.argmin_cost) <= 1e-9 * draw.argmin_cost
            )

    def test_evaluation_budget(self):
        grid_size = len(DVFS) * len(SPEEDS)
        for draw in structured_draws(20, seed=5):
            res = climb(
                initialize(draw.models.dvfs, draw.models.speeds),
                draw.evaluate,
                draw.models.dvfs,
                draw.models.speeds,
                PARAMS,
            )
            assert res.evaluations <= 8 * grid_size

    def test_acceptance_rule_thresholds(self):
        strict = ControllerParams(energy_threshold_rel=0.0)
        assert strict.accepts(9.99, 10.0)
        assert not strict.accepts(10.0, 10.0)
        hysteresis = ControllerParams(energy_threshold_rel=-0.01)
        assert not hysteresis.accepts(9.95, 10.0)  # only 0.5% better
        assert hysteresis.accepts(9.85, 10.0)
        absolute = ControllerParams(energy_threshold_jpm=-0.5)
        assert not absolute.accepts(9.6, 10.0)
        assert absolute.accepts(9.4, 10.0)
        # an unknown best (infinite) accepts any feasible candidate
        assert hysteresis.accepts(1e9, math.inf)


class TestBaselines:
    def test_hs(self):
        assert baseline_config(BaselineKind.HS, DVFS, SPEEDS) == OperatingPoint(11, 9)

    def test_as(self):
        assert baseline_config(BaselineKind.AS, DVFS, SPEEDS) == OperatingPoint(11, 5)

    def test_as_star(self):
        assert baseline_config(BaselineKind.AS_STAR, DVFS, SPEEDS) == OperatingPoint(6, 5)


def drive_to_convergence(manager, models, app, entropy, dt=0.001, max_ticks=500_000):
    """Feed steady-state measurements until the controller reports done."""
    from ecobot.controller import Phase

    applied = manager.actuation
    for tick in range(max_ticks):
        ss = steady_state(models, app, entropy, applied.dvfs_index, applied.speed_index)
        m = Measurements(
            p_cpu_w=ss.p_cpu_w,
            p_motor_w=ss.p_motor_w,
            throughput_error=throughput_error(ss.throughput, app),
            entropy=entropy,
        )
        applied = manager.on_tick(m, tick * dt)
        if manager.state.phase is Phase.DONE:
            return tick
    raise AssertionError("controller did not converge")


class TestOnTick:
    def setup_method(self):
        self.models = PlantModels()
        self.app = AppProfile("corner_filtered", 800.0)

    def manager(self, **kwargs):
        params = ControllerParams(**kwargs)
        return PerformanceManager(params, self.models.dvfs, self.models.speeds)

    def test_entropy_below_threshold_never_triggers(self):
        mgr = self.manager(entropy_threshold=0.5)
        start = mgr.actuation
        for tick in range(2000):
            m = Measurements(2.0, 5.0, 0.0, 0.3)  # below the 0.5 threshold
            assert mgr.on_tick(m, tick * 0.001) == start
        assert mgr.log == []

    def test_zero_entropy_environment_stays_at_initialization(self):
        mgr = self.manager()
        start = mgr.actuation
        for tick in range(2000):
            applied = mgr.on_tick(Measurements(2.0, 5.0, 0.0, 0.0), tick * 0.001)
        assert applied == start
        assert mgr.log == []

    def test_step_change_converges_to_sweep_optimum(self):
        from ecobot import feasible_argmin, sweep

        mgr = self.manager()
        drive_to_convergence(mgr, self.models, self.app, 4.0)
        optimum, _ = feasible_argmin(sweep(4.0, 100.0, self.models, self.app))
        assert mgr.state.current == optimum
        assert mgr.actuation == optimum
        assert not mgr.state.degraded

    def test_negative_measurement_rejected(self):
        with pytest.raises(ValueError):
            Measurements(p_cpu_w=-1.0, p_motor_w=5.0, throughput_error=0.0, entropy=1.0)

    def test_accepted_moves_are_feasible(self):
        mgr = self.manager()
        drive_to_convergence(mgr, self.models, self.app, 6.0)
        for event in mgr.log:
            if event.event == "move":
                assert event.feasible

    def test_retrigger_after_done(self):
        mgr = self.manager()
        drive_to_convergence(mgr, self.models, self.app, 4.0)
        triggers = [e for e in mgr.log if e.event == "trigger"]
        assert len(triggers) == 1
        drive_to_convergence(mgr, self.models, self.app, 6.0)
        triggers = [e for e in mgr.log if e.event == "trigger"]
        assert len(triggers) == 2

    def test_degraded_mode_when_nothing_is_feasible(self):
        # workload beyond the whole grid even at the sensor cap
        heavy = AppProfile("heavy", 2500.0)
        mgr = self.manager()
        drive_to_convergence(mgr, self.models, heavy, 500.0)
        assert mgr.state.degraded
        assert mgr.actuation == initialize(self.models.dvfs, self.models.speeds)
        assert any(e.event == "degraded" for e in mgr.log)

    def test_determinism(self):
        logs = []
        for _ in range(2):
            mgr = self.manager()
            drive_to_convergence(mgr, self.models, self.app, 4.0)
            logs.append(
                [(e.time_s, e.event, e.from_point, e.to_point, e.cost_jpm) for e in mgr.log]
            )
        assert logs[0] == logs[1]

    def test_hysteresis_moves_clear_the_margin(self):
        # with a negative threshold each accepted move improves by > |e_th|
        rel = -0.01
        mgr = self.manager(energy_threshold_rel=rel)
        drive_to_convergence(mgr, self.models, self.app, 4.0)
        costs = [e.cost_jpm for e in mgr.log if e.event in ("trigger", "move")]
        assert len(costs) >= 2
        for before, after in zip(costs, costs[1:]):
            assert before - after > abs(rel) * before
