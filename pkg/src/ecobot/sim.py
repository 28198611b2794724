"""Deterministic fixed-step closed-loop simulation, sweeps, and comparisons.

One mission steps the plant at a fixed dt over an entropy-segmented course.
In controlled mode the performance manager runs every tick and its output
takes effect on the next tick; in fixed mode the operating point never
changes. Sweeps evaluate every grid cell in steady state and feed the
frontier extraction and the baseline comparison table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .controller import (
    BaselineKind,
    ControllerParams,
    DecisionEvent,
    Measurements,
    OperatingPoint,
    PerformanceManager,
    baseline_config,
)
from .energy import EnergyReport, TraceSample, integrate_energy
from .plant import (
    AppProfile,
    EnvironmentProfile,
    PlantModels,
    SteadyState,
    steady_state,
    throughput_error,
)

# Float guard for accumulated position: one part in 1e12 of the course
# length, far above round-off but far below one tick of travel.
_END_SLACK_REL = 1e-12


@dataclass(frozen=True)
class Mode:
    """Mission mode: closed-loop control or a pinned operating point."""

    fixed_point: OperatingPoint | None = None

    @property
    def is_controlled(self) -> bool:
        return self.fixed_point is None


CONTROLLED = Mode()


def fixed(point: OperatingPoint) -> Mode:
    return Mode(fixed_point=point)


@dataclass(frozen=True)
class SimConfig:
    """Everything one mission needs; immutable for reproducibility."""

    dt_s: float = 0.001
    environment: EnvironmentProfile = EnvironmentProfile(((100.0, 4.0),))
    app: AppProfile = AppProfile("corner_filtered", 800.0)
    models: PlantModels = field(default_factory=PlantModels)
    controller: ControllerParams = field(default_factory=ControllerParams)
    mode: Mode = CONTROLLED
    max_ticks: int | None = None

    def __post_init__(self) -> None:
        if self.dt_s <= 0:
            raise ValueError("dt must be positive")
        if self.dt_s > self.controller.settle_time_s / 5:
            raise ValueError("dt must be at most settle_time / 5")
        if self.mode.fixed_point is not None:
            self.mode.fixed_point.validate(self.models.dvfs, self.models.speeds)

    def tick_limit(self) -> int:
        if self.max_ticks is not None:
            return self.max_ticks
        slowest = self.models.speeds[0]
        crossing = self.environment.total_length_m / (slowest * self.dt_s)
        # Controlled missions spend extra ticks settling candidates.
        return int(4 * crossing) + 1_000_000


class SimulationTimeout(RuntimeError):
    """Mission exceeded its tick budget; carries the partial trace."""

    def __init__(self, trace: list[TraceSample], decisions: list[DecisionEvent]):
        super().__init__(f"mission did not finish within {len(trace)} ticks")
        self.trace = trace
        self.decisions = decisions


@dataclass(frozen=True)
class MissionResult:
    trace: list[TraceSample]
    report: EnergyReport
    decisions: list[DecisionEvent]
    degraded: bool


def run_mission(cfg: SimConfig) -> MissionResult:
    """Step the plant over the course; returns trace, report, decisions."""
    models = cfg.models
    app = cfg.app
    total = cfg.environment.total_length_m
    end_at = total - total * _END_SLACK_REL
    manager: PerformanceManager | None = None
    if cfg.mode.is_controlled:
        manager = PerformanceManager(cfg.controller, models.dvfs, models.speeds)
        applied = manager.actuation
    else:
        applied = cfg.mode.fixed_point
        assert applied is not None

    trace: list[TraceSample] = []
    decisions: list[DecisionEvent] = []
    position = 0.0
    limit = cfg.tick_limit()
    # steady-state cache: the plant only changes when actuation or segment does
    cache_key: tuple[OperatingPoint, float] | None = None
    ss: SteadyState | None = None

    tick = 0
    while True:
        clock = tick * cfg.dt_s
        entropy = cfg.environment.entropy_at(position)
        if cache_key != (applied, entropy):
            ss = steady_state(models, app, entropy, applied.dvfs_index, applied.speed_index)
            cache_key = (applied, entropy)
        assert ss is not None
        trace.append(
            TraceSample(
                time_s=clock,
                position_m=position,
                speed_mps=ss.speed_mps,
                dvfs_index=applied.dvfs_index,
                p_motor_w=ss.p_motor_w,
                p_cpu_w=ss.p_cpu_w,
                throughput=ss.throughput,
                entropy=entropy,
                event_rate_ev_per_s=ss.event_rate_ev_per_s,
            )
        )
        if position >= end_at:
            break
        if tick >= limit:
            sim_decisions = manager.log if manager else []
            raise SimulationTimeout(trace, sim_decisions)
        if manager is not None:
            m = Measurements(
                p_cpu_w=ss.p_cpu_w,
                p_motor_w=ss.p_motor_w,
                throughput_error=throughput_error(ss.throughput, app),
                entropy=entropy,
            )
            applied = manager.on_tick(m, clock)
        position += ss.speed_mps * cfg.dt_s
        tick += 1

    if manager is not None:
        decisions = manager.log
    report = integrate_energy(trace)
    return MissionResult(
        trace=trace,
        report=report,
        decisions=decisions,
        degraded=manager.state.degraded if manager else False,
    )


@dataclass(frozen=True)
class SweepCell:
    dvfs_index: int
    speed_index: int
    throughput: float
    feasible: bool
    energy_j: float | None  # trip energy, present only when feasible


@dataclass(frozen=True)
class SweepGrid:
    """Steady-state evaluation of every (DVFS, speed) cell at one entropy."""

    entropy: float
    distance_m: float
    n_dvfs: int
    n_speeds: int
    cells: tuple[SweepCell, ...]  # row-major: dvfs_index ascending, then speed

    def cell(self, dvfs_index: int, speed_index: int) -> SweepCell:
        return self.cells[dvfs_index * self.n_speeds + speed_index]

    def feasible_set(self) -> set[tuple[int, int]]:
        return {(c.dvfs_index, c.speed_index) for c in self.cells if c.feasible}


def sweep(
    entropy: float,
    distance_m: float,
    models: PlantModels,
    app: AppProfile,
) -> SweepGrid:
    """Evaluate all grid cells in steady state; energy only where feasible."""
    if entropy < 0:
        raise ValueError("entropy must be non-negative")
    if distance_m <= 0:
        raise ValueError("distance must be positive")
    cells = []
    for i in range(len(models.dvfs)):
        for j in range(len(models.speeds)):
            ss = steady_state(models, app, entropy, i, j)
            feasible = throughput_error(ss.throughput, app) == 0
            energy = ss.p_total_w * (distance_m / ss.speed_mps) if feasible else None
            cells.append(
                SweepCell(
                    dvfs_index=i,
                    speed_index=j,
                    throughput=ss.throughput,
                    feasible=feasible,
                    energy_j=energy,
                )
            )
    return SweepGrid(
        entropy=entropy,
        distance_m=distance_m,
        n_dvfs=len(models.dvfs),
        n_speeds=len(models.speeds),
        cells=tuple(cells),
    )


@dataclass(frozen=True)
class FrontierPoint:
    speed_index: int
    speed_mps: float
    dvfs_index: int  # lowest feasible level at this speed
    frequency_hz: float
    j_per_m: float


def frontier(grid: SweepGrid, models: PlantModels) -> list[FrontierPoint]:
    """Cheapest feasible DVFS level per speed; speeds with none are omitted."""
    by_speed: dict[int, SweepCell] = {}
    for cell in grid.cells:
        if not cell.feasible:
            continue
        best = by_speed.get(cell.speed_index)
        if best is None or cell.dvfs_index < best.dvfs_index:
            by_speed[cell.speed_index] = cell
    out = []
    for j in sorted(by_speed):
        cell = by_speed[j]
        assert cell.energy_j is not None
        out.append(
            FrontierPoint(
                speed_index=j,
                speed_mps=models.speeds[j],
                dvfs_index=cell.dvfs_index,
                frequency_hz=models.dvfs[cell.dvfs_index].frequency_hz,
                j_per_m=cell.energy_j / grid.distance_m,
            )
        )
    return out


def feasible_argmin(grid: SweepGrid) -> tuple[OperatingPoint, float] | None:
    """Cheapest feasible cell of a sweep as (point, J/m), or None."""
    best: SweepCell | None = None
    for cell in grid.cells:
        if cell.feasible and (best is None or cell.energy_j < best.energy_j):
            best = cell
    if best is None:
        return None
    assert best.energy_j is not None
    return (
        OperatingPoint(best.dvfs_index, best.speed_index),
        best.energy_j / grid.distance_m,
    )


MODE_LABELS = ("controlled", "hs", "as", "as-star")


@dataclass(frozen=True)
class ModeSummary:
    """One comparison row: a mission under one control policy."""

    mode: str
    operating_point: OperatingPoint | None  # None for controlled mode
    j_per_m: float
    e_total_j: float
    e_motor_j: float
    e_cpu_j: float
    duration_s: float
    mean_throughput: float
    min_throughput: float
    # Requirement met at every steady tick: the whole run for fixed modes,
    # after the final convergence for the controlled mode.
    feasible: bool
    controlled_savings: float  # 1 - J/m(controlled) / J/m(this mode)


def compare(base: SimConfig) -> list[ModeSummary]:
    """Run the controlled policy and the three fixed references.

    All runs share the environment, app and models of ``base``; only the
    mode differs. Savings are of the controlled run against each row.
    """
    runs: dict[str, tuple[OperatingPoint | None, MissionResult]] = {}
    ctrl_cfg = SimConfig(
        dt_s=base.dt_s,
        environment=base.environment,
        app=base.app,
        models=base.models,
        controller=base.controller,
        mode=CONTROLLED,
        max_ticks=base.max_ticks,
    )
    runs["controlled"] = (None, run_mission(ctrl_cfg))
    for kind in BaselineKind:
        point = baseline_config(kind, base.models.dvfs, base.models.speeds)
        cfg = SimConfig(
            dt_s=base.dt_s,
            environment=base.environment,
            app=base.app,
            models=base.models,
            controller=base.controller,
            mode=fixed(point),
            max_ticks=base.max_ticks,
        )
        runs[kind.value] = (point, run_mission(cfg))

    j_ctrl = runs["controlled"][1].report.j_per_m
    rows = []
    for label in MODE_LABELS:
        point, result = runs[label]
        rep = result.report
        mean_thr = math.fsum(s.throughput for s in result.trace) / len(result.trace)
        rows.append(
            ModeSummary(
                mode=label,
                operating_point=point,
                j_per_m=rep.j_per_m,
                e_total_j=rep.e_total_j,
                e_motor_j=rep.e_motor_j,
                e_cpu_j=rep.e_cpu_j,
                duration_s=rep.duration_s,
                mean_throughput=mean_thr,
                min_throughput=rep.min_throughput,
                feasible=steady_min_throughput(result) >= base.app.required_throughput,
                controlled_savings=1.0 - j_ctrl / rep.j_per_m,
            )
        )
    return rows


def steady_min_throughput(result: MissionResult) -> float:
    """Minimum throughput over the steady part of a run.

    For fixed-point runs this is the whole trace. For controlled runs it
    starts one tick after the final convergence, skipping the exploration
    transients the climb deliberately incurs; a run that never converged
    (degraded, or still climbing at course end) is scored on the whole
    trace.
    """
    converged_at = None
    for event in result.decisions:
        if event.event == "converged":
            converged_at = event.time_s
    if converged_at is None:
        return min(s.throughput for s in result.trace)
    dt = result.trace[1].time_s - result.trace[0].time_s
    steady = [s.throughput for s in result.trace if s.time_s > converged_at + dt]
    if not steady:
        return min(s.throughput for s in result.trace)
    return min(steady)
