"""Run-time performance manager for the joint (DVFS level, drive speed) knob.

The manager watches scene entropy and, whenever it shifts by more than a
threshold, runs a best-improvement hill climb over the configuration grid:
each neighbor of the current operating point is applied to the plant, the
loop waits a settling delay, reads back motor/CPU power and throughput
error, and keeps the candidate only if it cuts energy-per-meter beyond the
acceptance threshold while losing no data. The climb stops when a full
neighbor sweep yields no accepted move.

Also provides the three fixed reference policies used for comparison runs.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field

from .plant import DvfsTable, SpeedLadder

INFEASIBLE_COST = math.inf


class Neighborhood(enum.Enum):
    """Grid adjacency used by the climb."""

    VON_NEUMANN_4 = "vonneumann4"  # axis-aligned moves only
    MOORE_8 = "moore8"  # diagonal moves allowed


class BaselineKind(enum.Enum):
    """Fixed reference policies."""

    HS = "hs"  # highest speed, highest frequency
    AS = "as"  # medium speed, highest frequency
    AS_STAR = "as-star"  # medium speed, medium frequency


@dataclass(frozen=True, order=True)
class OperatingPoint:
    """Joint actuation: index into the DVFS table and the speed ladder."""

    dvfs_index: int
    speed_index: int

    def validate(self, dvfs: DvfsTable, speeds: SpeedLadder) -> None:
        if not 0 <= self.dvfs_index < len(dvfs):
            raise ValueError(f"DVFS index {self.dvfs_index} out of range")
        if not 0 <= self.speed_index < len(speeds):
            raise ValueError(f"speed index {self.speed_index} out of range")


@dataclass(frozen=True)
class ControllerParams:
    """Tuning constants for the performance manager.

    The energy acceptance threshold is signed and compared as
    ``cost_new - cost_best < threshold``: a negative value demands a
    minimum improvement (hysteresis against measurement jitter), zero
    accepts any strict improvement. It can be given in absolute J/m or as
    a fraction of the current best cost; the absolute form wins when both
    are set. The default is zero: with noise-free feedback, hysteresis
    only makes the climb stop short of the optimum.
    """

    entropy_threshold: float = 0.5
    energy_threshold_rel: float = 0.0
    energy_threshold_jpm: float | None = None
    settle_time_s: float = 0.05
    neighborhood: Neighborhood = Neighborhood.MOORE_8

    def __post_init__(self) -> None:
        if self.entropy_threshold < 0:
            raise ValueError("entropy threshold must be non-negative")
        if self.settle_time_s <= 0:
            raise ValueError("settle time must be positive")

    def accepts(self, cost_new: float, cost_best: float) -> bool:
        """Acceptance test for a feasible candidate against the running best."""
        if math.isinf(cost_best):
            return True
        if self.energy_threshold_jpm is not None:
            threshold = self.energy_threshold_jpm
        else:
            threshold = self.energy_threshold_rel * abs(cost_best)
        return cost_new - cost_best < threshold

    def tolerance_jpm(self, cost: float) -> float:
        """Magnitude of the acceptance threshold at a given cost level."""
        if self.energy_threshold_jpm is not None:
            return abs(self.energy_threshold_jpm)
        return abs(self.energy_threshold_rel * cost)


@dataclass(frozen=True)
class Measurements:
    """One feedback sample: subsystem powers, throughput error, entropy."""

    p_cpu_w: float
    p_motor_w: float
    throughput_error: float
    entropy: float

    def __post_init__(self) -> None:
        for name in ("p_cpu_w", "p_motor_w", "throughput_error", "entropy"):
            if getattr(self, name) < 0:
                raise ValueError(f"measurement {name} must be non-negative")


class Phase(enum.Enum):
    IDLE = "idle"
    CLIMBING = "climbing"
    DONE = "done"


@dataclass
class DecisionEvent:
    """One controller decision, as logged to the mission trace."""

    time_s: float
    event: str  # trigger | evaluate | move | restart | converged | degraded
    from_point: OperatingPoint
    to_point: OperatingPoint
    cost_jpm: float
    feasible: bool


@dataclass
class ControllerState:
    """Mutable climb state; owned by a single control loop."""

    current: OperatingPoint
    best_cost: float = INFEASIBLE_COST
    tracked_entropy: float = 0.0
    phase: Phase = Phase.IDLE
    degraded: bool = False
    # climbing sub-state
    pending: deque[OperatingPoint] = field(default_factory=deque)
    candidate: OperatingPoint | None = None
    measure_at: float = 0.0
    sweep_best: OperatingPoint | None = None
    restarted: bool = False
    evaluations: int = 0


def initialize(dvfs: DvfsTable, speeds: SpeedLadder) -> OperatingPoint:
    """Most conservative corner: full frequency, slowest speed.

    Safe under any workload the grid can serve at all, at the cost of the
    worst idle energy; the first climb pays it back.
    """
    return OperatingPoint(dvfs_index=len(dvfs) - 1, speed_index=0)


def neighbors(
    point: OperatingPoint,
    dvfs: DvfsTable,
    speeds: SpeedLadder,
    neighborhood: Neighborhood,
) -> list[OperatingPoint]:
    """In-bounds grid neighbors of ``point``, ascending (dvfs, speed) order."""
    point.validate(dvfs, speeds)
    out = []
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            if neighborhood is Neighborhood.VON_NEUMANN_4 and di != 0 and dj != 0:
                continue
            i = point.dvfs_index + di
            j = point.speed_index + dj
            if 0 <= i < len(dvfs) and 0 <= j < len(speeds):
                out.append(OperatingPoint(i, j))
    out.sort()
    return out


def baseline_config(
    kind: BaselineKind, dvfs: DvfsTable, speeds: SpeedLadder
) -> OperatingPoint:
    """Fixed reference configurations; 'medium' is the floor(n/2) index."""
    top = len(dvfs) - 1
    fastest = len(speeds) - 1
    mid_dvfs = len(dvfs) // 2
    mid_speed = len(speeds) // 2
    if kind is BaselineKind.HS:
        return OperatingPoint(top, fastest)
    if kind is BaselineKind.AS:
        return OperatingPoint(top, mid_speed)
    return OperatingPoint(mid_dvfs, mid_speed)


@dataclass(frozen=True)
class ClimbResult:
    point: OperatingPoint
    cost_jpm: float
    feasible: bool
    evaluations: int
    moves: int


def climb(
    start: OperatingPoint,
    evaluate,
    dvfs: DvfsTable,
    speeds: SpeedLadder,
    params: ControllerParams,
) -> ClimbResult:
    """Best-improvement local search from ``start`` under a frozen scene.

    ``evaluate(point) -> (cost_jpm, feasible)`` must be deterministic for
    the duration of the climb. Returns a point none of whose neighbors is
    both feasible and better by more than the acceptance threshold. If the
    start is infeasible and no sweep ever finds a feasible point, the start
    is returned with ``feasible=False``.
    """
    start.validate(dvfs, speeds)
    current = start
    cost, feasible = evaluate(current)
    best = cost if feasible else INFEASIBLE_COST
    evaluations = 1
    moves = 0
    while True:
        sweep_best = None
        for cand in neighbors(current, dvfs, speeds, params.neighborhood):
            cand_cost, cand_ok = evaluate(cand)
            evaluations += 1
            if cand_ok and params.accepts(cand_cost, best):
                sweep_best = cand
                best = cand_cost
        if sweep_best is None:
            break
        current = sweep_best
        moves += 1
    return ClimbResult(
        point=current,
        cost_jpm=best,
        feasible=not math.isinf(best),
        evaluations=evaluations,
        moves=moves,
    )


class PerformanceManager:
    """Tick-driven controller wrapping the climb as a resumable state machine.

    Call :meth:`on_tick` once per simulation step with fresh measurements;
    the returned operating point is the actuation to hold next. Decisions
    are appended to :attr:`log`.
    """

    def __init__(
        self,
        params: ControllerParams,
        dvfs: DvfsTable,
        speeds: SpeedLadder,
    ) -> None:
        self.params = params
        self.dvfs = dvfs
        self.speeds = speeds
        self.state = ControllerState(current=initialize(dvfs, speeds))
        self.log: list[DecisionEvent] = []
        self._applied = self.state.current

    @property
    def actuation(self) -> OperatingPoint:
        return self._applied

    def _cost_of(self, m: Measurements, point: OperatingPoint) -> float:
        return (m.p_cpu_w + m.p_motor_w) / self.speeds[point.speed_index]

    def _log(
        self,
        time_s: float,
        event: str,
        from_point: OperatingPoint,
        to_point: OperatingPoint,
        cost: float,
        feasible: bool,
    ) -> None:
        self.log.append(
            DecisionEvent(time_s, event, from_point, to_point, cost, feasible)
        )

    def _apply(self, point: OperatingPoint, clock: float) -> None:
        self._applied = point
        self.state.candidate = point
        self.state.measure_at = clock + self.params.settle_time_s

    def _start_sweep(self, clock: float, prepend_current: bool = False) -> None:
        st = self.state
        st.pending = deque(
            neighbors(st.current, self.dvfs, self.speeds, self.params.neighborhood)
        )
        if prepend_current:
            st.pending.appendleft(st.current)
        st.sweep_best = None
        if not st.pending:  # degenerate 1x1 grid
            self._finish_climb(clock)
            return
        self._apply(st.pending.popleft(), clock)

    def _begin_climb(self, m: Measurements, clock: float) -> None:
        st = self.state
        st.phase = Phase.CLIMBING
        st.degraded = False
        st.restarted = False
        st.evaluations = 1
        cost = self._cost_of(m, st.current)
        feasible = m.throughput_error == 0
        st.best_cost = cost if feasible else INFEASIBLE_COST
        self._log(clock, "trigger", st.current, st.current, cost, feasible)
        self._start_sweep(clock)

    def _finish_climb(self, clock: float) -> None:
        st = self.state
        self._apply(st.current, clock)
        st.phase = Phase.DONE
        st.candidate = None
        if math.isinf(st.best_cost):
            st.degraded = True
            self._log(clock, "degraded", st.current, st.current, st.best_cost, False)
        else:
            self._log(clock, "converged", st.current, st.current, st.best_cost, True)

    def _climb_tick(self, m: Measurements, clock: float) -> None:
        st = self.state
        if clock < st.measure_at - 1e-9:  # tolerate float drift in k*dt sums
            return
        cand = st.candidate
        assert cand is not None
        cost = self._cost_of(m, cand)
        feasible = m.throughput_error == 0
        st.evaluations += 1
        self._log(clock, "evaluate", st.current, cand, cost, feasible)
        if feasible and self.params.accepts(cost, st.best_cost):
            st.sweep_best = cand
            st.best_cost = cost
        if st.pending:
            self._apply(st.pending.popleft(), clock)
            return
        # sweep complete
        if st.sweep_best is not None and st.sweep_best != st.current:
            self._log(clock, "move", st.current, st.sweep_best, st.best_cost, True)
            st.current = st.sweep_best
            self._start_sweep(clock)
            return
        if math.isinf(st.best_cost) and not st.restarted:
            # Nothing feasible in reach of the stale operating point; fall
            # back to the conservative corner and climb from there.
            st.restarted = True
            corner = initialize(self.dvfs, self.speeds)
            if corner != st.current:
                self._log(clock, "restart", st.current, corner, st.best_cost, False)
                st.current = corner
                self._start_sweep(clock, prepend_current=True)
                return
        self._finish_climb(clock)

    def on_tick(self, m: Measurements, clock: float) -> OperatingPoint:
        """Advance the controller one step; returns the actuation to hold."""
        st = self.state
        if st.phase in (Phase.IDLE, Phase.DONE):
            delta = abs(st.tracked_entropy - m.entropy)
            if delta > self.params.entropy_threshold:
                st.tracked_entropy = m.entropy
                self._begin_climb(m, clock)
        else:
            self._climb_tick(m, clock)
        return self._applied
