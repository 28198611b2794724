"""Parametric models of the robot plant.

Covers both sides of the energy budget: the mechanical side (motor power as
a function of drive speed) and the computational side (event-camera data
rate, per-application workload, CPU capacity and CPU power under DVFS).
All operations are pure functions of their arguments and safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class DvfsLevel:
    """One CPU operating level: clock frequency and its supply voltage."""

    frequency_hz: float
    voltage_v: float

    def __post_init__(self) -> None:
        if self.frequency_hz <= 0:
            raise ValueError(f"frequency must be positive, got {self.frequency_hz}")
        if self.voltage_v <= 0:
            raise ValueError(f"voltage must be positive, got {self.voltage_v}")


@dataclass(frozen=True)
class DvfsTable:
    """Ordered ladder of DVFS levels, ascending in frequency.

    Voltage must be non-decreasing with frequency: a higher clock never
    runs at a lower supply voltage.
    """

    levels: tuple[DvfsLevel, ...]

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("DVFS table must not be empty")
        object.__setattr__(self, "levels", tuple(self.levels))
        for lo, hi in zip(self.levels, self.levels[1:]):
            if hi.frequency_hz <= lo.frequency_hz:
                raise ValueError("DVFS frequencies must be strictly increasing")
            if hi.voltage_v < lo.voltage_v:
                raise ValueError("DVFS voltage must be non-decreasing in frequency")

    def __len__(self) -> int:
        return len(self.levels)

    def __getitem__(self, index: int) -> DvfsLevel:
        return self.levels[index]


@dataclass(frozen=True)
class SpeedLadder:
    """Selectable drive speeds in m/s, strictly increasing."""

    speeds_mps: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.speeds_mps:
            raise ValueError("speed ladder must not be empty")
        object.__setattr__(self, "speeds_mps", tuple(self.speeds_mps))
        if self.speeds_mps[0] <= 0:
            raise ValueError("speeds must be positive")
        for lo, hi in zip(self.speeds_mps, self.speeds_mps[1:]):
            if hi <= lo:
                raise ValueError("speeds must be strictly increasing")

    def __len__(self) -> int:
        return len(self.speeds_mps)

    def __getitem__(self, index: int) -> float:
        return self.speeds_mps[index]


@dataclass(frozen=True)
class MotorModelParams:
    """Drive power model: idle draw + rolling friction + aerodynamic drag.

    p_motor(v) = idle_w + linear_w_per_mps * v + cubic_w_per_mps3 * v**3
    """

    idle_w: float = 4.0
    linear_w_per_mps: float = 1.5
    cubic_w_per_mps3: float = 0.22

    def __post_init__(self) -> None:
        if min(self.idle_w, self.linear_w_per_mps, self.cubic_w_per_mps3) < 0:
            raise ValueError("motor model coefficients must be non-negative")
        if self.linear_w_per_mps == 0 and self.cubic_w_per_mps3 == 0:
            raise ValueError("motor model needs a speed-dependent term")


@dataclass(frozen=True)
class CpuModelParams:
    """CMOS-style CPU power split into leakage and switching terms.

    p_cpu = static_w_per_v * V + switching_j_per_v2_cycle * V**2 * f * activity
    where activity is the utilization clamped from below by the idle floor
    (an idle core still clocks caches, timers and the OS tick).
    """

    static_w_per_v: float = 2.0
    switching_j_per_v2_cycle: float = 5.0e-9
    idle_utilization_floor: float = 0.05
    effective_ipc: float = 4.0  # retired cycles per clock across the cluster

    def __post_init__(self) -> None:
        if self.static_w_per_v < 0 or self.switching_j_per_v2_cycle < 0:
            raise ValueError("CPU power coefficients must be non-negative")
        if not 0 <= self.idle_utilization_floor < 1:
            raise ValueError("idle utilization floor must be in [0, 1)")
        if self.effective_ipc <= 0:
            raise ValueError("effective IPC must be positive")


@dataclass(frozen=True)
class EventModelParams:
    """Event-camera output rate as a function of scene entropy and speed.

    rate = base_rate + gain * entropy * speed, saturated at the sensor cap.
    A still camera in a blank scene produces (almost) nothing; richer scenes
    swept faster produce proportionally more brightness-change events.
    """

    base_rate_ev_per_s: float = 0.0
    gain_ev_per_unit_mps: float = 3.0e5
    sensor_cap_ev_per_s: float = 1.0e7

    def __post_init__(self) -> None:
        if self.base_rate_ev_per_s < 0:
            raise ValueError("base event rate must be non-negative")
        if self.gain_ev_per_unit_mps <= 0:
            raise ValueError("event gain must be positive")
        if self.sensor_cap_ev_per_s <= 0:
            raise ValueError("sensor cap must be positive")


@dataclass(frozen=True)
class AppProfile:
    """A vision workload: per-event CPU cost and its throughput requirement."""

    name: str
    cycles_per_event: float
    required_throughput: float = 1.0

    def __post_init__(self) -> None:
        if self.cycles_per_event <= 0:
            raise ValueError("cycles per event must be positive")
        if not 0 < self.required_throughput <= 1:
            raise ValueError("required throughput must be in (0, 1]")


@dataclass(frozen=True)
class EnvironmentProfile:
    """Mission course as ordered (length_m, entropy) segments."""

    segments: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("environment needs at least one segment")
        object.__setattr__(
            self, "segments", tuple((float(l), float(e)) for l, e in self.segments)
        )
        for length, entropy in self.segments:
            if length <= 0:
                raise ValueError("segment length must be positive")
            if entropy < 0:
                raise ValueError("segment entropy must be non-negative")

    @property
    def total_length_m(self) -> float:
        return math.fsum(length for length, _ in self.segments)

    def entropy_at(self, position_m: float) -> float:
        """Entropy of the segment containing ``position_m``.

        Segment changes take effect exactly at the cumulative boundary;
        positions at or beyond the course end read the final segment.
        """
        boundary = 0.0
        for length, entropy in self.segments:
            boundary += length
            if position_m < boundary:
                return entropy
        return self.segments[-1][1]


@dataclass(frozen=True)
class PlantModels:
    """Everything needed to evaluate the plant at one operating point."""

    dvfs: DvfsTable = field(default_factory=lambda: default_dvfs_table())
    speeds: SpeedLadder = field(default_factory=lambda: default_speed_ladder())
    motor: MotorModelParams = field(default_factory=MotorModelParams)
    cpu: CpuModelParams = field(default_factory=CpuModelParams)
    events: EventModelParams = field(default_factory=EventModelParams)


def default_dvfs_table(
    n_levels: int = 12,
    min_hz: float = 3.0e8,
    max_hz: float = 2.0e9,
    min_v: float = 0.6,
    max_v: float = 1.1,
) -> DvfsTable:
    """Log-spaced frequency ladder with voltage affine in frequency."""
    if n_levels < 1:
        raise ValueError("need at least one DVFS level")
    if n_levels == 1:
        return DvfsTable((DvfsLevel(max_hz, max_v),))
    ratio = max_hz / min_hz
    levels = []
    for i in range(n_levels):
        f = min_hz * ratio ** (i / (n_levels - 1))
        v = min_v + (max_v - min_v) * (f - min_hz) / (max_hz - min_hz)
        levels.append(DvfsLevel(f, v))
    return DvfsTable(tuple(levels))


def default_speed_ladder(
    n_levels: int = 10, min_mps: float = 0.5, max_mps: float = 5.0
) -> SpeedLadder:
    """Linear speed ladder, 0.5 m/s steps by default."""
    if n_levels < 1:
        raise ValueError("need at least one speed level")
    if n_levels == 1:
        return SpeedLadder((max_mps,))
    step = (max_mps - min_mps) / (n_levels - 1)
    return SpeedLadder(tuple(min_mps + i * step for i in range(n_levels)))


def motor_power(speed_mps: float, params: MotorModelParams) -> float:
    """Motor electrical power in watts at a steady drive speed."""
    if speed_mps < 0:
        raise ValueError(f"speed must be non-negative, got {speed_mps}")
    return (
        params.idle_w
        + params.linear_w_per_mps * speed_mps
        + params.cubic_w_per_mps3 * speed_mps**3
    )


def event_rate(entropy: float, speed_mps: float, params: EventModelParams) -> float:
    """Event-camera output in events/s for a scene entropy and drive speed."""
    if entropy < 0:
        raise ValueError(f"entropy must be non-negative, got {entropy}")
    if speed_mps < 0:
        raise ValueError(f"speed must be non-negative, got {speed_mps}")
    rate = params.base_rate_ev_per_s + params.gain_ev_per_unit_mps * entropy * speed_mps
    return min(rate, params.sensor_cap_ev_per_s)


def workload(event_rate_ev_per_s: float, app: AppProfile) -> float:
    """CPU demand in cycles/s for an event stream processed by ``app``."""
    if event_rate_ev_per_s < 0:
        raise ValueError("event rate must be non-negative")
    return event_rate_ev_per_s * app.cycles_per_event


def cpu_capacity(level: DvfsLevel, effective_ipc: float) -> float:
    """Deliverable cycles/s at a DVFS level."""
    if effective_ipc <= 0:
        raise ValueError("effective IPC must be positive")
    return level.frequency_hz * effective_ipc


def throughput(workload_cps: float, capacity_cps: float) -> float:
    """Fraction of offered work actually processed, in [0, 1].

    1.0 means nothing is dropped; the value saturates there because the
    pipeline cannot process more events than the camera produces.
    """
    if capacity_cps <= 0:
        raise ValueError(f"capacity must be positive, got {capacity_cps}")
    if workload_cps < 0:
        raise ValueError(f"workload must be non-negative, got {workload_cps}")
    if workload_cps == 0:
        return 1.0
    return min(1.0, capacity_cps / workload_cps)


def cpu_power(level: DvfsLevel, utilization: float, params: CpuModelParams) -> float:
    """CPU power in watts at a DVFS level and utilization."""
    if not 0 <= utilization <= 1:
        raise ValueError(f"utilization must be in [0, 1], got {utilization}")
    activity = max(utilization, params.idle_utilization_floor)
    v = level.voltage_v
    static = params.static_w_per_v * v
    dynamic = params.switching_j_per_v2_cycle * v * v * level.frequency_hz * activity
    return static + dynamic


@dataclass(frozen=True)
class SteadyState:
    """Plant equilibrium at one (DVFS level, speed level, entropy) triple."""

    speed_mps: float
    event_rate_ev_per_s: float
    workload_cps: float
    capacity_cps: float
    throughput: float
    utilization: float
    p_motor_w: float
    p_cpu_w: float

    @property
    def p_total_w(self) -> float:
        return self.p_motor_w + self.p_cpu_w


def steady_state(
    models: PlantModels,
    app: AppProfile,
    entropy: float,
    dvfs_index: int,
    speed_index: int,
) -> SteadyState:
    """Evaluate the full plant at a grid point under constant entropy."""
    if not 0 <= dvfs_index < len(models.dvfs):
        raise ValueError(f"DVFS index {dvfs_index} out of range")
    if not 0 <= speed_index < len(models.speeds):
        raise ValueError(f"speed index {speed_index} out of range")
    level = models.dvfs[dvfs_index]
    speed = models.speeds[speed_index]
    rate = event_rate(entropy, speed, models.events)
    demand = workload(rate, app)
    capacity = cpu_capacity(level, models.cpu.effective_ipc)
    achieved = throughput(demand, capacity)
    utilization = min(1.0, demand / capacity)
    return SteadyState(
        speed_mps=speed,
        event_rate_ev_per_s=rate,
        workload_cps=demand,
        capacity_cps=capacity,
        throughput=achieved,
        utilization=utilization,
        p_motor_w=motor_power(speed, models.motor),
        p_cpu_w=cpu_power(level, utilization, models.cpu),
    )


def throughput_error(achieved: float, app: AppProfile) -> float:
    """Shortfall of achieved throughput below the app requirement (>= 0)."""
    return max(0.0, app.required_throughput - achieved)
