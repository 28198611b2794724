"""Energy accounting: trace integration and the J/m locomotion-cost metric.

Total drained energy is the time integral of motor plus CPU power over the
mission. Traces are integrated with the trapezoidal rule, which is exact
for the piecewise-linear power profiles the simulator emits; fixed
configurations additionally have a closed form with no discretization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .controller import OperatingPoint
from .plant import AppProfile, PlantModels, steady_state


@dataclass(frozen=True)
class TraceSample:
    """Plant snapshot at one simulation tick."""

    time_s: float
    position_m: float
    speed_mps: float
    dvfs_index: int
    p_motor_w: float
    p_cpu_w: float
    throughput: float
    entropy: float
    event_rate_ev_per_s: float


@dataclass(frozen=True)
class EnergyReport:
    """Per-mission energy totals, split by subsystem."""

    e_total_j: float
    e_motor_j: float
    e_cpu_j: float
    duration_s: float
    distance_m: float
    j_per_m: float
    min_throughput: float


def integrate_energy(trace: Sequence[TraceSample]) -> EnergyReport:
    """Trapezoidal integration of a mission trace, split by subsystem.

    Requires at least two samples with strictly increasing timestamps.
    ``e_total`` is computed as ``e_motor + e_cpu`` so the split is exact.
    """
    if len(trace) < 2:
        raise ValueError("trace needs at least two samples to integrate")
    e_motor = 0.0
    e_cpu = 0.0
    min_throughput = trace[0].throughput
    for a, b in zip(trace, trace[1:]):
        dt = b.time_s - a.time_s
        if dt <= 0:
            raise ValueError("trace timestamps must be strictly increasing")
        e_motor += 0.5 * (a.p_motor_w + b.p_motor_w) * dt
        e_cpu += 0.5 * (a.p_cpu_w + b.p_cpu_w) * dt
        if b.throughput < min_throughput:
            min_throughput = b.throughput
    duration = trace[-1].time_s - trace[0].time_s
    distance = trace[-1].position_m - trace[0].position_m
    if distance <= 0:
        raise ValueError("trace covers no distance")
    e_total = e_motor + e_cpu
    return EnergyReport(
        e_total_j=e_total,
        e_motor_j=e_motor,
        e_cpu_j=e_cpu,
        duration_s=duration,
        distance_m=distance,
        j_per_m=e_total / distance,
        min_throughput=min_throughput,
    )


def locomotion_cost(p_total_w: float, speed_mps: float) -> float:
    """Instantaneous energy per meter (J/m) at a steady power and speed."""
    if speed_mps <= 0:
        raise ValueError("locomotion cost is undefined at zero speed")
    return p_total_w / speed_mps


def steady_state_mission_energy(
    op_point: OperatingPoint,
    segment: tuple[float, float],
    models: PlantModels,
    app: AppProfile,
) -> EnergyReport:
    """Closed-form energy for one constant-entropy segment at a fixed point.

    At a fixed configuration the plant is in equilibrium, so the integral
    collapses to power times transit time; no discretization error.
    """
    length_m, entropy = segment
    if length_m <= 0:
        raise ValueError("segment length must be positive")
    op_point.validate(models.dvfs, models.speeds)
    ss = steady_state(models, app, entropy, op_point.dvfs_index, op_point.speed_index)
    duration = length_m / ss.speed_mps
    e_motor = ss.p_motor_w * duration
    e_cpu = ss.p_cpu_w * duration
    e_total = e_motor + e_cpu
    return EnergyReport(
        e_total_j=e_total,
        e_motor_j=e_motor,
        e_cpu_j=e_cpu,
        duration_s=duration,
        distance_m=length_m,
        j_per_m=e_total / length_m,
        min_throughput=ss.throughput,
    )
