"""Joint motor-speed / CPU-DVFS energy optimization for mobile robots."""

from .controller import (
    BaselineKind,
    ClimbResult,
    ControllerParams,
    ControllerState,
    DecisionEvent,
    Measurements,
    Neighborhood,
    OperatingPoint,
    PerformanceManager,
    baseline_config,
    climb,
    initialize,
    neighbors,
)
from .energy import (
    EnergyReport,
    TraceSample,
    integrate_energy,
    locomotion_cost,
    steady_state_mission_energy,
)
from .plant import (
    AppProfile,
    CpuModelParams,
    DvfsLevel,
    DvfsTable,
    EnvironmentProfile,
    EventModelParams,
    MotorModelParams,
    PlantModels,
    SpeedLadder,
    cpu_capacity,
    cpu_power,
    default_dvfs_table,
    default_speed_ladder,
    event_rate,
    motor_power,
    steady_state,
    throughput,
    throughput_error,
    workload,
)
from .scenario import (
    Scenario,
    ScenarioError,
    bundled_scenario_path,
    load_scenario,
    parse_scenario,
    serialize_scenario,
)
from .sim import (
    CONTROLLED,
    MissionResult,
    Mode,
    ModeSummary,
    SimConfig,
    SimulationTimeout,
    SweepGrid,
    compare,
    feasible_argmin,
    fixed,
    frontier,
    run_mission,
    sweep,
)

__version__ = "0.1.0"
