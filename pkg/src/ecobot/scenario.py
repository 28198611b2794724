"""Scenario files: a single TOML document describing one experiment setup.

A scenario carries every calibration constant with units spelled out in
the key names, plus the app profiles, the entropy-segmented environments,
controller tuning and the run selection. Unknown keys are rejected so a
typo cannot silently fall back to a default.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .controller import (
    BaselineKind,
    ControllerParams,
    Neighborhood,
    OperatingPoint,
    baseline_config,
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
)
from .sim import CONTROLLED, Mode, SimConfig, fixed

FORMAT_TAG = "ecobot-scenario-v1"


class ScenarioError(ValueError):
    """Malformed scenario file; message carries the offending key or line."""


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario: models, tuning, profiles, and the run selection."""

    models: PlantModels
    controller: ControllerParams
    dt_s: float
    max_ticks: int | None
    apps: tuple[AppProfile, ...]
    environments: tuple[tuple[str, EnvironmentProfile], ...]
    run_mode: str
    run_app: str
    run_environment: str

    def app(self, name: str) -> AppProfile:
        for app in self.apps:
            if app.name == name:
                return app
        raise ScenarioError(f"unknown app {name!r}")

    def environment(self, name: str) -> EnvironmentProfile:
        for env_name, env in self.environments:
            if env_name == name:
                return env
        raise ScenarioError(f"unknown environment {name!r}")

    def mode(self, label: str | None = None) -> Mode:
        label = label if label is not None else self.run_mode
        if label == "controlled":
            return CONTROLLED
        for kind in BaselineKind:
            if label == kind.value:
                return fixed(
                    baseline_config(kind, self.models.dvfs, self.models.speeds)
                )
        if label.startswith("fixed:"):
            try:
                i_str, j_str = label[len("fixed:") :].split(",")
                point = OperatingPoint(int(i_str), int(j_str))
            except ValueError as exc:
                raise ScenarioError(f"bad fixed mode {label!r}: {exc}") from exc
            try:
                point.validate(self.models.dvfs, self.models.speeds)
            except ValueError as exc:
                raise ScenarioError(str(exc)) from exc
            return fixed(point)
        raise ScenarioError(f"unknown mode {label!r}")

    def sim_config(
        self,
        mode: str | None = None,
        app: str | None = None,
        environment: str | None = None,
        dt_s: float | None = None,
    ) -> SimConfig:
        """Build a mission config from the run selection, with overrides."""
        try:
            return SimConfig(
                dt_s=dt_s if dt_s is not None else self.dt_s,
                environment=self.environment(environment or self.run_environment),
                app=self.app(app or self.run_app),
                models=self.models,
                controller=self.controller,
                mode=self.mode(mode),
                max_ticks=self.max_ticks,
            )
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc


def _require(table: dict, key: str, context: str):
    if key not in table:
        raise ScenarioError(f"[{context}] missing key {key!r}")
    return table[key]


def _no_extras(table: dict, allowed: set[str], context: str) -> None:
    extras = sorted(set(table) - allowed)
    if extras:
        raise ScenarioError(f"[{context}] unknown key {extras[0]!r}")


def _number(value, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"[{context}] expected a number, got {value!r}")
    return float(value)


def _number_list(value, context: str) -> list[float]:
    if not isinstance(value, list):
        raise ScenarioError(f"[{context}] expected a list of numbers")
    return [_number(v, context) for v in value]


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document."""
    try:
        doc = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ScenarioError(f"TOML syntax error: {exc}") from exc

    _no_extras(
        doc,
        {
            "format",
            "dvfs",
            "speeds",
            "motor",
            "cpu",
            "events",
            "controller",
            "sim",
            "apps",
            "environments",
            "run",
        },
        "top level",
    )
    fmt = _require(doc, "format", "top level")
    if fmt != FORMAT_TAG:
        raise ScenarioError(f"unsupported format {fmt!r}, expected {FORMAT_TAG!r}")

    try:
        dvfs_tab = _require(doc, "dvfs", "top level")
        _no_extras(dvfs_tab, {"frequencies_hz", "voltages_v"}, "dvfs")
        freqs = _number_list(_require(dvfs_tab, "frequencies_hz", "dvfs"), "dvfs")
        volts = _number_list(_require(dvfs_tab, "voltages_v", "dvfs"), "dvfs")
        if len(freqs) != len(volts):
            raise ScenarioError("[dvfs] frequencies_hz and voltages_v differ in length")
        dvfs = DvfsTable(tuple(DvfsLevel(f, v) for f, v in zip(freqs, volts)))

        speeds_tab = _require(doc, "speeds", "top level")
        _no_extras(speeds_tab, {"ladder_mps"}, "speeds")
        speeds = SpeedLadder(
            tuple(_number_list(_require(speeds_tab, "ladder_mps", "speeds"), "speeds"))
        )

        motor_tab = _require(doc, "motor", "top level")
        _no_extras(motor_tab, {"idle_w", "linear_w_per_mps", "cubic_w_per_mps3"}, "motor")
        motor = MotorModelParams(
            idle_w=_number(_require(motor_tab, "idle_w", "motor"), "motor"),
            linear_w_per_mps=_number(
                _require(motor_tab, "linear_w_per_mps", "motor"), "motor"
            ),
            cubic_w_per_mps3=_number(
                _require(motor_tab, "cubic_w_per_mps3", "motor"), "motor"
            ),
        )

        cpu_tab = _require(doc, "cpu", "top level")
        _no_extras(
            cpu_tab,
            {
                "static_w_per_v",
                "switching_j_per_v2_cycle",
                "idle_utilization_floor",
                "effective_ipc",
            },
            "cpu",
        )
        cpu = CpuModelParams(
            static_w_per_v=_number(_require(cpu_tab, "static_w_per_v", "cpu"), "cpu"),
            switching_j_per_v2_cycle=_number(
                _require(cpu_tab, "switching_j_per_v2_cycle", "cpu"), "cpu"
            ),
            idle_utilization_floor=_number(
                _require(cpu_tab, "idle_utilization_floor", "cpu"), "cpu"
            ),
            effective_ipc=_number(_require(cpu_tab, "effective_ipc", "cpu"), "cpu"),
        )

        events_tab = _require(doc, "events", "top level")
        _no_extras(
            events_tab,
            {"base_rate_ev_per_s", "gain_ev_per_unit_mps", "sensor_cap_ev_per_s"},
            "events",
        )
        events = EventModelParams(
            base_rate_ev_per_s=_number(
                _require(events_tab, "base_rate_ev_per_s", "events"), "events"
            ),
            gain_ev_per_unit_mps=_number(
                _require(events_tab, "gain_ev_per_unit_mps", "events"), "events"
            ),
            sensor_cap_ev_per_s=_number(
                _require(events_tab, "sensor_cap_ev_per_s", "events"), "events"
            ),
        )

        ctrl_tab = _require(doc, "controller", "top level")
        _no_extras(
            ctrl_tab,
            {
                "entropy_threshold",
                "energy_threshold_rel",
                "energy_threshold_jpm",
                "settle_time_s",
                "neighborhood",
            },
            "controller",
        )
        if "energy_threshold_rel" in ctrl_tab and "energy_threshold_jpm" in ctrl_tab:
            raise ScenarioError(
                "[controller] energy_threshold_rel and energy_threshold_jpm"
                " are mutually exclusive"
            )
        nb_raw = ctrl_tab.get("neighborhood", Neighborhood.MOORE_8.value)
        try:
            nb = Neighborhood(nb_raw)
        except ValueError:
            raise ScenarioError(f"[controller] unknown neighborhood {nb_raw!r}") from None
        controller = ControllerParams(
            entropy_threshold=_number(
                _require(ctrl_tab, "entropy_threshold", "controller"), "controller"
            ),
            energy_threshold_rel=_number(
                ctrl_tab.get("energy_threshold_rel", -0.001), "controller"
            ),
            energy_threshold_jpm=(
                _number(ctrl_tab["energy_threshold_jpm"], "controller")
                if "energy_threshold_jpm" in ctrl_tab
                else None
            ),
            settle_time_s=_number(
                _require(ctrl_tab, "settle_time_s", "controller"), "controller"
            ),
            neighborhood=nb,
        )

        sim_tab = _require(doc, "sim", "top level")
        _no_extras(sim_tab, {"dt_s", "max_ticks"}, "sim")
        dt_s = _number(_require(sim_tab, "dt_s", "sim"), "sim")
        max_ticks = None
        if "max_ticks" in sim_tab:
            raw = sim_tab["max_ticks"]
            if isinstance(raw, bool) or not isinstance(raw, int) or raw <= 0:
                raise ScenarioError("[sim] max_ticks must be a positive integer")
            max_ticks = raw

        apps_raw = _require(doc, "apps", "top level")
        if not isinstance(apps_raw, list) or not apps_raw:
            raise ScenarioError("[apps] at least one [[apps]] entry required")
        apps = []
        for idx, app_tab in enumerate(apps_raw):
            ctx = f"apps[{idx}]"
            _no_extras(
                app_tab, {"name", "cycles_per_event", "required_throughput"}, ctx
            )
            name = _require(app_tab, "name", ctx)
            if not isinstance(name, str):
                raise ScenarioError(f"[{ctx}] name must be a string")
            apps.append(
                AppProfile(
                    name=name,
                    cycles_per_event=_number(
                        _require(app_tab, "cycles_per_event", ctx), ctx
                    ),
                    required_throughput=_number(
                        app_tab.get("required_throughput", 1.0), ctx
                    ),
                )
            )
        if len({a.name for a in apps}) != len(apps):
            raise ScenarioError("[apps] duplicate app names")

        envs_raw = _require(doc, "environments", "top level")
        if not isinstance(envs_raw, list) or not envs_raw:
            raise ScenarioError("[environments] at least one entry required")
        environments = []
        for idx, env_tab in enumerate(envs_raw):
            ctx = f"environments[{idx}]"
            _no_extras(
                env_tab, {"name", "segment_lengths_m", "segment_entropies"}, ctx
            )
            name = _require(env_tab, "name", ctx)
            if not isinstance(name, str):
                raise ScenarioError(f"[{ctx}] name must be a string")
            lengths = _number_list(_require(env_tab, "segment_lengths_m", ctx), ctx)
            entropies = _number_list(_require(env_tab, "segment_entropies", ctx), ctx)
            if len(lengths) != len(entropies):
                raise ScenarioError(
                    f"[{ctx}] segment_lengths_m and segment_entropies differ in length"
                )
            environments.append(
                (name, EnvironmentProfile(tuple(zip(lengths, entropies))))
            )
        if len({n for n, _ in environments}) != len(environments):
            raise ScenarioError("[environments] duplicate environment names")

        run_tab = _require(doc, "run", "top level")
        _no_extras(run_tab, {"mode", "app", "environment"}, "run")
        run_mode = _require(run_tab, "mode", "run")
        run_app = _require(run_tab, "app", "run")
        run_env = _require(run_tab, "environment", "run")

        scenario = Scenario(
            models=PlantModels(
                dvfs=dvfs, speeds=speeds, motor=motor, cpu=cpu, events=events
            ),
            controller=controller,
            dt_s=dt_s,
            max_ticks=max_ticks,
            apps=tuple(apps),
            environments=tuple(environments),
            run_mode=run_mode,
            run_app=run_app,
            run_environment=run_env,
        )
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc

    # referenced names and the mode must resolve
    scenario.app(run_app)
    scenario.environment(run_env)
    scenario.mode(run_mode)
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def _fmt(value: float) -> str:
    """TOML float/int literal that round-trips the exact value."""
    if isinstance(value, int):
        return str(value)
    text = repr(float(value))
    return text


def _fmt_list(values) -> str:
    return "[" + ", ".join(_fmt(v) for v in values) + "]"


def serialize_scenario(sc: Scenario) -> str:
    """Render a scenario back to TOML; reparsing yields an equal Scenario."""
    m = sc.models
    lines = [
        f'format = "{FORMAT_TAG}"',
        "",
        "[dvfs]",
        f"frequencies_hz = {_fmt_list(l.frequency_hz for l in m.dvfs.levels)}",
        f"voltages_v = {_fmt_list(l.voltage_v for l in m.dvfs.levels)}",
        "",
        "[speeds]",
        f"ladder_mps = {_fmt_list(m.speeds.speeds_mps)}",
        "",
        "[motor]",
        f"idle_w = {_fmt(m.motor.idle_w)}",
        f"linear_w_per_mps = {_fmt(m.motor.linear_w_per_mps)}",
        f"cubic_w_per_mps3 = {_fmt(m.motor.cubic_w_per_mps3)}",
        "",
        "[cpu]",
        f"static_w_per_v = {_fmt(m.cpu.static_w_per_v)}",
        f"switching_j_per_v2_cycle = {_fmt(m.cpu.switching_j_per_v2_cycle)}",
        f"idle_utilization_floor = {_fmt(m.cpu.idle_utilization_floor)}",
        f"effective_ipc = {_fmt(m.cpu.effective_ipc)}",
        "",
        "[events]",
        f"base_rate_ev_per_s = {_fmt(m.events.base_rate_ev_per_s)}",
        f"gain_ev_per_unit_mps = {_fmt(m.events.gain_ev_per_unit_mps)}",
        f"sensor_cap_ev_per_s = {_fmt(m.events.sensor_cap_ev_per_s)}",
        "",
        "[controller]",
        f"entropy_threshold = {_fmt(sc.controller.entropy_threshold)}",
    ]
    if sc.controller.energy_threshold_jpm is not None:
        lines.append(
            f"energy_threshold_jpm = {_fmt(sc.controller.energy_threshold_jpm)}"
        )
    else:
        lines.append(
            f"energy_threshold_rel = {_fmt(sc.controller.energy_threshold_rel)}"
        )
    lines += [
        f"settle_time_s = {_fmt(sc.controller.settle_time_s)}",
        f'neighborhood = "{sc.controller.neighborhood.value}"',
        "",
        "[sim]",
        f"dt_s = {_fmt(sc.dt_s)}",
    ]
    if sc.max_ticks is not None:
        lines.append(f"max_ticks = {sc.max_ticks}")
    for app in sc.apps:
        lines += [
            "",
            "[[apps]]",
            f'name = "{app.name}"',
            f"cycles_per_event = {_fmt(app.cycles_per_event)}",
            f"required_throughput = {_fmt(app.required_throughput)}",
        ]
    for name, env in sc.environments:
        lines += [
            "",
            "[[environments]]",
            f'name = "{name}"',
            f"segment_lengths_m = {_fmt_list(l for l, _ in env.segments)}",
            f"segment_entropies = {_fmt_list(e for _, e in env.segments)}",
        ]
    lines += [
        "",
        "[run]",
        f'mode = "{sc.run_mode}"',
        f'app = "{sc.run_app}"',
        f'environment = "{sc.run_environment}"',
        "",
    ]
    return "\n".join(lines)


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package (e.g. ``"default"``)."""
    candidate = resources.files("ecobot").joinpath("scenarios", f"{name}.toml")
    with resources.as_file(candidate) as path:
        if not path.exists():
            raise ScenarioError(f"no bundled scenario named {name!r}")
        return path
