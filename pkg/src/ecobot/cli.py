"""Command-line front end: sweep, run, compare, frontier.

Exit codes: 0 success, 2 configuration error, 3 runtime error (a timed-out
mission still flushes its partial trace).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import csvio
from .heatmap import render_heatmap
from .scenario import Scenario, ScenarioError, load_scenario
from .sim import (
    FrontierPoint,
    SimulationTimeout,
    compare,
    frontier,
    run_mission,
    sweep,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _load(path: str) -> Scenario:
    try:
        return load_scenario(path)
    except FileNotFoundError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc


def _out_dir(arg: str) -> Path:
    out = Path(arg)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _sweep_inputs(sc: Scenario, args) -> tuple[float, float]:
    """Sweep entropy (override or first segment) and trip distance."""
    env = sc.environment(args.environment or sc.run_environment)
    entropy = args.entropy if args.entropy is not None else env.segments[0][1]
    if entropy < 0:
        raise ScenarioError("entropy override must be non-negative")
    return entropy, env.total_length_m


def cmd_sweep(args) -> int:
    sc = _load(args.scenario)
    app = sc.app(args.app or sc.run_app)
    entropy, distance = _sweep_inputs(sc, args)
    grid = sweep(entropy, distance, sc.models, app)
    out = _out_dir(args.out)
    csvio.write(out / "sweep.csv", csvio.sweep_csv(grid, sc.models))
    title = f"{app.name}, entropy {entropy:g}: throughput and trip energy (J)"
    csvio.write(out / "sweep.svg", render_heatmap(grid, sc.models, title))
    return EXIT_OK


def cmd_run(args) -> int:
    sc = _load(args.scenario)
    cfg = sc.sim_config(
        mode=args.mode,
        app=args.app,
        environment=args.environment,
        dt_s=args.dt,
    )
    out = _out_dir(args.out)
    try:
        result = run_mission(cfg)
    except SimulationTimeout as exc:
        csvio.write(out / "trace.csv", csvio.trace_csv(exc.trace))
        csvio.write(out / "decisions.csv", csvio.decisions_csv(exc.decisions))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    csvio.write(out / "trace.csv", csvio.trace_csv(result.trace))
    csvio.write(out / "decisions.csv", csvio.decisions_csv(result.decisions))
    csvio.write(out / "report.txt", csvio.report_text(result.report, result.degraded))
    return EXIT_OK


def cmd_compare(args) -> int:
    sc = _load(args.scenario)
    rows = []
    for app in sc.apps:
        for env_name, _ in sc.environments:
            base = sc.sim_config(
                mode="controlled", app=app.name, environment=env_name, dt_s=args.dt
            )
            try:
                for summary in compare(base):
                    rows.append((app.name, env_name, summary))
            except SimulationTimeout as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_RUNTIME
    out = _out_dir(args.out)
    csvio.write(out / "compare.csv", csvio.compare_csv(rows))
    return EXIT_OK


def cmd_frontier(args) -> int:
    out = _out_dir(args.out)
    if args.grid is not None:
        text = Path(args.grid).read_text(encoding="utf-8")
        entropy, distance, rows = csvio.read_sweep_csv(text)
        by_speed: dict[int, csvio.SweepRow] = {}
        for row in rows:
            if row.energy_j is None:
                continue
            seen = by_speed.get(row.speed_index)
            if seen is None or row.dvfs_index < seen.dvfs_index:
                by_speed[row.speed_index] = row
        points = [
            FrontierPoint(
                speed_index=j,
                speed_mps=by_speed[j].speed_mps,
                dvfs_index=by_speed[j].dvfs_index,
                frequency_hz=by_speed[j].frequency_hz,
                j_per_m=by_speed[j].energy_j / distance,
            )
            for j in sorted(by_speed)
        ]
    else:
        sc = _load(args.scenario)
        app = sc.app(args.app or sc.run_app)
        entropy, distance = _sweep_inputs(sc, args)
        grid = sweep(entropy, distance, sc.models, app)
        points = frontier(grid, sc.models)
    if not points:
        print("warning: no feasible configuration at any speed", file=sys.stderr)
    csvio.write(out / "frontier.csv", csvio.frontier_csv(points, entropy, distance))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecobot",
        description="Energy-optimal joint control of robot speed and CPU frequency",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario_required=True):
        p.add_argument(
            "--scenario", required=scenario_required, help="scenario TOML path"
        )
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="reserved (runs are deterministic)")

    p = sub.add_parser("sweep", help="grid sweep CSV + heatmap SVG")
    common(p)
    p.add_argument("--entropy", type=float, default=None, help="override sweep entropy")
    p.add_argument("--app", default=None, help="app profile name override")
    p.add_argument("--environment", default=None, help="environment name override")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("run", help="one mission: trace, decisions, report")
    common(p)
    p.add_argument(
        "--mode",
        default=None,
        help="controlled | hs | as | as-star | fixed:I,J (default from scenario)",
    )
    p.add_argument("--app", default=None, help="app profile name override")
    p.add_argument("--environment", default=None, help="environment name override")
    p.add_argument("--dt", type=float, default=None, help="tick length override, seconds")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="all apps x environments x modes table")
    common(p)
    p.add_argument("--dt", type=float, default=None, help="tick length override, seconds")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("frontier", help="cheapest feasible level per speed")
    common(p, scenario_required=False)
    p.add_argument("--grid", default=None, help="re-ingest a sweep CSV instead")
    p.add_argument("--entropy", type=float, default=None, help="override sweep entropy")
    p.add_argument("--app", default=None, help="app profile name override")
    p.add_argument("--environment", default=None, help="environment name override")
    p.set_defaults(func=cmd_frontier)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "frontier" and (args.scenario is None) == (args.grid is None):
        print("error: frontier needs exactly one of --scenario / --grid", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
