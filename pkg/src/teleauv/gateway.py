"""Process entry point: headless benchmark runs, log analysis, live service.

    teleauv run --scenario pool_4gate --seed 7 --reps 5 --out results/
    teleauv analyze results/
    teleauv serve --scenario pool_4gate --bind 127.0.0.1:8765 --time-scale 4

`run` executes the scripted pilot against the configured channel and writes
one directory per repetition (states.csv, events.csv, transmissions.csv,
summary.json) plus an aggregate table shaped like the benchmark's per-test
results. `analyze` recomputes every statistic from the CSV files alone and
checks them against the stored summaries. `serve` runs the simulation in
real time (optionally scaled) behind a websocket for the operator console.
"""

import argparse
import json
import statistics
import sys
from dataclasses import asdict
from pathlib import Path
from types import SimpleNamespace

from . import mission
from .pilot import PilotConfig
from .runner import SimDriver
from .scenario import ScenarioError, load_scenario, resolve_scenario


def run_headless(scenario_path, seed: int | None, out_dir, repetitions: int,
                 quiet: bool = False) -> dict:
    """Run the scripted pilot `repetitions` times; returns the aggregate."""
    scenario = load_scenario(scenario_path)
    out = Path(out_dir)
    runs = []
    for rep in range(repetitions):
        driver = SimDriver(scenario, master_seed=seed, rep=rep,
                           pilot_mode=SimDriver.PILOT_SCRIPTED)
        driver.run()
        run_dir = out / f"run_{rep:03d}"
        driver.write_logs(run_dir)
        runs.append(driver.summary())
        if not quiet:
            print(_run_line(rep, runs[-1]))

    aggregate = _aggregate(scenario.name, runs)
    if repetitions > 0:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "aggregate.json", "w") as f:
            json.dump(aggregate, f, indent=2)
            f.write("\n")
        if not quiet:
            print(_aggregate_lines(aggregate))
    return aggregate


def analyze(log_dir, quiet: bool = False) -> list[dict]:
    """Recompute per-run statistics from the CSV logs and verify the summaries.

    Returns one record per run with the recomputed mission result and comm
    stats plus a `matches_summary` flag. Unreadable runs are reported and
    skipped; an empty directory yields an empty table.
    """
    root = Path(log_dir)
    run_dirs = sorted(p for p in root.glob("**/") if (p / "events.csv").exists())
    reports = []
    for run_dir in run_dirs:
        try:
            reports.append(_analyze_run(run_dir))
        except Exception as e:  # noqa: BLE001 - per-file diagnostics, keep going
            print(f"{run_dir}: unreadable ({e})", file=sys.stderr)
    if not quiet:
        for i, rep in enumerate(reports):
            print(_run_line(i, rep))
        if not reports:
            print("no runs found")
    return reports


def _analyze_run(run_dir: Path) -> dict:
    log = mission.read_log(run_dir)
    with open(run_dir / "summary.json") as f:
        stored = json.load(f)

    echo = stored["scenario"]
    gates = [SimpleNamespace(id=g["id"], order=g["order"]) for g in echo["gates"]]
    scenario_view = SimpleNamespace(gates=gates, time_limit=echo["time_limit"])
    result = mission.score(log, scenario_view)
    comm = mission.comm_stats(log)

    recomputed = {"mission": asdict(result), "comm": asdict(comm)}
    matches = (recomputed["mission"] == stored["mission"]
               and recomputed["comm"] == stored["comm"])
    return {
        "run": str(run_dir),
        "scenario": echo,
        "mission": recomputed["mission"],
        "comm": recomputed["comm"],
        "matches_summary": matches,
    }


def _run_line(idx: int, summary: dict) -> str:
    m = summary["mission"]
    c = summary["comm"]
    time_s = f"{m['total_time']:7.1f}" if m["total_time"] is not None else "    ---"
    attempts = " ".join(str(a) for a in m["attempts"])
    return (f"run {idx:3d}  time[s] {time_s}  attempts [{attempts}]  "
            f"loss {c['loss_pct']:5.1f}%  variations {c['command_variations']:4d}  "
            f"delay {c['delay_mean']:.2f}s var {c['delay_var']:.3f}s^2")


def _aggregate(name: str, runs: list[dict]) -> dict:
    completed = [r for r in runs if r["mission"]["completed"]]
    times = [r["mission"]["total_time"] for r in completed]
    return {
        "scenario": name,
        "runs": runs,
        "n_runs": len(runs),
        "n_completed": len(completed),
        "median_time": statistics.median(times) if times else None,
    }


def _aggregate_lines(agg: dict) -> str:
    med = f"{agg['median_time']:.1f} s" if agg["median_time"] is not None else "n/a"
    return (f"completed {agg['n_completed']}/{agg['n_runs']} runs, "
            f"median mission time {med}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="teleauv",
                                     description="Acoustic teleoperation test-bed")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="headless benchmark runs with the scripted pilot")
    p_run.add_argument("--scenario", required=True, help="scenario file or bundled name")
    p_run.add_argument("--seed", type=int, default=None, help="master seed (default: scenario seeds)")
    p_run.add_argument("--reps", type=int, default=1, help="repetitions; 0 validates only")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--pilot", choices=["scripted"], default="scripted",
                       help="headless runs always use the scripted pilot")

    p_serve = sub.add_parser("serve", help="live simulation behind a websocket")
    p_serve.add_argument("--scenario", required=True)
    p_serve.add_argument("--seed", type=int, default=None)
    p_serve.add_argument("--bind", default="127.0.0.1:8765", help="host:port to listen on")
    p_serve.add_argument("--time-scale", type=float, default=1.0,
                         help="wall-clock compression factor (1 = real time)")
    p_serve.add_argument("--pilot", choices=["external", "scripted"], default="external",
                         help="command source: connected console or onboard script")
    p_serve.add_argument("--out", default=None, help="write run logs here when the mission ends")

    p_an = sub.add_parser("analyze", help="recompute statistics from run logs")
    p_an.add_argument("log_dir")

    args = parser.parse_args(argv)

    try:
        if args.command == "run":
            path = resolve_scenario(args.scenario)
            if args.reps == 0:
                load_scenario(path)  # validation only
                print(f"{path}: valid scenario")
                return 0
            if args.reps < 0:
                parser.error("--reps must be >= 0")
            run_headless(path, args.seed, args.out, args.reps)
            return 0

        if args.command == "serve":
            from .server import serve  # deferred: pulls in websockets

            path = resolve_scenario(args.scenario)
            host, _, port = args.bind.rpartition(":")
            serve(load_scenario(path), host=host or "127.0.0.1", port=int(port),
                  time_scale=args.time_scale, pilot_mode=args.pilot,
                  master_seed=args.seed, out_dir=args.out)
            return 0

        if args.command == "analyze":
            analyze(args.log_dir)
            return 0
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
