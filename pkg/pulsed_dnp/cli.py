###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Command-line program
"""

import argparse
from concurrent.futures import ProcessPoolExecutor, as_completed
import json
import logging
from pathlib import Path
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

# third-party
import numpy as np
import pandas as pd

# package
from pulsed_dnp.amplitudes import AmplitudeError, TransitionAmplitudeSet, amplitude_spectrum, locate_extremum
from pulsed_dnp.clusters import ClusterError
from pulsed_dnp.config import (
    ConfigError,
    ExperimentConfig,
    PRESET_ALIASES,
    build_clusters,
    build_sequence,
    build_systems,
    list_presets,
    load_config,
    load_preset,
)
from pulsed_dnp.const import ExitCode, RunMode
from pulsed_dnp.engine import EngineError, NumericalHealthError, run
from pulsed_dnp.model import ModelError, tilt_angle
from pulsed_dnp.results import JSONDocument, ResultBundle, final_state_document, run_summary
from pulsed_dnp.sequences import ChannelCompletenessError, SequenceError
from pulsed_dnp.spinalg import NonUnitaryError, SpinAlgebraError
from pulsed_dnp.util import box_statistics, default_jobs, gaussian_peak, histogram_peak
from pulsed_dnp.version import VERSION

__author__ = "pulsed-dnp developers"

SCRIPT_NAME = "pulsed-dnp"
_log = logging.getLogger(__name__)

#: Failures reported with the configuration exit code
CONFIG_ERRORS = (
    ConfigError,
    ModelError,
    SequenceError,
    ClusterError,
    AmplitudeError,
    EngineError,
    SpinAlgebraError,
    OSError,
)
#: Failures reported with the numerical-health exit code
NUMERICAL_ERRORS = (NumericalHealthError, NonUnitaryError, ChannelCompletenessError)

POINTS_DIR = "points"


class MainError(Exception):
    def __init__(self, msg, code=ExitCode.CONFIG):
        super().__init__(msg)
        self.code = code


def _jobs(cfg: ExperimentConfig) -> int:
    return cfg.run.jobs or default_jobs()


def _map_tasks(func: Callable, tasks: Sequence, jobs: int) -> List[Any]:
    """Results of func over tasks in task order, on a process pool if jobs > 1."""
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            return list(pool.map(func, tasks))
    return [func(t) for t in tasks]


def _simulate_system(task) -> Dict[str, Any]:
    """Run every mode for one system. Top-level so worker processes can load it."""
    label, system, spec, modes, n_rep, cfg_hash, with_details = task
    rows, frames, docs = [], [], []
    for mode in modes:
        result = run(system, spec, mode, n_rep, metadata={"system": label})
        rows.append(run_summary(label, result, cfg_hash))
        if with_details:
            frame = result.to_frame()
            frame.insert(0, "mode", mode.value)
            frame.insert(0, "system", label)
            frames.append(frame)
            docs.append(final_state_document(label, result))
    return {"rows": rows, "frames": frames, "docs": docs}


def _system_tasks(cfg: ExperimentConfig, with_details: bool) -> List[tuple]:
    cfg_hash = cfg.hash()
    tasks = []
    for label, system, _ in build_systems(cfg):
        spec = build_sequence(cfg, system)
        tasks.append((label, system, spec, list(cfg.run.modes), cfg.run.n_rep, cfg_hash, with_details))
    return tasks


def _expanded_tasks(cfg: ExperimentConfig, with_details: bool):
    """Sweep keys and (point index, overrides, task) for every point and system."""
    sweep_points = cfg.sweep.points() if cfg.sweep is not None else [{}]
    base = cfg.model_copy(update={"sweep": None})
    items = []
    for i, overrides in enumerate(sweep_points):
        point_cfg = base.with_overrides(overrides) if overrides else base
        for task in _system_tasks(point_cfg, with_details):
            items.append((i, overrides, task))
    return list(sweep_points[0].keys()), items


def cmd_simulate(cfg: ExperimentConfig) -> ResultBundle:
    """Polarization buildup for every system and mode of a config.

    Writes `trajectories` (one row per repetition), `final` (one row per
    system and mode) and `final_states` (polarizations and two-spin
    reductions). A sweep block is expanded; its values become columns.
    """
    _log.info(f"_begin_ simulate name={cfg.name}")
    bundle = ResultBundle(cfg.output.directory, cfg, "simulate")
    keys, items = _expanded_tasks(cfg, with_details=True)
    outputs = _map_tasks(_simulate_system, [task for _, _, task in items], _jobs(cfg))
    rows, frames, docs = [], [], []
    for (point, overrides, _), out in zip(items, outputs):
        tags = {"point": point, **overrides} if keys else {}
        rows.extend({**r, **tags} for r in out["rows"])
        for frame in out["frames"]:
            for k, v in reversed(list(tags.items())):
                frame.insert(0, k, v)
            frames.append(frame)
        docs.extend({**d, **tags} for d in out["docs"])
    final = pd.DataFrame(rows)
    if keys:
        front = ["config_hash", "point"] + keys
        final = final[front + [c for c in final.columns if c not in front]]
    bundle.add_table("final", final)
    if frames:
        bundle.add_table("trajectories", pd.concat(frames, ignore_index=True))
    bundle.add_document("final_states", docs)
    if cfg.system.cluster is not None:
        _add_cluster_archive(bundle, cfg)
    _log.info(f"_end_ simulate name={cfg.name} runs={len(rows)}")
    return bundle


def _amplitude_extrema(table: pd.DataFrame) -> Dict[str, Dict[str, float]]:
    extrema = {}
    if len(table) < 2:
        return extrema
    for name in TransitionAmplitudeSet.NAMES:
        if name not in table or table[name].isna().all():
            continue
        position, step = locate_extremum(table["scan_value"].to_numpy(), table[name].to_numpy())
        extrema[name] = {"position": position, "step": step, "max": float(table[name].max())}
    return extrema


def cmd_amplitudes(cfg: ExperimentConfig) -> ResultBundle:
    """Amplitude spectra for each scan of a two-nucleus config.

    Writes `spectrum_<scan name>` tables and an `extrema` document with the
    refined position of the maximum of every modulus column.
    """
    if not cfg.scans:
        raise MainError(f"config '{cfg.name}' has no scans")
    systems = build_systems(cfg)
    if len(systems) != 1:
        raise MainError("amplitude spectra need a single inline or uniform system")
    _, system, _ = systems[0]
    spec = build_sequence(cfg, system)
    _log.info(f"_begin_ amplitudes name={cfg.name} scans={len(cfg.scans)}")
    bundle = ResultBundle(cfg.output.directory, cfg, "amplitudes")
    extrema = {}
    for scan in cfg.scans:
        table = amplitude_spectrum(
            system, spec, scan.variable, scan.grid(), jobs=_jobs(cfg), with_analytic=scan.with_analytic
        )
        bundle.add_table(f"spectrum_{scan.name}", table)
        extrema[scan.name] = _amplitude_extrema(table)
    bundle.add_document("extrema", extrema)
    _log.info(f"_end_ amplitudes name={cfg.name}")
    return bundle


def _add_cluster_archive(bundle: ResultBundle, cfg: ExperimentConfig):
    configs = build_clusters(cfg)
    rows = []
    for c in configs:
        bundle.add_document(f"clusters/config_{c.index:04d}", c.to_dict())
        rows.append(
            {
                "index": c.index,
                "attempts": c.attempts,
                "n_occupied": c.n_occupied,
                "n_nuc": c.n_nuc,
                "mean_a_perp_mhz": c.mean_a_perp,
                "max_a_perp_mhz": max(c.a_perp),
            }
        )
    columns = ["index", "attempts", "n_occupied", "n_nuc", "mean_a_perp_mhz", "max_a_perp_mhz"]
    bundle.add_table("clusters_summary", pd.DataFrame(rows, columns=columns))
    return configs


def cmd_cluster_gen(cfg: ExperimentConfig) -> ResultBundle:
    """Archive of generated 13C clusters with a per-configuration summary."""
    if cfg.system.cluster is None:
        raise MainError(f"config '{cfg.name}' has no cluster block")
    _log.info(f"_begin_ cluster-gen name={cfg.name}")
    bundle = ResultBundle(cfg.output.directory, cfg, "cluster-gen")
    configs = _add_cluster_archive(bundle, cfg)
    _log.info(f"_end_ cluster-gen name={cfg.name} configs={len(configs)}")
    return bundle


def _point_file(directory: Path, cfg_hash: str, label: str) -> Path:
    return directory / POINTS_DIR / cfg_hash / f"{label}.json"


def _sweep_statistics(points: pd.DataFrame, keys: List[str], cfg: ExperimentConfig) -> pd.DataFrame:
    """Box and histogram statistics of the final polarization per sweep value and mode."""
    done = points[points["error"].isna()] if "error" in points else points
    rows = []
    if done.empty:
        return pd.DataFrame(rows)
    for group, sub in done.groupby(keys + ["mode"], sort=False, dropna=False):
        group = group if isinstance(group, tuple) else (group,)
        row = dict(zip(keys + ["mode"], group))
        f_n = float(sub["f_n_mhz"].iloc[0])
        mean_a_perp = float(sub["mean_a_perp_mhz"].mean())
        row["mean_a_perp_mhz"] = mean_a_perp
        row["mean_tilt_rad"] = tilt_angle(f_n, mean_a_perp, cfg.system.electron)
        row.update(box_statistics(sub["P"]))
        row["histogram_peak"] = histogram_peak(sub["P"])
        row["fit_center"], row["fit_width"] = gaussian_peak(sub["P"])
        rows.append(row)
    return pd.DataFrame(rows)


def _scatter(points: pd.DataFrame, keys: List[str]) -> pd.DataFrame:
    """One row per system with the final polarization of each mode side by side."""
    done = points[points["error"].isna()] if "error" in points else points
    if done.empty:
        return pd.DataFrame()
    index = ["config_hash"] + keys + ["system", "mean_a_perp_mhz"]
    wide = done.pivot_table(index=index, columns="mode", values="P", sort=False).reset_index()
    wide.columns.name = None
    return wide.rename(columns={m.value: f"P_{m.value}" for m in RunMode})


def cmd_sweep(cfg: ExperimentConfig) -> ResultBundle:
    """Run every point of a sweep, resuming from per-system point files.

    Each (point, system) pair is one task. Finished tasks are written to
    `points/<config hash>/<system>.json` at full precision and skipped on re-runs.
    A failed task is recorded with its error and the batch continues.
    """
    keys, items = _expanded_tasks(cfg, with_details=False)
    directory = Path(cfg.output.directory)
    bundle = ResultBundle(directory, cfg, "sweep")
    _log.info(f"_begin_ sweep name={cfg.name} tasks={len(items)}")

    tasks, done, meta = [], {}, []
    for key, (i, overrides, task) in enumerate(items):
        meta.append((i, overrides, task[0], task[5]))
        path = _point_file(directory, task[5], task[0])
        if path.exists():
            done[key] = json.loads(path.read_text(encoding="utf-8"))
        else:
            tasks.append((key, task))
    _log.info(f"sweep tasks total={len(meta)} resumed={len(done)} pending={len(tasks)}")

    def record(key, out):
        path = _point_file(directory, meta[key][3], meta[key][2])
        path.parent.mkdir(parents=True, exist_ok=True)
        JSONDocument(out["rows"]).write(path)
        done[key] = out["rows"]

    jobs = _jobs(cfg)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            futures = {pool.submit(_simulate_system, task): key for key, task in tasks}
            for future in as_completed(futures):
                key = futures[future]
                try:
                    record(key, future.result())
                except Exception as err:
                    _sweep_failure(bundle, meta[key], err, done, key)
    else:
        for key, task in tasks:
            try:
                record(key, _simulate_system(task))
            except Exception as err:
                _sweep_failure(bundle, meta[key], err, done, key)

    rows = []
    for key in range(len(meta)):
        point, overrides, label, cfg_hash = meta[key]
        for row in done[key]:
            row = dict(row)
            row.update({"point": point, "system": label, "config_hash": cfg_hash, **overrides})
            rows.append(row)
    points = pd.DataFrame(rows)
    if "error" not in points:
        points["error"] = None
    front = ["config_hash", "point"] + keys
    points = points[front + [c for c in points.columns if c not in front]]
    bundle.add_table("sweep_points", points)
    bundle.add_table("sweep_statistics", _sweep_statistics(points, keys, cfg))
    bundle.add_table("scatter", _scatter(points, keys))
    _log.info(f"_end_ sweep name={cfg.name} failures={len(bundle.failures)}")
    return bundle


def _sweep_failure(bundle: ResultBundle, meta, err: Exception, done: Dict, key: int):
    point, _, label, cfg_hash = meta
    _log.warning(f"sweep point={point} system={label} failed: {err}")
    bundle.add_failure(f"{cfg_hash}/{label}", err)
    done[key] = [{"mode": None, "P": np.nan, "error": f"{type(err).__name__}: {err}"}]


COMMANDS = {
    "simulate": cmd_simulate,
    "amplitudes": cmd_amplitudes,
    "cluster-gen": cmd_cluster_gen,
    "sweep": cmd_sweep,
}


USAGE = f"""
This script simulates dynamic nuclear polarization of nuclear spin clusters
by repeated pulse sequences (PulsePol, NOVEL) acting on a central electron.

It has four commands:

- simulate: polarization buildup of every system and run mode of a config
- amplitudes: transition amplitude spectra of a two-nucleus system
- cluster-gen: random 13C clusters around an NV center, archived as JSON
- sweep: simulate over a grid of config values, with box-chart statistics

A config is a JSON file (see --schema) or one of the committed presets
(see --list-presets). The options --seed, --jobs and --out override
the values in the config. Logging options (-q, -v) go before the command.
Every file written is printed, one per line.

Example command-lines:

    # Reproduce the 9-spin per-spin polarizations
    {SCRIPT_NAME} simulate --preset nine_spins --out results/nine_spins

    # Amplitude spectrum over the hyperfine coupling
    {SCRIPT_NAME} amplitudes --preset fig2a

    # Cluster statistics versus field, 4 worker processes
    {SCRIPT_NAME} -v sweep --preset clusters_field --jobs 4

    # Own config
    {SCRIPT_NAME} simulate --config my_run.json --seed 7

Exit codes: {ExitCode.OK} success, {ExitCode.CONFIG} configuration error,
{ExitCode.NUMERICAL} numerical health error.
"""


def _add_log_options(parser: argparse.ArgumentParser) -> None:
    """Add logging-specific options to the argument parser

    Args:
        parser (argparse.ArgumentParser): Parser to modify
    """
    parser.add_argument("-q", "--quiet", action="store_true", help="Minimal logging")
    parser.add_argument(
        "-v",
        action="count",
        dest="vb",
        default=0,
        help="Increase verbosity (repeatable)",
    )


def _process_log_options(module_name: str, args: argparse.Namespace) -> logging.Logger:
    log = logging.getLogger(module_name)
    if not log.handlers:
        h = logging.StreamHandler()
        fmt = "[{levelname}] {asctime} ({name}) {message}"
        h.setFormatter(logging.Formatter(fmt, style="{"))
        log.addHandler(h)
        log.propagate = False  # otherwise we get 2 copies
    if args.quiet:
        log.setLevel(logging.CRITICAL)
    else:
        log.setLevel((logging.ERROR, logging.WARNING, logging.INFO, logging.DEBUG)[min(args.vb, 3)])
    return log


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", "-c", metavar="PATH", help="JSON config file")
    source.add_argument("--preset", "-p", metavar="NAME", help="Committed preset config")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (overrides config)")
    parser.add_argument("--jobs", "-j", type=int, default=None, help="Worker processes (overrides config)")
    parser.add_argument("--out", "-o", metavar="DIR", default=None, help="Output directory (overrides config)")


def get_config(args: argparse.Namespace) -> ExperimentConfig:
    """Load the config named on the command line and apply overrides.

    Raises:
        ConfigError: unreadable or invalid config, or bad override
    """
    cfg = load_preset(args.preset) if args.preset else load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["run.seed"] = args.seed
    if args.jobs is not None:
        overrides["run.jobs"] = args.jobs
    if args.out is not None:
        overrides["output.directory"] = args.out
    return cfg.with_overrides(overrides) if overrides else cfg


def main(command_line=None):
    p = argparse.ArgumentParser(description="Simulate pulsed dynamic nuclear polarization")
    p.add_argument("--usage", action="store_true", help="Print usage with examples")
    p.add_argument("--version", help="Print version number and quit", action="store_true")
    p.add_argument("--schema", action="store_true", help="Print the config JSON schema and quit")
    p.add_argument("--list-presets", action="store_true", help="Print preset names and quit")
    _add_log_options(p)
    subparsers = p.add_subparsers(dest="command", metavar="COMMAND")
    for name, func in COMMANDS.items():
        sp = subparsers.add_parser(name, help=func.__doc__.split("\n")[0])
        _add_run_options(sp)

    args = p.parse_args(command_line)

    # Initialize the logger
    _process_log_options("pulsed_dnp", args)

    if args.version:
        print(VERSION)
        return ExitCode.OK
    if args.usage:
        print(USAGE)
        return ExitCode.OK
    if args.schema:
        print(json.dumps(ExperimentConfig.model_json_schema(), indent=2))
        return ExitCode.OK
    if args.list_presets:
        aliases = {v: k for k, v in PRESET_ALIASES.items()}
        for name in list_presets():
            print(f"{name:24s} {aliases.get(name, '')}".rstrip())
        return ExitCode.OK
    if args.command is None:
        print("A command is required. Try --usage for details.\n")
        p.print_help()
        return ExitCode.CONFIG

    try:
        cfg = get_config(args)
        bundle = COMMANDS[args.command](cfg)
        paths = bundle.save()
    except NUMERICAL_ERRORS as err:
        print(f"Numerical error: {err}", file=sys.stderr)
        return ExitCode.NUMERICAL
    except MainError as err:
        print(f"Error: {err}", file=sys.stderr)
        return err.code
    except CONFIG_ERRORS as err:
        print(f"Error: {err}", file=sys.stderr)
        return ExitCode.CONFIG

    for path in paths:
        print(path)
    return ExitCode.OK


if __name__ == "__main__":
    sys.exit(main())
