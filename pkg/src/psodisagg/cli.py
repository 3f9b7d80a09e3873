"""Command-line interface: ``psodisagg {disagg,synth,eval,hist}``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import io as pio
from .metrics import compute_metrics, on_event_histogram, total_active
from .model import ConfigurationError, DataError
from .pipeline import disaggregate_day, split_days
from .pso import PsoConfig
from .synth import ScenarioSpec, generate_scenario

logger = logging.getLogger("psodisagg")


def _add_config_flags(parser):
    group = parser.add_argument_group("optimizer settings (override the config file)")
    for f in dataclasses.fields(PsoConfig):
        if f.name == "rng_seed":
            continue
        kind = type(f.default)
        group.add_argument("--" + f.name.replace("_", "-"), dest="cfg_" + f.name,
                           type=kind, default=None, metavar=kind.__name__.upper())


def _resolve_config(args) -> PsoConfig:
    doc = {}
    if args.config:
        doc = pio.read_json(args.config)
        if not isinstance(doc, dict):
            raise ConfigurationError(f"{args.config}: config must be a flat JSON object")
    for f in dataclasses.fields(PsoConfig):
        value = getattr(args, "cfg_" + f.name, None)
        if value is not None:
            doc[f.name] = value
    if args.seed is not None:
        doc["rng_seed"] = args.seed
    return PsoConfig.from_dict(doc)


def _day_name(day, k):
    if day.epoch_start is None:
        return f"day_{k:03d}"
    return datetime.fromtimestamp(day.epoch_start, tz=timezone.utc).strftime("%Y-%m-%d")


def _run_day(job):
    day, library, cfg, seed_seq, out_dir = job
    result = disaggregate_day(day, library, cfg, np.random.default_rng(seed_seq))
    pio.save_day_result(result, out_dir)
    return result.metrics.to_dict()


def cmd_disagg(args) -> int:
    cfg = _resolve_config(args)
    library = pio.load_library(args.library_json)
    power = pio.load_power_csv(args.power_csv, args.granularity)
    days = split_days(power)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    seeds = np.random.SeedSequence(cfg.rng_seed).spawn(len(days))
    names = [_day_name(d, k) for k, d in enumerate(days)]
    jobs = [(d, library, cfg, s, out / n) for d, s, n in zip(days, seeds, names)]
    if args.parallel_days > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.parallel_days) as pool:
            per_day = list(pool.map(_run_day, jobs))
    else:
        per_day = [_run_day(job) for job in jobs]

    summary = {"days": [dict(day=n, **m) for n, m in zip(names, per_day)]}
    keys = ("rmse", "mae", "mape", "energy_e", "energy_e_signed", "rmse_over_mean_power")
    for stat, fn in (("mean", np.nanmean), ("std", np.nanstd)):
        summary[stat] = {}
        for k in keys:
            vals = np.array([np.nan if m[k] is None else m[k] for m in per_day], dtype=float)
            summary[stat][k] = float(fn(vals)) if np.isfinite(vals).any() else None
    pio.write_json(summary, out / "summary.json")
    pio.write_json({
        "command": "disagg",
        "version": __version__,
        "seed": cfg.rng_seed,
        "config": cfg.to_dict(),
        "granularity": args.granularity,
        "inputs": {
            "power_csv": {"path": str(args.power_csv), "sha256": pio.file_digest(args.power_csv)},
            "library_json": {"path": str(args.library_json),
                             "sha256": pio.file_digest(args.library_json)},
            "config": None if not args.config else
            {"path": str(args.config), "sha256": pio.file_digest(args.config)},
        },
        "days": names,
    }, out / "run.json")
    json.dump(summary["mean"], sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def cmd_synth(args) -> int:
    doc = pio.read_json(args.spec_file)
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{args.spec_file}: scenario spec must be a JSON object")
    spec = ScenarioSpec.from_dict(doc)
    paths = pio.save_scenario(generate_scenario(spec), args.out)
    pio.write_json({
        "command": "synth",
        "version": __version__,
        "spec": spec.to_dict(),
        "inputs": {"spec_file": {"path": str(args.spec_file),
                                 "sha256": pio.file_digest(args.spec_file)}},
        "outputs": {k: Path(p).name for k, p in paths.items()},
    }, Path(args.out) / "run.json")
    return 0


def cmd_eval(args) -> int:
    meas = pio.load_power_csv(args.measured_csv, args.granularity)
    rec = pio.load_power_csv(args.reconstructed_csv, args.granularity)
    if len(meas) != len(rec):
        raise DataError(f"length mismatch: {args.measured_csv} has {len(meas)} rows, "
                        f"{args.reconstructed_csv} has {len(rec)}")
    report = compute_metrics(total_active(meas), total_active(rec))
    json.dump(report.to_dict(), sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def cmd_hist(args) -> int:
    S = pio.read_states_csv(args.states_csv, n_rows=args.rows, n_devices=args.devices)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(S.shape[1]):
        hist = on_event_histogram(S, i, args.window_minutes, args.granularity)
        pio.write_histogram_csv(hist, out / f"hist_device_{i:03d}.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psodisagg", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("disagg", help="disaggregate a power CSV day by day")
    p.add_argument("power_csv")
    p.add_argument("library_json")
    p.add_argument("--config", help="flat JSON object with optimizer settings")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--granularity", type=int, default=1, help="seconds per sample")
    p.add_argument("--parallel-days", type=int, default=1, metavar="N")
    _add_config_flags(p)
    p.set_defaults(func=cmd_disagg)

    p = sub.add_parser("synth", help="generate a synthetic scenario")
    p.add_argument("spec_file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="print power-domain metrics as JSON")
    p.add_argument("measured_csv")
    p.add_argument("reconstructed_csv")
    p.add_argument("--granularity", type=int, default=1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("hist", help="per-device ON-event histograms")
    p.add_argument("states_csv")
    p.add_argument("--window-minutes", type=int, default=30)
    p.add_argument("--out", required=True)
    p.add_argument("--rows", type=int, default=86400, help="rows in the state matrix")
    p.add_argument("--devices", type=int, default=None)
    p.add_argument("--granularity", type=int, default=1)
    p.set_defaults(func=cmd_hist)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ConfigurationError, DataError, OSError, ValueError) as exc:
        msg = str(exc).replace("\n", " ")
        if isinstance(exc, OSError) and exc.filename and str(exc.filename) not in msg:
            msg = f"{exc.filename}: {msg}"
        print(f"psodisagg {args.command}: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
