"""CSV/JSON ingestion and serialization.

Power CSV schema: header ``timestamp,P0,P1,P2,P3,P4,P5``. Timestamps are
either integer epoch seconds or ISO-8601 strings; both are read as UTC
(ISO strings with an offset are converted, naive ones are taken as UTC).
Missing timestamps inside the covered span are forward-filled.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import warnings
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .model import (
    N_FEATURES,
    SECONDS_PER_DAY,
    ConfigurationError,
    DataError,
    DeviceLibrary,
    PowerSeries,
    check_state_array,
)

logger = logging.getLogger(__name__)

POWER_HEADER = ["timestamp"] + [f"P{i}" for i in range(N_FEATURES)]
STATES_HEADER = ["t", "device", "event"]


class ParseError(DataError):
    pass


class MissingDataWarning(UserWarning):
    pass


def _parse_timestamp(text: str) -> int:
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        value = None
    if value is not None:
        if not value.is_integer():
            raise ValueError(f"timestamp {text!r} is not a whole second")
        return int(value)
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    if dt.microsecond:
        raise ValueError(f"timestamp {text!r} is not a whole second")
    return int(dt.timestamp())


def _fmt(v) -> str:
    return repr(float(v))


def load_power_csv(path, expected_granularity: int = 1,
                   max_missing_fraction: float = 0.05) -> PowerSeries:
    path = Path(path)
    stamps, rows = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != POWER_HEADER:
            raise ParseError(f"{path}:1: expected header {','.join(POWER_HEADER)}")
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(POWER_HEADER):
                raise ParseError(f"{path}:{line}: expected {len(POWER_HEADER)} fields, got {len(row)}")
            try:
                stamps.append(_parse_timestamp(row[0]))
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise ParseError(f"{path}:{line}: {exc}") from exc
            if not all(np.isfinite(values)):
                raise ParseError(f"{path}:{line}: non-finite value")
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: no data rows")

    g = int(expected_granularity)
    ts = np.asarray(stamps, dtype=np.int64)
    steps = np.diff(ts)
    if np.any(steps <= 0):
        bad = int(np.flatnonzero(steps <= 0)[0])
        kind = "duplicate" if steps[bad] == 0 else "non-monotone"
        raise DataError(f"{path}:{bad + 3}: {kind} timestamp {ts[bad + 1]}")
    offsets = ts - ts[0]
    if np.any(offsets % g):
        bad = int(np.flatnonzero(offsets % g)[0])
        raise DataError(f"{path}:{bad + 2}: timestamp {ts[bad]} is off the {g} s grid")

    slots = offsets // g
    n = int(slots[-1]) + 1
    # forward fill: each slot takes the most recent row at or before it
    source = np.searchsorted(slots, np.arange(n), side="right") - 1
    samples = np.asarray(rows, dtype=float)[source]
    missing = n - len(rows)
    if missing:
        frac = missing / n
        logger.info("%s: filled %d missing samples (%.4f %%)", path, missing, 100 * frac)
        if frac > max_missing_fraction:
            warnings.warn(f"{path}: {100 * frac:.2f} % of samples missing and forward-filled",
                          MissingDataWarning, stacklevel=2)
    return PowerSeries(samples, start_time=int(ts[0] % SECONDS_PER_DAY),
                       granularity=g, epoch_start=int(ts[0]))


def write_power_csv(P: PowerSeries, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(POWER_HEADER)
        for stamp, row in zip(P.timestamps, P.samples):
            w.writerow([int(stamp)] + [_fmt(v) for v in row])


def load_library(path) -> DeviceLibrary:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return DeviceLibrary.from_dict(doc)


def save_library(library: DeviceLibrary, path) -> None:
    write_json(library.to_dict(), path)


def write_json(doc, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_states_csv(S, path) -> None:
    S = check_state_array(S)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STATES_HEADER)
        for t, i in np.argwhere(S != 0):
            w.writerow([int(t), int(i), int(S[t, i])])


def read_states_csv(path, n_rows: int = None, n_devices: int = None) -> np.ndarray:
    """Rebuild a dense state matrix; sizes default to the largest index seen."""
    path = Path(path)
    events = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != STATES_HEADER:
            raise ParseError(f"{path}:1: expected header {','.join(STATES_HEADER)}")
        for row in reader:
            if not row:
                continue
            try:
                t, i, e = (int(v) for v in row)
            except ValueError as exc:
                raise ParseError(f"{path}:{reader.line_num}: {exc}") from exc
            if e not in (-1, 1) or t < 0 or i < 0:
                raise ParseError(f"{path}:{reader.line_num}: invalid event {row}")
            events.append((t, i, e))
    T = n_rows if n_rows is not None else max((t for t, _, _ in events), default=-1) + 1
    M = n_devices if n_devices is not None else max((i for _, i, _ in events), default=-1) + 1
    S = np.zeros((max(T, 0), max(M, 0)), dtype=np.int8)
    for t, i, e in events:
        if t >= S.shape[0] or i >= S.shape[1]:
            raise DataError(f"{path}: event ({t}, {i}) outside {S.shape}")
        S[t, i] = e
    return S


def write_histogram_csv(hist, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["window_start_seconds", "count", "normalized"])
        for start, count, norm in hist.rows():
            w.writerow([start, count, _fmt(norm)])


def save_day_result(result, out_dir) -> dict:
    """Write states.csv, reconstructed.csv, metrics.json and frames.json."""
    out_dir = Path(out_dir)
    try:
        os.makedirs(out_dir, exist_ok=True)
        paths = {name: out_dir / name for name in
                 ("states.csv", "reconstructed.csv", "metrics.json", "frames.json")}
        write_states_csv(result.state_changes, paths["states.csv"])
        write_power_csv(result.reconstructed, paths["reconstructed.csv"])
        write_json(result.metrics.to_dict() if result.metrics else {}, paths["metrics.json"])
        write_json(result.frames(), paths["frames.json"])
    except OSError as exc:
        raise OSError(f"cannot write day result to {out_dir}: {exc}") from exc
    return paths


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def save_scenario(scenario, out_dir) -> dict:
    out_dir = Path(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    paths = {"library": out_dir / "library.json", "states": out_dir / "states_true.csv",
             "power": out_dir / "power.csv"}
    save_library(scenario.library, paths["library"])
    write_states_csv(scenario.state_changes, paths["states"])
    write_power_csv(scenario.power, paths["power"])
    return paths


__all__ = [
    "ConfigurationError", "DataError", "MissingDataWarning", "ParseError",
    "load_power_csv", "write_power_csv", "load_library", "save_library",
    "write_states_csv", "read_states_csv", "write_histogram_csv", "save_day_result",
    "save_scenario", "file_digest", "read_json", "write_json",
]
