"""On-disk formats: temporal CSV, ground-truth CSV, and density snapshots.

Density snapshots are one 172x287 grid per (day, time-of-day) with times
00:00, 08:00 and 16:00, stored either as bare CSV grids named
``YYYY-MM-DD_HHMM.csv`` or inside an EPIF container whose entries are named
``YYYY-MM-DDTHHMM``. The daily frame is the mean of the snapshots present.
All floats are written with ``repr`` so files round-trip exactly.
"""

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DataFormatError
from ..nn.serialize import read_container, write_container

FEATURE_NAMES = [
    "pressure", "solar", "temp", "wind", "humidity",
    "pm10", "pm25", "co", "no", "no2", "nox", "o3", "so2",
]
TARGET_NAMES = ["cases", "deaths"]
TEMPORAL_HEADER = ["date"] + FEATURE_NAMES
TRUTH_HEADER = ["date", "daily_cases", "daily_deaths"]
# pollutant columns must be nonnegative when present
CONCENTRATION_INDICES = list(range(5, 13))
HUMIDITY_INDEX = 4

GRID_SHAPE = (172, 287)
SNAPSHOT_TIMES = ("0000", "0800", "1600")


@dataclass
class TemporalRecord:
    date: dt.date
    values: np.ndarray  # (13,), NaN marks a missing entry


@dataclass
class GroundTruth:
    date: dt.date
    daily_cases: int
    daily_deaths: int


@dataclass
class DensityFrame:
    date: dt.date
    grid: np.ndarray  # (172, 287), nonnegative


def _fmt(x):
    return repr(float(x))


def _parse_date(text, where):
    try:
        return dt.date.fromisoformat(text)
    except ValueError as exc:
        raise DataFormatError(f"{where}: bad date {text!r}") from exc


# ---------------------------------------------------------------------------
# Temporal series
# ---------------------------------------------------------------------------


def load_temporal(path):
    """Parse the meteorological/air-quality CSV into TemporalRecords."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TEMPORAL_HEADER:
            raise DataFormatError(f"{path}: bad header {header}")
        prev = None
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(TEMPORAL_HEADER):
                raise DataFormatError(f"{path} row {lineno}: expected "
                                      f"{len(TEMPORAL_HEADER)} cells, got {len(row)}")
            date = _parse_date(row[0], f"{path} row {lineno}")
            if prev is not None and date == prev:
                raise DataFormatError(f"{path} row {lineno}: duplicate date {date}")
            if prev is not None and date < prev:
                raise DataFormatError(f"{path} row {lineno}: dates not increasing at {date}")
            prev = date
            values = np.full(len(FEATURE_NAMES), np.nan)
            for k, cell in enumerate(row[1:]):
                if cell == "":
                    continue
                try:
                    values[k] = float(cell)
                except ValueError as exc:
                    raise DataFormatError(
                        f"{path} row {lineno}: bad value {cell!r} for {FEATURE_NAMES[k]}"
                    ) from exc
            hum = values[HUMIDITY_INDEX]
            if np.isfinite(hum) and not (0.0 <= hum <= 100.0):
                raise DataFormatError(f"{path} row {lineno}: humidity {hum} outside [0, 100]")
            for k in CONCENTRATION_INDICES:
                if np.isfinite(values[k]) and values[k] < 0:
                    raise DataFormatError(
                        f"{path} row {lineno}: negative {FEATURE_NAMES[k]} {values[k]}"
                    )
            records.append(TemporalRecord(date, values))
    return records


def write_temporal_csv(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TEMPORAL_HEADER)
        for rec in records:
            cells = [rec.date.isoformat()]
            cells += ["" if not np.isfinite(v) else _fmt(v) for v in rec.values]
            writer.writerow(cells)


# ---------------------------------------------------------------------------
# Ground truth
# ---------------------------------------------------------------------------


def load_ground_truth(path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRUTH_HEADER:
            raise DataFormatError(f"{path}: bad header {header}")
        prev = None
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise DataFormatError(f"{path} row {lineno}: expected 3 cells")
            date = _parse_date(row[0], f"{path} row {lineno}")
            if prev is not None and date <= prev:
                raise DataFormatError(f"{path} row {lineno}: dates not increasing")
            prev = date
            try:
                cases, deaths = int(row[1]), int(row[2])
            except ValueError as exc:
                raise DataFormatError(f"{path} row {lineno}: counts must be integers") from exc
            if cases < 0 or deaths < 0:
                raise DataFormatError(f"{path} row {lineno}: negative count")
            rows.append(GroundTruth(date, cases, deaths))
    return rows


def write_ground_truth_csv(truth, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRUTH_HEADER)
        for rec in truth:
            writer.writerow([rec.date.isoformat(), rec.daily_cases, rec.daily_deaths])


# ---------------------------------------------------------------------------
# Density frames
# ---------------------------------------------------------------------------


def _check_grid(grid, where):
    if grid.shape != GRID_SHAPE:
        raise DataFormatError(f"{where}: grid shape {grid.shape}, expected {GRID_SHAPE}")
    if np.any(grid < 0):
        raise DataFormatError(f"{where}: negative density values")
    return grid


def _parse_snapshot_name(stem, where):
    parts = stem.split("_") if "_" in stem else stem.split("T")
    if len(parts) != 2 or parts[1] not in SNAPSHOT_TIMES:
        raise DataFormatError(f"{where}: expected <date>_<{'|'.join(SNAPSHOT_TIMES)}> name")
    return _parse_date(parts[0], where), parts[1]


def load_density_frames(directory, expected_dates=None):
    """Collect per-day frames from snapshot CSVs and/or EPIF containers.

    A day's frame is the mean of its available snapshots; a day listed in
    ``expected_dates`` with no snapshots at all is an error.
    """
    directory = Path(directory)
    snapshots = {}

    for path in sorted(directory.glob("*.csv")):
        date, tod = _parse_snapshot_name(path.stem, str(path))
        try:
            grid = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
        except ValueError as exc:
            raise DataFormatError(f"{path}: unreadable grid ({exc})") from exc
        snapshots[(date, tod)] = _check_grid(grid, str(path))

    for path in sorted(directory.glob("*.epif")):
        manifest, arrays = read_container(path)
        if manifest.get("kind") != "density":
            raise DataFormatError(f"{path}: EPIF container is not a density bundle")
        for name, grid in arrays.items():
            date, tod = _parse_snapshot_name(name, f"{path}:{name}")
            snapshots[(date, tod)] = _check_grid(grid, f"{path}:{name}")

    by_date = {}
    for (date, _), grid in sorted(snapshots.items(), key=lambda kv: kv[0]):
        by_date.setdefault(date, []).append(grid)

    if expected_dates is not None:
        missing = [d for d in expected_dates if d not in by_date]
        if missing:
            raise DataFormatError(
                f"{directory}: no density snapshots for {', '.join(map(str, missing))}"
            )

    return [
        DensityFrame(date, np.mean(np.stack(grids), axis=0))
        for date, grids in sorted(by_date.items())
    ]


def write_density_snapshots(directory, snapshots, fmt="epif"):
    """Persist {(date, tod): grid} either as per-snapshot CSVs or as one
    EPIF container per day."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        for (date, tod), grid in sorted(snapshots.items()):
            path = directory / f"{date.isoformat()}_{tod}.csv"
            with open(path, "w", newline="") as fh:
                for row in grid:
                    fh.write(",".join(_fmt(v) for v in row))
                    fh.write("\n")
    elif fmt == "epif":
        by_date = {}
        for (date, tod), grid in sorted(snapshots.items()):
            by_date.setdefault(date, []).append((f"{date.isoformat()}T{tod}", grid))
        for date, arrays in sorted(by_date.items()):
            write_container(directory / f"{date.isoformat()}.epif", {"kind": "density"}, arrays)
    else:
        raise DataFormatError(f"unknown density format {fmt!r}")
