"""
JSON and CSV readers/writers for reports, series and spectra.

Floats are written with repr() so every value survives a round trip exactly.
"""

import csv
import io
import json
import logging
import math
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Optional, TextIO, Union

import numpy as np

from .analysis import Spectrum
from .errors import AnalysisError, ConfigError
from .evolve import TimeSeries

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays, enums and objects with to_dict() into JSON types."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(item) for item in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(item) for item in obj.tolist()]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(obj: Any, path: Optional[PathLike] = None) -> None:
    """Write a JSON document to a file, or to stdout when no path is given."""
    text = dumps(obj)
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
    logger.debug(f"Wrote JSON to {path}")


def read_json(path: PathLike) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"File not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {path}: {e}")


def _write_rows(out: TextIO, header, rows) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(value)) for value in row])


def series_to_csv(series: TimeSeries) -> str:
    buffer = io.StringIO()
    _write_rows(buffer, ["t", "value"], zip(series.times, series.values))
    return buffer.getvalue()


def write_series(series: TimeSeries, path: Optional[PathLike] = None) -> None:
    """Write a series as CSV with header `t,value`."""
    text = series_to_csv(series)
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
    logger.info(f"Wrote {len(series)} samples to {path}")


def read_series(path: PathLike) -> TimeSeries:
    """
    Read a `t,value` CSV written by write_series.

    Args:
        path: CSV file

    Returns:
        TimeSeries; sampling must be uniform
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            rows = [row for row in reader if row]
    except FileNotFoundError:
        raise ConfigError(f"Series file not found: {path}")

    if header is None or [h.strip() for h in header] != ["t", "value"]:
        raise AnalysisError(f"{path}: expected header 't,value', got {header}")
    try:
        data = np.array([[float(t), float(v)] for t, v in rows])
    except ValueError as e:
        raise AnalysisError(f"{path}: malformed row: {e}")
    if data.shape[0] < 2:
        raise AnalysisError(f"{path}: a series needs at least 2 samples")

    times = data[:, 0]
    t0 = float(times[0])
    dt = float(times[1] - times[0])
    steps = np.diff(times)
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-9 * max(abs(dt), 1.0):
        raise AnalysisError(f"{path}: samples are not uniformly spaced")
    return TimeSeries(t0=t0, dt=dt, values=data[:, 1], metadata={"source": str(path)})


def write_spectrum(spec: Spectrum, path: Optional[PathLike] = None) -> None:
    """Write the one-sided power spectrum as CSV with header `frequency,power`."""
    buffer = io.StringIO()
    _write_rows(buffer, ["frequency", "power"], zip(spec.frequencies, spec.power))
    if path is None:
        sys.stdout.write(buffer.getvalue())
        return
    Path(path).write_text(buffer.getvalue(), encoding="utf-8")
    logger.info(f"Wrote spectrum with {spec.power.size} bins to {path}")
