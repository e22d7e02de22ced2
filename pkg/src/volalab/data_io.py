"""CSV reading and writing plus small series transforms.

Floats are written with 17 significant digits so a written series reads
back bit-identical. Loading is strict: missing columns, non-numeric cells,
and NaNs are errors rather than silent drops.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from .errors import InvalidInputError
from .model import Series

__all__ = [
    "load_series_csv",
    "write_series_csv",
    "prices_to_log_returns",
    "floor_small_returns",
    "acd_transform",
]

FLOAT_FORMAT = "%.17g"


def _pick_column(frame: pd.DataFrame, column: Union[str, int], what: str) -> pd.Series:
    if isinstance(column, int):
        if not 0 <= column < frame.shape[1]:
            raise InvalidInputError(
                f"{what} index {column} out of range for {frame.shape[1]} columns"
            )
        return frame.iloc[:, column]
    if column not in frame.columns:
        raise InvalidInputError(
            f"{what} {column!r} not found; columns are {list(frame.columns)}"
        )
    return frame[column]


def load_series_csv(
    path: Union[str, Path],
    column: Union[str, int] = "value",
    date_column: Optional[Union[str, int]] = None,
) -> Series:
    """Read one numeric column (and optionally a timestamp column) from CSV."""
    # the default parser is fast but lossy in the last bit; round_trip keeps
    # written values bit-identical on reload
    frame = pd.read_csv(path, float_precision="round_trip")
    if frame.shape[0] == 0:
        raise InvalidInputError(f"{path}: no data rows")
    raw = _pick_column(frame, column, "column")
    try:
        values = pd.to_numeric(raw, errors="raise").to_numpy(dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise InvalidInputError(f"{path}: non-numeric entry in {column!r}: {exc}") from None
    if np.isnan(values).any():
        bad = int(np.flatnonzero(np.isnan(values))[0])
        raise InvalidInputError(f"{path}: missing value in {column!r} at row {bad}")
    timestamps = None
    if date_column is not None:
        timestamps = tuple(
            str(t) for t in _pick_column(frame, date_column, "date column")
        )
    return Series(values, timestamps=timestamps)


def write_series_csv(
    path: Union[str, Path],
    series: Series,
    column: str = "value",
    date_column: str = "date",
) -> None:
    """Write a series to CSV at full float precision."""
    data = {}
    if series.timestamps is not None:
        data[date_column] = list(series.timestamps)
    data[column] = series.values
    pd.DataFrame(data).to_csv(path, index=False, float_format=FLOAT_FORMAT)


def prices_to_log_returns(series: Series, scale: float = 100.0) -> Series:
    """Scaled differences of log prices; prices must be strictly positive.

    The default scale of 100 reports percent returns, the usual convention
    for daily exchange-rate series.
    """
    v = series.values
    if v.size < 2:
        raise InvalidInputError("need at least two prices to form returns")
    if np.any(v <= 0):
        bad = int(np.flatnonzero(v <= 0)[0])
        raise InvalidInputError(f"non-positive price at index {bad}")
    if not (math.isfinite(scale) and scale != 0):
        raise InvalidInputError(f"scale must be finite and nonzero, got {scale}")
    returns = scale * np.diff(np.log(v))
    ts = series.timestamps[1:] if series.timestamps is not None else None
    return Series(returns, timestamps=ts)


def floor_small_returns(series: Series, floor: float) -> Series:
    """Push returns inside (-floor, floor) out to the floor, keeping signs.

    Exact zeros go to +floor. This makes a series safe for log-of-squares
    transforms without changing any value by more than the floor.
    """
    if not floor > 0:
        raise InvalidInputError(f"floor must be positive, got {floor}")
    v = series.values
    out = np.where(np.abs(v) < floor, np.where(v < 0, -floor, floor), v)
    return Series(out, timestamps=series.timestamps)


def acd_transform(durations: np.ndarray, directions: np.ndarray) -> Series:
    """Fold a positive duration series and a sign series into one series.

    The output sqrt(duration) * direction has squared magnitude equal to
    the duration and carries the direction in its sign, so the volatility
    recursions apply to it unchanged.
    """
    if isinstance(durations, Series):
        durations = durations.values
    x = np.asarray(durations, dtype=np.float64)
    s = np.asarray(directions)
    if x.ndim != 1 or s.shape != x.shape:
        raise InvalidInputError(
            f"durations and directions must be aligned 1-d arrays, got "
            f"{x.shape} and {s.shape}"
        )
    if not np.isfinite(x).all() or np.any(x <= 0):
        raise InvalidInputError("durations must be finite and strictly positive")
    sf = s.astype(np.float64)
    if not np.all(np.abs(sf) == 1.0):
        raise InvalidInputError("directions must be +1 or -1")
    return Series(np.sqrt(x) * sf)
