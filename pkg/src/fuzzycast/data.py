"""Daily-candle CSV loading, calendar alignment, and supervised-set assembly.

Input files are plain comma-separated text with a header row, ISO dates
(YYYY-MM-DD) and one numeric value column per signal. Loading fails fast on
the first defective row instead of silently dropping data. Signals recorded
on different calendars are combined by date intersection only; nothing is
ever interpolated or forward-filled.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSplitError,
    EmptyIntersectionError,
    InvalidSeriesError,
    LengthMismatchError,
    MissingColumnError,
    MissingFileError,
    TooShortError,
    UnparseableRowError,
)

__all__ = [
    "TimeSeries",
    "SupervisedSet",
    "MinMaxStats",
    "load_candles",
    "align",
    "lead",
    "make_supervised",
    "split_chronological",
    "minmax_stats",
    "supervised_csv",
]


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A named daily signal: strictly increasing dates with finite values."""

    name: str
    dates: tuple[date, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1:
            raise InvalidSeriesError(f"series {self.name!r}: values must be one-dimensional")
        if len(self.dates) != vals.shape[0]:
            raise InvalidSeriesError(f"series {self.name!r}: {len(self.dates)} dates vs {vals.shape[0]} values")
        if vals.shape[0] < 1:
            raise InvalidSeriesError(f"series {self.name!r} is empty")
        if not np.all(np.isfinite(vals)):
            raise InvalidSeriesError(f"series {self.name!r} contains non-finite values")
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise InvalidSeriesError(
                    f"series {self.name!r}: dates not strictly increasing at {b.isoformat()}"
                )

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True, eq=False)
class SupervisedSet:
    """One-step-ahead regression rows: inputs at day k, target at day k+1."""

    input_names: tuple[str, ...]
    inputs: np.ndarray   # (N, d)
    targets: np.ndarray  # (N,)
    dates: tuple[date, ...]  # date of day k for each row
    target_name: str = "target"

    def __post_init__(self):
        object.__setattr__(self, "input_names", tuple(self.input_names))
        object.__setattr__(self, "dates", tuple(self.dates))
        X = np.asarray(self.inputs, dtype=np.float64)
        t = np.asarray(self.targets, dtype=np.float64)
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "targets", t)
        if X.ndim != 2:
            raise InvalidSeriesError("inputs must be a 2-d matrix")
        n, d = X.shape
        if n < 1 or d < 1:
            raise InvalidSeriesError("supervised set needs at least one row and one input")
        if t.shape != (n,):
            raise LengthMismatchError(f"{n} input rows vs {t.shape} targets")
        if len(self.dates) != n:
            raise LengthMismatchError(f"{n} input rows vs {len(self.dates)} dates")
        if len(self.input_names) != d:
            raise LengthMismatchError(f"{d} input columns vs {len(self.input_names)} names")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(t))):
            raise InvalidSeriesError("supervised set contains non-finite values")
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise InvalidSeriesError("supervised rows are not in chronological order")

    @property
    def n_rows(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    def rows(self, start: int, stop: int) -> "SupervisedSet":
        return SupervisedSet(
            self.input_names,
            self.inputs[start:stop],
            self.targets[start:stop],
            self.dates[start:stop],
            self.target_name,
        )


@dataclass(frozen=True)
class MinMaxStats:
    input_min: np.ndarray
    input_max: np.ndarray
    target_min: float
    target_max: float

    def input_ranges(self) -> np.ndarray:
        return self.input_max - self.input_min


def load_candles(path, date_column: str, value_column: str, name: str | None = None) -> TimeSeries:
    """Read one signal from a CSV file and return it sorted by date.

    Raises MissingFileError, MissingColumnError, or UnparseableRowError with
    the physical line number of the first defective row.
    """
    p = Path(path)
    if not p.is_file():
        raise MissingFileError(f"no such data file: {p}")
    with p.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise MissingColumnError(date_column) from None
        for col in (date_column, value_column):
            if col not in header:
                raise MissingColumnError(col)
        di = header.index(date_column)
        vi = header.index(value_column)
        parsed: list[tuple[date, float]] = []
        seen: set[date] = set()
        for row in reader:
            line_no = reader.line_num
            if not row:
                raise UnparseableRowError(line_no, "blank line")
            if max(di, vi) >= len(row):
                raise UnparseableRowError(line_no, "row has too few fields")
            ds = row[di].strip()
            vs = row[vi].strip()
            try:
                day = datetime.strptime(ds, "%Y-%m-%d").date()
            except ValueError:
                raise UnparseableRowError(line_no, f"bad date {ds!r}") from None
            try:
                value = float(vs)
            except ValueError:
                raise UnparseableRowError(line_no, f"bad value {vs!r}") from None
            if not math.isfinite(value):
                raise UnparseableRowError(line_no, f"non-finite value {vs!r}")
            if day in seen:
                raise UnparseableRowError(line_no, f"duplicate date {ds}")
            seen.add(day)
            parsed.append((day, value))
    if not parsed:
        raise TooShortError(f"{p}: no data rows")
    parsed.sort(key=lambda r: r[0])
    return TimeSeries(
        name if name is not None else p.stem,
        tuple(d for d, _ in parsed),
        np.array([v for _, v in parsed]),
    )


def align(series: Sequence[TimeSeries]) -> list[TimeSeries]:
    """Restrict every series to the dates they all share.

    Order inside each series and the order of the series themselves are
    preserved. Raises EmptyIntersectionError when no date is common.
    """
    if not series:
        raise ValueError("align requires at least one series")
    common = set(series[0].dates)
    for s in series[1:]:
        common &= set(s.dates)
    if not common:
        names = ", ".join(s.name for s in series)
        raise EmptyIntersectionError(f"series share no dates: {names}")
    out = []
    for s in series:
        idx = np.array([i for i, d in enumerate(s.dates) if d in common], dtype=int)
        out.append(TimeSeries(s.name, tuple(s.dates[i] for i in idx), s.values[idx]))
    return out


def lead(series: TimeSeries, name: str | None = None) -> TimeSeries:
    """Shift a signal one day into the past: value at day k becomes the day k+1 reading.

    Used to expose tomorrow's value of a companion signal as a training input;
    at forecast time the same slot is fed by that signal's own predictor.
    """
    if len(series) < 2:
        raise TooShortError(f"series {series.name!r} too short to shift")
    return TimeSeries(name if name is not None else f"{series.name}(k+1)",
                      series.dates[:-1], series.values[1:])


def make_supervised(inputs: Sequence[TimeSeries], target: TimeSeries) -> SupervisedSet:
    """Build one-step-ahead rows: inputs at day k, target value at day k+1.

    All series must already be on an identical calendar (run align first).
    """
    if not inputs:
        raise ValueError("make_supervised requires at least one input series")
    for s in inputs:
        if s.dates != target.dates:
            raise LengthMismatchError(
                f"series {s.name!r} and {target.name!r} are not on the same calendar; align them first"
            )
    if len(target) < 2:
        raise TooShortError(f"need at least 2 aligned days, got {len(target)}")
    X = np.column_stack([s.values[:-1] for s in inputs])
    t = target.values[1:]
    return SupervisedSet(
        tuple(s.name for s in inputs), X, t, target.dates[:-1], target.name
    )


def split_chronological(sset: SupervisedSet, train_fraction: float) -> tuple[SupervisedSet, SupervisedSet]:
    """Split rows by time: first floor(fraction * N) rows train, the rest test."""
    if not (0.0 < train_fraction < 1.0):
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = sset.n_rows
    n_train = int(math.floor(train_fraction * n))
    if n_train < 1 or n_train >= n:
        raise DegenerateSplitError(
            f"fraction {train_fraction} of {n} rows leaves {n_train} train / {n - n_train} test"
        )
    return sset.rows(0, n_train), sset.rows(n_train, n)


def minmax_stats(sset: SupervisedSet) -> MinMaxStats:
    return MinMaxStats(
        sset.inputs.min(axis=0),
        sset.inputs.max(axis=0),
        float(sset.targets.min()),
        float(sset.targets.max()),
    )


def supervised_csv(sset: SupervisedSet) -> str:
    """Render a supervised set as CSV text: date,<input names...>,<target name>."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", *sset.input_names, sset.target_name])
    for i in range(sset.n_rows):
        writer.writerow(
            [sset.dates[i].isoformat()]
            + [repr(float(v)) for v in sset.inputs[i]]
            + [repr(float(sset.targets[i]))]
        )
    return buf.getvalue()
