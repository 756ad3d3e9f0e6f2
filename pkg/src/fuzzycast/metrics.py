"""Forecast accuracy measures and tabular evaluation reports.

Two measures are used everywhere:

    rmse  = sqrt(mean((d_i - z_i)^2))
    rmsre = sqrt(mean(((d_i - z_i) / den_i)^2))

where d is the actual value and z the prediction. The relative measure
divides by the prediction by default; dividing by the actual value is
available behind the ``denominator`` flag, and every report records which
convention produced its numbers.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyRecordError, LengthMismatchError, ZeroDenominatorError

__all__ = [
    "DENOMINATORS",
    "PredictionRecord",
    "rmse",
    "rmsre",
    "EvalRow",
    "StepErrorRow",
    "EvalReport",
]

DENOMINATORS = ("predicted", "actual")


def _paired(actual, predicted) -> tuple[np.ndarray, np.ndarray]:
    d = np.asarray(actual, dtype=np.float64)
    z = np.asarray(predicted, dtype=np.float64)
    if d.ndim != 1 or z.ndim != 1:
        raise LengthMismatchError("actual and predicted must be flat vectors")
    if d.shape != z.shape:
        raise LengthMismatchError(f"{d.shape[0]} actual values vs {z.shape[0]} predictions")
    if d.size == 0:
        raise EmptyRecordError("no samples to score")
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(z))):
        raise ValueError("actual and predicted values must be finite")
    return d, z


def rmse(actual, predicted) -> float:
    """Root mean squared error."""
    d, z = _paired(actual, predicted)
    return float(np.sqrt(np.mean((d - z) ** 2)))


def rmsre(actual, predicted, denominator: str = "predicted") -> float:
    """Root mean squared relative error.

    denominator selects what each residual is divided by: the prediction
    (default) or the actual value. A zero denominator raises
    ZeroDenominatorError with the offending sample index.
    """
    if denominator not in DENOMINATORS:
        raise ValueError(f"denominator must be one of {DENOMINATORS}, got {denominator!r}")
    d, z = _paired(actual, predicted)
    den = z if denominator == "predicted" else d
    zero = np.flatnonzero(den == 0.0)
    if zero.size:
        raise ZeroDenominatorError(int(zero[0]), which=denominator)
    return float(np.sqrt(np.mean(((d - z) / den) ** 2)))


@dataclass(frozen=True, eq=False)
class PredictionRecord:
    """A matched pair of actual and predicted vectors."""

    actual: np.ndarray
    predicted: np.ndarray

    def __post_init__(self):
        d, z = _paired(self.actual, self.predicted)
        object.__setattr__(self, "actual", d)
        object.__setattr__(self, "predicted", z)

    def __len__(self) -> int:
        return self.actual.shape[0]

    def rmse(self) -> float:
        return rmse(self.actual, self.predicted)

    def rmsre(self, denominator: str = "predicted") -> float:
        return rmsre(self.actual, self.predicted, denominator)


@dataclass(frozen=True)
class EvalRow:
    """One model configuration scored on both splits."""

    target: str
    input_label: str
    clustering: str
    trainer: str
    rmse_train: float
    rmse_test: float
    rmsre_train: float
    rmsre_test: float


@dataclass(frozen=True)
class StepErrorRow:
    """Aggregate error of forecast step `step` for one subsystem."""

    subsystem: str
    step: int
    rmse: float
    rmsre: float


@dataclass
class EvalReport:
    """Evaluation table plus, optionally, per-forecast-step aggregates."""

    rows: list[EvalRow] = field(default_factory=list)
    step_rows: list[StepErrorRow] = field(default_factory=list)
    rmsre_denominator: str = "predicted"

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(
            ["target", "inputs", "clustering", "trainer",
             "rmse_train", "rmse_test", "rmsre_train", "rmsre_test",
             "rmsre_denominator"]
        )
        for r in self.rows:
            w.writerow(
                [r.target, r.input_label, r.clustering, r.trainer,
                 repr(r.rmse_train), repr(r.rmse_test),
                 repr(r.rmsre_train), repr(r.rmsre_test),
                 self.rmsre_denominator]
            )
        return buf.getvalue()

    def steps_csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["subsystem", "step", "rmse", "rmsre", "rmsre_denominator"])
        for r in self.step_rows:
            w.writerow([r.subsystem, r.step, repr(r.rmse), repr(r.rmsre), self.rmsre_denominator])
        return buf.getvalue()

    def format_table(self) -> str:
        """Human-readable rendering of the evaluation rows."""
        header = ("target", "inputs", "clustering", "trainer",
                  "rmse(train)", "rmse(test)", "rmsre(train)", "rmsre(test)")
        body = [
            (r.target, r.input_label, r.clustering, r.trainer,
             f"{r.rmse_train:.6g}", f"{r.rmse_test:.6g}",
             f"{r.rmsre_train:.6g}", f"{r.rmsre_test:.6g}")
            for r in self.rows
        ]
        widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h)
                  for i, h in enumerate(header)]
        lines = [
            "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)),
            "  ".join("-" * w for w in widths),
        ]
        for row in body:
            lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
        lines.append("")
        lines.append(f"relative errors divide by the {self.rmsre_denominator} value")
        if self.step_rows:
            lines.append("")
            lines.append("forecast-step aggregates:")
            lines.append("subsystem  step  rmse          rmsre")
            for r in self.step_rows:
                lines.append(f"{r.subsystem:<9}  {r.step:>4}  {r.rmse:<12.6g}  {r.rmsre:.6g}")
        return "\n".join(lines) + "\n"
