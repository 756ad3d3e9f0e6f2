"""Coupled one-step predictors rolled forward with prediction feedback.

A pipeline wires named subsystems, one per forecast signal. Each subsystem's
inputs reference either the current value of a signal ("NAME@k") or the
same-cycle prediction of another subsystem ("predicted(NAME)@k+1"). Every
cycle evaluates all subsystems in dependency order against the previous
cycle's state, then overwrites the state with the fresh predictions, so a
multi-day forecast never touches observed values beyond its anchor day.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .anfis import AnfisModel, forward_batch
from .data import TimeSeries
from .errors import (
    CyclicWiringError,
    DimensionMismatchError,
    InsufficientTestSpanError,
    LengthMismatchError,
    UnknownSignalError,
    ZeroDenominatorError,
    ZeroFiringError,
)
from .metrics import DENOMINATORS
from .mlp import MlpModel, mlp_forward

__all__ = [
    "InputRef",
    "SubsystemSpec",
    "PipelineSpec",
    "Pipeline",
    "RolloutResult",
    "RolloutEvaluation",
    "parse_input_ref",
    "build_pipeline",
    "rollout",
    "evaluate_rollout",
]

_CURRENT_RE = re.compile(r"^([^@()]+)(@k)?$")
_PREDICTED_RE = re.compile(r"^predicted\(([^@()]+)\)(@k\+1)?$")


@dataclass(frozen=True)
class InputRef:
    """One wired input: a signal's current value or another subsystem's prediction."""

    name: str
    predicted: bool = False

    def render(self) -> str:
        return f"predicted({self.name})@k+1" if self.predicted else f"{self.name}@k"


def parse_input_ref(text: str) -> InputRef:
    s = text.strip()
    m = _PREDICTED_RE.match(s)
    if m:
        return InputRef(m.group(1).strip(), predicted=True)
    m = _CURRENT_RE.match(s)
    if m:
        return InputRef(m.group(1).strip(), predicted=False)
    raise ValueError(
        f"cannot parse input reference {text!r}; "
        "expected 'NAME@k' or 'predicted(NAME)@k+1'"
    )


@dataclass(frozen=True)
class SubsystemSpec:
    """A predictor for signal `name`, fed by the listed references."""

    name: str
    inputs: tuple[InputRef, ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "inputs",
            tuple(r if isinstance(r, InputRef) else parse_input_ref(r) for r in self.inputs),
        )
        if not self.inputs:
            raise ValueError(f"subsystem {self.name!r} has no inputs")


@dataclass(frozen=True)
class PipelineSpec:
    subsystems: tuple[SubsystemSpec, ...]
    horizon: int = 7

    def __post_init__(self):
        object.__setattr__(self, "subsystems", tuple(self.subsystems))
        if not self.subsystems:
            raise ValueError("pipeline needs at least one subsystem")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        names = [s.name for s in self.subsystems]
        if len(set(names)) != len(names):
            raise ValueError("subsystem names must be unique")


@dataclass(frozen=True)
class Pipeline:
    """A validated spec bound to concrete models, with a fixed evaluation order."""

    spec: PipelineSpec
    models: dict
    order: tuple[int, ...]  # indices into spec.subsystems, dependency-first

    @property
    def subsystem_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.spec.subsystems)

    def current_signal_names(self) -> tuple[str, ...]:
        seen = []
        for sub in self.spec.subsystems:
            for ref in sub.inputs:
                if not ref.predicted and ref.name not in seen:
                    seen.append(ref.name)
        return tuple(seen)


def _model_arity(model) -> int:
    if isinstance(model, AnfisModel):
        return model.n_inputs
    if isinstance(model, MlpModel):
        return model.n_inputs
    raise TypeError(f"unsupported predictor type {type(model).__name__}")


def _predict_one(model, x: np.ndarray) -> float:
    if isinstance(model, AnfisModel):
        return float(forward_batch(model, x[None, :])[0])
    return mlp_forward(model, x)


def build_pipeline(spec: PipelineSpec, models: Mapping[str, object]) -> Pipeline:
    """Bind models to subsystems and fix a dependency-respecting order.

    Raises UnknownSignalError when a prediction reference names no subsystem
    or a subsystem has no model, DimensionMismatchError when a model's arity
    differs from its wiring, and CyclicWiringError when same-cycle prediction
    references form a loop.
    """
    names = {s.name: i for i, s in enumerate(spec.subsystems)}
    for sub in spec.subsystems:
        if sub.name not in models:
            raise UnknownSignalError(f"no model supplied for subsystem {sub.name!r}")
        arity = _model_arity(models[sub.name])
        if arity != len(sub.inputs):
            raise DimensionMismatchError(
                f"subsystem {sub.name!r}: model takes {arity} inputs, wiring lists {len(sub.inputs)}"
            )
        for ref in sub.inputs:
            if ref.predicted and ref.name not in names:
                raise UnknownSignalError(
                    f"subsystem {sub.name!r} references predicted({ref.name}) "
                    "but no such subsystem exists"
                )

    # Kahn's algorithm over same-cycle prediction edges, stable in spec order.
    n = len(spec.subsystems)
    deps: list[set[int]] = [set() for _ in range(n)]
    for i, sub in enumerate(spec.subsystems):
        for ref in sub.inputs:
            if ref.predicted:
                deps[i].add(names[ref.name])
    order: list[int] = []
    placed = [False] * n
    while len(order) < n:
        progressed = False
        for i in range(n):
            if not placed[i] and all(placed[j] for j in deps[i]):
                order.append(i)
                placed[i] = True
                progressed = True
        if not progressed:
            stuck = [spec.subsystems[i].name for i in range(n) if not placed[i]]
            raise CyclicWiringError(
                "same-cycle prediction references form a loop among: " + ", ".join(stuck)
            )
    return Pipeline(spec, dict(models), tuple(order))


@dataclass(frozen=True, eq=False)
class RolloutResult:
    """Predictions per cycle and subsystem, with errors when actuals are known."""

    subsystems: tuple[str, ...]
    predictions: np.ndarray              # (horizon, S)
    actuals: np.ndarray | None = None    # (horizon, S), NaN where unknown
    abs_errors: np.ndarray | None = None
    rel_errors: np.ndarray | None = None

    @property
    def horizon(self) -> int:
        return self.predictions.shape[0]

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cycle", "subsystem", "predicted", "actual", "abs_error", "rel_error"])
        for c in range(self.horizon):
            for j, name in enumerate(self.subsystems):
                row = [c + 1, name, repr(float(self.predictions[c, j]))]
                if self.actuals is not None and np.isfinite(self.actuals[c, j]):
                    row += [
                        repr(float(self.actuals[c, j])),
                        repr(float(self.abs_errors[c, j])),
                        repr(float(self.rel_errors[c, j])) if np.isfinite(self.rel_errors[c, j]) else "",
                    ]
                else:
                    row += ["", "", ""]
                w.writerow(row)
        return buf.getvalue()

    def to_wide_csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cycle", *self.subsystems])
        for c in range(self.horizon):
            w.writerow([c + 1, *(repr(float(v)) for v in self.predictions[c])])
        return buf.getvalue()


def rollout(
    pipeline: Pipeline,
    initial: Mapping[str, float],
    horizon: int | None = None,
    actuals: Mapping[str, Sequence[float]] | None = None,
    rel_denominator: str = "predicted",
) -> RolloutResult:
    """Run the feedback loop from one observed state.

    `initial` must contain every signal consumed as a current value. When
    `actuals` supplies future observations per subsystem, absolute and
    relative errors are attached (relative to the prediction or the actual
    per `rel_denominator`; a zero denominator leaves that cell undefined).
    """
    if rel_denominator not in DENOMINATORS:
        raise ValueError(f"rel_denominator must be one of {DENOMINATORS}")
    h = pipeline.spec.horizon if horizon is None else horizon
    if h < 1:
        raise ValueError("horizon must be at least 1")
    state: dict[str, float] = {}
    for name in pipeline.current_signal_names():
        if name not in initial:
            raise UnknownSignalError(f"initial state is missing signal {name!r}")
        state[name] = float(initial[name])

    names = pipeline.subsystem_names
    preds = np.empty((h, len(names)))
    for cycle in range(h):
        fresh: dict[str, float] = {}
        for idx in pipeline.order:
            sub = pipeline.spec.subsystems[idx]
            x = np.array(
                [fresh[r.name] if r.predicted else state[r.name] for r in sub.inputs]
            )
            try:
                fresh[sub.name] = _predict_one(pipeline.models[sub.name], x)
            except ZeroFiringError as exc:
                raise ZeroFiringError(
                    f"cycle {cycle + 1}, subsystem {sub.name!r}: {exc}"
                ) from exc
        for j, name in enumerate(names):
            preds[cycle, j] = fresh[name]
        state.update(fresh)

    if actuals is None:
        return RolloutResult(names, preds)
    act = np.full((h, len(names)), np.nan)
    for j, name in enumerate(names):
        if name in actuals:
            vals = np.asarray(actuals[name], dtype=np.float64)
            if vals.shape[0] < h:
                raise LengthMismatchError(
                    f"actuals for {name!r} cover {vals.shape[0]} cycles, horizon is {h}"
                )
            act[:, j] = vals[:h]
    abs_err = np.abs(act - preds)
    den = preds if rel_denominator == "predicted" else act
    with np.errstate(divide="ignore", invalid="ignore"):
        rel_err = np.where(den != 0, abs_err / np.abs(den), np.nan)
    return RolloutResult(names, preds, act, abs_err, rel_err)


@dataclass(frozen=True, eq=False)
class RolloutEvaluation:
    """Per-step aggregate errors over every possible anchor day."""

    subsystems: tuple[str, ...]
    rmse: np.ndarray   # (horizon, S)
    rmsre: np.ndarray  # (horizon, S)
    n_anchors: int
    rel_denominator: str


def evaluate_rollout(
    pipeline: Pipeline,
    series: Mapping[str, TimeSeries],
    horizon: int | None = None,
    rel_denominator: str = "predicted",
) -> RolloutEvaluation:
    """Aggregate forecast error per step, anchoring a rollout at every day.

    Every day that leaves `horizon` future days inside the span serves as an
    anchor; predictions at step s are compared against the observations s days
    later. All series must share one calendar and must cover at least
    horizon + 1 days.
    """
    if rel_denominator not in DENOMINATORS:
        raise ValueError(f"rel_denominator must be one of {DENOMINATORS}")
    h = pipeline.spec.horizon if horizon is None else horizon
    if h < 1:
        raise ValueError("horizon must be at least 1")
    needed = set(pipeline.current_signal_names()) | set(pipeline.subsystem_names)
    calendars = set()
    for name in sorted(needed):
        if name not in series:
            raise UnknownSignalError(f"evaluation series for {name!r} not supplied")
        calendars.add(series[name].dates)
    if len(calendars) > 1:
        raise LengthMismatchError("evaluation series are not on one calendar; align them first")
    length = len(next(iter(calendars)))
    if length < h + 1:
        raise InsufficientTestSpanError(
            f"need at least {h + 1} aligned days to score a horizon of {h}, got {length}"
        )
    n_anchors = length - h
    names = pipeline.subsystem_names
    sq = np.zeros((h, len(names)))
    sq_rel = np.zeros((h, len(names)))
    for a in range(n_anchors):
        initial = {name: series[name].values[a] for name in pipeline.current_signal_names()}
        result = rollout(pipeline, initial, horizon=h)
        for j, name in enumerate(names):
            actual = series[name].values[a + 1 : a + h + 1]
            pred = result.predictions[:, j]
            err = actual - pred
            den = pred if rel_denominator == "predicted" else actual
            zero = np.flatnonzero(den == 0.0)
            if zero.size:
                raise ZeroDenominatorError(int(zero[0]), which=rel_denominator)
            sq[:, j] += err**2
            sq_rel[:, j] += (err / den) ** 2
    return RolloutEvaluation(
        names,
        np.sqrt(sq / n_anchors),
        np.sqrt(sq_rel / n_anchors),
        n_anchors,
        rel_denominator,
    )
