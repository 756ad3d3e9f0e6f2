"""Sugeno-type fuzzy inference: model representation and the layered forward pass.

A model holds one pool of Gaussian membership functions per input dimension
and a list of rules. Each rule selects one membership function per dimension
(its antecedent, stored as pool indices) and carries an affine consequent
[p_1 .. p_d, r]. Evaluating an input x runs five stages:

    membership   m      = exp(-(x - center)^2 / (2 sigma^2))
    firing       w_i    = prod_d m_{i,d}(x_d)          (product AND)
    normalizing  wbar_i = w_i / sum_j w_j
    consequent   f_i    = p_i . x + r_i
    output       yhat   = sum_i wbar_i f_i             (weighted average)

The output is therefore a convex combination of the rule consequents; a
one-rule model collapses to a plain affine function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, ZeroFiringError

__all__ = [
    "FIRING_FLOOR",
    "SIGMA_RANGE_FLOOR",
    "GaussianMf",
    "Rule",
    "AnfisModel",
    "ForwardTrace",
    "mf_eval",
    "fire_rules",
    "normalize",
    "rule_output",
    "forward",
    "forward_batch",
    "firing_matrix",
    "hard_assignments",
    "sigma_floors",
]

# Total firing strength below this is treated as numerically zero.
FIRING_FLOOR = 1e-300

# Minimum sigma, expressed as a fraction of the input range it covers.
SIGMA_RANGE_FLOOR = 1e-9

# Absolute fallback floor for dimensions whose range is zero.
SIGMA_ABS_FLOOR = 1e-12


@dataclass(frozen=True)
class GaussianMf:
    """Gaussian membership function with peak value 1 at its center."""

    center: float
    sigma: float

    def __post_init__(self):
        if not np.isfinite(self.center):
            raise ValueError(f"center must be finite, got {self.center}")
        if not (np.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be a finite positive number, got {self.sigma}")


def mf_eval(mf: GaussianMf, x):
    """Membership degree of x; accepts a scalar or an array."""
    z = (np.asarray(x, dtype=np.float64) - mf.center) / mf.sigma
    out = np.exp(-0.5 * z * z)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class Rule:
    """One fuzzy rule: per-dimension membership indices plus an affine consequent."""

    antecedent: tuple[int, ...]
    consequent: np.ndarray  # length d+1: [p_1 .. p_d, r]

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(int(i) for i in self.antecedent))
        cons = np.array(self.consequent, dtype=np.float64)
        object.__setattr__(self, "consequent", cons)
        if cons.ndim != 1:
            raise ValueError("consequent must be a flat coefficient vector")
        if len(cons) != len(self.antecedent) + 1:
            raise DimensionMismatchError(
                f"consequent length {len(cons)} does not match {len(self.antecedent)} inputs + 1"
            )
        if not np.all(np.isfinite(cons)):
            raise ValueError("consequent coefficients must be finite")


@dataclass(frozen=True, eq=False)
class AnfisModel:
    """Immutable Sugeno model: per-dimension membership pools plus rules.

    metadata carries provenance (induction settings, training settings, data
    fingerprints); it never influences evaluation.
    """

    input_names: tuple[str, ...]
    mf_pools: tuple[tuple[GaussianMf, ...], ...]
    rules: tuple[Rule, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "input_names", tuple(self.input_names))
        object.__setattr__(self, "mf_pools", tuple(tuple(pool) for pool in self.mf_pools))
        object.__setattr__(self, "rules", tuple(self.rules))
        d = len(self.input_names)
        if d < 1:
            raise DimensionMismatchError("model needs at least one input")
        if len(self.mf_pools) != d:
            raise DimensionMismatchError(
                f"{len(self.mf_pools)} membership pools for {d} inputs"
            )
        for dim, pool in enumerate(self.mf_pools):
            if not pool:
                raise DimensionMismatchError(f"input {dim} has an empty membership pool")
        if not self.rules:
            raise DimensionMismatchError("model needs at least one rule")
        for k, rule in enumerate(self.rules):
            if len(rule.antecedent) != d:
                raise DimensionMismatchError(
                    f"rule {k} has {len(rule.antecedent)} antecedent entries for {d} inputs"
                )
            for dim, idx in enumerate(rule.antecedent):
                if not (0 <= idx < len(self.mf_pools[dim])):
                    raise DimensionMismatchError(
                        f"rule {k} references membership {idx} of input {dim} "
                        f"(pool size {len(self.mf_pools[dim])})"
                    )

    @property
    def n_inputs(self) -> int:
        return len(self.input_names)

    @property
    def n_rules(self) -> int:
        return len(self.rules)

    def with_rules(self, rules: Sequence[Rule]) -> "AnfisModel":
        return replace(self, rules=tuple(rules))

    def with_pools(self, mf_pools) -> "AnfisModel":
        return replace(self, mf_pools=tuple(tuple(p) for p in mf_pools))

    def with_metadata(self, **extra) -> "AnfisModel":
        merged = dict(self.metadata)
        merged.update(extra)
        return replace(self, metadata=merged)


@dataclass(frozen=True, eq=False)
class ForwardTrace:
    """Per-stage intermediate values of one forward evaluation."""

    memberships: tuple[np.ndarray, ...]  # per dimension: degree of every pool entry
    firing: np.ndarray                   # (R,) rule firing strengths
    normalized: np.ndarray               # (R,) firing strengths scaled to sum 1
    rule_outputs: np.ndarray             # (R,) affine consequent values
    weighted_outputs: np.ndarray         # (R,) normalized * rule_outputs
    output: float


def _pool_arrays(model: AnfisModel) -> list[tuple[np.ndarray, np.ndarray]]:
    return [
        (
            np.array([mf.center for mf in pool]),
            np.array([mf.sigma for mf in pool]),
        )
        for pool in model.mf_pools
    ]


def _antecedents(model: AnfisModel) -> np.ndarray:
    return np.array([rule.antecedent for rule in model.rules], dtype=np.intp)


def _consequents(model: AnfisModel) -> np.ndarray:
    return np.array([rule.consequent for rule in model.rules])


def _check_vector(model: AnfisModel, x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.shape != (model.n_inputs,):
        raise DimensionMismatchError(
            f"input has shape {v.shape}, model expects ({model.n_inputs},)"
        )
    return v


def _memberships_at(model: AnfisModel, x: np.ndarray) -> list[np.ndarray]:
    out = []
    for dim, (centers, sigmas) in enumerate(_pool_arrays(model)):
        z = (x[dim] - centers) / sigmas
        out.append(np.exp(-0.5 * z * z))
    return out


def fire_rules(model: AnfisModel, x) -> np.ndarray:
    """Rule firing strengths at x: per-rule product of membership degrees."""
    v = _check_vector(model, x)
    degrees = _memberships_at(model, v)
    ant = _antecedents(model)
    w = np.ones(model.n_rules)
    for dim in range(model.n_inputs):
        w = w * degrees[dim][ant[:, dim]]
    return w


def normalize(w) -> np.ndarray:
    """Scale nonnegative firing strengths to sum to one."""
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise DimensionMismatchError("firing vector must be one-dimensional and non-empty")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("firing strengths must be finite and nonnegative")
    s = float(w.sum())
    if s < FIRING_FLOOR:
        raise ZeroFiringError(f"total firing strength {s} is below {FIRING_FLOOR}")
    return w / s


def rule_output(rule: Rule, x) -> float:
    """Affine consequent value p . x + r."""
    v = np.asarray(x, dtype=np.float64)
    if v.shape != (len(rule.antecedent),):
        raise DimensionMismatchError(
            f"input has shape {v.shape}, rule expects ({len(rule.antecedent)},)"
        )
    return float(rule.consequent[:-1] @ v + rule.consequent[-1])


def forward(model: AnfisModel, x) -> tuple[float, ForwardTrace]:
    """Evaluate one input vector and return the prediction with its trace."""
    v = _check_vector(model, x)
    degrees = _memberships_at(model, v)
    ant = _antecedents(model)
    w = np.ones(model.n_rules)
    for dim in range(model.n_inputs):
        w = w * degrees[dim][ant[:, dim]]
    wbar = normalize(w)
    cons = _consequents(model)
    f = cons[:, :-1] @ v + cons[:, -1]
    weighted = wbar * f
    y = float(weighted.sum())
    trace = ForwardTrace(tuple(degrees), w, wbar, f, weighted, y)
    return y, trace


def firing_matrix(model: AnfisModel, X: np.ndarray) -> np.ndarray:
    """Firing strengths for a batch: (N, R). X must be (N, d)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise DimensionMismatchError(
            f"batch has shape {X.shape}, model expects (N, {model.n_inputs})"
        )
    ant = _antecedents(model)
    W = np.ones((X.shape[0], model.n_rules))
    for dim, (centers, sigmas) in enumerate(_pool_arrays(model)):
        z = (X[:, dim : dim + 1] - centers[None, :]) / sigmas[None, :]
        M = np.exp(-0.5 * z * z)  # (N, pool size)
        W *= M[:, ant[:, dim]]
    return W


def forward_batch(model: AnfisModel, X) -> np.ndarray:
    """Predictions for a whole batch; an empty batch yields an empty vector."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise DimensionMismatchError(
            f"batch has shape {X.shape}, model expects (N, {model.n_inputs})"
        )
    if X.shape[0] == 0:
        return np.empty(0)
    W = firing_matrix(model, X)
    S = W.sum(axis=1)
    bad = np.flatnonzero(S < FIRING_FLOOR)
    if bad.size:
        raise ZeroFiringError(
            f"total firing strength below {FIRING_FLOOR} at batch row {bad[0]}"
        )
    Wbar = W / S[:, None]
    cons = _consequents(model)
    F = X @ cons[:, :-1].T + cons[:, -1][None, :]
    return (Wbar * F).sum(axis=1)


def hard_assignments(model: AnfisModel, X) -> np.ndarray:
    """Index of the strongest-firing rule per batch row (ties: lowest index)."""
    W = firing_matrix(model, np.asarray(X, dtype=np.float64))
    return W.argmax(axis=1)


def sigma_floors(input_ranges) -> np.ndarray:
    """Per-dimension lower bounds for sigma given the span of each input."""
    r = np.asarray(input_ranges, dtype=np.float64)
    return np.maximum(SIGMA_RANGE_FLOOR * r, SIGMA_ABS_FLOOR)
