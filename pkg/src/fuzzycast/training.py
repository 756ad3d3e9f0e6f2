"""Parameter fitting for Sugeno models.

Two trainers share the same reporting and stopping contract:

* hybrid: each epoch solves the consequents exactly by linear least squares
  (the output is linear in them once firing strengths are fixed), then takes
  one gradient step on the membership parameters.
* backprop: each epoch takes one gradient step on all parameters at once.

Both use the classic adaptive step length: the update moves a fixed distance
along the negative gradient direction; that distance grows 10% after four
consecutive epoch-error drops and shrinks 10% after an increase/decrease flip
within two epochs. The loss is the batch sum of squared errors; reports quote
RMSE. The best epoch's model is returned, never merely the last one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .anfis import (
    FIRING_FLOOR,
    AnfisModel,
    GaussianMf,
    Rule,
    firing_matrix,
    forward_batch,
    sigma_floors,
)
from .data import SupervisedSet
from .errors import SingularSystemError, ZeroFiringError

__all__ = [
    "STEP_UNDERFLOW",
    "TrainConfig",
    "TrainReport",
    "lse_consequents",
    "premise_gradient",
    "full_gradient",
    "numeric_gradient",
    "finite_diff_check",
    "pack_parameters",
    "unpack_parameters",
    "train_hybrid",
    "train_backprop",
    "train_model",
]

TRAINERS = ("hybrid", "backprop")

# An adapted step length below this stops training.
STEP_UNDERFLOW = 1e-15


@dataclass(frozen=True)
class TrainConfig:
    method: str = "hybrid"
    epochs: int = 100
    error_goal: float = 0.0
    initial_step: float = 0.01
    step_increase: float = 1.1
    step_decrease: float = 0.9
    lse_ridge: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.method not in TRAINERS:
            raise ValueError(f"method must be one of {TRAINERS}, got {self.method!r}")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.error_goal < 0:
            raise ValueError("error_goal must be nonnegative")
        if not (self.initial_step > 0):
            raise ValueError("initial_step must be positive")
        if not (self.step_increase >= 1.0):
            raise ValueError("step_increase must be at least 1")
        if not (0.0 < self.step_decrease <= 1.0):
            raise ValueError("step_decrease must lie in (0, 1]")
        if self.lse_ridge < 0:
            raise ValueError("lse_ridge must be nonnegative")


@dataclass
class TrainReport:
    """Per-epoch error trace plus why training stopped."""

    epoch_rmse: list[float]
    steps: list[float]
    stop_reason: str  # epochs_exhausted | error_goal_met | step_underflow

    @property
    def epochs_run(self) -> int:
        return len(self.epoch_rmse)

    def to_csv_text(self) -> str:
        lines = ["epoch,rmse,step"]
        for i, (r, s) in enumerate(zip(self.epoch_rmse, self.steps), start=1):
            lines.append(f"{i},{r!r},{s!r}")
        return "\n".join(lines) + "\n"


def _batch_arrays(batch) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(batch, SupervisedSet):
        X, t = batch.inputs, batch.targets
    else:
        X, t = batch
        X = np.asarray(X, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
    if X.ndim != 2 or t.ndim != 1 or X.shape[0] != t.shape[0]:
        raise ValueError(f"batch shapes do not match: inputs {X.shape}, targets {t.shape}")
    if X.shape[0] < 1:
        raise ValueError("batch is empty")
    return X, t


def _forward_parts(model: AnfisModel, X: np.ndarray):
    W = firing_matrix(model, X)
    S = W.sum(axis=1)
    bad = np.flatnonzero(S < FIRING_FLOOR)
    if bad.size:
        raise ZeroFiringError(
            f"total firing strength below {FIRING_FLOOR} at batch row {bad[0]}"
        )
    Wbar = W / S[:, None]
    cons = np.array([r.consequent for r in model.rules])
    F = X @ cons[:, :-1].T + cons[:, -1][None, :]
    yhat = (Wbar * F).sum(axis=1)
    return W, S, Wbar, F, yhat


# --- parameter packing -------------------------------------------------------
#
# The flat layout is: for every input dimension, for every membership in its
# pool, (center, sigma); then every rule's consequent row [p_1..p_d, r].


def _premise_vector(model: AnfisModel) -> np.ndarray:
    parts = []
    for pool in model.mf_pools:
        for mf in pool:
            parts.extend((mf.center, mf.sigma))
    return np.array(parts)


def _premise_floor_vector(model: AnfisModel, floors: np.ndarray) -> np.ndarray:
    """Sigma floor aligned with the premise layout (center slots get -inf)."""
    parts = []
    for dim, pool in enumerate(model.mf_pools):
        for _ in pool:
            parts.extend((-np.inf, floors[dim]))
    return np.array(parts)


def _set_premises(model: AnfisModel, vec: np.ndarray, floors: np.ndarray | None) -> AnfisModel:
    pools = []
    k = 0
    for dim, pool in enumerate(model.mf_pools):
        new_pool = []
        for _ in pool:
            center, sigma = vec[k], vec[k + 1]
            if floors is not None:
                sigma = max(sigma, floors[dim])
            new_pool.append(GaussianMf(float(center), float(sigma)))
            k += 2
        pools.append(tuple(new_pool))
    return model.with_pools(pools)


def _consequent_vector(model: AnfisModel) -> np.ndarray:
    return np.concatenate([r.consequent for r in model.rules])


def _set_consequents(model: AnfisModel, vec: np.ndarray) -> AnfisModel:
    width = model.n_inputs + 1
    rules = [
        Rule(r.antecedent, vec[i * width : (i + 1) * width])
        for i, r in enumerate(model.rules)
    ]
    return model.with_rules(rules)


def pack_parameters(model: AnfisModel) -> np.ndarray:
    return np.concatenate([_premise_vector(model), _consequent_vector(model)])


def unpack_parameters(model: AnfisModel, theta: np.ndarray, floors: np.ndarray | None = None) -> AnfisModel:
    n_prem = sum(2 * len(pool) for pool in model.mf_pools)
    out = _set_premises(model, theta[:n_prem], floors)
    return _set_consequents(out, theta[n_prem:])


# --- least squares -----------------------------------------------------------


def lse_consequents(model: AnfisModel, batch, ridge: float = 0.0) -> AnfisModel:
    """Globally optimal consequents for fixed memberships.

    Solves min ||A theta - t||^2 (+ ridge ||theta||^2) where column blocks of
    A are the normalized firing strengths times [x, 1]. The system is solved
    through an orthogonal factorization rather than normal equations. With
    ridge = 0 a rank-deficient system raises SingularSystemError instead of
    silently picking one of the solutions.
    """
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    X, t = _batch_arrays(batch)
    _, _, Wbar, _, _ = _forward_parts(model, X)
    n, d = X.shape
    X1 = np.column_stack([X, np.ones(n)])
    A = (Wbar[:, :, None] * X1[:, None, :]).reshape(n, model.n_rules * (d + 1))
    p = A.shape[1]
    if ridge > 0:
        A_aug = np.vstack([A, math.sqrt(ridge) * np.eye(p)])
        t_aug = np.concatenate([t, np.zeros(p)])
        theta, _, _, _ = np.linalg.lstsq(A_aug, t_aug, rcond=None)
    else:
        theta, _, rank, _ = np.linalg.lstsq(A, t, rcond=None)
        if rank < p:
            raise SingularSystemError(
                f"design matrix rank {rank} < {p} coefficients; "
                "use a ridge or provide more data"
            )
    return _set_consequents(model, theta)


# --- analytic gradients ------------------------------------------------------


def premise_gradient(model: AnfisModel, batch) -> np.ndarray:
    """Gradient of the summed squared error with respect to centers and sigmas.

    Derivation: yhat = sum_i wbar_i f_i gives d yhat / d w_i = (f_i - yhat) / S
    with S the total firing; a rule's firing depends on membership (dim, k)
    through w_i * (x - c) / sigma^2 for the center and w_i * (x - c)^2 / sigma^3
    for the width. Entries follow the premise packing order.
    """
    X, t = _batch_arrays(batch)
    W, S, _, F, yhat = _forward_parts(model, X)
    resid = yhat - t
    T = (2.0 * resid / S)[:, None] * (F - yhat[:, None]) * W  # (N, R)
    ant = np.array([r.antecedent for r in model.rules], dtype=np.intp)
    grads = []
    for dim, pool in enumerate(model.mf_pools):
        p_d = len(pool)
        acc = np.zeros((p_d, X.shape[0]))
        np.add.at(acc, ant[:, dim], T.T)
        centers = np.array([mf.center for mf in pool])
        sigmas = np.array([mf.sigma for mf in pool])
        dev = X[:, dim][None, :] - centers[:, None]  # (p_d, N)
        gc = (acc * dev).sum(axis=1) / sigmas**2
        gs = (acc * dev**2).sum(axis=1) / sigmas**3
        out = np.empty(2 * p_d)
        out[0::2] = gc
        out[1::2] = gs
        grads.append(out)
    return np.concatenate(grads)


def full_gradient(model: AnfisModel, batch) -> np.ndarray:
    """Premise gradient followed by the consequent gradient 2 sum resid * wbar * [x, 1]."""
    X, t = _batch_arrays(batch)
    _, _, Wbar, _, yhat = _forward_parts(model, X)
    resid = yhat - t
    X1 = np.column_stack([X, np.ones(X.shape[0])])
    cons_grad = ((2.0 * resid)[:, None] * Wbar).T @ X1  # (R, d+1)
    return np.concatenate([premise_gradient(model, (X, t)), cons_grad.ravel()])


def _packed_sse(model: AnfisModel, X: np.ndarray, t: np.ndarray):
    """Return a fast SSE-of-packed-parameters evaluator for finite differencing."""
    pool_sizes = [len(pool) for pool in model.mf_pools]
    ant = np.array([r.antecedent for r in model.rules], dtype=np.intp)
    d = model.n_inputs
    n_prem = 2 * sum(pool_sizes)
    X1 = np.column_stack([X, np.ones(X.shape[0])])

    def sse(theta: np.ndarray) -> float:
        W = np.ones((X.shape[0], ant.shape[0]))
        k = 0
        for dim, p_d in enumerate(pool_sizes):
            block = theta[k : k + 2 * p_d]
            centers = block[0::2]
            sigmas = block[1::2]
            z = (X[:, dim : dim + 1] - centers[None, :]) / sigmas[None, :]
            W *= np.exp(-0.5 * z * z)[:, ant[:, dim]]
            k += 2 * p_d
        S = W.sum(axis=1)
        cons = theta[n_prem:].reshape(ant.shape[0], d + 1)
        F = X1 @ cons.T
        yhat = ((W / S[:, None]) * F).sum(axis=1)
        return float(((yhat - t) ** 2).sum())

    return sse


def numeric_gradient(model: AnfisModel, batch, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient over the packed parameter vector.

    The step for parameter i is h * max(1, |theta_i|).
    """
    X, t = _batch_arrays(batch)
    theta = pack_parameters(model)
    sse = _packed_sse(model, X, t)
    grad = np.empty_like(theta)
    for i in range(theta.size):
        hi = h * max(1.0, abs(theta[i]))
        up = theta.copy()
        up[i] += hi
        dn = theta.copy()
        dn[i] -= hi
        grad[i] = (sse(up) - sse(dn)) / (2.0 * hi)
    return grad


def finite_diff_check(model: AnfisModel, batch, h: float = 1e-6) -> float:
    """Worst relative disagreement between analytic and numeric gradients.

    The comparison divides by max(1, |analytic|) per component, so tiny
    gradients are compared absolutely.
    """
    analytic = full_gradient(model, batch)
    numeric = numeric_gradient(model, batch, h)
    return float(np.max(np.abs(analytic - numeric) / np.maximum(1.0, np.abs(analytic))))


# --- trainers ----------------------------------------------------------------


class _StepSchedule:
    """Adaptive step length shared by both trainers.

    Grows by `up` after four consecutive epoch-error decreases; shrinks by
    `down` whenever the last two error changes flip sign (one increase and
    one decrease, in either order). A fired pattern is consumed so
    overlapping windows cannot fire twice.
    """

    def __init__(self, initial: float, up: float, down: float):
        self.step = initial
        self._up = up
        self._down = down
        self._streak = 0
        self._prev_delta: float | None = None

    def observe(self, delta: float) -> None:
        if delta < 0:
            self._streak += 1
        else:
            self._streak = 0
        if self._streak == 4:
            self.step *= self._up
            self._streak = 0
        prev = self._prev_delta
        if prev is not None and (prev < 0 < delta or delta < 0 < prev):
            self.step *= self._down
            self._prev_delta = None
        else:
            self._prev_delta = delta


def _rmse_of(model: AnfisModel, X: np.ndarray, t: np.ndarray) -> float:
    resid = forward_batch(model, X) - t
    return float(np.sqrt(np.mean(resid**2)))


def _stamp(model: AnfisModel, config: TrainConfig, report: TrainReport, best: float) -> AnfisModel:
    return model.with_metadata(
        training={
            "method": config.method,
            "epochs_run": report.epochs_run,
            "stop_reason": report.stop_reason,
            "best_rmse": best,
            "initial_step": config.initial_step,
            "lse_ridge": config.lse_ridge,
        }
    )


def train_hybrid(model: AnfisModel, train, config: TrainConfig) -> tuple[AnfisModel, TrainReport]:
    """Per epoch: exact least-squares consequents, then one premise step.

    The recorded epoch error is measured right after the least-squares solve,
    before the premise move; the returned model is the post-solve snapshot of
    the best epoch.
    """
    X, t = _batch_arrays(train)
    floors = sigma_floors(X.max(axis=0) - X.min(axis=0))
    sched = _StepSchedule(config.initial_step, config.step_increase, config.step_decrease)
    errors: list[float] = []
    steps: list[float] = []
    best_rmse = math.inf
    best_model = model
    stop = "epochs_exhausted"
    current = model
    for _ in range(config.epochs):
        current = lse_consequents(current, (X, t), config.lse_ridge)
        e = _rmse_of(current, X, t)
        if errors:
            sched.observe(e - errors[-1])
        errors.append(e)
        steps.append(sched.step)
        if e < best_rmse:
            best_rmse, best_model = e, current
        if e <= config.error_goal:
            stop = "error_goal_met"
            break
        if sched.step < STEP_UNDERFLOW:
            stop = "step_underflow"
            break
        g = premise_gradient(current, (X, t))
        norm = float(np.linalg.norm(g))
        if norm > 0:
            vec = _premise_vector(current) - sched.step * g / norm
            current = _set_premises(current, vec, floors)
    report = TrainReport(errors, steps, stop)
    return _stamp(best_model, config, report, best_rmse), report


def train_backprop(model: AnfisModel, train, config: TrainConfig) -> tuple[AnfisModel, TrainReport]:
    """Per epoch: one gradient step on every parameter at once.

    The recorded epoch error is measured before the step, so the first entry
    is the error of the model as handed in.
    """
    X, t = _batch_arrays(train)
    floors = sigma_floors(X.max(axis=0) - X.min(axis=0))
    sched = _StepSchedule(config.initial_step, config.step_increase, config.step_decrease)
    errors: list[float] = []
    steps: list[float] = []
    best_rmse = math.inf
    best_model = model
    stop = "epochs_exhausted"
    current = model
    for _ in range(config.epochs):
        e = _rmse_of(current, X, t)
        if errors:
            sched.observe(e - errors[-1])
        errors.append(e)
        steps.append(sched.step)
        if e < best_rmse:
            best_rmse, best_model = e, current
        if e <= config.error_goal:
            stop = "error_goal_met"
            break
        if sched.step < STEP_UNDERFLOW:
            stop = "step_underflow"
            break
        g = full_gradient(current, (X, t))
        norm = float(np.linalg.norm(g))
        if norm > 0:
            theta = pack_parameters(current) - sched.step * g / norm
            current = unpack_parameters(current, theta, floors)
    report = TrainReport(errors, steps, stop)
    return _stamp(best_model, config, report, best_rmse), report


def train_model(model: AnfisModel, train, config: TrainConfig) -> tuple[AnfisModel, TrainReport]:
    """Dispatch on config.method."""
    if config.method == "hybrid":
        return train_hybrid(model, train, config)
    return train_backprop(model, train, config)
