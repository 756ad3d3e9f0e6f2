"""Single-hidden-layer tanh perceptron and its Levenberg-Marquardt trainer.

The network computes yhat = w_out . tanh(W_h x~ + b_h) + b_out where x~ is
the input min-max scaled to [-1, 1] (the scaling lives inside the model, so
callers always feed raw units; targets are never scaled). Training damps the
Gauss-Newton step: solve (J'J + lambda I) delta = -J' r, accept the step only
when the squared error drops, and move lambda down on acceptance, up on
rejection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .data import SupervisedSet
from .errors import DimensionMismatchError, SingularNormalMatrixError
from .training import TrainReport

__all__ = [
    "LmConfig",
    "MlpModel",
    "init_mlp",
    "mlp_forward",
    "mlp_forward_batch",
    "mlp_jacobian",
    "finite_diff_check_mlp",
    "damped_step",
    "train_lm",
    "pack_mlp",
    "unpack_mlp",
]


@dataclass(frozen=True)
class LmConfig:
    max_iter: int = 200
    lambda0: float = 1e-3
    lambda_up: float = 10.0
    lambda_down: float = 10.0
    tol: float = 1e-12
    lambda_cap: float = 1e12

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not (self.lambda0 > 0):
            raise ValueError("lambda0 must be positive")
        if not (self.lambda_up > 1 and self.lambda_down > 1):
            raise ValueError("lambda_up and lambda_down must exceed 1")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")


@dataclass(frozen=True, eq=False)
class MlpModel:
    """Feedforward net with one tanh hidden layer and a linear output unit."""

    hidden_weights: np.ndarray  # (H, d)
    hidden_bias: np.ndarray     # (H,)
    output_weights: np.ndarray  # (H,)
    output_bias: float
    input_min: np.ndarray       # (d,) raw-unit scaling recorded at fit time
    input_max: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        Wh = np.asarray(self.hidden_weights, dtype=np.float64)
        bh = np.asarray(self.hidden_bias, dtype=np.float64)
        wo = np.asarray(self.output_weights, dtype=np.float64)
        lo = np.asarray(self.input_min, dtype=np.float64)
        hi = np.asarray(self.input_max, dtype=np.float64)
        object.__setattr__(self, "hidden_weights", Wh)
        object.__setattr__(self, "hidden_bias", bh)
        object.__setattr__(self, "output_weights", wo)
        object.__setattr__(self, "output_bias", float(self.output_bias))
        object.__setattr__(self, "input_min", lo)
        object.__setattr__(self, "input_max", hi)
        if Wh.ndim != 2:
            raise DimensionMismatchError("hidden_weights must be (H, d)")
        h, d = Wh.shape
        if bh.shape != (h,) or wo.shape != (h,):
            raise DimensionMismatchError("hidden_bias and output_weights must be (H,)")
        if lo.shape != (d,) or hi.shape != (d,):
            raise DimensionMismatchError("input scaling must be (d,)")
        for arr in (Wh, bh, wo, lo, hi):
            if not np.all(np.isfinite(arr)):
                raise ValueError("network parameters must be finite")
        if not np.isfinite(self.output_bias):
            raise ValueError("network parameters must be finite")

    @property
    def n_inputs(self) -> int:
        return self.hidden_weights.shape[1]

    @property
    def n_hidden(self) -> int:
        return self.hidden_weights.shape[0]


def init_mlp(n_inputs: int, hidden: int = 10, seed: int = 0) -> MlpModel:
    """Deterministic start: uniform [-0.5, 0.5] scaled by 1/sqrt(fan-in).

    Scaling bounds start at [-1, 1] (identity); train_lm replaces them with
    the training data's min and max.
    """
    if n_inputs < 1 or hidden < 1:
        raise ValueError("need at least one input and one hidden unit")
    rng = np.random.default_rng(seed)
    u = lambda size: rng.uniform(-0.5, 0.5, size=size)
    return MlpModel(
        hidden_weights=u((hidden, n_inputs)) / math.sqrt(n_inputs),
        hidden_bias=u(hidden) / math.sqrt(n_inputs),
        output_weights=u(hidden) / math.sqrt(hidden),
        output_bias=float(u(()) / math.sqrt(hidden)),
        input_min=-np.ones(n_inputs),
        input_max=np.ones(n_inputs),
    )


def _scale(model: MlpModel, X: np.ndarray) -> np.ndarray:
    span = model.input_max - model.input_min
    safe = np.where(span > 0, span, 1.0)
    scaled = 2.0 * (X - model.input_min) / safe - 1.0
    if np.any(span <= 0):
        scaled[:, span <= 0] = 0.0
    return scaled


def mlp_forward_batch(model: MlpModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise DimensionMismatchError(
            f"batch has shape {X.shape}, network expects (N, {model.n_inputs})"
        )
    if X.shape[0] == 0:
        return np.empty(0)
    Z = np.tanh(_scale(model, X) @ model.hidden_weights.T + model.hidden_bias)
    return Z @ model.output_weights + model.output_bias


def mlp_forward(model: MlpModel, x) -> float:
    v = np.asarray(x, dtype=np.float64)
    if v.shape != (model.n_inputs,):
        raise DimensionMismatchError(
            f"input has shape {v.shape}, network expects ({model.n_inputs},)"
        )
    return float(mlp_forward_batch(model, v[None, :])[0])


# parameter layout: hidden_weights row-major, hidden_bias, output_weights, output_bias
def pack_mlp(model: MlpModel) -> np.ndarray:
    return np.concatenate(
        [
            model.hidden_weights.ravel(),
            model.hidden_bias,
            model.output_weights,
            [model.output_bias],
        ]
    )


def unpack_mlp(model: MlpModel, theta: np.ndarray) -> MlpModel:
    h, d = model.hidden_weights.shape
    k = h * d
    return replace(
        model,
        hidden_weights=theta[:k].reshape(h, d),
        hidden_bias=theta[k : k + h],
        output_weights=theta[k + h : k + 2 * h],
        output_bias=float(theta[k + 2 * h]),
    )


def mlp_jacobian(model: MlpModel, X) -> np.ndarray:
    """d yhat / d theta for every batch row, in pack_mlp order.

    With z = tanh(W x~ + b): the output-weight column is z, the output-bias
    column is 1, and hidden parameters get w_out * (1 - z^2) times x~ (weights)
    or 1 (bias).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise DimensionMismatchError(
            f"batch has shape {X.shape}, network expects (N, {model.n_inputs})"
        )
    n = X.shape[0]
    h, d = model.hidden_weights.shape
    Xs = _scale(model, X)
    Z = np.tanh(Xs @ model.hidden_weights.T + model.hidden_bias)  # (N, H)
    gate = model.output_weights[None, :] * (1.0 - Z**2)           # (N, H)
    J = np.empty((n, h * d + 2 * h + 1))
    J[:, : h * d] = (gate[:, :, None] * Xs[:, None, :]).reshape(n, h * d)
    J[:, h * d : h * d + h] = gate
    J[:, h * d + h : h * d + 2 * h] = Z
    J[:, -1] = 1.0
    return J


def finite_diff_check_mlp(model: MlpModel, batch, h: float = 1e-6) -> float:
    """Worst relative disagreement between 2 J' r and a central-difference gradient.

    Exercises the analytic Jacobian through the squared-error gradient; the
    comparison divides by max(1, |analytic|) per component.
    """
    if isinstance(batch, SupervisedSet):
        X, t = batch.inputs, batch.targets
    else:
        X, t = batch
        X = np.asarray(X, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
    resid = mlp_forward_batch(model, X) - t
    analytic = 2.0 * (mlp_jacobian(model, X).T @ resid)
    theta = pack_mlp(model)
    numeric = np.empty_like(theta)
    for i in range(theta.size):
        hi = h * max(1.0, abs(theta[i]))
        up = theta.copy()
        up[i] += hi
        dn = theta.copy()
        dn[i] -= hi
        r_up = mlp_forward_batch(unpack_mlp(model, up), X) - t
        r_dn = mlp_forward_batch(unpack_mlp(model, dn), X) - t
        numeric[i] = (float(r_up @ r_up) - float(r_dn @ r_dn)) / (2.0 * hi)
    return float(np.max(np.abs(analytic - numeric) / np.maximum(1.0, np.abs(analytic))))


def damped_step(J: np.ndarray, residual: np.ndarray, lam: float) -> np.ndarray:
    """Solve (J'J + lam I) delta = -J' residual."""
    H = J.T @ J
    g = J.T @ residual
    A = H + lam * np.eye(H.shape[0])
    try:
        return np.linalg.solve(A, -g)
    except np.linalg.LinAlgError as exc:
        raise SingularNormalMatrixError(
            f"normal matrix is singular at damping {lam}"
        ) from exc


def train_lm(model: MlpModel, train, config: LmConfig = LmConfig()) -> tuple[MlpModel, TrainReport]:
    """Damped Gauss-Newton fit of all network parameters.

    Each iteration proposes one step. Accepted steps strictly reduce the
    squared error and divide the damping by lambda_down; rejected steps keep
    the parameters and multiply it by lambda_up. Stops when an accepted step
    improves the squared error by less than tol (converged, reported as
    error_goal_met), when the damping exceeds lambda_cap (the step has
    effectively vanished, reported as step_underflow), or after max_iter
    iterations. The report holds the current RMSE after every iteration,
    accepted or not.
    """
    if isinstance(train, SupervisedSet):
        X, t = train.inputs, train.targets
    else:
        X, t = train
        X = np.asarray(X, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
    if X.shape[0] != t.shape[0] or X.shape[0] < 1:
        raise ValueError("training batch is empty or mismatched")

    current = replace(model, input_min=X.min(axis=0), input_max=X.max(axis=0))
    theta = pack_mlp(current)
    resid = mlp_forward_batch(current, X) - t
    sse = float(resid @ resid)
    lam = config.lambda0
    errors: list[float] = []
    lambdas: list[float] = []
    stop = "epochs_exhausted"
    n = X.shape[0]

    for _ in range(config.max_iter):
        trial_model = unpack_mlp(current, theta)
        resid = mlp_forward_batch(trial_model, X) - t
        J = mlp_jacobian(trial_model, X)
        delta = damped_step(J, resid, lam)
        theta_new = theta + delta
        new_model = unpack_mlp(current, theta_new)
        new_resid = mlp_forward_batch(new_model, X) - t
        new_sse = float(new_resid @ new_resid)
        if new_sse < sse:
            improvement = sse - new_sse
            theta = theta_new
            sse = new_sse
            lam /= config.lambda_down
            errors.append(math.sqrt(sse / n))
            lambdas.append(lam)
            if improvement <= config.tol * max(sse, 1e-300):
                stop = "error_goal_met"
                break
        else:
            lam *= config.lambda_up
            errors.append(math.sqrt(sse / n))
            lambdas.append(lam)
            if lam > config.lambda_cap:
                stop = "step_underflow"
                break

    fitted = unpack_mlp(current, theta)
    report = TrainReport(errors, lambdas, stop)
    fitted = replace(
        fitted,
        metadata={
            **model.metadata,
            "training": {
                "method": "lm",
                "iterations": report.epochs_run,
                "stop_reason": stop,
                "final_rmse": math.sqrt(sse / n),
            },
        },
    )
    return fitted, report
