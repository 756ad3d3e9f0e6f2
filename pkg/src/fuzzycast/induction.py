"""Initial rule-base construction: grid partitioning and scatter clustering.

Three routes produce an untrained model from a supervised set:

* grid: evenly spaced Gaussian memberships per input and one rule for every
  membership combination.
* subtractive: density peaks found with a potential function over the joint
  (inputs, target) space; one rule per peak.
* fcm: fuzzy c-means cluster centers over the same joint space; one rule per
  cluster.

Consequents always start at zero; a trainer fits them afterwards.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .anfis import AnfisModel, GaussianMf, Rule, sigma_floors
from .data import SupervisedSet, minmax_stats
from .errors import (
    DegenerateRangeError,
    DimensionMismatchError,
    EmptyDataError,
    RuleExplosionError,
    TooManyClustersError,
)

__all__ = [
    "InductionConfig",
    "FcmResult",
    "grid_partition",
    "subtractive_cluster",
    "fcm",
    "model_from_clusters",
    "induce_model",
]

METHODS = ("grid", "subtractive", "fcm")

# Width so that neighbouring grid memberships cross at half height.
_FWHM = 2.0 * math.sqrt(2.0 * math.log(2.0))


@dataclass(frozen=True)
class InductionConfig:
    """Settings for every induction route; only the selected method's fields matter."""

    method: str = "grid"
    grid_mfs_per_input: int = 2
    rule_cap: int = 10000
    subtractive_radius: float = 0.5
    squash: float = 1.25
    accept_ratio: float = 0.5
    reject_ratio: float = 0.15
    fcm_clusters: int = 10
    fcm_m: float = 2.0
    fcm_tol: float = 1e-5
    fcm_max_iter: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.grid_mfs_per_input < 2:
            raise ValueError("grid_mfs_per_input must be at least 2")
        if self.rule_cap < 1:
            raise ValueError("rule_cap must be positive")
        if not (self.subtractive_radius > 0):
            raise ValueError("subtractive_radius must be positive")
        if not (self.squash > 0):
            raise ValueError("squash must be positive")
        if not (self.accept_ratio > self.reject_ratio >= 0):
            raise ValueError("need accept_ratio > reject_ratio >= 0")
        if self.fcm_clusters < 1:
            raise ValueError("fcm_clusters must be at least 1")
        if not (self.fcm_m > 1):
            raise ValueError("fcm fuzzifier m must exceed 1")
        if not (self.fcm_tol > 0):
            raise ValueError("fcm_tol must be positive")
        if self.fcm_max_iter < 1:
            raise ValueError("fcm_max_iter must be at least 1")


def grid_partition(train: SupervisedSet, mfs_per_input: int, rule_cap: int = 10000) -> AnfisModel:
    """Evenly spaced memberships spanning each input's observed range.

    Centers run from the column minimum to the column maximum; sigma is the
    spacing divided by 2*sqrt(2*ln 2), so adjacent memberships intersect at
    half height. Every combination of memberships becomes one rule with a
    zero consequent.
    """
    if mfs_per_input < 2:
        raise ValueError("mfs_per_input must be at least 2")
    d = train.n_inputs
    n_rules = mfs_per_input ** d
    if n_rules > rule_cap:
        raise RuleExplosionError(
            f"{mfs_per_input} memberships over {d} inputs gives {n_rules} rules (cap {rule_cap})"
        )
    stats = minmax_stats(train)
    pools = []
    for dim in range(d):
        lo = float(stats.input_min[dim])
        hi = float(stats.input_max[dim])
        if hi <= lo:
            raise DegenerateRangeError(
                f"input {train.input_names[dim]!r} is constant ({lo}); cannot place a grid"
            )
        spacing = (hi - lo) / (mfs_per_input - 1)
        sigma = spacing / _FWHM
        centers = np.linspace(lo, hi, mfs_per_input)
        pools.append(tuple(GaussianMf(float(c), sigma) for c in centers))
    zero = np.zeros(d + 1)
    rules = tuple(
        Rule(combo, zero.copy())
        for combo in itertools.product(range(mfs_per_input), repeat=d)
    )
    return AnfisModel(train.input_names, tuple(pools), rules,
                      metadata={"induction": {"method": "grid",
                                              "mfs_per_input": mfs_per_input}})


def _normalize_columns(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mins = X.min(axis=0)
    maxs = X.max(axis=0)
    spans = maxs - mins
    safe = np.where(spans > 0, spans, 1.0)
    norm = (X - mins) / safe
    norm[:, spans == 0] = 0.0
    return norm, mins, spans


def subtractive_cluster(
    data,
    radius: float = 0.5,
    squash: float = 1.25,
    accept_ratio: float = 0.5,
    reject_ratio: float = 0.15,
) -> np.ndarray:
    """Density-peak selection with a potential function.

    Each point's potential is the sum of exp(-alpha * squared distance) over
    the whole data set, alpha = 4 / radius^2, with distances measured after
    min-max normalizing every column. The highest-potential point becomes a
    center; potentials near it are squashed with a wider radius
    (squash * radius) and the next peak is examined. A peak is kept outright
    when its potential exceeds accept_ratio times the first peak's, dropped
    (ending selection) below reject_ratio times it, and in between it is kept
    only when its distance to the existing centers compensates for the lower
    potential. Selected centers are returned in the original units, one row
    per center. Ties pick the lowest row index.
    """
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise EmptyDataError("clustering needs a non-empty 2-d data matrix")
    if not (accept_ratio > reject_ratio >= 0):
        raise ValueError("need accept_ratio > reject_ratio >= 0")
    n = X.shape[0]
    norm, _, _ = _normalize_columns(X)
    alpha = 4.0 / radius**2
    beta = 4.0 / (squash * radius) ** 2
    sq = ((norm[:, None, :] - norm[None, :, :]) ** 2).sum(axis=2)
    potential = np.exp(-alpha * sq).sum(axis=1)

    first = int(potential.argmax())
    ref = float(potential[first])
    chosen = [first]
    potential = potential - ref * np.exp(-beta * sq[first])
    while len(chosen) < n:
        cand = int(potential.argmax())
        p = float(potential[cand])
        if p <= 0.0 or p < reject_ratio * ref:
            break
        if p > accept_ratio * ref:
            keep = True
        else:
            # gray zone: far enough from every existing center to matter?
            dmin = math.sqrt(min(sq[cand, c] for c in chosen))
            keep = (dmin / radius + p / ref) >= 1.0
        if keep:
            chosen.append(cand)
            potential = potential - p * np.exp(-beta * sq[cand])
        else:
            potential[cand] = 0.0
    return X[chosen].copy()


@dataclass(frozen=True, eq=False)
class FcmResult:
    """Fuzzy c-means output: centers, the membership matrix, and the objective trace."""

    centers: np.ndarray       # (c, p)
    memberships: np.ndarray   # (c, N), columns sum to 1
    objective_trace: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "objective_trace", tuple(float(v) for v in self.objective_trace))
        U = np.asarray(self.memberships, dtype=np.float64)
        object.__setattr__(self, "memberships", U)
        object.__setattr__(self, "centers", np.asarray(self.centers, dtype=np.float64))
        if np.any(U < 0) or np.any(U > 1):
            raise ValueError("memberships must lie in [0, 1]")
        if not np.allclose(U.sum(axis=0), 1.0, atol=1e-9):
            raise ValueError("membership columns must sum to 1")


def fcm(
    data,
    clusters: int,
    m: float = 2.0,
    tol: float = 1e-5,
    max_iter: int = 200,
    seed: int = 0,
) -> FcmResult:
    """Fuzzy c-means over the rows of `data`.

    Initial centers are `clusters` distinct rows drawn deterministically from
    the seed. Each iteration recomputes memberships from the current centers

        u_ik = 1 / sum_j (||x_k - v_i|| / ||x_k - v_j||)^(2/(m-1))

    then moves every center to the u^m-weighted mean of the data. A point
    that coincides exactly with a center gets membership 1 there (lowest
    cluster index on ties) and 0 elsewhere. Iteration stops when no center
    moved more than `tol` or after max_iter rounds.
    """
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise EmptyDataError("clustering needs a non-empty 2-d data matrix")
    n = X.shape[0]
    if clusters < 1:
        raise ValueError("clusters must be at least 1")
    if clusters > n:
        raise TooManyClustersError(f"asked for {clusters} clusters from {n} points")
    if not (m > 1):
        raise ValueError("fuzzifier m must exceed 1")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")

    rng = np.random.default_rng(seed)
    centers = X[rng.choice(n, size=clusters, replace=False)].copy()
    power = 2.0 / (m - 1.0)
    trace: list[float] = []

    def memberships_for(ctrs: np.ndarray) -> np.ndarray:
        dist = np.sqrt(((X[:, None, :] - ctrs[None, :, :]) ** 2).sum(axis=2))  # (N, c)
        U = np.empty((n, clusters))
        coincident = dist == 0.0
        hit_rows = coincident.any(axis=1)
        ok = ~hit_rows
        # ratio form avoids overflow when a point sits very near one center
        ratio = dist[ok][:, :, None] / dist[ok][:, None, :]
        U[ok] = 1.0 / (ratio**power).sum(axis=2)
        for k in np.flatnonzero(hit_rows):
            U[k] = 0.0
            U[k, int(coincident[k].argmax())] = 1.0
        return U

    for _ in range(max_iter):
        U = memberships_for(centers)
        Um = U**m
        weight = Um.sum(axis=0)
        new_centers = (Um.T @ X) / np.maximum(weight, 1e-300)[:, None]

        shift = float(np.abs(new_centers - centers).max())
        centers = new_centers
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        trace.append(float((Um * d2).sum()))
        if shift < tol:
            break

    # report the memberships belonging to the returned centers
    U = memberships_for(centers)
    return FcmResult(centers, U.T, tuple(trace))


def model_from_clusters(
    centers,
    train: SupervisedSet,
    *,
    radius: float | None = None,
    memberships=None,
    fuzzifier: float = 2.0,
) -> AnfisModel:
    """Turn joint-space cluster centers into a one-rule-per-cluster model.

    `centers` has one row per cluster over (inputs, target); the target
    coordinate seeds nothing but is accepted so cluster output can be passed
    through unchanged. Widths come from one of two rules: with `radius` given
    (density peaks) sigma is radius * column range / sqrt(8); with
    `memberships` given (fuzzy c-means) sigma is the membership-weighted
    standard deviation of the column around the center. Every sigma is floored
    so no membership can collapse to a spike.
    """
    C = np.asarray(centers, dtype=np.float64)
    d = train.n_inputs
    if C.ndim != 2 or C.shape[0] < 1:
        raise EmptyDataError("need at least one cluster center")
    if C.shape[1] != d + 1:
        raise DimensionMismatchError(
            f"centers have {C.shape[1]} coordinates, expected {d} inputs + 1 target"
        )
    if (radius is None) == (memberships is None):
        raise ValueError("pass exactly one of radius= or memberships=")
    stats = minmax_stats(train)
    ranges = stats.input_ranges()
    floors = sigma_floors(ranges)
    n_clusters = C.shape[0]

    if memberships is not None:
        U = np.asarray(memberships, dtype=np.float64)
        if U.shape != (n_clusters, train.n_rows):
            raise DimensionMismatchError(
                f"memberships have shape {U.shape}, expected ({n_clusters}, {train.n_rows})"
            )
        Um = U**fuzzifier
        mass = np.maximum(Um.sum(axis=1), 1e-300)
        sig = np.empty((n_clusters, d))
        for dim in range(d):
            dev = train.inputs[None, :, dim] - C[:, dim][:, None]
            sig[:, dim] = np.sqrt((Um * dev**2).sum(axis=1) / mass)
    else:
        per_dim = radius * ranges / math.sqrt(8.0)
        sig = np.tile(per_dim, (n_clusters, 1))

    sig = np.maximum(sig, floors[None, :])
    pools = tuple(
        tuple(GaussianMf(float(C[i, dim]), float(sig[i, dim])) for i in range(n_clusters))
        for dim in range(d)
    )
    zero = np.zeros(d + 1)
    rules = tuple(Rule((i,) * d, zero.copy()) for i in range(n_clusters))
    return AnfisModel(train.input_names, pools, rules)


def induce_model(train: SupervisedSet, config: InductionConfig) -> AnfisModel:
    """Build the untrained model the configured way and stamp its provenance."""
    if config.method == "grid":
        model = grid_partition(train, config.grid_mfs_per_input, config.rule_cap)
        info = {"method": "grid", "mfs_per_input": config.grid_mfs_per_input}
    elif config.method == "subtractive":
        joint = np.column_stack([train.inputs, train.targets])
        centers = subtractive_cluster(
            joint,
            radius=config.subtractive_radius,
            squash=config.squash,
            accept_ratio=config.accept_ratio,
            reject_ratio=config.reject_ratio,
        )
        model = model_from_clusters(centers, train, radius=config.subtractive_radius)
        info = {
            "method": "subtractive",
            "radius": config.subtractive_radius,
            "squash": config.squash,
            "accept_ratio": config.accept_ratio,
            "reject_ratio": config.reject_ratio,
            "clusters": model.n_rules,
        }
    else:
        joint = np.column_stack([train.inputs, train.targets])
        norm, mins, spans = _normalize_columns(joint)
        result = fcm(
            norm,
            clusters=config.fcm_clusters,
            m=config.fcm_m,
            tol=config.fcm_tol,
            max_iter=config.fcm_max_iter,
            seed=config.seed,
        )
        centers = result.centers * np.where(spans > 0, spans, 1.0) + mins
        model = model_from_clusters(
            centers, train, memberships=result.memberships, fuzzifier=config.fcm_m
        )
        info = {
            "method": "fcm",
            "clusters": config.fcm_clusters,
            "m": config.fcm_m,
            "tol": config.fcm_tol,
            "max_iter": config.fcm_max_iter,
            "seed": config.seed,
            "iterations": len(result.objective_trace),
        }
    return model.with_metadata(induction=info)
