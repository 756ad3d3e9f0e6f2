"""Shared fixtures: tiny supervised sets and synthetic candle files."""

from datetime import date, timedelta

import numpy as np
import pytest

from fuzzycast.data import SupervisedSet


def day_range(n, start=date(2021, 1, 1)):
    return tuple(start + timedelta(days=i) for i in range(n))


def make_set(X, t, names=None, target="y"):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    t = np.asarray(t, dtype=np.float64)
    if names is None:
        names = tuple(f"x{i}" for i in range(X.shape[1]))
    return SupervisedSet(tuple(names), X, t, day_range(X.shape[0]), target)


@pytest.fixture
def linear_set():
    """80 rows of a noisy affine map; easy for every fitting route."""
    rng = np.random.default_rng(7)
    X = rng.uniform(-1, 1, (80, 2))
    t = 2.0 * X[:, 0] - 1.0 * X[:, 1] + 0.5 + 0.05 * rng.standard_normal(80)
    return make_set(X, t, names=("u", "v"))


@pytest.fixture
def candle_writer(tmp_path):
    """Writes a date,open,close CSV and returns its path."""

    def write(name, values, start=date(2021, 1, 1), dates=None):
        path = tmp_path / f"{name}.csv"
        if dates is None:
            dates = [start + timedelta(days=i) for i in range(len(values))]
        lines = ["date,open,close"]
        for d, v in zip(dates, values):
            lines.append(f"{d.isoformat()},{v * 0.99!r},{v!r}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    return write
