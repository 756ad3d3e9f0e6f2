"""Versioned text serialization for trained models.

Models are stored as indented JSON with a format_version field and a kind
tag ("anfis" or "mlp"). JSON numbers round-trip IEEE doubles exactly through
Python's shortest-repr formatting, so a saved model reloads bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .anfis import AnfisModel, GaussianMf, Rule
from .errors import ConfigError
from .mlp import MlpModel

__all__ = ["FORMAT_VERSION", "model_to_text", "model_from_text", "save_model", "load_model"]

FORMAT_VERSION = 1


def _floats(arr) -> list:
    return [float(v) for v in np.asarray(arr, dtype=np.float64).ravel()]


def model_to_text(model) -> str:
    if isinstance(model, AnfisModel):
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "anfis",
            "input_names": list(model.input_names),
            "membership_pools": [
                [{"center": float(mf.center), "sigma": float(mf.sigma)} for mf in pool]
                for pool in model.mf_pools
            ],
            "rules": [
                {"antecedent": list(r.antecedent), "consequent": _floats(r.consequent)}
                for r in model.rules
            ],
            "metadata": model.metadata,
        }
    elif isinstance(model, MlpModel):
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "mlp",
            "hidden_weights": [_floats(row) for row in model.hidden_weights],
            "hidden_bias": _floats(model.hidden_bias),
            "output_weights": _floats(model.output_weights),
            "output_bias": float(model.output_bias),
            "input_min": _floats(model.input_min),
            "input_max": _floats(model.input_max),
            "metadata": model.metadata,
        }
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def model_from_text(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model file is not valid JSON: {exc}") from exc
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ConfigError(f"unsupported model format version {version!r}")
    kind = doc.get("kind")
    if kind == "anfis":
        pools = tuple(
            tuple(GaussianMf(mf["center"], mf["sigma"]) for mf in pool)
            for pool in doc["membership_pools"]
        )
        rules = tuple(
            Rule(tuple(r["antecedent"]), np.array(r["consequent"]))
            for r in doc["rules"]
        )
        return AnfisModel(tuple(doc["input_names"]), pools, rules, doc.get("metadata", {}))
    if kind == "mlp":
        return MlpModel(
            hidden_weights=np.array(doc["hidden_weights"], dtype=np.float64),
            hidden_bias=np.array(doc["hidden_bias"], dtype=np.float64),
            output_weights=np.array(doc["output_weights"], dtype=np.float64),
            output_bias=doc["output_bias"],
            input_min=np.array(doc["input_min"], dtype=np.float64),
            input_max=np.array(doc["input_max"], dtype=np.float64),
            metadata=doc.get("metadata", {}),
        )
    raise ConfigError(f"unknown model kind {kind!r}")


def save_model(model, path) -> None:
    Path(path).write_text(model_to_text(model), encoding="utf-8")


def load_model(path):
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"no such model file: {p}")
    return model_from_text(p.read_text(encoding="utf-8"))
