"""Run configuration: a structured YAML file driving every CLI command.

Key hierarchy (see FORMATS.md for the full reference):

    seed: 42                       # required unless --seed is given
    output_dir: out
    split_fraction: 0.9
    horizon: 7
    rmsre_denominator: predicted   # or: actual
    sweep: false
    data:
      signals:
        - {name: BTC, path: btc.csv, date_column: date, value_column: close}
    subsystems:
      - name: BTC
        inputs: ["BTC@k", "predicted(BTC.D)@k+1"]
    induction:
      method: grid | subtractive | fcm
      ...
    training:
      method: hybrid | backprop
      ...
    compare:
      hidden_neurons: 10
      lm: {...}

Relative data paths are resolved against the config file's directory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError
from .induction import METHODS, InductionConfig
from .metrics import DENOMINATORS
from .mlp import LmConfig
from .pipeline import InputRef, parse_input_ref
from .training import TRAINERS, TrainConfig

__all__ = ["SignalConfig", "SubsystemConfig", "CompareConfig", "RunConfig", "load_config"]


@dataclass(frozen=True)
class SignalConfig:
    name: str
    path: Path
    date_column: str = "date"
    value_column: str = "close"


@dataclass(frozen=True)
class SubsystemConfig:
    name: str
    inputs: tuple[InputRef, ...]


@dataclass(frozen=True)
class CompareConfig:
    hidden_neurons: int = 10
    lm: LmConfig = field(default_factory=LmConfig)


@dataclass(frozen=True)
class RunConfig:
    seed: int
    output_dir: Path
    split_fraction: float
    horizon: int
    rmsre_denominator: str
    sweep: bool
    signals: tuple[SignalConfig, ...]
    subsystems: tuple[SubsystemConfig, ...]
    induction: InductionConfig
    training: TrainConfig
    compare: CompareConfig


def _expect_mapping(node, label: str) -> dict:
    if node is None:
        return {}
    if not isinstance(node, dict):
        raise ConfigError(f"{label} must be a mapping")
    return node


def _reject_unknown(node: dict, allowed: set[str], label: str) -> None:
    unknown = set(node) - allowed
    if unknown:
        raise ConfigError(f"unknown {label} keys: {', '.join(sorted(unknown))}")


def load_config(
    path,
    seed_override: int | None = None,
    out_override=None,
) -> RunConfig:
    """Parse and validate a YAML run configuration.

    The seed is mandatory: it must come from the file or --seed, never from
    the clock. CLI overrides win over file values.
    """
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"no such config file: {p}")
    try:
        raw = yaml.safe_load(p.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    raw = _expect_mapping(raw, "config")
    _reject_unknown(
        raw,
        {"seed", "output_dir", "split_fraction", "horizon", "rmsre_denominator",
         "sweep", "data", "subsystems", "induction", "training", "compare"},
        "config",
    )

    seed = seed_override if seed_override is not None else raw.get("seed")
    if seed is None:
        raise ConfigError("a seed is required: set `seed:` in the config or pass --seed")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {seed!r}")

    output_dir = Path(out_override) if out_override is not None else Path(raw.get("output_dir", "out"))

    split_fraction = raw.get("split_fraction", 0.9)
    if not isinstance(split_fraction, (int, float)) or not (0.0 < float(split_fraction) < 1.0):
        raise ConfigError(f"split_fraction must lie in (0, 1), got {split_fraction!r}")

    horizon = raw.get("horizon", 7)
    if not isinstance(horizon, int) or isinstance(horizon, bool) or horizon < 1:
        raise ConfigError(f"horizon must be a positive integer, got {horizon!r}")

    denominator = raw.get("rmsre_denominator", "predicted")
    if denominator not in DENOMINATORS:
        raise ConfigError(f"rmsre_denominator must be one of {DENOMINATORS}, got {denominator!r}")

    sweep = bool(raw.get("sweep", False))

    data = _expect_mapping(raw.get("data"), "data")
    _reject_unknown(data, {"signals"}, "data")
    signal_nodes = data.get("signals") or []
    if not isinstance(signal_nodes, list) or not signal_nodes:
        raise ConfigError("data.signals must be a non-empty list")
    signals = []
    for node in signal_nodes:
        node = _expect_mapping(node, "signal entry")
        _reject_unknown(node, {"name", "path", "date_column", "value_column"}, "signal")
        if "name" not in node or "path" not in node:
            raise ConfigError("every signal needs `name` and `path`")
        sig_path = Path(node["path"])
        if not sig_path.is_absolute():
            sig_path = p.parent / sig_path
        signals.append(
            SignalConfig(
                str(node["name"]),
                sig_path,
                str(node.get("date_column", "date")),
                str(node.get("value_column", "close")),
            )
        )
    names = [s.name for s in signals]
    if len(set(names)) != len(names):
        raise ConfigError("signal names must be unique")

    sub_nodes = raw.get("subsystems")
    if sub_nodes is None:
        # default: every signal predicts itself from its own current value
        sub_nodes = [{"name": s.name} for s in signals]
    if not isinstance(sub_nodes, list) or not sub_nodes:
        raise ConfigError("subsystems must be a non-empty list")
    subsystems = []
    for node in sub_nodes:
        node = _expect_mapping(node, "subsystem entry")
        _reject_unknown(node, {"name", "inputs"}, "subsystem")
        if "name" not in node:
            raise ConfigError("every subsystem needs `name`")
        name = str(node["name"])
        if name not in names:
            raise ConfigError(f"subsystem {name!r} does not match any data signal")
        refs_node = node.get("inputs", [f"{name}@k"])
        if not isinstance(refs_node, list) or not refs_node:
            raise ConfigError(f"subsystem {name!r}: inputs must be a non-empty list")
        try:
            refs = tuple(parse_input_ref(str(r)) for r in refs_node)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        for ref in refs:
            if ref.name not in names:
                raise ConfigError(
                    f"subsystem {name!r} references unknown signal {ref.name!r}"
                )
        subsystems.append(SubsystemConfig(name, refs))
    sub_names = [s.name for s in subsystems]
    if len(set(sub_names)) != len(sub_names):
        raise ConfigError("subsystem names must be unique")

    ind = _expect_mapping(raw.get("induction"), "induction")
    _reject_unknown(
        ind,
        {"method", "grid_mfs_per_input", "rule_cap", "subtractive", "fcm"},
        "induction",
    )
    method = ind.get("method", "grid")
    if method not in METHODS:
        raise ConfigError(f"induction.method must be one of {METHODS}, got {method!r}")
    sub_opts = _expect_mapping(ind.get("subtractive"), "induction.subtractive")
    _reject_unknown(sub_opts, {"radius", "squash", "accept_ratio", "reject_ratio"}, "induction.subtractive")
    fcm_opts = _expect_mapping(ind.get("fcm"), "induction.fcm")
    _reject_unknown(fcm_opts, {"clusters", "m", "tol", "max_iter"}, "induction.fcm")
    try:
        induction = InductionConfig(
            method=method,
            grid_mfs_per_input=int(ind.get("grid_mfs_per_input", 2)),
            rule_cap=int(ind.get("rule_cap", 10000)),
            subtractive_radius=float(sub_opts.get("radius", 0.5)),
            squash=float(sub_opts.get("squash", 1.25)),
            accept_ratio=float(sub_opts.get("accept_ratio", 0.5)),
            reject_ratio=float(sub_opts.get("reject_ratio", 0.15)),
            fcm_clusters=int(fcm_opts.get("clusters", 10)),
            fcm_m=float(fcm_opts.get("m", 2.0)),
            fcm_tol=float(fcm_opts.get("tol", 1e-5)),
            fcm_max_iter=int(fcm_opts.get("max_iter", 200)),
            seed=seed,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad induction settings: {exc}") from exc

    tr = _expect_mapping(raw.get("training"), "training")
    _reject_unknown(
        tr,
        {"method", "epochs", "error_goal", "initial_step", "step_increase",
         "step_decrease", "lse_ridge"},
        "training",
    )
    tr_method = tr.get("method", "hybrid")
    if tr_method not in TRAINERS:
        raise ConfigError(f"training.method must be one of {TRAINERS}, got {tr_method!r}")
    try:
        training = TrainConfig(
            method=tr_method,
            epochs=int(tr.get("epochs", 100)),
            error_goal=float(tr.get("error_goal", 0.0)),
            initial_step=float(tr.get("initial_step", 0.01)),
            step_increase=float(tr.get("step_increase", 1.1)),
            step_decrease=float(tr.get("step_decrease", 0.9)),
            lse_ridge=float(tr.get("lse_ridge", 1e-8)),
            seed=seed,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad training settings: {exc}") from exc

    cmp_node = _expect_mapping(raw.get("compare"), "compare")
    _reject_unknown(cmp_node, {"hidden_neurons", "lm"}, "compare")
    lm_node = _expect_mapping(cmp_node.get("lm"), "compare.lm")
    _reject_unknown(lm_node, {"max_iter", "lambda0", "lambda_up", "lambda_down", "tol"}, "compare.lm")
    try:
        compare = CompareConfig(
            hidden_neurons=int(cmp_node.get("hidden_neurons", 10)),
            lm=LmConfig(
                max_iter=int(lm_node.get("max_iter", 200)),
                lambda0=float(lm_node.get("lambda0", 1e-3)),
                lambda_up=float(lm_node.get("lambda_up", 10.0)),
                lambda_down=float(lm_node.get("lambda_down", 10.0)),
                tol=float(lm_node.get("tol", 1e-12)),
            ),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad compare settings: {exc}") from exc

    return RunConfig(
        seed=seed,
        output_dir=output_dir,
        split_fraction=float(split_fraction),
        horizon=horizon,
        rmsre_denominator=denominator,
        sweep=sweep,
        signals=tuple(signals),
        subsystems=tuple(subsystems),
        induction=induction,
        training=training,
        compare=compare,
    )
