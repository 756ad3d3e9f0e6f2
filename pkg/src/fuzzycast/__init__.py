"""Neuro-fuzzy one-step forecasting with prediction-fed multi-day rollouts."""

from .anfis import AnfisModel, ForwardTrace, GaussianMf, Rule, forward, forward_batch
from .data import (
    SupervisedSet,
    TimeSeries,
    align,
    lead,
    load_candles,
    make_supervised,
    split_chronological,
)
from .errors import FuzzycastError
from .induction import InductionConfig, fcm, grid_partition, induce_model, subtractive_cluster
from .metrics import rmse, rmsre
from .mlp import LmConfig, MlpModel, init_mlp, mlp_forward_batch, train_lm
from .modelio import load_model, save_model
from .pipeline import (
    Pipeline,
    PipelineSpec,
    SubsystemSpec,
    build_pipeline,
    evaluate_rollout,
    rollout,
)
from .training import TrainConfig, TrainReport, train_model

__version__ = "0.1.0"

__all__ = [
    "AnfisModel",
    "ForwardTrace",
    "GaussianMf",
    "Rule",
    "forward",
    "forward_batch",
    "TimeSeries",
    "SupervisedSet",
    "load_candles",
    "align",
    "lead",
    "make_supervised",
    "split_chronological",
    "FuzzycastError",
    "InductionConfig",
    "grid_partition",
    "subtractive_cluster",
    "fcm",
    "induce_model",
    "rmse",
    "rmsre",
    "MlpModel",
    "LmConfig",
    "init_mlp",
    "mlp_forward_batch",
    "train_lm",
    "save_model",
    "load_model",
    "Pipeline",
    "PipelineSpec",
    "SubsystemSpec",
    "build_pipeline",
    "rollout",
    "evaluate_rollout",
    "TrainConfig",
    "TrainReport",
    "train_model",
    "__version__",
]
