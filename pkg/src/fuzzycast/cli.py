"""Command-line front end.

Every command is driven by one YAML config (see FORMATS.md) plus the global
flags --config, --seed, and --out. All file outputs go through a staging area
and are renamed into place only when the whole command succeeds, so a failed
run never leaves partial outputs behind; reruns with identical config, seed,
and data produce byte-identical files (no clocks, no unseeded randomness).
"""

from __future__ import annotations

import dataclasses
import hashlib
import io
import math
import os
import sys
from datetime import date, timedelta
from pathlib import Path

import click
import numpy as np

from .anfis import AnfisModel, forward_batch, hard_assignments
from .config import RunConfig, SubsystemConfig, load_config
from .data import (
    SupervisedSet,
    TimeSeries,
    align,
    lead,
    load_candles,
    make_supervised,
    minmax_stats,
    split_chronological,
    supervised_csv,
)
from .errors import ConfigError, FuzzycastError
from .induction import InductionConfig, induce_model
from .metrics import EvalReport, EvalRow, StepErrorRow, rmse, rmsre
from .mlp import (
    MlpModel,
    finite_diff_check_mlp,
    init_mlp,
    mlp_forward_batch,
    train_lm,
)
from .modelio import load_model, save_model, model_to_text
from .pipeline import (
    Pipeline,
    PipelineSpec,
    SubsystemSpec,
    build_pipeline,
    evaluate_rollout,
    rollout,
)
from .training import TrainConfig, finite_diff_check, train_model

SWEEP_METHODS = ("grid", "subtractive", "fcm")
SWEEP_TRAINERS = ("hybrid", "backprop")


# --- staged, atomic output ----------------------------------------------------


class _Stager:
    """Collects output files and renames them into place on commit."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._pending: list[tuple[Path, Path]] = []
        self._n = 0

    def add_text(self, rel: str, text: str) -> None:
        self.add_bytes(rel, text.encode("utf-8"))

    def add_bytes(self, rel: str, data: bytes) -> None:
        final = self.root / rel
        final.parent.mkdir(parents=True, exist_ok=True)
        tmp = final.with_name(f".{final.name}.stage{self._n}-{os.getpid()}")
        self._n += 1
        tmp.write_bytes(data)
        self._pending.append((tmp, final))

    def commit(self) -> None:
        for tmp, final in self._pending:
            os.replace(tmp, final)
        self._pending.clear()

    def abort(self) -> None:
        for tmp, _ in self._pending:
            try:
                tmp.unlink()
            except OSError:
                pass
        self._pending.clear()


# --- data plumbing ------------------------------------------------------------


def _load_aligned(cfg: RunConfig) -> tuple[dict[str, TimeSeries], dict[str, str]]:
    """Load every configured signal, fingerprint its file, and align calendars."""
    raw = []
    fingerprints = {}
    for sig in cfg.signals:
        ts = load_candles(sig.path, sig.date_column, sig.value_column, name=sig.name)
        raw.append(ts)
        fingerprints[sig.name] = hashlib.sha256(Path(sig.path).read_bytes()).hexdigest()
    aligned = align(raw)
    return {ts.name: ts for ts in aligned}, fingerprints


def _supervised_for(
    aligned: dict[str, TimeSeries], sub: SubsystemConfig
) -> tuple[SupervisedSet, tuple[date, ...]]:
    """Assemble one subsystem's one-step rows from its wiring.

    A predicted(NAME)@k+1 slot is filled from the historical series shifted
    one day ahead; at forecast time the same slot receives that subsystem's
    own prediction. Returns the set plus the target date of every row.
    """
    inputs = []
    for ref in sub.inputs:
        base = aligned[ref.name]
        if ref.predicted:
            inputs.append(lead(base, name=ref.render()))
        else:
            inputs.append(TimeSeries(ref.render(), base.dates, base.values))
    target = aligned[sub.name]
    realigned = align([*inputs, target])
    sset = make_supervised(realigned[:-1], realigned[-1])
    return sset, realigned[-1].dates[1:]


def _stamp_metadata(
    model, cfg: RunConfig, sub: SubsystemConfig, train: SupervisedSet,
    test: SupervisedSet, fingerprints: dict[str, str]
):
    stats = minmax_stats(train)
    used = sorted({ref.name for ref in sub.inputs} | {sub.name})
    meta = {
        "target": sub.name,
        "inputs": [ref.render() for ref in sub.inputs],
        "seed": cfg.seed,
        "split_fraction": cfg.split_fraction,
        "train_rows": train.n_rows,
        "test_rows": test.n_rows,
        "input_ranges": {
            name: [float(stats.input_min[i]), float(stats.input_max[i])]
            for i, name in enumerate(train.input_names)
        },
        "target_range": [stats.target_min, stats.target_max],
        "data_fingerprints": {name: fingerprints[name] for name in used},
    }
    if isinstance(model, AnfisModel):
        return model.with_metadata(**meta)
    merged = dict(model.metadata)
    merged.update(meta)
    return dataclasses.replace(model, metadata=merged)


def _predict_split(model, sset: SupervisedSet) -> np.ndarray:
    if isinstance(model, AnfisModel):
        return forward_batch(model, sset.inputs)
    return mlp_forward_batch(model, sset.inputs)


def _eval_row(
    model, sub: SubsystemConfig, train: SupervisedSet, test: SupervisedSet,
    clustering: str, trainer: str, denominator: str
) -> EvalRow:
    pred_train = _predict_split(model, train)
    pred_test = _predict_split(model, test)
    return EvalRow(
        target=sub.name,
        input_label=", ".join(ref.render() for ref in sub.inputs),
        clustering=clustering,
        trainer=trainer,
        rmse_train=rmse(train.targets, pred_train),
        rmse_test=rmse(test.targets, pred_test),
        rmsre_train=rmsre(train.targets, pred_train, denominator),
        rmsre_test=rmsre(test.targets, pred_test, denominator),
    )


def _model_filename(sub_name: str, clustering: str | None = None, trainer: str | None = None) -> str:
    if clustering is None:
        return f"{sub_name}.model.json"
    return f"{sub_name}__{clustering}_{trainer}.model.json"


def _pipeline_from(cfg: RunConfig, models: dict) -> Pipeline:
    spec = PipelineSpec(
        tuple(SubsystemSpec(s.name, s.inputs) for s in cfg.subsystems),
        horizon=cfg.horizon,
    )
    return build_pipeline(spec, models)


def _restrict_from(series: TimeSeries, cutoff: date) -> TimeSeries:
    idx = next((i for i, d in enumerate(series.dates) if d >= cutoff), None)
    if idx is None:
        raise ConfigError(f"no data on or after {cutoff.isoformat()} in {series.name!r}")
    return TimeSeries(series.name, series.dates[idx:], series.values[idx:])


# --- plot emission --------------------------------------------------------------


def _figure_svg(panels: list[tuple[str, list[tuple[str, np.ndarray]]]], title: str,
                x: np.ndarray, tick_positions: list[int], tick_labels: list[str]) -> bytes:
    """Render stacked line panels to a self-contained SVG, deterministically."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "fuzzycast"
    fig, axes = plt.subplots(
        len(panels), 1, figsize=(8.0, 3.0 * len(panels)), sharex=True, squeeze=False
    )
    for ax, (ylabel, lines) in zip(axes[:, 0], panels):
        for label, values in lines:
            ax.plot(x, values, label=label, linewidth=1.2)
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        if len(lines) > 1:
            ax.legend(loc="best", fontsize=8)
    axes[0, 0].set_title(title)
    axes[-1, 0].set_xticks(tick_positions)
    axes[-1, 0].set_xticklabels(tick_labels, rotation=30, ha="right", fontsize=8)
    fig.tight_layout()
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def _sparse_ticks(labels: list[str], max_ticks: int = 8) -> tuple[list[int], list[str]]:
    n = len(labels)
    if n <= max_ticks:
        return list(range(n)), labels
    step = max(1, (n - 1) // (max_ticks - 1))
    pos = list(range(0, n, step))
    if pos[-1] != n - 1:
        pos.append(n - 1)
    return pos, [labels[i] for i in pos]


# --- command bodies -------------------------------------------------------------


def _cmd_ingest(cfg: RunConfig, stager: _Stager) -> None:
    aligned, _ = _load_aligned(cfg)
    for sub in cfg.subsystems:
        sset, _ = _supervised_for(aligned, sub)
        stager.add_text(f"supervised/{sub.name}.csv", supervised_csv(sset))
        click.echo(
            f"{sub.name}: {sset.n_rows} rows, {sset.n_inputs} inputs "
            f"({sset.dates[0].isoformat()} .. {sset.dates[-1].isoformat()})"
        )


def _train_combo(
    cfg: RunConfig, sub: SubsystemConfig, train: SupervisedSet,
    icfg: InductionConfig, tcfg: TrainConfig
):
    model = induce_model(train, icfg)
    return train_model(model, train, tcfg)


def _cmd_train(cfg: RunConfig, stager: _Stager) -> None:
    aligned, fingerprints = _load_aligned(cfg)
    report = EvalReport(rmsre_denominator=cfg.rmsre_denominator)
    combos = (
        [(m, t) for m in SWEEP_METHODS for t in SWEEP_TRAINERS]
        if cfg.sweep
        else [(cfg.induction.method, cfg.training.method)]
    )
    for sub in cfg.subsystems:
        sset, _ = _supervised_for(aligned, sub)
        train, test = split_chronological(sset, cfg.split_fraction)
        for clustering, trainer in combos:
            icfg = dataclasses.replace(cfg.induction, method=clustering)
            tcfg = dataclasses.replace(cfg.training, method=trainer)
            model, train_report = _train_combo(cfg, sub, train, icfg, tcfg)
            model = _stamp_metadata(model, cfg, sub, train, test, fingerprints)
            fname = (
                _model_filename(sub.name)
                if not cfg.sweep
                else _model_filename(sub.name, clustering, trainer)
            )
            stager.add_text(f"models/{fname}", model_to_text(model))
            curve_name = (
                f"reports/train_{sub.name}.csv"
                if not cfg.sweep
                else f"reports/train_{sub.name}__{clustering}_{trainer}.csv"
            )
            stager.add_text(curve_name, train_report.to_csv_text())
            report.rows.append(
                _eval_row(model, sub, train, test, clustering, trainer, cfg.rmsre_denominator)
            )
    stager.add_text("reports/eval_report.csv", report.to_csv_text())
    stager.add_text("reports/eval_report.txt", report.format_table())
    click.echo(report.format_table(), nl=False)


def _load_models(cfg: RunConfig) -> dict[str, object]:
    models = {}
    for sub in cfg.subsystems:
        path = cfg.output_dir / "models" / _model_filename(sub.name)
        models[sub.name] = load_model(path)
    return models


def _cmd_evaluate(cfg: RunConfig, stager: _Stager) -> None:
    aligned, _ = _load_aligned(cfg)
    models = _load_models(cfg)
    report = EvalReport(rmsre_denominator=cfg.rmsre_denominator)
    cutoff: date | None = None
    for sub in cfg.subsystems:
        sset, target_dates = _supervised_for(aligned, sub)
        train, test = split_chronological(sset, cfg.split_fraction)
        model = models[sub.name]
        meta = getattr(model, "metadata", {}) or {}
        clustering = meta.get("induction", {}).get("method", "?")
        trainer = meta.get("training", {}).get("method", "?")
        report.rows.append(
            _eval_row(model, sub, train, test, clustering, trainer, cfg.rmsre_denominator)
        )
        first_test_day = test.dates[0]
        cutoff = first_test_day if cutoff is None or first_test_day > cutoff else cutoff

        # one-step test trajectory, plotted against the day being predicted
        pred = _predict_split(model, test)
        n_train = train.n_rows
        days = [d.isoformat() for d in target_dates[n_train:]]
        buf = io.StringIO()
        buf.write("date,actual,predicted,error\n")
        for i, day in enumerate(days):
            buf.write(f"{day},{test.targets[i]!r},{pred[i]!r},{(test.targets[i] - pred[i])!r}\n")
        stager.add_text(f"plots/{sub.name}_test_prediction.csv", buf.getvalue())
        pos, labels = _sparse_ticks(days)
        svg = _figure_svg(
            [
                (sub.name, [("actual", test.targets), ("predicted", pred)]),
                ("error", [("error", test.targets - pred)]),
            ],
            f"{sub.name}: one-step test prediction",
            np.arange(len(days)),
            pos,
            labels,
        )
        stager.add_bytes(f"plots/{sub.name}_test_prediction.svg", svg)

    pipeline = _pipeline_from(cfg, models)
    needed = set(pipeline.current_signal_names()) | set(pipeline.subsystem_names)
    test_series = {name: _restrict_from(aligned[name], cutoff) for name in needed}
    agg = evaluate_rollout(pipeline, test_series, cfg.horizon, cfg.rmsre_denominator)
    for j, name in enumerate(agg.subsystems):
        for s in range(cfg.horizon):
            report.step_rows.append(
                StepErrorRow(name, s + 1, float(agg.rmse[s, j]), float(agg.rmsre[s, j]))
            )
    stager.add_text("reports/eval_report.csv", report.to_csv_text())
    stager.add_text("reports/eval_report.txt", report.format_table())
    stager.add_text("reports/rollout_steps.csv", report.steps_csv_text())
    click.echo(report.format_table(), nl=False)
    click.echo(f"rollout anchors: {agg.n_anchors}")


def _cmd_forecast(cfg: RunConfig, stager: _Stager, anchor: str | None) -> None:
    aligned, _ = _load_aligned(cfg)
    models = _load_models(cfg)
    pipeline = _pipeline_from(cfg, models)
    calendar = next(iter(aligned.values())).dates
    if anchor is None:
        a_idx = len(calendar) - 1
    else:
        try:
            a_day = date.fromisoformat(anchor)
        except ValueError as exc:
            raise ConfigError(f"bad --anchor date {anchor!r}: {exc}") from exc
        try:
            a_idx = calendar.index(a_day)
        except ValueError:
            raise ConfigError(
                f"anchor {anchor} is not in the aligned calendar "
                f"({calendar[0].isoformat()} .. {calendar[-1].isoformat()})"
            ) from None
    anchor_day = calendar[a_idx]
    h = cfg.horizon
    initial = {
        name: aligned[name].values[a_idx] for name in pipeline.current_signal_names()
    }
    remaining = len(calendar) - 1 - a_idx
    actuals = None
    if remaining >= h:
        actuals = {
            name: aligned[name].values[a_idx + 1 : a_idx + 1 + h]
            for name in pipeline.subsystem_names
        }
    result = rollout(pipeline, initial, horizon=h, actuals=actuals,
                     rel_denominator=cfg.rmsre_denominator)
    stager.add_text("forecast/rollout.csv", result.to_csv_text())
    stager.add_text("forecast/forecast_wide.csv", result.to_wide_csv_text())

    cycle_days = [
        calendar[a_idx + s] if a_idx + s < len(calendar)
        else calendar[-1] + timedelta(days=a_idx + s - (len(calendar) - 1))
        for s in range(1, h + 1)
    ]
    day_labels = [d.isoformat() for d in cycle_days]
    for j, name in enumerate(result.subsystems):
        buf = io.StringIO()
        buf.write("cycle,date,predicted,actual\n")
        for c in range(h):
            actual_txt = ""
            if result.actuals is not None and np.isfinite(result.actuals[c, j]):
                actual_txt = repr(float(result.actuals[c, j]))
            buf.write(f"{c + 1},{day_labels[c]},{result.predictions[c, j]!r},{actual_txt}\n")
        stager.add_text(f"plots/{name}_forecast.csv", buf.getvalue())
        lines = [("predicted", result.predictions[:, j])]
        if result.actuals is not None and np.all(np.isfinite(result.actuals[:, j])):
            lines.insert(0, ("actual", result.actuals[:, j]))
        pos, labels = _sparse_ticks(day_labels)
        svg = _figure_svg(
            [(name, lines)],
            f"{name}: {h}-cycle forecast from {anchor_day.isoformat()}",
            np.arange(h),
            pos,
            labels,
        )
        stager.add_bytes(f"plots/{name}_forecast.svg", svg)

    click.echo(f"forecast anchored at {anchor_day.isoformat()}, {h} cycles:")
    click.echo(result.to_wide_csv_text(), nl=False)


def _cmd_compare(cfg: RunConfig, stager: _Stager) -> None:
    aligned, fingerprints = _load_aligned(cfg)
    rows = []
    for sub in cfg.subsystems:
        sset, _ = _supervised_for(aligned, sub)
        train, test = split_chronological(sset, cfg.split_fraction)

        icfg = dataclasses.replace(cfg.induction, method="fcm")
        tcfg = dataclasses.replace(cfg.training, method="backprop")
        anfis_model, _ = _train_combo(cfg, sub, train, icfg, tcfg)
        anfis_model = _stamp_metadata(anfis_model, cfg, sub, train, test, fingerprints)
        stager.add_text(
            f"models/{sub.name}__compare_anfis.model.json", model_to_text(anfis_model)
        )

        net = init_mlp(train.n_inputs, cfg.compare.hidden_neurons, cfg.seed)
        net, _ = train_lm(net, train, cfg.compare.lm)
        net = _stamp_metadata(net, cfg, sub, train, test, fingerprints)
        stager.add_text(f"models/{sub.name}__compare_mlp.model.json", model_to_text(net))

        for label, model in (("anfis", anfis_model), ("mlp", net)):
            rows.append(
                (
                    sub.name,
                    label,
                    rmse(train.targets, _predict_split(model, train)),
                    rmse(test.targets, _predict_split(model, test)),
                )
            )
    buf = io.StringIO()
    buf.write("target,method,rmse_train,rmse_test\n")
    for target, method, tr, te in rows:
        buf.write(f"{target},{method},{tr!r},{te!r}\n")
    stager.add_text("reports/compare.csv", buf.getvalue())

    lines = ["target     method  rmse(train)   rmse(test)"]
    for target, method, tr, te in rows:
        lines.append(f"{target:<9}  {method:<6}  {tr:<12.6g}  {te:.6g}")
    text = "\n".join(lines) + "\n"
    stager.add_text("reports/compare.txt", text)
    click.echo(text, nl=False)


def _cmd_cluster_info(cfg: RunConfig) -> None:
    aligned, _ = _load_aligned(cfg)
    for sub in cfg.subsystems:
        sset, _ = _supervised_for(aligned, sub)
        train, _ = split_chronological(sset, cfg.split_fraction)
        model = induce_model(train, cfg.induction)
        counts = np.bincount(hard_assignments(model, train.inputs), minlength=model.n_rules)
        click.echo(
            f"subsystem {sub.name}: {cfg.induction.method}, "
            f"{model.n_rules} rules over {model.n_inputs} inputs, "
            f"{train.n_rows} training rows"
        )
        header = "rule  members  " + "  ".join(
            f"center/sigma [{name}]" for name in train.input_names
        )
        click.echo(header)
        for i, rule in enumerate(model.rules):
            cells = []
            for dim in range(model.n_inputs):
                mf = model.mf_pools[dim][rule.antecedent[dim]]
                cells.append(f"{mf.center:.6g}/{mf.sigma:.6g}")
            click.echo(f"{i + 1:>4}  {counts[i]:>7}  " + "  ".join(cells))
        click.echo("")


def run_gradient_suite(seed: int, trials: int = 100) -> tuple[float, float]:
    """Randomized gradient verification for both model families.

    Builds `trials` random scatter-rule models (1..20 rules, 1..3 inputs) and
    small batches, plus one random network per trial, and returns the worst
    relative disagreement between analytic and central-difference gradients
    for each family.
    """
    from .anfis import GaussianMf, Rule

    rng = np.random.default_rng(seed)
    worst_anfis = 0.0
    worst_mlp = 0.0
    for _ in range(trials):
        d = int(rng.integers(1, 4))
        n_rules = int(rng.integers(1, 21))
        pools = tuple(
            tuple(
                GaussianMf(float(c), float(s))
                for c, s in zip(
                    rng.uniform(-2, 2, n_rules), rng.uniform(0.3, 1.5, n_rules)
                )
            )
            for _ in range(d)
        )
        rules = tuple(
            Rule((i,) * d, rng.uniform(-2, 2, d + 1)) for i in range(n_rules)
        )
        model = AnfisModel(tuple(f"x{j}" for j in range(d)), pools, rules)
        n = int(rng.integers(5, 21))
        X = rng.uniform(-2.5, 2.5, (n, d))
        t = rng.uniform(-2, 2, n)
        worst_anfis = max(worst_anfis, finite_diff_check(model, (X, t)))

        hidden = int(rng.integers(3, 11))
        net = init_mlp(d, hidden, seed=int(rng.integers(0, 2**31)))
        Xn = rng.uniform(-1.5, 1.5, (n, d))
        tn = rng.uniform(-2, 2, n)
        worst_mlp = max(worst_mlp, finite_diff_check_mlp(net, (Xn, tn)))
    return worst_anfis, worst_mlp


# --- click wiring ---------------------------------------------------------------


def _common(fn):
    fn = click.option("--out", "out_dir", type=click.Path(), default=None,
                      help="Output directory (overrides output_dir in the config).")(fn)
    fn = click.option("--seed", type=int, default=None,
                      help="Random seed (overrides seed in the config).")(fn)
    fn = click.option("--config", "config_path", type=click.Path(), required=True,
                      help="Path to the YAML run configuration.")(fn)
    return fn


def _run(body, config_path, seed, out_dir, needs_stager=True, **kwargs) -> None:
    stager = None
    try:
        cfg = load_config(config_path, seed, out_dir)
        if needs_stager:
            stager = _Stager(cfg.output_dir)
            body(cfg, stager, **kwargs)
            stager.commit()
        else:
            body(cfg, **kwargs)
    except FuzzycastError as exc:
        if stager is not None:
            stager.abort()
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Neuro-fuzzy forecasting for coupled daily signals."""


@main.command()
@_common
def ingest(config_path, seed, out_dir):
    """Load, align, and dump the supervised rows per subsystem."""
    _run(_cmd_ingest, config_path, seed, out_dir)


@main.command()
@_common
@click.option("--sweep", is_flag=True, default=False,
              help="Train every clustering x trainer combination.")
def train(config_path, seed, out_dir, sweep):
    """Induce and fit one model per subsystem; write models and reports."""
    def body(cfg, stager):
        if sweep:
            cfg = dataclasses.replace(cfg, sweep=True)
        _cmd_train(cfg, stager)

    _run(body, config_path, seed, out_dir)


@main.command()
@_common
def evaluate(config_path, seed, out_dir):
    """Score saved models on both splits and aggregate rollout errors."""
    _run(_cmd_evaluate, config_path, seed, out_dir)


@main.command()
@_common
@click.option("--anchor", default=None,
              help="Anchor day (YYYY-MM-DD); defaults to the last aligned day.")
def forecast(config_path, seed, out_dir, anchor):
    """Roll the coupled predictors forward from one observed day."""
    _run(_cmd_forecast, config_path, seed, out_dir, anchor=anchor)


@main.command()
@_common
def compare(config_path, seed, out_dir):
    """Fit the fuzzy model and the perceptron baseline on identical data."""
    _run(_cmd_compare, config_path, seed, out_dir)


@main.command("cluster-info")
@_common
def cluster_info(config_path, seed, out_dir):
    """Print induced rule centers, widths, and member counts."""
    _run(_cmd_cluster_info, config_path, seed, out_dir, needs_stager=False)


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Optional config; only its seed is used.")
@click.option("--seed", type=int, default=None, help="Random seed.")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Ignored.")
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--threshold", type=float, default=1e-6, show_default=True)
def gradcheck(config_path, seed, out_dir, trials, threshold):
    """Verify analytic gradients against finite differences."""
    try:
        if seed is None and config_path is not None:
            seed = load_config(config_path).seed
        if seed is None:
            raise ConfigError("a seed is required: pass --seed or --config")
        worst_anfis, worst_mlp = run_gradient_suite(seed, trials)
    except FuzzycastError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    worst = max(worst_anfis, worst_mlp)
    verdict = "PASS" if worst < threshold else "FAIL"
    click.echo(
        f"gradient suite: {trials} trials, worst relative error "
        f"{worst_anfis:.3e} (fuzzy) / {worst_mlp:.3e} (network), "
        f"threshold {threshold:g}: {verdict}"
    )
    if verdict == "FAIL":
        sys.exit(1)


if __name__ == "__main__":
    main()
