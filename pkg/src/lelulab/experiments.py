"""Experiment orchestration: JSON configs, seeded runs and sweeps with
persisted artifacts, the flexibility table, and the single-neuron study."""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .activations import (
    PARAMETRIC_KINDS,
    ActivationKind,
    ActivationSpec,
    FlexibilityScore,
    evaluate as act_evaluate,
    flexibility_score,
)
from .datasets import (
    DatasetKind,
    DatasetSpec,
    RegressionDataset,
    build_dataset,
    dense_eval_points,
    load_csv,
    normalize,
    power_transform,
    save_csv,
)
from .diffusion import diffusion_mse, write_report_csv
from .network import (
    Network,
    NetworkSpec,
    init_he_normal,
    load_checkpoint,
    predict_batch,
    save_checkpoint,
)
from .optim import (
    DivergenceError,
    LossKind,
    LRSchedule,
    RegKind,
    Regularization,
    TrainConfig,
    fit,
)


class ConfigError(ValueError):
    """A config file that cannot be turned into a valid experiment."""


# ---------------------------------------------------------------- configs


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetSpec
    network: NetworkSpec
    training: TrainConfig
    seeds: tuple[int, ...]
    output_dir: str
    dense_eval_points: int | None = None

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError(f"seeds must be distinct, got {self.seeds}")
        if self.dataset.path is None and self.network.input_dim != len(self.dataset.points):
            raise ConfigError(
                f"network.input_dim={self.network.input_dim} does not match "
                f"a {len(self.dataset.points)}-dimensional dataset"
            )


@dataclass(frozen=True)
class SweepOverride:
    """Per-cell tweak: applies where the stated depth/width match."""

    depth: int | None = None
    width: int | None = None
    lr_initial: float | None = None

    def matches(self, depth: int, width: int) -> bool:
        return (self.depth is None or self.depth == depth) and (
            self.width is None or self.width == width
        )


@dataclass(frozen=True)
class SweepConfig:
    template: ExperimentConfig
    depths: tuple[int, ...]
    widths: tuple[int, ...]
    activations: tuple[ActivationSpec, ...]
    overrides: tuple[SweepOverride, ...] = ()

    def __post_init__(self):
        if not (self.depths and self.widths and self.activations):
            raise ConfigError("depths, widths and activations must be non-empty")


def _take(d: dict, key, ctx: str, required: bool = True, default=None):
    if key not in d:
        if required:
            raise ConfigError(f"{ctx}: missing key '{key}'")
        return default
    return d[key]


def _reject_unknown(d: dict, allowed: set, ctx: str) -> None:
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"{ctx}: unknown keys {sorted(extra)}")


def _build(ctx: str, factory, *args, **kwargs):
    try:
        return factory(*args, **kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{ctx}: {exc}") from None


def parse_activation(d, ctx: str = "activation") -> ActivationSpec:
    if not isinstance(d, dict):
        raise ConfigError(f"{ctx}: expected an object")
    _reject_unknown(d, {"kind", "param", "trainable"}, ctx)
    kind_name = _take(d, "kind", ctx)
    try:
        kind = ActivationKind(kind_name)
    except ValueError:
        raise ConfigError(f"{ctx}: unknown activation kind {kind_name!r}") from None
    param = float(d.get("param", 0.0))
    trainable = bool(d.get("trainable", False))
    return _build(ctx, ActivationSpec, kind=kind, param=param, trainable=trainable)


def parse_dataset(d, ctx: str = "dataset") -> DatasetSpec:
    if not isinstance(d, dict):
        raise ConfigError(f"{ctx}: expected an object")
    _reject_unknown(d, {"kind", "points", "shift", "path", "power_exponent"}, ctx)
    kind_name = _take(d, "kind", ctx)
    try:
        kind = DatasetKind(kind_name)
    except ValueError:
        raise ConfigError(f"{ctx}: unknown dataset kind {kind_name!r}") from None
    points = _take(d, "points", ctx)
    if isinstance(points, int):
        points = (points,)
    elif isinstance(points, (list, tuple)) and all(isinstance(p, int) for p in points):
        points = tuple(points)
    else:
        raise ConfigError(f"{ctx}: points must be an int or a list of ints")
    return _build(
        ctx,
        DatasetSpec,
        kind=kind,
        points=points,
        shift=float(d.get("shift", 0.0)),
        path=d.get("path"),
        power_exponent=float(d.get("power_exponent", 1.0)),
    )


def parse_network(d, ctx: str = "network") -> NetworkSpec:
    if not isinstance(d, dict):
        raise ConfigError(f"{ctx}: expected an object")
    _reject_unknown(d, {"input_dim", "depth", "width", "activation"}, ctx)
    return _build(
        ctx,
        NetworkSpec,
        input_dim=int(_take(d, "input_dim", ctx)),
        depth=int(_take(d, "depth", ctx)),
        width=int(_take(d, "width", ctx)),
        activation=parse_activation(_take(d, "activation", ctx), ctx + ".activation"),
    )


def parse_training(d, ctx: str = "training") -> TrainConfig:
    if not isinstance(d, dict):
        raise ConfigError(f"{ctx}: expected an object")
    _reject_unknown(
        d, {"epochs", "batch_size", "loss", "lr", "regularization", "seed"}, ctx
    )
    lr = _take(d, "lr", ctx)
    if not isinstance(lr, dict):
        raise ConfigError(f"{ctx}.lr: expected an object")
    _reject_unknown(lr, {"initial", "min", "factor", "patience", "cooldown"}, ctx + ".lr")
    schedule = _build(
        ctx + ".lr",
        LRSchedule,
        initial=float(_take(lr, "initial", ctx + ".lr")),
        minimum=float(_take(lr, "min", ctx + ".lr")),
        factor=float(lr.get("factor", 0.5)),
        patience=int(lr.get("patience", 500)),
        cooldown=int(lr.get("cooldown", 100)),
    )
    reg_d = d.get("regularization")
    if reg_d is None:
        reg = Regularization()
    else:
        if not isinstance(reg_d, dict):
            raise ConfigError(f"{ctx}.regularization: expected an object")
        _reject_unknown(reg_d, {"kind", "strength"}, ctx + ".regularization")
        try:
            reg_kind = RegKind(_take(reg_d, "kind", ctx + ".regularization"))
        except ValueError:
            raise ConfigError(
                f"{ctx}.regularization: unknown kind {reg_d.get('kind')!r}"
            ) from None
        reg = _build(
            ctx + ".regularization",
            Regularization,
            kind=reg_kind,
            strength=float(_take(reg_d, "strength", ctx + ".regularization")),
        )
    try:
        loss = LossKind(_take(d, "loss", ctx))
    except ValueError:
        raise ConfigError(f"{ctx}: unknown loss {d.get('loss')!r}") from None
    return _build(
        ctx,
        TrainConfig,
        epochs=int(_take(d, "epochs", ctx)),
        batch_size=int(_take(d, "batch_size", ctx)),
        loss=loss,
        schedule=schedule,
        regularization=reg,
        seed=int(d.get("seed", 0)),
    )


def parse_experiment(d, ctx: str = "config") -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError(f"{ctx}: expected a JSON object")
    _reject_unknown(
        d,
        {"dataset", "network", "training", "replicates", "seeds", "dense_eval_points", "output_dir"},
        ctx,
    )
    training = parse_training(_take(d, "training", ctx), ctx + ".training")
    if "seeds" in d:
        seeds_raw = d["seeds"]
        if not isinstance(seeds_raw, list) or not all(isinstance(s, int) for s in seeds_raw):
            raise ConfigError(f"{ctx}: seeds must be a list of ints")
        seeds = tuple(seeds_raw)
    else:
        replicates = int(d.get("replicates", 1))
        if replicates < 1:
            raise ConfigError(f"{ctx}: replicates must be >= 1")
        seeds = tuple(training.seed + i for i in range(replicates))
    dense = d.get("dense_eval_points")
    return _build(
        ctx,
        ExperimentConfig,
        dataset=parse_dataset(_take(d, "dataset", ctx), ctx + ".dataset"),
        network=parse_network(_take(d, "network", ctx), ctx + ".network"),
        training=training,
        seeds=seeds,
        output_dir=str(_take(d, "output_dir", ctx)),
        dense_eval_points=None if dense is None else int(dense),
    )


def parse_sweep(d, ctx: str = "sweep") -> SweepConfig:
    if not isinstance(d, dict):
        raise ConfigError(f"{ctx}: expected a JSON object")
    _reject_unknown(d, {"template", "depths", "widths", "activations", "overrides"}, ctx)
    template = parse_experiment(_take(d, "template", ctx), ctx + ".template")
    depths = _take(d, "depths", ctx)
    widths = _take(d, "widths", ctx)
    for name, lst in (("depths", depths), ("widths", widths)):
        if not isinstance(lst, list) or not all(isinstance(v, int) for v in lst):
            raise ConfigError(f"{ctx}: {name} must be a list of ints")
    acts = _take(d, "activations", ctx)
    if not isinstance(acts, list):
        raise ConfigError(f"{ctx}: activations must be a list")
    activations = tuple(
        parse_activation(a, f"{ctx}.activations[{i}]") for i, a in enumerate(acts)
    )
    overrides = []
    for i, o in enumerate(d.get("overrides", [])):
        octx = f"{ctx}.overrides[{i}]"
        if not isinstance(o, dict):
            raise ConfigError(f"{octx}: expected an object")
        _reject_unknown(o, {"depth", "width", "lr_initial"}, octx)
        overrides.append(
            _build(
                octx,
                SweepOverride,
                depth=None if o.get("depth") is None else int(o["depth"]),
                width=None if o.get("width") is None else int(o["width"]),
                lr_initial=None if o.get("lr_initial") is None else float(o["lr_initial"]),
            )
        )
    return _build(
        ctx,
        SweepConfig,
        template=template,
        depths=tuple(depths),
        widths=tuple(widths),
        activations=activations,
        overrides=tuple(overrides),
    )


def load_experiment_config(path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_experiment(raw, str(path))


def load_sweep_config(path) -> SweepConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_sweep(raw, str(path))


def config_to_dict(config: ExperimentConfig) -> dict:
    """Canonical JSON form of a resolved config (stable across processes)."""
    ds, net, tr = config.dataset, config.network, config.training
    return {
        "dataset": {
            "kind": ds.kind.value,
            "points": list(ds.points),
            "shift": ds.shift,
            "path": ds.path,
            "power_exponent": ds.power_exponent,
        },
        "network": {
            "input_dim": net.input_dim,
            "depth": net.depth,
            "width": net.width,
            "activation": {
                "kind": net.activation.kind.value,
                "param": net.activation.param,
                "trainable": net.activation.trainable,
            },
        },
        "training": {
            "epochs": tr.epochs,
            "batch_size": tr.batch_size,
            "loss": tr.loss.value,
            "lr": {
                "initial": tr.schedule.initial,
                "min": tr.schedule.minimum,
                "factor": tr.schedule.factor,
                "patience": tr.schedule.patience,
                "cooldown": tr.schedule.cooldown,
            },
            "regularization": {
                "kind": tr.regularization.kind.value,
                "strength": tr.regularization.strength,
            },
            "seed": tr.seed,
        },
        "seeds": list(config.seeds),
        "dense_eval_points": config.dense_eval_points,
        "output_dir": config.output_dir,
    }


# ------------------------------------------------------------------ runs


@dataclass
class RunReport:
    """Outcome of one seeded training run."""

    seed: int
    status: str = "ok"  # ok | diverged | error
    error: str | None = None
    epochs_run: int = 0
    final_loss: float = float("nan")
    final_lr: float = float("nan")
    train_mae: float = float("nan")
    diffusion_mse: float = float("nan")
    flagged_nodes: int = 0
    final_betas: list | None = None
    wall_time_s: float = 0.0
    history_csv: str = "history.csv"
    checkpoint_json: str = "checkpoint.json"

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "status": self.status,
            "error": self.error,
            "epochs_run": self.epochs_run,
            "final_loss": self.final_loss,
            "final_lr": self.final_lr,
            "train_mae": self.train_mae,
            "diffusion_mse": self.diffusion_mse,
            "flagged_nodes": self.flagged_nodes,
            "final_betas": self.final_betas,
            "wall_time_s": self.wall_time_s,
            "history_csv": self.history_csv,
            "checkpoint_json": self.checkpoint_json,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(**d)


def prepare_dataset(spec: DatasetSpec) -> RegressionDataset:
    """Build or load, normalize, and apply the configured power transform."""
    ds = normalize(build_dataset(spec))
    if spec.power_exponent != 1.0:
        ds = power_transform(ds, spec.power_exponent)
    return ds


def _resolved_dense(config: ExperimentConfig, ds: RegressionDataset) -> int:
    if config.dense_eval_points is not None:
        return config.dense_eval_points
    return 201 if ds.input_dim == 1 else 21


def _write_prediction_csv(net: Network, ds: RegressionDataset, per_axis: int, path) -> None:
    points = dense_eval_points(ds, per_axis)
    preds = predict_batch(net, points)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{k + 1}" for k in range(ds.input_dim)] + ["prediction"])
        for row, p in zip(points, preds):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(p))])


def run_single(config: ExperimentConfig, seed: int, run_dir) -> RunReport:
    """Train one replicate and persist every artifact under run_dir."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    ds = prepare_dataset(config.dataset)
    if ds.input_dim != config.network.input_dim:
        raise ConfigError(
            f"network.input_dim={config.network.input_dim} does not match "
            f"the {ds.input_dim}-dimensional dataset"
        )
    with open(run_dir / "config.json", "w") as fh:
        json.dump(config_to_dict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")
    save_csv(ds, run_dir / "dataset.csv")

    net = init_he_normal(config.network, seed=seed)
    train_cfg = replace(config.training, seed=seed)
    t0 = time.perf_counter()
    try:
        net, history = fit(net, (ds.xs, ds.ys), train_cfg)
    except DivergenceError as exc:
        report = RunReport(seed=seed, status="diverged", error=str(exc), epochs_run=exc.epoch)
        report.wall_time_s = time.perf_counter() - t0
        _write_report(report, run_dir)
        return report

    save_checkpoint(net, run_dir / "checkpoint.json")
    history.to_csv(run_dir / "history.csv")
    preds = predict_batch(net, ds.xs)
    train_mae = float(np.mean(np.abs(preds - ds.ys)))
    diff = diffusion_mse(ds.grid, lambda pts: predict_batch(net, pts))
    write_report_csv(diff, run_dir / "diffusion.csv")
    _write_prediction_csv(net, ds, _resolved_dense(config, ds), run_dir / "prediction.csv")

    report = RunReport(
        seed=seed,
        epochs_run=len(history.losses),
        final_loss=history.losses[-1],
        final_lr=history.rates[-1],
        train_mae=train_mae,
        diffusion_mse=diff.mse,
        flagged_nodes=diff.flagged_nodes,
        final_betas=None if net.act_params is None else [float(b) for b in net.act_params],
    )
    report.wall_time_s = time.perf_counter() - t0
    _write_report(report, run_dir)
    return report


def _write_report(report: RunReport, run_dir: Path) -> None:
    with open(run_dir / "report.json", "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_report(run_dir) -> RunReport:
    with open(Path(run_dir) / "report.json") as fh:
        return RunReport.from_dict(json.load(fh))


def reevaluate_run(run_dir) -> dict:
    """Recompute training MAE and diffusion MSE from persisted artifacts."""
    run_dir = Path(run_dir)
    net = load_checkpoint(run_dir / "checkpoint.json")
    ds = load_csv(run_dir / "dataset.csv")
    preds = predict_batch(net, ds.xs)
    diff = diffusion_mse(ds.grid, lambda pts: predict_batch(net, pts))
    return {
        "train_mae": float(np.mean(np.abs(preds - ds.ys))),
        "diffusion_mse": diff.mse,
        "flagged_nodes": diff.flagged_nodes,
    }


def _run_task(task: tuple) -> RunReport:
    config, seed, run_dir = task
    return run_single(config, seed, run_dir)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> list[RunReport]:
    """One run per configured seed, each in output_dir/seed_<s>/."""
    out = Path(config.output_dir)
    tasks = [(config, s, out / f"seed_{s}") for s in config.seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_task, tasks))
    return [_run_task(t) for t in tasks]


# ----------------------------------------------------------------- sweeps


def activation_label(spec: ActivationSpec) -> str:
    if spec.kind in PARAMETRIC_KINDS:
        return f"{spec.kind.value}{spec.param:g}"
    return spec.kind.value


def size_index(depth: int, width: int) -> float:
    """Parameter-count proxy m^n / 1e12 used to order sweep results."""
    return float(width) ** depth / 1e12


def sweep_cells(sweep: SweepConfig) -> list[ExperimentConfig]:
    """Materialize the cell configs of the depth x width x activation grid."""
    cells = []
    base = sweep.template
    for act in sweep.activations:
        for depth in sweep.depths:
            for width in sweep.widths:
                net = NetworkSpec(
                    input_dim=base.network.input_dim, depth=depth, width=width, activation=act
                )
                training = base.training
                for ov in sweep.overrides:
                    if ov.matches(depth, width) and ov.lr_initial is not None:
                        training = replace(
                            training, schedule=replace(training.schedule, initial=ov.lr_initial)
                        )
                label = f"{activation_label(act)}_d{depth}_w{width}"
                cells.append(
                    replace(
                        base,
                        network=net,
                        training=training,
                        output_dir=str(Path(base.output_dir) / label),
                    )
                )
    return cells


def _sweep_task(task: tuple) -> RunReport:
    try:
        return _run_task(task)
    except Exception as exc:  # noqa: BLE001 - failed cells must not kill the sweep
        _, seed, run_dir = task
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        report = RunReport(seed=seed, status="error", error=f"{type(exc).__name__}: {exc}")
        _write_report(report, run_dir)
        return report


def run_sweep(sweep: SweepConfig, jobs: int = 1) -> list[dict]:
    """Run every cell x seed, then write one summary.csv over all runs."""
    cells = sweep_cells(sweep)
    tasks = []
    keys = []
    for cell in cells:
        for seed in cell.seeds:
            tasks.append((cell, seed, Path(cell.output_dir) / f"seed_{seed}"))
            keys.append((cell.network, cell.network.activation, seed))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_sweep_task, tasks))
    else:
        reports = [_sweep_task(t) for t in tasks]

    rows = []
    for (net, act, seed), report in zip(keys, reports):
        rows.append(
            {
                "activation": act.kind.value,
                "param": act.param,
                "depth": net.depth,
                "width": net.width,
                "size_index": size_index(net.depth, net.width),
                "seed": seed,
                "status": report.status,
                "final_loss": report.final_loss,
                "train_mae": report.train_mae,
                "diffusion_mse": report.diffusion_mse,
                "flagged_nodes": report.flagged_nodes,
            }
        )
    rows.sort(key=lambda r: (r["size_index"], r["activation"], r["param"], r["seed"]))
    write_summary_csv(rows, Path(sweep.template.output_dir) / "summary.csv")
    return rows


SUMMARY_COLUMNS = [
    "activation",
    "param",
    "depth",
    "width",
    "size_index",
    "seed",
    "status",
    "final_loss",
    "train_mae",
    "diffusion_mse",
    "flagged_nodes",
]


def write_summary_csv(rows: list[dict], path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow(
                [repr(row[c]) if isinstance(row[c], float) else row[c] for c in SUMMARY_COLUMNS]
            )


def read_summary_csv(path) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            row = dict(rec)
            for c in ("param", "size_index", "final_loss", "train_mae", "diffusion_mse"):
                row[c] = float(row[c])
            for c in ("depth", "width", "seed", "flagged_nodes"):
                row[c] = int(row[c])
            rows.append(row)
    return rows


# ---------------------------------------------------- single-neuron study

NEURON_GRID = np.linspace(-10.0, 10.0, 201)
VANISHING_THRESHOLD = 1e-3

NEURON_STUDY_ACTIVATIONS = (
    ActivationSpec(ActivationKind.RELU),
    ActivationSpec(ActivationKind.LEAKY_RELU, param=0.2),
    ActivationSpec(ActivationKind.ELU),
    ActivationSpec(ActivationKind.SILU),
    ActivationSpec(ActivationKind.SOFTPLUS),
    ActivationSpec(ActivationKind.LELU, param=0.4),
)


@dataclass
class NeuronRecord:
    """One activation's best single-neuron fit and its loss geometry."""

    activation: ActivationSpec
    w: float
    b: float
    a: float
    c: float
    outer_residual: float
    middle_error: float
    grad: np.ndarray
    grad_norm: float
    hessian: np.ndarray
    condition_number: float
    vanishing: bool


def _neuron_loss(spec: ActivationSpec, xs: np.ndarray, ys: np.ndarray, p: np.ndarray) -> float:
    w, b, a, c = p
    preds = a * act_evaluate(spec, w * xs + b) + c
    return float(np.mean((preds - ys) ** 2))


def _fd_gradient(f, p: np.ndarray, h: float = 1e-5) -> np.ndarray:
    def at(step):
        g = np.zeros(p.size)
        for i in range(p.size):
            e = np.zeros(p.size)
            e[i] = step
            g[i] = (f(p + e) - f(p - e)) / (2.0 * step)
        return g

    coarse, fine = at(h), at(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def _fd_hessian(f, p: np.ndarray, h: float = 1e-5) -> np.ndarray:
    def at(step):
        n = p.size
        H = np.zeros((n, n))
        f0 = f(p)
        for i in range(n):
            ei = np.zeros(n)
            ei[i] = step
            H[i, i] = (f(p + ei) - 2.0 * f0 + f(p - ei)) / step**2
            for j in range(i + 1, n):
                ej = np.zeros(n)
                ej[j] = step
                H[i, j] = H[j, i] = (
                    f(p + ei + ej) - f(p + ei - ej) - f(p - ei + ej) + f(p - ei - ej)
                ) / (4.0 * step**2)
        return H

    coarse, fine = at(h), at(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def fit_single_neuron(spec: ActivationSpec, xs: np.ndarray, ys: np.ndarray) -> NeuronRecord:
    """Best y = a phi(w x + b) + c interpolating the outer points.

    (w, b) candidates come from a fixed uniform grid; for each, (a, c) solves
    the 2x2 linear system through the outer points (near-singular candidates
    skipped) and the winner minimizes the absolute middle-point error.
    """
    x1, x2, x3 = xs
    y1, y2, y3 = ys
    W = NEURON_GRID[:, None]
    B = NEURON_GRID[None, :]
    phi1 = act_evaluate(spec, W * x1 + B)
    phi2 = act_evaluate(spec, W * x2 + B)
    phi3 = act_evaluate(spec, W * x3 + B)
    denom = phi3 - phi1
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (y3 - y1) / denom
        c = y1 - a * phi1
        err = a * phi2 + c - y2
    err[np.abs(denom) <= 1e-12] = np.inf
    err[~np.isfinite(err)] = np.inf
    iw, ib = np.unravel_index(np.argmin(np.abs(err)), err.shape)
    w, b = float(NEURON_GRID[iw]), float(NEURON_GRID[ib])
    a, c = float(a[iw, ib]), float(c[iw, ib])

    preds = a * act_evaluate(spec, w * xs + b) + c
    outer_residual = float(max(abs(preds[0] - y1), abs(preds[2] - y3)))
    middle_error = float(preds[1] - y2)

    p = np.array([w, b, a, c])
    loss = lambda q: _neuron_loss(spec, xs, ys, q)
    grad = _fd_gradient(loss, p)
    hess = _fd_hessian(loss, p)
    hess = 0.5 * (hess + hess.T)
    eigs = np.abs(np.linalg.eigvalsh(hess))
    cond = float("inf") if eigs.min() == 0.0 else float(eigs.max() / eigs.min())
    grad_norm = float(np.linalg.norm(grad))
    return NeuronRecord(
        activation=spec,
        w=w,
        b=b,
        a=a,
        c=c,
        outer_residual=outer_residual,
        middle_error=middle_error,
        grad=grad,
        grad_norm=grad_norm,
        hessian=hess,
        condition_number=cond,
        vanishing=grad_norm < VANISHING_THRESHOLD,
    )


def single_neuron_study(
    xs: np.ndarray, ys: np.ndarray, activations=NEURON_STUDY_ACTIVATIONS
) -> list[NeuronRecord]:
    """Run the 3-point interpolation study for each activation."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != (3,) or ys.shape != (3,):
        raise ValueError("the study needs exactly 3 points")
    if not (xs[0] < xs[1] < xs[2]):
        raise ValueError("abscissae must be strictly increasing")
    return [fit_single_neuron(spec, xs, ys) for spec in activations]


def write_neuron_csv(records: list[NeuronRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "activation",
                "param",
                "w",
                "b",
                "a",
                "c",
                "outer_residual",
                "middle_error",
                "grad_norm",
                "condition_number",
                "vanishing",
            ]
        )
        for r in records:
            writer.writerow(
                [
                    r.activation.kind.value,
                    repr(r.activation.param),
                    repr(r.w),
                    repr(r.b),
                    repr(r.a),
                    repr(r.c),
                    repr(r.outer_residual),
                    repr(r.middle_error),
                    repr(r.grad_norm),
                    repr(r.condition_number),
                    int(r.vanishing),
                ]
            )


# ------------------------------------------------------ flexibility table

FLEX_TABLE_ACTIVATIONS = (
    ActivationSpec(ActivationKind.LU),
    ActivationSpec(ActivationKind.TANH),
    ActivationSpec(ActivationKind.RELU),
    ActivationSpec(ActivationKind.ELU),
    ActivationSpec(ActivationKind.LEAKY_RELU, param=0.2),
    ActivationSpec(ActivationKind.SILU),
    ActivationSpec(ActivationKind.SOFTPLUS),
    ActivationSpec(ActivationKind.LELU, param=0.2),
    ActivationSpec(ActivationKind.LELU, param=0.3),
    ActivationSpec(ActivationKind.LELU, param=0.4),
    ActivationSpec(ActivationKind.LELU, param=0.6),
)


def flexibility_table() -> list[tuple[ActivationSpec, FlexibilityScore]]:
    return [(spec, flexibility_score(spec)) for spec in FLEX_TABLE_ACTIVATIONS]


def write_flex_csv(path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["activation", "param", "eta", "min_slope", "max_slope"])
        for spec, score in flexibility_table():
            writer.writerow(
                [
                    spec.kind.value,
                    repr(spec.param),
                    repr(score.eta),
                    repr(score.min_slope),
                    repr(score.max_slope),
                ]
            )
