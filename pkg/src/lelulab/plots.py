"""SVG plot emission from persisted run and sweep artifacts.

matplotlib is imported lazily with the Agg backend so headless use and the
non-plotting code paths never pay for it.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .datasets import load_csv
from .experiments import read_summary_csv
from .network import load_checkpoint, predict_batch


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def parse_slice(text: str, ndim: int) -> dict[int, float]:
    """'x2=3,x3=1' -> {1: 3.0, 2: 1.0}; exactly one axis must stay free."""
    fixed = {}
    for part in text.split(","):
        part = part.strip()
        if "=" not in part:
            raise ValueError(f"bad slice component {part!r}, expected xK=value")
        name, _, val = part.partition("=")
        if not (name.startswith("x") and name[1:].isdigit()):
            raise ValueError(f"bad axis name {name!r}")
        k = int(name[1:]) - 1
        if not 0 <= k < ndim:
            raise ValueError(f"axis {name} out of range for {ndim} dimensions")
        if k in fixed:
            raise ValueError(f"axis {name} fixed twice")
        fixed[k] = float(val)
    if len(fixed) != ndim - 1:
        raise ValueError(f"slice must fix {ndim - 1} of {ndim} axes, got {len(fixed)}")
    return fixed


def _read_prediction_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = np.asarray([[float(v) for v in row] for row in reader])
    return header, rows


def plot_prediction_1d(run_dir, out_dir) -> Path:
    """Dense prediction curve over the training points."""
    run_dir, out_dir = Path(run_dir), Path(out_dir)
    plt = _plt()
    _, pred = _read_prediction_csv(run_dir / "prediction.csv")
    ds = load_csv(run_dir / "dataset.csv")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(pred[:, 0], pred[:, 1], label="prediction", color="tab:blue")
    ax.plot(ds.xs[:, 0], ds.ys, "o", label="training points", color="tab:red")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend()
    ax.grid(True, alpha=0.3)
    out = out_dir / "prediction.svg"
    fig.savefig(out, format="svg", bbox_inches="tight")
    plt.close(fig)
    return out


def plot_slice(run_dir, out_dir, fixed: dict[int, float], dense: int = 201) -> Path:
    """Prediction along the free axis with the other coordinates snapped to
    the nearest lattice values; training points on that lattice line shown."""
    run_dir, out_dir = Path(run_dir), Path(out_dir)
    plt = _plt()
    ds = load_csv(run_dir / "dataset.csv")
    net = load_checkpoint(run_dir / "checkpoint.json")
    d = ds.input_dim
    (free,) = [k for k in range(d) if k not in fixed]
    snapped = {}
    for k, v in fixed.items():
        axis = ds.grid.axes[k]
        snapped[k] = float(axis[np.argmin(np.abs(axis - v))])

    free_axis = ds.grid.axes[free]
    xs_dense = np.linspace(free_axis[0], free_axis[-1], dense)
    points = np.empty((dense, d))
    points[:, free] = xs_dense
    for k, v in snapped.items():
        points[:, k] = v
    preds = predict_batch(net, points)

    mask = np.ones(ds.xs.shape[0], dtype=bool)
    for k, v in snapped.items():
        mask &= ds.xs[:, k] == v
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs_dense, preds, label="prediction", color="tab:blue")
    ax.plot(ds.xs[mask, free], ds.ys[mask], "o", label="training points", color="tab:red")
    ax.set_xlabel(f"x{free + 1}")
    ax.set_ylabel("y")
    ax.set_title(", ".join(f"x{k + 1}={snapped[k]:g}" for k in sorted(snapped)))
    ax.legend()
    ax.grid(True, alpha=0.3)
    name = "slice_" + "_".join(f"x{k + 1}={snapped[k]:g}" for k in sorted(snapped)) + ".svg"
    out = out_dir / name
    fig.savefig(out, format="svg", bbox_inches="tight")
    plt.close(fig)
    return out


def _scatter_metric(rows, metric, ylabel, out):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = sorted({f"{r['activation']} {r['param']:g}" for r in rows})
    for label in labels:
        pts = [
            (r["size_index"], r[metric])
            for r in rows
            if f"{r['activation']} {r['param']:g}" == label and r["status"] == "ok"
        ]
        if not pts:
            continue
        xs, ys = zip(*pts)
        ax.scatter(xs, ys, label=label, s=18)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("size index $m^n / 10^{12}$")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3, which="both")
    fig.savefig(out, format="svg", bbox_inches="tight")
    plt.close(fig)
    return out


def plot_sweep(sweep_dir, out_dir) -> list[Path]:
    """Two log-log scatters: size index vs MAE and vs diffusion MSE."""
    sweep_dir, out_dir = Path(sweep_dir), Path(out_dir)
    rows = read_summary_csv(sweep_dir / "summary.csv")
    return [
        _scatter_metric(rows, "train_mae", "training MAE", out_dir / "mae_vs_size.svg"),
        _scatter_metric(
            rows, "diffusion_mse", "diffusion MSE", out_dir / "diffusion_vs_size.svg"
        ),
    ]


def plot_run(run_dir, out_dir, slices: list[str] = ()) -> list[Path]:
    """Dispatch on artifacts: sweep directory, 1d run, or sliced d-d run."""
    run_dir, out_dir = Path(run_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if (run_dir / "summary.csv").exists():
        return plot_sweep(run_dir, out_dir)
    if not (run_dir / "dataset.csv").exists():
        raise FileNotFoundError(f"{run_dir} contains neither summary.csv nor run artifacts")
    ds = load_csv(run_dir / "dataset.csv")
    if ds.input_dim == 1:
        return [plot_prediction_1d(run_dir, out_dir)]
    if not slices:
        # default slice: fix all but the first axis at their middle nodes
        mids = {k: float(ds.grid.axes[k][ds.grid.axes[k].size // 2]) for k in range(1, ds.input_dim)}
        return [plot_slice(run_dir, out_dir, mids)]
    return [plot_slice(run_dir, out_dir, parse_slice(s, ds.input_dim)) for s in slices]
