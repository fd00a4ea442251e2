"""Lattice regression datasets: analytic 1d benchmarks, a synthetic 3d motor
map, normalization to unit index coordinates, and CSV round-tripping."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .diffusion import StructuredGrid

TARGET_FLOOR = 1e-3


class DatasetKind(Enum):
    TANH = "tanh"
    EXP = "exp"
    MOTOR = "motor"


@dataclass(frozen=True)
class DatasetSpec:
    """Recipe for building a dataset; path overrides the generators."""

    kind: DatasetKind
    points: tuple[int, ...]
    shift: float = 0.0
    path: str | None = None
    power_exponent: float = 1.0

    def __post_init__(self):
        if any(n < 2 for n in self.points):
            raise ValueError(f"points {self.points} must all be >= 2")
        if self.power_exponent <= 0.0:
            raise ValueError("power_exponent must be positive")


@dataclass(frozen=True)
class AffineMap:
    """physical = offset + scale * normalized."""

    offset: float = 0.0
    scale: float = 1.0

    def to_physical(self, u):
        return self.offset + self.scale * np.asarray(u, dtype=float)

    def to_normalized(self, x):
        return (np.asarray(x, dtype=float) - self.offset) / self.scale

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """Map through inner first, then self."""
        return AffineMap(offset=self.offset + self.scale * inner.offset, scale=self.scale * inner.scale)


@dataclass(frozen=True)
class NormalizationRecord:
    """How to go from normalized back to physical coordinates and targets."""

    axis_maps: tuple[AffineMap, ...]
    target_shift: float = 0.0

    def targets_to_physical(self, y):
        return np.asarray(y, dtype=float) - self.target_shift


@dataclass
class RegressionDataset:
    """A structured grid plus the bookkeeping to undo its transforms."""

    grid: StructuredGrid
    normalization: NormalizationRecord = None
    power_exponent: float = 1.0

    def __post_init__(self):
        if self.normalization is None:
            self.normalization = NormalizationRecord(
                axis_maps=tuple(AffineMap() for _ in range(self.grid.ndim))
            )

    @property
    def xs(self) -> np.ndarray:
        return self.grid.lattice_points()

    @property
    def ys(self) -> np.ndarray:
        return self.grid.values.ravel()

    @property
    def input_dim(self) -> int:
        return self.grid.ndim


def gen_tanh(points: int, shift: float = 0.0) -> RegressionDataset:
    """Sigmoid ramp 0.5 + 0.5 tanh(5 x) sampled uniformly on [-1, 1].

    A nonzero shift translates the abscissa only; targets are unchanged, so
    shifted and unshifted variants are the same problem in different
    coordinates.
    """
    base = np.linspace(-1.0, 1.0, points)
    values = 0.5 + 0.5 * np.tanh(5.0 * base)
    return RegressionDataset(grid=StructuredGrid(axes=[base + shift], values=values))


def gen_exp(points: int, shift: float = 0.0) -> RegressionDataset:
    """Decaying exponential 0.1^x sampled uniformly on [-1, 1]."""
    base = np.linspace(-1.0, 1.0, points)
    values = 0.1**base
    return RegressionDataset(grid=StructuredGrid(axes=[base + shift], values=values))


_MOTOR_AXES = (
    (1000.0, 10000.0),  # speed
    (10.0, 150.0),  # torque
    (20.0, 100.0),  # temperature
)


def gen_motor_surrogate(points: tuple[int, int, int] = (19, 15, 5)) -> RegressionDataset:
    """Synthetic 3d efficiency-map stand-in on a speed/torque/temperature box.

    Strictly positive, smooth, with fast variation along the first axis,
    faster along the second, a mild third-axis spread that collapses near the
    low corners of the other two, and a bump near the first-axis maximum.
    """
    n1, n2, n3 = points
    axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(_MOTOR_AXES, points)]
    u = np.linspace(0.0, 1.0, n1)[:, None, None]
    v = np.linspace(0.0, 1.0, n2)[None, :, None]
    w = np.linspace(0.0, 1.0, n3)[None, None, :]
    values = (
        1.0
        + 2.0 * np.exp(-3.0 * u)
        + 3.0 * np.exp(-8.0 * v)
        + 0.6 * u * v * (w - 0.5)
        + 0.4 * np.exp(-(((u - 0.85) / 0.12) ** 2))
    )
    values = np.broadcast_to(values, points).copy()
    return RegressionDataset(grid=StructuredGrid(axes=axes, values=values))


def build_dataset(spec: DatasetSpec) -> RegressionDataset:
    """Generate (or load) the raw, unnormalized dataset a spec describes."""
    if spec.path is not None:
        return load_csv(spec.path)
    if spec.kind is DatasetKind.TANH:
        (n,) = spec.points
        return gen_tanh(n, shift=spec.shift)
    if spec.kind is DatasetKind.EXP:
        (n,) = spec.points
        return gen_exp(n, shift=spec.shift)
    if spec.kind is DatasetKind.MOTOR:
        if len(spec.points) != 3:
            raise ValueError("motor dataset needs three lattice sizes")
        if spec.shift != 0.0:
            raise ValueError("shift applies to 1d datasets only")
        return gen_motor_surrogate(spec.points)
    raise ValueError(f"unknown dataset kind {spec.kind}")


def normalize(ds: RegressionDataset) -> RegressionDataset:
    """Rescale every axis to indices 0..n-1 and lift targets above zero.

    Targets are shifted (to a floor of TARGET_FLOOR) only when some value is
    nonpositive; strictly positive data passes through untouched. Applying
    normalize twice is the same as applying it once.
    """
    new_axes = []
    new_maps = []
    for axis, old_map in zip(ds.grid.axes, ds.normalization.axis_maps):
        step = axis[1] - axis[0]
        local = AffineMap(offset=float(axis[0]), scale=float(step))
        new_axes.append(np.arange(axis.size, dtype=float))
        new_maps.append(old_map.compose(local))
    values = ds.grid.values
    extra_shift = 0.0
    vmin = float(values.min())
    if vmin <= 0.0:
        extra_shift = TARGET_FLOOR - vmin
        values = values + extra_shift
    record = NormalizationRecord(
        axis_maps=tuple(new_maps),
        target_shift=ds.normalization.target_shift + extra_shift,
    )
    return RegressionDataset(
        grid=StructuredGrid(axes=new_axes, values=values),
        normalization=record,
        power_exponent=ds.power_exponent,
    )


def power_transform(ds: RegressionDataset, exponent: float) -> RegressionDataset:
    """Raise the (positive) targets to a power, typically 0.1, to compress
    dynamic range before training."""
    if exponent <= 0.0:
        raise ValueError("exponent must be positive")
    if np.any(ds.grid.values <= 0.0):
        raise ValueError("power transform requires strictly positive targets")
    grid = StructuredGrid(axes=[a.copy() for a in ds.grid.axes], values=ds.grid.values**exponent)
    return RegressionDataset(
        grid=grid,
        normalization=ds.normalization,
        power_exponent=ds.power_exponent * exponent,
    )


def inverse_power(ds: RegressionDataset, predictions: np.ndarray) -> np.ndarray:
    """Undo the accumulated power transform on model outputs."""
    preds = np.asarray(predictions, dtype=float)
    if ds.power_exponent == 1.0:
        return preds
    return preds ** (1.0 / ds.power_exponent)


def save_csv(ds: RegressionDataset, path) -> None:
    """Row-major lattice dump, one row per node, full float precision."""
    d = ds.grid.ndim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{k + 1}" for k in range(d)] + ["y"])
        xs = ds.grid.lattice_points()
        ys = ds.grid.values.ravel()
        for row, y in zip(xs, ys):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(y))])


def load_csv(path) -> RegressionDataset:
    """Read a lattice CSV back into a dataset.

    The rows may arrive in any order but must form a complete lattice: the
    Cartesian product of the distinct values found in each coordinate column,
    each node exactly once.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        d = len(header) - 1
        if d < 1 or header[-1] != "y" or header[:-1] != [f"x{k + 1}" for k in range(d)]:
            raise ValueError(f"{path}: bad header {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 1:
                raise ValueError(f"{path}: line {lineno} has {len(row)} fields, expected {d + 1}")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ValueError(f"{path}: line {lineno} is not numeric") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.asarray(rows)
    axes = [np.unique(data[:, k]) for k in range(d)]
    shape = tuple(a.size for a in axes)
    expected = int(np.prod(shape))
    values = np.full(shape, np.nan)
    seen = np.zeros(shape, dtype=bool)
    for row in data:
        idx = tuple(int(np.searchsorted(axes[k], row[k])) for k in range(d))
        if seen[idx]:
            raise ValueError(f"{path}: duplicate node at {tuple(row[:d])}")
        seen[idx] = True
        values[idx] = row[d]
    if data.shape[0] != expected or not seen.all():
        missing = np.argwhere(~seen)
        first = tuple(float(axes[k][i]) for k, i in enumerate(missing[0]))
        raise ValueError(f"{path}: incomplete lattice, first missing node {first}")
    return RegressionDataset(grid=StructuredGrid(axes=axes, values=values))


def dense_eval_points(ds: RegressionDataset, per_axis: int) -> np.ndarray:
    """Uniform evaluation lattice spanning the dataset box, row-major."""
    axes = [np.linspace(a[0], a[-1], per_axis) for a in ds.grid.axes]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def shift_dataset(ds: RegressionDataset, shift: float) -> RegressionDataset:
    """Translate every axis by a constant; targets untouched."""
    grid = StructuredGrid(axes=[a + shift for a in ds.grid.axes], values=ds.grid.values.copy())
    return replace(ds, grid=grid)
