"""Staggered-mesh diffusion sensors for localized-overfitting detection.

The true sensor is a normalized absolute second difference of the (positive)
training field at each interior node:

    S_i = (1/D^2) |y_{i+1} - 2 y_i + y_{i-1}| / (y_{i+1} + 2 y_i + y_{i-1})

The testing sensor evaluates the model at the two corner nodes and the two
adjacent cell centroids (half indices) around the node and forms a four-point
second difference with prefactor 1/(3 (D/2)^2):

    T_i = (1/(3 (D/2)^2)) |p_{i+1} - p_{i+1/2} - p_{i-1/2} + p_{i-1}|
                        / (p_{i+1} + p_{i+1/2} + p_{i-1/2} + p_{i-1})

In d dimensions both stencils run along the 2^(d-1) centre-crossing cell
diagonals (antipodal corner pairs counted once) and are summed per node.
Sensors exist only on the interior, where the full stencil is available.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

Predictor = Callable[[np.ndarray], np.ndarray]
"""Maps an (M, d) array of points to (M,) predicted values."""

_SPACING_RTOL = 1e-9


@dataclass
class StructuredGrid:
    """A d-dimensional point lattice with uniform spacing per dimension."""

    axes: list[np.ndarray]
    values: np.ndarray

    def __post_init__(self):
        self.axes = [np.asarray(a, dtype=float) for a in self.axes]
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.shape:
            raise ValueError(f"values shape {self.values.shape} != axes shape {self.shape}")
        for k, axis in enumerate(self.axes):
            if axis.size < 2:
                raise ValueError(f"axis {k} needs at least 2 nodes")
            steps = np.diff(axis)
            if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=_SPACING_RTOL, atol=0.0):
                raise ValueError(f"axis {k} is not uniformly increasing")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(float(a[1] - a[0]) for a in self.axes)

    def uniform_spacing(self) -> float:
        """The common spacing; requires all dimensions to agree."""
        sp = self.spacings
        if any(abs(s - sp[0]) > _SPACING_RTOL * abs(sp[0]) for s in sp[1:]):
            raise ValueError(f"spacings differ across dimensions: {sp}")
        return sp[0]

    def lattice_points(self) -> np.ndarray:
        """All node coordinates, row-major, shape (prod(shape), ndim)."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass
class StaggeredMesh:
    """Cell-centroid lattice interleaving a structured grid (half indices)."""

    axes: list[np.ndarray]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass
class DiffusionReport:
    """Per-interior-node sensors and their aggregate mean squared deviation."""

    true_sensor: np.ndarray
    test_sensor: np.ndarray
    mse: float
    flagged_nodes: int


def build_staggered_points(grid: StructuredGrid) -> StaggeredMesh:
    """Centroids of every grid cell; midpoints in 1d."""
    return StaggeredMesh(axes=[0.5 * (a[:-1] + a[1:]) for a in grid.axes])


def enumerate_diagonals(dimension: int) -> list[tuple[int, ...]]:
    """Sign vectors of the centre-crossing cell diagonals.

    Antipodal pairs are counted once by fixing the first component to +1,
    leaving 2^(d-1) directions.
    """
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    return [(1,) + rest for rest in itertools.product((1, -1), repeat=dimension - 1)]


def _true_stencil(y_plus, y_center, y_minus, delta):
    return np.abs(y_plus - 2.0 * y_center + y_minus) / (y_plus + 2.0 * y_center + y_minus) / delta**2


def _staggered_stencil(c_plus, s_plus, s_minus, c_minus, delta):
    return (
        np.abs(c_plus - s_plus - s_minus + c_minus)
        / (c_plus + s_plus + s_minus + c_minus)
        / (3.0 * (delta / 2.0) ** 2)
    )


def _check_interior(grid: StructuredGrid) -> None:
    if any(n < 3 for n in grid.shape):
        raise ValueError(f"grid shape {grid.shape} has no interior (need >= 3 per dimension)")


def _check_positive_values(grid: StructuredGrid) -> None:
    if np.any(grid.values <= 0.0):
        raise ValueError("grid values must be strictly positive")


def true_sensor_1d(grid: StructuredGrid) -> np.ndarray:
    """True diffusion sensor over the interior nodes of a 1d grid."""
    if grid.ndim != 1:
        raise ValueError("true_sensor_1d requires a 1d grid")
    _check_interior(grid)
    _check_positive_values(grid)
    y = grid.values
    return _true_stencil(y[2:], y[1:-1], y[:-2], grid.uniform_spacing())


def staggered_sensor_1d(grid: StructuredGrid, predictor: Predictor) -> np.ndarray:
    """Testing sensor on predictions at corner nodes and cell midpoints.

    Interior nodes where the predictor returns a nonpositive stencil value
    are flagged with NaN instead of aborting.
    """
    if grid.ndim != 1:
        raise ValueError("staggered_sensor_1d requires a 1d grid")
    _check_interior(grid)
    x = grid.axes[0]
    mids = 0.5 * (x[:-1] + x[1:])
    points = np.concatenate([x, mids])[:, None]
    vals = _evaluate_predictor(predictor, points)
    yn, ym = vals[: x.size], vals[x.size :]
    c_plus, c_minus = yn[2:], yn[:-2]
    s_plus, s_minus = ym[1:], ym[:-1]
    out = _staggered_stencil(c_plus, s_plus, s_minus, c_minus, grid.uniform_spacing())
    flagged = (c_plus <= 0) | (s_plus <= 0) | (s_minus <= 0) | (c_minus <= 0)
    out[flagged] = np.nan
    return out


def _evaluate_predictor(predictor: Predictor, points: np.ndarray) -> np.ndarray:
    out = np.asarray(predictor(points), dtype=float)
    if out.shape != (points.shape[0],):
        raise ValueError(f"predictor returned shape {out.shape} for {points.shape[0]} points")
    return out


def true_sensor_nd(grid: StructuredGrid) -> np.ndarray:
    """True sensor summed over the centre-crossing diagonals of a d-d grid."""
    _check_interior(grid)
    _check_positive_values(grid)
    y = grid.values
    delta = grid.uniform_spacing()
    interior = tuple(slice(1, -1) for _ in range(grid.ndim))
    center = y[interior]
    total = np.zeros_like(center)
    for diag in enumerate_diagonals(grid.ndim):
        plus = y[tuple(slice(1 + s, (n - 1) + s) for s, n in zip(diag, grid.shape))]
        minus = y[tuple(slice(1 - s, (n - 1) - s) for s, n in zip(diag, grid.shape))]
        total += _true_stencil(plus, center, minus, delta)
    return total


def _diagonal_stencil_coords(grid: StructuredGrid, diag: tuple[int, ...]):
    """Corner and centroid coordinates of one diagonal for every interior node.

    Returns four arrays of shape interior_shape + (d,): corner +1 step along
    the diagonal, centroid +1/2, centroid -1/2, corner -1.
    """
    interior_shape = tuple(n - 2 for n in grid.shape)
    out = [np.empty(interior_shape + (grid.ndim,)) for _ in range(4)]
    axes_idx = [np.arange(1, n - 1) for n in grid.shape]
    for k, (axis, s) in enumerate(zip(grid.axes, diag)):
        idx = axes_idx[k]
        corner_p = axis[idx + s]
        corner_m = axis[idx - s]
        cent_p = 0.5 * (axis[idx] + axis[idx + s])
        cent_m = 0.5 * (axis[idx] + axis[idx - s])
        shape = [1] * grid.ndim
        shape[k] = interior_shape[k]
        out[0][..., k] = corner_p.reshape(shape)
        out[1][..., k] = cent_p.reshape(shape)
        out[2][..., k] = cent_m.reshape(shape)
        out[3][..., k] = corner_m.reshape(shape)
    return out


def staggered_sensor_nd(grid: StructuredGrid, predictor: Predictor) -> np.ndarray:
    """Testing sensor summed over diagonals; flagged nodes carry NaN.

    All stencil coordinates are collected across diagonals, deduplicated and
    evaluated in one predictor call (corner nodes and centroids are shared
    between many stencils).
    """
    _check_interior(grid)
    d = grid.ndim
    delta = grid.uniform_spacing()
    diagonals = enumerate_diagonals(d)
    blocks = [_diagonal_stencil_coords(grid, diag) for diag in diagonals]

    stacked = np.concatenate([b.reshape(-1, d) for block in blocks for b in block])
    uniq, inverse = np.unique(stacked, axis=0, return_inverse=True)
    vals = _evaluate_predictor(predictor, uniq)[inverse]

    interior_shape = tuple(n - 2 for n in grid.shape)
    block_size = int(np.prod(interior_shape))
    total = np.zeros(interior_shape)
    flagged = np.zeros(interior_shape, dtype=bool)
    pos = 0
    for _ in diagonals:
        c_plus, s_plus, s_minus, c_minus = (
            vals[pos + i * block_size : pos + (i + 1) * block_size].reshape(interior_shape)
            for i in range(4)
        )
        pos += 4 * block_size
        total += _staggered_stencil(c_plus, s_plus, s_minus, c_minus, delta)
        flagged |= (c_plus <= 0) | (s_plus <= 0) | (s_minus <= 0) | (c_minus <= 0)
    total[flagged] = np.nan
    return total


def diffusion_mse(grid: StructuredGrid, predictor: Predictor) -> DiffusionReport:
    """Mean squared deviation between testing and true sensors.

    Flagged nodes (nonpositive predictions in their stencil) are excluded
    from the mean and counted in the report.
    """
    if grid.ndim == 1:
        true = true_sensor_1d(grid)
        test = staggered_sensor_1d(grid, predictor)
    else:
        true = true_sensor_nd(grid)
        test = staggered_sensor_nd(grid, predictor)
    valid = ~np.isnan(test)
    flagged = int(test.size - valid.sum())
    if valid.any():
        mse = float(np.mean((test[valid] - true[valid]) ** 2))
    else:
        mse = float("nan")
    return DiffusionReport(true_sensor=true, test_sensor=test, mse=mse, flagged_nodes=flagged)


def write_report_csv(report: DiffusionReport, path) -> None:
    """One row per interior node (original grid indices); aggregate values in
    the leading comment line."""
    shape = report.true_sensor.shape
    with open(path, "w", newline="") as fh:
        fh.write(f"# mse={report.mse!r} flagged_nodes={report.flagged_nodes}\n")
        cols = [f"i{k + 1}" for k in range(len(shape))]
        fh.write(",".join(cols + ["true_sensor", "test_sensor", "squared_error"]) + "\n")
        for idx in np.ndindex(shape):
            true = report.true_sensor[idx]
            test = report.test_sensor[idx]
            sq = (test - true) ** 2
            node = [str(i + 1) for i in idx]
            fh.write(",".join(node + [repr(float(true)), repr(float(test)), repr(float(sq))]) + "\n")
