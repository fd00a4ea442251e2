"""Parametric activation family, derivatives, and the slope-flexibility score."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import expit


class ActivationKind(Enum):
    LU = "lu"
    TANH = "tanh"
    RELU = "relu"
    LEAKY_RELU = "leaky_relu"
    ELU = "elu"
    SILU = "silu"
    SOFTPLUS = "softplus"
    LELU = "lelu"


# Kinds carrying a negative-side slope parameter (alpha / beta).
PARAMETRIC_KINDS = frozenset({ActivationKind.LEAKY_RELU, ActivationKind.LELU})


@dataclass(frozen=True)
class ActivationSpec:
    """An activation kind plus its shape parameter and trainability flag.

    `param` is the negative-side slope: alpha for leaky_relu, beta for lelu.
    It is ignored for the other kinds, which must not be trainable.
    """

    kind: ActivationKind
    param: float = 0.0
    trainable: bool = False

    def __post_init__(self):
        if self.kind in PARAMETRIC_KINDS:
            if not 0.0 <= self.param < 1.0:
                raise ValueError(
                    f"{self.kind.value} slope parameter must lie in [0, 1), got {self.param}"
                )
        elif self.trainable:
            raise ValueError(f"{self.kind.value} has no trainable parameter")


@dataclass(frozen=True)
class FlexibilityScore:
    """Score eta = 1 - min_slope / max_slope over the evaluation domain."""

    eta: float
    min_slope: float
    max_slope: float


def evaluate(spec: ActivationSpec, x) -> np.ndarray:
    """Apply the activation elementwise. Total on the reals."""
    x = np.asarray(x, dtype=float)
    kind = spec.kind
    if kind is ActivationKind.LU:
        return x + 0.0
    if kind is ActivationKind.TANH:
        return np.tanh(x)
    if kind is ActivationKind.RELU:
        return np.maximum(0.0, x)
    if kind is ActivationKind.LEAKY_RELU:
        return np.where(x > 0.0, x, spec.param * x)
    if kind is ActivationKind.ELU:
        return np.where(x > 0.0, x, np.expm1(np.minimum(x, 0.0)))
    if kind is ActivationKind.SILU:
        return x * expit(x)
    if kind is ActivationKind.SOFTPLUS:
        # max(x,0) + log1p(exp(-|x|)) avoids overflow for large |x|
        return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
    if kind is ActivationKind.LELU:
        xn = np.minimum(x, 0.0)
        return np.where(x > 0.0, x, np.expm1((1.0 - spec.param) * xn) + spec.param * xn)
    raise ValueError(f"unknown activation kind {kind!r}")


def derivative(spec: ActivationSpec, x) -> np.ndarray:
    """Slope of the activation. At the relu/leaky_relu kink the right-hand value 1 is used."""
    x = np.asarray(x, dtype=float)
    kind = spec.kind
    if kind is ActivationKind.LU:
        return np.ones_like(x)
    if kind is ActivationKind.TANH:
        t = np.tanh(x)
        return 1.0 - t * t
    if kind is ActivationKind.RELU:
        return np.where(x >= 0.0, 1.0, 0.0)
    if kind is ActivationKind.LEAKY_RELU:
        return np.where(x >= 0.0, 1.0, spec.param)
    if kind is ActivationKind.ELU:
        return np.where(x > 0.0, 1.0, np.exp(np.minimum(x, 0.0)))
    if kind is ActivationKind.SILU:
        s = expit(x)
        return s * (1.0 + x * (1.0 - s))
    if kind is ActivationKind.SOFTPLUS:
        return expit(x)
    if kind is ActivationKind.LELU:
        b = spec.param
        xn = np.minimum(x, 0.0)
        return np.where(x > 0.0, 1.0, (1.0 - b) * np.exp((1.0 - b) * xn) + b)
    raise ValueError(f"unknown activation kind {kind!r}")


def param_derivative(spec: ActivationSpec, x) -> np.ndarray:
    """Sensitivity of the activation to its shape parameter (alpha or beta).

    Zero on the positive branch for both parametric kinds.
    """
    if spec.kind not in PARAMETRIC_KINDS:
        raise ValueError(f"{spec.kind.value} has no shape parameter")
    x = np.asarray(x, dtype=float)
    if spec.kind is ActivationKind.LEAKY_RELU:
        return np.where(x > 0.0, 0.0, x)
    # lelu, x <= 0: d/dbeta [exp((1-b)x) - 1 + b x] = x (1 - exp((1-b)x))
    xn = np.minimum(x, 0.0)
    return np.where(x > 0.0, 0.0, xn * (1.0 - np.exp((1.0 - spec.param) * xn)))


# Slope infimum/supremum over the whole real line, where closed-form.
_CLOSED_FORM_SLOPES = {
    ActivationKind.LU: lambda p: (1.0, 1.0),
    ActivationKind.TANH: lambda p: (0.0, 1.0),
    ActivationKind.RELU: lambda p: (0.0, 1.0),
    ActivationKind.LEAKY_RELU: lambda p: (p, 1.0),
    ActivationKind.ELU: lambda p: (0.0, 1.0),
    ActivationKind.SOFTPLUS: lambda p: (0.0, 1.0),
    ActivationKind.LELU: lambda p: (p, 1.0),
}


def flexibility_score(
    spec: ActivationSpec,
    domain: tuple[float, float] = (-10.0, 10.0),
    samples: int = 100001,
) -> FlexibilityScore:
    """Compute eta = 1 - min(slope)/max(slope).

    Closed-form slope extrema are used where available; silu is scanned
    numerically over `samples` uniformly spaced points in `domain` (its
    derivative has an interior minimum near x = -2.4 and overshoots 1).
    """
    lo, hi = domain
    if not hi > lo:
        raise ValueError("domain must be a non-degenerate interval")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    closed = _CLOSED_FORM_SLOPES.get(spec.kind)
    if closed is not None:
        mn, mx = closed(spec.param)
    else:
        slopes = derivative(spec, np.linspace(lo, hi, samples))
        mn = float(slopes.min())
        mx = float(slopes.max())
    if mx <= 0.0:
        raise ValueError("maximum slope must be positive")
    return FlexibilityScore(eta=1.0 - mn / mx, min_slope=mn, max_slope=mx)
