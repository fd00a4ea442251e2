"""Losses, Adam, the plateau-annealed learning-rate schedule, and the fit loop."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .network import GradientSet, Network, backward, forward_batch


class LossKind(Enum):
    MAE = "mae"
    MSE = "mse"


class RegKind(Enum):
    NONE = "none"
    L1 = "l1"
    L2 = "l2"


@dataclass(frozen=True)
class Regularization:
    kind: RegKind = RegKind.NONE
    strength: float = 0.0

    def __post_init__(self):
        if self.strength < 0.0:
            raise ValueError("regularization strength must be >= 0")
        if (self.strength == 0.0) != (self.kind is RegKind.NONE):
            raise ValueError("strength must be 0 exactly when kind is none")


@dataclass(frozen=True)
class LRSchedule:
    """Multiply the rate by `factor` after `patience` epochs without improvement,
    then freeze the patience counter for `cooldown` epochs."""

    initial: float
    minimum: float
    factor: float
    patience: int
    cooldown: int

    def __post_init__(self):
        if not 0.0 < self.minimum <= self.initial:
            raise ValueError("need 0 < minimum <= initial")
        if not 0.0 < self.factor < 1.0:
            raise ValueError("factor must lie in (0, 1)")
        if self.patience < 1 or self.cooldown < 0:
            raise ValueError("patience >= 1 and cooldown >= 0 required")


@dataclass
class ScheduleState:
    rate: float
    best: float = np.inf
    wait: int = 0
    cooldown_remaining: int = 0


@dataclass
class AdamState:
    """First/second moment accumulators mirroring the parameter list."""

    ms: list[np.ndarray]
    vs: list[np.ndarray]
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-7

    @classmethod
    def create(cls, params: list[np.ndarray]) -> "AdamState":
        return cls(ms=[np.zeros_like(p) for p in params], vs=[np.zeros_like(p) for p in params])


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    batch_size: int
    loss: LossKind
    schedule: LRSchedule
    regularization: Regularization = Regularization()
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")


class DivergenceError(RuntimeError):
    """Raised when the epoch loss turns NaN/Inf."""

    def __init__(self, epoch: int):
        super().__init__(f"training diverged at epoch {epoch}")
        self.epoch = epoch


@dataclass
class History:
    """Per-epoch training loss and the learning rate in effect that epoch."""

    losses: list[float] = field(default_factory=list)
    rates: list[float] = field(default_factory=list)
    act_params: list[np.ndarray] | None = None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["epoch", "loss", "learning_rate"]
            if self.act_params is not None:
                header += [f"beta_{i}" for i in range(len(self.act_params[0]))]
            writer.writerow(header)
            for epoch, (loss, rate) in enumerate(zip(self.losses, self.rates)):
                row = [epoch, repr(loss), repr(rate)]
                if self.act_params is not None:
                    row += [repr(float(b)) for b in self.act_params[epoch]]
                writer.writerow(row)


def loss_and_grad(kind: LossKind, predictions, targets) -> tuple[float, np.ndarray]:
    """Mean loss plus the per-sample gradient d loss / d prediction."""
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(targets, dtype=float)
    if p.shape != t.shape or p.size == 0:
        raise ValueError("predictions and targets must be non-empty and equal length")
    r = p - t
    n = r.size
    if kind is LossKind.MAE:
        return float(np.mean(np.abs(r))), np.sign(r) / n
    return float(np.mean(r * r)), 2.0 * r / n


def adam_step(state: AdamState, params: list[np.ndarray], grads: list[np.ndarray], learning_rate: float) -> None:
    """One bias-corrected Adam update, in place on `params`."""
    if len(params) != len(state.ms) or len(grads) != len(params):
        raise ValueError("parameter/gradient/state lengths disagree")
    state.t += 1
    c1 = 1.0 - state.beta1**state.t
    c2 = 1.0 - state.beta2**state.t
    for p, g, m, v in zip(params, grads, state.ms, state.vs):
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} != parameter shape {p.shape}")
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= learning_rate * (m / c1) / (np.sqrt(v / c2) + state.eps)


def schedule_update(sched: LRSchedule, state: ScheduleState, epoch_loss: float) -> float:
    """Advance the plateau tracker by one epoch; returns the updated rate."""
    if epoch_loss < state.best:
        state.best = epoch_loss
        state.wait = 0
        if state.cooldown_remaining > 0:
            state.cooldown_remaining -= 1
        return state.rate
    if state.cooldown_remaining > 0:
        state.cooldown_remaining -= 1
        return state.rate
    state.wait += 1
    if state.wait >= sched.patience:
        state.rate = max(state.rate * sched.factor, sched.minimum)
        state.wait = 0
        state.cooldown_remaining = sched.cooldown
    return state.rate


def _params_of(net: Network) -> list[np.ndarray]:
    params = []
    for w, b in zip(net.weights, net.biases):
        params.append(w)
        params.append(b)
    params.append(net.out_weight)
    params.append(net.out_bias)
    if net.act_params is not None and net.spec.activation.trainable:
        params.append(net.act_params)
    return params


def _grads_of(gset: GradientSet, net: Network) -> list[np.ndarray]:
    grads = []
    for dw, db in zip(gset.weights, gset.biases):
        grads.append(dw)
        grads.append(db)
    grads.append(gset.out_weight)
    grads.append(gset.out_bias)
    if net.act_params is not None and net.spec.activation.trainable:
        grads.append(gset.act_params)
    return grads


def _add_reg_grads(grads: list[np.ndarray], net: Network, reg: Regularization) -> None:
    # penalty acts on hidden and output weights only; biases and slope params excluded
    if reg.kind is RegKind.NONE:
        return
    weight_slots = [2 * i for i in range(net.spec.depth)] + [2 * net.spec.depth]
    params = _params_of(net)
    for i in weight_slots:
        w = params[i]
        if reg.kind is RegKind.L1:
            grads[i] += reg.strength * np.sign(w)
        else:
            grads[i] += 2.0 * reg.strength * w


def fit(net: Network, data: tuple[np.ndarray, np.ndarray], config: TrainConfig) -> tuple[Network, History]:
    """Mini-batch Adam training with the plateau LR schedule.

    The history records the pure data loss (regularization penalties feed the
    gradients only). Shuffling, batching and updates are deterministic given
    config.seed.
    """
    xs, ys = np.asarray(data[0], dtype=float), np.asarray(data[1], dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    n = xs.shape[0]
    if n == 0:
        raise ValueError("training data is empty")

    params = _params_of(net)
    adam = AdamState.create(params)
    state = ScheduleState(rate=config.schedule.initial)
    rng = np.random.default_rng([config.seed, 1])
    track_beta = net.act_params is not None and net.spec.activation.trainable
    history = History(act_params=[] if track_beta else None)

    for epoch in range(config.epochs):
        perm = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            idx = perm[start : start + config.batch_size]
            preds, cache = forward_batch(net, xs[idx])
            batch_loss, upstream = loss_and_grad(config.loss, preds, ys[idx])
            gset = backward(net, cache, upstream)
            grads = _grads_of(gset, net)
            _add_reg_grads(grads, net, config.regularization)
            adam_step(adam, params, grads, state.rate)
            if track_beta:
                np.clip(net.act_params, 0.0, 0.99, out=net.act_params)
            total += batch_loss * len(idx)
        epoch_loss = total / n
        if not np.isfinite(epoch_loss):
            raise DivergenceError(epoch)
        history.losses.append(epoch_loss)
        history.rates.append(state.rate)
        if track_beta:
            history.act_params.append(net.act_params.copy())
        schedule_update(config.schedule, state, epoch_loss)
    return net, history
