"""Dense feedforward network with a linear single-output head.

All arithmetic is double precision. Forward passes are batched internally;
the single-sample entry points wrap a batch of one.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .activations import (
    PARAMETRIC_KINDS,
    ActivationKind,
    ActivationSpec,
    derivative,
    evaluate,
    param_derivative,
)


@dataclass(frozen=True)
class NetworkSpec:
    """Topology: depth hidden layers of fixed width, shared activation."""

    input_dim: int
    depth: int
    width: int
    activation: ActivationSpec

    def __post_init__(self):
        if self.input_dim < 1 or self.depth < 1 or self.width < 1:
            raise ValueError("input_dim, depth and width must all be >= 1")


@dataclass
class Network:
    spec: NetworkSpec
    weights: list[np.ndarray]  # per hidden layer, shape (out, in)
    biases: list[np.ndarray]  # per hidden layer, shape (out,)
    out_weight: np.ndarray  # shape (width,)
    out_bias: np.ndarray  # shape (1,)
    act_params: np.ndarray | None  # per-layer slope parameter, parametric kinds only

    def layer_activation(self, layer: int) -> ActivationSpec:
        if self.act_params is None:
            return self.spec.activation
        return dataclasses.replace(self.spec.activation, param=float(self.act_params[layer]))


@dataclass
class ForwardCache:
    """Pre-activations and activations for every layer plus the linear output."""

    inputs: np.ndarray  # (N, input_dim)
    pre_activations: list[np.ndarray]  # depth entries of (N, width), then output (N,)
    activations: list[np.ndarray]  # depth entries of (N, width), then output (N,)


@dataclass
class GradientSet:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    out_weight: np.ndarray
    out_bias: np.ndarray
    act_params: np.ndarray | None


def init_he_normal(spec: NetworkSpec, seed: int) -> Network:
    """HeNormal weights (untruncated, std sqrt(2/fan_in)), zero biases."""
    rng = np.random.default_rng(seed)
    dims = [spec.input_dim] + [spec.width] * spec.depth
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    out_weight = rng.normal(0.0, np.sqrt(2.0 / spec.width), size=spec.width)
    out_bias = np.zeros(1)
    act_params = None
    if spec.activation.kind in PARAMETRIC_KINDS:
        act_params = np.full(spec.depth, spec.activation.param)
    return Network(spec, weights, biases, out_weight, out_bias, act_params)


def forward_batch(net: Network, xs: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
    """Evaluate a batch of inputs, retaining the per-layer cache."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[1] != net.spec.input_dim:
        raise ValueError(f"expected input_dim {net.spec.input_dim}, got {xs.shape[1]}")
    pre, act = [], []
    a = xs
    for layer, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w.T + b
        a = evaluate(net.layer_activation(layer), z)
        pre.append(z)
        act.append(a)
    z_out = a @ net.out_weight + net.out_bias[0]
    pre.append(z_out)
    act.append(z_out)  # linear output
    return z_out, ForwardCache(inputs=xs, pre_activations=pre, activations=act)


def forward(net: Network, x) -> tuple[float, ForwardCache]:
    """Single-sample forward pass."""
    preds, cache = forward_batch(net, np.asarray(x, dtype=float).reshape(1, -1))
    return float(preds[0]), cache


def predict_batch(net: Network, xs) -> np.ndarray:
    """Forward pass without cache retention; order-preserving."""
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return np.zeros(0)
    a = np.atleast_2d(xs)
    for layer, (w, b) in enumerate(zip(net.weights, net.biases)):
        a = evaluate(net.layer_activation(layer), a @ w.T + b)
    return a @ net.out_weight + net.out_bias[0]


def backward(net: Network, cache: ForwardCache, upstream_grad) -> GradientSet:
    """Reverse-mode gradients of upstream_grad . output w.r.t. every parameter.

    upstream_grad is a scalar for a single-sample cache or one value per
    batch row; batch gradients are summed.
    """
    depth = net.spec.depth
    if len(cache.pre_activations) != depth + 1:
        raise ValueError("cache depth does not match network depth")
    g = np.atleast_1d(np.asarray(upstream_grad, dtype=float))
    n = cache.inputs.shape[0]
    if g.shape != (n,):
        raise ValueError(f"upstream_grad shape {g.shape} does not match batch size {n}")

    a_last = cache.activations[depth - 1]
    if a_last.shape != (n, net.spec.width):
        raise ValueError("cache shape does not match network width")
    d_out_w = g @ a_last
    d_out_b = np.array([g.sum()])
    da = g[:, None] * net.out_weight[None, :]

    d_weights = [np.empty(0)] * depth
    d_biases = [np.empty(0)] * depth
    trainable = net.act_params is not None and net.spec.activation.trainable
    d_act = np.zeros(depth) if trainable else None
    for layer in range(depth - 1, -1, -1):
        z = cache.pre_activations[layer]
        act = net.layer_activation(layer)
        dz = da * derivative(act, z)
        if trainable:
            d_act[layer] = np.sum(da * param_derivative(act, z))
        a_prev = cache.activations[layer - 1] if layer > 0 else cache.inputs
        d_weights[layer] = dz.T @ a_prev
        d_biases[layer] = dz.sum(axis=0)
        da = dz @ net.weights[layer]
    return GradientSet(d_weights, d_biases, d_out_w, d_out_b, d_act)


def validate_shapes(net: Network) -> None:
    """Check the layer shape chain; raises on any mismatch."""
    spec = net.spec
    dims = [spec.input_dim] + [spec.width] * spec.depth
    if len(net.weights) != spec.depth or len(net.biases) != spec.depth:
        raise ValueError("layer count does not match depth")
    for layer, (w, b) in enumerate(zip(net.weights, net.biases)):
        if w.shape != (dims[layer + 1], dims[layer]):
            raise ValueError(f"layer {layer} weight shape {w.shape}")
        if b.shape != (dims[layer + 1],):
            raise ValueError(f"layer {layer} bias shape {b.shape}")
    if net.out_weight.shape != (spec.width,) or net.out_bias.shape != (1,):
        raise ValueError("output layer shape mismatch")
    if net.act_params is not None and net.act_params.shape != (spec.depth,):
        raise ValueError("act_params shape mismatch")


def save_checkpoint(net: Network, path) -> None:
    """Write the network as JSON; floats round-trip exactly (repr encoding)."""
    act = net.spec.activation
    payload = {
        "spec": {
            "input_dim": net.spec.input_dim,
            "depth": net.spec.depth,
            "width": net.spec.width,
            "activation": {
                "kind": act.kind.value,
                "param": act.param,
                "trainable": act.trainable,
            },
        },
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "out_weight": net.out_weight.tolist(),
        "out_bias": float(net.out_bias[0]),
        "act_params": None if net.act_params is None else net.act_params.tolist(),
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def load_checkpoint(path) -> Network:
    payload = json.loads(Path(path).read_text())
    s = payload["spec"]
    act = ActivationSpec(
        kind=ActivationKind(s["activation"]["kind"]),
        param=s["activation"]["param"],
        trainable=s["activation"]["trainable"],
    )
    spec = NetworkSpec(s["input_dim"], s["depth"], s["width"], act)
    net = Network(
        spec=spec,
        weights=[np.asarray(w, dtype=float) for w in payload["weights"]],
        biases=[np.asarray(b, dtype=float) for b in payload["biases"]],
        out_weight=np.asarray(payload["out_weight"], dtype=float),
        out_bias=np.array([payload["out_bias"]], dtype=float),
        act_params=(
            None
            if payload["act_params"] is None
            else np.asarray(payload["act_params"], dtype=float)
        ),
    )
    validate_shapes(net)
    return net
