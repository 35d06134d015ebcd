"""Fully connected ReLU regressor with hand-rolled backprop and Adam.

Kept deliberately small and explicit: dense affine layers, ReLU between
them, exact gradients assembled layer by layer so they can be checked
against finite differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MlpModel",
    "init_mlp",
    "mlp_forward",
    "mlp_forward_batch",
    "mlp_backward",
    "AdamState",
    "adam_step",
    "save_model",
    "load_model",
]


@dataclass
class MlpModel:
    """Affine-ReLU stack; ``weights[i]`` maps layer i to layer i+1."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("weights and biases must be nonempty and parallel")
        for w, b in zip(self.weights, self.biases):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ValueError(f"layer shapes disagree: {w.shape} vs {b.shape}")
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise ValueError("model parameters must be finite")

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def parameters(self) -> list[np.ndarray]:
        """Flat parameter list [W0, b0, W1, b1, ...] (views, not copies)."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out


def init_mlp(layer_sizes, rng: np.random.Generator, dtype=np.float64) -> MlpModel:
    """He-initialized network; final layer must be scalar."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2 or sizes[-1] != 1 or any(s < 1 for s in sizes):
        raise ValueError(f"layer sizes must end in 1 and be positive, got {sizes}")
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        scale = np.sqrt(2.0 / fan_in)
        weights.append((scale * rng.standard_normal((fan_in, fan_out))).astype(dtype))
        biases.append(np.zeros(fan_out, dtype=dtype))
    return MlpModel(weights=weights, biases=biases)


def mlp_forward_batch(model: MlpModel, xs: np.ndarray):
    """Outputs and the activation cache for a batch of inputs.

    Returns (out, cache): out has shape (m,), cache holds the input and
    every post-ReLU activation for the backward pass.
    """
    a = np.asarray(xs, dtype=model.weights[0].dtype)
    if a.ndim != 2 or a.shape[1] != model.weights[0].shape[0]:
        raise ValueError(f"inputs must have shape (m, {model.weights[0].shape[0]}), got {a.shape}")
    cache = [a]
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        a = z if i == last else np.maximum(z, 0.0)
        cache.append(a)
    out = cache.pop()[:, 0]
    if not np.isfinite(out).all():
        raise FloatingPointError("non-finite activations: training diverged")
    return out, cache


def mlp_forward(model: MlpModel, x: np.ndarray) -> float:
    """Scalar prediction at a single input point."""
    out, _ = mlp_forward_batch(model, np.asarray(x, dtype=float)[None, :])
    return float(out[0])


def mlp_backward(model: MlpModel, cache: list[np.ndarray], dout: np.ndarray) -> list[np.ndarray]:
    """Exact gradients of sum_i dout_i * f(x_i) in parameters() order.

    ``cache`` is the activation list from mlp_forward_batch on the same
    batch; ``dout`` is the loss gradient with respect to the outputs.
    """
    dout = np.asarray(dout, dtype=model.weights[0].dtype)
    if dout.shape != (len(cache[0]),):
        raise ValueError(f"dout must have shape ({len(cache[0])},), got {dout.shape}")
    grads: list[np.ndarray] = []
    delta = dout[:, None]
    for i in range(len(model.weights) - 1, -1, -1):
        a_prev = cache[i]
        grads.append(delta.sum(axis=0))
        grads.append(a_prev.T @ delta)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (cache[i] > 0)
    grads.reverse()
    return grads


@dataclass
class AdamState:
    """Adaptive-moment optimizer state mirroring a parameter list."""

    first: list[np.ndarray]
    second: list[np.ndarray]
    step: int = 0
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_model(cls, model: MlpModel, learning_rate: float = 1e-3,
                  beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        params = model.parameters()
        return cls(
            first=[np.zeros_like(p) for p in params],
            second=[np.zeros_like(p) for p in params],
            learning_rate=learning_rate,
            beta1=beta1,
            beta2=beta2,
            eps=eps,
        )


def adam_step(state: AdamState, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
    """One bias-corrected Adam update, applied to ``params`` in place."""
    if len(params) != len(state.first) or len(grads) != len(params):
        raise ValueError("parameter, gradient and moment lists must be parallel")
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    correct1 = 1.0 - b1 ** state.step
    correct2 = 1.0 - b2 ** state.step
    scale = state.learning_rate / correct1
    for p, g, m, v in zip(params, grads, state.first, state.second):
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} != parameter shape {p.shape}")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= scale * m / (np.sqrt(v / correct2) + state.eps)


def save_model(model: MlpModel, path) -> None:
    """Write a checkpoint: layer sizes plus row-major parameter arrays."""
    payload = {
        "layer_sizes": model.layer_sizes,
        "weights": [w.astype(float).ravel(order="C").tolist() for w in model.weights],
        "biases": [b.astype(float).tolist() for b in model.biases],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_model(path) -> MlpModel:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    sizes = payload["layer_sizes"]
    weights = [
        np.asarray(flat, dtype=float).reshape(fan_in, fan_out)
        for flat, fan_in, fan_out in zip(payload["weights"], sizes[:-1], sizes[1:])
    ]
    biases = [np.asarray(b, dtype=float) for b in payload["biases"]]
    return MlpModel(weights=weights, biases=biases)
