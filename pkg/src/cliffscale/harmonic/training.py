"""Training harness for the harmonic regression task.

Minibatch MSE plus an optional bandwidth penalty evaluated on all m
regularizer points every step, with validation-based early stopping.
The checkpoint in effect when training stops is the one reported
(no best-checkpoint rewind).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .. import streams
from ..curves import ScalingCurve, aggregate_trials
from .basis import BandwidthRegularizer, HarmonicFunction, sample_harmonic
from .network import AdamState, MlpModel, adam_step, init_mlp, mlp_backward, mlp_forward_batch

__all__ = ["TrainConfig", "TrainResult", "DivergenceError", "train", "run_harmonic_scaling"]


class DivergenceError(FloatingPointError):
    """Raised when the training loss stops being finite."""

    def __init__(self, step: int):
        super().__init__(f"training loss became non-finite at step {step}")
        self.step = step


@dataclass(frozen=True)
class TrainConfig:
    width: int = 256
    hidden_layers: int = 3
    batch_size: int = 256
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    max_steps: int = 20_000
    patience: int = 1_000
    eval_every: int = 25
    val_size: int = 512
    test_size: int = 4096
    reuse_val_as_test: bool = False
    reg_points: int = 20_000
    reg_lambda: float = 1.0
    dtype: str = "float32"


@dataclass
class TrainResult:
    model: MlpModel
    test_mse: float
    steps: int
    stopped_early: bool
    val_mse: float
    reg_value: float | None


def _mse(model: MlpModel, xs: np.ndarray, targets: np.ndarray) -> float:
    preds, _ = mlp_forward_batch(model, xs)
    resid = preds.astype(float) - targets
    return float(resid @ resid) / len(targets)


def train(
    target: HarmonicFunction,
    n: int,
    config: TrainConfig = TrainConfig(),
    regularizer: BandwidthRegularizer | None = None,
    rng: np.random.Generator | None = None,
) -> TrainResult:
    """Fit an MLP to n uniform samples of the target.

    Draws training, validation and test points from ``rng`` (uniform on
    the unit cube), then runs Adam on the minibatch MSE, adding
    ``lam * penalty`` from the regularizer when one is supplied. Stops
    after ``patience`` steps without a validation improvement or at
    ``max_steps``, whichever comes first.
    """
    if rng is None:
        raise ValueError("a seeded generator is required for reproducible training")
    if n < 0:
        raise ValueError(f"training-set size must be >= 0, got {n}")
    if n == 0 and regularizer is None:
        raise ValueError("nothing to train on: n = 0 and no regularizer")
    dtype = np.dtype(config.dtype)

    train_x = rng.uniform(size=(n, target.d))
    val_x = rng.uniform(size=(config.val_size, target.d))
    test_x = val_x if config.reuse_val_as_test else rng.uniform(size=(config.test_size, target.d))
    train_y = np.asarray(target(train_x), dtype=dtype) if n else np.zeros(0, dtype=dtype)
    val_y = np.asarray(target(val_x), dtype=float)
    test_y = val_y if config.reuse_val_as_test else np.asarray(target(test_x), dtype=float)

    sizes = [target.d] + [config.width] * config.hidden_layers + [1]
    model = init_mlp(sizes, rng, dtype=dtype)
    state = AdamState.for_model(
        model,
        learning_rate=config.learning_rate,
        beta1=config.beta1,
        beta2=config.beta2,
        eps=config.adam_eps,
    )
    params = model.parameters()

    reg_x = regularizer.points.astype(dtype) if regularizer is not None else None
    train_x = train_x.astype(dtype)
    val_x = val_x.astype(dtype)
    test_xd = test_x.astype(dtype)

    batch = min(config.batch_size, n) if n else 0
    order = np.zeros(0, dtype=np.intp)
    cursor = 0

    best_val = np.inf
    last_improvement = 0
    step = 0
    stopped_early = False
    while step < config.max_steps:
        step += 1
        if n:
            if cursor + batch > len(order):
                order = rng.permutation(n)
                cursor = 0
            idx = order[cursor : cursor + batch]
            cursor += batch
            xb, yb = train_x[idx], train_y[idx]
        else:
            xb = np.zeros((0, target.d), dtype=dtype)
            yb = np.zeros(0, dtype=dtype)

        xs = np.concatenate([xb, reg_x]) if reg_x is not None else xb
        try:
            out, cache = mlp_forward_batch(model, xs)
        except FloatingPointError:
            raise DivergenceError(step) from None
        dout = np.zeros(len(xs), dtype=dtype)
        loss = 0.0
        if batch:
            resid = out[:batch] - yb
            loss += float(resid @ resid) / batch
            dout[:batch] = (2.0 / batch) * resid
        if regularizer is not None:
            r = regularizer.residual(out[batch:])
            loss += regularizer.lam * float(r @ r) / regularizer.m
            dout[batch:] = regularizer.lam * (2.0 / regularizer.m) * r
        if not np.isfinite(loss):
            raise DivergenceError(step)

        adam_step(state, params, mlp_backward(model, cache, dout))

        if step % config.eval_every == 0:
            val = _mse(model, val_x, val_y)
            if val < best_val:
                best_val = val
                last_improvement = step
            elif step - last_improvement >= config.patience:
                stopped_early = True
                break

    final_val = _mse(model, val_x, val_y)
    test_mse = final_val if config.reuse_val_as_test else _mse(model, test_xd, test_y)
    reg_value = None
    if regularizer is not None:
        preds, _ = mlp_forward_batch(model, reg_x)
        r = regularizer.residual(preds)
        reg_value = float(r @ r) / regularizer.m
    return TrainResult(
        model=model,
        test_mse=test_mse,
        steps=step,
        stopped_early=stopped_early,
        val_mse=final_val,
        reg_value=reg_value,
    )


def run_harmonic_scaling(
    B: int,
    arm: str,
    n_grid,
    trials: int,
    seed: int,
    config: TrainConfig = TrainConfig(),
    d: int = 2,
    workers: int = 1,
) -> ScalingCurve:
    """Scaling curve for the harmonic task, regularized or not.

    Each trial draws a fresh unit-norm target; each (trial, n) cell
    draws fresh training data, regularizer points and initialization
    from its own stream, so the two arms see identical targets and data
    under the same seed.
    """
    from ..linreg import _run_cells

    n_grid = [int(n) for n in n_grid]
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be a nonempty ascending list")
    if arm not in ("reg", "noreg"):
        raise ValueError(f"unknown arm {arm!r} (expected 'reg' or 'noreg')")

    def one_cell(n_idx: int, trial: int) -> tuple[int, int, float]:
        n = n_grid[n_idx]
        target = sample_harmonic(B, d, streams.stream(seed, streams.TARGET, trial))
        regularizer = None
        if arm == "reg":
            pts = streams.stream(seed, streams.REG_POINTS, trial, n_idx).uniform(
                size=(config.reg_points, d)
            )
            regularizer = BandwidthRegularizer(B=B, d=d, points=pts, lam=config.reg_lambda)
        result = train(
            target,
            n,
            config=config,
            regularizer=regularizer,
            rng=streams.stream(seed, streams.TRAIN, trial, n_idx),
        )
        return n, trial, result.test_mse

    records = _run_cells(one_cell, len(n_grid), trials, workers)
    meta = {
        "task": "harmonic",
        "arm": arm,
        "B": str(B),
        "d": str(d),
        "width": str(config.width),
        "seed": str(seed),
    }
    return aggregate_trials(records, metadata=meta)
