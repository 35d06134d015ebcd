"""Linear-regression toy problem: sharp cliff at n = d, soft cliff under ridge.

A unit-norm weight vector v is learned from Gaussian covariates. The
least-squares estimator jumps to zero error exactly when the sample
count reaches the dimension; a nearest-neighbor baseline on the same
data scales as a slow power law instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import streams
from .curves import ScalingCurve, aggregate_trials

__all__ = [
    "LinearTask",
    "RegressionDataset",
    "LinearEstimate",
    "sample_task",
    "sample_dataset",
    "fit_least_squares",
    "fit_ridge",
    "linear_test_mse",
    "nn_predict",
    "nn_test_mse",
    "run_linreg_scaling",
]

DEFAULT_NN_TEST_POINTS = 10_000


@dataclass(frozen=True)
class LinearTask:
    """Ground truth: y = v.x + sigma * noise, with x standard Gaussian."""

    d: int
    v: np.ndarray
    sigma: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.v.shape != (self.d,):
            raise ValueError(f"weight vector shape {self.v.shape} != ({self.d},)")
        if self.sigma < 0:
            raise ValueError(f"noise level must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class RegressionDataset:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        if self.xs.ndim != 2 or self.ys.ndim != 1 or len(self.xs) != len(self.ys):
            raise ValueError(f"inconsistent dataset shapes {self.xs.shape}, {self.ys.shape}")
        if len(self.xs) and not (np.isfinite(self.xs).all() and np.isfinite(self.ys).all()):
            raise ValueError("dataset contains non-finite entries")

    def __len__(self) -> int:
        return len(self.ys)


@dataclass(frozen=True)
class LinearEstimate:
    v_hat: np.ndarray


def sample_task(d: int, sigma: float, rng: np.random.Generator) -> LinearTask:
    """Draw v uniformly on the unit sphere in d dimensions."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    v = rng.standard_normal(d)
    norm = np.linalg.norm(v)
    while norm == 0.0:  # probability-zero redraw guard
        v = rng.standard_normal(d)
        norm = np.linalg.norm(v)
    return LinearTask(d=d, v=v / norm, sigma=float(sigma))


def sample_dataset(task: LinearTask, n: int, rng: np.random.Generator) -> RegressionDataset:
    """n i.i.d. rows x ~ N(0, I_d) with y = v.x + sigma * N(0, 1)."""
    xs = rng.standard_normal((n, task.d))
    ys = xs @ task.v
    if task.sigma > 0:
        ys = ys + task.sigma * rng.standard_normal(n)
    return RegressionDataset(xs=xs, ys=ys)


def fit_least_squares(data: RegressionDataset) -> LinearEstimate:
    """Minimum-norm least-squares solution (pseudoinverse).

    With fewer samples than dimensions the residual-zero solution of
    smallest norm is returned; an empty dataset yields the zero vector.
    """
    if len(data) == 0:
        return LinearEstimate(v_hat=np.zeros(data.xs.shape[1]))
    v_hat, *_ = np.linalg.lstsq(data.xs, data.ys, rcond=None)
    return LinearEstimate(v_hat=v_hat)


def fit_ridge(data: RegressionDataset, lam: float) -> LinearEstimate:
    """Ridge solution (X'X + lam I)^-1 X'y; unique for lam > 0."""
    if lam <= 0:
        raise ValueError(f"ridge penalty must be positive, got {lam}")
    d = data.xs.shape[1]
    gram = data.xs.T @ data.xs + lam * np.eye(d)
    rhs = data.xs.T @ data.ys
    return LinearEstimate(v_hat=np.linalg.solve(gram, rhs))


def linear_test_mse(task: LinearTask, est: LinearEstimate) -> float:
    """Exact test MSE of a linear estimate under x ~ N(0, I_d).

    E[((v_hat - v).x)^2] collapses to |v_hat - v|^2, so linear
    estimators get a zero-variance error measurement.
    """
    if est.v_hat.shape != task.v.shape:
        raise ValueError(f"estimate shape {est.v_hat.shape} != task shape {task.v.shape}")
    diff = est.v_hat - task.v
    return float(diff @ diff)


def _nn_predict_batch(data: RegressionDataset, queries: np.ndarray, chunk: int = 512) -> np.ndarray:
    """1-NN regression values for a batch of queries; ties go to the lowest index."""
    if len(data) == 0:
        raise ValueError("nearest-neighbor prediction needs at least one training point")
    train_sq = np.einsum("ij,ij->i", data.xs, data.xs)
    out = np.empty(len(queries))
    for start in range(0, len(queries), chunk):
        q = queries[start : start + chunk]
        # squared distance up to a per-query constant
        d2 = train_sq[None, :] - 2.0 * (q @ data.xs.T)
        out[start : start + chunk] = data.ys[np.argmin(d2, axis=1)]
    return out


def nn_predict(data: RegressionDataset, x: np.ndarray) -> float:
    """Value of the training point nearest to x in Euclidean distance."""
    return float(_nn_predict_batch(data, np.asarray(x, dtype=float)[None, :])[0])


def nn_test_mse(
    task: LinearTask,
    data: RegressionDataset,
    n_test: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo test MSE of the 1-NN estimator on noiseless targets."""
    if n_test < 1:
        raise ValueError(f"need at least one test point, got {n_test}")
    queries = rng.standard_normal((n_test, task.d))
    preds = _nn_predict_batch(data, queries)
    resid = preds - queries @ task.v
    return float(np.mean(resid * resid))


def _trial_error(task, data, estimator, lam, n_test, rng_test) -> float:
    if estimator == "lstsq":
        return linear_test_mse(task, fit_least_squares(data))
    if estimator == "ridge":
        return linear_test_mse(task, fit_ridge(data, lam))
    if estimator == "nn":
        if len(data) == 0:
            raise ValueError("nearest-neighbor estimator needs n >= 1")
        return nn_test_mse(task, data, n_test, rng_test)
    raise ValueError(f"unknown estimator {estimator!r}")


def run_linreg_scaling(
    d: int,
    sigma: float,
    estimator: str,
    n_grid,
    trials: int,
    seed: int,
    lam: float | None = None,
    n_test: int = DEFAULT_NN_TEST_POINTS,
    fix_task: bool = False,
    workers: int = 1,
) -> ScalingCurve:
    """Scaling curve of a linear-regression estimator over an n grid.

    Each trial draws a fresh task (unless ``fix_task``) and a fresh
    dataset per n, all from streams keyed by (seed, trial, n index), so
    results are independent of worker count and trial order.
    """
    n_grid = [int(n) for n in n_grid]
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be a nonempty ascending list")
    if estimator == "ridge" and (lam is None or lam <= 0):
        raise ValueError("ridge estimator needs a positive lambda")

    def one_cell(n_idx: int, trial: int) -> tuple[int, int, float]:
        n = n_grid[n_idx]
        task_key = (streams.TASK, 0) if fix_task else (streams.TASK, trial)
        task = sample_task(d, sigma, streams.stream(seed, *task_key))
        data = sample_dataset(task, n, streams.stream(seed, streams.DATA, trial, n_idx))
        rng_test = streams.stream(seed, streams.TEST, trial, n_idx)
        return n, trial, _trial_error(task, data, estimator, lam, n_test, rng_test)

    records = _run_cells(one_cell, len(n_grid), trials, workers)
    meta = {"task": "linreg", "estimator": estimator, "d": str(d), "sigma": repr(float(sigma)), "seed": str(seed)}
    if estimator == "ridge":
        meta["lambda"] = repr(float(lam))
    return aggregate_trials(records, metadata=meta)


def _run_cells(one_cell, n_count: int, trials: int, workers: int):
    """Evaluate every (n index, trial) cell, optionally on a thread pool."""
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    cells = [(i, t) for i in range(n_count) for t in range(trials)]
    if workers <= 1:
        return [one_cell(i, t) for i, t in cells]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: one_cell(*c), cells))
