"""Binary Gaussian classification toy model with a closed-form cliff curve.

Labels are uniform on {-1, +1} and x ~ N(y * s * e1, I_d). The class-mean
estimator w = (1/n) sum y_i x_i has a test error that is an explicit
function of w, admits an exact low-dimensional sampling shortcut, and is
tightly approximated by a closed-form cliff-shaped curve in n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from . import streams
from .curves import ScalingCurve, aggregate_trials

__all__ = [
    "GaussianTask",
    "ClassifierWeights",
    "std_normal_cdf",
    "estimate_weights",
    "exact_error",
    "simulate_error",
    "sample_error_sufficient",
    "asymptotic_error",
    "approx_error",
    "run_gaussian_scaling",
    "sample_chi_squared",
]

# Above this many degrees of freedom, summing squared normals costs more
# than it is worth; switch to the gamma-based sampler.
CHI2_DIRECT_MAX_DF = 10_000


@dataclass(frozen=True)
class GaussianTask:
    """Class-mean separation s along the first axis in d dimensions."""

    d: int
    s: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.s < 0:
            raise ValueError(f"signal-to-noise ratio must be >= 0, got {self.s}")


@dataclass(frozen=True)
class ClassifierWeights:
    w: np.ndarray

    def __post_init__(self):
        if self.w.ndim != 1 or not np.isfinite(self.w).all():
            raise ValueError("weights must be a finite vector")


def std_normal_cdf(x):
    """Standard normal CDF via the complementary error function.

    Accurate to well under 1e-14 absolute over the whole real line;
    accepts scalars or arrays.
    """
    if np.isscalar(x):
        return 0.5 * float(special.erfc(-float(x) / math.sqrt(2.0)))
    return 0.5 * special.erfc(-np.asarray(x, dtype=float) / math.sqrt(2.0))


def estimate_weights(xs: np.ndarray, ys: np.ndarray) -> ClassifierWeights:
    """Class-mean estimator w = (1/n) sum of y_i * x_i."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 2 or ys.shape != (len(xs),):
        raise ValueError(f"inconsistent dataset shapes {xs.shape}, {ys.shape}")
    if len(xs) == 0:
        raise ValueError("need at least one labeled sample")
    return ClassifierWeights(w=(ys @ xs) / len(xs))


def exact_error(task: GaussianTask, weights: ClassifierWeights) -> float:
    """Test error of sign(w.x): Phi(-s * w_1 / |w|)."""
    w = weights.w
    if w.shape != (task.d,):
        raise ValueError(f"weight shape {w.shape} != ({task.d},)")
    norm = np.linalg.norm(w)
    if norm == 0.0:
        raise ValueError("test error undefined for the zero classifier")
    return float(std_normal_cdf(-task.s * w[0] / norm))


def simulate_error(task: GaussianTask, n: int, rng: np.random.Generator) -> float:
    """Draw n labeled samples, fit the class-mean classifier, return its error.

    The error of a fitted w is known in closed form, so no test set is
    drawn. The probability-zero degenerate w = 0 reports chance error.
    """
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    ys = rng.integers(0, 2, size=n) * 2.0 - 1.0
    xs = rng.standard_normal((n, task.d))
    xs[:, 0] += ys * task.s
    w = estimate_weights(xs, ys)
    if not np.any(w.w):
        warnings.warn("degenerate zero estimate; reporting chance error", RuntimeWarning)
        return 0.5
    return exact_error(task, w)


def sample_chi_squared(df: int, rng: np.random.Generator) -> float:
    """One chi-squared draw with df degrees of freedom.

    Small df sums squared normals directly; large df delegates to the
    generator's gamma-based sampler. df = 0 is the degenerate point mass
    at zero.
    """
    if df < 0:
        raise ValueError(f"degrees of freedom must be >= 0, got {df}")
    if df == 0:
        return 0.0
    if df <= CHI2_DIRECT_MAX_DF:
        z = rng.standard_normal(df)
        return float(z @ z)
    return float(rng.chisquare(df))


def sample_error_sufficient(task: GaussianTask, n: int, rng: np.random.Generator) -> float:
    """Error draw through the two sufficient statistics of the estimator.

    The margin s * w_1 / |w| of the fitted classifier equals, in
    distribution, a function of one standard normal and one chi-squared
    with d - 1 degrees of freedom, so the cost per draw is independent
    of n and nearly independent of d.
    """
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    s = task.s
    eps = rng.standard_normal()
    chi2 = sample_chi_squared(task.d - 1, rng)
    first = s + eps / math.sqrt(n)
    norm_sq = first * first + chi2 / n
    if norm_sq == 0.0:
        warnings.warn("degenerate zero estimate; reporting chance error", RuntimeWarning)
        return 0.5
    margin = s * first / math.sqrt(norm_sq)
    return float(std_normal_cdf(-margin))


def asymptotic_error(task: GaussianTask, n: int, chi2_quantile: float = 0.5) -> float:
    """Large-n expansion Phi(-s) + exp(-s^2/2)/(sqrt(8 pi) s) * q / n.

    q is the requested quantile of the chi-squared distribution with
    d - 1 degrees of freedom (median by default). Invalid at s = 0,
    where the leading term divides by zero.
    """
    if task.s == 0:
        raise ValueError("asymptotic expansion undefined at s = 0")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 0.0 < chi2_quantile < 1.0:
        raise ValueError(f"quantile must lie in (0, 1), got {chi2_quantile}")
    s = task.s
    q = 0.0 if task.d == 1 else float(stats.chi2.ppf(chi2_quantile, df=task.d - 1))
    return float(std_normal_cdf(-s) + math.exp(-s * s / 2.0) / (math.sqrt(8.0 * math.pi) * s) * q / n)


def approx_error(task: GaussianTask, n: int) -> float:
    """Closed-form scaling curve Phi(-s / sqrt(1 + d / (n s^2))).

    Strictly decreasing in n with limit Phi(-s); tends to chance error
    when d / (n s^2) blows up, which is also the s = 0 value.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if task.s == 0:
        return 0.5
    s = task.s
    return float(std_normal_cdf(-s / math.sqrt(1.0 + task.d / (n * s * s))))


def run_gaussian_scaling(
    d: int,
    s: float,
    n_grid,
    trials: int,
    seed: int,
    sampler: str = "sufficient",
    workers: int = 1,
) -> ScalingCurve:
    """Scaling curve of simulated classification errors over an n grid."""
    from .linreg import _run_cells

    n_grid = [int(n) for n in n_grid]
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be a nonempty ascending list")
    if sampler not in ("full", "sufficient"):
        raise ValueError(f"unknown sampler {sampler!r} (expected 'full' or 'sufficient')")
    task = GaussianTask(d=d, s=float(s))
    draw = simulate_error if sampler == "full" else sample_error_sufficient

    def one_cell(n_idx: int, trial: int) -> tuple[int, int, float]:
        n = n_grid[n_idx]
        rng = streams.stream(seed, streams.DATA, trial, n_idx)
        return n, trial, draw(task, n, rng)

    records = _run_cells(one_cell, len(n_grid), trials, workers)
    meta = {
        "task": "gaussian",
        "d": str(d),
        "s": repr(float(s)),
        "sampler": sampler,
        "seed": str(seed),
    }
    return aggregate_trials(records, metadata=meta)
