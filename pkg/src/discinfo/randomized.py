"""Average-case errors on spheres and the randomized lower/upper bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral_core import LinearProblem, SingularSpectrum, apply_optimal_algorithm, worst_case_error


def child_rng(seed: int, *index: int) -> np.random.Generator:
    """Independent stream for replication ``index`` under a master seed."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, index)]))


@dataclass
class RandomizedEstimate:
    value: float
    standard_error: float
    samples: int
    seed: int | None = None


class SphereSampler:
    """Uniform points on the unit sphere of R^m (normalized Gaussian vectors)."""

    def __init__(self, dimension: int, seed: int):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension
        self.seed = seed
        self._rng = np.random.default_rng(seed)
        self.position = 0

    def sample(self, count: int) -> np.ndarray:
        g = self._rng.standard_normal((count, self.dimension))
        self.position += count
        return g / np.linalg.norm(g, axis=1, keepdims=True)


def avg_case_error_closed_form(spectrum: SingularSpectrum, n: int, m: int) -> float:
    """Average error of the optimal algorithm under the uniform measure on the m-sphere.

    Each coordinate has second moment 1/m on the sphere, which gives
    ``sqrt(sum_{i=n+1..m} sigma_i^2 / m)``.
    """
    if not 0 <= n <= m:
        raise ValueError(f"need 0 <= n <= m, got n={n}, m={m}")
    if m > len(spectrum):
        raise ValueError(f"m={m} exceeds spectrum length {len(spectrum)}")
    tail = spectrum.values[n:m]
    return math.sqrt(float(np.sum(tail**2)) / m)


def avg_case_error_mc(problem: LinearProblem, n: int, sampler: SphereSampler, samples: int) -> RandomizedEstimate:
    """Root-mean-square of ``||S f - A_n(f)||`` over sphere samples.

    The sphere lives in the span of the first ``sampler.dimension`` singular
    directions. The standard error is propagated from the mean of squares
    through the square root.
    """
    if samples < 10:
        raise ValueError("need at least 10 samples")
    m = sampler.dimension
    if m > problem.dim:
        raise ValueError("sphere dimension exceeds problem dimension")
    alpha = np.zeros((samples, problem.dim))
    alpha[:, :m] = sampler.sample(samples)
    f = problem.element(alpha)
    residual = f @ problem.matrix.T - apply_optimal_algorithm(problem, n, f)
    sq = np.sum(residual**2, axis=1)
    mean = float(np.mean(sq))
    value = math.sqrt(mean)
    se_mean = float(np.std(sq, ddof=1)) / math.sqrt(samples)
    se = se_mean / (2 * value) if value > 0 else 0.0
    return RandomizedEstimate(value, se, samples, sampler.seed)


def _check_length(spectrum, n):
    if n < 1:
        raise ValueError("randomized bounds need n >= 1")
    if len(spectrum) < 4 * n:
        raise ValueError(f"spectrum of length {len(spectrum)} is too short for n={n} (need {4 * n})")


def bakhvalov_lower_bound(spectrum: SingularSpectrum, n: int) -> float:
    """``sigma_{4n} / 2``, a lower bound on the n-th minimal randomized error."""
    _check_length(spectrum, n)
    return 0.5 * spectrum.sigma(4 * n)


def bakhvalov_avg_bound(spectrum: SingularSpectrum, n: int) -> float:
    """The intermediate bound ``(sqrt 2 / 2) e_avg(2n, rho_{4n})``; never below :func:`bakhvalov_lower_bound`."""
    _check_length(spectrum, n)
    return math.sqrt(2) / 2 * avg_case_error_closed_form(spectrum, 2 * n, 4 * n)


@dataclass
class Sandwich:
    n: int
    lower: float
    upper: float


def sandwich_report(spectrum: SingularSpectrum, n: int) -> Sandwich:
    """Two-sided bound on the randomized error with arbitrary linear functionals.

    Lower: ``e_{4n-1}/2``. Upper: the deterministic worst-case error ``e_n``.
    """
    lower = bakhvalov_lower_bound(spectrum, n)
    upper = worst_case_error(spectrum, n)
    assert lower <= upper
    return Sandwich(n, lower, upper)
