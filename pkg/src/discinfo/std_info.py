"""Function values as information: grid models, Monte Carlo, and a two-point rule."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as P

from .information import InformationMap, radius_nonadaptive
from .randomized import RandomizedEstimate, child_rng
from .spectral_core import LinearProblem, worst_case_error

MAX_SUBSET_DIM = 12


@dataclass
class GridModel:
    """Functions stored by their values on ``grid``.

    ``gram`` defines the norm ``||f||^2 = v^T G v`` on value vectors ``v``
    and ``S`` maps values to the target. Point evaluation at ``grid[i]`` is
    the i-th coordinate functional.
    """

    grid: np.ndarray
    gram: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.gram = np.asarray(self.gram, dtype=float)
        self.S = np.atleast_2d(np.asarray(self.S, dtype=float))
        m = self.grid.size
        if self.gram.shape != (m, m) or self.S.shape[1] != m:
            raise ValueError("grid, gram and S dimensions disagree")
        if not np.allclose(self.gram, self.gram.T, rtol=0, atol=1e-12 * np.abs(self.gram).max()):
            raise ValueError("gram matrix is not symmetric")
        # raises LinAlgError when not positive definite
        self._R = np.linalg.cholesky(self.gram).T
        self._Rinv = np.linalg.inv(self._R)

    @property
    def m(self) -> int:
        return self.grid.size

    def problem(self) -> LinearProblem:
        """The same problem in coordinates ``g = R v`` where ``G = R^T R``."""
        return LinearProblem(self.S @ self._Rinv)

    def evaluations(self, points) -> InformationMap:
        """Point evaluations at the given grid indices, in ``problem()`` coordinates."""
        return InformationMap(self._Rinv[list(points)], self.m)

    @classmethod
    def random(cls, m: int, rng, outputs: int | None = None) -> "GridModel":
        grid = np.sort(rng.random(m))
        A = rng.standard_normal((m, m))
        gram = A @ A.T / m + 0.1 * np.eye(m)
        S = rng.standard_normal((outputs or m, m))
        return cls(grid, gram, S)

    @classmethod
    def from_json(cls, doc) -> "GridModel":
        if isinstance(doc, (str, Path)):
            text = Path(doc).read_text() if Path(doc).exists() else str(doc)
            doc = json.loads(text)
        return cls(doc["grid"], doc["gram"], doc["S"])

    def to_json(self) -> dict:
        return {"grid": self.grid.tolist(), "gram": self.gram.tolist(), "S": self.S.tolist()}


@dataclass
class StdVsAll:
    n: int
    e_std: float
    e_all: float
    best_points: tuple


def std_vs_all(model: GridModel, n: int) -> StdVsAll:
    """Best radius from ``n`` point evaluations against the best from ``n`` arbitrary functionals.

    The point search is exhaustive over all ``n``-subsets of the grid.
    """
    m = model.m
    if m > MAX_SUBSET_DIM:
        raise ValueError(f"exhaustive subset search limited to m <= {MAX_SUBSET_DIM}")
    if not 0 <= n <= m:
        raise ValueError(f"need 0 <= n <= m, got n={n}")
    problem = model.problem()
    e_all = worst_case_error(problem.spectrum, n)
    best, best_points = math.inf, ()
    for pts in combinations(range(m), n):
        r = radius_nonadaptive(problem, model.evaluations(pts)).radius
        if r < best:
            best, best_points = r, pts
    return StdVsAll(n, best, e_all, best_points)


def mc_integration(f, n: int, rng, seed: int | None = None) -> RandomizedEstimate:
    """Plain Monte Carlo mean of ``f`` over ``n`` uniform points of [0, 1]."""
    if n < 1:
        raise ValueError("need n >= 1")
    y = np.asarray(f(rng.random(n)), dtype=float) * np.ones(n)
    # shifted mean: exact for constants
    d = y - y[0]
    value = float(y[0] + np.mean(d))
    se = float(np.std(d, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return RandomizedEstimate(value, se, n, seed)


def mc_rmse(f, exact: float, n: int, reps: int, seed: int) -> float:
    """Root-mean-square error of :func:`mc_integration` over ``reps`` replications."""
    errs = [mc_integration(f, n, child_rng(seed, n, r)).value - exact for r in range(reps)]
    return math.sqrt(float(np.mean(np.square(errs))))


def _constraint_vector(degree: int) -> np.ndarray:
    # integral minus the trapezoid value, applied to monomial coefficients
    k = np.arange(degree + 1)
    return 1.0 / (k + 1) - (np.where(k == 0, 1.0, 0.0) + 1.0) / 2


def constraint_residual(coeffs) -> float:
    """``int_0^1 f - (f(0) + f(1))/2`` for a polynomial in monomial coefficients."""
    c = np.asarray(coeffs, dtype=float)
    return float(_constraint_vector(c.size - 1) @ c)


def project_to_constraint(coeffs) -> np.ndarray:
    """L2([0,1])-orthogonal projection onto polynomials with ``int f = (f(0)+f(1))/2``."""
    c = np.asarray(coeffs, dtype=float)
    k = np.arange(c.size)
    H = 1.0 / (k[:, None] + k[None, :] + 1)  # L2 Gram matrix of monomials
    a = _constraint_vector(c.size - 1)
    if not np.any(a):
        return c.copy()
    Ha = np.linalg.solve(H, a)
    return c - Ha * (a @ c) / (a @ Ha)


def two_point_exact(coeffs, tol: float = 1e-10) -> float:
    """Integral over [0, 1] from the two values f(0), f(1).

    Exact on the space where the integral equals the trapezoid value.
    """
    c = np.asarray(coeffs, dtype=float)
    residual = constraint_residual(c)
    if abs(residual) > tol * max(1.0, np.abs(c).max()):
        raise ValueError(f"polynomial violates the two-point constraint by {residual:.3g}")
    return float((P.polyval(0.0, c) + P.polyval(1.0, c)) / 2)
