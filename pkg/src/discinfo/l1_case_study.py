"""The squared l2 norm on the l1 ball: easy with random signs, hard in the worst case.

Randomized side: ``L(x) = sum_k eps_k x_k`` with independent fair signs has
variance ``||x||_2^2``, and the sample variance of ``n`` copies estimates it
with root-mean-square error ``O(n^-1/2)``.

Worst-case side: any ``n`` linear functionals leave some ``x`` in their common
kernel with ``||x||_1 <= 1`` and ``||x||_2`` at least the Gelfand width of
``B_1^m`` in ``l2^m``; no algorithm can then beat ``width^2 / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .information import InformationMap
from .randomized import child_rng

MAX_EXACT_DIM = 10
OPEN_BALL_SCALE = 1.0 - 1e-9
_CHUNK = 1000


class WidthLimitError(ValueError):
    pass


def _as_matrix(N, m=None) -> np.ndarray:
    if isinstance(N, InformationMap):
        return N.matrix
    N = np.asarray(N, dtype=float)
    if N.size == 0:
        if m is None:
            raise ValueError("empty information needs the dimension m")
        return np.zeros((0, m))
    return np.atleast_2d(N)


def rademacher_functional(x, rng) -> float:
    x = np.asarray(x, dtype=float)
    eps = 2.0 * rng.integers(0, 2, size=x.size) - 1.0
    return float(eps @ x)


def empirical_variance_estimator(x, n: int, rng) -> float:
    """Sample variance (ddof=1) of ``n`` independent copies of the random-sign functional."""
    if n < 2:
        raise ValueError("the empirical variance needs n >= 2")
    x = np.asarray(x, dtype=float)
    eps = 2.0 * rng.integers(0, 2, size=(n, x.size)) - 1.0
    return float(np.var(eps @ x, ddof=1))


def estimator_variance_exact(x, n: int) -> float:
    """``Var A_n(x) = (2/n) (||x||_2^4 n/(n-1) - ||x||_4^4)``."""
    x = np.asarray(x, dtype=float)
    s2 = float(np.sum(x**2))
    q4 = float(np.sum(x**4))
    return 2.0 / n * (s2 * s2 * n / (n - 1) - q4)


def rmse_envelope(x, n: int) -> float:
    """``sqrt(2/(n-1)) ||x||_1^2``; dominates the exact RMSE for every x."""
    return math.sqrt(2.0 / (n - 1)) * float(np.sum(np.abs(x))) ** 2


def _estimates(x, n, reps, rng):
    out = np.empty(reps)
    for start in range(0, reps, _CHUNK):
        k = min(_CHUNK, reps - start)
        eps = 2.0 * rng.integers(0, 2, size=(k, n, x.size), dtype=np.int8) - 1.0
        out[start:start + k] = np.var(eps @ x, axis=1, ddof=1)
    return out


@dataclass
class RmseRow:
    n: int
    rmse: float
    envelope: float
    reps: int
    seed: int


def rmse_sweep(x, n_grid, reps: int, seed: int) -> list[RmseRow]:
    """Empirical RMSE of the estimator around ``||x||_2^2`` for each ``n``."""
    if reps < 100:
        raise ValueError("need reps >= 100")
    x = np.asarray(x, dtype=float)
    target = float(np.sum(x**2))
    rows = []
    for n in n_grid:
        est = _estimates(x, n, reps, child_rng(seed, n))
        rmse = math.sqrt(float(np.mean((est - target) ** 2)))
        rows.append(RmseRow(n, rmse, rmse_envelope(x, n), reps, seed))
    return rows


def kernel_polytope_max_l2(N, m: int | None = None):
    """Exact ``max ||x||_2`` over ``{||x||_1 <= 1, N x = 0}`` and a maximizer.

    The maximum of a convex function sits at a vertex. A vertex ``x`` of the
    section of the cross-polytope has a support ``J`` on which the null space
    of ``N[:, J]`` is one-dimensional and spanned by ``x``, so ``|J|`` is at
    most ``rank(N) + 1``. All such supports are enumerated.
    """
    N = _as_matrix(N, m)
    m = N.shape[1]
    if m > MAX_EXACT_DIM:
        raise WidthLimitError(f"exact width limited to m <= {MAX_EXACT_DIM}")
    if N.shape[0] == 0 or not np.any(N):
        w = np.zeros(m)
        w[0] = 1.0
        return 1.0, w
    smax = np.linalg.norm(N, 2)
    tol = 1e-10 * smax
    r = int(np.sum(np.linalg.svd(N, compute_uv=False) > tol))
    if r >= m:
        return 0.0, np.zeros(m)

    best, witness = -1.0, None
    for j in range(1, r + 2):
        subsets = np.array(list(combinations(range(m), j)))
        blocks = np.transpose(N[:, subsets], (1, 0, 2))  # (count, n, j)
        _, s, Vt = np.linalg.svd(blocks, full_matrices=True)
        rank = np.sum(s > tol, axis=1)
        ok = rank == j - 1
        if not np.any(ok):
            continue
        x = Vt[ok, -1, :]
        x = x / np.sum(np.abs(x), axis=1, keepdims=True)
        full = np.all(np.abs(x) > 1e-12, axis=1)
        if not np.any(full):
            continue
        x, idx = x[full], subsets[ok][full]
        vals = np.linalg.norm(x, axis=1)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            witness = np.zeros(m)
            witness[idx[k]] = x[k]
    return best, witness


def sample_feasible(N, count: int, rng, m: int | None = None) -> np.ndarray:
    """Random points of ``{||x||_1 = 1, N x = 0}`` (rows)."""
    N = _as_matrix(N, m)
    m = N.shape[1]
    if N.shape[0]:
        _, s, Vt = np.linalg.svd(N, full_matrices=True)
        r = int(np.sum(s > 1e-10 * s[0])) if s.size and s[0] > 0 else 0
        K = Vt[r:].T
    else:
        K = np.eye(m)
    if K.shape[1] == 0:
        return np.zeros((count, m))
    x = rng.standard_normal((count, K.shape[1])) @ K.T
    return x / np.sum(np.abs(x), axis=1, keepdims=True)


@dataclass
class WidthEstimate:
    m: int
    n: int
    lower_bound: float
    upper_bound: float
    best_N: np.ndarray
    witness: np.ndarray
    certificate: np.ndarray | None = None
    candidates: list = field(default_factory=list, repr=False)


def restriction_certificate(N, m: int | None = None):
    """A kernel vector supported on ``n+1`` coordinates, scaled to ``||x||_1 = 1``.

    Such a vector always exists and has ``||x||_2 >= (n+1)^-1/2``.
    """
    N = _as_matrix(N, m)
    n, m = N.shape
    if n >= m:
        return None
    J = np.arange(n + 1)
    _, _, Vt = np.linalg.svd(N[:, J], full_matrices=True)
    x = np.zeros(m)
    x[J] = Vt[-1]
    return x / np.sum(np.abs(x))


def _local_search(N, rng, iterations):
    value, _ = kernel_polytope_max_l2(N)
    step = 0.5
    for _ in range(iterations):
        i = rng.integers(N.shape[0])
        j = rng.integers(N.shape[1])
        trial = N.copy()
        trial[i, j] += step * rng.standard_normal()
        v, _ = kernel_polytope_max_l2(trial)
        if v < value:
            N, value = trial, v
            step = min(step * 1.5, 1.0)
        else:
            step = max(step * 0.8, 1e-9)
    return N, value


def _random_rows(n, m, rng):
    Q, _ = np.linalg.qr(rng.standard_normal((m, n)))
    return Q.T


def _finish(m, n, N, value, candidates):
    upper, witness = kernel_polytope_max_l2(N)
    upper = min(upper, value)
    lower = (n + 1) ** -0.5
    cert = restriction_certificate(N)
    if np.linalg.norm(cert) < lower - 1e-12:
        raise AssertionError("restriction certificate below (n+1)^-1/2")
    return WidthEstimate(m, n, lower, upper, N, witness, cert, candidates)


def _check_dims(m, n):
    if m > MAX_EXACT_DIM:
        raise WidthLimitError(f"exact width limited to m <= {MAX_EXACT_DIM}")
    if m < 1 or n < 0:
        raise ValueError("need m >= 1 and n >= 0")


def _trivial(m, n):
    if n == 0:
        w = np.zeros(m)
        w[0] = 1.0
        return WidthEstimate(m, 0, 1.0, 1.0, np.zeros((0, m)), w, w)
    return WidthEstimate(m, n, 0.0, 0.0, np.eye(m), np.zeros(m), None)


def _width_chain(m, n_max, restarts, seed, iterations):
    """Search levels 1..n_max in order; yields one estimate per level."""
    best_N, best_val = np.zeros((0, m)), 1.0
    for k in range(1, n_max + 1):
        rng = child_rng(seed, k, 0)
        start = np.vstack([best_N, rng.standard_normal(m)])
        level = [_local_search(start, rng, iterations)]
        for r in range(1, restarts + 1):
            rng = child_rng(seed, k, r)
            level.append(_local_search(_random_rows(k, m, rng), rng, iterations))
        N_k, v_k = min(level, key=lambda t: t[1])
        if v_k > best_val:
            # only reachable through rounding: an extra row cannot enlarge the kernel
            N_k, v_k = level[0]
        best_N, best_val = N_k, min(v_k, best_val)
        yield _finish(m, k, best_N, best_val, [N for N, _ in level])


def gelfand_width_bounds(m: int, n: int, restarts: int = 8, seed: int = 0,
                         iterations: int = 150) -> WidthEstimate:
    """Certified two-sided bounds on the Gelfand width ``c_n(B_1^m, l2^m)``.

    The upper bound comes from randomized local search over ``n x m``
    information matrices, each scored exactly by
    :func:`kernel_polytope_max_l2`. Levels ``1..n`` are searched in turn and
    each level also tries the previous optimum plus one row, so the upper
    bound never increases with ``n``. The lower bound ``(n+1)^-1/2`` holds
    for every information matrix.
    """
    _check_dims(m, n)
    if n == 0 or n >= m:
        return _trivial(m, n)
    *_, last = _width_chain(m, n, restarts, seed, iterations)
    return last


def gelfand_width_table(m: int, restarts: int = 8, seed: int = 0,
                        iterations: int = 150) -> list[WidthEstimate]:
    """``gelfand_width_bounds(m, n, ...)`` for n = 0..m from a single search chain."""
    _check_dims(m, 0)
    table = [_trivial(m, 0)]
    table.extend(_width_chain(m, m - 1, restarts, seed, iterations))
    table.append(_trivial(m, m))
    return table


def wc_lower_bound_norm_squared(m: int, n: int, width: WidthEstimate) -> float:
    """``width_lower^2 / 2``: no algorithm with n functionals does better on ``||x||_2^2``.

    On the ray ``alpha * x`` through a kernel vector every algorithm returns
    the same value, while the target sweeps ``[0, ||x||_2^2]``.
    """
    if (width.m, width.n) != (m, n):
        raise ValueError("width estimate is for a different (m, n)")
    return 0.5 * width.lower_bound**2


def probe_vectors(m: int) -> np.ndarray:
    """Flat vectors on the first k coordinates, k = 1..m, just inside the l1 ball."""
    P = np.zeros((m, m))
    for k in range(1, m + 1):
        P[k - 1, :k] = OPEN_BALL_SCALE / k
    return P


@dataclass
class SeparationRow:
    n: int
    wc_floor: float
    ran_rmse: float


def separation_report(m: int, n_grid, reps: int, seed: int, restarts: int = 4,
                      probes=None) -> list[SeparationRow]:
    """Worst-case floor against randomized RMSE for each ``n``.

    ``ran_rmse`` is the largest empirical RMSE over the probe vectors; it is
    NaN for ``n < 2`` where the estimator is undefined.
    """
    if m > MAX_EXACT_DIM:
        raise WidthLimitError(f"exact width limited to m <= {MAX_EXACT_DIM}")
    probes = probe_vectors(m) if probes is None else np.atleast_2d(np.asarray(probes, dtype=float))
    widths = {w.n: w for w in gelfand_width_table(m, restarts, seed)}
    rows = []
    for n in n_grid:
        width = widths[n] if n <= m else _trivial(m, n)
        floor = wc_lower_bound_norm_squared(m, n, width)
        if n < 2:
            ran = float("nan")
        else:
            ran = 0.0
            for p, x in enumerate(probes):
                est = _estimates(x, n, reps, child_rng(seed, n, p))
                target = float(np.sum(x**2))
                ran = max(ran, math.sqrt(float(np.mean((est - target) ** 2))))
        rows.append(SeparationRow(n, floor, ran))
    return rows
