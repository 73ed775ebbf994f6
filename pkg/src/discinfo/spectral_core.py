"""Compact linear problems on finite-dimensional spaces.

A problem is a matrix ``S`` acting on a source space with the weighted norm
``||f||^2 = sum_i w_i^2 f_i^2`` and landing in Euclidean space. Its singular
system ``S e_i = sigma_i e~_i`` gives the n-th minimal worst-case error
``sigma_{n+1}`` and the optimal algorithm that keeps the top ``n`` modes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Open-ball suprema are realized on the sphere of this radius.
OPEN_BALL_SCALE = 1.0 - 1e-9
# Singular values below this fraction of sigma_1 count as zero.
ZERO_SPECTRUM_RTOL = 1e-14


class SpectrumError(ValueError):
    pass


@dataclass(frozen=True)
class SingularSpectrum:
    """Nonincreasing, nonnegative singular values sigma_1 >= sigma_2 >= ..."""

    values: np.ndarray
    kind: str = "explicit"
    p: float | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size == 0:
            raise SpectrumError("spectrum must have at least one value")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise SpectrumError("singular values must be finite and nonnegative")
        if np.any(np.diff(v) > 0):
            raise SpectrumError("singular values are not nonincreasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def sigma(self, i: int) -> float:
        """1-based access; indices past the end are zero."""
        if i < 1:
            raise IndexError("singular values are indexed from 1")
        return float(self.values[i - 1]) if i <= self.values.size else 0.0


def make_spectrum(kind: str, params=None, m: int | None = None) -> SingularSpectrum:
    """Build a spectrum.

    ``kind="power-law"`` takes ``params={"p": p}`` (or a bare number) and gives
    ``sigma_i = i**-p``; ``kind="explicit"`` takes the values themselves.
    """
    if kind == "power-law":
        p = params["p"] if isinstance(params, dict) else params
        p = float(p)
        if m is None or m < 1:
            raise SpectrumError("power-law spectrum needs m >= 1")
        if not p > 0:
            raise SpectrumError(f"power-law exponent must be positive, got {p}")
        i = np.arange(1, m + 1, dtype=float)
        return SingularSpectrum(i**-p, kind="power-law", p=p)
    if kind == "explicit":
        values = params["values"] if isinstance(params, dict) else params
        values = np.asarray(values, dtype=float)
        if m is not None and m != values.size:
            raise SpectrumError(f"expected {m} values, got {values.size}")
        return SingularSpectrum(values)
    raise SpectrumError(f"unknown spectrum kind {kind!r}")


def worst_case_error(spectrum: SingularSpectrum, n: int) -> float:
    """n-th minimal worst-case error, sigma_{n+1} (zero once the spectrum is exhausted)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return spectrum.sigma(n + 1)


@dataclass
class LinearProblem:
    """A matrix ``S`` with a diagonally weighted source norm, plus its SVD.

    ``right`` holds the source basis e_i as columns (orthonormal in the
    weighted inner product) and ``left`` the target basis e~_i, so that
    ``matrix @ right[:, i] == sigma_i * left[:, i]``. Both are padded to the
    source dimension; padded left columns are zero.
    """

    matrix: np.ndarray
    weights: np.ndarray | None = None
    left: np.ndarray = field(init=False, repr=False)
    right: np.ndarray = field(init=False, repr=False)
    spectrum: SingularSpectrum = field(init=False)

    def __post_init__(self):
        S = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        m_in = S.shape[1]
        w = np.ones(m_in) if self.weights is None else np.asarray(self.weights, dtype=float)
        if w.shape != (m_in,):
            raise ValueError(f"need {m_in} source weights, got shape {w.shape}")
        if np.any(w <= 0):
            raise ValueError("source weights must be positive")
        self.matrix, self.weights = S, w

        U, s, Vt = np.linalg.svd(S / w, full_matrices=True)
        k = s.size
        sigma = np.zeros(m_in)
        sigma[:k] = s
        if sigma[0] > 0:
            sigma[sigma < ZERO_SPECTRUM_RTOL * sigma[0]] = 0.0
        left = np.zeros((S.shape[0], m_in))
        left[:, :k] = U[:, :k]
        self.left = left
        self.right = Vt.T / w[:, None]
        self.spectrum = SingularSpectrum(sigma)

    @classmethod
    def diagonal(cls, values, weights=None) -> "LinearProblem":
        return cls(np.diag(np.asarray(values, dtype=float)), weights)

    @classmethod
    def from_spectrum(cls, spectrum: SingularSpectrum, rng=None, weights=None) -> "LinearProblem":
        """Problem with the given spectrum; with ``rng`` the singular bases are random rotations."""
        sigma = np.asarray(spectrum.values)
        m = sigma.size
        w = np.ones(m) if weights is None else np.asarray(weights, dtype=float)
        if rng is None:
            return cls(np.diag(sigma) * w, w)
        U = _random_orthogonal(m, rng)
        V = _random_orthogonal(m, rng)
        return cls(U @ np.diag(sigma) @ V.T * w, w)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def norm(self, f) -> float:
        """Weighted source norm."""
        return float(np.linalg.norm(self.weights * np.asarray(f, dtype=float)))

    def coefficients(self, f) -> np.ndarray:
        """Coordinates alpha_i of ``f`` in the singular basis e_i."""
        f = np.asarray(f, dtype=float)
        return (self.weights**2 * f) @ self.right

    def element(self, alpha) -> np.ndarray:
        """Inverse of :meth:`coefficients`."""
        return np.asarray(alpha, dtype=float) @ self.right.T

    def truncation_information(self, n: int):
        """Functionals f -> <f, e_j>_F for j <= n, the information used by the optimal algorithm."""
        from .information import InformationMap

        rows = (self.weights[:, None] ** 2 * self.right[:, :n]).T
        return InformationMap(rows, self.dim)

    def to_json(self) -> dict:
        return {"kind": "matrix", "matrix": self.matrix.tolist(), "weights": self.weights.tolist()}


def _random_orthogonal(m, rng):
    Q, R = np.linalg.qr(rng.standard_normal((m, m)))
    return Q * np.sign(np.diag(R))


def apply_optimal_algorithm(problem: LinearProblem, n: int, f) -> np.ndarray:
    """Keep the top ``n`` singular modes: ``sum_{i<=n} sigma_i alpha_i e~_i``.

    ``f`` may be a single source vector or a stack of them (one per row).
    """
    f = np.asarray(f, dtype=float)
    if f.shape[-1] != problem.dim:
        raise ValueError(f"element has dimension {f.shape[-1]}, problem has {problem.dim}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n >= problem.dim:
        return f @ problem.matrix.T
    alpha = problem.coefficients(f)[..., :n]
    sigma = problem.spectrum.values[:n]
    return (alpha * sigma) @ problem.left[:, :n].T


def brute_force_worst_error(problem: LinearProblem, n: int, rng, samples: int = 1000) -> float:
    """Largest ``||S f - A_n(f)||`` over random ``f`` in the open unit ball.

    The sampled set always contains the witness ``(1 - 1e-9) e_{n+1}``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    m = problem.dim
    if n >= m:
        return 0.0
    alpha = rng.standard_normal((samples, m))
    alpha /= np.linalg.norm(alpha, axis=1, keepdims=True)
    f = problem.element(alpha) * OPEN_BALL_SCALE
    witness = OPEN_BALL_SCALE * problem.right[:, n]
    f = np.vstack([witness, f])
    residual = f @ problem.matrix.T - apply_optimal_algorithm(problem, n, f)
    return float(np.max(np.linalg.norm(residual, axis=1)))


def load_definition(doc) -> SingularSpectrum | LinearProblem:
    """Read a spectrum or problem from a JSON document, a dict, or a path to one.

    ``{"kind": "power-law", "p": 1, "m": 8}``, ``{"kind": "explicit", "values": [...]}``
    or ``{"kind": "matrix", "matrix": [[...]], "weights": [...]}``.
    """
    if isinstance(doc, (str, Path)):
        text = Path(doc).read_text() if Path(doc).exists() else str(doc)
        doc = json.loads(text)
    kind = doc.get("kind")
    if kind == "power-law":
        return make_spectrum("power-law", {"p": doc["p"]}, int(doc["m"]))
    if kind == "explicit":
        return make_spectrum("explicit", doc["values"], doc.get("m"))
    if kind == "matrix":
        return LinearProblem(np.asarray(doc["matrix"], dtype=float), doc.get("weights"))
    raise SpectrumError(f"unknown definition kind {kind!r}")
