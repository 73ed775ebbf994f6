"""Nonadaptive linear information and its radius for linear problems."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .spectral_core import LinearProblem

RANK_RTOL = 1e-10


class InformationMap:
    """Ordered functionals ``L_j(f) = sum_i L[j, i] f_i`` stored as matrix rows."""

    def __init__(self, functionals, dim: int | None = None):
        rows = [np.asarray(r, dtype=float).reshape(-1) for r in functionals]
        if dim is None:
            if not rows:
                raise ValueError("empty information needs an explicit dimension")
            dim = rows[0].size
        for r in rows:
            if r.size != dim:
                raise ValueError(f"functional of length {r.size} on a {dim}-dimensional space")
        self.dim = int(dim)
        self.matrix = np.array(rows).reshape(len(rows), self.dim)

    def __len__(self):
        return self.matrix.shape[0]

    def __call__(self, f):
        return np.asarray(f, dtype=float) @ self.matrix.T

    def __repr__(self):
        return f"InformationMap(n={len(self)}, dim={self.dim})"

    def canonical(self) -> "InformationMap":
        """Drop functionals that are linear combinations of earlier ones."""
        keep = []
        tol = RANK_RTOL * _max_row_norm(self.matrix)
        for j in range(len(self)):
            trial = self.matrix[keep + [j]]
            if _rank(trial, tol) == len(keep) + 1:
                keep.append(j)
        return InformationMap(self.matrix[keep], self.dim)

    def recombined(self, T) -> "InformationMap":
        """Information with functionals ``sum_k T[j, k] L_k``."""
        return InformationMap(np.asarray(T, dtype=float) @ self.matrix, self.dim)

    def truncated(self, d: int) -> "InformationMap":
        return InformationMap(self.matrix[:, :d], d)

    def extended(self, rows) -> "InformationMap":
        return InformationMap(np.vstack([self.matrix, np.atleast_2d(rows)]), self.dim)

    def to_json(self) -> list:
        return self.matrix.tolist()

    @classmethod
    def from_json(cls, doc, dim: int | None = None) -> "InformationMap":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(doc, dim)


@dataclass
class RadiusReport:
    radius: float
    kernel_dim: int
    witness: np.ndarray | None


def _max_row_norm(M):
    return float(np.max(np.linalg.norm(M, axis=1))) if M.size else 0.0


def _rank(M, tol):
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol))


def kernel_basis(N: InformationMap, weights=None) -> np.ndarray:
    """Columns spanning ker N, orthonormal in the weighted source inner product."""
    m = N.dim
    w = np.ones(m) if weights is None else np.asarray(weights, dtype=float)
    if len(N) == 0:
        return np.diag(1.0 / w)
    # In g = w*f coordinates the norm is Euclidean and L_j acts as L_j / w.
    M = N.matrix / w
    tol = RANK_RTOL * _max_row_norm(M)
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    r = int(np.sum(s > tol))
    return Vt[r:].T / w[:, None]


def radius_nonadaptive(problem: LinearProblem, N: InformationMap) -> RadiusReport:
    """Radius of information: the largest ``||S h||`` over unit ``h`` in ker N.

    For a linear problem on a Hilbert source the zero fiber is the worst one,
    so this is the minimal worst-case error among algorithms using ``N``.
    """
    if N.dim != problem.dim:
        raise ValueError(f"information on dimension {N.dim}, problem has {problem.dim}")
    K = kernel_basis(N, problem.weights)
    if K.shape[1] == 0:
        return RadiusReport(0.0, 0, None)
    _, s, Vt = np.linalg.svd(problem.matrix @ K, full_matrices=False)
    witness = K @ Vt[0]
    return RadiusReport(float(s[0]), K.shape[1], witness)


def radius_recombination_check(problem: LinearProblem, N: InformationMap, T) -> bool:
    """True when recombining N by an invertible ``T`` leaves the radius unchanged."""
    T = np.asarray(T, dtype=float)
    n = len(N)
    if T.shape != (n, n):
        raise ValueError(f"recombination must be {n}x{n}, got {T.shape}")
    if n and np.linalg.matrix_rank(T) < n:
        raise ValueError("recombination matrix is singular")
    r0 = radius_nonadaptive(problem, N).radius
    r1 = radius_nonadaptive(problem, N.recombined(T)).radius
    return abs(r0 - r1) <= 1e-9 * problem.spectrum.sigma(1)
