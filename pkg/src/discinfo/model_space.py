"""A weighted sequence space where discontinuous functionals are concrete.

The source space has norm ``||f||^2 = sum_i i^(2q) f_i^2`` and the problem is
the embedding into plain l2, so ``sigma_i = i^-q``. A functional is a finite
sum of power families ``alpha * i^p`` plus a finitely supported part. Its
dual-norm series ``sum_i c_i^2 i^(-2q)`` converges exactly when every power
family has ``p < q - 1/2``; that is the continuity test used throughout.

Term coefficients and exponents are kept as :class:`fractions.Fraction`, so
the cancellation deciding continuity on a kernel is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .information import InformationMap, radius_nonadaptive
from .spectral_core import LinearProblem

CONTINUOUS = "continuous"
DISCONTINUOUS = "discontinuous"


def _frac(x) -> Fraction:
    # Floats go through their shortest repr so 0.1 means 1/10.
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class ModelSpace:
    q: Fraction

    def __init__(self, q=1):
        q = _frac(q)
        if q <= 0:
            raise ValueError("weight exponent q must be positive")
        object.__setattr__(self, "q", q)

    @property
    def threshold(self) -> Fraction:
        """Power families with exponent at or above this diverge."""
        return self.q - Fraction(1, 2)

    def sigma(self, d: int) -> np.ndarray:
        return np.arange(1, d + 1, dtype=float) ** -float(self.q)

    def problem(self, d: int) -> LinearProblem:
        """Truncation to the first ``d`` coordinates."""
        return LinearProblem(np.eye(d), np.arange(1, d + 1, dtype=float) ** float(self.q))


@dataclass(frozen=True)
class SymbolicFunctional:
    """``L(f) = sum_terms alpha * sum_i i^p f_i + sum_k finite[k] f_k`` (1-based indices)."""

    terms: dict = field(default_factory=dict)
    finite: dict = field(default_factory=dict)

    def __post_init__(self):
        terms, finite = {}, {}
        for p, a in self.terms.items():
            p, a = _frac(p), _frac(a)
            terms[p] = terms.get(p, Fraction(0)) + a
        for k, v in self.finite.items():
            k, v = int(k), _frac(v)
            if k < 1:
                raise ValueError("finite-part indices start at 1")
            finite[k] = finite.get(k, Fraction(0)) + v
        object.__setattr__(self, "terms", {p: a for p, a in sorted(terms.items()) if a != 0})
        object.__setattr__(self, "finite", {k: v for k, v in sorted(finite.items()) if v != 0})

    @classmethod
    def power(cls, p, alpha=1) -> "SymbolicFunctional":
        return cls({p: alpha})

    @classmethod
    def point(cls, index: int, value=1) -> "SymbolicFunctional":
        return cls({}, {index: value})

    def __add__(self, other):
        terms = dict(self.terms)
        for p, a in other.terms.items():
            terms[p] = terms.get(p, Fraction(0)) + a
        finite = dict(self.finite)
        for k, v in other.finite.items():
            finite[k] = finite.get(k, Fraction(0)) + v
        return SymbolicFunctional(terms, finite)

    def __rmul__(self, c):
        c = _frac(c)
        return SymbolicFunctional(
            {p: c * a for p, a in self.terms.items()},
            {k: c * v for k, v in self.finite.items()},
        )

    def __neg__(self):
        return -1 * self

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.terms and not self.finite

    def coefficients(self, d: int) -> np.ndarray:
        """Coefficient vector ``c_1..c_d``."""
        i = np.arange(1, d + 1, dtype=float)
        c = np.zeros(d)
        for p, a in self.terms.items():
            c += float(a) * i ** float(p)
        for k, v in self.finite.items():
            if k <= d:
                c[k - 1] += float(v)
        return c

    def divergent_terms(self, space: ModelSpace) -> dict:
        return {p: a for p, a in self.terms.items() if p >= space.threshold}

    def to_json(self) -> dict:
        return {
            "terms": [{"p": _num(p), "alpha": _num(a)} for p, a in self.terms.items()],
            "finite": {str(k): _num(v) for k, v in self.finite.items()},
        }

    @classmethod
    def from_json(cls, doc) -> "SymbolicFunctional":
        if isinstance(doc, str):
            doc = json.loads(doc)
        terms = {}
        for t in doc.get("terms", []):
            p = _frac(t["p"])
            terms[p] = terms.get(p, Fraction(0)) + _frac(t["alpha"])
        return cls(terms, dict(doc.get("finite", {})))


def _num(x: Fraction):
    return int(x) if x.denominator == 1 else float(x)


def classify_continuity(L: SymbolicFunctional, space: ModelSpace) -> str:
    """Continuous iff every power family has exponent below ``q - 1/2``.

    The boundary ``p = q - 1/2`` gives a harmonic dual-norm series and is
    therefore discontinuous.
    """
    return DISCONTINUOUS if L.divergent_terms(space) else CONTINUOUS


def _solve_exact(A, b):
    """Solve ``A x = b`` over the rationals.

    Returns None if inconsistent. Free variables are set to zero, so pivots
    land on the earliest columns that can do the job.
    """
    rows, cols = len(A), (len(A[0]) if A else 0)
    M = [list(A[r]) + [b[r]] for r in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        lead = M[r][c]
        M[r] = [v / lead for v in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [vi - f * vr for vi, vr in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if any(M[i][cols] != 0 for i in range(r, rows)):
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = M[i][cols]
    return x


def classify_continuity_restricted(L: SymbolicFunctional, prior, space: ModelSpace):
    """Decide continuity of ``L`` on the common kernel of ``prior``.

    That holds iff some ``L + sum_j a_j prior_j`` has no divergent power
    family. Returns ``(verdict, a)``; ``a`` is None when no cancellation
    exists. Among several cancellations the one using the earliest priors is
    taken.
    """
    prior = list(prior)
    exps = set(L.divergent_terms(space))
    for P in prior:
        exps |= set(P.divergent_terms(space))
    exps = sorted(exps)
    if not exps:
        return CONTINUOUS, [Fraction(0)] * len(prior)
    A = [[P.terms.get(p, Fraction(0)) for P in prior] for p in exps]
    b = [-L.terms.get(p, Fraction(0)) for p in exps]
    a = _solve_exact(A, b)
    if a is None:
        return DISCONTINUOUS, None
    return CONTINUOUS, a


@dataclass
class TransformStep:
    verdict: str
    coefficients: list | None
    output: SymbolicFunctional


@dataclass
class TransformTrace:
    inputs: list
    outputs: list
    steps: list

    def to_json(self) -> dict:
        return {
            "input": [L.to_json() for L in self.inputs],
            "output": [L.to_json() for L in self.outputs],
            "steps": [
                {
                    "verdict": s.verdict,
                    "a": None if s.coefficients is None else [_num(a) for a in s.coefficients],
                }
                for s in self.steps
            ],
        }


def transform_information(N, space: ModelSpace) -> TransformTrace:
    """Replace ``N`` by continuous information ``N*`` carrying no less knowledge.

    Step k looks at ``L_{k+1}`` on the common kernel of the original
    ``L_1..L_k``. If it is continuous there, it is swapped for the continuous
    extension ``L_{k+1} + sum_j a_j L_j``; otherwise it becomes the zero
    functional.
    """
    N = list(N)
    outputs, steps = [], []
    for k, L in enumerate(N):
        verdict, a = classify_continuity_restricted(L, N[:k], space)
        if verdict == CONTINUOUS:
            out = L
            for aj, Lj in zip(a, N[:k]):
                if aj != 0:
                    out = out + aj * Lj
            steps.append(TransformStep("continuous-on-B_k", a, out))
        else:
            out = SymbolicFunctional()
            steps.append(TransformStep("discontinuous-on-B_k", None, out))
        outputs.append(out)
    return TransformTrace(N, outputs, steps)


def truncate_information(functionals, d: int) -> InformationMap:
    return InformationMap([L.coefficients(d) for L in functionals], d)


@dataclass
class LadderRow:
    d: int
    radius: float
    radius_star: float

    @property
    def gap(self) -> float:
        return self.radius_star - self.radius


def truncated_radius_ladder(N, space: ModelSpace, dims, trace: TransformTrace | None = None):
    """Radii of ``N`` and of its continuous replacement ``N*`` truncated to each ``d``."""
    dims = list(dims)
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise ValueError("dimension ladder must be increasing")
    N = list(N)
    if trace is None:
        trace = transform_information(N, space)
    rows = []
    for d in dims:
        problem = space.problem(d)
        r = radius_nonadaptive(problem, truncate_information(N, d)).radius
        r_star = radius_nonadaptive(problem, truncate_information(trace.outputs, d)).radius
        rows.append(LadderRow(d, r, r_star))
    return rows
