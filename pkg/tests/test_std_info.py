import math

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from discinfo.randomized import child_rng
from discinfo.std_info import (
    GridModel,
    constraint_residual,
    mc_integration,
    mc_rmse,
    project_to_constraint,
    std_vs_all,
    two_point_exact,
)


def test_identity_model():
    model = GridModel(np.linspace(0, 1, 3), np.eye(3), np.diag([3.0, 2.0, 1.0]))
    rows = [std_vs_all(model, n) for n in range(4)]
    assert [r.e_all for r in rows] == [3, 2, 1, 0]
    # coordinate functionals are point evaluations here, so nothing is lost
    assert [r.e_std for r in rows] == pytest.approx([3, 2, 1, 0])
    assert rows[1].best_points == (0,)


def test_point_values_can_be_worse():
    # S reads the difference of two values; no single point evaluation helps
    model = GridModel([0.0, 1.0], np.eye(2), [[1.0, -1.0]])
    r = std_vs_all(model, 1)
    assert r.e_all == pytest.approx(0.0, abs=1e-12)
    assert r.e_std == pytest.approx(1.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_against_generalized_eigenproblem(seed, m):
    model = GridModel.random(m, np.random.default_rng(seed))
    lam = scipy.linalg.eigh(model.S.T @ model.S, model.gram, eigvals_only=True)[::-1]
    sigma = np.sqrt(np.maximum(lam, 0))
    prev = math.inf
    for n in range(m + 1):
        r = std_vs_all(model, n)
        expected = sigma[n] if n < m else 0.0
        assert r.e_all == pytest.approx(expected, rel=1e-9, abs=1e-12)
        assert r.e_std >= r.e_all - 1e-9 * sigma[0]
        assert r.e_std <= prev + 1e-12
        prev = r.e_std
    assert prev == pytest.approx(0, abs=1e-9 * sigma[0])


def test_model_validation():
    with pytest.raises(ValueError):
        GridModel([0, 1], [[1, 0.5], [0, 1]], np.eye(2))
    with pytest.raises(np.linalg.LinAlgError):
        GridModel([0, 1], [[1, 2], [2, 1]], np.eye(2))
    with pytest.raises(ValueError):
        std_vs_all(GridModel.random(13, np.random.default_rng(0)), 2)


def test_model_json_round_trip():
    model = GridModel.random(4, np.random.default_rng(2))
    again = GridModel.from_json(model.to_json())
    np.testing.assert_array_equal(again.gram, model.gram)


class TestMonteCarlo:
    def test_constants_exact(self):
        est = mc_integration(lambda x: np.full_like(x, 0.7), 50, np.random.default_rng(0))
        assert est.value == 0.7
        assert est.standard_error == 0.0

    def test_linear_within_four_se(self):
        for r in range(100):
            est = mc_integration(lambda x: x, 10_000, child_rng(5, r))
            assert abs(est.value - 0.5) <= 4 * est.standard_error

    def test_rmse_rate(self):
        f = lambda x: x**2  # noqa: E731
        r1 = mc_rmse(f, 1 / 3, 100, 400, 1)
        r4 = mc_rmse(f, 1 / 3, 400, 400, 1)
        assert r1 / r4 == pytest.approx(2, rel=0.25)
        sd = math.sqrt(1 / 5 - 1 / 9)
        assert r1 == pytest.approx(sd / 10, rel=0.2)


class TestTwoPoint:
    def test_linear(self):
        assert two_point_exact([1.0, 2.0]) == 2.0

    def test_projected_square(self):
        c = project_to_constraint([0.0, 0.0, 1.0])
        assert abs(constraint_residual(c)) < 1e-14
        exact, _ = scipy.integrate.quad(lambda t: np.polyval(c[::-1], t), 0, 1)
        assert two_point_exact(c) == pytest.approx(exact, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=6))
    def test_projection(self, coeffs):
        c = project_to_constraint(coeffs)
        assert abs(constraint_residual(c)) <= 1e-10 * max(1, np.abs(c).max())
        np.testing.assert_allclose(project_to_constraint(c), c, atol=1e-9)

    def test_violation(self):
        with pytest.raises(ValueError):
            two_point_exact([0.0, 0.0, 1.0])
