import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discinfo.randomized import (
    SphereSampler,
    avg_case_error_closed_form,
    avg_case_error_mc,
    bakhvalov_avg_bound,
    bakhvalov_lower_bound,
    child_rng,
    sandwich_report,
)
from discinfo.spectral_core import LinearProblem, make_spectrum, worst_case_error

ONES = make_spectrum("explicit", np.ones(8))


def test_closed_form_flat_spectrum():
    assert avg_case_error_closed_form(ONES, 2, 4) == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
    assert avg_case_error_closed_form(ONES, 0, 8) == 1.0
    assert avg_case_error_closed_form(ONES, 8, 8) == 0.0


def test_closed_form_power_law():
    s = make_spectrum("power-law", 1, 4)
    assert avg_case_error_closed_form(s, 1, 4) == pytest.approx(math.sqrt((1 / 4 + 1 / 9 + 1 / 16) / 4))


@pytest.mark.parametrize("n, m", [(5, 4), (-1, 4), (0, 9)])
def test_closed_form_errors(n, m):
    with pytest.raises(ValueError):
        avg_case_error_closed_form(ONES, n, m)


def test_mc_identity_within_four_se():
    P = LinearProblem.diagonal(np.ones(4))
    est = avg_case_error_mc(P, 2, SphereSampler(4, 3), 100_000)
    assert abs(est.value - math.sqrt(0.5)) <= 4 * est.standard_error
    assert est.standard_error < 1e-3


def test_mc_exhausted_and_empty():
    P = LinearProblem.diagonal([3, 2, 1])
    assert avg_case_error_mc(P, 3, SphereSampler(3, 0), 50).value == pytest.approx(0, abs=1e-14)
    est = avg_case_error_mc(P, 0, SphereSampler(3, 0), 50_000)
    assert abs(est.value - math.sqrt(14 / 3)) <= 4 * est.standard_error


def test_mc_needs_samples():
    with pytest.raises(ValueError):
        avg_case_error_mc(LinearProblem.diagonal([1, 1]), 0, SphereSampler(2, 0), 5)


def test_sphere_coordinate_moments():
    x = SphereSampler(6, 1).sample(100_000)
    np.testing.assert_allclose(np.linalg.norm(x, axis=1), 1, rtol=1e-12)
    sq = x[:, 0] ** 2
    se = sq.std(ddof=1) / math.sqrt(sq.size)
    assert abs(sq.mean() - 1 / 6) <= 4 * se


def test_sampler_is_deterministic():
    a = SphereSampler(5, [7, 2]).sample(10)
    b = SphereSampler(5, [7, 2]).sample(10)
    np.testing.assert_array_equal(a, b)
    s = SphereSampler(5, 7)
    s.sample(3)
    assert s.position == 3


def test_child_streams_differ_and_repeat():
    a = child_rng(1, 2).standard_normal(4)
    np.testing.assert_array_equal(a, child_rng(1, 2).standard_normal(4))
    assert not np.array_equal(a, child_rng(1, 3).standard_normal(4))


class TestBounds:
    def test_power_law(self):
        rep = sandwich_report(make_spectrum("power-law", 1, 16), 1)
        assert (rep.lower, rep.upper) == (pytest.approx(1 / 8), pytest.approx(1 / 2))

    def test_flat(self):
        rep = sandwich_report(ONES, 2)
        assert (rep.lower, rep.upper) == (0.5, 1.0)

    def test_geometric(self):
        s = make_spectrum("explicit", 2.0 ** -np.arange(1, 9))
        rep = sandwich_report(s, 1)
        assert rep.lower == 2.0**-5 and rep.upper == 2.0**-2

    def test_too_short(self):
        with pytest.raises(ValueError):
            bakhvalov_lower_bound(make_spectrum("power-law", 1, 7), 2)
        with pytest.raises(ValueError):
            bakhvalov_lower_bound(ONES, 0)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(0, 5), min_size=4, max_size=40), st.integers(1, 10))
    def test_ordering(self, values, n):
        s = make_spectrum("explicit", sorted(values, reverse=True))
        if len(s) < 4 * n:
            return
        lo = bakhvalov_lower_bound(s, n)
        mid = bakhvalov_avg_bound(s, n)
        assert lo <= mid * (1 + 1e-12) + 1e-300
        assert mid <= worst_case_error(s, n) * (1 + 1e-12) + 1e-300
