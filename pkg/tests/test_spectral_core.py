import json

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from discinfo.spectral_core import (
    LinearProblem,
    SpectrumError,
    apply_optimal_algorithm,
    brute_force_worst_error,
    load_definition,
    make_spectrum,
    worst_case_error,
)


def random_problem(rng, m_out, m_in):
    return LinearProblem(rng.standard_normal((m_out, m_in)), rng.uniform(0.5, 2.0, m_in))


def test_power_law_spectrum():
    s = make_spectrum("power-law", {"p": 1}, 4)
    np.testing.assert_allclose(s.values, [1, 1 / 2, 1 / 3, 1 / 4])


def test_explicit_spectrum():
    np.testing.assert_array_equal(make_spectrum("explicit", (2, 2, 1), 3).values, [2, 2, 1])


@pytest.mark.parametrize(
    "kind, params, m",
    [("explicit", (1, 2), 2), ("power-law", {"p": 0}, 3), ("power-law", {"p": -1}, 3), ("power-law", {"p": 1}, 0)],
)
def test_invalid_spectra(kind, params, m):
    with pytest.raises(SpectrumError):
        make_spectrum(kind, params, m)


@given(st.floats(0.05, 4), st.integers(2, 40))
def test_power_law_strictly_decreasing(p, m):
    assert np.all(np.diff(make_spectrum("power-law", p, m).values) < 0)


def test_worst_case_error_examples():
    s = make_spectrum("power-law", 1, 8)
    assert worst_case_error(s, 2) == pytest.approx(1 / 3)
    assert worst_case_error(s, 0) == s.values[0]
    assert worst_case_error(make_spectrum("explicit", (2, 2, 1)), 3) == 0.0


@given(st.lists(st.floats(0, 10), min_size=1, max_size=20))
def test_worst_case_error_nonincreasing(values):
    s = make_spectrum("explicit", sorted(values, reverse=True))
    errs = [worst_case_error(s, n) for n in range(len(values) + 3)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))


class TestOptimalAlgorithm:
    S = LinearProblem.diagonal([3, 2, 1])

    def test_full_rank_is_exact(self):
        f = np.array([0.3, -1.2, 0.7])
        np.testing.assert_array_equal(apply_optimal_algorithm(self.S, 3, f), self.S.matrix @ f)

    def test_truncation_kills_lower_modes(self):
        np.testing.assert_allclose(apply_optimal_algorithm(self.S, 1, [0, 1, 0]), 0, atol=1e-15)

    def test_rank_two_against_truncated_matrix(self):
        f = np.ones(3) / np.sqrt(3)
        expected = np.diag([3.0, 2.0, 0.0]) @ f
        np.testing.assert_allclose(apply_optimal_algorithm(self.S, 2, f), expected, atol=1e-14)
        np.testing.assert_allclose(expected, [3 / np.sqrt(3), 2 / np.sqrt(3), 0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_optimal_algorithm(self.S, 1, [1.0, 2.0])

    def test_weighted_against_generalized_eigenproblem(self):
        # oracle: e_i from S^T S e = lambda W^2 e, independent of the SVD path
        rng = np.random.default_rng(3)
        P = random_problem(rng, 6, 5)
        W2 = np.diag(P.weights**2)
        lam, E = scipy.linalg.eigh(P.matrix.T @ P.matrix, W2)
        E = E[:, ::-1]
        f = rng.standard_normal(5)
        for n in range(6):
            expected = sum(P.matrix @ E[:, i] * (E[:, i] @ W2 @ f) for i in range(n)) if n else np.zeros(6)
            np.testing.assert_allclose(apply_optimal_algorithm(P, n, f), expected, atol=1e-12)
        np.testing.assert_allclose(P.spectrum.values, np.sqrt(np.maximum(lam[::-1], 0)), rtol=1e-10)


class TestBruteForce:
    def test_diag(self):
        P = LinearProblem.diagonal([3, 2, 1])
        v = brute_force_worst_error(P, 1, np.random.default_rng(0), 10_000)
        assert 2 * (1 - 1e-9) <= v <= 2

    def test_exhausted(self):
        P = LinearProblem.diagonal([3, 2, 1])
        assert brute_force_worst_error(P, 3, np.random.default_rng(0), 10) == 0.0

    def test_one_dimensional(self):
        v = brute_force_worst_error(LinearProblem.diagonal([1.0]), 0, np.random.default_rng(0), 5)
        assert v == pytest.approx(1.0, abs=1e-8)
        assert v < 1.0

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 7))
    def test_between_witness_and_sigma(self, seed, m):
        rng = np.random.default_rng(seed)
        P = random_problem(rng, m, m)
        for n in range(m):
            sigma = worst_case_error(P.spectrum, n)
            v = brute_force_worst_error(P, n, rng, 200)
            assert (1 - 1e-6) * sigma <= v <= sigma


def test_svd_reconstruction_and_orthonormality():
    rng = np.random.default_rng(11)
    for _ in range(10):
        P = random_problem(rng, 8, 8)
        sigma = P.spectrum.values
        W2 = np.diag(P.weights**2)
        recon = P.left @ np.diag(sigma) @ P.right.T @ W2
        assert np.linalg.norm(P.matrix - recon, 2) <= 1e-10 * sigma[0]
        np.testing.assert_allclose(P.right.T @ W2 @ P.right, np.eye(8), atol=1e-10)
        np.testing.assert_allclose(P.left.T @ P.left, np.eye(8), atol=1e-10)
        np.testing.assert_allclose(P.matrix @ P.right, P.left * sigma, atol=1e-10 * sigma[0])


def test_from_spectrum_keeps_singular_values():
    s = make_spectrum("power-law", 1.5, 6)
    P = LinearProblem.from_spectrum(s, np.random.default_rng(1), weights=np.arange(1, 7))
    np.testing.assert_allclose(P.spectrum.values, s.values, rtol=1e-12)


def test_wide_matrix_pads_spectrum_with_zeros():
    P = LinearProblem(np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]]))
    np.testing.assert_allclose(P.spectrum.values, [2, 1, 0])
    assert worst_case_error(P.spectrum, 2) == 0.0


def test_load_definitions(tmp_path):
    s = load_definition({"kind": "power-law", "p": 2, "m": 3})
    np.testing.assert_allclose(s.values, [1, 1 / 4, 1 / 9])
    assert load_definition('{"kind": "explicit", "values": [3, 1]}').values.tolist() == [3, 1]
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"kind": "matrix", "matrix": [[2, 0], [0, 1]], "weights": [1, 2]}))
    P = load_definition(path)
    np.testing.assert_allclose(P.spectrum.values, [2, 0.5])
    with pytest.raises(SpectrumError):
        load_definition({"kind": "bogus"})
