import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lampcs.errors import NotNormalized, ZeroColumn
from lampcs.sensing import (SensingMatrix, coherence, coherence_bruteforce,
                            gen_sensing, normalize_columns, trial_stream)


def test_gaussian_matrix_is_reproducible():
    a = gen_sensing(40, 200, "gaussian", seed=7)
    b = gen_sensing(40, 200, "gaussian", seed=7)
    assert a.shape == (40, 200)
    assert a.matrix.tobytes() == b.matrix.tobytes()
    assert not a.normalized and a.seed == 7
    assert not np.array_equal(a.matrix, gen_sensing(40, 200, "gaussian", seed=8).matrix)


def test_bernoulli_minimal():
    A = gen_sensing(1, 1, "bernoulli", seed=123)
    assert A.matrix[0, 0] in (-1.0, 1.0)


def test_bernoulli_entries_are_signs():
    A = gen_sensing(30, 50, "bernoulli", seed=2).matrix
    assert set(np.unique(A)) == {-1.0, 1.0}
    assert abs(A.mean()) < 3 / np.sqrt(A.size)


def test_gaussian_statistics():
    A = gen_sensing(200, 400, "gaussian", seed=1).matrix
    assert abs(A.mean()) < 3 / np.sqrt(A.size)
    norms = np.linalg.norm(A, axis=0)
    assert abs(norms.mean() - np.sqrt(200)) < 0.05 * np.sqrt(200)
    assert norms.std() < 1.0


def test_generator_argument_and_bad_input():
    a = gen_sensing(5, 6, seed=trial_stream(3, 5, 0))
    b = gen_sensing(5, 6, seed=trial_stream(3, 5, 0))
    np.testing.assert_array_equal(a.matrix, b.matrix)
    with pytest.raises(ValueError):
        gen_sensing(0, 3)
    with pytest.raises(ValueError):
        gen_sensing(3, 3, "uniform")


def test_trial_streams_are_independent_of_trial_count():
    first = [trial_stream(9, 100, t).standard_normal(3) for t in range(3)]
    again = [trial_stream(9, 100, t).standard_normal(3) for t in range(5)]
    for a, b in zip(first, again):
        np.testing.assert_array_equal(a, b)
    assert not np.array_equal(first[0], first[1])


def test_normalize_3_4_5():
    A = normalize_columns(np.array([[3.0], [4.0]]))
    np.testing.assert_allclose(A.matrix[:, 0], [0.6, 0.8])
    assert A.normalized


def test_normalize_idempotent_and_exact():
    A = normalize_columns(gen_sensing(40, 200, seed=0))
    np.testing.assert_allclose(np.linalg.norm(A.matrix, axis=0), 1.0, rtol=0, atol=1e-12)
    B = normalize_columns(A)
    assert np.max(np.abs(B.matrix - A.matrix)) <= 1e-15


def test_normalize_zero_column():
    with pytest.raises(ZeroColumn):
        normalize_columns(np.array([[1.0, 0.0], [2.0, 0.0]]))


def test_coherence_trivial_cases():
    assert coherence(np.eye(4)) == 0.0
    A = np.array([[1.0, 1.0], [0.0, 0.0]])
    assert coherence(A) == 1.0


def test_coherence_requires_normalization():
    with pytest.raises(NotNormalized):
        coherence(gen_sensing(5, 6, seed=0))
    with pytest.raises(NotNormalized):
        coherence(np.array([[2.0, 0.0], [0.0, 1.0]]))


def test_coherence_matches_bruteforce_200x400():
    A = normalize_columns(gen_sensing(200, 400, seed=1))
    mu = coherence(A)
    assert 0 < mu < 1
    assert mu == coherence_bruteforce(A)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12), st.integers(2, 30))
def test_coherence_equals_bruteforce_exactly(seed, M, N):
    A = normalize_columns(gen_sensing(M, N, seed=seed))
    assert coherence(A) == coherence_bruteforce(A)


def test_sensing_matrix_array_protocol():
    A = SensingMatrix(np.eye(2), "custom")
    np.testing.assert_array_equal(np.asarray(A), np.eye(2))
