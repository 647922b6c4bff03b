import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entrans import linalg as la
from entrans.ensembles import sample_cue


def test_identity_eigendecomposition():
    d = la.eig_unitary(np.eye(5))
    assert np.all(d.eigenangles == 0)
    assert np.allclose(np.abs(d.eigenvectors), np.eye(5))


def test_diagonal_angles():
    d = la.eig_unitary(np.diag([np.exp(0.5j * np.pi), np.exp(1j * np.pi)]))
    assert np.allclose(d.eigenangles, [np.pi / 2, np.pi])


def test_angles_in_branch():
    u = np.diag(np.exp(1j * np.array([-1e-17, -0.3, 0.0, 3.0])))
    a = la.eig_unitary(u).eigenangles
    assert np.all((a >= 0) & (a < 2 * np.pi))


def test_cue_reconstruction_and_residuals():
    rng = np.random.default_rng(3)
    u = sample_cue(8, rng)
    d = la.eig_unitary(u)
    v = d.eigenvectors
    rec = v @ np.diag(np.exp(1j * d.eigenangles)) @ v.conj().T
    assert np.abs(rec - u).max() <= 1e-8
    assert np.abs(v.conj().T @ v - np.eye(8)).max() <= 1e-8
    res = np.linalg.norm(u @ v - v * np.exp(1j * d.eigenangles), axis=0)
    assert res.max() <= 1e-8
    assert np.allclose(np.linalg.norm(v, axis=0), 1, atol=1e-10)


def test_degenerate_cluster_orthonormal():
    rng = np.random.default_rng(4)
    w = sample_cue(6, rng)
    phases = np.exp(1j * np.array([0.1, 0.1, 0.1 + 1e-13, 2.0, 2.0, 4.0]))
    u = w @ np.diag(phases) @ w.conj().T
    v = la.eig_unitary(u).eigenvectors
    assert np.abs(v.conj().T @ v - np.eye(6)).max() <= 1e-8


def test_eig_errors():
    with pytest.raises(ValueError):
        la.eig_unitary(np.ones((2, 3)))
    with pytest.raises(la.NotUnitaryError) as exc:
        la.eig_unitary(np.array([[1.0, 0.0], [0.0, 1.1]]))
    assert exc.value.deviation == pytest.approx(0.21)


def test_hermitian():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    h = a + a.conj().T
    d = la.eig_hermitian(h)
    assert np.allclose(h @ d.eigenvectors, d.eigenvectors * d.eigenangles)


def test_svd_examples():
    _, s, _ = la.svd(np.diag([3.0, 1.0]))
    assert np.allclose(s, [3, 1])
    _, s, _ = la.svd(np.zeros((3, 2)))
    assert np.all(s == 0)


def test_svd_reconstruction():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((4, 7)) + 1j * rng.standard_normal((4, 7))
    u, s, v = la.svd(a)
    assert np.all(np.diff(s) <= 0)
    assert np.linalg.norm(a - u @ np.diag(s) @ v.conj().T) <= 1e-10 * np.linalg.norm(a)


def test_svd_of_unitary():
    u = sample_cue(6, np.random.default_rng(2))
    assert np.allclose(la.svd(u)[1], 1, atol=1e-10)


def test_kron():
    assert np.array_equal(la.kron(np.eye(2), np.eye(3)), np.eye(6))
    x = np.array([[0, 1], [1, 0]])
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert la.unitarity_deviation(la.kron(x, h)) <= 1e-12
    rng = np.random.default_rng(5)
    a, b, c, d = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(4))
    assert np.abs(la.kron(a, b) @ la.kron(c, d) - la.kron(a @ c, b @ d)).max() <= 1e-10
    assert la.kron(np.ones((2, 3)), np.ones((4, 5))).shape == (8, 15)
    with pytest.raises(la.DimensionError):
        la.kron(np.eye(200), np.eye(200), max_dim=10_000)


def test_reshape_examples():
    assert np.array_equal(la.reshape_state(np.array([1, 0, 0, 0]), 2, 2), [[1, 0], [0, 0]])
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(la.reshape_state(bell, 2, 2), np.eye(2) / np.sqrt(2))
    # index i*N_B + j goes to entry (i, j)
    c = la.reshape_state(np.arange(6), 2, 3)
    assert c[1, 2] == 5 and c[0, 1] == 1
    with pytest.raises(ValueError):
        la.reshape_state(np.zeros(5), 2, 3)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_reshape_round_trip_and_linearity(n_a, n_b, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n_a * n_b) + 1j * rng.standard_normal(n_a * n_b)
    y = rng.standard_normal(n_a * n_b) + 1j * rng.standard_normal(n_a * n_b)
    assert np.array_equal(la.unreshape_state(la.reshape_state(x, n_a, n_b)), x)
    a, b = 0.3 - 1.2j, 2.0
    lhs = la.reshape_state(a * x + b * y, n_a, n_b)
    rhs = a * la.reshape_state(x, n_a, n_b) + b * la.reshape_state(y, n_a, n_b)
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=20))
def test_wrap_angle_range(xs):
    w = la.wrap_angle(np.array(xs))
    assert np.all((w > -np.pi) & (w <= np.pi))
    assert np.allclose(np.exp(1j * w), np.exp(1j * np.array(xs)))
    assert la.wrap_angle(np.pi) == np.pi and la.wrap_angle(-np.pi) == np.pi
