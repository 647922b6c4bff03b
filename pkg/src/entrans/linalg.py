"""Dense complex linear algebra kernels.

Eigendecomposition of unitary and Hermitian matrices, singular value
decomposition, Kronecker products and the vector/matrix reshaping used for
bipartite states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

TWO_PI = 2.0 * np.pi

#: Maximum ``‖U U† − I‖_max`` accepted as unitary.
UNITARY_ATOL = 1e-10

#: Largest product dimension :func:`kron` will build (100 × 100 rotors).
MAX_PRODUCT_DIM = 10_000


class NotUnitaryError(ValueError):
    """Raised when a matrix fails the unitarity check."""

    def __init__(self, deviation: float, atol: float):
        self.deviation = deviation
        self.atol = atol
        super().__init__(
            f"matrix is not unitary: max |U U^dagger - I| = {deviation:.3e} "
            f"exceeds {atol:.1e}"
        )


class DimensionError(ValueError):
    """Raised when a product space exceeds the configured cap."""


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues and orthonormal eigenvectors (as columns).

    For unitary input ``eigenangles`` holds θ in [0, 2π), sorted ascending.
    For Hermitian input it holds the real eigenvalues, sorted ascending.
    """

    eigenangles: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self) -> int:
        return self.eigenangles.shape[0]


def _as_square(a, name="matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def unitarity_deviation(u) -> float:
    """Return ``max |U U† − I|``."""
    u = _as_square(u)
    return float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))


def check_unitary(u, atol: float = UNITARY_ATOL) -> float:
    """Raise :class:`NotUnitaryError` if ``u`` is not unitary; return the deviation."""
    dev = unitarity_deviation(u)
    if not dev <= atol:
        raise NotUnitaryError(dev, atol)
    return dev


def wrap_angle(x):
    """Reduce angles to the interval (−π, π]."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, TWO_PI) - np.pi
    # mod maps the upper endpoint to -pi; move it back to +pi
    return np.where(y <= -np.pi, y + TWO_PI, y)


def to_unit_circle_angle(x):
    """Reduce angles to [0, 2π)."""
    y = np.mod(np.asarray(x, dtype=float), TWO_PI)
    return np.where(y >= TWO_PI, 0.0, y)


def eig_unitary(u, atol: float = UNITARY_ATOL, check: bool = True) -> EigenDecomposition:
    """Full spectral decomposition of a unitary matrix.

    The complex Schur form of a normal matrix is diagonal up to round-off, so
    the Schur vectors are an orthonormal eigenbasis even inside nearly
    degenerate clusters.

    Parameters
    ----------
    u : array_like
        Square unitary matrix.
    atol : float
        Unitarity tolerance on ``max |U U† − I|``.
    check : bool
        Skip the O(n³) unitarity check when False.

    Returns
    -------
    EigenDecomposition
        Eigenangles in [0, 2π) sorted ascending, eigenvectors as columns.
    """
    u = _as_square(u)
    if check:
        check_unitary(u, atol)
    t, z = scipy.linalg.schur(u, output="complex")
    angles = to_unit_circle_angle(np.angle(np.diag(t)))
    order = np.argsort(angles, kind="stable")
    return EigenDecomposition(angles[order], z[:, order])


def eig_hermitian(h) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix (ascending eigenvalues)."""
    h = _as_square(h)
    w, v = np.linalg.eigh(h)
    return EigenDecomposition(w, v)


def svd(a):
    """Thin singular value decomposition ``A = U Σ V†``.

    Returns
    -------
    u : ndarray
    s : ndarray
        Singular values, descending.
    v : ndarray
        Right singular vectors as columns (not conjugate-transposed).
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError("svd expects a 2-D array")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return u, s, vh.conj().T


def kron(a, b, max_dim: int = MAX_PRODUCT_DIM) -> np.ndarray:
    """Kronecker product with a cap on the product dimension."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("kron expects 2-D arrays")
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if max(rows, cols) > max_dim:
        raise DimensionError(
            f"product dimension {max(rows, cols)} exceeds cap {max_dim}"
        )
    return np.kron(a, b)


def reshape_state(psi, n_a: int, n_b: int) -> np.ndarray:
    """Coefficient matrix ``C[i, j]`` of the vector entry ``i·N_B + j``."""
    psi = np.asarray(psi)
    if psi.ndim != 1 or psi.shape[0] != n_a * n_b:
        raise ValueError(
            f"state of length {psi.shape} does not factor as {n_a} x {n_b}"
        )
    return psi.reshape(n_a, n_b)


def unreshape_state(c) -> np.ndarray:
    """Inverse of :func:`reshape_state`."""
    c = np.asarray(c)
    if c.ndim != 2:
        raise ValueError("coefficient matrix must be 2-D")
    return c.reshape(-1)
