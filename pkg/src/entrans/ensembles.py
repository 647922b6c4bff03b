"""Random matrix transition ensemble.

A realization is ``U(ε) = (U_A ⊗ U_B)·diag(exp(2πiε ξ_j))`` with independent
CUE members ``U_A``, ``U_B`` and ξ_j uniform on (−1/2, 1/2]. This module also
samples normalized off-diagonal coupling elements in the unperturbed
eigenbasis and provides spacing references.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.optimize
from scipy import special

from .linalg import MAX_PRODUCT_DIM, DimensionError, EigenDecomposition, eig_unitary

TWO_PI = 2.0 * np.pi

#: Subsystem eigenangle spacings below this are treated as degenerate.
DEGENERACY_FLOOR = 1e-10


class DegenerateSpectrumError(ValueError):
    """Raised when an unperturbed basis is not uniquely defined."""


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the work item ``key`` under ``seed``.

    Streams are derived with :class:`numpy.random.SeedSequence`, so the same
    ``(seed, *key)`` always gives the same numbers regardless of scheduling.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


@dataclass(frozen=True)
class TransitionEnsembleParams:
    n_a: int
    n_b: int
    epsilon: float
    seed: int = 0

    def __post_init__(self):
        if self.n_a < 2:
            raise ValueError("n_a must be at least 2")
        if self.n_a > self.n_b:
            raise ValueError("n_a must not exceed n_b")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")

    @property
    def dim(self) -> int:
        return self.n_a * self.n_b


@dataclass(frozen=True)
class EnsembleRealization:
    u_a: np.ndarray
    u_b: np.ndarray
    xi: np.ndarray
    epsilon: float

    @property
    def n_a(self) -> int:
        return self.u_a.shape[0]

    @property
    def n_b(self) -> int:
        return self.u_b.shape[0]

    @property
    def coupling_diagonal(self) -> np.ndarray:
        """Diagonal of ``U_AB(ε)`` in the product basis, index ``i·N_B + j``."""
        return np.exp(2j * np.pi * self.epsilon * self.xi)

    @cached_property
    def u_full(self) -> np.ndarray:
        return np.kron(self.u_a, self.u_b) * self.coupling_diagonal[None, :]


@dataclass(frozen=True)
class MatrixElementSample:
    """Normalized squared off-diagonal elements ``w = |⟨jk|V|j'k'⟩|² / v²``."""

    w_values: np.ndarray
    v_squared: float


def sample_cue(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    if n < 1:
        raise ValueError("n must be positive")
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def sample_xi(size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform variates on (−1/2, 1/2]."""
    return 0.5 - rng.random(size)


def build_transition_operator(
    params: TransitionEnsembleParams,
    rng: np.random.Generator | None = None,
    max_dim: int = MAX_PRODUCT_DIM,
) -> EnsembleRealization:
    """Draw one member of the transition ensemble.

    ``rng`` defaults to a stream derived from ``params.seed``.
    """
    if params.dim > max_dim:
        raise DimensionError(f"product dimension {params.dim} exceeds cap {max_dim}")
    if rng is None:
        rng = stream(params.seed)
    u_a = sample_cue(params.n_a, rng)
    u_b = sample_cue(params.n_b, rng)
    xi = sample_xi(params.dim, rng)
    return EnsembleRealization(u_a, u_b, xi, float(params.epsilon))


def product_eigenangles(theta_a, theta_b) -> np.ndarray:
    """Angles ``θ_j + θ_k mod 2π`` in product order ``j·N_B + k``."""
    s = np.add.outer(np.asarray(theta_a), np.asarray(theta_b)).ravel()
    s = np.mod(s, TWO_PI)
    return np.where(s >= TWO_PI, 0.0, s)


def _check_nondegenerate(angles, floor):
    a = np.sort(np.asarray(angles))
    gaps = np.diff(np.concatenate([a, [a[0] + TWO_PI]]))
    if a.size > 1 and gaps.min() < floor:
        raise DegenerateSpectrumError(
            f"eigenangle spacing {gaps.min():.2e} below floor {floor:.0e}"
        )


def coupling_matrix_elements(
    spec_a: EigenDecomposition,
    spec_b: EigenDecomposition,
    v_diagonal,
    pairs,
    chunk: int = 8192,
) -> np.ndarray:
    """Elements ``⟨jk|V|j'k'⟩`` of a product-basis diagonal ``V``.

    Parameters
    ----------
    spec_a, spec_b : EigenDecomposition
        Subsystem eigenbases.
    v_diagonal : array_like
        Diagonal of V in the product basis, length ``N_A·N_B``.
    pairs : (2, m) int array
        Flat product-eigenbasis indices ``(J, J')`` with ``J = j·N_B + k``.
    """
    pa = spec_a.eigenvectors
    pb = spec_b.eigenvectors
    n_a, n_b = pa.shape[0], pb.shape[0]
    v = np.asarray(v_diagonal).reshape(n_a, n_b)
    J, Jp = np.asarray(pairs)
    out = np.empty(J.shape[0], dtype=complex)
    for start in range(0, J.shape[0], chunk):
        sl = slice(start, start + chunk)
        j, k = np.divmod(J[sl], n_b)
        jp, kp = np.divmod(Jp[sl], n_b)
        a = pa[:, j].conj() * pa[:, jp]
        b = pb[:, k].conj() * pb[:, kp]
        out[sl] = np.einsum("ns,ns->s", v.T @ a, b)
    return out


def sample_pairs(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform ordered pairs of distinct indices in ``range(dim)``."""
    first = rng.integers(0, dim, size=count)
    second = (first + rng.integers(1, dim, size=count)) % dim
    return np.stack([first, second])


def sample_matrix_elements(
    realization: EnsembleRealization,
    count: int,
    rng: np.random.Generator,
    v_diagonal=None,
    floor: float = DEGENERACY_FLOOR,
) -> MatrixElementSample:
    """Sample off-diagonal elements of V in the eigenbasis of ``U_A ⊗ U_B``.

    ``V`` defaults to the random-phase generator ``diag(2π ξ_j)``; any other
    product-basis diagonal (for instance a rotor coupling) may be passed.
    The squared moduli are divided by their sample mean, so ``mean(w) = 1``.
    A ``V`` proportional to the identity has no off-diagonal elements and
    yields all zeros.
    """
    if v_diagonal is None:
        v_diagonal = TWO_PI * realization.xi
    v_diagonal = np.asarray(v_diagonal)
    spec_a = eig_unitary(realization.u_a)
    spec_b = eig_unitary(realization.u_b)
    _check_nondegenerate(spec_a.eigenangles, floor)
    _check_nondegenerate(spec_b.eigenangles, floor)
    pairs = sample_pairs(realization.n_a * realization.n_b, count, rng)
    w = np.abs(coupling_matrix_elements(spec_a, spec_b, v_diagonal, pairs)) ** 2
    v2 = float(w.mean())
    scale = np.max(np.abs(v_diagonal)) ** 2
    if v2 <= 1e-24 * max(scale, 1e-300):
        return MatrixElementSample(np.zeros_like(w), 0.0)
    return MatrixElementSample(w / v2, v2)


def unfolded_spacings(angles) -> np.ndarray:
    """Nearest-neighbor spacings on the circle in units of the mean spacing."""
    a = np.sort(np.asarray(angles, dtype=float))
    gaps = np.diff(np.concatenate([a, [a[0] + TWO_PI]]))
    return gaps * a.size / TWO_PI


def closer_neighbor_spacings(angles) -> np.ndarray:
    """Smaller of the two spacings adjacent to each level (unit mean spacing)."""
    s = unfolded_spacings(angles)
    return np.minimum(s, np.roll(s, 1))


def poisson_reference(s):
    s = np.asarray(s, dtype=float)
    return np.where(s >= 0, np.exp(-np.abs(s)), 0.0)


def poisson_cdf(s):
    s = np.asarray(s, dtype=float)
    return np.where(s > 0, -np.expm1(-np.clip(s, 0, None)), 0.0)


def closer_neighbor_reference(s):
    """Density ``2 exp(−2s)`` of the nearer neighbor in a Poisson spectrum."""
    s = np.asarray(s, dtype=float)
    return np.where(s >= 0, 2.0 * np.exp(-2.0 * np.abs(s)), 0.0)


def closer_neighbor_cdf(s):
    s = np.asarray(s, dtype=float)
    return np.where(s > 0, -np.expm1(-2.0 * np.clip(s, 0, None)), 0.0)


def wigner_unitary_cdf(s):
    """CDF of the unitary-class Wigner surmise ``(32/π²) s² exp(−4s²/π)``."""
    s = np.clip(np.asarray(s, dtype=float), 0, None)
    return special.erf(2 * s / np.sqrt(np.pi)) - 4 * s / np.pi * np.exp(-4 * s**2 / np.pi)


def match_product_labels(vectors, basis) -> np.ndarray:
    """Label eigenvectors by maximal overlap with an orthonormal basis.

    Returns ``labels`` such that column ``i`` of ``vectors`` is connected to
    column ``labels[i]`` of ``basis``. The assignment is a permutation that
    maximizes the total squared overlap.
    """
    overlaps = np.abs(np.asarray(basis).conj().T @ np.asarray(vectors)) ** 2
    rows, cols = scipy.optimize.linear_sum_assignment(-overlaps)
    labels = np.empty(overlaps.shape[1], dtype=int)
    labels[cols] = rows
    return labels
