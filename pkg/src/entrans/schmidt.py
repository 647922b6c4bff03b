"""Entanglement of bipartite pure states.

Schmidt spectra, moments ``μ_α = Σ λ_j^α``, HCT entropies
``S_α = (1 − μ_α)/(α − 1)``, Rényi entropies, and the distance to the closest
maximally entangled state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .linalg import reshape_state, unreshape_state

#: Schmidt eigenvalues below this are set to zero before entropies are taken.
CLAMP = 1e-14

NORM_ATOL = 1e-10


class SchmidtAmbiguityWarning(UserWarning):
    """The closest maximally entangled state is not unique."""


@dataclass(frozen=True)
class BipartiteState:
    amplitudes: np.ndarray
    n_a: int
    n_b: int

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.shape[0] != self.n_a * self.n_b:
            raise ValueError(
                f"amplitudes of length {amp.shape} do not factor as {self.n_a} x {self.n_b}"
            )
        norm = np.linalg.norm(amp)
        if abs(norm - 1) > NORM_ATOL:
            raise ValueError(f"state is not normalized (norm = {norm!r})")
        object.__setattr__(self, "amplitudes", amp)

    def coefficients(self) -> np.ndarray:
        return reshape_state(self.amplitudes, self.n_a, self.n_b)


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Descending Schmidt eigenvalues, optionally with Schmidt vectors.

    ``left[:, j]`` and ``right[:, j]`` are the subsystem vectors paired with
    ``lambdas[j]``, so that ``ψ = Σ_j √λ_j left_j ⊗ right_j``.
    """

    lambdas: np.ndarray
    left: np.ndarray | None = None
    right: np.ndarray | None = None

    def __len__(self) -> int:
        return self.lambdas.shape[0]


@dataclass(frozen=True)
class EntanglementSummary:
    moments: dict = field(default_factory=dict)
    entropies: dict = field(default_factory=dict)
    renyi: dict = field(default_factory=dict)
    d_star_sq: float = math.nan


def _fix_phases(u, vh):
    """Make the first nonzero entry of each left vector real positive."""
    u = u.copy()
    vh = vh.copy()
    for j in range(u.shape[1]):
        col = u[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            ph = col[nz[0]] / abs(col[nz[0]])
            u[:, j] = col / ph
            vh[j, :] = vh[j, :] * ph
    return u, vh


def schmidt_spectrum(psi: BipartiteState, vectors: bool = False) -> SchmidtSpectrum:
    """Schmidt decomposition of a bipartite state.

    The eigenvalues are the squared singular values of the coefficient
    matrix. With ``vectors=True`` the Schmidt vectors are returned with the
    first nonzero component of each left vector made real and positive.
    """
    c = psi.coefficients()
    if not vectors:
        s = np.linalg.svd(c, compute_uv=False)
        return SchmidtSpectrum(s**2)
    u, s, vh = np.linalg.svd(c, full_matrices=False)
    u, vh = _fix_phases(u, vh)
    return SchmidtSpectrum(s**2, u, vh.T)


def schmidt_spectra(vectors, n_a: int, n_b: int) -> np.ndarray:
    """Schmidt eigenvalues of many states at once.

    Parameters
    ----------
    vectors : (N_A·N_B, M) array
        States as columns (for example all eigenvectors of an operator).

    Returns
    -------
    (M, min(N_A, N_B)) array of descending eigenvalues.
    """
    v = np.asarray(vectors)
    if v.ndim != 2 or v.shape[0] != n_a * n_b:
        raise ValueError(f"columns of length {v.shape[0]} do not factor as {n_a} x {n_b}")
    c = np.ascontiguousarray(v.T).reshape(v.shape[1], n_a, n_b)
    return np.linalg.svd(c, compute_uv=False) ** 2


def _lambdas(spec) -> np.ndarray:
    if isinstance(spec, SchmidtSpectrum):
        return spec.lambdas
    return np.asarray(spec, dtype=float)


def power_moment(lambdas, alpha: float):
    """``μ_α = Σ λ_j^α`` along the last axis; works on batches of spectra."""
    lam = np.clip(np.asarray(lambdas, dtype=float), 0.0, None)
    if alpha == 0:
        return np.full(lam.shape[:-1], float(lam.shape[-1]))
    if alpha < 0:
        raise ValueError("moments require alpha > 0")
    if alpha == 1:
        return lam.sum(axis=-1)
    if alpha == 2:
        return np.einsum("...i,...i->...", lam, lam)
    return (lam**alpha).sum(axis=-1)


def von_neumann(lambdas):
    """``−Σ λ ln λ`` with eigenvalues below the clamp treated as zero."""
    lam = np.asarray(lambdas, dtype=float)
    lam = np.where(lam < CLAMP, 0.0, lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def hct_entropy(lambdas, alpha: float):
    """HCT entropy, with the von Neumann entropy at ``α = 1``."""
    if alpha <= 0:
        raise ValueError("entropies require alpha > 0")
    if alpha == 1:
        return von_neumann(lambdas)
    lam = np.asarray(lambdas, dtype=float)
    lam = np.where(lam < CLAMP, 0.0, lam)
    return (1 - power_moment(lam, alpha)) / (alpha - 1)


def renyi_entropy(lambdas, alpha: float):
    """Rényi entropy ``ln μ_α/(1 − α)``, von Neumann at ``α = 1``."""
    if alpha <= 0:
        raise ValueError("entropies require alpha > 0")
    if alpha == 1:
        return von_neumann(lambdas)
    lam = np.asarray(lambdas, dtype=float)
    lam = np.where(lam < CLAMP, 0.0, lam)
    return np.log(power_moment(lam, alpha)) / (1 - alpha)


def d_star_squared(lambdas):
    """Squared distance ``2(1 − N_A^{−1/2} Σ √λ_j)`` to the closest maximally entangled state."""
    lam = np.clip(np.asarray(lambdas, dtype=float), 0.0, None)
    n = lam.shape[-1]
    return 2 * (1 - np.sqrt(lam).sum(axis=-1) / math.sqrt(n))


def moments(spec, alphas) -> dict:
    """Map ``α → μ_α``; ``α = 0`` gives the count of Schmidt eigenvalues."""
    lam = _lambdas(spec)
    out = {}
    for a in alphas:
        if a < 0:
            raise ValueError("moments require alpha >= 0")
        out[a] = float(power_moment(lam, a))
    return out


def entropies(spec, alphas) -> dict:
    """Map ``α → S_α`` (HCT, von Neumann at α = 1)."""
    lam = _lambdas(spec)
    return {a: float(hct_entropy(lam, a)) for a in alphas}


def renyi_entropies(spec, alphas) -> dict:
    lam = _lambdas(spec)
    return {a: float(renyi_entropy(lam, a)) for a in alphas}


def summarize(spec, alphas) -> EntanglementSummary:
    lam = _lambdas(spec)
    return EntanglementSummary(
        moments=moments(lam, alphas),
        entropies=entropies(lam, alphas),
        renyi=renyi_entropies(lam, alphas),
        d_star_sq=float(d_star_squared(lam)),
    )


def closest_maximally_entangled(psi: BipartiteState):
    """Closest maximally entangled state and the squared distance to it.

    The state is ``N_A^{−1/2} Σ_k |φ_k^A⟩|φ_k^B⟩`` built from the Schmidt
    vectors (``N_A ≤ N_B`` is the smaller factor). It is unique when the
    coefficient matrix has full rank; otherwise a
    :class:`SchmidtAmbiguityWarning` is issued and the SVD basis is used.

    Returns
    -------
    state : BipartiteState
    d_star_sq : float
    """
    c = psi.coefficients()
    transpose = psi.n_a > psi.n_b
    if transpose:
        c = c.T
    u, s, vh = np.linalg.svd(c, full_matrices=False)
    u, vh = _fix_phases(u, vh)
    lam = s**2
    if np.any(lam <= 1e-12):
        warnings.warn(
            "coefficient matrix is rank deficient; the closest maximally "
            "entangled state is not unique",
            SchmidtAmbiguityWarning,
            stacklevel=2,
        )
    m = (u @ vh) / math.sqrt(u.shape[1])
    if transpose:
        m = m.T
    state = BipartiteState(unreshape_state(m), psi.n_a, psi.n_b)
    return state, float(d_star_squared(lam))


def random_state(n_a: int, n_b: int, rng: np.random.Generator) -> BipartiteState:
    """Haar-random pure state on ``C^{N_A} ⊗ C^{N_B}``."""
    z = rng.standard_normal(n_a * n_b) + 1j * rng.standard_normal(n_a * n_b)
    return BipartiteState(z / np.linalg.norm(z), n_a, n_b)


def d_star_sq_haar(q: float) -> float:
    """Large-N_A mean of d*² for Haar states at dimension ratio ``Q = N_B/N_A``.

    Closed form in complete elliptic integrals of modulus
    ``κ = 2/(Q^{1/4} + Q^{−1/4})``; the K term vanishes at ``Q = 1``.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    r = q**0.25
    kappa = min(2 / (r + 1 / r), 1.0)
    bracket = (q + 1) * specfun.elliptic_E(kappa)
    if q != 1:
        bracket -= (math.sqrt(q) - 1) ** 2 * specfun.elliptic_K(kappa)
    return 2 - 4 / (3 * math.pi) * (1 + 1 / math.sqrt(q)) * bracket


def haar_reference(q: float, n_a: int) -> dict:
    """Haar-random state averages at ratio ``Q = N_B/N_A``.

    Keys: ``s1`` (ln N_A − 1/(2Q)), ``s2_asymptotic`` (1 − (Q+1)/(N_A Q)),
    ``s2_exact`` (1 − (N_A+N_B)/(1+N_A N_B) with N_B = Q N_A),
    ``d_star_sq`` (large-N_A elliptic form), ``d_star_sq_tail`` (1/(4Q)),
    ``d_star_sq_product`` (2(1 − 1/√N_A)) and ``ratio``
    (√(d̄*²)/d*^product).
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    n_b = q * n_a
    d2 = d_star_sq_haar(q)
    dprod = 2 * (1 - 1 / math.sqrt(n_a))
    return {
        "s1": math.log(n_a) - 1 / (2 * q),
        "s2_asymptotic": 1 - (q + 1) / (n_a * q),
        "s2_exact": 1 - (n_a + n_b) / (1 + n_a * n_b),
        "d_star_sq": d2,
        "d_star_sq_tail": 1 / (4 * q),
        "d_star_sq_product": dprod,
        "ratio": math.sqrt(d2 / dprod),
    }
