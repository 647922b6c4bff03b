"""Coupled quantum kicked rotors on the torus.

Single-rotor propagator in the position basis::

    U(n', n) = (1/N) exp(−i N K/(2π) cos(2π(n+θ_p)/N))
               · Σ_m exp(−πi (m+θ_q)²/N) exp(2πi (m+θ_q)(n−n')/N)

and the coupled Floquet operator ``(U_A ⊗ U_B)·diag(c)`` with coupling phases
``c(n₁, n₂) = exp(−i N b/(2π) cos(2π(n₁+n₂+2θ_p)/N))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize, special

from .linalg import MAX_PRODUCT_DIM, DimensionError

TWO_PI = 2.0 * np.pi

#: Default rotor dimension at desk scale; 100 is the "large" setting.
DEFAULT_N = 50
LARGE_N = 100

#: ``N b`` at or below this counts as the small-coupling regime.
SMALL_COUPLING_NB = 0.1

#: First zero of J₀; Λ_KR is monotone in b for ``N b/(2π)`` below it.
J0_FIRST_ZERO = float(special.jn_zeros(0, 1)[0])


@dataclass(frozen=True)
class KickedRotorParams:
    n: int = DEFAULT_N
    k_a: float = 10.0
    k_b: float = 9.0
    b: float = 0.0
    theta_q: float = 0.34
    theta_p: float = 0.24

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        for name in ("theta_q", "theta_p"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise ValueError(f"{name} must lie in [0, 1)")
        if not self.b >= 0:
            raise ValueError("b must be nonnegative")

    def with_b(self, b: float) -> "KickedRotorParams":
        return replace(self, b=float(b))


@dataclass(frozen=True)
class FloquetOperator:
    matrix: np.ndarray
    params: KickedRotorParams


@dataclass(frozen=True)
class RotorLambda:
    """Λ_KR in closed form with its small-b approximation."""

    exact: float
    small_b: float
    small_coupling: bool


def kick_phases(n: int, k: float, theta_p: float) -> np.ndarray:
    idx = np.arange(n)
    return np.exp(-1j * n * k / TWO_PI * np.cos(TWO_PI * (idx + theta_p) / n))


def kinetic_kernel(n: int, theta_q: float) -> np.ndarray:
    """Kinetic factor ``f(d)`` for ``d = n − n' ∈ {0, …, N−1}`` (mod N)."""
    m = np.arange(n)
    g = np.exp(-1j * np.pi * (m + theta_q) ** 2 / n)
    # (1/N) Σ_m g_m e^{2πi m d/N} = ifft(g)[d]
    d = np.arange(n)
    return np.exp(2j * np.pi * theta_q * d / n) * np.fft.ifft(g)


def build_single_rotor(params: KickedRotorParams, which: str = "A", method: str = "fft") -> np.ndarray:
    """Single-rotor propagator ``U_A`` (kick ``k_a``) or ``U_B`` (kick ``k_b``).

    ``method="fft"`` evaluates the kinetic m-sum by FFT, ``"direct"`` by
    explicit summation.
    """
    if which not in ("A", "B"):
        raise ValueError("which must be 'A' or 'B'")
    n = params.n
    k = params.k_a if which == "A" else params.k_b
    kick = kick_phases(n, k, params.theta_p)
    idx = np.arange(n)
    diff = idx[None, :] - idx[:, None]  # n - n' with rows n', columns n
    if method == "fft":
        # the shifted kernel is not N-periodic in d, so evaluate on both signs
        f_pos = kinetic_kernel(n, params.theta_q)
        shift = np.exp(-2j * np.pi * params.theta_q)  # e^{2πiθ_q d/N} changes by this when d -> d - N
        kern = np.where(diff >= 0, f_pos[diff % n], f_pos[diff % n] * shift)
    elif method == "direct":
        m = np.arange(n) + params.theta_q
        phase = np.exp(-1j * np.pi * m**2 / n)
        kern = np.einsum("m,ijm->ij", phase, np.exp(2j * np.pi * m[None, None, :] * diff[:, :, None] / n)) / n
    else:
        raise ValueError("method must be 'fft' or 'direct'")
    return kern * kick[None, :]


def coupling_phases(params: KickedRotorParams) -> np.ndarray:
    """Diagonal of the coupling in the position product basis, index ``n₁·N + n₂``."""
    n = params.n
    s = np.add.outer(np.arange(n), np.arange(n)).ravel()
    return np.exp(-1j * n * params.b / TWO_PI * np.cos(TWO_PI * (s + 2 * params.theta_p) / n))


def coupling_potential(params: KickedRotorParams) -> np.ndarray:
    """Real coupling generator ``cos(2π(n₁+n₂+2θ_p)/N)`` on the product basis."""
    n = params.n
    s = np.add.outer(np.arange(n), np.arange(n)).ravel()
    return np.cos(TWO_PI * (s + 2 * params.theta_p) / n)


def build_coupled_rotor(
    params: KickedRotorParams, max_dim: int = MAX_PRODUCT_DIM, method: str = "fft"
) -> FloquetOperator:
    """Coupled Floquet operator ``(U_A ⊗ U_B)·diag(coupling phases)``."""
    dim = params.n**2
    if dim > max_dim:
        raise DimensionError(f"N^2 = {dim} exceeds cap {max_dim}")
    u_a = build_single_rotor(params, "A", method)
    u_b = build_single_rotor(params, "B", method)
    mat = np.kron(u_a, u_b) * coupling_phases(params)[None, :]
    return FloquetOperator(mat, params)


def coupled_rotor_elementwise(params: KickedRotorParams) -> np.ndarray:
    """Reference construction straight from the matrix-element formula.

    Costs O(N⁵); meant for small N cross-checks.
    """
    n = params.n
    m = np.arange(n) + params.theta_q
    phase = np.exp(-1j * np.pi * m**2 / n)
    idx = np.arange(n)

    def kin(d):
        return (phase * np.exp(2j * np.pi * m * d / n)).sum() / n

    def kick(k, j):
        return np.exp(-1j * n * k / TWO_PI * np.cos(TWO_PI * (j + params.theta_p) / n))

    out = np.empty((n * n, n * n), dtype=complex)
    for n1p in idx:
        for n2p in idx:
            row = n1p * n + n2p
            for n1 in idx:
                for n2 in idx:
                    c = np.exp(
                        -1j * n * params.b / TWO_PI
                        * np.cos(TWO_PI * (n1 + n2 + 2 * params.theta_p) / n)
                    )
                    out[row, n1 * n + n2] = (
                        kin(n1 - n1p) * kick(params.k_a, n1)
                        * kin(n2 - n2p) * kick(params.k_b, n2) * c
                    )
    return out


def lambda_kicked_rotor(params: KickedRotorParams) -> RotorLambda:
    """``Λ_KR = N²/(4π²)·(1 − J₀²(N b/(2π)))`` and ``N⁴ b²/(32 π⁴)``."""
    n, b = params.n, params.b
    exact = n**2 / (4 * np.pi**2) * (1 - special.j0(n * b / TWO_PI) ** 2)
    small = n**4 * b**2 / (32 * np.pi**4)
    return RotorLambda(float(exact), float(small), bool(n * b <= SMALL_COUPLING_NB))


def epsilon_from_b(params: KickedRotorParams) -> float:
    """RMT coupling ``ε = √(3/(8π⁴)) N b`` with the same small-coupling Λ."""
    nb = params.n * params.b
    if nb > 1:
        warnings.warn(f"epsilon_from_b used outside its calibration range (N b = {nb:.3g} > 1)")
    return float(np.sqrt(3 / (8 * np.pi**4)) * nb)


def max_sqrt_lambda_kicked_rotor(n: int) -> float:
    """Supremum of √Λ_KR over b, reached at the first zero of J₀."""
    return n / TWO_PI


def b_from_sqrt_lambda(sqrt_lambda: float, n: int) -> float:
    """Smallest coupling ``b`` with ``√Λ_KR(b) = sqrt_lambda``.

    Inverts the J₀ form by bracketing root search on ``N b/(2π) ∈ [0, j₀,₁]``
    where Λ_KR is monotone.
    """
    if sqrt_lambda < 0:
        raise ValueError("sqrt_lambda must be nonnegative")
    if sqrt_lambda == 0:
        return 0.0
    target = sqrt_lambda**2 * 4 * np.pi**2 / n**2  # = 1 - J0(x)^2
    if target >= 1:
        raise ValueError(
            f"sqrt_lambda = {sqrt_lambda} unattainable for N = {n}: "
            f"maximum is N/(2 pi) = {max_sqrt_lambda_kicked_rotor(n):.4f}"
        )
    x = optimize.brentq(lambda x: 1 - special.j0(x) ** 2 - target, 0.0, J0_FIRST_ZERO, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return float(x * TWO_PI / n)
