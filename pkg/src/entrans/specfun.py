"""Special functions used by the closed-form predictions.

Thin wrappers over :mod:`scipy.special` where scipy already provides the
function, plus a few kernels scipy lacks in the needed form: a real ₂F₁
series with an explicit tail bound, the incomplete Beta function continued to
negative ``b``, AGM-based complete elliptic integrals parametrized by the
modulus, and generalized Catalan numbers.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.special as sc
from scipy import integrate

#: Euler's constant γ.
EULER_GAMMA = float(np.euler_gamma)

_HYP_MAX_TERMS = 20_000


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def gamma(x: float) -> float:
    """Gamma function; raises at the poles ``x = 0, −1, −2, …``."""
    if _is_nonpositive_integer(x):
        raise ValueError(f"gamma has a pole at {x}")
    return float(sc.gamma(x))


def hyp2f1(a: float, b: float, c: float, z: float, tol: float = 1e-16) -> float:
    """Gauss hypergeometric function ₂F₁(a, b; c; z) for real ``|z| < 1``.

    Sums the power series until a geometric bound on the remaining tail
    drops below ``tol`` (relative to the partial sum, absolute below 1).
    Beyond the index where all Pochhammer factors are positive the term
    ratio is bounded by ``|z|·max(r_k, 1)`` with ``r_k`` the current ratio,
    giving the tail bound ``|t_{k+1}| / (1 − |z| max(r_k, 1))``.

    Intended for ``|z| ≤ 1/2``; convergence slows as ``|z| → 1``.
    """
    if _is_nonpositive_integer(c):
        raise ValueError(f"hyp2f1 undefined for c = {c}")
    if not abs(z) < 1:
        raise ValueError("hyp2f1 series requires |z| < 1")
    if z == 0:
        return 1.0
    term = 1.0
    total = 1.0
    # all factors positive from this index on
    k_pos = max(0.0, -a, -b, -c) + 1
    az = abs(z)
    for k in range(_HYP_MAX_TERMS):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1))
        term *= ratio * z
        total += term
        if term == 0.0:
            return total
        if k >= k_pos:
            q = az * max(abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2))), 1.0)
            if q < 1:
                bound = abs(term) * q / (1 - q)
                if bound <= tol * max(1.0, abs(total)):
                    return total
    raise ArithmeticError("hyp2f1 series did not converge")


def beta(a: float, b: float) -> float:
    """Complete Beta function ``Γ(a)Γ(b)/Γ(a+b)``."""
    return float(sc.beta(a, b))


def incomplete_beta(z: float, a: float, b: float) -> float:
    """Non-regularized incomplete Beta ``B_z(a, b) = ∫₀^z t^{a−1}(1−t)^{b−1} dt``.

    Uses ``B_z(a, b) = z^a/a · ₂F₁(a, 1−b; a+1; z)``, which also defines the
    function for ``b ≤ 0`` where the integral to 1 diverges. For ``z > 1/2``
    and ``b > 0`` the reflection ``B(a, b) − B_{1−z}(b, a)`` keeps the series
    argument at most 1/2.
    """
    if not 0 <= z <= 1:
        raise ValueError("incomplete_beta requires 0 <= z <= 1")
    if z == 0:
        return 0.0
    if a <= 0:
        raise ValueError("incomplete_beta diverges for a <= 0")
    if z <= 0.5:
        return z**a / a * hyp2f1(a, 1 - b, a + 1, z)
    if b > 0:
        if z == 1:
            return beta(a, b)
        return beta(a, b) - incomplete_beta(1 - z, b, a)
    if z == 1:
        raise ValueError("incomplete_beta diverges at z = 1 for b <= 0")
    return z**a / a * hyp2f1(a, 1 - b, a + 1, z)


def ei(x: float) -> float:
    """Exponential integral Ei(x) for ``x > 0``."""
    if not x > 0:
        raise ValueError("ei is only provided for x > 0")
    return float(sc.expi(x))


def erf(x):
    return sc.erf(x)


def erfc(x):
    return sc.erfc(x)


def erfi(x):
    return sc.erfi(x)


def bessel_j0(x):
    """Bessel function of the first kind of order zero."""
    return sc.j0(x)


def _agm_terms(k: float):
    a, g = 1.0, math.sqrt((1 - k) * (1 + k))
    csum = 0.5 * k * k  # n = 0 term: 2^{-1} c_0^2 with c_0 = k
    power = 0.5
    for _ in range(64):
        if abs(a - g) <= 1e-16 * a:
            break
        c = 0.5 * (a - g)
        a, g = 0.5 * (a + g), math.sqrt(a * g)
        power *= 2
        csum += power * c * c
    return a, csum


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus ``k`` (``m = k²``)."""
    if not 0 <= k < 1:
        raise ValueError("elliptic_K requires 0 <= k < 1")
    a, _ = _agm_terms(k)
    return math.pi / (2 * a)


def elliptic_E(k: float) -> float:
    """Complete elliptic integral of the second kind, modulus ``k``."""
    if not 0 <= k <= 1:
        raise ValueError("elliptic_E requires 0 <= k <= 1")
    if k == 1:
        return 1.0
    a, csum = _agm_terms(k)
    return math.pi / (2 * a) * (1 - csum)


def catalan_alpha(alpha: float, epsabs: float = 1e-12, epsrel: float = 1e-12) -> float:
    """Generalized Catalan number ``𝒞_α = ∫₀⁴ x^α ρ_MP(x) dx`` with Q = 1.

    The substitution ``x = 4 sin²θ`` maps the integrand to the smooth
    ``(4/π)·4^α sin^{2α}θ cos²θ`` on [0, π/2].
    """
    if alpha < 0:
        raise ValueError("catalan_alpha requires alpha >= 0")
    scale = 4.0**alpha * 4.0 / math.pi

    def f(theta):
        s = math.sin(theta)
        return s ** (2 * alpha) * math.cos(theta) ** 2

    val, err = integrate.quad(f, 0.0, math.pi / 2, epsabs=epsabs, epsrel=epsrel, limit=200)
    if not err <= max(1e-8, 10 * epsrel * abs(val)) / scale:
        raise ArithmeticError(f"catalan_alpha quadrature did not converge (err={err})")
    return scale * val
