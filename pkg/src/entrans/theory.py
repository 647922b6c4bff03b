"""Closed-form predictions for the entanglement transition.

Transition parameter Λ from a diagonal coupling and its random-matrix and
kicked-rotor specializations, regularized perturbation averages of the two
largest Schmidt eigenvalues, moment coefficients C₁, C₂, C₃, C, perturbative
and recursively embedded moments and entropies, and unitary perturbation
theory for product eigenbases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special

from . import specfun
from .linalg import EigenDecomposition, wrap_angle

TWO_PI = 2.0 * math.pi
PI_32 = math.pi**1.5

#: Default validity limit of perturbative curves in √Λ.
SQRT_LAMBDA_MAX = 0.5
#: Validity limit for the α = 1/2 moment and d*².
SQRT_LAMBDA_MAX_HALF = 0.6

#: Exact value of the logarithmic C₃ integral at α = 1.
C3L_1 = math.pi**2 * (4 - math.pi) / 4

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-10


# ---------------------------------------------------------------------------
# transition parameter


@dataclass(frozen=True)
class TransitionParameter:
    """Λ with the mean spacing ``D = 2π/(N_A N_B)`` and ``v² = Λ D²``.

    ``coupling`` records the knob (ε or b) when known.
    """

    lambda_: float
    mean_spacing: float
    v_squared: float
    coupling: float | None = None

    @property
    def sqrt_lambda(self) -> float:
        return math.sqrt(self.lambda_)


def coupling_bracket(u_ab_diagonal, n_a: int, n_b: int) -> float:
    """``1 + |tr U/(N_A N_B)|² − ‖U^(A)/N_B‖²/N_A − ‖U^(B)/N_A‖²/N_B``.

    ``U^(A)`` and ``U^(B)`` are the partial traces of the diagonal coupling
    over B and over A.
    """
    d = np.asarray(u_ab_diagonal, dtype=complex)
    if d.shape != (n_a * n_b,):
        raise ValueError(f"coupling diagonal must have length {n_a * n_b}, got {d.shape}")
    u = d.reshape(n_a, n_b)
    tr = u.sum() / (n_a * n_b)
    ua = u.sum(axis=1) / n_b
    ub = u.sum(axis=0) / n_a
    return float(
        1 + abs(tr) ** 2 - np.vdot(ua, ua).real / n_a - np.vdot(ub, ub).real / n_b
    )


def lambda_from_coupling(u_ab_diagonal, n_a: int, n_b: int, coupling=None) -> TransitionParameter:
    """Transition parameter of a diagonal unitary coupling in the product basis.

    ``Λ = N_A³N_B³/(4π²(N_A²−1)(N_B²−1)) · bracket`` (see :func:`coupling_bracket`).
    """
    if n_a < 2 or n_b < 2:
        raise ValueError("both subsystems need dimension >= 2")
    bracket = coupling_bracket(u_ab_diagonal, n_a, n_b)
    pref = (n_a * n_b) ** 3 / (4 * math.pi**2 * (n_a**2 - 1) * (n_b**2 - 1))
    lam = max(pref * bracket, 0.0)
    d = TWO_PI / (n_a * n_b)
    return TransitionParameter(lam, d, lam * d * d, coupling)


def _one_minus_sinc2(eps: float) -> float:
    """``1 − sin²(πε)/(πε)²`` without cancellation at small ε."""
    y = math.pi * eps
    if abs(y) < 1e-2:
        y2 = y * y
        return y2 / 3 - 2 * y2**2 / 45 + y2**3 / 315
    return 1 - (math.sin(y) / y) ** 2


def lambda_rmt(n_a: int, n_b: int, epsilon: float) -> float:
    """Ensemble Λ of the random-phase coupling of strength ε."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if epsilon == 0:
        return 0.0
    return (n_a * n_b) ** 2 / (4 * math.pi**2 * (n_a + 1) * (n_b + 1)) * _one_minus_sinc2(epsilon)


def lambda_rmt_small(n_a: int, n_b: int, epsilon: float) -> float:
    """Small-ε form ``N_A N_B ε²/12``."""
    return n_a * n_b * epsilon**2 / 12


def max_sqrt_lambda_rmt(n_a: int, n_b: int) -> float:
    """√Λ_RMT at ε = 1, where the bracket first saturates."""
    return math.sqrt(lambda_rmt(n_a, n_b, 1.0))


def epsilon_from_sqrt_lambda(sqrt_lambda: float, n_a: int, n_b: int) -> float:
    """Smallest ε in [0, 1] with ``√Λ_RMT(ε) = sqrt_lambda``."""
    if sqrt_lambda < 0:
        raise ValueError("sqrt_lambda must be nonnegative")
    if sqrt_lambda == 0:
        return 0.0
    target = sqrt_lambda**2
    top = lambda_rmt(n_a, n_b, 1.0)
    if target > top:
        raise ValueError(
            f"sqrt_lambda = {sqrt_lambda} unattainable for N_A={n_a}, N_B={n_b}: "
            f"maximum is {math.sqrt(top):.4f}"
        )
    if target == top:
        return 1.0
    return float(
        optimize.brentq(lambda e: lambda_rmt(n_a, n_b, e) - target, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps)
    )


# ---------------------------------------------------------------------------
# regularized perturbation theory


def regularized_weight(s, w, lam):
    """Two-level mixing weight ``(1/2)(1 − |s|/√(s² + 4Λw))``.

    Evaluated as ``2Λw/(r(r + |s|))`` with ``r = √(s² + 4Λw)``, which is
    free of cancellation when ``s² ≫ Λw``. Returns 0 when ``Λw = 0``.
    """
    s = np.abs(np.asarray(s, dtype=float))
    c = 4 * np.asarray(lam, dtype=float) * np.asarray(w, dtype=float)
    if np.any(c < 0):
        raise ValueError("lambda and w must be nonnegative")
    r = np.sqrt(s * s + c)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(c > 0, np.where(s == 0, 0.5, 0.5 * c / (r * (r + s))), 0.0)
    return out[()] if out.ndim == 0 else out


def _exp_ei_scaled(x: float) -> float:
    """``e^{−x} Ei(x)`` for ``x > 0``, using the asymptotic series at large x."""
    if x < 600:
        return math.exp(-x) * float(special.expi(x))
    total, term = 0.0, 1.0 / x
    for k in range(1, 40):
        total += term
        term *= k / x
    return total


def lambda2_mean(lam: float) -> float:
    """``√(πΛ) + 2Λ e^{−4Λ}(Ei(4Λ) − π erfi(2√Λ))``."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if lam == 0:
        return 0.0
    r = math.sqrt(lam)
    # e^{-x^2} erfi(x) = (2/sqrt(pi)) dawsn(x)
    return (
        math.sqrt(math.pi * lam)
        + 2 * lam * _exp_ei_scaled(4 * lam)
        - 4 * math.sqrt(math.pi) * lam * float(special.dawsn(2 * r))
    )


def lambda2_mean_expansion(lam: float) -> float:
    """Small-Λ expansion ``√(πΛ) + 2Λ(γ + ln 4Λ) − 8√π Λ^{3/2}``."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if lam == 0:
        return 0.0
    return (
        math.sqrt(math.pi * lam)
        + 2 * lam * (specfun.EULER_GAMMA + math.log(4 * lam))
        - 8 * math.sqrt(math.pi) * lam**1.5
    )


def lambda1_mean(lam: float) -> float:
    """Perturbative ``λ̄₁ = 1 − √(πΛ)``."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    return 1 - math.sqrt(math.pi * lam)


def predicted_lambda1_lambda2(lam: float):
    """Return ``(λ̄₁, λ̄₂, λ̄₂ expansion)``."""
    return lambda1_mean(lam), lambda2_mean(lam), lambda2_mean_expansion(lam)


def lambda2_mean_quadrature(lam: float) -> float:
    """λ̄₂ by direct integration over the closer-neighbor spacing and w.

    ``∫∫ 2e^{−2s} e^{−w} · (1/2)(1 − s/√(s² + 4Λw)) ds dw``; an
    independent check of :func:`lambda2_mean`.
    """

    def inner(w):
        f = lambda s: 2 * math.exp(-2 * s) * float(regularized_weight(s, w, lam))
        return integrate.quad(f, 0, math.inf, epsabs=1e-13, epsrel=1e-12, limit=200)[0]

    val = integrate.quad(
        lambda w: math.exp(-w) * inner(w), 0, math.inf, epsabs=1e-13, epsrel=1e-12, limit=200
    )[0]
    return val


# ---------------------------------------------------------------------------
# moment coefficients


def c1(alpha: float) -> float:
    """``C₁(α) = √(2π)·₂F₁(−1/2, 3/2 − α; 1/2; 1/2)``."""
    if alpha <= 0:
        raise ValueError("C1 requires alpha > 0")
    return math.sqrt(TWO_PI) * specfun.hyp2f1(-0.5, 1.5 - alpha, 0.5, 0.5)


def c2(alpha: float) -> float:
    """``C₂(α) = (√π/2)·B_{1/2}(α − 1/2, −1/2)``; infinite for ``α ≤ 1/2``."""
    if alpha <= 0.5:
        return math.inf
    return math.sqrt(math.pi) / 2 * specfun.incomplete_beta(0.5, alpha - 0.5, -0.5)


def c_alpha(alpha: float) -> float:
    """``C(α) = C₁ − C₂ = π Γ(α − 1/2)/Γ(α − 1)``; zero at α = 1."""
    if alpha <= 0.5:
        raise ValueError("C requires alpha > 1/2")
    return float(math.pi * special.gamma(alpha - 0.5) * special.rgamma(alpha - 1))


def _gl_nodes(n=16):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1), 0.5 * w


_GL_X, _GL_W = _gl_nodes()
_SMALL_T = 0.05


def _phi_power(t1: float, t2: float, alpha: float) -> float:
    """``[1 + h(t₁+t₂) − h(t₁) − h(t₂)]/(t₁ t₂)`` with ``h(t) = (1−t)^α``."""
    ts, tb = (t1, t2) if t1 <= t2 else (t2, t1)
    if tb < _SMALL_T:
        # α(α−1) ∫∫ (1 − x t₁ − y t₂)^{α−2} dx dy over the unit square
        base = 1 - _GL_X[:, None] * ts - _GL_X[None, :] * tb
        return float(alpha * (alpha - 1) * (_GL_W[:, None] * _GL_W[None, :] * base ** (alpha - 2)).sum())
    if ts == 0:
        return alpha * (1 - (1 - tb) ** (alpha - 1)) / tb
    d1 = (1 - tb) ** alpha * math.expm1(alpha * math.log1p(-ts / (1 - tb)))
    d0 = math.expm1(alpha * math.log1p(-ts))
    return (d1 - d0) / (ts * tb)


def _phi_log(t1: float, t2: float) -> float:
    """``[F(t₁+t₂) − F(t₁) − F(t₂)]/(t₁ t₂)`` with ``F(t) = (1−t) ln(1−t)``."""
    ts, tb = (t1, t2) if t1 <= t2 else (t2, t1)
    if tb < _SMALL_T:
        base = 1 - _GL_X[:, None] * ts - _GL_X[None, :] * tb
        return float((_GL_W[:, None] * _GL_W[None, :] / base).sum())
    if ts == 0:
        return -math.log1p(-tb) / tb
    n = (
        -ts * math.log1p(-tb)
        + (1 - tb - ts) * math.log1p(-ts / (1 - tb))
        - (1 - ts) * math.log1p(-ts)
    )
    return n / (ts * tb)


def _corner_integral(phi, epsabs, epsrel) -> float:
    """``(π/8) ∫∫_{[0, π/2]²} Φ(t₁, t₂) sec²(θ₁/2) sec²(θ₂/2)`` with ``t = sin²(θ/2)``."""

    def f(th2, th1):
        t1 = math.sin(th1 / 2) ** 2
        t2 = math.sin(th2 / 2) ** 2
        return phi(t1, t2) / (math.cos(th1 / 2) ** 2 * math.cos(th2 / 2) ** 2)

    # symmetric integrand: twice the lower triangle
    val, _ = integrate.dblquad(f, 0, math.pi / 2, 0, lambda th1: th1, epsabs=epsabs, epsrel=epsrel)
    return math.pi / 4 * val


@lru_cache(maxsize=256)
def c3(alpha: float, epsabs: float = QUAD_EPSABS, epsrel: float = QUAD_EPSREL) -> float:
    """Second-order moment coefficient ``C₃(α)`` by 2-D adaptive quadrature.

    ``C₃(α) = (π/8) ∫∫_{[0,1/2]²} [1 + (1−t₁−t₂)^α − (1−t₁)^α − (1−t₂)^α]
    / (t₁ t₂ (1−t₁)(1−t₂))^{3/2} dt₁ dt₂``, evaluated after substituting
    ``tᵢ = sin²(θᵢ/2)``. Vanishes at α = 0 and α = 1.
    """
    if alpha < 0:
        raise ValueError("C3 requires alpha >= 0")
    if alpha in (0, 1):
        return 0.0
    return _corner_integral(lambda a, b: _phi_power(a, b, alpha), epsabs, epsrel)


@lru_cache(maxsize=4)
def c3_log(epsabs: float = QUAD_EPSABS, epsrel: float = QUAD_EPSREL) -> float:
    """``C₃L(1) = lim_{α→1} C₃(α)/(α−1)`` from the logarithmic integrand."""
    return _corner_integral(_phi_log, epsabs, epsrel)


@dataclass(frozen=True)
class Coefficients:
    c1: float
    c2: float
    c3: float
    c: float


def coefficients(alpha: float) -> Coefficients:
    """``(C₁, C₂, C₃, C)`` at α; entries outside their domain are NaN (C₂ is ∞ at α ≤ 1/2)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return Coefficients(
        c1=c1(alpha),
        c2=c2(alpha),
        c3=c3(alpha),
        c=c_alpha(alpha) if alpha > 0.5 else math.nan,
    )


# ---------------------------------------------------------------------------
# perturbative moments and entropies


def _half_bracket(lam: float, n: int) -> float:
    return math.log(2 * (n - 1) / math.sqrt(lam)) + specfun.EULER_GAMMA / 2 - 2


def mu_half(lam: float, n: int) -> float:
    """``μ̄_{1/2} = 1 + √(πΛ)[ln(2(N−1)/√Λ) + γ/2 − 2]``."""
    if lam == 0:
        return 1.0
    return 1 + math.sqrt(math.pi * lam) * _half_bracket(lam, n)


def d_star_sq_perturbative(lam: float, n: int) -> float:
    """``d̄*² = 2(1 − 1/√N) − 2√(πΛ/N)[ln(2(N−1)/√Λ) + γ/2 − 2]``."""
    prod = 2 * (1 - 1 / math.sqrt(n))
    if lam == 0:
        return prod
    return prod - 2 * math.sqrt(math.pi * lam / n) * _half_bracket(lam, n)


def sqrt_lambda1_mean(lam: float) -> float:
    """``⟨√λ₁⟩ = 1 − √(πΛ)[√2 − ln(1 + √2)]``."""
    return 1 - math.sqrt(math.pi * lam) * (math.sqrt(2) - math.log1p(math.sqrt(2)))


def mu2_perturbative(lam: float) -> float:
    """``μ̄₂ = 1 − (π^{3/2}/2)√Λ + πΛ``."""
    return 1 - PI_32 / 2 * math.sqrt(lam) + math.pi * lam


@dataclass(frozen=True)
class PerturbativePrediction:
    """Perturbative averages at one Λ and α.

    ``mu`` and ``entropy`` are always filled; ``lambda1_power`` and
    ``tail_sum`` are the contributions ``1 − C₁√Λ`` and ``C₂√Λ``;
    ``mu_half``, ``d_star_sq`` and ``sqrt_lambda1`` are set for α = 1/2.
    ``valid`` reflects the √Λ limit for this α.
    """

    lam: float
    alpha: float
    mu: float
    entropy: float
    lambda1_power: float = math.nan
    tail_sum: float = math.nan
    d_star_sq: float = math.nan
    sqrt_lambda1: float = math.nan
    valid: bool = True


def predicted_moments_entropies(lam: float, alpha: float, n: int | None = None) -> PerturbativePrediction:
    """Perturbative mean moment ``μ̄_α`` and HCT entropy ``S̄_α``.

    For α > 1/2: ``μ̄_α = 1 − C(α)√Λ + C₃(α)Λ`` and
    ``S̄_α = πΓ(α−1/2)/Γ(α)·√Λ − C₃(α)Λ/(α−1)``; at α = 1 the entropy is
    ``π^{3/2}√Λ − C₃L(1)Λ``. For α = 1/2 the dimension ``n`` is required and
    the moment carries the logarithmic correction; ``entropy`` is then the
    HCT form ``2(μ̄_{1/2} − 1)``.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if alpha < 0.5:
        raise ValueError("perturbative moments are not available for alpha < 1/2")
    r = math.sqrt(lam)
    if alpha == 0.5:
        if n is None:
            raise ValueError("alpha = 1/2 requires the dimension n")
        m = mu_half(lam, n)
        return PerturbativePrediction(
            lam, alpha, m, (1 - m) / (alpha - 1),
            lambda1_power=sqrt_lambda1_mean(lam),
            d_star_sq=d_star_sq_perturbative(lam, n),
            sqrt_lambda1=sqrt_lambda1_mean(lam),
            valid=r <= SQRT_LAMBDA_MAX_HALF,
        )
    valid = r <= SQRT_LAMBDA_MAX
    l1 = 1 - c1(alpha) * r
    tail = c2(alpha) * r
    if alpha == 1:
        return PerturbativePrediction(
            lam, alpha, 1.0, PI_32 * r - c3_log() * lam, l1, tail, valid=valid
        )
    if alpha == 2:
        mu = mu2_perturbative(lam)
    else:
        mu = 1 - c_alpha(alpha) * r + c3(alpha) * lam
    ent = math.pi * math.exp(special.gammaln(alpha - 0.5) - special.gammaln(alpha)) * r - c3(alpha) * lam / (alpha - 1)
    return PerturbativePrediction(lam, alpha, mu, ent, l1, tail, valid=valid)


# ---------------------------------------------------------------------------
# recursively embedded interpolation


@dataclass(frozen=True)
class InterpolatedPrediction:
    lam: float
    alpha: float
    mu: float
    entropy: float
    mu_inf: float
    entropy_inf: float


def recursive_interpolation(lam: float, alpha: float, n: int) -> InterpolatedPrediction:
    """Interpolation between the perturbative decay and the Haar limit.

    ``μ̄_α = (1 − μ∞) exp(−C(α)√Λ/(1 − μ∞)) + μ∞`` with ``μ∞ = 𝒞_α N^{1−α}``
    and ``S̄_α = (1 − μ̄_α)/(α − 1)``. At α = 1,
    ``S̄₁ = S∞[1 − exp(−π^{3/2}√Λ/S∞)]`` with ``S∞ = ln N − 1/2``.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if alpha < 1:
        raise ValueError("recursive interpolation requires alpha >= 1")
    if n < 2:
        raise ValueError("n must be at least 2")
    r = math.sqrt(lam)
    if alpha == 1:
        s_inf = math.log(n) - 0.5
        s = -s_inf * math.expm1(-PI_32 * r / s_inf)
        return InterpolatedPrediction(lam, alpha, 1.0, s, 1.0, s_inf)
    mu_inf = specfun.catalan_alpha(alpha) * n ** (1 - alpha)
    gap = 1 - mu_inf
    mu = gap * math.exp(-c_alpha(alpha) * r / gap) + mu_inf
    s = -gap * math.expm1(-c_alpha(alpha) * r / gap) / (alpha - 1)
    return InterpolatedPrediction(lam, alpha, mu, s, mu_inf, gap / (alpha - 1))


# ---------------------------------------------------------------------------
# prediction curves


@dataclass(frozen=True)
class PredictionCurve:
    """A prediction on a grid of √Λ values.

    ``grid`` holds √Λ (strictly increasing). ``regime`` is one of
    ``"perturbative"``, ``"interpolated"``, ``"asymptotic"``; ``valid`` marks
    points inside the regime's stated range.
    """

    observable: str
    grid: np.ndarray
    values: np.ndarray
    regime: str
    valid: np.ndarray = field(default=None)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or g.size == 0 or np.any(np.diff(g) <= 0):
            raise ValueError("grid must be nonempty and strictly increasing")
        if self.regime not in ("perturbative", "interpolated", "asymptotic"):
            raise ValueError(f"unknown regime {self.regime!r}")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        v = np.ones(g.size, bool) if self.valid is None else np.asarray(self.valid, bool)
        object.__setattr__(self, "valid", v)


def _alpha_label(alpha: float) -> str:
    return f"{alpha:g}"


def prediction_curves(sqrt_lambda_grid, alphas, n: int, sqrt_lambda_max: float = SQRT_LAMBDA_MAX) -> list:
    """All prediction curves on a √Λ grid for subsystem dimension ``n``.

    Observable names follow the sweep output: ``lambda_1``, ``lambda_2``,
    ``lambda_2_expansion``, ``mu_<α>``, ``S_<α>`` (perturbative),
    ``mu_<α>_interp``, ``S_<α>_interp`` (interpolated), ``d_star_sq``,
    ``sqrt_lambda_1``.
    """
    grid = np.asarray(sqrt_lambda_grid, dtype=float)
    lams = grid**2
    pert_ok = grid <= sqrt_lambda_max
    curves = []

    l1 = np.array([lambda1_mean(x) for x in lams])
    l2 = np.array([lambda2_mean(x) for x in lams])
    l2e = np.array([lambda2_mean_expansion(x) for x in lams])
    curves.append(PredictionCurve("lambda_1", grid, l1, "perturbative", pert_ok))
    curves.append(PredictionCurve("lambda_2", grid, l2, "perturbative", pert_ok))
    curves.append(PredictionCurve("lambda_2_expansion", grid, l2e, "perturbative", pert_ok))

    for a in alphas:
        a = float(a)
        if a < 0.5:
            continue
        preds = [predicted_moments_entropies(x, a, n) for x in lams]
        ok = np.array([p.valid for p in preds]) & (
            pert_ok if a != 0.5 else grid <= max(sqrt_lambda_max, SQRT_LAMBDA_MAX_HALF)
        )
        lab = _alpha_label(a)
        curves.append(PredictionCurve(f"mu_{lab}", grid, [p.mu for p in preds], "perturbative", ok))
        curves.append(PredictionCurve(f"S_{lab}", grid, [p.entropy for p in preds], "perturbative", ok))
        if a == 0.5:
            curves.append(PredictionCurve("d_star_sq", grid, [p.d_star_sq for p in preds], "perturbative", ok))
            curves.append(PredictionCurve("sqrt_lambda_1", grid, [p.sqrt_lambda1 for p in preds], "perturbative", ok))
        if a >= 1:
            ip = [recursive_interpolation(x, a, n) for x in lams]
            curves.append(PredictionCurve(f"mu_{lab}_interp", grid, [p.mu for p in ip], "interpolated"))
            curves.append(PredictionCurve(f"S_{lab}_interp", grid, [p.entropy for p in ip], "interpolated"))
    return curves


# ---------------------------------------------------------------------------
# unitary perturbation theory


class GapFloorError(ValueError):
    """Unperturbed eigenangles too close for perturbation theory."""

    def __init__(self, pairs, floor):
        self.pairs = pairs
        super().__init__(
            f"{len(pairs)} unperturbed eigenangle pair(s) closer than {floor:.1e}: "
            f"{pairs[:10]}"
        )


@dataclass(frozen=True)
class PerturbedEigenpairs:
    """Unitary perturbation theory for ``U(ε) = (U_A ⊗ U_B) exp(iεV)``.

    Eigenangles ``θ + εφ¹ + ε²φ²`` and eigenvectors in the unperturbed
    product eigenbasis (column ``J = j·N_B + k`` belongs to ``|jk⟩``).
    """

    theta: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    phi2_imag: np.ndarray
    first_order: np.ndarray
    second_order: np.ndarray
    norm_correction: np.ndarray
    epsilon: float
    order: int

    @property
    def eigenangles(self) -> np.ndarray:
        e = self.epsilon
        ang = self.theta + e * self.phi1
        if self.order >= 2:
            ang = ang + e * e * self.phi2
        return ang

    @property
    def vectors(self) -> np.ndarray:
        """Corrected eigenvectors (columns) in the unperturbed eigenbasis."""
        e = self.epsilon
        n = self.theta.size
        v = np.eye(n, dtype=complex) + e * self.first_order
        if self.order >= 2:
            v = v + e * e * self.second_order
            v[np.arange(n), np.arange(n)] = 1 - e * e * self.norm_correction
        return v


def unitary_perturbation(
    u_a_spec: EigenDecomposition,
    u_b_spec: EigenDecomposition,
    v_diagonal,
    epsilon: float,
    order: int = 2,
    gap_floor: float = 1e-8,
) -> PerturbedEigenpairs:
    """Eigenangle and eigenvector corrections for a weak diagonal coupling.

    Parameters
    ----------
    u_a_spec, u_b_spec : EigenDecomposition
        Spectra of the uncoupled subsystem operators.
    v_diagonal : array_like
        Real diagonal of the Hermitian generator V in the product
        (computational) basis, index ``i·N_B + j``.
    epsilon : float
    order : {1, 2}
    gap_floor : float
        Minimum allowed ``|θ_jk − θ_j'k'|`` (reduced to (−π, π]).

    Notes
    -----
    With ``Δ = θ_jk − θ_j'k'`` and ``κ = cot(Δ/2)/2``:
    ``φ¹ = V_{jk,jk}``, ``φ² = Σ (i/(e^{iΔ}−1) + i/2)|V|² = Σ κ|V|²``,
    first-order vector ``iV_{j'k',jk}/(e^{iΔ}−1)``, second-order vector
    ``i/(e^{iΔ'}−1) [Σ_{j''k''} V_{j'k',j''k''} V_{j''k'',jk} κ'' −
    φ¹ V_{j'k',jk} κ']``, and the unit coefficient renormalized to
    ``1 − (ε²/8) Σ |V|²/sin²(Δ/2)``.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    pa, pb = u_a_spec.eigenvectors, u_b_spec.eigenvectors
    theta = np.add.outer(u_a_spec.eigenangles, u_b_spec.eigenangles).ravel()
    n = theta.size
    p = np.kron(pa, pb)
    v = p.conj().T @ (np.asarray(v_diagonal, dtype=float)[:, None] * p)

    delta = wrap_angle(theta[None, :] - theta[:, None])  # [j', J] = θ_J − θ_j'
    off = ~np.eye(n, dtype=bool)
    close = np.argwhere(off & (np.abs(delta) < gap_floor))
    if close.size:
        pairs = sorted({(int(min(a, b)), int(max(a, b))) for a, b in close})
        raise GapFloorError(pairs, gap_floor)

    safe = np.where(off, delta, 1.0)
    g = np.where(off, 1j / np.expm1(1j * safe), 0.0)  # i/(e^{iΔ} − 1)
    kappa = np.where(off, 0.5 / np.tan(safe / 2), 0.0)
    phi1 = np.real(np.diag(v)).copy()
    first = g * v  # column J: coefficients on |j'⟩

    abs2 = np.abs(v) ** 2
    phi2_c = ((g + 0.5j) * np.where(off, abs2, 0.0)).sum(axis=0)
    vo = np.where(off, v, 0.0)
    second = g * ((v @ (kappa * vo)) - phi1[None, :] * kappa * vo)
    second[~off] = 0.0
    s2 = np.sin(safe / 2) ** 2
    norm_corr = (np.where(off, abs2, 0.0) / s2).sum(axis=0) / 8
    return PerturbedEigenpairs(
        theta=theta,
        phi1=phi1,
        phi2=phi2_c.real,
        phi2_imag=phi2_c.imag,
        first_order=first,
        second_order=second,
        norm_correction=norm_corr,
        epsilon=float(epsilon),
        order=order,
    )
