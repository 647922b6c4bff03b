"""Distributions of Schmidt eigenvalues and entanglement measures.

Universal density of ``u₂ = g_Λ(λ₂)`` with its ``u^{−3/2}`` tail, the Lévy
density of ``u₁``, the half-normal purity variable, the Marčenko–Pastur law,
largest/smallest-eigenvalue rescalings, histograms and KS distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import tracy_widom

SQRT_PI = math.sqrt(math.pi)

#: λ at or above ``1/2 − POLE_GUARD`` is excluded from g_Λ transforms.
POLE_GUARD = 1e-9

#: Below this the u₂ density uses its small-u series.
U2_SERIES_MAX = 0.002

# (1/4)(−1/4)^k (2k+2)!/k!, the small-u expansion of the u₂ density
_U2_SERIES = [0.25 * (-0.25) ** k * math.factorial(2 * k + 2) / math.factorial(k) for k in range(6)]

KINDS = ("u2", "u1", "purity_u", "mp", "tw_max", "exp_min")


def g_lambda(x, lam):
    """``g_Λ(x) = x(1−x)/(Λ(1−2x)²)``; symmetric about x = 1/2 where it has a pole."""
    x = np.asarray(x, dtype=float)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if np.any(x == 0.5):
        raise ValueError("g_lambda has a pole at x = 1/2")
    out = x * (1 - x) / (lam * (1 - 2 * x) ** 2)
    return out[()] if out.ndim == 0 else out


def density_u2(u):
    """Universal density of ``u₂``.

    ``−1/u² + (√π/(2u^{5/2}))(2+u) e^{1/u} erfc(1/√u)``, evaluated with the
    scaled complementary error function; a six-term series is used for
    ``u < 0.002`` where the two terms cancel.
    """
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    small = pos & (u < U2_SERIES_MAX)
    big = pos & ~small
    us = u[small]
    out[small] = sum(c * us**k for k, c in enumerate(_U2_SERIES))
    ub = u[big]
    out[big] = -1 / ub**2 + SQRT_PI / (2 * ub**2.5) * (2 + ub) * special.erfcx(1 / np.sqrt(ub))
    return out[()] if out.ndim == 0 else out


def survival_u2(u):
    """``P(u₂ > u) = √(π/u) e^{1/u} erfc(1/√u)``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(u > 0, np.sqrt(np.pi / np.where(u > 0, u, 1)) * special.erfcx(1 / np.sqrt(np.where(u > 0, u, 1))), 1.0)
    return out[()] if out.ndim == 0 else out


def cdf_u2(u):
    return 1 - survival_u2(u)


def density_levy(u):
    """Lévy density ``(√π/(2u^{3/2})) e^{−π²/(4u)}`` of ``u₁``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(u > 0, SQRT_PI / (2 * u**1.5) * np.exp(-np.pi**2 / (4 * u)), 0.0)
    return out[()] if out.ndim == 0 else out


def cdf_levy(u):
    """``erfc(π/(2√u))``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(u > 0, special.erfc(np.pi / (2 * np.sqrt(np.where(u > 0, u, 1)))), 0.0)
    return out[()] if out.ndim == 0 else out


def density_half_normal(x):
    """Half-normal density ``√π e^{−π²x²/4}`` of the purity variable."""
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 0, SQRT_PI * np.exp(-np.pi**2 * x**2 / 4), 0.0)
    return out[()] if out.ndim == 0 else out


def cdf_half_normal(x):
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, special.erf(np.pi * x / 2), 0.0)
    return out[()] if out.ndim == 0 else out


def purity_u(mu2, lam):
    """``u = √(2Λ(2μ₂ − 1)/(1 − μ₂))``; infinite at μ₂ = 1."""
    mu2 = np.asarray(mu2, dtype=float)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if np.any(mu2 <= 0.5) or np.any(mu2 > 1):
        raise ValueError("purity_u requires 1/2 < mu2 <= 1")
    with np.errstate(divide="ignore"):
        out = np.sqrt(2 * lam * (2 * mu2 - 1) / (1 - mu2))
    return out[()] if out.ndim == 0 else out


def mp_support(q: float):
    if q < 1:
        raise ValueError("q must be at least 1")
    r = 2 / math.sqrt(q)
    return 1 + 1 / q - r, 1 + 1 / q + r


def marcenko_pastur(x, q: float = 1.0):
    """Marčenko–Pastur density of ``λ̃ = N_A λ`` at ratio ``Q = N_B/N_A``."""
    lo, hi = mp_support(q)
    x = np.asarray(x, dtype=float)
    inside = (x > lo) & (x < hi)
    xs = np.where(inside, x, 1.0)
    out = np.where(inside, q / (2 * np.pi * xs) * np.sqrt(np.clip((hi - xs) * (xs - lo), 0, None)), 0.0)
    return out[()] if out.ndim == 0 else out


def marcenko_pastur_cdf(x, q: float = 1.0, grid: int = 4001):
    """Marčenko–Pastur distribution function.

    With ``x = x₋ + (x₊ − x₋) sin²φ`` the integrand is smooth on
    [0, π/2]; the CDF is tabulated by cumulative Simpson sums and
    interpolated in φ. Closed form at Q = 1.
    """
    lo, hi = mp_support(q)
    x = np.asarray(x, dtype=float)
    z = np.clip((x - lo) / (hi - lo), 0.0, 1.0)
    phi = np.arcsin(np.sqrt(z))
    if q == 1:
        out = (2 / np.pi) * (phi + np.sin(2 * phi) / 2)
    else:
        ph = np.linspace(0, np.pi / 2, grid)
        xs = lo + (hi - lo) * np.sin(ph) ** 2
        dens = q / (2 * np.pi * xs) * (hi - lo) * np.sin(ph) * np.cos(ph) * (hi - lo) * 2 * np.sin(ph) * np.cos(ph)
        from scipy.integrate import cumulative_simpson

        cum = cumulative_simpson(dens, x=ph, initial=0.0)
        out = np.interp(phi, ph, cum / cum[-1])
    out = np.where(x <= lo, 0.0, np.where(x >= hi, 1.0, out))
    return out[()] if out.ndim == 0 else out


def exponential_cdf(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, -np.expm1(-np.clip(x, 0, None)), 0.0)


@dataclass(frozen=True)
class RescaledSample:
    """Finite rescaled values of one kind plus what was excluded and why."""

    kind: str
    values: np.ndarray
    params: dict = field(default_factory=dict)
    excluded: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sample kind {self.kind!r}")
        v = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise ValueError("rescaled samples must be finite")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size


def rescale_g(lambdas, lam: float, kind: str) -> RescaledSample:
    """``u = g_Λ(λ)`` for λ₁ (``kind="u1"``) or λ₂ (``kind="u2"``) samples.

    Values within ``POLE_GUARD`` of 1/2 are excluded and counted. For λ₁
    the same pole sits at λ₁ → 1/2 from above.
    """
    x = np.asarray(lambdas, dtype=float).ravel()
    if kind == "u2":
        keep = x < 0.5 - POLE_GUARD
    elif kind == "u1":
        keep = x > 0.5 + POLE_GUARD
    else:
        raise ValueError("kind must be 'u1' or 'u2'")
    v = g_lambda(x[keep], lam)
    return RescaledSample(kind, v, {"lambda": lam}, int((~keep).sum()))


def rescale_purity(mu2, lam: float) -> RescaledSample:
    """Purity variable for μ₂ samples; μ₂ ≤ 1/2 and μ₂ = 1 are excluded."""
    m = np.asarray(mu2, dtype=float).ravel()
    keep = (m > 0.5) & (m < 1)
    return RescaledSample("purity_u", purity_u(m[keep], lam), {"lambda": lam}, int((~keep).sum()))


def rescale_mp(spectra) -> RescaledSample:
    """``λ̃ = N_A λ`` for all eigenvalues of all spectra."""
    s = np.atleast_2d(np.asarray(spectra, dtype=float))
    n = s.shape[-1]
    return RescaledSample("mp", n * s.ravel(), {"n": n})


def rescale_extremes(spectra, n: int):
    """Rescaled largest and smallest Schmidt eigenvalues (square case).

    ``λ_max = (λ₁ − 4/N)/(2^{4/3} N^{−5/3})`` and ``λ_min = N(N² − 1) λ_N``.

    Returns
    -------
    (RescaledSample, RescaledSample)
        Kinds ``"tw_max"`` and ``"exp_min"``.
    """
    s = np.atleast_2d(np.asarray(spectra, dtype=float))
    if s.shape[-1] != n:
        raise ValueError(f"spectra have {s.shape[-1]} eigenvalues, expected N = {n}")
    lmax = (s[:, 0] - 4 / n) / (2 ** (4 / 3) * n ** (-5 / 3))
    lmin = n * (n * n - 1) * np.clip(s[:, -1], 0, None)
    return (
        RescaledSample("tw_max", lmax, {"n": n}),
        RescaledSample("exp_min", lmin, {"n": n}),
    )


def ks_distance(sample, cdf) -> float:
    """Kolmogorov–Smirnov distance between a sample and a reference CDF."""
    x = sample.values if isinstance(sample, RescaledSample) else np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    x = np.sort(x)
    f = np.asarray(cdf(x), dtype=float)
    n = x.size
    # empirical CDF just after and just before each point, grouped over ties
    after = np.searchsorted(x, x, side="right") / n
    before = np.searchsorted(x, x, side="left") / n
    return float(max(np.max(after - f), np.max(f - before)))


def truncated_cdf(cdf, lo: float, hi: float):
    """CDF of the reference conditioned on ``[lo, hi]``."""
    flo, fhi = float(cdf(lo)), float(cdf(hi))

    def f(x):
        return np.clip((np.asarray(cdf(x)) - flo) / (fhi - flo), 0.0, 1.0)

    return f


def ks_distance_window(values, cdf, lo: float, hi: float) -> float:
    """KS distance of the sample restricted to ``[lo, hi]`` against the
    conditioned reference."""
    v = np.asarray(values, dtype=float).ravel()
    v = v[(v >= lo) & (v <= hi)]
    return ks_distance(v, truncated_cdf(cdf, lo, hi))


def tw2_cdf(x):
    return tracy_widom.tw2_cdf(x)


def tw2_pdf(x):
    return tracy_widom.tw2_pdf(x)


@dataclass
class Histogram:
    """Counts on fixed bin edges; mergeable by adding counts.

    Values outside the edges are tallied in ``underflow``/``overflow`` and
    do not enter the density.
    """

    edges: np.ndarray
    counts: np.ndarray
    log: bool = False
    underflow: int = 0
    overflow: int = 0

    @classmethod
    def empty(cls, lo: float, hi: float, bins: int, log: bool = False) -> "Histogram":
        if log:
            if not 0 < lo < hi:
                raise ValueError("log bins need 0 < lo < hi")
            edges = np.logspace(math.log10(lo), math.log10(hi), bins + 1)
        else:
            edges = np.linspace(lo, hi, bins + 1)
        return cls(edges, np.zeros(bins, dtype=np.int64), log)

    @classmethod
    def from_samples(cls, values, lo, hi, bins, log=False) -> "Histogram":
        h = cls.empty(lo, hi, bins, log)
        h.add(values)
        return h

    def add(self, values) -> None:
        v = np.asarray(values, dtype=float).ravel()
        v = v[np.isfinite(v)]
        self.underflow += int((v < self.edges[0]).sum())
        self.overflow += int((v > self.edges[-1]).sum())
        c, _ = np.histogram(v, bins=self.edges)
        self.counts = self.counts + c

    def merge(self, other: "Histogram") -> "Histogram":
        if not np.array_equal(self.edges, other.edges):
            raise ValueError("histograms have different bin edges")
        return Histogram(
            self.edges.copy(), self.counts + other.counts, self.log,
            self.underflow + other.underflow, self.overflow + other.overflow,
        )

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def density(self) -> np.ndarray:
        t = self.total
        if t == 0:
            return np.zeros(self.counts.shape)
        return self.counts / (t * self.widths)

    @property
    def centers(self) -> np.ndarray:
        if self.log:
            return np.sqrt(self.edges[:-1] * self.edges[1:])
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def integral(self) -> float:
        return float((self.density * self.widths).sum())

    def __eq__(self, other):
        if not isinstance(other, Histogram):
            return NotImplemented
        return (
            np.array_equal(self.edges, other.edges)
            and np.array_equal(self.counts, other.counts)
            and self.log == other.log
            and self.underflow == other.underflow
            and self.overflow == other.overflow
        )


def tail_slope(values, lo: float, hi: float, bins_per_decade: int = 5) -> float:
    """Least-squares slope of log density versus log u over ``[lo, hi]``.

    Densities are normalized over the full sample; empty bins are skipped.
    """
    v = np.asarray(values, dtype=float).ravel()
    decades = math.log10(hi) - math.log10(lo)
    bins = max(2, int(round(decades * bins_per_decade)))
    edges = np.logspace(math.log10(lo), math.log10(hi), bins + 1)
    counts, _ = np.histogram(v, bins=edges)
    dens = counts / (v.size * np.diff(edges))
    centers = np.sqrt(edges[:-1] * edges[1:])
    ok = counts > 0
    if ok.sum() < 2:
        raise ValueError("not enough populated bins for a slope")
    return float(np.polyfit(np.log10(centers[ok]), np.log10(dens[ok]), 1)[0])
