"""Tracy–Widom F₂ reference table.

The table is generated once from the Fredholm determinant
``F₂(s) = det(I − K_Ai)`` on ``L²(s, ∞)`` with the Airy kernel, discretized by
Gauss–Legendre quadrature, and shipped as a CSV data asset together with its
SHA-256 checksum. Run ``python -m entrans.tracy_widom`` to regenerate it.
"""

from __future__ import annotations

import hashlib
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy import interpolate, special

TABLE_NAME = "tw2_table.csv"
TABLE_VERSION = "1"
TABLE_SHA256 = "1718529f627258b5f2197d3676e12947a26d725b0a8239f058616d40f1f4f361"
X_MIN, X_MAX, STEP = -10.0, 6.0, 0.01

#: Width of the truncated integration interval above s.
_TAIL = 14.0


def airy_kernel(x, y):
    """``(Ai(x)Ai'(y) − Ai'(x)Ai(y))/(x − y)`` with the diagonal limit."""
    ax, apx, _, _ = special.airy(x)
    ay, apy, _, _ = special.airy(y)
    X, Y = np.meshgrid(x, y, indexing="ij")
    num = np.outer(ax, apy) - np.outer(apx, ay)
    with np.errstate(invalid="ignore", divide="ignore"):
        k = num / (X - Y)
    diag = apx**2 - x * ax**2
    same = X == Y
    k[same] = np.broadcast_to(diag[:, None], k.shape)[same]
    return k


def f2_fredholm(s: float, nodes: int = 120) -> float:
    """``F₂(s)`` as a Fredholm determinant on ``[s, s + L]``."""
    upper = max(s, 0.0) + _TAIL
    t, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (upper - s) * (t + 1) + s
    w = 0.5 * (upper - s) * w
    sw = np.sqrt(w)
    m = np.eye(nodes) - sw[:, None] * airy_kernel(x, x) * sw[None, :]
    return float(np.linalg.det(m))


def generate_table(nodes: int = 120):
    """Return ``(x, pdf, cdf)`` on the shipped grid.

    The density is the derivative of the CDF by a fourth-order central
    difference with step ``STEP/2``.
    """
    x = np.round(np.arange(X_MIN, X_MAX + STEP / 2, STEP), 10)
    h = STEP / 2
    cdf = np.array([f2_fredholm(s, nodes) for s in x])
    cdf = np.clip(cdf, 0.0, 1.0)
    pdf = np.empty_like(x)
    for i, s in enumerate(x):
        f = [f2_fredholm(s + k * h, nodes) for k in (-2, -1, 1, 2)]
        pdf[i] = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
    pdf = np.clip(pdf, 0.0, None)
    return x, pdf, cdf


def format_table(x, pdf, cdf) -> str:
    lines = [f"# Tracy-Widom F2 reference table, version {TABLE_VERSION}", "x,density,cdf"]
    lines += [f"{a:.2f},{p:.15e},{c:.15e}" for a, p, c in zip(x, pdf, cdf)]
    return "\n".join(lines) + "\n"


def _table_bytes() -> bytes:
    return resources.files(__package__).joinpath("data").joinpath(TABLE_NAME).read_bytes()


@lru_cache(maxsize=1)
def load_table():
    """Load ``(x, pdf, cdf)`` after verifying the checksum."""
    raw = _table_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != TABLE_SHA256:
        raise RuntimeError(f"Tracy-Widom table checksum mismatch ({digest})")
    rows = [ln.split(",") for ln in raw.decode().splitlines()[2:] if ln]
    arr = np.array(rows, dtype=float)
    return arr[:, 0], arr[:, 1], arr[:, 2]


@lru_cache(maxsize=1)
def _splines():
    x, pdf, cdf = load_table()
    return interpolate.CubicSpline(x, pdf), interpolate.CubicSpline(x, cdf)


def tw2_pdf(x):
    """Tracy–Widom F₂ density by cubic interpolation; 0 outside the table."""
    x = np.asarray(x, dtype=float)
    p, _ = _splines()
    return np.where((x >= X_MIN) & (x <= X_MAX), np.clip(p(np.clip(x, X_MIN, X_MAX)), 0, None), 0.0)


def tw2_cdf(x):
    """Tracy–Widom F₂ distribution function by cubic interpolation."""
    x = np.asarray(x, dtype=float)
    _, c = _splines()
    inner = np.clip(c(np.clip(x, X_MIN, X_MAX)), 0.0, 1.0)
    return np.where(x < X_MIN, 0.0, np.where(x > X_MAX, 1.0, inner))


def main():
    import pathlib

    text = format_table(*generate_table())
    path = pathlib.Path(__file__).with_name("data") / TABLE_NAME
    path.write_text(text)
    print(hashlib.sha256(text.encode()).hexdigest())


if __name__ == "__main__":
    main()
