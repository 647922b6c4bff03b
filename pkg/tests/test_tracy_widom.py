import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate

from entrans import tracy_widom as tw


def test_table_checksum_and_shape():
    x, pdf, cdf = tw.load_table()
    assert x[0] == tw.X_MIN and x[-1] == tw.X_MAX
    assert np.allclose(np.diff(x), tw.STEP)
    assert np.all(np.diff(cdf) >= -1e-14)
    assert cdf[-1] == pytest.approx(1, abs=1e-9)


def test_table_regeneration_format():
    x, pdf, cdf = tw.load_table()
    assert tw.format_table(x, pdf, cdf).encode() == tw._table_bytes()


def test_checksum_mismatch(monkeypatch):
    tw.load_table.cache_clear()
    monkeypatch.setattr(tw, "_table_bytes", lambda: b"# tampered\nx,density,cdf\n0.00,1,1\n")
    try:
        with pytest.raises(RuntimeError, match="checksum"):
            tw.load_table()
    finally:
        monkeypatch.undo()
        tw.load_table.cache_clear()


def test_moments():
    x = np.linspace(tw.X_MIN, tw.X_MAX, 16001)
    p = tw.tw2_pdf(x)
    assert integrate.trapezoid(p, x) == pytest.approx(1, abs=1e-6)
    mean = integrate.trapezoid(x * p, x)
    var = integrate.trapezoid((x - mean) ** 2 * p, x)
    # literature values for F2
    assert mean == pytest.approx(-1.7710868074, abs=1e-6)
    assert var == pytest.approx(0.8131947928, abs=1e-6)


def test_left_tail_asymptotics():
    # F2(s) ~ tau |s|^{-1/8} exp(-|s|^3/12), tau = 2^{1/24} e^{zeta'(-1)}
    tau = 2 ** (1 / 24) * math.exp(float(mp.zeta(-1, derivative=1)))
    for s in (-8.0, -9.0):
        ref = tau * abs(s) ** (-1 / 8) * math.exp(-abs(s) ** 3 / 12)
        assert tw.tw2_cdf(s) == pytest.approx(ref, rel=0.01)


def test_discretization_independence():
    for s in (-4.0, -1.5, 0.5, 3.0):
        assert tw.f2_fredholm(s, nodes=60) == pytest.approx(tw.f2_fredholm(s, nodes=160), abs=1e-12)
        assert float(tw.tw2_cdf(s)) == pytest.approx(tw.f2_fredholm(s, nodes=160), abs=1e-10)


def test_interpolation_between_nodes():
    s = -1.234
    assert float(tw.tw2_cdf(s)) == pytest.approx(tw.f2_fredholm(s), abs=1e-9)
    h = 1e-4
    fd = (tw.f2_fredholm(s + h) - tw.f2_fredholm(s - h)) / (2 * h)
    assert float(tw.tw2_pdf(s)) == pytest.approx(fd, abs=1e-6)


def test_airy_kernel_diagonal_limit():
    x = np.array([0.3])
    y = np.array([0.3 + 1e-7])
    assert tw.airy_kernel(x, x)[0, 0] == pytest.approx(tw.airy_kernel(x, y)[0, 0], rel=1e-6)
