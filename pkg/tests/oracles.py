"""Independent reference computations shared by the unit and acceptance tests."""

import math

import mpmath as mp
import numpy as np
from scipy import integrate

from entrans.linalg import eig_unitary
from entrans.ensembles import match_product_labels


def _theta_quad(num, dps=25):
    # t = sin^2(θ/2) turns dt / (t(1-t))^{3/2} into 4 dθ / sin^2 θ
    with mp.workdps(dps):
        def f(x, y):
            t1, t2 = mp.sin(x / 2) ** 2, mp.sin(y / 2) ** 2
            return num(t1, t2) / (mp.sin(x) ** 2 * mp.sin(y) ** 2)

        h = mp.pi / 2
        return float(2 * mp.pi * mp.quad(f, [0, h], [0, h], method="gauss-legendre"))


def c3_mp(alpha):
    a = mp.mpf(alpha)
    return _theta_quad(lambda t1, t2: 1 + (1 - t1 - t2) ** a - (1 - t1) ** a - (1 - t2) ** a)


def c3_log_mp():
    xl = lambda u: u * mp.log(u)
    return _theta_quad(lambda t1, t2: xl(1 - t1 - t2) - xl(1 - t1) - xl(1 - t2))


def c1_quad(alpha):
    f = lambda th: (1 - math.cos(th / 2) ** (2 * alpha)) / math.sin(th) ** 2 if th > 0 else alpha / 4
    return 2 * math.sqrt(math.pi) * integrate.quad(f, 0, math.pi / 2, epsabs=1e-13, epsrel=1e-13)[0]


def c2_quad(alpha):
    f = lambda th: math.sin(th / 2) ** (2 * alpha) / math.sin(th) ** 2
    return 2 * math.sqrt(math.pi) * integrate.quad(f, 0, math.pi / 2, epsabs=1e-13, epsrel=1e-13, limit=200)[0]


def c_quad(alpha):
    # (sqrt(pi)/4) ∫_0^1 (1 - t^α - (1-t)^α) / (t(1-t))^{3/2} dt, folded onto [0, 1/2]
    def f(t):
        if t == 0:
            return 0.0
        return (-math.expm1(alpha * math.log1p(-t)) - t**alpha) / (t * (1 - t) ** 1.5)

    val = integrate.quad(f, 0, 0.5, weight="alg", wvar=(-0.5, 0), epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return math.sqrt(math.pi) / 2 * val


def eigenangle_error_slope(u_a_spec, u_b_spec, v_diagonal, epsilons, perturbation):
    """Log-log slope of max |exact − second-order| eigenangle error against ε."""
    u0 = np.kron(
        u_a_spec.eigenvectors @ np.diag(np.exp(1j * u_a_spec.eigenangles)) @ u_a_spec.eigenvectors.conj().T,
        u_b_spec.eigenvectors @ np.diag(np.exp(1j * u_b_spec.eigenangles)) @ u_b_spec.eigenvectors.conj().T,
    )
    basis = np.kron(u_a_spec.eigenvectors, u_b_spec.eigenvectors)
    errs = []
    for eps in epsilons:
        u = u0 * np.exp(1j * eps * np.asarray(v_diagonal))[None, :]
        exact = eig_unitary(u)
        labels = match_product_labels(exact.eigenvectors, basis)
        pert = perturbation(eps)
        d = np.angle(np.exp(1j * (exact.eigenangles - pert.eigenangles[labels])))
        errs.append(np.abs(d).max())
    return np.polyfit(np.log(epsilons), np.log(errs), 1)[0], np.array(errs)
