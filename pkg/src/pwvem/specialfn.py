"""Oscillatory moment functions and real-argument Bessel/Hankel evaluation.

The moment functions are the weighted exponential integrals

    phi_1(z) = int_0^1 e^{zt} dt
    phi_2(z) = int_0^1 (1-t) e^{zt} dt
    phi_3(z) = int_0^1 (1-t)^2 e^{zt} dt
    phi_4(z) = int_0^1 (1-t) t e^{zt} dt

that arise when plane-wave products (optionally weighted by linear edge
traces) are integrated in closed form along mesh edges.  All four are entire;
the closed forms divide by powers of z, so below a switch threshold they are
evaluated by truncated Maclaurin series to avoid catastrophic cancellation.

Bessel/Hankel functions are thin validating wrappers around scipy.special,
restricted to the real orders and arguments this solver needs.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.special as _sp

# Series switch: below this |z| the closed forms for phi_3/phi_4 would lose
# ~3*log10(1/|z|) digits to cancellation; degree-16 Maclaurin truncation at
# |z| = 1 is below 1e-16 relative for all four kinds.
PHI_SERIES_RADIUS = 1.0
_PHI_SERIES_DEGREE = 16

_PHI_COEFFS = {
    1: np.array([1.0 / (math.factorial(n) * (n + 1))
                 for n in range(_PHI_SERIES_DEGREE + 1)]),
    2: np.array([1.0 / (math.factorial(n) * (n + 1) * (n + 2))
                 for n in range(_PHI_SERIES_DEGREE + 1)]),
    3: np.array([2.0 / (math.factorial(n) * (n + 1) * (n + 2) * (n + 3))
                 for n in range(_PHI_SERIES_DEGREE + 1)]),
    4: np.array([1.0 / (math.factorial(n) * (n + 2) * (n + 3))
                 for n in range(_PHI_SERIES_DEGREE + 1)]),
}

PHI_AT_ZERO = {1: 1.0, 2: 0.5, 3: 1.0 / 3.0, 4: 1.0 / 6.0}


def phi(kind: int, z) -> complex | np.ndarray:
    """Evaluate the moment function ``phi_kind`` at complex ``z``.

    Vectorized over arrays; scalar input returns a Python complex.
    Relative accuracy is ~1e-14 across the complex plane.
    """
    if kind not in (1, 2, 3, 4):
        raise ValueError("kind must be one of 1, 2, 3, 4")
    za = np.asarray(z, dtype=complex)
    out = np.empty_like(za)
    small = np.abs(za) < PHI_SERIES_RADIUS
    if small.any():
        zs = za[small]
        acc = np.zeros_like(zs)
        for c in _PHI_COEFFS[kind][::-1]:
            acc = acc * zs + c
        out[small] = acc
    if (~small).any():
        zl = za[~small]
        e = np.exp(zl)
        if kind == 1:
            out[~small] = (e - 1.0) / zl
        elif kind == 2:
            out[~small] = (e - zl - 1.0) / zl**2
        elif kind == 3:
            out[~small] = (2.0 * (e - zl - 1.0) - zl**2) / zl**3
        else:
            out[~small] = (e * (zl - 2.0) + zl + 2.0) / zl**3
    if np.isscalar(z) or np.ndim(z) == 0:
        return complex(out[()])
    return out


_NU_MAX = 5.0
_X_MAX = 200.0


def _check_order(nu: float) -> float:
    if not 0.0 <= nu <= _NU_MAX:
        raise ValueError(f"order nu={nu} outside supported range [0, {_NU_MAX}]")
    return float(nu)


def _check_positive(x, name: str):
    xa = np.asarray(x, dtype=float)
    if (xa <= 0.0).any():
        raise ValueError(f"{name} requires x > 0")
    if (xa > _X_MAX).any():
        raise ValueError(f"argument exceeds supported range (0, {_X_MAX}]")
    return xa


def bessel_j(nu: float, x):
    """Bessel function of the first kind J_nu(x) for x >= 0, nu in [0, 5]."""
    nu = _check_order(nu)
    xa = np.asarray(x, dtype=float)
    if (xa < 0.0).any():
        raise ValueError("bessel_j requires x >= 0")
    if (xa > _X_MAX).any():
        raise ValueError(f"argument exceeds supported range [0, {_X_MAX}]")
    return _sp.jv(nu, xa)


def bessel_j_prime(nu: float, x):
    """Derivative J'_nu(x)."""
    nu = _check_order(nu)
    xa = np.asarray(x, dtype=float)
    if (xa < 0.0).any():
        raise ValueError("bessel_j_prime requires x >= 0")
    return _sp.jvp(nu, xa)


def bessel_y(nu: float, x):
    """Bessel function of the second kind Y_nu(x) for x > 0, nu in [0, 5]."""
    nu = _check_order(nu)
    return _sp.yv(nu, _check_positive(x, "bessel_y"))


def bessel_y_prime(nu: float, x):
    """Derivative Y'_nu(x) for x > 0."""
    nu = _check_order(nu)
    return _sp.yvp(nu, _check_positive(x, "bessel_y_prime"))


def hankel1(nu: float, x):
    """Hankel function of the first kind, J_nu(x) + i Y_nu(x), for x > 0."""
    nu = _check_order(nu)
    return _sp.hankel1(nu, _check_positive(x, "hankel1"))


def hankel1_prime(nu: float, x):
    """Derivative of the first-kind Hankel function for x > 0."""
    nu = _check_order(nu)
    return _sp.h1vp(nu, _check_positive(x, "hankel1_prime"))
