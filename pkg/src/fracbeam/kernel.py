r"""Fractional-order kernels, horizons and scalar fractional operators.

All operators act on a one-dimensional field over a (possibly asymmetric)
horizon :math:`(x - l_A, x + l_B)`.  The Riesz-Caputo derivative used for
the strains is

.. math::

    D^\alpha f(x) = \frac{1-\alpha}{2}\Big[
        l_A^{\alpha-1}\int_{x-l_A}^{x}\frac{f'(s)}{(x-s)^\alpha}\,ds
      + l_B^{\alpha-1}\int_{x}^{x+l_B}\frac{f'(s)}{(s-x)^\alpha}\,ds\Big],

which is the two-sided Caputo form with :math:`\tfrac12\Gamma(2-\alpha)`
and the :math:`\Gamma(1-\alpha)` of each Caputo integral already cancelled
(:math:`\Gamma(2-\alpha) = (1-\alpha)\Gamma(1-\alpha)`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from .errors import DomainError

ScalarFn = Callable[[float], float]

_EDGE = 1e-12


@dataclass(frozen=True)
class FracParams:
    """Order ``alpha`` of the derivative and isotropic horizon length ``lf``."""

    alpha: float
    lf: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.lf > 0.0:
            raise DomainError(f"lf must be positive, got {self.lf}")
        if self.alpha < 0.5:
            warnings.warn(
                f"alpha={self.alpha} is below 0.5; the fractional beam model "
                "is known to lose physical meaning around alpha ~ 0.4",
                stacklevel=2,
            )

    @property
    def is_local(self) -> bool:
        return self.alpha == 1.0


@dataclass(frozen=True)
class Horizon:
    """Left and right horizon lengths at an evaluation point."""

    lA: float
    lB: float

    def __post_init__(self):
        if self.lA < 0.0 or self.lB < 0.0 or self.lA + self.lB <= 0.0:
            raise DomainError(f"invalid horizon lA={self.lA}, lB={self.lB}")


def horizon_at(x: float, lf: float, L: float) -> Horizon:
    """Horizon of ``x`` truncated by the beam ends ``0`` and ``L``."""
    if lf <= 0.0 or L <= 0.0:
        raise DomainError("lf and L must be positive")
    if x < -_EDGE * L or x > L * (1.0 + _EDGE):
        raise DomainError(f"x={x} lies outside [0, {L}]")
    x = min(max(x, 0.0), L)
    return Horizon(min(lf, x), min(lf, L - x))


def horizon_lengths(x, lf: float, L: float):
    """Vectorised :func:`horizon_at` returning ``(lA, lB)`` arrays."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, L)
    return np.minimum(lf, x), np.minimum(lf, L - x)


def kernel(x: float, s: float, l: float, alpha: float) -> float:
    """Power-law kernel ``(1-alpha)/2 * l**(alpha-1) * |x-s|**(-alpha)``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"kernel requires 0 < alpha < 1, got {alpha}")
    if l <= 0.0:
        raise DomainError("kernel length scale must be positive")
    if x == s:
        raise DomainError("kernel is singular at x == s; integrate analytically")
    return 0.5 * (1.0 - alpha) * l ** (alpha - 1.0) * abs(x - s) ** (-alpha)


def attenuation(x: float, s: float, h: Horizon, alpha: float) -> float:
    """Kernel with the left length below ``x`` and the right length above it."""
    if not (x - h.lA < s < x + h.lB) or s == x:
        raise DomainError(f"s={s} outside the open horizon of x={x}")
    return kernel(x, s, h.lA if s < x else h.lB, alpha)


def power_integral(t1, t2, p):
    """``(t2**p - t1**p) / p`` for ``0 <= t1 <= t2`` and ``p > 0``, without cancellation."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(t2 > 0.0, t1 / np.where(t2 > 0.0, t2, 1.0), 1.0)
        frac = np.where(ratio > 0.0, -np.expm1(p * np.log(np.where(ratio > 0.0, ratio, 1.0))), 1.0)
    return np.where(t2 > t1, t2**p * frac / p, 0.0)


def moments(x, a, b, anchor, alpha: float, kmax: int):
    """Exact ``int_a^b |x-s|**(-alpha) * (s-anchor)**k ds`` for ``k = 0..kmax``.

    Arrays broadcast elementwise.  Each interval must lie entirely on one side
    of ``x`` (``b <= x`` or ``a >= x``).  Returns an array with a trailing axis
    of length ``kmax + 1``.
    """
    x, a, b, anchor = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, a, b, anchor)))
    left = b <= x
    t1 = np.where(left, x - b, a - x)
    t2 = np.where(left, x - a, b - x)
    t1 = np.maximum(t1, 0.0)
    sign = np.where(left, -1.0, 1.0)
    A = x - anchor
    pw = [power_integral(t1, t2, j + 1.0 - alpha) for j in range(kmax + 1)]
    out = np.empty(x.shape + (kmax + 1,))
    for k in range(kmax + 1):
        acc = np.zeros(x.shape)
        for j in range(k + 1):
            acc = acc + math.comb(k, j) * A ** (k - j) * sign**j * pw[j]
        out[..., k] = acc
    return out


def singular_moment(x: float, a: float, b: float, alpha: float, k: int) -> float:
    """Exact ``int_a^b |x-s|**(-alpha) (s-a)**k ds`` with ``x`` outside ``(a, b)``.

    The singular case of interest has ``x`` at one of the endpoints.
    """
    if alpha >= 1.0 or alpha <= 0.0:
        raise DomainError(f"singular moments need 0 < alpha < 1, got {alpha}")
    if k < 0:
        raise DomainError("moment degree must be non-negative")
    if b < a:
        raise DomainError("interval must satisfy a <= b")
    if a < x < b:
        raise DomainError("x lies strictly inside (a, b); split the interval first")
    return float(moments(x, a, b, a, alpha, k)[k])


# -- operators on callables -------------------------------------------------


def _check_domain(x, lo, hi, domain):
    if domain is None:
        return
    dlo, dhi = domain
    tol = _EDGE * max(1.0, abs(dhi - dlo))
    if lo < dlo - tol or hi > dhi + tol:
        raise DomainError(f"horizon [{lo}, {hi}] of x={x} exceeds the field domain {domain}")


def _side(fn, x, length, alpha, right: bool):
    """``int_0^length fn(x +- y) y**(-alpha) dy`` by QUADPACK's algebraic weight.

    Working in the offset ``y`` keeps short sides exact; forming ``x - length``
    first would lose the length to cancellation when ``length << x``.
    """
    if length <= 0.0:
        return 0.0
    sgn = 1.0 if right else -1.0
    # full_output returns QUADPACK's roundoff notice instead of warning; at
    # this tolerance the notice only means machine precision was reached
    val = integrate.quad(
        lambda y: fn(x + sgn * y), 0.0, length, weight="alg", wvar=(-alpha, 0.0),
        epsabs=0.0, epsrel=1e-13, limit=200, full_output=1,
    )[0]
    return val


def rc_derivative(df: ScalarFn, x: float, h: Horizon, alpha: float, domain=None) -> float:
    """Riesz-Caputo derivative of a field whose first derivative is ``df``.

    ``domain`` (optional ``(lo, hi)``) is where the field is defined; the
    horizon must not leave it.  A zero-length side contributes its limit
    ``df(x) / 2``.
    """
    _check_domain(x, x - h.lA, x + h.lB, domain)
    if alpha == 1.0:
        return float(df(x))
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    c = 0.5 * (1.0 - alpha)
    total = 0.0
    for length, right in ((h.lA, False), (h.lB, True)):
        if length == 0.0:
            total += 0.5 * float(df(x))
        else:
            total += c * length ** (alpha - 1.0) * _side(df, x, length, alpha, right)
    return total


def r_rl_derivative(g: ScalarFn, dg: ScalarFn, x: float, h: Horizon, alpha: float, domain=None) -> float:
    """Riesz-type Riemann-Liouville derivative with terminals ``x-lB`` and ``x+lA``.

    Evaluated through ``RL = Caputo + terminal term``::

        1/2 G(2-a) [ lB**(a-1) RL_left(x-lB, x) - lA**(a-1) RL_right(x, x+lA) ]

    which needs the field ``g`` and its derivative ``dg``.  For ``g(s) = s``
    on a symmetric horizon this gives ``alpha``, not 1: the two terminal
    terms add ``-(1 - alpha)``.
    """
    if h.lA <= 0.0 or h.lB <= 0.0:
        raise DomainError("R-RL derivative needs lA > 0 and lB > 0")
    _check_domain(x, x - h.lB, x + h.lA, domain)
    if alpha == 1.0:
        return float(dg(x))
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    lA, lB = h.lA, h.lB
    left = g(x - lB) * lB ** (-alpha) + _side(dg, x, lB, alpha, False)
    right = g(x + lA) * lA ** (-alpha) - _side(dg, x, lA, alpha, True)
    # 1/2 G(2-a) / G(1-a) == (1-a)/2
    return 0.5 * (1.0 - alpha) * (lB ** (alpha - 1.0) * left - lA ** (alpha - 1.0) * right)


def riesz_integral(g: ScalarFn, x: float, h: Horizon, alpha: float, domain=None) -> float:
    """Two-sided Riesz fractional integral of order ``1 - alpha``.

    ``1/2 G(2-a) [ lB**(a-1) I_left(x-lB, x) - lA**(a-1) I_right(x, x+lA) ]``.
    A zero-length side contributes its limit ``+-g(x)/2``.
    """
    _check_domain(x, x - h.lB, x + h.lA, domain)
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1.0:
        # order-zero integrals reproduce g(x) on both sides and cancel
        return 0.0
    c = 0.5 * (1.0 - alpha)
    out = 0.0
    for sign, length, right in ((1.0, h.lB, False), (-1.0, h.lA, True)):
        if length == 0.0:
            out += sign * 0.5 * float(g(x))
        else:
            out += sign * c * length ** (alpha - 1.0) * _side(g, x, length, alpha, right)
    return out


# -- exact operators on polynomial fields -----------------------------------


def taylor_coefficients(coef, x):
    """Coefficients ``d_m(x)`` with ``p(s) = sum_m d_m(x) (s - x)**m``."""
    coef = np.atleast_1d(np.asarray(coef, dtype=float))
    x = np.asarray(x, dtype=float)
    out = []
    c = coef
    fact = 1.0
    for m in range(len(coef)):
        out.append(P.polyval(x, c) / fact)
        c = P.polyder(c)
        fact *= m + 1
    return out


def rc_derivative_poly(dcoef, x, lA, lB, alpha: float):
    """Exact Riesz-Caputo derivative of a field whose derivative is a polynomial.

    ``dcoef`` holds the ascending power-series coefficients of ``f'``.  ``x``,
    ``lA`` and ``lB`` broadcast.  Expanding ``f'`` about ``x`` turns every
    horizon integral into a power integral::

        D f(x) = (1-a)/2 * sum_m d_m(x) [(-lA)**m + lB**m] / (m + 1 - a)
    """
    x, lA, lB = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, lA, lB)))
    d = taylor_coefficients(dcoef, x)
    if alpha == 1.0:
        return np.array(d[0], dtype=float)
    out = np.zeros(x.shape)
    for m, dm in enumerate(d):
        out = out + dm * ((-lA) ** m + lB**m) / (m + 1.0 - alpha)
    return 0.5 * (1.0 - alpha) * out
