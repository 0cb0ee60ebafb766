r"""Distributed loads that make an assumed displacement field an exact solution.

For the clamped beam the weak form

.. math::

    \int N\,D\delta u + N D w\,D\delta w - M\,D\delta\theta \,dx
    = \int F_a\,\delta u + F_t\,\delta w \,dx

is turned into a strong form with the adjoint of the Riesz-Caputo operator.
Writing :math:`\int g\,D\phi\,dx = \int \phi'(s)\,G_g(s)\,ds` with

.. math::

    G_g(s) = \tfrac{1-\alpha}{2}\Big[\int_{s-l_f}^{s} l_B(x)^{\alpha-1}
             \frac{g(x)}{(s-x)^\alpha}dx
           + \int_{s}^{s+l_f} l_A(x)^{\alpha-1}\frac{g(x)}{(x-s)^\alpha}dx\Big]

(limits clipped to the beam), integration by parts gives
``F_a = -G_N'`` and ``F_t = -G_M'' - G_{N Dw}'``.

Horizon truncation makes ``G_M'`` jump at ``s = lf`` and ``s = L - lf`` by
``-(1-a)/2 M(0)/lf`` and ``-(1-a)/2 M(L)/lf``, so ``-G_M''`` also holds two
point loads.  :func:`manufactured_loads` returns only the distributed part;
:func:`kink_point_loads` supplies the concentrated part.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from ..errors import DomainError
from ..kernel import FracParams, horizon_lengths, rc_derivative_poly
from ..mesh import Mesh, QuadRule
from ..system import LoadSpec, SectionProps

_GRADING = 4.0 ** np.arange(10)


@dataclass(frozen=True)
class ManufacturedCase:
    """``u0 = U0 (1 - x/L)(x/L)`` and ``w0 = W0 (1 - x/L)^2 (x/L)^2``."""

    U0: float
    W0: float
    L: float = 1.0

    @property
    def u_coef(self) -> np.ndarray:
        return self.U0 * np.array([0.0, 1.0 / self.L, -1.0 / self.L**2])

    @property
    def w_coef(self) -> np.ndarray:
        L = self.L
        return self.W0 * np.array([0.0, 0.0, 1.0 / L**2, -2.0 / L**3, 1.0 / L**4])

    def u(self, x):
        return P.polyval(x, self.u_coef)

    def w(self, x):
        return P.polyval(x, self.w_coef)

    def dw(self, x):
        return P.polyval(x, P.polyder(self.w_coef))


class FieldResultants:
    """Exact fractional strains and resultants of a manufactured field at any ``x``."""

    def __init__(self, case: ManufacturedCase, sec: SectionProps, fp: FracParams):
        self.case, self.sec, self.fp = case, sec, fp
        self._du = P.polyder(case.u_coef)
        self._dw = P.polyder(case.w_coef)
        self._d2w = P.polyder(case.w_coef, 2)

    def derivatives(self, x):
        x = np.asarray(x, dtype=float)
        lA, lB = horizon_lengths(x, self.fp.lf, self.case.L)
        a = self.fp.alpha
        return (
            rc_derivative_poly(self._du, x, lA, lB, a),
            rc_derivative_poly(self._dw, x, lA, lB, a),
            rc_derivative_poly(self._d2w, x, lA, lB, a),
        )

    def N(self, x):
        Du, Dw, _ = self.derivatives(x)
        return self.sec.A11 * (Du + 0.5 * Dw**2)

    def M(self, x):
        return -self.sec.D11 * self.derivatives(x)[2]

    def NDw(self, x):
        Du, Dw, _ = self.derivatives(x)
        return self.sec.A11 * (Du + 0.5 * Dw**2) * Dw


def _side_integral(g, s, lf, L, alpha, right: bool, n: int):
    """``int_0^Y l(x)^(a-1) g(x) y^-a dy`` times ``(1-a)`` with ``x = s -+ y``."""
    s = np.asarray(s, dtype=float)
    if right:
        Y = np.minimum(L - s, lf)
        near = s  # lA(x) = x vanishes at distance s
        kinks = np.stack([lf - s, L - lf - s], axis=-1)
    else:
        Y = np.minimum(s, lf)
        near = L - s
        kinks = np.stack([s - lf, s - (L - lf)], axis=-1)
    bp = np.concatenate([np.zeros(s.shape + (1,)), near[..., None] * _GRADING, kinks, Y[..., None]], axis=-1)
    bp = np.sort(np.clip(bp, 0.0, Y[..., None]), axis=-1)
    p = 1.0 - alpha
    ub = bp**p
    t, wq = np.polynomial.legendre.leggauss(n)
    lo, hi = ub[..., :-1, None], ub[..., 1:, None]
    u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t
    y = u ** (1.0 / p)
    x = s[..., None, None] + y if right else s[..., None, None] - y
    x = np.clip(x, 0.0, L)
    lA, lB = horizon_lengths(x, lf, L)
    length = lA if right else lB
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(length > 0.0, length ** (alpha - 1.0), 0.0) * g(x)
    return np.sum(0.5 * (hi - lo) * wq * f, axis=(-2, -1))


def adjoint_integral(g, s, lf: float, L: float, alpha: float, n: int = 24):
    """``G_g(s)``: adjoint of the Riesz-Caputo operator applied to ``g``."""
    if alpha == 1.0:
        return np.asarray(g(np.asarray(s, dtype=float)), dtype=float)
    # (1-a)/2 * 1/(1-a) from the substitution u = y^(1-a)
    return 0.5 * (
        _side_integral(g, s, lf, L, alpha, False, n) + _side_integral(g, s, lf, L, alpha, True, n)
    )


def _fd_steps(s, lf, L):
    kinks = np.array([0.0, lf, 2 * lf, L - 2 * lf, L - lf, L])
    dist = np.min(np.abs(np.asarray(s)[..., None] - kinks), axis=-1)
    if np.any(dist <= 0.0):
        raise DomainError("derivative requested at a point where G is not smooth")
    return np.minimum(1e-3 * L, 0.1 * dist)


def adjoint_derivatives(g, s, lf: float, L: float, alpha: float, n: int = 24):
    """First and second derivatives of ``G_g`` by 4th-order central differences."""
    s = np.asarray(s, dtype=float)
    h = _fd_steps(s, lf, L)
    G = [adjoint_integral(g, s + k * h, lf, L, alpha, n) for k in (-2, -1, 0, 1, 2)]
    d1 = (G[0] - 8.0 * G[1] + 8.0 * G[3] - G[4]) / (12.0 * h)
    d2 = (-G[0] + 16.0 * G[1] - 30.0 * G[2] + 16.0 * G[3] - G[4]) / (12.0 * h**2)
    return d1, d2


def classical_loads(case: ManufacturedCase, sec: SectionProps, x):
    """Integer-order strong-form loads ``(-N', D11 w'''' - (N w')')``."""
    du = P.polyder(case.u_coef)
    dw = P.polyder(case.w_coef)
    N = sec.A11 * P.polyadd(du, 0.5 * P.polymul(dw, dw))
    Fa = -P.polyval(x, P.polyder(N))
    Ft = sec.D11 * P.polyval(x, P.polyder(case.w_coef, 4)) - P.polyval(x, P.polyder(P.polymul(N, dw)))
    return Fa, Ft


def manufactured_loads(case: ManufacturedCase, sec: SectionProps, fp: FracParams, mesh: Mesh, quad: QuadRule | None = None):
    """Loads ``(x, F_a, F_t)`` sampled at the Gauss points of ``mesh``."""
    quad = quad or QuadRule(4)
    if abs(case.L - mesh.L) > 1e-12 * mesh.L:
        raise DomainError("manufactured case and mesh have different lengths")
    x, _ = mesh.gauss_points(quad)
    if fp.is_local:
        Fa, Ft = classical_loads(case, sec, x)
        return x, Fa, Ft
    res = FieldResultants(case, sec, fp)
    a, lf, L = fp.alpha, fp.lf, mesh.L
    dN, _ = adjoint_derivatives(res.N, x, lf, L, a)
    _, d2M = adjoint_derivatives(res.M, x, lf, L, a)
    dQ, _ = adjoint_derivatives(res.NDw, x, lf, L, a)
    return x, -dN, -d2M - dQ


def kink_point_loads(case: ManufacturedCase, sec: SectionProps, fp: FracParams):
    """Transverse point loads ``((lf, P0), (L - lf, P1))`` from the jumps of ``G_M'``."""
    if fp.is_local or fp.lf >= 0.5 * case.L:
        return ()
    res = FieldResultants(case, sec, fp)
    c = 0.5 * (1.0 - fp.alpha) / fp.lf
    M0, M1 = res.M(np.array([0.0, case.L]))
    return ((fp.lf, c * float(M0)), (case.L - fp.lf, c * float(M1)))


def manufactured_load_spec(case, sec, fp, mesh, quad=None, *, point_loads: bool = False) -> LoadSpec:
    """:class:`LoadSpec` for the manufactured case, optionally with the kink point loads."""
    _, Fa, Ft = manufactured_loads(case, sec, fp, mesh, quad)
    pts = kink_point_loads(case, sec, fp) if point_loads else ()
    return LoadSpec("sampled", transverse=Ft, axial=Fa, points=pts)
