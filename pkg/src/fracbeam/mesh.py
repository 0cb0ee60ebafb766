"""Uniform 1D mesh, Lagrange/Hermite shape functions and DOF bookkeeping.

Global DOF vector ``X = [U_g, W_g]`` with ``U_g = (u_0 .. u_Ne)`` and
``W_g = (w_0, w'_0, w_1, w'_1, ...)``; slopes are stored in physical units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, DomainError

# Derivative coefficient tables in the local coordinate tau = s - x_left,
# columns are powers tau**0, tau**1, tau**2 (rows: H1..H4).  ``h`` is the
# element length; the tables are built per mesh in :func:`hermite_tables`.


def hermite_tables(h: float):
    """Polynomial coefficients of ``dH/ds`` (4x3) and ``d2H/ds2`` (4x2) in ``tau``."""
    dH = np.array(
        [
            [0.0, -6.0 / h**2, 6.0 / h**3],
            [1.0, -4.0 / h, 3.0 / h**2],
            [0.0, 6.0 / h**2, -6.0 / h**3],
            [0.0, -2.0 / h, 3.0 / h**2],
        ]
    )
    d2H = np.array(
        [
            [-6.0 / h**2, 12.0 / h**3],
            [-4.0 / h, 6.0 / h**2],
            [6.0 / h**2, -12.0 / h**3],
            [-2.0 / h, 6.0 / h**2],
        ]
    )
    return dH, d2H


def shape_lagrange(xi: float, le: float):
    """Linear Lagrange values and physical derivatives at natural coordinate ``xi``."""
    N = np.array([0.5 * (1.0 - xi), 0.5 * (1.0 + xi)])
    dN = np.array([-1.0 / le, 1.0 / le])
    return N, dN


def shape_hermite(xi: float, le: float):
    """Cubic Hermite values, first and second physical derivatives.

    Slope DOFs are physical slopes, so ``H2`` and ``H4`` carry a factor
    ``le / 2`` relative to the natural-coordinate basis.
    """
    J = 0.5 * le
    H = np.array(
        [
            0.25 * (1.0 - xi) ** 2 * (2.0 + xi),
            J * 0.25 * (1.0 - xi) ** 2 * (1.0 + xi),
            0.25 * (1.0 + xi) ** 2 * (2.0 - xi),
            J * 0.25 * (1.0 + xi) ** 2 * (xi - 1.0),
        ]
    )
    dH = np.array(
        [
            0.75 * (xi**2 - 1.0) / J,
            0.25 * (3.0 * xi**2 - 2.0 * xi - 1.0),
            0.75 * (1.0 - xi**2) / J,
            0.25 * (3.0 * xi**2 + 2.0 * xi - 1.0),
        ]
    )
    d2H = np.array(
        [
            1.5 * xi / J**2,
            0.5 * (3.0 * xi - 1.0) / J,
            -1.5 * xi / J**2,
            0.5 * (3.0 * xi + 1.0) / J,
        ]
    )
    return H, dH, d2H


@dataclass(frozen=True)
class QuadRule:
    """Gauss-Legendre rule on ``[-1, 1]``."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("quadrature needs at least one point")

    @cached_property
    def _rule(self):
        return np.polynomial.legendre.leggauss(self.n)

    @property
    def points(self) -> np.ndarray:
        return self._rule[0]

    @property
    def weights(self) -> np.ndarray:
        return self._rule[1]


@dataclass(frozen=True)
class Mesh:
    """Uniform mesh of ``ne`` two-noded elements on ``[0, L]``."""

    L: float
    ne: int

    def __post_init__(self):
        if self.L <= 0.0:
            raise ConfigError("beam length must be positive")
        if self.ne < 2:
            raise ConfigError("mesh needs at least two elements")

    @property
    def le(self) -> float:
        return self.L / self.ne

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.ne + 1)

    @property
    def n_nodes(self) -> int:
        return self.ne + 1

    def locate(self, s: float):
        """Element index and natural coordinate of ``s``; nodes belong to the element on their right."""
        tol = 1e-12 * self.L
        if s < -tol or s > self.L + tol:
            raise DomainError(f"s={s} lies outside [0, {self.L}]")
        r = max(s, 0.0) / self.le
        if abs(r - round(r)) < 1e-9:
            r = round(r)  # nodes hit through roundoff, e.g. 0.3 / 0.1
        e = min(int(math.floor(r)), self.ne - 1)
        x0 = e * self.le
        xi = 2.0 * (s - x0) / self.le - 1.0
        return e, min(max(xi, -1.0), 1.0)

    def gauss_points(self, quad: QuadRule):
        """Physical Gauss points (element-major) and their weights times Jacobian."""
        J = 0.5 * self.le
        left = self.nodes[:-1, None]
        x = left + J * (1.0 + quad.points[None, :])
        w = np.broadcast_to(J * quad.weights, x.shape)
        return x.ravel(), np.ascontiguousarray(w).ravel()

    def interpolate_w(self, W, s: float) -> float:
        """Transverse displacement of the Hermite interpolant of ``W_g`` at ``s``."""
        e, xi = self.locate(s)
        H, _, _ = shape_hermite(xi, self.le)
        return float(H @ np.asarray(W)[2 * e : 2 * e + 4])

    def interpolate_u(self, U, s: float) -> float:
        e, xi = self.locate(s)
        N, _ = shape_lagrange(xi, self.le)
        return float(N @ np.asarray(U)[e : e + 2])


@dataclass(frozen=True)
class DofLayout:
    """Index maps between element-local vectors and the global state ``X``.

    ``U_g`` occupies ``X[:n_u]`` and ``W_g`` occupies ``X[n_u:]``.
    """

    mesh: Mesh

    @property
    def n_u(self) -> int:
        return self.mesh.ne + 1

    @property
    def n_w(self) -> int:
        return 2 * (self.mesh.ne + 1)

    @property
    def n_dof(self) -> int:
        return self.n_u + self.n_w

    def u_local(self, e: int) -> np.ndarray:
        """Indices of element ``e``'s axial DOFs within ``U_g``."""
        return np.array([e, e + 1])

    def w_local(self, e: int) -> np.ndarray:
        """Indices of element ``e``'s transverse DOFs within ``W_g``."""
        return np.arange(2 * e, 2 * e + 4)

    def element_dofs(self, e: int) -> np.ndarray:
        """Global indices in ``X`` of all six DOFs of element ``e``."""
        return np.concatenate([self.u_local(e), self.n_u + self.w_local(e)])

    def split(self, X):
        X = np.asarray(X, dtype=float)
        if X.shape != (self.n_dof,):
            raise DomainError(f"state has shape {X.shape}, expected ({self.n_dof},)")
        return X[: self.n_u], X[self.n_u :]

    def join(self, U, W) -> np.ndarray:
        U = np.asarray(U, dtype=float)
        W = np.asarray(W, dtype=float)
        if U.shape != (self.n_u,) or W.shape != (self.n_w,):
            raise DomainError("U_g or W_g has the wrong length")
        return np.concatenate([U, W])

    def gather(self, X, e: int) -> np.ndarray:
        return np.asarray(X)[self.element_dofs(e)]

    def scatter_add(self, X, e: int, values) -> None:
        np.add.at(X, self.element_dofs(e), values)

    def nodal_state(self, u, w, dw) -> np.ndarray:
        """State ``X`` interpolating the callables ``u``, ``w`` and slope ``dw``."""
        x = self.mesh.nodes
        W = np.empty(self.n_w)
        W[0::2] = [w(xi) for xi in x]
        W[1::2] = [dw(xi) for xi in x]
        return self.join([u(xi) for xi in x], W)
