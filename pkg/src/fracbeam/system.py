"""Stiffness blocks, loads, residual and tangent of the fractional von Karman beam.

With ``Du, Dw, Dt`` the fractional derivatives of ``u0``, ``w0`` and the
slope at the Gauss points, the axial force and bending moment are::

    N = A11 (Du + Dw**2 / 2)        M = -D11 Dt

and the internal force vector is ``[Bu^T N ; Bw^T (N Dw) + D11 Bt^T Dt]``
integrated by the Gauss rule.  All matrices are dense.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .basis import NonlocalBasis
from .errors import ConfigError, DomainError
from .mesh import DofLayout, Mesh, QuadRule, shape_hermite, shape_lagrange


@dataclass(frozen=True)
class SectionProps:
    """Rectangular section of width ``b`` and depth ``h`` made of modulus ``E``."""

    E: float
    b: float
    h: float

    def __post_init__(self):
        if min(self.E, self.b, self.h) <= 0.0:
            raise ConfigError("E, b and h must be positive")

    @property
    def A11(self) -> float:
        return self.E * self.b * self.h

    @property
    def D11(self) -> float:
        return self.E * self.b * self.h**3 / 12.0


class BCKind(enum.Enum):
    CLAMPED = "clamped"
    PINNED = "pinned"

    @classmethod
    def parse(cls, value) -> "BCKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {
            "clamped": cls.CLAMPED,
            "clamped-clamped": cls.CLAMPED,
            "cc": cls.CLAMPED,
            "pinned": cls.PINNED,
            "pinned-pinned": cls.PINNED,
            "pp": cls.PINNED,
            "ss": cls.PINNED,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ConfigError(f"unknown boundary condition {value!r}") from None


Field = Union[Callable[[np.ndarray], np.ndarray], np.ndarray, None]


@dataclass(frozen=True)
class LoadSpec:
    """Transverse load plus an optional distributed axial load.

    ``kind`` is ``"udl"`` (``magnitude`` in N/m), ``"point"`` (``magnitude``
    in N at ``location``) or ``"sampled"`` (``transverse`` holds values in N/m
    at the Gauss points, or a callable of position).  ``axial`` is likewise a
    callable or an array of Gauss-point samples.  ``points`` adds transverse
    point loads as ``(location, force)`` pairs to any kind.
    """

    kind: str = "udl"
    magnitude: float = 0.0
    location: float | None = None
    transverse: Field = None
    axial: Field = None
    points: tuple = ()

    def __post_init__(self):
        if self.kind not in ("udl", "point", "sampled"):
            raise ConfigError(f"unknown load kind {self.kind!r}")
        if self.kind == "point" and self.location is None:
            raise ConfigError("point load needs a location")
        if self.kind == "sampled" and self.transverse is None:
            raise ConfigError("sampled load needs transverse samples")

    def scaled(self, factor: float) -> "LoadSpec":
        def sc(f):
            if f is None:
                return None
            if callable(f):
                return lambda x: factor * np.asarray(f(x))
            return factor * np.asarray(f)

        return LoadSpec(
            self.kind,
            factor * self.magnitude,
            self.location,
            sc(self.transverse),
            sc(self.axial),
            tuple((x, factor * P) for x, P in self.points),
        )


def _sample(field, x):
    if field is None:
        return np.zeros_like(x)
    if callable(field):
        return np.broadcast_to(np.asarray(field(x), dtype=float), x.shape).copy()
    arr = np.asarray(field, dtype=float)
    if arr.shape != x.shape:
        raise DomainError(f"load samples have shape {arr.shape}, expected {x.shape}")
    return arr


def assemble_forces(mesh: Mesh, layout: DofLayout, quad: QuadRule, load: LoadSpec):
    """Consistent nodal force vectors ``(F_A, F_T)``."""
    F_A = np.zeros(layout.n_u)
    F_T = np.zeros(layout.n_w)
    le = mesh.le
    x, w = mesh.gauss_points(quad)
    fa = _sample(load.axial, x) * w
    if load.kind == "udl":
        ft = np.full_like(x, load.magnitude) * w
    elif load.kind == "sampled":
        ft = _sample(load.transverse, x) * w
    else:
        ft = np.zeros_like(x)
    for q, xi in enumerate(quad.points):
        N, _ = shape_lagrange(xi, le)
        H, _, _ = shape_hermite(xi, le)
        for e in range(mesh.ne):
            g = e * quad.n + q
            F_A[e : e + 2] += fa[g] * N
            F_T[2 * e : 2 * e + 4] += ft[g] * H
    points = list(load.points)
    if load.kind == "point":
        points.append((load.location, load.magnitude))
    for xp, P in points:
        e, xi = mesh.locate(xp)
        H, _, _ = shape_hermite(xi, le)
        F_T[2 * e : 2 * e + 4] += P * H
    return F_A, F_T


def force_vector(mesh, layout, quad, load) -> np.ndarray:
    """``F = [F_A ; F_T]`` in the global DOF order."""
    return np.concatenate(assemble_forces(mesh, layout, quad, load))


@dataclass(frozen=True)
class AssembledSystem:
    K11: np.ndarray
    K12: np.ndarray
    K21: np.ndarray
    K22: np.ndarray
    K_T: np.ndarray
    F: np.ndarray
    R: np.ndarray

    @property
    def K_S(self) -> np.ndarray:
        return np.block([[self.K11, self.K12], [self.K21, self.K22]])


def _gram(B, d, C=None):
    """``B^T diag(d) C`` (``C`` defaults to ``B``)."""
    C = B if C is None else C
    return (B.T * d) @ C


def resultants(basis: NonlocalBasis, sec: SectionProps, X, nonlinear: bool = True):
    """Axial force ``N`` and bending moment ``M`` at the Gauss points."""
    U, W = basis.layout.split(X)
    Du = basis.Bu @ U
    Dw = basis.Bw @ W if nonlinear else np.zeros(basis.n_points)
    N = sec.A11 * (Du + 0.5 * Dw**2)
    M = -sec.D11 * (basis.Btheta @ W)
    return N, M


def assemble_stiffness(basis: NonlocalBasis, sec: SectionProps, X, nonlinear: bool = True):
    """Secant blocks ``(K11, K12, K21, K22)`` at state ``X``.

    ``nonlinear=False`` drops every term carrying ``Dw`` (linearized model).
    """
    _, W = basis.layout.split(X)
    wt = basis.weights
    Dw = basis.Bw @ W if nonlinear else np.zeros(basis.n_points)
    K11 = _gram(basis.Bu, wt * sec.A11)
    K21 = _gram(basis.Bw, wt * sec.A11 * Dw, basis.Bu)
    K12 = 0.5 * K21.T
    K22 = _gram(basis.Btheta, wt * sec.D11) + 0.5 * _gram(basis.Bw, wt * sec.A11 * Dw**2)
    return K11, K12, K21, K22


def internal_force(basis: NonlocalBasis, sec: SectionProps, X, nonlinear: bool = True) -> np.ndarray:
    """``K_S(X) X`` evaluated directly from the stress resultants."""
    U, W = basis.layout.split(X)
    wt = basis.weights
    N, _ = resultants(basis, sec, X, nonlinear)
    Dw = basis.Bw @ W if nonlinear else 0.0
    Ru = basis.Bu.T @ (wt * N)
    Rw = basis.Bw.T @ (wt * N * Dw) + basis.Btheta.T @ (wt * sec.D11 * (basis.Btheta @ W))
    return np.concatenate([Ru, Rw])


def residual(basis: NonlocalBasis, sec: SectionProps, X, F, nonlinear: bool = True) -> np.ndarray:
    """``R = K_S(X) X - F`` over all DOFs; restrict with :func:`free_dofs`."""
    F = np.asarray(F, dtype=float)
    if F.shape != (basis.layout.n_dof,):
        raise DomainError("force vector has the wrong length")
    return internal_force(basis, sec, X, nonlinear) - F


def tangent_stiffness(basis: NonlocalBasis, sec: SectionProps, X, nonlinear: bool = True) -> np.ndarray:
    """Analytic Jacobian ``dR/dX``; symmetric."""
    U, W = basis.layout.split(X)
    wt = basis.weights
    K11 = _gram(basis.Bu, wt * sec.A11)
    bend = _gram(basis.Btheta, wt * sec.D11)
    if not nonlinear:
        n_u, n_w = basis.layout.n_u, basis.layout.n_w
        return np.block([[K11, np.zeros((n_u, n_w))], [np.zeros((n_w, n_u)), bend]])
    Du = basis.Bu @ U
    Dw = basis.Bw @ W
    K21 = _gram(basis.Bw, wt * sec.A11 * Dw, basis.Bu)
    K22 = bend + _gram(basis.Bw, wt * sec.A11 * (Du + 1.5 * Dw**2))
    return np.block([[K11, K21.T], [K21, K22]])


def assemble_system(basis, sec, X, F, nonlinear: bool = True) -> AssembledSystem:
    K11, K12, K21, K22 = assemble_stiffness(basis, sec, X, nonlinear)
    return AssembledSystem(
        K11,
        K12,
        K21,
        K22,
        tangent_stiffness(basis, sec, X, nonlinear),
        np.asarray(F, dtype=float),
        residual(basis, sec, X, F, nonlinear),
    )


def constrained_dofs(layout: DofLayout, bc) -> np.ndarray:
    """Global indices fixed by the boundary condition (ends are immovable axially)."""
    bc = BCKind.parse(bc)
    n = layout.mesh.ne
    u = [0, n]
    w = [layout.n_u + 0, layout.n_u + 2 * n]
    if bc is BCKind.CLAMPED:
        w += [layout.n_u + 1, layout.n_u + 2 * n + 1]
    return np.array(sorted(u + w))


def free_dofs(layout: DofLayout, bc) -> np.ndarray:
    return np.setdiff1d(np.arange(layout.n_dof), constrained_dofs(layout, bc))


def apply_bcs(system: AssembledSystem, layout: DofLayout, bc):
    """Reduced ``(K_T, R, free)`` after eliminating the constrained DOFs."""
    free = free_dofs(layout, bc)
    return system.K_T[np.ix_(free, free)], system.R[free], free
