"""Integer-order von Karman beam FEM used as an independent reference.

Element-by-element assembly with per-node DOFs ``(u, w, w')``; it shares
only the Newton-Raphson driver with the fractional solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import BeamConfig, SolverControls
from ..solver import StepResult, load_stepping
from ..system import BCKind


def _element_tables(le: float, ngp: int):
    xi, wq = np.polynomial.legendre.leggauss(ngp)
    J = le / 2.0
    dN = np.tile([-1.0 / le, 1.0 / le], (ngp, 1))
    dH = np.column_stack(
        [
            1.5 * (xi**2 - 1.0) / le,
            0.25 * (3.0 * xi**2 - 2.0 * xi - 1.0),
            1.5 * (1.0 - xi**2) / le,
            0.25 * (3.0 * xi**2 + 2.0 * xi - 1.0),
        ]
    )
    d2H = np.column_stack(
        [
            6.0 * xi / le**2,
            (3.0 * xi - 1.0) / le,
            -6.0 * xi / le**2,
            (3.0 * xi + 1.0) / le,
        ]
    )
    return wq * J, dN, dH, d2H


@dataclass
class ClassicalBeam:
    """Clamped or pinned (immovable) beam under a UDL ``q`` or a point load ``P``."""

    L: float
    ne: int
    EA: float
    EI: float
    bc: BCKind = BCKind.CLAMPED
    ngp: int = 4
    nonlinear: bool = True

    def __post_init__(self):
        self.bc = BCKind.parse(self.bc)
        self.le = self.L / self.ne
        self.n_dof = 3 * (self.ne + 1)
        self._tables = _element_tables(self.le, self.ngp)

    def _dofs(self, e):
        # u_e, u_e+1 then w_e, t_e, w_e+1, t_e+1
        return np.array([3 * e, 3 * e + 3, 3 * e + 1, 3 * e + 2, 3 * e + 4, 3 * e + 5])

    @property
    def _all_dofs(self) -> np.ndarray:
        return np.stack([self._dofs(e) for e in range(self.ne)])

    def _elements(self, X):
        """Element force vectors ``(ne, 6)`` and tangents ``(ne, 6, 6)``."""
        wq, dN, dH, d2H = self._tables
        xe = X[self._all_dofs]
        du = xe[:, :2] @ dN.T
        dw = xe[:, 2:] @ dH.T if self.nonlinear else np.zeros((self.ne, len(wq)))
        k2 = xe[:, 2:] @ d2H.T
        Nf = self.EA * (du + 0.5 * dw**2)
        f = np.concatenate(
            [
                np.einsum("q,qi,eq->ei", wq, dN, Nf),
                np.einsum("q,qi,eq->ei", wq, dH, Nf * dw) + self.EI * np.einsum("q,qi,eq->ei", wq, d2H, k2),
            ],
            axis=1,
        )
        K = np.zeros((self.ne, 6, 6))
        K[:, :2, :2] = self.EA * np.einsum("q,qi,qj->ij", wq, dN, dN)
        K[:, :2, 2:] = self.EA * np.einsum("q,eq,qi,qj->eij", wq, dw, dN, dH)
        K[:, 2:, :2] = np.transpose(K[:, :2, 2:], (0, 2, 1))
        K[:, 2:, 2:] = self.EI * np.einsum("q,qi,qj->ij", wq, d2H, d2H) + self.EA * np.einsum(
            "q,eq,qi,qj->eij", wq, du + 1.5 * dw**2, dH, dH
        )
        return f, K

    def internal(self, X):
        F = np.zeros(self.n_dof)
        np.add.at(F, self._all_dofs, self._elements(X)[0])
        return F

    def tangent(self, X):
        K = np.zeros((self.n_dof, self.n_dof))
        d = self._all_dofs
        np.add.at(K, (d[:, :, None], d[:, None, :]), self._elements(X)[1])
        return K

    def udl(self, q: float) -> np.ndarray:
        F = np.zeros(self.n_dof)
        le = self.le
        for e in range(self.ne):
            F[self._dofs(e)[2:]] += q * np.array([le / 2.0, le**2 / 12.0, le / 2.0, -(le**2) / 12.0])
        return F

    def point(self, P: float, x: float) -> np.ndarray:
        F = np.zeros(self.n_dof)
        e = min(int(x // self.le), self.ne - 1)
        t = (x - e * self.le) / self.le
        H = np.array([1 - 3 * t**2 + 2 * t**3, self.le * (t - 2 * t**2 + t**3), 3 * t**2 - 2 * t**3, self.le * (t**3 - t**2)])
        F[self._dofs(e)[2:]] += P * H
        return F

    def free(self) -> np.ndarray:
        last = 3 * self.ne
        fixed = [0, 1, last, last + 1]
        if self.bc is BCKind.CLAMPED:
            fixed += [2, last + 2]
        return np.setdiff1d(np.arange(self.n_dof), fixed)

    def solve(self, F, controls: SolverControls | None = None):
        return load_stepping(self.internal, self.tangent, F, self.free(), controls or SolverControls())

    def deflection(self, X, x: float) -> float:
        e = min(int(x // self.le), self.ne - 1)
        t = (x - e * self.le) / self.le
        H = np.array([1 - 3 * t**2 + 2 * t**3, self.le * (t - 2 * t**2 + t**3), 3 * t**2 - 2 * t**3, self.le * (t**3 - t**2)])
        return float(H @ X[self._dofs(e)[2:]])


def classical_oracle(config: BeamConfig, ne: int | None = None) -> tuple[ClassicalBeam, list[StepResult]]:
    """Integer-order reference run for ``config`` (its fractional parameters are ignored)."""
    sec = config.section
    beam = ClassicalBeam(config.L, ne or config.n_elements, sec.A11, sec.D11, config.bc, config.ngp, config.nonlinear)
    if config.load_kind == "point":
        F = beam.point(config.load_si, config.location_ratio * config.L)
    else:
        F = beam.udl(config.load_si)
    return beam, beam.solve(F, config.controls)


def classical_w_bar(config: BeamConfig, ne: int | None = None) -> np.ndarray:
    """Midspan ``w / h`` of the reference run at every load step."""
    beam, steps = classical_oracle(config, ne)
    return np.array([beam.deflection(s.X, 0.5 * config.L) / config.h for s in steps])


def linear_midspan(config: BeamConfig) -> float:
    """Closed-form small-deflection midspan ``w`` for a UDL or a central point load."""
    q, L, EI = config.load_si, config.L, config.section.D11
    clamped = config.bc is BCKind.CLAMPED
    if config.load_kind == "udl":
        return q * L**4 / (384.0 * EI) * (1.0 if clamped else 5.0)
    if abs(config.location_ratio - 0.5) > 1e-12:
        raise ValueError("closed form only for a central point load")
    return q * L**3 / (192.0 * EI) * (1.0 if clamped else 4.0)
