"""Global nonlocal derivative matrices at the Gauss points.

Row ``g`` of ``Bu`` maps ``U_g`` to the Riesz-Caputo derivative of the axial
displacement at Gauss point ``g``; ``Bw`` and ``Btheta`` do the same for the
transverse displacement and its slope.  Each row is the horizon convolution
of the local derivative rows with the attenuation function, split element by
element.  Within an element the local derivative rows are polynomials of
degree <= 2 in ``tau = s - x_left``, so every sub-interval integral is a
linear combination of the moments ``int |x-s|^-a tau^k ds``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .kernel import FracParams, horizon_lengths, moments
from .mesh import DofLayout, Mesh, QuadRule, hermite_tables, shape_hermite

_SNAP = 1e-9


@dataclass(frozen=True)
class NonlocalBasis:
    """Precomputed ``B~`` rows for every Gauss point (element-major order)."""

    mesh: Mesh
    quad: QuadRule
    fp: FracParams
    x: np.ndarray
    weights: np.ndarray
    lA: np.ndarray
    lB: np.ndarray
    n_left: np.ndarray
    n_right: np.ndarray
    Bu: np.ndarray
    Bw: np.ndarray
    Btheta: np.ndarray

    @property
    def layout(self) -> DofLayout:
        return DofLayout(self.mesh)

    @property
    def n_points(self) -> int:
        return self.x.size

    def dump_rows(self, path, which: str = "Bw", points=None) -> None:
        """Write nonzero row entries as CSV ``gauss_point, x, dof, value``."""
        B = {"Bu": self.Bu, "Bw": self.Bw, "Btheta": self.Btheta}[which]
        rows = range(self.n_points) if points is None else points
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["gauss_point", "x", "dof", "value"])
            for g in rows:
                for j in np.flatnonzero(B[g]):
                    out.writerow([g, repr(float(self.x[g])), int(j), repr(float(B[g, j]))])


def _element_counts(length, le):
    """``ceil`` and ``floor`` of ``length / le`` robust to ratios like 10.000000000000002."""
    r = np.asarray(length, dtype=float) / le
    near = np.abs(r - np.round(r)) < _SNAP
    ceil = np.where(near, np.round(r), np.ceil(r)).astype(int)
    floor = np.where(near, np.round(r), np.floor(r)).astype(int)
    return ceil, floor


def _local_basis(mesh: Mesh, quad: QuadRule, n_u: int, n_w: int):
    G = mesh.ne * quad.n
    Bu = np.zeros((G, n_u))
    Bw = np.zeros((G, n_w))
    Bt = np.zeros((G, n_w))
    le = mesh.le
    for e in range(mesh.ne):
        for q, xi in enumerate(quad.points):
            g = e * quad.n + q
            _, dH, d2H = shape_hermite(xi, le)
            Bu[g, e : e + 2] = (-1.0 / le, 1.0 / le)
            Bw[g, 2 * e : 2 * e + 4] = dH
            Bt[g, 2 * e : 2 * e + 4] = d2H
    return Bu, Bw, Bt


def _gauss_moments(x, a, b, anchor, alpha, n):
    """Moments of ``|x-s|^-a (s-anchor)^k`` by an ``n``-point Gauss rule on ``[a, b]``."""
    t, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    s = 0.5 * (a + b)[:, None] + half[:, None] * t[None, :]
    ker = np.abs(x[:, None] - s) ** (-alpha) * (half[:, None] * w[None, :])
    tau = s - anchor[:, None]
    return np.stack([np.sum(ker * tau**k, axis=1) for k in range(3)], axis=-1)


def build_basis(
    mesh: Mesh,
    layout: DofLayout | None,
    quad: QuadRule,
    fp: FracParams,
    *,
    strict_floor: bool = False,
    horizon_gauss: int | None = None,
) -> NonlocalBasis:
    """Assemble ``Bu``, ``Bw`` and ``Btheta`` for every Gauss point.

    Parameters
    ----------
    mesh, layout, quad
        Discretization; ``layout`` defaults to ``DofLayout(mesh)``.
    fp
        Fractional order and horizon length.
    strict_floor
        Integrate over whole elements exactly as counted by
        ``ceil(lA/le)`` (left, from the start of the host element) and
        ``floor(lB/le)`` (right, from the end of the host element) instead of
        the exact horizon ``[x-lA, x+lB]``.  Breaks affine exactness; kept to
        study the coarse-mesh behaviour of the literal element counting.
    horizon_gauss
        If given, elements not containing the Gauss point are integrated
        with this many Gauss-Legendre points instead of exact moments.

    Returns
    -------
    NonlocalBasis
    """
    layout = layout or DofLayout(mesh)
    if layout.mesh != mesh:
        raise ConfigError("layout belongs to a different mesh")
    le, L, alpha = mesh.le, mesh.L, fp.alpha
    x, wts = mesh.gauss_points(quad)
    host = np.repeat(np.arange(mesh.ne), quad.n)
    lA, lB = horizon_lengths(x, fp.lf, L)
    n_left, n_right = _element_counts(lA, le)[0], _element_counts(lB, le)[1]
    if np.any((n_left == 0) & (n_right == 0)) and strict_floor:
        raise ConfigError("horizon spans no complete element on either side")

    if fp.is_local:
        Bu, Bw, Bt = _local_basis(mesh, quad, layout.n_u, layout.n_w)
        return NonlocalBasis(mesh, quad, fp, x, wts, lA, lB, n_left, n_right, Bu, Bw, Bt)

    if strict_floor:
        x_host = host * le
        lo = np.maximum(0.0, x_host - n_left * le)
        hi = np.minimum(L, x_host + np.maximum(1, n_right) * le)
    else:
        lo, hi = x - lA, x + lB

    # every (gauss point, element) pair overlapping [lo, hi]
    e_lo = np.clip(np.floor(lo / le + _SNAP).astype(int), 0, mesh.ne - 1)
    e_hi = np.clip(np.ceil(hi / le - _SNAP).astype(int) - 1, 0, mesh.ne - 1)
    counts = e_hi - e_lo + 1
    g = np.repeat(np.arange(x.size), counts)
    e = np.repeat(e_lo - np.cumsum(counts) + counts, counts) + np.arange(counts.sum())
    xg = x[g]
    x0 = e * le
    x1 = x0 + le

    dH, d2H = hermite_tables(le)
    c = 0.5 * (1.0 - alpha)
    Bu = np.zeros((x.size, layout.n_u))
    Bw = np.zeros((x.size, layout.n_w))
    Bt = np.zeros((x.size, layout.n_w))

    sides = (
        (np.maximum(x0, lo[g]), np.minimum(x1, xg), lA[g]),
        (np.maximum(x0, xg), np.minimum(x1, hi[g]), lB[g]),
    )
    for a, b, length in sides:
        keep = b > a
        gk, ek, xk, ak, bk, x0k = g[keep], e[keep], xg[keep], a[keep], b[keep], x0[keep]
        M = moments(xk, ak, bk, x0k, alpha, 2)
        if horizon_gauss is not None:
            far = ek != host[gk]
            if np.any(far):
                M[far] = _gauss_moments(xk[far], ak[far], bk[far], x0k[far], alpha, horizon_gauss)
        M = M * (c * length[keep] ** (alpha - 1.0))[:, None]
        np.add.at(Bu, (gk, ek), -M[:, 0] / le)
        np.add.at(Bu, (gk, ek + 1), M[:, 0] / le)
        cw = M @ dH.T
        ct = M[:, :2] @ d2H.T
        for j in range(4):
            np.add.at(Bw, (gk, 2 * ek + j), cw[:, j])
            np.add.at(Bt, (gk, 2 * ek + j), ct[:, j])
    return NonlocalBasis(mesh, quad, fp, x, wts, lA, lB, n_left, n_right, Bu, Bw, Bt)


def frac_values(basis: NonlocalBasis, X):
    """Fractional derivatives ``(Du, Dw, Dtheta)`` at every Gauss point for state ``X``."""
    U, W = basis.layout.split(X)
    return basis.Bu @ U, basis.Bw @ W, basis.Btheta @ W


def default_mesh_size(L: float, lf: float, n_inf: int) -> int:
    """Element count giving ``n_inf`` elements per horizon length."""
    ne = n_inf * L / lf
    if abs(ne - round(ne)) > 1e-9 * ne:
        raise DomainError(f"L/lf * n_inf = {ne} is not an integer")
    return int(round(ne))


__all__ = ["NonlocalBasis", "build_basis", "frac_values", "default_mesh_size"]
