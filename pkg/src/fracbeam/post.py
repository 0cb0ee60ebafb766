"""Strains, stresses, nondimensional outputs and CSV emission."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import BeamConfig
from .kernel import Horizon, riesz_integral
from .solver import SolutionRecord
from .system import resultants


@dataclass(frozen=True)
class StressProfile:
    """Axial stress through the thickness at the Gauss point ``x`` nearest the request."""

    x: float
    x3: np.ndarray
    sigma: np.ndarray
    eps0: float
    kappa: float
    N: float
    M: float


def stress_profile(sol: SolutionRecord, x1: float, n: int = 21, X=None) -> StressProfile:
    """Sample ``sigma11 = E (eps0 + x3 kappa)`` across the depth at ``x1``.

    ``eps0 = Du + Dw**2 / 2`` and ``kappa = -Dtheta`` are taken at the Gauss
    point nearest ``x1``; ``N`` and ``M`` follow by Gauss integration over the
    thickness.
    """
    basis, cfg = sol.basis, sol.config
    U, W = basis.layout.split(sol.X if X is None else X)
    g = int(np.argmin(np.abs(basis.x - x1)))
    Du = basis.Bu[g] @ U
    Dw = basis.Bw[g] @ W if cfg.nonlinear else 0.0
    eps0 = float(Du + 0.5 * Dw**2)
    kappa = float(-(basis.Btheta[g] @ W))
    h, E, b = cfg.h, cfg.E, cfg.b
    x3 = np.linspace(-0.5 * h, 0.5 * h, n)
    sigma = E * (eps0 + x3 * kappa)
    t, wq = np.polynomial.legendre.leggauss(2)
    z = 0.5 * h * t
    s = E * (eps0 + z * kappa)
    N = float(b * 0.5 * h * np.sum(wq * s))
    M = float(b * 0.5 * h * np.sum(wq * s * z))
    return StressProfile(float(basis.x[g]), x3, sigma, eps0, kappa, N, M)


def load_reference(config: BeamConfig) -> float:
    """Load used to scale stresses: ``q0`` for a UDL and ``P / L`` for a point load."""
    return config.load_si / config.L if config.load_kind == "point" else config.load_si


def nondimensionalize(sol: SolutionRecord, config: BeamConfig | None = None, profile: StressProfile | None = None) -> dict:
    """``w_bar = w/h``, ``sigma_bar = sigma (h/L)^2 / q0``, ``q_bar = q0 L/h`` and ``P_bar = P L/h``."""
    cfg = config or sol.config
    load = cfg.load_si
    out = {"w_bar": sol.w_bar()}
    key = "P_bar" if cfg.load_kind == "point" else "q_bar"
    out[key] = load * cfg.L / cfg.h
    if profile is not None:
        ref = load_reference(cfg)
        out["sigma_bar"] = profile.sigma * (cfg.h / cfg.L) ** 2 / ref if ref != 0.0 else np.zeros_like(profile.sigma)
    return out


def midplane_sigma_bar(sol: SolutionRecord, x1: float | None = None) -> float:
    """Nondimensional midplane stress at ``x1`` (midspan by default)."""
    cfg = sol.config
    prof = stress_profile(sol, 0.5 * cfg.L if x1 is None else x1, n=3)
    ref = load_reference(cfg)
    return float(prof.sigma[1] * (cfg.h / cfg.L) ** 2 / ref) if ref != 0.0 else 0.0


def natural_bc_diagnostic(sol: SolutionRecord) -> tuple[float, float]:
    """Riesz integral of the bending moment at ``x = 0`` and ``x = L`` relative to ``max|M|``.

    At each end the horizon is mirrored into the beam (the side of length
    ``lf`` points inward) and ``M`` is interpolated linearly between Gauss
    points, extrapolated linearly to the ends.
    """
    basis, cfg = sol.basis, sol.config
    _, M = resultants(basis, cfg.section, sol.X, cfg.nonlinear)
    x = basis.x
    x_ext = np.concatenate([[0.0], x, [cfg.L]])
    left = M[0] + (M[1] - M[0]) * (0.0 - x[0]) / (x[1] - x[0])
    right = M[-1] + (M[-1] - M[-2]) * (cfg.L - x[-1]) / (x[-1] - x[-2])
    M_ext = np.concatenate([[left], M, [right]])

    def field(s):
        return float(np.interp(s, x_ext, M_ext))

    scale = float(np.max(np.abs(M))) or 1.0
    lf, a = min(cfg.lf, cfg.L), cfg.alpha
    dom = (0.0, cfg.L)
    r0 = riesz_integral(field, 0.0, Horizon(lf, 0.0), a, domain=dom)
    rL = riesz_integral(field, cfg.L, Horizon(0.0, lf), a, domain=dom)
    return abs(r0) / scale, abs(rL) / scale


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


def write_csv(path, header, rows) -> Path:
    """Write rows with shortest round-trip float formatting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) for v in row])
    return path


def read_csv(path):
    """Read a CSV written by :func:`write_csv` into ``(header, rows of str)``."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def load_displacement_rows(sol: SolutionRecord):
    """Rows ``(load_factor, q_bar or P_bar, w_bar_mid, iterations)``."""
    cfg = sol.config
    full = cfg.load_si * cfg.L / cfg.h
    wb = sol.w_bar()
    return [(s.load_factor, s.load_factor * full, w, s.iterations) for s, w in zip(sol.steps, wb)]


def load_displacement_header(config: BeamConfig):
    return ["load_factor", "P_bar" if config.load_kind == "point" else "q_bar", "w_bar_mid", "iterations"]


def stress_rows(sol: SolutionRecord, x1: float | None = None, n: int = 21):
    """Rows ``(x3/h, sigma_bar)`` through the depth at ``x1`` (midspan by default)."""
    cfg = sol.config
    prof = stress_profile(sol, 0.5 * cfg.L if x1 is None else x1, n=n)
    sb = nondimensionalize(sol, cfg, prof)["sigma_bar"]
    return [(z / cfg.h, s) for z, s in zip(prof.x3, sb)]
