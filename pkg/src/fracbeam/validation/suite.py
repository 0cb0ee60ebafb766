"""Built-in validations, load calibration and mesh-convergence tables."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from ..basis import default_mesh_size
from ..config import BeamConfig
from ..post import write_csv
from ..solver import basis_for, solve, solve_linear
from ..system import BCKind
from .classical import classical_w_bar, linear_midspan
from .manufactured import ManufacturedCase, manufactured_load_spec


def map_ordered(fn, items, threads: int = 1):
    """``[fn(i) for i in items]``, optionally on a thread pool; order is preserved."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass
class ValidationReport:
    name: str
    passed: bool
    metric: float
    threshold: float
    header: list
    rows: list
    notes: str = ""

    def summary_line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: {self.metric:.3e} (threshold {self.threshold:.1e}) {self.notes}".rstrip()


def run_validation_1(config: BeamConfig | None = None, q_bar: float = 1.0e5, threads: int = 1) -> ValidationReport:
    """``alpha = 1`` nonlinear UDL curves of both BCs against the classical FEM."""
    base = (config or BeamConfig()).replace(alpha=1.0, load_kind="udl", magnitude=q_bar, nondimensional=True, nonlinear=True)

    def run(bc):
        cfg = base.replace(bc=bc)
        return cfg, solve(cfg), classical_w_bar(cfg)

    rows, worst = [], 0.0
    for cfg, sol, ref in map_ordered(run, (BCKind.CLAMPED, BCKind.PINNED), threads):
        rows.append((cfg.bc.value, 0.0, 0.0, 0.0, 0.0))
        for step, w, r in zip(sol.steps, sol.w_bar(), ref):
            dev = abs(w - r) / abs(r)
            worst = max(worst, dev)
            rows.append((cfg.bc.value, step.load_factor * q_bar, w, r, dev))
    return ValidationReport(
        "validation_1_classical_nonlinear",
        worst < 0.01,
        worst,
        0.01,
        ["bc", "q_bar", "w_bar_ffem", "w_bar_oracle", "rel_dev"],
        rows,
    )


def run_validation_2(config: BeamConfig | None = None, alpha: float = 0.9, lf_ratio: float = 0.1) -> ValidationReport:
    """Linearized model: load-stepped path vs one-shot solve, and ``alpha = 1`` vs closed form."""
    base = (config or BeamConfig()).replace(nonlinear=False, load_kind="udl")
    frac = base.replace(alpha=alpha, lf_ratio=lf_ratio)
    basis = basis_for(frac)
    path = solve(frac, basis=basis)
    ref = solve_linear(frac, basis=basis)
    dev_path = float(np.linalg.norm(path.X - ref) / np.linalg.norm(ref))
    w_path = path.midspan_deflection() / frac.h
    w_ref = path.midspan_deflection(ref) / frac.h

    local = base.replace(alpha=1.0)
    w_loc = solve(local).midspan_deflection() / local.h
    w_cf = linear_midspan(local) / local.h
    dev_cf = abs(w_loc - w_cf) / abs(w_cf)
    rows = [
        ("path_vs_one_shot", alpha, w_path, w_ref, dev_path),
        ("local_vs_closed_form", 1.0, w_loc, w_cf, dev_cf),
    ]
    return ValidationReport(
        "validation_2_linearized",
        dev_path <= 1e-10 and dev_cf < 0.01,
        max(dev_path, dev_cf),
        0.01,
        ["check", "alpha", "w_bar", "w_bar_reference", "rel_dev"],
        rows,
        notes=f"path deviation {dev_path:.1e} must be <= 1e-10",
    )


def manufactured_error(config: BeamConfig, case: ManufacturedCase, point_loads: bool = False) -> float:
    """Max nodal ``|w_h - w0| / max|w0|`` for a clamped solve under manufactured loads."""
    cfg = config.replace(bc=BCKind.CLAMPED)
    basis = basis_for(cfg)
    load = manufactured_load_spec(case, cfg.section, cfg.frac, basis.mesh, basis.quad, point_loads=point_loads)
    sol = solve(cfg, basis=basis, load=load)
    _, W = sol.layout.split(sol.X)
    x = basis.mesh.nodes
    exact = case.w(x)
    return float(np.max(np.abs(W[0::2] - exact)) / np.max(np.abs(exact)))


def run_validation_3(
    config: BeamConfig | None = None,
    alphas=(0.8, 0.9),
    amplitudes=((10.0, 0.05), (20.0, 0.1)),
    lf_ratio: float = 0.1,
    threads: int = 1,
) -> ValidationReport:
    """Manufactured solutions; ``amplitudes`` are ``(W0/h, U0/h)`` pairs."""
    base = (config or BeamConfig()).replace(lf_ratio=lf_ratio, nonlinear=True)
    jobs = [(a, W, U) for a in alphas for W, U in amplitudes]

    def run(job):
        a, W, U = job
        cfg = base.replace(alpha=a)
        case = ManufacturedCase(U * cfg.h, W * cfg.h, cfg.L)
        return a, W, U, manufactured_error(cfg, case), manufactured_error(cfg, case, point_loads=True)

    rows = map_ordered(run, jobs, threads)
    worst = max(r[3] for r in rows)
    return ValidationReport(
        "validation_3_manufactured",
        worst < 0.03,
        worst,
        0.03,
        ["alpha", "W0_over_h", "U0_over_h", "max_rel_err", "max_rel_err_with_point_loads"],
        rows,
    )


def calibrate_table_load(target: float = 0.7429, lf_ratio: float = 0.1, n_inf: int = 20, config: BeamConfig | None = None) -> float:
    """UDL ``q0`` (N/m) for which the classical clamped solve gives midspan ``w_bar = target``.

    The mesh is the one the fractional entry would use, ``Ne = n_inf L / lf``.
    """
    base = (config or BeamConfig()).replace(
        alpha=1.0, bc=BCKind.CLAMPED, load_kind="udl", nondimensional=False, nonlinear=True
    )
    ne = default_mesh_size(base.L, lf_ratio * base.L, n_inf)

    def f(q):
        return classical_w_bar(base.replace(magnitude=q), ne=ne)[-1] - target

    # linear estimate brackets the root from above (membrane action stiffens)
    q_lin = target * base.h / (linear_midspan(base.replace(magnitude=1.0)))
    return brentq(f, 0.5 * q_lin, 20.0 * q_lin, xtol=1e-10 * q_lin, rtol=1e-12)


@dataclass
class ConvergenceGrid:
    """Grid of ``(lf, N_inf, alpha)`` runs at a fixed UDL ``q0`` (calibrated when ``None``)."""

    alphas: tuple = (1.0, 0.9, 0.8, 0.7, 0.6, 0.5)
    lf_ratios: tuple = (0.2, 0.1, 0.05)
    n_infs: tuple = (2, 5, 10, 20)
    bc: BCKind = BCKind.CLAMPED
    q0: float | None = None
    strict_floor: bool = True
    config: BeamConfig = field(default_factory=BeamConfig)


@dataclass
class ConvergenceTable:
    grid: ConvergenceGrid
    q0: float
    values: dict

    def value(self, lf_ratio, n_inf, alpha) -> float:
        return self.values[(lf_ratio, n_inf, alpha)]

    def delta(self, lf_ratio, n_coarse, n_fine, alpha) -> float:
        """Relative change of ``w_bar`` between two refinements."""
        a = self.value(lf_ratio, n_coarse, alpha)
        b = self.value(lf_ratio, n_fine, alpha)
        return abs(b - a) / abs(b)

    def header(self):
        return ["lf_over_L", "N_inf"] + [f"alpha={a:g}" for a in self.grid.alphas]

    def rows(self):
        return [
            [lf, n] + [self.value(lf, n, a) for a in self.grid.alphas]
            for lf in self.grid.lf_ratios
            for n in self.grid.n_infs
        ]

    def delta_rows(self):
        """Successive-refinement deltas, one row per ``(lf, N_inf coarse -> fine)``."""
        out = []
        ns = self.grid.n_infs
        for lf in self.grid.lf_ratios:
            for n0, n1 in zip(ns[:-1], ns[1:]):
                out.append([lf, f"{n0}->{n1}"] + [self.delta(lf, n0, n1, a) for a in self.grid.alphas])
        return out


def run_convergence(grid: ConvergenceGrid, threads: int = 1) -> ConvergenceTable:
    """Midspan ``w_bar`` for each grid entry with ``Ne = N_inf L / lf``."""
    q0 = grid.q0 if grid.q0 is not None else calibrate_table_load(config=grid.config)
    base = grid.config.replace(
        bc=grid.bc,
        load_kind="udl",
        magnitude=q0,
        nondimensional=False,
        nonlinear=True,
        ne=None,
        strict_floor=grid.strict_floor,
    )
    keys = [(lf, n, a) for lf in grid.lf_ratios for n in grid.n_infs for a in grid.alphas]

    def run(key):
        lf, n, a = key
        return solve(base.replace(alpha=a, lf_ratio=lf, n_inf=n)).w_bar()[-1]

    vals = map_ordered(run, keys, threads)
    return ConvergenceTable(grid, q0, dict(zip(keys, (float(v) for v in vals))))


def write_reports(reports, directory) -> Path:
    """One CSV per report plus ``summary.csv``; returns the summary path."""
    directory = Path(directory)
    for r in reports:
        write_csv(directory / f"{r.name}.csv", r.header, r.rows)
    return write_csv(
        directory / "summary.csv",
        ["validation", "passed", "metric", "threshold"],
        [(r.name, "pass" if r.passed else "fail", r.metric, r.threshold) for r in reports],
    )
