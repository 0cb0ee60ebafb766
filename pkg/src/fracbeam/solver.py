"""Load stepping with Newton-Raphson iterations and dense symmetric solves."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .basis import NonlocalBasis, build_basis
from .config import BeamConfig, SolverControls
from .errors import SolverError
from .mesh import DofLayout
from .system import force_vector, free_dofs, internal_force, tangent_stiffness

log = logging.getLogger(__name__)

ProgressHook = Callable[[int, int, float], None]


def solve_linear_system(K, rhs) -> np.ndarray:
    """Solve ``K x = rhs`` for symmetric ``K``; Cholesky first, then a symmetric LU.

    Raises
    ------
    SolverError
        If both factorizations fail or the normwise backward error
        ``|K x - rhs| / (|K| |x| + |rhs|)`` exceeds 1e-10.
    """
    K = np.asarray(K, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] != rhs.shape[0]:
        raise SolverError(f"incompatible shapes {K.shape} and {rhs.shape}")
    if not np.all(np.isfinite(K)) or not np.all(np.isfinite(rhs)):
        raise SolverError("non-finite entries in the linear system")
    bnorm = np.linalg.norm(rhs)
    if bnorm == 0.0:
        return np.zeros_like(rhs)
    # symmetric Jacobi equilibration: axial and bending entries differ by ~1e10
    d = np.abs(np.diag(K))
    d = 1.0 / np.sqrt(np.where(d > 0.0, d, 1.0))
    Ks = K * d[:, None] * d[None, :]
    try:
        fac = sla.cho_factor(Ks, check_finite=False)
        inner = lambda b: sla.cho_solve(fac, b, check_finite=False)  # noqa: E731
    except sla.LinAlgError:
        try:
            lu = sla.lu_factor(Ks, check_finite=False)
        except (sla.LinAlgError, ValueError) as exc:
            raise SolverError(f"factorization failed: {exc}", condition=np.linalg.cond(K)) from None
        inner = lambda b: sla.lu_solve(lu, b, check_finite=False)  # noqa: E731
    x = d * inner(d * rhs)
    x = x - d * inner(d * (K @ x - rhs))  # one refinement step
    if not np.all(np.isfinite(x)):
        raise SolverError("linear solve produced non-finite values", condition=np.linalg.cond(K))
    # normwise backward error; a plain relative residual is limited by
    # eps * |K| |x| / |rhs| for badly scaled beam systems
    err = np.linalg.norm(K @ x - rhs) / (np.linalg.norm(K, np.inf) * np.linalg.norm(x) + bnorm)
    if err > 1e-10:
        raise SolverError(f"linear solve is inaccurate (backward error {err:.2e})", condition=np.linalg.cond(K))
    return x


@dataclass
class StepResult:
    """Converged state of one load step."""

    load_factor: float
    X: np.ndarray
    iterations: int
    residuals: list = field(default_factory=list)


def newton_step(X, internal, tangent, F, free):
    """One full update ``X <- X - K_T^-1 R``; returns the new state and ``|dX|``.

    The update is solved in total form, ``K_T X_new = K_T X - R``, which avoids
    the cancellation in ``F - K X`` when the internal force is linear in ``X``.
    """
    R = internal(X) - F
    K = tangent(X)[np.ix_(free, free)]
    Xn = X.copy()
    Xn[free] = solve_linear_system(K, K @ X[free] - R[free])
    return Xn, float(np.linalg.norm(Xn - X))


def load_stepping(internal, tangent, F, free, controls: SolverControls, X0=None, hook: ProgressHook | None = None):
    """Ramp ``lambda = k / load_steps`` and iterate Newton-Raphson at each level.

    ``internal(X)`` returns the internal force vector and ``tangent(X)`` its
    Jacobian; both act on the full DOF vector, and only ``free`` entries are
    solved for.  Every step performs at least one update.  Convergence is
    ``|R| / |F_lambda| < tol`` on the free DOFs (absolute when the load is zero).
    """
    F = np.asarray(F, dtype=float)
    X = np.zeros_like(F) if X0 is None else np.array(X0, dtype=float)
    steps = []
    for k in range(1, controls.load_steps + 1):
        lam = k / controls.load_steps
        F_lam = lam * F
        ref = np.linalg.norm(F_lam[free]) or 1.0
        history = []
        r0 = np.linalg.norm((internal(X) - F_lam)[free])
        for it in range(1, controls.max_iters + 1):
            X, _ = newton_step(X, internal, tangent, F_lam, free)
            r = float(np.linalg.norm((internal(X) - F_lam)[free]))
            history.append(r)
            if hook is not None:
                hook(k, it, r)
            log.debug("step %d iter %d residual %.3e", k, it, r)
            if not np.isfinite(r):
                raise SolverError(f"non-finite residual at load step {k}", history=history, step=k)
            if r / ref < controls.tol:
                break
            if r > controls.divergence_factor * max(r0, controls.tol * ref):
                raise SolverError(f"Newton iterations diverged at load step {k}", history=history, step=k)
        else:
            raise SolverError(
                f"no convergence in {controls.max_iters} iterations at load step {k} "
                f"(last relative residual {history[-1] / ref:.3e})",
                history=history,
                step=k,
            )
        steps.append(StepResult(lam, X.copy(), len(history), history))
    return steps


@dataclass
class SolutionRecord:
    """Converged states of every load step plus the discretization they live on."""

    config: BeamConfig
    basis: NonlocalBasis
    F: np.ndarray
    steps: list

    @property
    def layout(self) -> DofLayout:
        return self.basis.layout

    @property
    def X(self) -> np.ndarray:
        return self.steps[-1].X

    def midspan_deflection(self, X=None) -> float:
        _, W = self.layout.split(self.X if X is None else X)
        return self.basis.mesh.interpolate_w(W, 0.5 * self.config.L)

    def w_bar(self) -> np.ndarray:
        """Midspan ``w / h`` at every load step."""
        return np.array([self.midspan_deflection(s.X) / self.config.h for s in self.steps])

    @property
    def iterations(self) -> list:
        return [s.iterations for s in self.steps]


def basis_for(config: BeamConfig) -> NonlocalBasis:
    mesh = config.mesh
    return build_basis(
        mesh,
        DofLayout(mesh),
        config.quad,
        config.frac,
        strict_floor=config.strict_floor,
        horizon_gauss=config.horizon_gauss,
    )


def solve(config: BeamConfig, *, basis: NonlocalBasis | None = None, load=None, hook: ProgressHook | None = None) -> SolutionRecord:
    """Solve the configured problem; ``load`` overrides ``config.load`` (a :class:`LoadSpec`)."""
    basis = basis or basis_for(config)
    layout = basis.layout
    sec = config.section
    F = force_vector(basis.mesh, layout, basis.quad, load or config.load)
    free = free_dofs(layout, config.bc)
    if config.nonlinear:
        internal = lambda X: internal_force(basis, sec, X)  # noqa: E731
        tangent = lambda X: tangent_stiffness(basis, sec, X)  # noqa: E731
    else:
        # constant operator, shared with solve_linear
        K = tangent_stiffness(basis, sec, np.zeros(layout.n_dof), nonlinear=False)
        internal = lambda X: K @ X  # noqa: E731
        tangent = lambda X: K  # noqa: E731
    steps = load_stepping(
        internal,
        tangent,
        F,
        free,
        config.controls,
        hook=hook,
    )
    return SolutionRecord(config, basis, F, steps)


def solve_linear(config: BeamConfig, *, basis: NonlocalBasis | None = None, load=None) -> np.ndarray:
    """One-shot solve of the linearized model ``K(0) X = F``."""
    basis = basis or basis_for(config)
    layout = basis.layout
    F = force_vector(basis.mesh, layout, basis.quad, load or config.load)
    free = free_dofs(layout, config.bc)
    K = tangent_stiffness(basis, config.section, np.zeros(layout.n_dof), nonlinear=False)
    X = np.zeros(layout.n_dof)
    X[free] = solve_linear_system(K[np.ix_(free, free)], F[free])
    return X
