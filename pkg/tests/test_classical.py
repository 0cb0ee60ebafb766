import numpy as np
import pytest

from fracbeam.config import BeamConfig
from fracbeam.solver import solve
from fracbeam.system import BCKind
from fracbeam.validation.classical import ClassicalBeam, classical_oracle, classical_w_bar, linear_midspan


@pytest.fixture
def beam():
    cfg = BeamConfig()
    return ClassicalBeam(cfg.L, 8, cfg.section.A11, cfg.section.D11)


class TestClassicalBeam:
    def test_tangent_matches_finite_differences(self, beam, rng):
        X = 1e-3 * rng.normal(size=beam.n_dof)
        X[0::3] *= 1e-2
        K = beam.tangent(X)
        assert np.allclose(K, K.T, rtol=1e-12, atol=1e-12 * np.abs(K).max())
        h = 1e-8
        for j in range(beam.n_dof):
            e = np.zeros_like(X)
            e[j] = h
            col = (beam.internal(X + e) - beam.internal(X - e)) / (2 * h)
            assert np.linalg.norm(col - K[:, j]) <= 1e-5 * np.linalg.norm(K[:, j])

    def test_udl_vector_totals(self, beam):
        F = beam.udl(2.0)
        assert F[1::3].sum() == pytest.approx(2.0 * beam.L, rel=1e-14)
        assert F[2::3].sum() == pytest.approx(0.0, abs=1e-15)

    def test_point_vector(self, beam):
        F = beam.point(3.0, 0.3)
        assert F[1::3].sum() == pytest.approx(3.0, rel=1e-14)
        assert F[1::3] @ np.linspace(0, beam.L, beam.ne + 1) + F[2::3].sum() == pytest.approx(0.9, rel=1e-13)

    @pytest.mark.parametrize("bc, n_fixed", [(BCKind.CLAMPED, 6), (BCKind.PINNED, 4)])
    def test_free_dofs(self, bc, n_fixed):
        b = ClassicalBeam(1.0, 4, 1.0, 1.0, bc)
        assert b.n_dof - b.free().size == n_fixed

    def test_deflection_interpolates_nodes(self, beam):
        X = np.zeros(beam.n_dof)
        X[1::3] = np.arange(beam.ne + 1.0)
        assert beam.deflection(X, 3 * beam.le) == pytest.approx(3.0)


class TestLinearClosedForms:
    @pytest.mark.parametrize("bc, factor", [("clamped", 1.0), ("pinned", 5.0)])
    def test_udl(self, bc, factor):
        cfg = BeamConfig(bc=bc, magnitude=100.0, nondimensional=False)
        assert linear_midspan(cfg) == pytest.approx(factor * 100.0 / (384 * cfg.section.D11), rel=1e-15)

    @pytest.mark.parametrize("bc, factor", [("clamped", 1.0), ("pinned", 4.0)])
    def test_point(self, bc, factor):
        cfg = BeamConfig(bc=bc, load_kind="point", magnitude=5.0, nondimensional=False)
        assert linear_midspan(cfg) == pytest.approx(factor * 5.0 / (192 * cfg.section.D11), rel=1e-15)

    def test_off_center_point_rejected(self):
        with pytest.raises(ValueError):
            linear_midspan(BeamConfig(load_kind="point", location_ratio=0.3))

    @pytest.mark.parametrize("bc", ["clamped", "pinned"])
    @pytest.mark.parametrize("kind", ["udl", "point"])
    def test_hermite_fem_is_nodally_exact(self, bc, kind):
        cfg = BeamConfig(bc=bc, load_kind=kind, magnitude=1e3, ne=10, nonlinear=False)
        beam, steps = classical_oracle(cfg)
        assert beam.deflection(steps[-1].X, 0.5) == pytest.approx(linear_midspan(cfg), rel=1e-10)


class TestNonlinearOracle:
    @pytest.mark.parametrize("bc", ["clamped", "pinned"])
    def test_membrane_stiffening(self, bc):
        cfg = BeamConfig(alpha=1.0, bc=bc, magnitude=1e5)
        w = classical_w_bar(cfg)
        lin = linear_midspan(cfg) / cfg.h
        assert 0 < w[-1] < 0.8 * lin
        assert np.all(np.diff(w) > 0)

    def test_small_load_is_linear(self):
        cfg = BeamConfig(alpha=1.0, magnitude=1e-1)
        assert classical_w_bar(cfg)[-1] == pytest.approx(linear_midspan(cfg) / cfg.h, rel=1e-4)

    @pytest.mark.parametrize("bc", ["clamped", "pinned"])
    @pytest.mark.parametrize("kind, q", [("udl", 1e5), ("point", 1e4)])
    def test_fractional_solver_local_limit(self, bc, kind, q):
        cfg = BeamConfig(alpha=1.0, bc=bc, load_kind=kind, magnitude=q, ne=40)
        frac = solve(cfg).w_bar()
        assert frac == pytest.approx(classical_w_bar(cfg), rel=1e-8)
