import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracbeam import DofLayout, FracParams, Mesh, QuadRule, build_basis, frac_values
from fracbeam.basis import default_mesh_size
from fracbeam.errors import ConfigError, DomainError
from fracbeam.kernel import rc_derivative_poly
from oracles import HermiteBasis, rc_oracle_piecewise


def make(ne, alpha, lf, L=1.0, ngp=4, **kw):
    mesh = Mesh(L, ne)
    return build_basis(mesh, DofLayout(mesh), QuadRule(ngp), FracParams(alpha, lf), **kw)


class TestAffineExactness:
    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.5, 0.99), st.floats(0.05, 0.2), st.integers(20, 120), st.floats(-3, 3), st.floats(-3, 3))
    def test_linear_fields(self, alpha, lf, ne, c, b):
        basis = make(ne, alpha, lf)
        X = basis.layout.nodal_state(lambda s: c + b * s, lambda s: c + b * s, lambda s: b)
        Du, Dw, Dt = frac_values(basis, X)
        tol = 1e-10 * max(abs(b), 1e-300) + 1e-13 * abs(c)
        assert np.max(np.abs(Du - b)) <= tol
        assert np.max(np.abs(Dw - b)) <= tol
        assert np.max(np.abs(Dt)) <= 1e-9 * (abs(b) + abs(c))

    def test_identity_field(self):
        basis = make(100, 0.8, 0.1)
        X = basis.layout.nodal_state(lambda s: s, lambda s: 0.0, lambda s: 0.0)
        assert np.max(np.abs(frac_values(basis, X)[0] - 1.0)) < 1e-10

    def test_literal_counting_is_not_affine_exact(self):
        basis = make(20, 0.8, 0.1, strict_floor=True)
        X = basis.layout.nodal_state(lambda s: s, lambda s: 0.0, lambda s: 0.0)
        assert np.max(np.abs(frac_values(basis, X)[0] - 1.0)) > 1e-3


class TestLocalLimit:
    def test_rows_are_local_derivatives(self):
        basis = make(8, 1.0, 0.25)
        le = basis.mesh.le
        for g, x in enumerate(basis.x):
            e = int(x // le)
            row = np.zeros(basis.layout.n_u)
            row[e], row[e + 1] = -1 / le, 1 / le
            assert np.allclose(basis.Bu[g], row, rtol=0, atol=1e-12)

    def test_values_equal_fe_derivatives(self, rng):
        basis = make(6, 1.0, 0.2)
        c = rng.normal(size=4)
        p = np.polynomial.Polynomial(c)
        X = basis.layout.nodal_state(p, p, p.deriv())
        Du, Dw, Dt = frac_values(basis, X)
        assert np.allclose(Dw, p.deriv()(basis.x), rtol=1e-12, atol=1e-12)
        assert np.allclose(Dt, p.deriv(2)(basis.x), rtol=1e-10, atol=1e-10)


class TestAgainstQuadratureOracle:
    def test_all_axial_rows_small_mesh(self):
        ne, alpha, lf = 10, 0.8, 0.2
        basis = make(ne, alpha, lf)
        hb = HermiteBasis(1.0, ne)
        nodes = basis.mesh.nodes
        worst = 0.0
        for g in range(basis.n_points):
            x, lA, lB = basis.x[g], basis.lA[g], basis.lB[g]
            for j in range(ne + 1):
                if nodes[j] + basis.mesh.le <= x - lA or nodes[j] - basis.mesh.le >= x + lB:
                    ref = 0.0  # hat support misses the horizon
                else:
                    ref = float(rc_oracle_piecewise(hb.hat_slope(j), x, lA, lB, alpha, nodes, dps=18))
                worst = max(worst, abs(basis.Bu[g, j] - ref))
        assert worst < 1e-7 * np.max(np.abs(basis.Bu))

    def test_transverse_rows_small_mesh(self):
        ne, alpha, lf = 10, 0.7, 0.2
        basis = make(ne, alpha, lf)
        hb = HermiteBasis(1.0, ne)
        nodes = basis.mesh.nodes
        for g in (0, 5, 17, 39):
            x, lA, lB = basis.x[g], basis.lA[g], basis.lB[g]
            for k in range(basis.layout.n_w):
                rw = float(rc_oracle_piecewise(hb.hermite_derivative(k, 1), x, lA, lB, alpha, nodes))
                rt = float(rc_oracle_piecewise(hb.hermite_derivative(k, 2), x, lA, lB, alpha, nodes))
                assert basis.Bw[g, k] == pytest.approx(rw, rel=1e-7, abs=1e-9)
                assert basis.Btheta[g, k] == pytest.approx(rt, rel=1e-7, abs=1e-7)

    def test_interpolated_quartic_at_midspan(self):
        basis = make(100, 0.8, 0.1)
        w = np.polynomial.Polynomial([0, 0, 1, -2, 1])
        X = basis.layout.nodal_state(lambda s: 0.0, w, w.deriv())
        g = int(np.argmin(np.abs(basis.x - 0.5)))
        x = basis.x[g]
        hb = HermiteBasis(1.0, 100)
        W = basis.layout.split(X)[1]

        def dw_h(s):
            return sum(W[k] * hb.hermite_derivative(k, 1)(s) for k in _active(hb, s))

        ref = float(rc_oracle_piecewise(dw_h, x, 0.1, 0.1, 0.8, basis.mesh.nodes))
        assert (basis.Bw @ W)[g] == pytest.approx(ref, rel=1e-6)
        # the interpolant is close to, but not exactly, the quartic
        exact = rc_derivative_poly(w.deriv().coef, x, 0.1, 0.1, 0.8)
        assert (basis.Bw @ W)[g] == pytest.approx(float(exact), rel=1e-4)


def _active(hb, s):
    e, _ = hb._elem(s)
    return range(2 * e, 2 * e + 4)


class TestStructure:
    def test_element_counts(self):
        basis = make(100, 0.8, 0.1)
        le = basis.mesh.le
        assert np.array_equal(basis.n_left, np.ceil(basis.lA / le - 1e-9).astype(int))
        assert np.array_equal(basis.n_right, np.floor(basis.lB / le + 1e-9).astype(int))
        assert basis.n_left[0] == 1 and basis.n_right[0] == 10
        mid = basis.n_points // 2
        assert basis.n_left[mid] == 10 and basis.n_right[mid] == 10

    @pytest.mark.parametrize("strict", [False, True])
    def test_row_support_within_horizon(self, strict):
        basis = make(40, 0.7, 0.1, strict_floor=strict)
        le = basis.mesh.le
        for g in range(basis.n_points):
            nz = np.flatnonzero(basis.Bu[g])
            if strict:
                host = int(basis.x[g] // le)
                lo = max(0.0, (host - basis.n_left[g]) * le)
                hi = min(1.0, (host + max(1, basis.n_right[g])) * le)
            else:
                lo, hi = basis.x[g] - basis.lA[g], basis.x[g] + basis.lB[g]
            nodes = basis.mesh.nodes[nz]
            assert nodes.min() >= lo - le - 1e-12 and nodes.max() <= hi + le + 1e-12

    def test_gauss_on_far_elements_converges_to_exact(self):
        exact = make(20, 0.8, 0.1)
        b24 = make(20, 0.8, 0.1, horizon_gauss=24)
        b48 = make(20, 0.8, 0.1, horizon_gauss=48)
        for name in ("Bu", "Bw", "Btheta"):
            scale = np.max(np.abs(getattr(exact, name)))
            assert np.max(np.abs(getattr(b24, name) - getattr(b48, name))) < 1e-8 * scale
            assert np.max(np.abs(getattr(b48, name) - getattr(exact, name))) < 1e-12 * scale

    def test_layout_mismatch(self):
        mesh = Mesh(1.0, 10)
        with pytest.raises(ConfigError):
            build_basis(mesh, DofLayout(Mesh(1.0, 12)), QuadRule(4), FracParams(0.8, 0.1))

    def test_default_mesh_size(self):
        assert default_mesh_size(1.0, 0.1, 10) == 100
        assert default_mesh_size(1.0, 0.05, 20) == 400
        with pytest.raises(DomainError):
            default_mesh_size(1.0, 0.3, 2)


class TestFracValues:
    def test_zero_state(self, small_basis):
        for v in frac_values(small_basis, np.zeros(small_basis.layout.n_dof)):
            assert not np.any(v)

    @given(st.integers(0, 2**31))
    def test_superposition(self, seed):
        basis = make(10, 0.8, 0.2)
        r = np.random.default_rng(seed)
        X1, X2 = r.normal(size=(2, basis.layout.n_dof))
        a = frac_values(basis, X1 + X2)
        b1, b2 = frac_values(basis, X1), frac_values(basis, X2)
        for v, p, q in zip(a, b1, b2):
            assert np.allclose(v, p + q, rtol=1e-13, atol=1e-13 * np.max(np.abs(v)))

    def test_dimension_mismatch(self, small_basis):
        with pytest.raises(DomainError):
            frac_values(small_basis, np.zeros(3))


def test_row_dump(tmp_path, small_basis):
    path = tmp_path / "rows.csv"
    small_basis.dump_rows(path, "Bw", points=[0, 7])
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["gauss_point", "x", "dof", "value"]
    for g, x, j, v in rows[1:]:
        assert float(v) == small_basis.Bw[int(g), int(j)]
        assert float(x) == small_basis.x[int(g)]
    assert {int(r[0]) for r in rows[1:]} == {0, 7}
