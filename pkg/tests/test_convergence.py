import pytest

from fracbeam.config import BeamConfig
from fracbeam.post import read_csv
from fracbeam.system import BCKind
from fracbeam.validation.classical import classical_w_bar
from fracbeam.validation.suite import (
    ConvergenceGrid,
    ValidationReport,
    calibrate_table_load,
    map_ordered,
    run_convergence,
    write_reports,
)


class TestCalibration:
    def test_hits_target(self):
        q0 = calibrate_table_load(0.7429, lf_ratio=0.1, n_inf=20)
        cfg = BeamConfig(alpha=1.0, magnitude=q0, nondimensional=False)
        assert classical_w_bar(cfg, ne=200)[-1] == pytest.approx(0.7429, abs=1e-9)
        assert q0 == pytest.approx(1000.04, rel=1e-5)

    def test_other_target(self):
        q0 = calibrate_table_load(0.3, lf_ratio=0.2, n_inf=5)
        cfg = BeamConfig(alpha=1.0, magnitude=q0, nondimensional=False)
        assert classical_w_bar(cfg, ne=25)[-1] == pytest.approx(0.3, abs=1e-9)


class TestConvergenceTable:
    def test_default_mode_refinement_below_one_percent(self):
        grid = ConvergenceGrid(alphas=(0.9, 0.8, 0.7, 0.6, 0.5), lf_ratios=(0.1,), n_infs=(10, 20), q0=1000.0, strict_floor=False)
        table = run_convergence(grid)
        for a in grid.alphas:
            assert table.delta(0.1, 10, 20, a) < 0.01

    def test_layout_and_deltas(self):
        grid = ConvergenceGrid(alphas=(1.0, 0.8), lf_ratios=(0.25, 0.5), n_infs=(2, 4), q0=500.0, bc=BCKind.PINNED)
        table = run_convergence(grid, threads=2)
        assert table.header() == ["lf_over_L", "N_inf", "alpha=1", "alpha=0.8"]
        rows = table.rows()
        assert [r[:2] for r in rows] == [[0.25, 2], [0.25, 4], [0.5, 2], [0.5, 4]]
        d = table.delta_rows()
        assert d[0][:2] == [0.25, "2->4"]
        a, b = table.value(0.25, 2, 0.8), table.value(0.25, 4, 0.8)
        assert d[0][3] == pytest.approx(abs(b - a) / abs(b))

    def test_threads_deterministic(self):
        grid = ConvergenceGrid(alphas=(0.9, 0.6), lf_ratios=(0.25,), n_infs=(2, 4), q0=800.0)
        assert run_convergence(grid, threads=1).values == run_convergence(grid, threads=3).values


class TestHelpers:
    def test_map_ordered(self):
        assert map_ordered(lambda v: v * v, range(10), threads=4) == [v * v for v in range(10)]

    def test_report_files(self, tmp_path):
        r = ValidationReport("demo", False, 0.5, 0.1, ["a", "b"], [(1, 2.5)], notes="x")
        assert r.summary_line() == "FAIL demo: 5.000e-01 (threshold 1.0e-01) x"
        summary = write_reports([r], tmp_path)
        assert read_csv(summary) == (["validation", "passed", "metric", "threshold"], [["demo", "fail", "0.5", "0.1"]])
        assert read_csv(tmp_path / "demo.csv") == (["a", "b"], [["1", "2.5"]])
