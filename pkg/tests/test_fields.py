"""Tests for grids, fields, the flat-vector convention, and ensembles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enserr.fields import (
    Grid2D,
    GridField,
    SolutionEnsemble,
    decode_flat,
    devectorize,
    ensemble_difference,
    vectorize,
)


class TestGrid2D:
    def test_validation(self):
        with pytest.raises(ValueError):
            Grid2D(nx=0, ny=4, dx=0.1, dy=0.1)
        with pytest.raises(ValueError):
            Grid2D(nx=4, ny=4, dx=0.0, dy=0.1)
        with pytest.raises(ValueError):
            Grid2D(nx=4, ny=4, dx=0.1, dy=-0.1)

    def test_unit_square(self):
        g = Grid2D.unit_square(100)
        assert g.nx == g.ny == 100
        assert g.dx == g.dy == pytest.approx(0.01)
        assert g.ncells == 10000
        assert g.cell_area == pytest.approx(1e-4)

    def test_cell_centers_formula(self):
        """Center of cell (kx, my) sits at ((kx - 1/2) dx, (my - 1/2) dy)."""
        g = Grid2D(nx=4, ny=3, dx=0.25, dy=0.5, x0=1.0, y0=-1.0)
        assert g.cell_center(1, 1) == (pytest.approx(1.125), pytest.approx(-0.75))
        assert g.cell_center(4, 3) == (pytest.approx(1.875), pytest.approx(0.25))
        xc, yc = g.cell_centers()
        assert xc.shape == (4, 3)
        for kx in range(1, 5):
            for my in range(1, 4):
                assert xc[kx - 1, my - 1] == pytest.approx(g.cell_center(kx, my)[0])
                assert yc[kx - 1, my - 1] == pytest.approx(g.cell_center(kx, my)[1])

    def test_flat_formula(self):
        g = Grid2D(nx=5, ny=7, dx=0.2, dy=0.2)
        for kx in range(1, 6):
            for my in range(1, 8):
                assert g.flat_of(kx, my) == g.ny * (kx - 1) + my

    def test_flat_bijective(self):
        """flat_of covers 1..ncells exactly once and cell_of inverts it."""
        g = Grid2D(nx=5, ny=7, dx=0.2, dy=0.2)
        seen = set()
        for kx in range(1, 6):
            for my in range(1, 8):
                i = g.flat_of(kx, my)
                assert 1 <= i <= g.ncells
                seen.add(i)
                assert g.cell_of(i) == (kx, my)
        assert len(seen) == g.ncells

    def test_flat_bounds(self):
        g = Grid2D(nx=3, ny=3, dx=1.0, dy=1.0)
        with pytest.raises(ValueError):
            g.flat_of(0, 1)
        with pytest.raises(ValueError):
            g.flat_of(1, 4)
        with pytest.raises(ValueError):
            g.cell_of(10)


class TestGridField:
    def test_accepts_both_shapes(self):
        g = Grid2D(nx=3, ny=2, dx=1.0, dy=1.0)
        a = np.arange(6, dtype=float).reshape(3, 2)
        f2 = GridField(grid=g, var="U", data=a)
        f1 = GridField(grid=g, var="U", data=a.ravel())
        np.testing.assert_array_equal(f2.data, f1.data)
        np.testing.assert_array_equal(f2.as_array(), a)

    def test_value_at_matches_layout(self):
        g = Grid2D(nx=3, ny=2, dx=1.0, dy=1.0)
        a = np.arange(6, dtype=float).reshape(3, 2)
        f = GridField(grid=g, var="U", data=a)
        for kx in range(1, 4):
            for my in range(1, 3):
                assert f.value_at(kx, my) == a[kx - 1, my - 1]

    def test_wrong_size_rejected(self):
        g = Grid2D(nx=3, ny=2, dx=1.0, dy=1.0)
        with pytest.raises(ValueError):
            GridField(grid=g, var="U", data=np.zeros(5))

    def test_positivity_enforced_for_density_and_pressure(self):
        g = Grid2D(nx=2, ny=2, dx=1.0, dy=1.0)
        with pytest.raises(ValueError):
            GridField(grid=g, var="rho", data=np.array([1.0, 1.0, -0.5, 1.0]))
        with pytest.raises(ValueError):
            GridField(grid=g, var="P", data=np.zeros(4))
        # error fields carry signed values under a different tag
        GridField(grid=g, var="err:rho", data=np.array([1.0, -1.0, 0.0, 2.0]))
        GridField(grid=g, var="U", data=np.array([-3.0, 0.0, 1.0, 2.0]))


class TestVectorize:
    def test_layout_2x2_two_vars(self):
        """Blocks are variable-major; within a block kx is the outer index."""
        g = Grid2D(nx=2, ny=2, dx=0.5, dy=0.5)
        a = GridField(grid=g, var="U", data=np.array([[1.0, 2.0], [3.0, 4.0]]))
        b = GridField(grid=g, var="V", data=np.array([[5.0, 6.0], [7.0, 8.0]]))
        v = vectorize([a, b])
        np.testing.assert_array_equal(v, [1, 2, 3, 4, 5, 6, 7, 8])

    def test_single_cell_grid(self):
        g = Grid2D(nx=1, ny=1, dx=1.0, dy=1.0)
        v = vectorize([GridField(grid=g, var="U", data=np.array([2.5]))])
        np.testing.assert_array_equal(v, [2.5])

    def test_total_length_100x100_four_vars(self):
        g = Grid2D.unit_square(100)
        fields = [GridField(grid=g, var=v, data=np.ones(g.ncells))
                  for v in ("rho", "U", "V", "P")]
        assert vectorize(fields).size == 40000

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        g = Grid2D(nx=6, ny=4, dx=0.1, dy=0.3)
        fields = [GridField(grid=g, var=v, data=rng.normal(size=(6, 4)))
                  for v in ("U", "V", "err:rho")]
        back = devectorize(vectorize(fields), g, ["U", "V", "err:rho"])
        for f0, f1 in zip(fields, back):
            assert f1.var == f0.var
            np.testing.assert_array_equal(f1.data, f0.data)

    def test_mixed_grids_rejected(self):
        g1 = Grid2D(nx=2, ny=2, dx=1.0, dy=1.0)
        g2 = Grid2D(nx=3, ny=3, dx=1.0, dy=1.0)
        with pytest.raises(ValueError):
            vectorize([GridField(grid=g1, var="U", data=np.zeros(4)),
                       GridField(grid=g2, var="V", data=np.zeros(9))])


class TestDecodeFlat:
    def test_round_trip_exhaustive(self):
        g = Grid2D(nx=3, ny=4, dx=1.0, dy=1.0)
        nvars = 3
        seen = []
        for m in range(nvars * g.ncells):
            fi = decode_flat(m, g, nvars)
            assert fi.m == m
            assert fi.i == g.flat_of(fi.kx, fi.my)
            assert fi.m == fi.v * g.ncells + fi.i - 1
            seen.append((fi.v, fi.kx, fi.my))
        assert len(set(seen)) == nvars * g.ncells

    def test_out_of_range(self):
        g = Grid2D(nx=2, ny=2, dx=1.0, dy=1.0)
        with pytest.raises(ValueError):
            decode_flat(-1, g, 2)
        with pytest.raises(ValueError):
            decode_flat(8, g, 2)


def _small_ensemble(n=3, nx=3, ny=2, seed=0):
    rng = np.random.default_rng(seed)
    g = Grid2D(nx=nx, ny=ny, dx=1.0 / nx, dy=1.0 / ny)
    variables = ("rho", "U")
    labels = tuple(f"s{j}" for j in range(n))
    data = rng.uniform(0.5, 3.0, size=(n, len(variables) * g.ncells))
    return SolutionEnsemble(grid=g, variables=variables, labels=labels, data=data)


class TestSolutionEnsemble:
    def test_minimum_size(self):
        with pytest.raises(ValueError):
            _small_ensemble(n=2)

    def test_duplicate_labels_rejected(self):
        g = Grid2D(nx=2, ny=2, dx=1.0, dy=1.0)
        with pytest.raises(ValueError):
            SolutionEnsemble(grid=g, variables=("U",), labels=("a", "a", "b"),
                             data=np.zeros((3, 4)))

    def test_shape_checked(self):
        g = Grid2D(nx=2, ny=2, dx=1.0, dy=1.0)
        with pytest.raises(ValueError):
            SolutionEnsemble(grid=g, variables=("U",), labels=("a", "b", "c"),
                             data=np.zeros((3, 5)))

    def test_counts(self):
        ens = _small_ensemble(n=4)
        assert ens.n == 4
        assert ens.M == 2 * 6

    def test_from_solutions_round_trip(self):
        ens = _small_ensemble(n=3)
        rebuilt = SolutionEnsemble.from_solutions(
            [(lab, ens.solution_fields(j)) for j, lab in enumerate(ens.labels)])
        np.testing.assert_array_equal(rebuilt.data, ens.data)
        assert rebuilt.labels == ens.labels

    def test_variable_block(self):
        ens = _small_ensemble(n=3)
        nc = ens.grid.ncells
        np.testing.assert_array_equal(ens.variable_block(1, "U"),
                                      ens.data[1, nc:2 * nc])

    def test_subset_preserves_order(self):
        ens = _small_ensemble(n=5)
        sub = ens.subset(["s3", "s0", "s4"])
        assert sub.labels == ("s3", "s0", "s4")
        np.testing.assert_array_equal(sub.data[1], ens.data[0])

    def test_subset_too_small_rejected(self):
        ens = _small_ensemble(n=5)
        with pytest.raises(ValueError):
            ens.subset(["s0", "s1"])


class TestEnsembleDifference:
    def test_values_and_antisymmetry(self):
        ens = _small_ensemble(n=4, seed=3)
        d01 = ensemble_difference(ens, 0, 1)
        np.testing.assert_allclose(d01, ens.data[0] - ens.data[1])
        np.testing.assert_allclose(ensemble_difference(ens, 1, 0), -d01)

    def test_bad_indices(self):
        ens = _small_ensemble(n=3)
        with pytest.raises(ValueError):
            ensemble_difference(ens, 0, 0)
        with pytest.raises(ValueError):
            ensemble_difference(ens, 0, 3)

    @given(st.integers(min_value=3, max_value=6), st.integers(min_value=0, max_value=10))
    @settings(max_examples=30, deadline=None)
    def test_cocycle_identity(self, n, seed):
        """d(i,j) + d(j,k) = d(i,k) for any three members."""
        ens = _small_ensemble(n=n, seed=seed)
        rng = np.random.default_rng(seed + 1)
        i, j, k = rng.choice(n, size=3, replace=False)
        lhs = ensemble_difference(ens, i, j) + ensemble_difference(ens, j, k)
        np.testing.assert_allclose(lhs, ensemble_difference(ens, i, k), atol=1e-15)
