import numpy as np
import pytest

import oracles
from nchetd.errors import SymmetryError
from nchetd.kernels import (
    KernelSpec,
    build_nonlocal_operator,
    conv_one,
    discrete_convolution,
    nonlocal_symbol,
    periodize_kernel,
)
from nchetd.spectral import Field, Grid, apply_symbol, inner, laplacian_symbol, norm_l2


def random_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    return Field(grid, rng.standard_normal(grid.n))


class TestKernelSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            KernelSpec(kind="gaussian", delta=-0.1)
        with pytest.raises(ValueError):
            KernelSpec(kind="gaussian")
        with pytest.raises(ValueError):
            KernelSpec(kind="tabulated")
        with pytest.raises(ValueError):
            KernelSpec(kind="exotic", delta=0.1)
        with pytest.raises(ValueError):
            KernelSpec(delta=0.1, image_cutoff=-1)


class TestPeriodize:
    def test_narrow_gaussian_single_image(self):
        # delta=0.1 on (-1,1): nearest image factor exp(-400), so the
        # periodization must equal the bare Gaussian restriction
        grid = Grid.box(1, 32, 1.0)
        J = periodize_kernel(KernelSpec(delta=0.1), grid)
        (x,) = grid.coords()
        bare = 4.0 / (np.pi**0.5 * 0.1**3) * np.exp(-(x**2) / 0.01)
        assert np.max(np.abs(J.values - bare)) <= 1e-15 * bare.max()
        assert np.all(J.values >= 0.0)

    def test_wide_gaussian_matches_brute_images(self):
        grid = Grid.box(2, 8, 1.0)
        J = periodize_kernel(KernelSpec(delta=1.5, image_cutoff=3), grid)
        brute = oracles.brute_periodized_gaussian(grid, 1.5, images=3)
        assert np.max(np.abs(J.values - brute)) <= 1e-14 * brute.max()

    def test_auto_cutoff_covers_wide_kernel(self):
        grid = Grid.box(1, 16, 1.0)
        J_auto = periodize_kernel(KernelSpec(delta=1.5), grid)
        J_many = periodize_kernel(KernelSpec(delta=1.5, image_cutoff=12), grid)
        assert np.max(np.abs(J_auto.values - J_many.values)) <= 1e-14 * J_many.values.max()

    def test_tabulated_returned_unchanged(self):
        grid = Grid.box(1, 8, 1.0)
        table = np.arange(8.0)
        J = periodize_kernel(KernelSpec(kind="tabulated", table=table), grid)
        assert np.array_equal(J.values, table)

    def test_cutoff_failure(self):
        grid = Grid.box(1, 8, 1e-6)
        with pytest.raises(ValueError):
            periodize_kernel(KernelSpec(delta=10.0), grid)


class TestConvOne:
    def test_constant_kernel(self):
        grid = Grid.box(2, 8, 1.0)
        assert conv_one(Field(grid, np.ones(grid.n))) == pytest.approx(4.0, abs=1e-14)
        assert conv_one(Field(grid, np.zeros(grid.n))) == 0.0

    def test_gaussian_mass(self):
        grid = Grid.box(2, 256, 1.0)
        J = periodize_kernel(KernelSpec(delta=0.1), grid)
        assert abs(conv_one(J) - 400.0) <= 1e-6 * 400.0

    def test_gaussian_mass_converges_monotonically(self):
        # spectral convergence: already at roundoff by N=64, where strict
        # monotonicity degenerates into noise of a few ulp of 400
        floor = 1e-12
        errs = []
        for n in (16, 32, 64, 128, 256):
            grid = Grid.box(2, n, 1.0)
            J = periodize_kernel(KernelSpec(delta=0.1), grid)
            errs.append(abs(conv_one(J) - 400.0))
        for coarse, fine in zip(errs[:-1], errs[1:]):
            assert fine <= coarse + floor
        assert errs[-1] <= max(1e-3 * errs[0], floor)


class TestNonlocalSymbol:
    def test_constant_kernel_eigenvalues(self):
        grid = Grid.box(2, 8, 1.0)
        lam = nonlocal_symbol(Field(grid, np.ones(grid.n))).values
        assert lam[0, 0] == 0.0
        mask = np.ones(grid.n, dtype=bool)
        mask[0, 0] = False
        assert np.max(np.abs(lam[mask] - 4.0)) <= 1e-12

    def test_zero_kernel(self):
        grid = Grid.box(1, 8, 1.0)
        lam = nonlocal_symbol(Field(grid, np.zeros(8))).values
        assert np.all(lam == 0.0)

    def test_matches_literal_sum(self):
        grid = Grid.box(1, 32, 1.0)
        J = periodize_kernel(KernelSpec(delta=0.1), grid)
        lam = nonlocal_symbol(J).values
        lit = oracles.literal_nonlocal_eigenvalues(grid, J.values)
        assert np.max(np.abs(lit.imag)) <= 1e-10 * np.max(np.abs(lit.real))
        scale = np.max(np.abs(lit.real))
        assert np.max(np.abs(lam - lit.real)) <= 1e-11 * scale

    def test_matches_literal_sum_2d(self):
        grid = Grid.box(2, 8, 1.0)
        J = periodize_kernel(KernelSpec(delta=0.4), grid)
        lam = nonlocal_symbol(J).values
        lit = oracles.literal_nonlocal_eigenvalues(grid, J.values)
        assert np.max(np.abs(lam - lit.real)) <= 1e-11 * np.max(np.abs(lit.real))

    def test_nonnegative_spectrum(self):
        grid = Grid.box(1, 64, 1.0)
        J = periodize_kernel(KernelSpec(delta=0.2), grid)
        lam = nonlocal_symbol(J).values
        assert np.min(lam) >= 0.0
        assert lam[0] == 0.0

    def test_asymmetric_kernel_rejected(self):
        grid = Grid.box(1, 8, 1.0)
        table = np.zeros(8)
        table[1] = 1.0  # no mirror partner: odd part breaks realness
        with pytest.raises(SymmetryError):
            nonlocal_symbol(Field(grid, table))


class TestDiscreteConvolution:
    def test_delta_kernel_translates(self):
        grid = Grid.box(1, 8, 1.0)
        f = random_field(grid, 3)
        delta = np.zeros(8)
        delta[4] = 1.0 / grid.cell_volume  # node x=0
        out = discrete_convolution(f, Field(grid, delta))
        assert np.max(np.abs(out.values - f.values)) <= 1e-12
        shifted = np.zeros(8)
        shifted[5] = 1.0 / grid.cell_volume  # node x=h
        out2 = discrete_convolution(f, Field(grid, shifted))
        assert np.max(np.abs(out2.values - np.roll(f.values, 1))) <= 1e-12

    def test_constant_input(self):
        grid = Grid.box(1, 8, 1.0)
        g = random_field(grid, 4)
        out = discrete_convolution(Field(grid, np.ones(8)), g)
        assert np.max(np.abs(out.values - conv_one(g))) <= 1e-12 * (
            1 + abs(conv_one(g))
        )

    def test_matches_brute_sum_1d(self):
        grid = Grid.box(1, 8, 1.0)
        f = random_field(grid, 5)
        g = random_field(grid, 6)
        out = discrete_convolution(f, g)
        brute = oracles.brute_convolution(grid, f.values, g.values)
        assert np.max(np.abs(out.values - brute)) <= 1e-12

    def test_matches_brute_sum_2d(self):
        grid = Grid.box(2, 8, 1.3)
        f = random_field(grid, 7)
        g = random_field(grid, 8)
        out = discrete_convolution(f, g)
        brute = oracles.brute_convolution(grid, f.values, g.values)
        assert np.max(np.abs(out.values - brute)) <= 1e-12 * np.max(np.abs(brute))


class TestOperatorProperties:
    @pytest.fixture()
    def setup(self):
        grid = Grid.box(2, 16, 1.0)
        J = periodize_kernel(KernelSpec(delta=0.4), grid)
        return grid, J, nonlocal_symbol(J)

    def test_convolution_identity(self, setup):
        grid, J, lam = setup
        f = random_field(grid, 9)
        lhs = apply_symbol(lam, f).values
        rhs = conv_one(J) * f.values - discrete_convolution(J, f).values
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(lhs))

    def test_commutes_with_laplacian(self, setup):
        grid, _, lam = setup
        lap = laplacian_symbol(grid)
        f = random_field(grid, 10)
        ab = apply_symbol(lap, apply_symbol(lam, f)).values
        ba = apply_symbol(lam, apply_symbol(lap, f)).values
        assert np.max(np.abs(ab - ba)) <= 1e-10 * np.max(np.abs(ab))

    def test_positive_semidefinite(self, setup):
        grid, _, lam = setup
        for seed in range(5):
            f = random_field(grid, 20 + seed)
            quad = inner(apply_symbol(lam, f), f)
            assert quad >= -1e-10 * norm_l2(f) ** 2

    def test_build_operator(self, setup):
        grid, J, lam = setup
        op = build_nonlocal_operator(KernelSpec(delta=0.4), grid)
        assert op.gamma0 is None
        assert op.j_conv_one == pytest.approx(conv_one(J), rel=1e-15)
        assert np.array_equal(op.lambda_symbol.values, lam.values)
