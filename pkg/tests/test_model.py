import warnings

import numpy as np
import pytest

from nchetd.errors import GammaZeroError
from nchetd.kernels import KernelSpec
from nchetd.model import (
    ModelParams,
    build_problem,
    dealiased_nonlinearity,
    double_well_derivative,
    free_energy,
    stabilized_nonlinearity,
    total_mass,
)
from nchetd.spectral import (
    Field,
    Grid,
    apply_symbol,
    inner,
    mean,
    norm_l2,
    to_spectral,
)


def const_field(grid, c):
    return Field(grid, np.full(grid.n, float(c)))


def random_field(grid, seed=0, demean=False):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(grid.n)
    if demean:
        v -= v.mean()
    return Field(grid, v)


def zero_kernel_problem(grid, epsilon=0.1, kappa=2.0):
    spec = KernelSpec(kind="tabulated", table=np.zeros(grid.n))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_problem(
            grid, ModelParams(epsilon, kappa, spec), strict_gamma0=False
        )


class TestNonlinearity:
    def test_double_well_derivative_values(self):
        grid = Grid.box(1, 8, 1.0)
        assert np.all(double_well_derivative(const_field(grid, 0)).values == 0.0)
        assert np.all(double_well_derivative(const_field(grid, 1)).values == 0.0)
        assert np.all(double_well_derivative(const_field(grid, -1)).values == 0.0)
        assert double_well_derivative(const_field(grid, 2)).values[0] == 6.0

    def test_stabilized_values(self):
        grid = Grid.box(1, 8, 1.0)
        assert np.all(stabilized_nonlinearity(const_field(grid, 0), 3.0).values == 0.0)
        f0 = stabilized_nonlinearity(random_field(grid, 1), 0.0).values
        assert np.array_equal(f0, double_well_derivative(random_field(grid, 1)).values)
        assert stabilized_nonlinearity(const_field(grid, 1), 2.0).values[0] == -2.0

    def test_kappa_shift_identity(self):
        grid = Grid.box(1, 16, 1.0)
        u = random_field(grid, 2)
        kappa = 2.7
        lhs = stabilized_nonlinearity(u, kappa).values + kappa * u.values
        rhs = double_well_derivative(u).values
        assert np.max(np.abs(lhs - rhs)) <= 4e-16 * np.max(np.abs(rhs) + 1)


class TestEnergyAndMass:
    def test_energy_of_constants(self):
        grid = Grid.box(2, 16, 1.0)
        prob = zero_kernel_problem(grid)
        assert free_energy(const_field(grid, 0), prob) == pytest.approx(1.0, abs=1e-14)
        assert free_energy(const_field(grid, 1), prob) == pytest.approx(0.0, abs=1e-14)
        for c in (-0.5, 0.3, 2.0):
            expected = grid.volume * 0.25 * (c**2 - 1) ** 2
            assert free_energy(const_field(grid, c), prob) == pytest.approx(
                expected, abs=1e-12 * (1 + expected)
            )

    def test_energy_constant_with_gaussian_kernel(self):
        # the nonlocal quadratic form vanishes on constants for any kernel
        grid = Grid.box(2, 32, 1.0)
        prob = build_problem(
            grid, ModelParams(0.5, 2.0, KernelSpec(delta=0.3))
        )
        e = free_energy(const_field(grid, 0.7), prob)
        expected = grid.volume * 0.25 * (0.7**2 - 1) ** 2
        assert e == pytest.approx(expected, rel=1e-12)

    def test_energy_double_well_quadrature(self):
        grid = Grid.box(1, 64, 1.0)
        prob = zero_kernel_problem(grid)
        (x,) = grid.coords()
        u = Field(grid, np.sin(np.pi * x))
        direct = grid.cell_volume * sum(
            0.25 * (v * v - 1.0) ** 2 for v in u.values.tolist()
        )
        assert abs(free_energy(u, prob) - direct) <= 1e-12 * (1 + abs(direct))

    def test_energy_includes_nonlocal_form(self):
        grid = Grid.box(1, 32, 1.0)
        params = ModelParams(0.3, 2.0, KernelSpec(delta=0.3))
        prob = build_problem(grid, params)
        u = random_field(grid, 3)
        well = grid.cell_volume * float(np.sum(0.25 * (u.values**2 - 1.0) ** 2))
        lu = apply_symbol(prob.nonlocal_op.lambda_symbol, u)
        expected = well + 0.5 * params.epsilon**2 * inner(lu, u)
        assert free_energy(u, prob) == pytest.approx(expected, rel=1e-10)

    def test_mass(self):
        grid = Grid.box(2, 16, 1.0)
        assert total_mass(const_field(grid, 0.7)) == pytest.approx(4 * 0.7, rel=1e-14)
        (x, y) = grid.coords()
        sine = Field(grid, np.sin(np.pi * x) * np.ones_like(y))
        assert abs(total_mass(sine)) <= 1e-14
        u = random_field(grid, 4)
        assert total_mass(u) == pytest.approx(grid.volume * mean(u), rel=1e-13)


class TestBuildProblem:
    def test_gamma0_positive(self):
        grid = Grid.box(2, 64, 1.0)
        prob = build_problem(grid, ModelParams(0.1, 2.0, KernelSpec(delta=0.1)))
        assert prob.gamma0 == pytest.approx(3.0, abs=1e-6)

    def test_gamma0_negative_strict(self):
        grid = Grid.box(2, 64, 1.0)
        with pytest.raises(GammaZeroError):
            build_problem(grid, ModelParams(0.1, 2.0, KernelSpec(delta=0.3)))

    def test_gamma0_negative_warns(self):
        grid = Grid.box(2, 64, 1.0)
        with pytest.warns(UserWarning):
            prob = build_problem(
                grid, ModelParams(0.1, 2.0, KernelSpec(delta=0.3)), strict_gamma0=False
            )
        assert prob.gamma0 < 0

    def test_lh_symbol_formula(self):
        grid = Grid.box(1, 32, 1.0)
        params = ModelParams(0.25, 1.5, KernelSpec(delta=0.2))
        prob = build_problem(grid, params)
        mu = -prob.lap_symbol.values
        lam = prob.nonlocal_op.lambda_symbol.values
        expected = mu * (params.epsilon**2 * lam + params.kappa)
        assert np.array_equal(prob.lh_symbol.values, expected)
        assert prob.lh_symbol.values[0] == 0.0
        assert np.all(prob.lh_symbol.values[1:] > 0.0)

    def test_lh_symbol_without_stabilizer(self):
        grid = Grid.box(1, 32, 1.0)
        params = ModelParams(0.25, 0.0, KernelSpec(delta=0.2))
        prob = build_problem(grid, params)
        mu = -prob.lap_symbol.values
        lam = prob.nonlocal_op.lambda_symbol.values
        assert np.array_equal(prob.lh_symbol.values, mu * (params.epsilon**2 * lam))

    def test_params_validation(self):
        with pytest.raises(ValueError):
            ModelParams(-0.1, 2.0, KernelSpec(delta=0.1))
        with pytest.raises(ValueError):
            ModelParams(0.1, -2.0, KernelSpec(delta=0.1))

    def test_lh_self_adjoint(self):
        grid = Grid.box(2, 16, 1.0)
        prob = build_problem(grid, ModelParams(0.3, 2.0, KernelSpec(delta=0.4)))
        f = random_field(grid, 5)
        g = random_field(grid, 6)
        sym = prob.lh_symbol
        lhs = inner(apply_symbol(sym, f), g)
        rhs = inner(f, apply_symbol(sym, g))
        assert abs(lhs - rhs) <= 1e-10 * norm_l2(f) * norm_l2(g)

    def test_lh_positive_definite_on_zero_mean(self):
        grid = Grid.box(2, 16, 1.0)
        prob = build_problem(grid, ModelParams(0.3, 2.0, KernelSpec(delta=0.4)))
        for seed in range(5):
            f = random_field(grid, 30 + seed, demean=True)
            assert inner(apply_symbol(prob.lh_symbol, f), f) > 0.0


class TestDealiasing:
    def test_band_limited_cube_matches_fine_grid_oracle(self):
        # modes up to K < N/3: the 3/2-padded product is alias-free, while
        # plain collocation already aliases for K > N/6
        n, k_max = 24, 7
        grid = Grid.box(1, n, 1.0)
        rng = np.random.default_rng(11)
        coeffs = np.zeros(n, dtype=complex)
        for k in range(1, k_max + 1):
            c = rng.standard_normal() + 1j * rng.standard_normal()
            coeffs[k] = c
            coeffs[-k] = np.conj(c)
        from nchetd.spectral import SpectralField, to_physical

        u = to_physical(SpectralField(grid, coeffs))
        prob = zero_kernel_problem(grid, kappa=0.0)

        fine = Grid.box(1, 4 * n, 1.0)
        (xf,) = fine.coords()
        u_fine = np.zeros(4 * n)
        for k in range(1, k_max + 1):
            u_fine = u_fine + 2 * np.real(coeffs[k] * np.exp(1j * k * np.pi * xf))
        cube_fine = to_spectral(Field(fine, u_fine**3 - u_fine))
        from nchetd.spectral import truncate_modes

        expected_coeffs = truncate_modes(fine, cube_fine.coeffs, grid)
        from nchetd.spectral import physical_values

        expected = physical_values(grid, expected_coeffs)

        dealiased = dealiased_nonlinearity(prob)(u.values)
        assert np.max(np.abs(dealiased - expected)) <= 1e-12 * np.max(np.abs(expected))

        plain = u.values**3 - u.values
        assert np.max(np.abs(plain - expected)) > 1e-6  # aliasing is real
