"""Nonlocal Cahn-Hilliard problem setup.

The equation is u_t = Laplacian(eps^2 * L u + f(u)) on a periodic box, with
the double-well potential F(u) = (u^2-1)^2/4, f = F', and L the nonlocal
diffusion operator from :mod:`nchetd.kernels`.  For stable exponential time
stepping the linear part is stabilized:

    L_h = -eps^2 * Laplacian_N * L_N - kappa * Laplacian_N,
    f_kappa(u) = f(u) - kappa*u,

so L_h is Fourier-diagonal with nonnegative eigenvalues
mu_k * (eps^2*lambda_k + kappa), mu_k = sum_i (k_i*pi/X_i)^2.

The model is positive diffusive only when gamma0 = eps^2*(J conv 1) - 1 > 0
(for the Gaussian kernel: delta < 2*eps); building a problem that violates
this raises by default.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BlowupError, GammaZeroError
from .kernels import KernelSpec, NonlocalOperator, build_nonlocal_operator
from .spectral import (
    Field,
    Grid,
    Symbol,
    laplacian_symbol,
    pad_modes,
    physical_values,
    refined_grid,
    spectral_coeffs,
    truncate_modes,
)

DEFAULT_KAPPA = {"etd1": 2.0, "etd2": 3.0}


@dataclass(frozen=True)
class ModelParams:
    """Interface width eps, stabilizer kappa, and the kernel choice."""

    epsilon: float
    kappa: float
    kernel: KernelSpec

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")


@dataclass
class Problem:
    """Grid, parameters, and the precomputed operator symbols of one run."""

    grid: Grid
    params: ModelParams
    lap_symbol: Symbol
    lh_symbol: Symbol
    nonlocal_op: NonlocalOperator

    @property
    def gamma0(self):
        return self.nonlocal_op.gamma0


def double_well_derivative(u: Field) -> Field:
    """f(u) = u^3 - u, the derivative of the double-well potential."""
    v = u.values
    return Field(u.grid, v * (v * v - 1.0))


def stabilized_nonlinearity(u: Field, kappa: float) -> Field:
    """f_kappa(u) = f(u) - kappa*u, the explicitly treated nonlinear part."""
    v = u.values
    return Field(u.grid, v * (v * v - 1.0) - kappa * v)


def stabilized_nonlinearity_values(values: np.ndarray, kappa: float) -> np.ndarray:
    """Array-level f_kappa used inside the stepping hot loop."""
    with np.errstate(over="ignore", invalid="ignore"):
        out = values * (values * values - 1.0) - kappa * values
    if not np.isfinite(out).all():
        raise BlowupError("non-finite values in nonlinear term")
    return out


def free_energy(u: Field, problem: Problem) -> float:
    """E(u) = h^d*sum F(u) + (eps^2/2) <L_N u, u>.

    The nonlocal part is evaluated spectrally:
    <L_N u, u> = |Omega| * sum_k lambda_k * |uhat_k|^2.
    """
    grid = u.grid
    v = u.values
    with np.errstate(over="ignore"):  # energy of an extreme state reads +inf
        well = 0.25 * float(np.sum((v * v - 1.0) ** 2)) * grid.cell_volume
    coeffs = spectral_coeffs(grid, v)
    quad = grid.volume * float(
        np.sum(problem.nonlocal_op.lambda_symbol.values * np.abs(coeffs) ** 2)
    )
    return well + 0.5 * problem.params.epsilon**2 * quad


def total_mass(u: Field) -> float:
    """h^d * sum(u); conserved exactly by the exponential steppers."""
    return u.grid.cell_volume * float(np.sum(u.values))


def build_problem(grid: Grid, params: ModelParams, strict_gamma0: bool = True) -> Problem:
    """Assemble operator symbols; checks gamma0 = eps^2*(J conv 1) - 1 > 0."""
    op = build_nonlocal_operator(params.kernel, grid)
    op.gamma0 = params.epsilon**2 * op.j_conv_one - 1.0
    if op.gamma0 <= 0:
        msg = (
            f"gamma0 = eps^2*(J conv 1) - 1 = {op.gamma0:.6g} <= 0; "
            f"the model is not positive diffusive (need delta < 2*eps for "
            f"the Gaussian kernel)"
        )
        if strict_gamma0:
            raise GammaZeroError(msg)
        warnings.warn(msg, stacklevel=2)
    lap = laplacian_symbol(grid)
    mu = -lap.values
    lh = Symbol(grid, mu * (params.epsilon**2 * op.lambda_symbol.values + params.kappa))
    return Problem(grid=grid, params=params, lap_symbol=lap, lh_symbol=lh, nonlocal_op=op)


def dealiased_nonlinearity(problem: Problem, factor: float = 1.5):
    """f_kappa evaluated on a padded grid (3/2-rule), for sensitivity runs.

    Pure collocation is the default; this hook plugs into a stepper plan's
    `nonlinearity` slot to quantify aliasing effects of the cubic term.
    """
    grid = problem.grid
    fine = refined_grid(grid, factor)
    kappa = problem.params.kappa

    def evaluate(values):
        coeffs = pad_modes(grid, spectral_coeffs(grid, values), fine)
        g = stabilized_nonlinearity_values(physical_values(fine, coeffs), kappa)
        return physical_values(grid, truncate_modes(fine, spectral_coeffs(fine, g), grid))

    return evaluate
