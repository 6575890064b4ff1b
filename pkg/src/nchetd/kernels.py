"""Convolution kernels and the spectral nonlocal diffusion operator.

The nonlocal operator acts as L u = (J conv 1) u - J conv u for an
integrable, even, box-periodic kernel J.  On the collocation grid it is
diagonal in Fourier space with eigenvalues

    lambda_k = h^d * sum_nodes J(x) * (1 - exp(-i*k*pi*x/X))
             = |Omega| * (Jhat_0 - Jhat_k),

which are real and nonnegative.  The Gaussian kernel

    J(x) = 4 / (pi^(d/2) * delta^(d+2)) * exp(-|x|^2 / delta^2)

is periodized by lattice-image summation; it satisfies J conv 1 = 4/delta^2
up to the (spectrally small) quadrature and periodization error.

Discrete convolutions are quadratures of the periodic convolution with the
kernel centered at the node x = 0, so that the operator identity above holds
exactly in floating point (up to roundoff).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SymmetryError
from .spectral import Field, Grid, Symbol, physical_values, spectral_coeffs

TAIL_TOL = 1e-15  # discarded periodization images, relative to J(0)
MAX_AUTO_IMAGES = 64


@dataclass(frozen=True)
class KernelSpec:
    """Kernel description: a Gaussian of width delta, or a tabulated field.

    image_cutoff limits the lattice-image sum of the periodization per axis;
    None picks the smallest cutoff whose discarded tail is below TAIL_TOL
    relative to J(0).  Tabulated kernels carry their grid values directly.
    """

    kind: str = "gaussian"
    delta: float | None = None
    image_cutoff: int | None = None
    table: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "tabulated"):
            raise ValueError(f"unknown kernel kind '{self.kind}'")
        if self.kind == "gaussian":
            if self.delta is None or not self.delta > 0:
                raise ValueError("gaussian kernel needs delta > 0")
        elif self.table is None:
            raise ValueError("tabulated kernel needs a value table")
        if self.image_cutoff is not None and self.image_cutoff < 0:
            raise ValueError("image_cutoff must be >= 0")


@dataclass
class NonlocalOperator:
    """Spectral nonlocal diffusion operator built from a grid kernel."""

    lambda_symbol: Symbol
    j_conv_one: float
    gamma0: float | None = None  # eps^2*(J conv 1) - 1, filled by the model


def _auto_cutoff(delta, half_width):
    # Nearest discarded image sits at distance >= X*(2M+1) from any node;
    # require its Gaussian factor to clear TAIL_TOL with margin for the
    # number of discarded images.
    reach = delta * np.sqrt(-np.log(TAIL_TOL * 1e-3))
    for m in range(MAX_AUTO_IMAGES + 1):
        if half_width * (2 * m + 1) >= reach:
            return m
    raise ValueError(
        f"periodization cutoff {MAX_AUTO_IMAGES} too small for delta={delta}, "
        f"half_width={half_width}"
    )


def periodize_kernel(spec: KernelSpec, grid: Grid) -> Field:
    """Grid restriction of the box-periodized kernel (image summation)."""
    if spec.kind == "tabulated":
        return Field(grid, spec.table)
    delta = spec.delta
    d = grid.dim
    amplitude = 4.0 / (np.pi ** (d / 2.0) * delta ** (d + 2))
    axis_sums = []
    for axis in range(d):
        x = grid.axis_coords(axis)
        hw = grid.half_width[axis]
        m = spec.image_cutoff if spec.image_cutoff is not None else _auto_cutoff(delta, hw)
        s = np.zeros_like(x)
        for img in range(-m, m + 1):
            s += np.exp(-((x + 2.0 * hw * img) ** 2) / delta**2)
        shape = [1] * d
        shape[axis] = grid.n[axis]
        axis_sums.append(s.reshape(shape))
    values = amplitude * np.ones(grid.n)
    for s in axis_sums:
        values = values * s
    return Field(grid, values)


def conv_one(J: Field) -> float:
    """Discrete convolution of the kernel with 1: h^d * sum(J)."""
    return J.grid.cell_volume * float(np.sum(J.values))


def nonlocal_symbol(J: Field) -> Symbol:
    """Eigenvalues |Omega|*(Jhat_0 - Jhat_k) of the nonlocal operator."""
    grid = J.grid
    coeffs = spectral_coeffs(grid, J.values)
    zero = (0,) * grid.dim
    lam = grid.volume * (coeffs[zero] - coeffs)
    lam_max = float(np.max(np.abs(lam.real)))
    scale = max(lam_max, grid.volume * float(np.abs(coeffs[zero])))
    imag_max = float(np.max(np.abs(lam.imag)))
    if scale > 0 and imag_max > 1e-10 * scale:
        raise SymmetryError(
            f"nonlocal eigenvalues have imaginary residue {imag_max:.3e} "
            f"(kernel not even?)"
        )
    values = lam.real
    if float(np.min(values)) < -1e-12 * max(lam_max, 1.0):
        raise ValueError("nonlocal eigenvalues significantly negative; bad kernel")
    # roundoff can leave eigenvalues a few ulp below zero; clamp so that
    # downstream symbols stay in the phi-function domain
    np.maximum(values, 0.0, out=values)
    values[zero] = 0.0
    return Symbol(grid, values)


def discrete_convolution(f: Field, g: Field) -> Field:
    """Periodic quadrature convolution h^d * sum_y f(x-y) g(y), via FFT."""
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    grid = f.grid
    coeffs = grid.volume * spectral_coeffs(grid, f.values) * spectral_coeffs(grid, g.values)
    return Field(grid, physical_values(grid, coeffs))


def build_nonlocal_operator(spec: KernelSpec, grid: Grid) -> NonlocalOperator:
    """Periodize the kernel and assemble its spectral operator."""
    J = periodize_kernel(spec, grid)
    return NonlocalOperator(lambda_symbol=nonlocal_symbol(J), j_conv_one=conv_one(J))
