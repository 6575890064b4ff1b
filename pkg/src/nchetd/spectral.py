"""Fourier spectral collocation on periodic boxes.

Grids are uniform tensor products on Omega = prod_i (-X_i, X_i) with an even
number of nodes N_i per axis, x = -X_i + j*h_i, h_i = 2*X_i/N_i.  The forward
transform returns the coefficients of the trigonometric interpolant

    f(x) = sum_k  fhat_k * exp(i * k * pi * x / X),   k in (-N/2, N/2],

i.e. the forward carries the 1/N^d factor and the inverse carries none.
Diagonal (Fourier-multiplier) operators are represented as real per-mode
Symbol arrays stored in FFT layout, with the Nyquist index read as +N/2.

All discrete inner products and norms use the trapezoidal/rectangular weight
h^d, under which Parseval reads ||f||_2^2 = |Omega| * sum_k |fhat_k|^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import MeanError, SymmetryError

# Tolerances are relative to the magnitude of the data they guard.
IMAG_RESIDUE_TOL = 1e-10
MEAN_TOL = 1e-12


def _as_tuple(value, dim, cast):
    if np.isscalar(value):
        return (cast(value),) * dim
    out = tuple(cast(v) for v in value)
    if len(out) != dim:
        raise ValueError(f"expected {dim} per-axis values, got {len(out)}")
    return out


@dataclass(frozen=True)
class Grid:
    """Periodic collocation grid: node counts and half-widths per axis."""

    n: tuple[int, ...]
    half_width: tuple[float, ...]

    def __post_init__(self):
        if not 1 <= len(self.n) <= 3:
            raise ValueError("grid dimension must be 1, 2 or 3")
        if len(self.half_width) != len(self.n):
            raise ValueError("n and half_width must have the same length")
        for ni in self.n:
            if ni < 4 or ni % 2 != 0:
                raise ValueError("every axis needs an even node count >= 4")
        for xi in self.half_width:
            if not xi > 0:
                raise ValueError("half widths must be positive")

    @classmethod
    def box(cls, dim, n, half_width):
        """Build a grid from scalars or per-axis sequences."""
        return cls(_as_tuple(n, dim, int), _as_tuple(half_width, dim, float))

    @property
    def dim(self):
        return len(self.n)

    @property
    def h(self):
        return tuple(2.0 * x / n for x, n in zip(self.half_width, self.n))

    @property
    def num_points(self):
        return int(np.prod(self.n))

    @property
    def volume(self):
        return float(np.prod([2.0 * x for x in self.half_width]))

    @property
    def cell_volume(self):
        return float(np.prod(self.h))

    def axis_coords(self, axis):
        """Node coordinates along one axis, -X + h*j for j = 0..N-1."""
        return -self.half_width[axis] + self.h[axis] * np.arange(self.n[axis])

    def coords(self):
        """Broadcastable coordinate arrays (sparse meshgrid, 'ij' indexing)."""
        axes = [self.axis_coords(i) for i in range(self.dim)]
        return np.meshgrid(*axes, indexing="ij", sparse=True)

    def axis_modes(self, axis):
        """Integer wavenumbers in FFT layout with the Nyquist mode as +N/2."""
        n = self.n[axis]
        k = np.fft.fftfreq(n, d=1.0 / n)
        k[n // 2] = n // 2
        return k

    def mode_grids(self):
        axes = [self.axis_modes(i) for i in range(self.dim)]
        return np.meshgrid(*axes, indexing="ij", sparse=True)


@dataclass
class Field:
    """Real-valued grid function, values stored row-major over the grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.n:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.n}"
            )
        if not np.isfinite(self.values).all():
            raise ValueError("field contains non-finite values")

    def copy(self):
        return Field(self.grid, self.values.copy())


@dataclass
class SpectralField:
    """Complex Fourier coefficients of a grid function, FFT mode layout."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != self.grid.n:
            raise ValueError(
                f"coefficient shape {self.coeffs.shape} does not match grid {self.grid.n}"
            )


@dataclass
class Symbol:
    """Real per-mode eigenvalues of a Fourier-diagonal operator."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.n:
            raise ValueError(
                f"symbol shape {self.values.shape} does not match grid {self.grid.n}"
            )
        if not np.isfinite(self.values).all():
            raise ValueError("symbol contains non-finite values")


@lru_cache(maxsize=32)
def _mode_phase(grid):
    # exp(-i*k*pi*x0/X) = (-1)^k per axis: relates the raw FFT (which indexes
    # nodes from x0 = -X) to coefficients in the exp(i*k*pi*x/X) basis.
    phase = np.ones(grid.n)
    for axis in range(grid.dim):
        k = grid.axis_modes(axis)
        shape = [1] * grid.dim
        shape[axis] = grid.n[axis]
        phase = phase * ((-1.0) ** k).reshape(shape)
    return phase


def spectral_coeffs(grid, values):
    """Forward transform of a raw value array (no Field wrapping)."""
    return np.fft.fftn(values) * _mode_phase(grid) / grid.num_points


def physical_values(grid, coeffs):
    """Inverse transform to raw real values; errors on asymmetric input.

    The imaginary residue is compared against the coefficient mass
    sum_k |coeffs_k|, an upper bound for the field magnitude that stays
    meaningful when cancellation makes the real part tiny.
    """
    u = np.fft.ifftn(coeffs * _mode_phase(grid)) * grid.num_points
    scale = max(float(np.max(np.abs(u.real))), float(np.sum(np.abs(coeffs))))
    imag_max = float(np.max(np.abs(u.imag)))
    if imag_max > IMAG_RESIDUE_TOL * scale:
        raise SymmetryError(
            f"imaginary residue {imag_max:.3e} exceeds {IMAG_RESIDUE_TOL:g} "
            f"of field magnitude {scale:.3e}"
        )
    return np.ascontiguousarray(u.real)


def to_spectral(f: Field) -> SpectralField:
    """Discrete Fourier coefficients of f (forward carries the 1/N^d)."""
    return SpectralField(f.grid, spectral_coeffs(f.grid, f.values))


def to_physical(F: SpectralField) -> Field:
    """Grid values of a coefficient array; inverse of to_spectral."""
    return Field(F.grid, physical_values(F.grid, F.coeffs))


def laplacian_symbol(grid: Grid) -> Symbol:
    """Eigenvalues of the collocation Laplacian: -sum_i (k_i*pi/X_i)^2."""
    values = np.zeros(grid.n)
    for axis in range(grid.dim):
        k = grid.axis_modes(axis)
        shape = [1] * grid.dim
        shape[axis] = grid.n[axis]
        values = values - ((k * np.pi / grid.half_width[axis]) ** 2).reshape(shape)
    return Symbol(grid, values)


def apply_symbol(S: Symbol, f: Field) -> Field:
    """Apply a Fourier-diagonal operator to a field."""
    if S.grid != f.grid:
        raise ValueError("symbol and field live on different grids")
    return Field(f.grid, physical_values(f.grid, S.values * spectral_coeffs(f.grid, f.values)))


def inner(f: Field, g: Field) -> float:
    """Discrete L2 inner product h^d * sum(f*g)."""
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    return f.grid.cell_volume * float(np.sum(f.values * g.values))


def norm_l2(f: Field) -> float:
    """h^d-weighted Euclidean norm."""
    return float(np.sqrt(f.grid.cell_volume) * np.linalg.norm(f.values.ravel()))


def norm_linf(f: Field) -> float:
    """Maximum absolute nodal value."""
    return float(np.max(np.abs(f.values)))


def mean(f: Field) -> float:
    """Arithmetic mean of the nodal values (= h^d <f,1> / |Omega|)."""
    return float(np.mean(f.values))


def norm_hm1(f: Field, *, mean_scale: float | None = None) -> float:
    """Discrete H^-1 norm ||(-Laplacian)^(-1/2) f||_2 on zero-mean fields.

    mean_scale overrides the magnitude against which the zero-mean
    requirement is checked (default: the field's own max-norm); callers
    measuring small differences of large conserved states pass the state
    magnitude instead.
    """
    fmax = norm_linf(f)
    fbar = mean(f)
    if abs(fbar) > MEAN_TOL * (fmax if mean_scale is None else mean_scale):
        raise MeanError(
            f"H^-1 norm needs a zero-mean field; mean={fbar:.3e}, max={fmax:.3e}"
        )
    if fmax == 0.0:
        return 0.0
    coeffs = spectral_coeffs(f.grid, f.values)
    mu = -laplacian_symbol(f.grid).values
    zero = (0,) * f.grid.dim
    mu[zero] = 1.0  # zero mode is excluded below; avoid 0/0
    weights = np.abs(coeffs) ** 2 / mu
    weights[zero] = 0.0
    return float(np.sqrt(f.grid.volume * np.sum(weights)))


def refined_grid(grid: Grid, factor: float = 1.5) -> Grid:
    """Same box with the node count scaled up (rounded to even)."""
    n = tuple(2 * int(np.ceil(factor * ni / 2)) for ni in grid.n)
    return Grid(n, grid.half_width)


def _embed_axis(arr, axis, n_coarse, n_fine):
    shape = list(arr.shape)
    shape[axis] = n_fine
    out = np.zeros(shape, dtype=arr.dtype)
    half = n_coarse // 2
    src = [slice(None)] * arr.ndim
    dst = [slice(None)] * arr.ndim
    src[axis], dst[axis] = slice(0, half), slice(0, half)
    out[tuple(dst)] = arr[tuple(src)]
    src[axis], dst[axis] = slice(half + 1, n_coarse), slice(n_fine - half + 1, n_fine)
    out[tuple(dst)] = arr[tuple(src)]
    # split the Nyquist coefficient over +-N/2 to keep conjugate symmetry
    src[axis] = slice(half, half + 1)
    dst[axis] = slice(half, half + 1)
    out[tuple(dst)] = 0.5 * arr[tuple(src)]
    dst[axis] = slice(n_fine - half, n_fine - half + 1)
    out[tuple(dst)] = 0.5 * arr[tuple(src)]
    return out


def _extract_axis(arr, axis, n_fine, n_coarse):
    shape = list(arr.shape)
    shape[axis] = n_coarse
    out = np.zeros(shape, dtype=arr.dtype)
    half = n_coarse // 2
    src = [slice(None)] * arr.ndim
    dst = [slice(None)] * arr.ndim
    src[axis], dst[axis] = slice(0, half), slice(0, half)
    out[tuple(dst)] = arr[tuple(src)]
    src[axis], dst[axis] = slice(n_fine - half + 1, n_fine), slice(half + 1, n_coarse)
    out[tuple(dst)] = arr[tuple(src)]
    dst[axis] = slice(half, half + 1)
    src[axis] = slice(half, half + 1)
    out[tuple(dst)] = arr[tuple(src)]
    src[axis] = slice(n_fine - half, n_fine - half + 1)
    out[tuple(dst)] += arr[tuple(src)]
    return out


def pad_modes(grid: Grid, coeffs: np.ndarray, fine_grid: Grid) -> np.ndarray:
    """Zero-pad coefficients onto a finer grid of the same box."""
    out = coeffs
    for axis in range(grid.dim):
        out = _embed_axis(out, axis, grid.n[axis], fine_grid.n[axis])
    return out


def truncate_modes(fine_grid: Grid, coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Drop unresolved modes, folding +-N/2 back into the Nyquist slot."""
    out = coeffs
    for axis in range(grid.dim):
        out = _extract_axis(out, axis, fine_grid.n[axis], grid.n[axis])
    return out
