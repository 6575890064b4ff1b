"""Independent brute-force oracles used by the test suite.

Everything here is built from literal definitions (explicit DFT sums, dense
matrices, nested-loop convolutions) and never calls the FFT-based code paths
it checks.
"""

import numpy as np


def literal_forward_coeffs(grid, values):
    """O(N^2) forward transform: (1/N^d) sum f * exp(-i*k*pi*x/X) per mode."""
    n = grid.n
    dim = grid.dim
    out = np.zeros(n, dtype=complex)
    coords = [grid.axis_coords(a) for a in range(dim)]
    modes = [grid.axis_modes(a) for a in range(dim)]
    for idx in np.ndindex(*n):
        k = [modes[a][idx[a]] for a in range(dim)]
        acc = 0.0 + 0.0j
        for jdx in np.ndindex(*n):
            phase = sum(
                k[a] * np.pi * coords[a][jdx[a]] / grid.half_width[a]
                for a in range(dim)
            )
            acc += values[jdx] * np.exp(-1j * phase)
        out[idx] = acc / grid.num_points
    return out


def literal_inverse_values(grid, coeffs):
    """O(N^2) inverse transform: sum fhat * exp(+i*k*pi*x/X) per node."""
    n = grid.n
    dim = grid.dim
    out = np.zeros(n, dtype=complex)
    coords = [grid.axis_coords(a) for a in range(dim)]
    modes = [grid.axis_modes(a) for a in range(dim)]
    for jdx in np.ndindex(*n):
        acc = 0.0 + 0.0j
        for idx in np.ndindex(*n):
            phase = sum(
                modes[a][idx[a]] * np.pi * coords[a][jdx[a]] / grid.half_width[a]
                for a in range(dim)
            )
            acc += coeffs[idx] * np.exp(1j * phase)
        out[jdx] = acc
    return out


def literal_nonlocal_eigenvalues(grid, kernel_values):
    """Explicit sum  lambda_k = h^d sum_x J(x) (1 - exp(-i k.pi x/X))."""
    n = grid.n
    dim = grid.dim
    out = np.zeros(n, dtype=complex)
    coords = [grid.axis_coords(a) for a in range(dim)]
    modes = [grid.axis_modes(a) for a in range(dim)]
    hd = grid.cell_volume
    for idx in np.ndindex(*n):
        k = [modes[a][idx[a]] for a in range(dim)]
        acc = 0.0 + 0.0j
        for jdx in np.ndindex(*n):
            phase = sum(
                k[a] * np.pi * coords[a][jdx[a]] / grid.half_width[a]
                for a in range(dim)
            )
            acc += kernel_values[jdx] * (1.0 - np.exp(-1j * phase))
        out[idx] = hd * acc
    return out


def brute_convolution(grid, f_values, g_values):
    """Quadrature convolution h^d sum_y f(x - y) g(y), kernel centered at 0.

    The node with coordinate x_i - y_m is looked up by periodic index
    arithmetic: x-index (i - m + N/2) mod N per axis.
    """
    n = grid.n
    out = np.zeros(n)
    for idx in np.ndindex(*n):
        acc = 0.0
        for mdx in np.ndindex(*n):
            src = tuple(
                (idx[a] - mdx[a] + n[a] // 2) % n[a] for a in range(grid.dim)
            )
            acc += f_values[src] * g_values[mdx]
        out[idx] = grid.cell_volume * acc
    return out


def brute_periodized_gaussian(grid, delta, images):
    """Direct lattice-image sum of the free-space Gaussian (no separability)."""
    d = grid.dim
    amp = 4.0 / (np.pi ** (d / 2.0) * delta ** (d + 2))
    out = np.zeros(grid.n)
    coords = [grid.axis_coords(a) for a in range(d)]
    for idx in np.ndindex(*grid.n):
        x = np.array([coords[a][idx[a]] for a in range(d)])
        acc = 0.0
        for img in np.ndindex(*([2 * images + 1] * d)):
            m = np.array(img) - images
            y = x + 2.0 * np.array(grid.half_width) * m
            acc += np.exp(-np.dot(y, y) / delta**2)
        out[idx] = amp * acc
    return out


# ---------------------------------------------------------------------------
# dense matrix-function oracle for the exponential steppers

def _dft_matrices(grid):
    """Literal DFT matrix pair (forward with 1/N^d, inverse plain) flattened."""
    mats_f = []
    mats_i = []
    for a in range(grid.dim):
        x = grid.axis_coords(a)
        k = grid.axis_modes(a)
        w = np.exp(-1j * np.outer(k, x) * np.pi / grid.half_width[a])
        mats_f.append(w / grid.n[a])
        mats_i.append(np.exp(1j * np.outer(x, k) * np.pi / grid.half_width[a]))
    F = mats_f[0]
    Finv = mats_i[0]
    for mf, mi in zip(mats_f[1:], mats_i[1:]):
        F = np.kron(F, mf)
        Finv = np.kron(Finv, mi)
    return F, Finv


def dense_operator(grid, symbol_values):
    """Dense real-symmetric matrix of a Fourier-diagonal operator."""
    F, Finv = _dft_matrices(grid)
    M = Finv @ np.diag(symbol_values.ravel()) @ F
    assert np.max(np.abs(M.imag)) < 1e-10 * (1 + np.max(np.abs(M.real)))
    M = M.real
    return 0.5 * (M + M.T)


def _stable_phi0(w):
    return np.where(w == 0.0, 1.0, -np.expm1(-w) / np.where(w == 0.0, 1.0, w))


def _stable_phi1(w):
    safe = np.where(w == 0.0, 1.0, w)
    small = np.abs(w) < 1e-4
    series = 0.5 - w / 6.0 + w**2 / 24.0 - w**3 / 120.0
    return np.where(small, series, (w + np.expm1(-w)) / safe**2)


def matrix_phi(A, kind):
    """phi function of a dense symmetric matrix via eigendecomposition."""
    w, V = np.linalg.eigh(A)
    if kind == "m1":
        d = np.exp(-w)
    elif kind == "0":
        d = _stable_phi0(w)
    elif kind == "1":
        d = _stable_phi1(w)
    else:
        raise ValueError(kind)
    return (V * d) @ V.T


def dense_etd1_step(A, B, tau, kappa, u):
    """u+ = exp(-tau A) u + tau phi0(tau A) B f_kappa(u), dense arithmetic."""
    fk = u**3 - u - kappa * u
    return matrix_phi(tau * A, "m1") @ u + tau * (matrix_phi(tau * A, "0") @ (B @ fk))


def dense_etd2_step(A, B, tau, kappa, u_cur, u_prev):
    fk_cur = u_cur**3 - u_cur - kappa * u_cur
    fk_prev = u_prev**3 - u_prev - kappa * u_prev
    p0 = matrix_phi(tau * A, "0")
    p1 = matrix_phi(tau * A, "1")
    return (
        matrix_phi(tau * A, "m1") @ u_cur
        + tau * ((p0 + p1) @ (B @ fk_cur) - p1 @ (B @ fk_prev))
    )


def dense_rk2_start(A, B, tau, kappa, u0):
    fk0 = u0**3 - u0 - kappa * u0
    pred = matrix_phi(tau * A, "m1") @ u0 + tau * (matrix_phi(tau * A, "0") @ (B @ fk0))
    fkp = pred**3 - pred - kappa * pred
    return pred + tau * (matrix_phi(tau * A, "1") @ (B @ (fkp - fk0)))
