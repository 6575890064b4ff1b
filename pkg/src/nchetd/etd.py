"""Exponential time differencing steppers for the stabilized splitting.

The semi-discrete system  dU/dt + L_h U = Laplacian_N f_kappa(U)  is
diagonal in Fourier space, so the exponential integrators of Cox & Matthews
(J. Comput. Phys. 176, 2002) reduce to per-mode multipliers.  With
a_k = tau * lh_k >= 0 and

    phi_m1(a) = exp(-a),
    phi0(a)   = (1 - exp(-a)) / a,
    phi1(a)   = (a - 1 + exp(-a)) / a^2,

the first-order scheme updates  uhat <- phi_m1*uhat + tau*phi0*G(u)  and the
second-order multistep scheme
uhat <- phi_m1*uhat + tau*[(phi0+phi1)*G(u^n) - phi1*G(u^{n-1})], where
G(u) is the spectral image of Laplacian_N f_kappa(u).  The multistep scheme
is started with one exponential Runge-Kutta (predictor-corrector) step of
second order.  The zero mode has lh = 0 and G = 0, so both schemes conserve
the mean exactly.

phi0 and phi1 are evaluated by expm1-based closed forms for large arguments
and convergent Taylor series for small ones; see PHI0_SWITCH / PHI1_SWITCH.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowupError, DomainError, MissingHistoryError
from .model import Problem, stabilized_nonlinearity_values
from .spectral import Field, physical_values, spectral_coeffs

# Branch switch points.  Above the switch the expm1-based closed forms are
# accurate to a few ulp; below it the truncated series are.  phi1's closed
# form loses ~2*eps/a relative accuracy to cancellation, so its series
# branch extends all the way to a = 1.
PHI0_SWITCH = 1e-3
PHI1_SWITCH = 1.0

# phi0 series: sum_{j>=0} (-a)^j/(j+1)!, truncation error < a^6/7! at the
# switch point (~1e-22 relative).
_PHI0_COEFFS = [1.0 / math.factorial(j + 1) for j in range(6)]
# phi1 series: sum_{j>=0} (-a)^j/(j+2)!; 24 terms leave < 1/26! at a = 1.
_PHI1_COEFFS = [1.0 / math.factorial(j + 2) for j in range(24)]


def _check_domain(a):
    a = np.asarray(a, dtype=float)
    if a.size and float(np.min(a)) < 0.0:
        raise DomainError("phi functions are defined for a >= 0")
    return a


def _horner(coeffs, t):
    acc = np.full_like(t, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * t + c
    return acc


def phi0_series(a):
    return _horner(_PHI0_COEFFS, -np.asarray(a, dtype=float))


def phi0_closed(a):
    a = np.asarray(a, dtype=float)
    return -np.expm1(-a) / a


def phi1_series(a):
    return _horner(_PHI1_COEFFS, -np.asarray(a, dtype=float))


def phi1_closed(a):
    a = np.asarray(a, dtype=float)
    return (a + np.expm1(-a)) / (a * a)


def _branched(a, series, closed, switch):
    small = a < switch
    out = np.empty_like(a)
    if small.any():
        out[small] = series(a[small])
    big = ~small
    if big.any():
        out[big] = closed(a[big])
    return out


def phi_m1(a):
    """exp(-a) for a >= 0."""
    a = _check_domain(a)
    return np.exp(-a) if a.ndim else float(np.exp(-a))


def phi0(a):
    """(1 - exp(-a))/a, continued by 1 at a = 0."""
    arr = _check_domain(a)
    out = _branched(np.atleast_1d(arr), phi0_series, phi0_closed, PHI0_SWITCH)
    return out.reshape(arr.shape) if arr.ndim else float(out[0])


def phi1(a):
    """(a - 1 + exp(-a))/a^2, continued by 1/2 at a = 0."""
    arr = _check_domain(a)
    out = _branched(np.atleast_1d(arr), phi1_series, phi1_closed, PHI1_SWITCH)
    return out.reshape(arr.shape) if arr.ndim else float(out[0])


@dataclass
class PhiTable:
    """Per-mode ETD multipliers evaluated at a = tau * lh."""

    a: np.ndarray
    phi_m1: np.ndarray
    phi0: np.ndarray
    phi1: np.ndarray


def build_phi_table(tau: float, lh_values: np.ndarray) -> PhiTable:
    a = tau * lh_values
    return PhiTable(a=a, phi_m1=phi_m1(a), phi0=phi0(a), phi1=phi1(a))


@dataclass
class StepperPlan:
    """One (scheme, tau) stepping sequence over a fixed problem.

    Owns the multistep history (spectral image of Laplacian_N f_kappa of the
    previous state) and a step counter, so a plan must not be shared between
    concurrent runs.  `nonlinearity` maps nodal values to nodal values and
    defaults to f_kappa with the problem's kappa; tests override it.
    """

    scheme: str
    tau: float
    problem: Problem
    phi: PhiTable
    nonlinearity: object = None
    history: np.ndarray | None = None
    steps_taken: int = field(default=0)

    def nonlinear_values(self, u_values):
        if self.nonlinearity is not None:
            return self.nonlinearity(u_values)
        return stabilized_nonlinearity_values(u_values, self.problem.params.kappa)


def build_plan(problem: Problem, scheme: str, tau: float, nonlinearity=None) -> StepperPlan:
    if scheme not in ("etd1", "etd2"):
        raise ValueError(f"unknown scheme '{scheme}'")
    if not tau > 0:
        raise ValueError("tau must be positive")
    phi = build_phi_table(tau, problem.lh_symbol.values)
    return StepperPlan(scheme=scheme, tau=tau, problem=problem, phi=phi,
                       nonlinearity=nonlinearity)


def _nonlinear_hat(plan: StepperPlan, u_values: np.ndarray) -> np.ndarray:
    """Spectral image of Laplacian_N f_kappa(u)."""
    try:
        g = plan.nonlinear_values(u_values)
    except BlowupError as exc:
        raise BlowupError(str(exc), step=plan.steps_taken + 1) from None
    if not np.isfinite(g).all():
        raise BlowupError("non-finite values in nonlinear term",
                          step=plan.steps_taken + 1)
    return plan.problem.lap_symbol.values * spectral_coeffs(plan.problem.grid, g)


def etd1_update(plan: StepperPlan, uhat: np.ndarray, u_values: np.ndarray) -> np.ndarray:
    """One first-order update on spectral state; advances the step counter."""
    ghat = _nonlinear_hat(plan, u_values)
    out = plan.phi.phi_m1 * uhat + plan.tau * plan.phi.phi0 * ghat
    plan.steps_taken += 1
    return out


def etd2_update(plan: StepperPlan, uhat: np.ndarray, u_values: np.ndarray) -> np.ndarray:
    """One second-order multistep update; consumes and refreshes history."""
    if plan.history is None:
        raise MissingHistoryError(
            "etd2 plan must be initialized (etd2_initialize) before stepping"
        )
    ghat = _nonlinear_hat(plan, u_values)
    out = plan.phi.phi_m1 * uhat + plan.tau * (
        (plan.phi.phi0 + plan.phi.phi1) * ghat - plan.phi.phi1 * plan.history
    )
    plan.history = ghat
    plan.steps_taken += 1
    return out


def rk2_initialize_update(plan: StepperPlan, uhat0: np.ndarray,
                          u0_values: np.ndarray) -> np.ndarray:
    """Exponential RK2 starting step: predictor = first-order update,
    corrector adds tau*phi1*(G(predictor) - G(u0)).

    The multistep history is set to G(u0), so the following step applies the
    two-step formula with the genuine pair (U^1, U^0)."""
    grid = plan.problem.grid
    ghat0 = _nonlinear_hat(plan, u0_values)
    pred_hat = plan.phi.phi_m1 * uhat0 + plan.tau * plan.phi.phi0 * ghat0
    pred_values = physical_values(grid, pred_hat)
    if not np.isfinite(pred_values).all():
        raise BlowupError("non-finite predictor state in startup step", step=1)
    ghat_pred = _nonlinear_hat(plan, pred_values)
    out = pred_hat + plan.tau * plan.phi.phi1 * (ghat_pred - ghat0)
    plan.history = ghat0
    plan.steps_taken += 1
    return out


def _finish(plan: StepperPlan, uhat: np.ndarray) -> Field:
    values = physical_values(plan.problem.grid, uhat)
    if not np.isfinite(values).all():
        raise BlowupError("non-finite state after update", step=plan.steps_taken)
    return Field(plan.problem.grid, values)


def etd1_step(plan: StepperPlan, u: Field) -> Field:
    """First-order exponential step, field in / field out."""
    if plan.scheme != "etd1":
        raise ValueError("plan was built for a different scheme")
    uhat = spectral_coeffs(u.grid, u.values)
    return _finish(plan, etd1_update(plan, uhat, u.values))


def etd2_step(plan: StepperPlan, u: Field) -> Field:
    """Second-order multistep exponential step, field in / field out."""
    if plan.scheme != "etd2":
        raise ValueError("plan was built for a different scheme")
    uhat = spectral_coeffs(u.grid, u.values)
    return _finish(plan, etd2_update(plan, uhat, u.values))


def etd2_initialize(plan: StepperPlan, u0: Field) -> Field:
    """Starting step for the multistep scheme; returns the state at t = tau."""
    if plan.scheme != "etd2":
        raise ValueError("initializer applies to etd2 plans only")
    uhat = spectral_coeffs(u0.grid, u0.values)
    return _finish(plan, rk2_initialize_update(plan, uhat, u0.values))


def step_field(plan: StepperPlan, u: Field) -> Field:
    """Scheme-dispatching single step (initializes etd2 on first call)."""
    if plan.scheme == "etd1":
        return etd1_step(plan, u)
    if plan.history is None:
        return etd2_initialize(plan, u)
    return etd2_step(plan, u)
