"""Experiment drivers: time-convergence ladders, long runs, energy fits.

Temporal accuracy is measured Richardson-style: the error attributed to a
step size tau is the discrete H^-1 norm of the difference between the final
states computed with steps tau and tau/2 on the same grid, and the observed
order is log2 of the ratio of successive errors.

Long runs log (step, time, energy, mass, l2, linf, hm1) records at a fixed
cadence; coarsening energy decay is quantified by a least-squares power-law
fit E(t) ~ b * t^m in log-log coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BlowupError,
    InsufficientDataError,
    MeanError,
    NonpositiveEnergyError,
)
from .etd import StepperPlan, build_plan, etd1_update, etd2_update, rk2_initialize_update
from .model import Problem, free_energy, total_mass
from .spectral import (
    Field,
    Grid,
    mean,
    norm_hm1,
    norm_l2,
    norm_linf,
    physical_values,
    spectral_coeffs,
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One logged sample of a run; hm1 is NaN for non-zero-mean states."""

    step: int
    time: float
    energy: float
    mass: float
    l2: float
    linf: float
    hm1: float


@dataclass
class RunLog:
    """Diagnostics records plus the resolved configuration that produced them."""

    records: list
    params: dict
    seed: int | None = None


@dataclass(frozen=True)
class ConvergenceRow:
    tau: float
    error_hm1: float
    rate: float | None


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of E(t) = b_e * t^m_e over a time window."""

    m_e: float
    b_e: float
    fit_window: tuple[float, float]
    residual: float


def initial_condition(kind: str, grid: Grid, seed: int | None = None,
                      amplitude: float = 0.1) -> Field:
    """Named initial states.

    sine1d: 0.1*(sin 2*pi*x + sin 3*pi*x)
    sine2d: 0.05*sin(pi*x)*sin(pi*y)
    sine3d: 0.05*sin(pi*x)*sin(pi*y)*sin(pi*z)
    random_uniform: i.i.d. uniform on [-amplitude, amplitude] per node, drawn
    from numpy's seeded PCG64 generator so runs replay bit-identically.
    """
    if kind == "sine1d":
        if grid.dim != 1:
            raise ValueError("sine1d needs a 1D grid")
        (x,) = grid.coords()
        return Field(grid, 0.1 * (np.sin(2 * np.pi * x) + np.sin(3 * np.pi * x)))
    if kind == "sine2d":
        if grid.dim != 2:
            raise ValueError("sine2d needs a 2D grid")
        x, y = grid.coords()
        return Field(grid, 0.05 * np.sin(np.pi * x) * np.sin(np.pi * y))
    if kind == "sine3d":
        if grid.dim != 3:
            raise ValueError("sine3d needs a 3D grid")
        x, y, z = grid.coords()
        return Field(
            grid, 0.05 * np.sin(np.pi * x) * np.sin(np.pi * y) * np.sin(np.pi * z)
        )
    if kind == "random_uniform":
        rng = np.random.default_rng(seed)
        return Field(grid, rng.uniform(-amplitude, amplitude, size=grid.n))
    raise ValueError(f"unknown initial condition kind '{kind}'")


def richardson_error(u_coarse: Field, u_fine: Field) -> float:
    """Discrete H^-1 norm of the difference of two same-grid states.

    The zero-mean tolerance is taken relative to the solution magnitude, not
    the (possibly tiny) difference magnitude, since both runs conserve the
    mean to roundoff.
    """
    if u_coarse.grid != u_fine.grid:
        raise ValueError("states live on different grids")
    diff = Field(u_coarse.grid, u_coarse.values - u_fine.values)
    scale = max(norm_linf(u_coarse), norm_linf(u_fine))
    return norm_hm1(diff, mean_scale=scale)


def _num_steps(tau: float, t_end: float) -> int:
    n = round(t_end / tau)
    if n < 1 or abs(n * tau - t_end) > 1e-8 * max(t_end, 1.0):
        raise ValueError(f"t_end={t_end} is not an integer multiple of tau={tau}")
    return n


def _advance(plan: StepperPlan, uhat, u_values):
    if plan.scheme == "etd1":
        return etd1_update(plan, uhat, u_values)
    if plan.history is None:
        return rk2_initialize_update(plan, uhat, u_values)
    return etd2_update(plan, uhat, u_values)


def integrate_final(problem: Problem, scheme: str, tau: float, t_end: float,
                    u0: Field, nonlinearity=None) -> Field:
    """Step from u0 to t_end and return only the final state."""
    n_steps = _num_steps(tau, t_end)
    plan = build_plan(problem, scheme, tau, nonlinearity)
    uhat = spectral_coeffs(problem.grid, u0.values)
    u_values = u0.values
    for _ in range(n_steps):
        uhat = _advance(plan, uhat, u_values)
        u_values = physical_values(problem.grid, uhat)
        if not np.isfinite(u_values).all():
            raise BlowupError("non-finite state", step=plan.steps_taken)
    return Field(problem.grid, u_values)


def compute_rates(errors) -> list:
    """Observed orders log2(e_k-1 / e_k); None in the first slot."""
    rates = [None]
    for prev, cur in zip(errors[:-1], errors[1:]):
        rates.append(math.log2(prev / cur))
    return rates


def convergence_study(problem: Problem, scheme: str, tau0: float, levels: int,
                      t_end: float, u0: Field, nonlinearity=None) -> list:
    """Error/rate table for the ladder tau0 * 2^-k, k = 0..levels-1.

    Each row pairs the run at its tau with the run at tau/2, so levels+1
    integrations are performed.  A blow-up truncates the table at the rows
    already completed.
    """
    if levels < 1:
        raise ValueError("need at least one ladder level")
    finals = []
    try:
        for k in range(levels + 1):
            finals.append(
                integrate_final(problem, scheme, tau0 * 2.0**-k, t_end, u0, nonlinearity)
            )
    except BlowupError:
        if len(finals) < 2:
            raise
    errors = [
        richardson_error(coarse, fine) for coarse, fine in zip(finals[:-1], finals[1:])
    ]
    rates = compute_rates(errors)
    return [
        ConvergenceRow(tau=tau0 * 2.0**-k, error_hm1=e, rate=r)
        for k, (e, r) in enumerate(zip(errors, rates))
    ]


def _diagnose(problem: Problem, step: int, time: float, u: Field) -> DiagnosticsRecord:
    try:
        hm1 = norm_hm1(u)
    except MeanError:
        hm1 = float("nan")
    return DiagnosticsRecord(
        step=step,
        time=time,
        energy=free_energy(u, problem),
        mass=total_mass(u),
        l2=norm_l2(u),
        linf=norm_linf(u),
        hm1=hm1,
    )


def run_simulation(problem: Problem, scheme: str, tau: float, t_end: float,
                   u0: Field, *, log_every: int = 1, snapshot_every: int | None = None,
                   snapshot_writer=None, steady_stop_tol: float | None = None,
                   params: dict | None = None, seed: int | None = None,
                   nonlinearity=None) -> RunLog:
    """Step to t_end, logging diagnostics and optionally writing snapshots.

    snapshot_writer(values, time, step) is called at step 0, every
    snapshot_every steps, at the final step, and with the last good state if
    the run blows up.  With steady_stop_tol set, the run stops early once
    ||u^{n+1} - u^n||_inf / tau < steady_stop_tol.
    """
    n_steps = _num_steps(tau, t_end)
    if log_every < 1:
        raise ValueError("log_every must be >= 1")
    plan = build_plan(problem, scheme, tau, nonlinearity)
    grid = problem.grid
    uhat = spectral_coeffs(grid, u0.values)
    u_values = u0.values
    records = [_diagnose(problem, 0, 0.0, u0)]
    snapshots_on = snapshot_writer is not None and snapshot_every is not None
    if snapshots_on:
        snapshot_writer(u_values, 0.0, 0)
    last_logged = 0
    for step in range(1, n_steps + 1):
        prev_values = u_values
        try:
            uhat = _advance(plan, uhat, prev_values)
            u_values = physical_values(grid, uhat)
            if not np.isfinite(u_values).all():
                raise BlowupError("non-finite state", step=step)
        except BlowupError as exc:
            if snapshots_on:
                snapshot_writer(prev_values, (step - 1) * tau, step - 1)
            exc.partial_log = RunLog(records=records, params=params or {}, seed=seed)
            raise
        t = step * tau
        if step % log_every == 0:
            records.append(_diagnose(problem, step, t, Field(grid, u_values)))
            last_logged = step
        if snapshots_on and step % snapshot_every == 0:
            snapshot_writer(u_values, t, step)
        if steady_stop_tol is not None:
            rate = float(np.max(np.abs(u_values - prev_values))) / tau
            if rate < steady_stop_tol:
                break
    final_step = plan.steps_taken
    if last_logged != final_step:
        records.append(_diagnose(problem, final_step, final_step * tau,
                                 Field(grid, u_values)))
    if snapshots_on and (final_step % snapshot_every != 0 or final_step == 0):
        snapshot_writer(u_values, final_step * tau, final_step)
    return RunLog(records=records, params=params or {}, seed=seed)


def fit_power_law(log: RunLog, t_min: float, t_max: float) -> PowerLawFit:
    """Fit ln E = m * ln t + ln b over records with t_min <= t <= t_max."""
    if not t_min > 0:
        raise ValueError("t_min must be positive (log-log fit)")
    window = [r for r in log.records if t_min <= r.time <= t_max]
    if any(r.energy <= 0 for r in window):
        raise NonpositiveEnergyError("window contains non-positive energies")
    if len(window) < 10:
        raise InsufficientDataError(
            f"need at least 10 records in [{t_min}, {t_max}], found {len(window)}"
        )
    log_t = np.log([r.time for r in window])
    log_e = np.log([r.energy for r in window])
    slope, intercept = np.polyfit(log_t, log_e, 1)
    residual = float(np.sqrt(np.mean((log_e - (slope * log_t + intercept)) ** 2)))
    return PowerLawFit(
        m_e=float(slope),
        b_e=float(np.exp(intercept)),
        fit_window=(t_min, t_max),
        residual=residual,
    )


def default_fit_window(t_end: float) -> tuple[float, float]:
    """Window skipping the initial transient: [0.1*t_end, t_end]."""
    return (0.1 * t_end, t_end)
