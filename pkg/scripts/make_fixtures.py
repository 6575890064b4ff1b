#!/usr/bin/env python3
"""Regenerate the checked-in format fixtures shared by both packages.

The figure scripts never import the solver package; these files pin the
on-disk formats so that drift on either side fails a test instead of
producing silently wrong plots.
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from nchetd.experiments import (  # noqa: E402
    DiagnosticsRecord,
    RunLog,
    fit_power_law,
    initial_condition,
    run_simulation,
)
from nchetd.io_formats import (  # noqa: E402
    write_fit_csv,
    write_rate_csv,
    write_runlog_csv,
    write_snapshot,
)
from nchetd.kernels import KernelSpec  # noqa: E402
from nchetd.model import ModelParams, build_problem  # noqa: E402
from nchetd.spectral import Field, Grid  # noqa: E402

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "fixtures"


def synthetic_energy_log():
    t = np.logspace(0.0, 2.0, 64)
    records = [
        DiagnosticsRecord(step=i, time=float(tt), energy=float(tt ** (-1.0 / 3.0)),
                          mass=0.0, l2=1.0, linf=1.0, hm1=float("nan"))
        for i, tt in enumerate(t)
    ]
    log = RunLog(records=records, params={"source": "synthetic-power-law"})
    write_runlog_csv(log, FIXTURES / "energy_decay_runlog.csv")
    fit = fit_power_law(log, float(t[0]), float(t[-1]))
    write_fit_csv(fit, FIXTURES / "energy_decay_fit.csv", echo=log.params)


def synthetic_rate_table():
    from nchetd.experiments import ConvergenceRow

    rows = []
    tau, err = 0.005, 4.0e-5
    for k in range(6):
        rows.append(ConvergenceRow(tau=tau, error_hm1=err,
                                   rate=None if k == 0 else 1.0))
        tau, err = tau / 2, err / 2
    write_rate_csv(rows, FIXTURES / "rates.csv", echo={"source": "synthetic-ladder"})


def coarsening_snapshots():
    grid = Grid.box(2, 32, np.pi)
    prob = build_problem(grid, ModelParams(0.3, 3.0, KernelSpec(delta=0.3)))
    u0 = initial_condition("random_uniform", grid, seed=123, amplitude=0.1)
    times = []

    def writer(values, time, step):
        if len(times) < 6 and (not times or time > times[-1]):
            write_snapshot(Field(grid, values), time,
                           FIXTURES / f"coarsening_{len(times)}.nchs")
            times.append(time)

    run_simulation(prob, "etd2", 0.01, 5.0, u0, log_every=100,
                   snapshot_every=100, snapshot_writer=writer)
    assert len(times) == 6, times


def steady_profile_snapshot():
    grid = Grid.box(1, 256, 1.0)
    prob = build_problem(grid, ModelParams(0.15, 3.0, KernelSpec(delta=0.1)))
    u0 = initial_condition("sine1d", grid)
    final = {}

    def writer(values, time, step):
        final["values"] = values
        final["time"] = time

    run_simulation(prob, "etd2", 0.001, 8.0, u0, log_every=1000,
                   snapshot_every=4000, snapshot_writer=writer,
                   steady_stop_tol=1e-7)
    write_snapshot(Field(grid, final["values"]), final["time"],
                   FIXTURES / "steady_profile.nchs")


if __name__ == "__main__":
    FIXTURES.mkdir(exist_ok=True)
    synthetic_energy_log()
    synthetic_rate_table()
    coarsening_snapshots()
    steady_profile_snapshot()
    print(f"fixtures written to {FIXTURES}")
