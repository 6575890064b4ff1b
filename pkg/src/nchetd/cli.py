"""Command line driver: convergence ladders, long runs, fits, selftest.

Exit codes: 0 success, 1 validation problem, 2 runtime blow-up, 3 I/O or
file-format problem.  Failures print one line ``category: message`` on
stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments, io_formats, kernels, model, spectral
from .errors import (
    BlowupError,
    ConfigError,
    FileFormatError,
    GammaZeroError,
    NchetdError,
)
from .etd import build_plan, etd1_step, etd2_initialize, etd2_step
from .io_formats import RunConfig, config_echo


def load_config(path: str, overrides) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    table = io_formats.parse_document(text)
    table = io_formats.apply_overrides(table, overrides or [])
    return io_formats.build_config(table)


def build_problem_from_config(config: RunConfig):
    grid = config.grid()
    params = model.ModelParams(
        epsilon=config.epsilon,
        kappa=config.kappa,
        kernel=kernels.KernelSpec(kind="gaussian", delta=config.delta),
    )
    return model.build_problem(grid, params, strict_gamma0=config.strict_gamma0)


def initial_state(config: RunConfig, grid) -> spectral.Field:
    if config.init_kind == "file":
        field, _ = io_formats.read_snapshot(config.init_path)
        if field.grid != grid:
            raise ConfigError(
                f"snapshot grid {field.grid.n} does not match config grid {grid.n}",
                field="init.path",
            )
        return field
    return experiments.initial_condition(
        config.init_kind, grid, seed=config.init_seed, amplitude=config.init_amplitude
    )


def _nonlinearity(config: RunConfig, problem):
    return model.dealiased_nonlinearity(problem) if config.dealias else None


def _resolve_out_dir(config: RunConfig, cli_out_dir) -> Path:
    out = cli_out_dir or config.out_dir
    if out is None:
        raise ConfigError("an output directory is required", field="out_dir")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_converge(args) -> int:
    config = load_config(args.config, args.set)
    if args.seed is not None:
        config = io_formats.override_config(config, init_seed=args.seed)
    if config.levels is None:
        raise ConfigError("converge needs the number of ladder levels", field="levels")
    out_dir = _resolve_out_dir(config, args.out_dir)
    problem = build_problem_from_config(config)
    u0 = initial_state(config, problem.grid)
    rows = experiments.convergence_study(
        problem, config.scheme, config.tau, config.levels, config.t_end, u0,
        nonlinearity=_nonlinearity(config, problem),
    )
    target = out_dir / "rates.csv"
    io_formats.write_rate_csv(rows, target, echo=config_echo(config))
    for row in rows:
        rate = "--" if row.rate is None else f"{row.rate:.4f}"
        print(f"tau={row.tau:.6g}  error_hm1={row.error_hm1:.6e}  rate={rate}")
    print(f"wrote {target}")
    return 0


def cmd_run(args) -> int:
    config = load_config(args.config, args.set)
    if args.seed is not None:
        config = io_formats.override_config(config, init_seed=args.seed)
    out_dir = _resolve_out_dir(config, args.out_dir)
    problem = build_problem_from_config(config)
    u0 = initial_state(config, problem.grid)

    def write_snap(values, time, step):
        field = spectral.Field(problem.grid, values)
        io_formats.write_snapshot(field, time, out_dir / f"snapshot_{step:08d}.nchs")

    echo = config_echo(config)
    try:
        log = experiments.run_simulation(
            problem, config.scheme, config.tau, config.t_end, u0,
            log_every=config.log_every,
            snapshot_every=config.snapshot_every,
            snapshot_writer=write_snap if config.snapshot_every else None,
            steady_stop_tol=args.steady_tol,
            params=echo,
            seed=config.init_seed,
            nonlinearity=_nonlinearity(config, problem),
        )
    except BlowupError as exc:
        partial = getattr(exc, "partial_log", None)
        if partial is not None:
            io_formats.write_runlog_csv(partial, out_dir / "runlog.csv")
        raise
    target = out_dir / "runlog.csv"
    io_formats.write_runlog_csv(log, target)
    last = log.records[-1]
    print(
        f"finished at step {last.step} (t={last.time:g}): energy={last.energy:.9g} "
        f"mass={last.mass:.3e}"
    )
    print(f"wrote {target}")
    return 0


def cmd_fit(args) -> int:
    log = io_formats.read_runlog_csv(args.runlog)
    if not log.records:
        raise ConfigError(f"{args.runlog} has no records")
    t_last = log.records[-1].time
    t_min, t_max = experiments.default_fit_window(t_last)
    if args.t_min is not None:
        t_min = args.t_min
    if args.t_max is not None:
        t_max = args.t_max
    fit = experiments.fit_power_law(log, t_min, t_max)
    out = Path(args.out) if args.out else Path(args.runlog).with_name("fit.csv")
    io_formats.write_fit_csv(fit, out, echo=log.params)
    print(f"m_e={fit.m_e:.6g}  b_e={fit.b_e:.6g}  residual={fit.residual:.3e}")
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# selftest

def _selftest_checks():
    rng = np.random.default_rng(2024)

    def check_roundtrip():
        grid = spectral.Grid.box(2, 32, 1.0)
        f = spectral.Field(grid, rng.standard_normal(grid.n))
        back = spectral.to_physical(spectral.to_spectral(f))
        err = np.max(np.abs(back.values - f.values))
        assert err <= 1e-12 * spectral.norm_linf(f), err

    def check_parseval():
        grid = spectral.Grid.box(1, 64, 2.0)
        f = spectral.Field(grid, rng.standard_normal(grid.n))
        coeffs = spectral.to_spectral(f).coeffs
        lhs = spectral.norm_l2(f) ** 2
        rhs = grid.volume * float(np.sum(np.abs(coeffs) ** 2))
        assert abs(lhs - rhs) <= 1e-10 * lhs, (lhs, rhs)

    def check_laplacian_eigenfunction():
        grid = spectral.Grid.box(1, 32, 1.0)
        (x,) = grid.coords()
        f = spectral.Field(grid, np.sin(np.pi * x))
        lap = spectral.apply_symbol(spectral.laplacian_symbol(grid), f)
        err = np.max(np.abs(lap.values + np.pi**2 * f.values))
        assert err <= 1e-10, err

    def check_nonlocal_identity():
        grid = spectral.Grid.box(1, 64, 1.0)
        J = kernels.periodize_kernel(kernels.KernelSpec(delta=0.3), grid)
        lam = kernels.nonlocal_symbol(J)
        f = spectral.Field(grid, rng.standard_normal(grid.n))
        lhs = spectral.apply_symbol(lam, f).values
        rhs = kernels.conv_one(J) * f.values - kernels.discrete_convolution(J, f).values
        scale = np.max(np.abs(lhs)) + 1e-30
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * scale

    def check_phi_bounds():
        from .etd import phi0, phi1, phi_m1

        a = np.logspace(-6, 3, 200)
        # (1+a)*exp(-a) < 1 checked in log form: exp(-a) underflows past
        # a ~ 745 and the direct product would compare 0 < 0
        assert np.all(np.log1p(a) - a < 0), "phi_m1 upper bound"
        mid = a[a <= 500.0]
        p = (1 + mid) * phi_m1(mid)
        assert np.all((p > 0) & (p < 1)), "phi_m1 bound"
        q = (1 + a) * phi0(a)
        r = (1 + a) * phi1(a)
        assert np.all((q > 1) & (q < 1.5)), "phi0 bound"
        assert np.all((r > 0.5) & (r < 1)), "phi1 bound"

    def check_scheme_consistency():
        grid = spectral.Grid.box(1, 16, 1.0)
        params = model.ModelParams(
            epsilon=0.2, kappa=3.0, kernel=kernels.KernelSpec(delta=0.2)
        )
        problem = model.build_problem(grid, params)
        u0 = spectral.Field(grid, 0.1 * np.sin(2 * np.pi * grid.axis_coords(0)))
        plan2 = build_plan(problem, "etd2", 1e-3)
        u1 = etd2_initialize(plan2, u0)
        u2 = etd2_step(plan2, u1)
        mass0 = model.total_mass(u0)
        mass2 = model.total_mass(u2)
        assert abs(mass2 - mass0) <= 1e-13 * (1 + abs(mass0))
        # matching history reduces the multistep update to the one-step one
        plan1 = build_plan(problem, "etd1", 1e-3)
        plan2b = build_plan(problem, "etd2", 1e-3)
        plan2b.history = problem.lap_symbol.values * spectral.spectral_coeffs(
            grid, model.stabilized_nonlinearity(u0, 3.0).values
        )
        a = etd1_step(plan1, u0)
        b = etd2_step(plan2b, u0)
        assert np.max(np.abs(a.values - b.values)) <= 1e-13

    return [
        ("transform round trip", check_roundtrip),
        ("parseval identity", check_parseval),
        ("laplacian eigenfunction", check_laplacian_eigenfunction),
        ("nonlocal operator identity", check_nonlocal_identity),
        ("phi function bounds", check_phi_bounds),
        ("stepper consistency", check_scheme_consistency),
    ]


def cmd_selftest(_args) -> int:
    failures = 0
    for name, check in _selftest_checks():
        try:
            check()
        except Exception as exc:  # report every failing check, keep going
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"ok   {name}")
    return 1 if failures else 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nch-etd",
        description="Exponential time differencing solver for the nonlocal "
        "Cahn-Hilliard equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="path to a run config")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", default=[],
                       help="override a config key (init table via init.key)")
        p.add_argument("--out-dir", help="override the output directory")
        p.add_argument("--seed", type=int, help="override init.seed")

    p = sub.add_parser("converge", help="run a tau-ladder and write rates.csv")
    add_common(p)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("run", help="time-step a configuration, write runlog + snapshots")
    add_common(p)
    p.add_argument("--steady-tol", type=float, default=None,
                   help="stop once ||du||_inf/tau drops below this")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fit", help="fit E(t)=b*t^m to a runlog CSV")
    p.add_argument("runlog", help="runlog CSV produced by 'run'")
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--out", help="output CSV (default: fit.csv next to the input)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GammaZeroError, ValueError) as exc:
        print(f"validation: {exc}", file=sys.stderr)
        return 1
    except BlowupError as exc:
        step = f" at step {exc.step}" if exc.step is not None else ""
        print(f"blowup: {exc}{step}", file=sys.stderr)
        return 2
    except (OSError, FileFormatError) as exc:
        print(f"io: {exc}", file=sys.stderr)
        return 3
    except NchetdError as exc:
        print(f"validation: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
