"""Run configuration documents and bit-exact file formats.

Config documents are flat ``key = value`` lines plus one ``[init]``
sub-table; ``#`` starts a comment.  Every output artifact embeds the fully
resolved configuration as ``#``-prefixed echo lines, so a run can be
replayed byte-identically from any of its outputs.

CSV floats are printed with 17 significant digits (lossless for IEEE
doubles).  Snapshots are little-endian binary: magic ``NCHS``, format
version, dim, per-axis node counts and half-widths, the sample time, then
the row-major float64 payload.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    BadMagic,
    ConfigError,
    FileFormatError,
    SnapshotFormatError,
    TruncatedPayload,
    VersionMismatch,
)
from .model import DEFAULT_KAPPA
from .spectral import Field, Grid

SNAPSHOT_MAGIC = b"NCHS"
SNAPSHOT_VERSION = 1

RUNLOG_HEADER = "step,time,energy,mass,l2,linf,hm1"
RATE_HEADER = "tau,error_hm1,rate"
FIT_HEADER = "m_e,b_e,t_min,t_max,residual"


def fmt_float(x: float) -> str:
    """Shortest 17-significant-digit form; round-trips any double."""
    return f"{x:.17g}"


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved description of one run (or one converge ladder)."""

    scheme: str
    dim: int
    n: tuple[int, ...]
    half_width: tuple[float, ...]
    epsilon: float
    delta: float
    kappa: float
    tau: float
    t_end: float
    init_kind: str
    init_seed: int | None = None
    init_amplitude: float = 0.1
    init_path: str | None = None
    levels: int | None = None
    log_every: int = 1
    snapshot_every: int | None = None
    out_dir: str | None = None
    strict_gamma0: bool = True
    dealias: bool = False

    def grid(self) -> Grid:
        return Grid(self.n, self.half_width)


# ---------------------------------------------------------------------------
# config document parsing

def parse_document(text: str) -> dict:
    """Parse the key-value document into a flat dict ('init.' prefixes)."""
    table = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section != "init":
                raise ConfigError(f"unknown section '[{section}]'", line=lineno)
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=lineno)
        full_key = f"{section}.{key}" if section else key
        if full_key in table:
            raise ConfigError(f"duplicate key '{full_key}'", line=lineno)
        table[full_key] = value
    return table


def _parse_bool(raw, field):
    low = raw.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got '{raw}'", field=field)


def _parse_int(raw, field):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"expected an integer, got '{raw}'", field=field) from None


def _parse_float(raw, field):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"expected a number, got '{raw}'", field=field) from None


def _parse_axis_list(raw, dim, field, cast):
    parts = [p.strip() for p in raw.split(",")] if "," in raw else [raw.strip()]
    try:
        values = [cast(p) for p in parts]
    except ValueError:
        raise ConfigError(f"expected {dim} numbers, got '{raw}'", field=field) from None
    if len(values) == 1:
        values = values * dim
    if len(values) != dim:
        raise ConfigError(
            f"expected 1 or {dim} comma-separated values, got {len(values)}",
            field=field,
        )
    return tuple(values)


def build_config(table: dict) -> RunConfig:
    """Validate a flat key/value table and apply defaults."""
    table = dict(table)

    def take(key, default=None, required=False):
        if key in table:
            return table.pop(key)
        if required:
            raise ConfigError("missing required key", field=key)
        return default

    scheme = str(take("scheme", required=True)).strip().lower()
    if scheme not in ("etd1", "etd2"):
        raise ConfigError(f"scheme must be etd1 or etd2, got '{scheme}'", field="scheme")
    dim = _parse_int(take("dim", required=True), "dim")
    if dim not in (1, 2, 3):
        raise ConfigError("dim must be 1, 2 or 3", field="dim")
    n = _parse_axis_list(str(take("n", required=True)), dim, "n", int)
    for ni in n:
        if ni < 4 or ni % 2:
            raise ConfigError("every n must be even and >= 4", field="n")
    half_width = _parse_axis_list(
        str(take("half_width", required=True)), dim, "half_width", float
    )
    for x in half_width:
        if not x > 0:
            raise ConfigError("half_width must be positive", field="half_width")
    epsilon = _parse_float(take("epsilon", required=True), "epsilon")
    if not epsilon > 0:
        raise ConfigError("epsilon must be positive", field="epsilon")
    delta = _parse_float(take("delta", required=True), "delta")
    if not delta > 0:
        raise ConfigError("delta must be positive", field="delta")
    kappa_raw = take("kappa")
    kappa = DEFAULT_KAPPA[scheme] if kappa_raw is None else _parse_float(kappa_raw, "kappa")
    if kappa < 0:
        raise ConfigError("kappa must be nonnegative", field="kappa")
    tau = _parse_float(take("tau", required=True), "tau")
    if not tau > 0:
        raise ConfigError("tau must be positive", field="tau")
    t_end = _parse_float(take("t_end", required=True), "t_end")
    if not t_end > 0:
        raise ConfigError("t_end must be positive", field="t_end")
    levels_raw = take("levels")
    levels = None if levels_raw is None else _parse_int(levels_raw, "levels")
    if levels is not None and levels < 1:
        raise ConfigError("levels must be >= 1", field="levels")
    log_every = _parse_int(take("log_every", 1), "log_every")
    if log_every < 1:
        raise ConfigError("log_every must be >= 1", field="log_every")
    snap_raw = take("snapshot_every")
    if snap_raw is None or str(snap_raw).strip().lower() == "none":
        snapshot_every = None
    else:
        snapshot_every = _parse_int(snap_raw, "snapshot_every")
        if snapshot_every < 1:
            raise ConfigError("snapshot_every must be >= 1", field="snapshot_every")
    out_dir_raw = take("out_dir")
    out_dir = None if out_dir_raw is None else str(out_dir_raw)
    strict_gamma0 = _parse_bool(str(take("strict_gamma0", "true")), "strict_gamma0")
    dealias = _parse_bool(str(take("dealias", "false")), "dealias")

    init_kind = str(take("init.kind", required=True)).strip()
    if init_kind not in ("sine1d", "sine2d", "sine3d", "random_uniform", "file"):
        raise ConfigError(f"unknown init kind '{init_kind}'", field="init.kind")
    seed_raw = take("init.seed")
    init_seed = None if seed_raw is None else _parse_int(seed_raw, "init.seed")
    init_amplitude = _parse_float(take("init.amplitude", "0.1"), "init.amplitude")
    if not init_amplitude > 0:
        raise ConfigError("init.amplitude must be positive", field="init.amplitude")
    path_raw = take("init.path")
    init_path = None if path_raw is None else str(path_raw)
    if init_kind == "file" and init_path is None:
        raise ConfigError("init.path required for kind=file", field="init.path")

    if table:
        raise ConfigError(f"unknown key '{sorted(table)[0]}'", field=sorted(table)[0])

    return RunConfig(
        scheme=scheme, dim=dim, n=n, half_width=half_width, epsilon=epsilon,
        delta=delta, kappa=kappa, tau=tau, t_end=t_end, init_kind=init_kind,
        init_seed=init_seed, init_amplitude=init_amplitude, init_path=init_path,
        levels=levels, log_every=log_every, snapshot_every=snapshot_every,
        out_dir=out_dir, strict_gamma0=strict_gamma0, dealias=dealias,
    )


def parse_config(text: str) -> RunConfig:
    return build_config(parse_document(text))


def config_echo(config: RunConfig) -> dict:
    """Flat ordered key/value echo; feeding it back to build_config replays."""
    echo = {
        "scheme": config.scheme,
        "dim": str(config.dim),
        "n": ", ".join(str(v) for v in config.n),
        "half_width": ", ".join(fmt_float(v) for v in config.half_width),
        "epsilon": fmt_float(config.epsilon),
        "delta": fmt_float(config.delta),
        "kappa": fmt_float(config.kappa),
        "tau": fmt_float(config.tau),
        "t_end": fmt_float(config.t_end),
    }
    if config.levels is not None:
        echo["levels"] = str(config.levels)
    echo["log_every"] = str(config.log_every)
    if config.snapshot_every is not None:
        echo["snapshot_every"] = str(config.snapshot_every)
    if config.out_dir is not None:
        echo["out_dir"] = config.out_dir
    echo["strict_gamma0"] = "true" if config.strict_gamma0 else "false"
    echo["dealias"] = "true" if config.dealias else "false"
    echo["init.kind"] = config.init_kind
    if config.init_seed is not None:
        echo["init.seed"] = str(config.init_seed)
    echo["init.amplitude"] = fmt_float(config.init_amplitude)
    if config.init_path is not None:
        echo["init.path"] = config.init_path
    return echo


def serialize_config(config: RunConfig) -> str:
    """Render a config document that parses back to the same RunConfig."""
    echo = config_echo(config)
    top = [f"{k} = {v}" for k, v in echo.items() if not k.startswith("init.")]
    init = [f"{k[5:]} = {v}" for k, v in echo.items() if k.startswith("init.")]
    return "\n".join(top + ["", "[init]"] + init) + "\n"


def apply_overrides(table: dict, overrides) -> dict:
    """Apply --set key=value pairs (dotted keys reach the init table)."""
    out = dict(table)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        out[key] = value
    return out


# ---------------------------------------------------------------------------
# runlog CSV

def _echo_lines(echo: dict | None):
    if not echo:
        return []
    return [f"# {k} = {v}" for k, v in echo.items()]


def write_runlog_csv(log, path) -> None:
    """Write diagnostics records; `#` lines echo the resolved config."""
    lines = _echo_lines(log.params)
    if log.seed is not None and "init.seed" not in (log.params or {}):
        lines.append(f"# init.seed = {log.seed}")
    lines.append(RUNLOG_HEADER)
    for r in log.records:
        lines.append(
            f"{r.step},{fmt_float(r.time)},{fmt_float(r.energy)},"
            f"{fmt_float(r.mass)},{fmt_float(r.l2)},{fmt_float(r.linf)},"
            f"{fmt_float(r.hm1)}"
        )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_runlog_csv(path):
    """Parse a runlog CSV back into (records, echo-dict)."""
    from .experiments import DiagnosticsRecord, RunLog

    echo = {}
    records = []
    with open(path) as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            stripped = line[1:].strip()
            if "=" in stripped:
                key, value = (part.strip() for part in stripped.split("=", 1))
                echo[key] = value
            continue
        if line.strip():
            body.append(line)
    if not body or body[0] != RUNLOG_HEADER:
        raise FileFormatError(f"{path}: missing runlog header line")
    for line in body[1:]:
        parts = line.split(",")
        if len(parts) != 7:
            raise FileFormatError(f"{path}: malformed runlog row '{line}'")
        records.append(
            DiagnosticsRecord(
                step=int(parts[0]), time=float(parts[1]), energy=float(parts[2]),
                mass=float(parts[3]), l2=float(parts[4]), linf=float(parts[5]),
                hm1=float(parts[6]),
            )
        )
    seed = int(echo["init.seed"]) if "init.seed" in echo else None
    return RunLog(records=records, params=echo, seed=seed)


# ---------------------------------------------------------------------------
# rate table and fit CSV

def write_rate_csv(rows, path, echo: dict | None = None) -> None:
    lines = _echo_lines(echo)
    lines.append(RATE_HEADER)
    for row in rows:
        rate = "" if row.rate is None else fmt_float(row.rate)
        lines.append(f"{fmt_float(row.tau)},{fmt_float(row.error_hm1)},{rate}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_fit_csv(fit, path, echo: dict | None = None) -> None:
    lines = _echo_lines(echo)
    lines.append(FIT_HEADER)
    lines.append(
        f"{fmt_float(fit.m_e)},{fmt_float(fit.b_e)},{fmt_float(fit.fit_window[0])},"
        f"{fmt_float(fit.fit_window[1])},{fmt_float(fit.residual)}"
    )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# snapshot binary format

def write_snapshot(field: Field, time: float, path) -> None:
    grid = field.grid
    d = grid.dim
    header = struct.pack("<4sII", SNAPSHOT_MAGIC, SNAPSHOT_VERSION, d)
    header += struct.pack(f"<{d}I", *grid.n)
    header += struct.pack(f"<{d}d", *grid.half_width)
    header += struct.pack("<d", float(time))
    payload = np.ascontiguousarray(field.values, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header + payload)


def read_snapshot(path):
    """Read a snapshot; returns (Field, time)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 12 or blob[:4] != SNAPSHOT_MAGIC:
        raise BadMagic(f"{path}: not a snapshot file")
    version, dim = struct.unpack("<II", blob[4:12])
    if version != SNAPSHOT_VERSION:
        raise VersionMismatch(f"{path}: unsupported snapshot version {version}")
    if dim not in (1, 2, 3):
        raise SnapshotFormatError(f"{path}: bad dimension {dim}")
    header_size = 12 + 4 * dim + 8 * dim + 8
    if len(blob) < header_size:
        raise TruncatedPayload(f"{path}: header truncated")
    offset = 12
    n = struct.unpack(f"<{dim}I", blob[offset:offset + 4 * dim])
    offset += 4 * dim
    half_width = struct.unpack(f"<{dim}d", blob[offset:offset + 8 * dim])
    offset += 8 * dim
    (time,) = struct.unpack("<d", blob[offset:offset + 8])
    offset += 8
    expected = 8 * int(np.prod(n))
    payload = blob[offset:]
    if len(payload) < expected:
        raise TruncatedPayload(
            f"{path}: payload has {len(payload)} bytes, expected {expected}"
        )
    if len(payload) > expected:
        raise SnapshotFormatError(f"{path}: trailing bytes after payload")
    values = np.frombuffer(payload, dtype="<f8").reshape(n).astype(float)
    grid = Grid(tuple(int(v) for v in n), tuple(float(v) for v in half_width))
    return Field(grid, values), float(time)


def snapshot_header_size(dim: int) -> int:
    return 12 + 12 * dim + 8


def override_config(config: RunConfig, **kwargs) -> RunConfig:
    return replace(config, **kwargs)
