"""Standalone parsers for the solver's output artifacts.

These deliberately re-implement the file formats instead of importing the
solver package: the figure scripts are pure readers, and the shared fixture
files in the repository catch any drift between the two sides.

Formats:
  runlog CSV   -- '#'-prefixed config echo lines, then
                  'step,time,energy,mass,l2,linf,hm1' rows
  rate CSV     -- 'tau,error_hm1,rate' rows (empty rate on the first row)
  fit CSV      -- single 'm_e,b_e,t_min,t_max,residual' row
  snapshot     -- little-endian binary: magic 'NCHS', u32 version (=1),
                  u32 dim, u32 n per axis, f64 half_width per axis,
                  f64 time, row-major f64 payload
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SNAPSHOT_MAGIC = b"NCHS"
SNAPSHOT_VERSION = 1
RUNLOG_COLUMNS = ("step", "time", "energy", "mass", "l2", "linf", "hm1")


class ArtifactError(Exception):
    """An input file is missing or does not parse under the known formats."""


@dataclass
class RunLogData:
    params: dict
    columns: dict  # column name -> np.ndarray


@dataclass
class RateTable:
    params: dict
    tau: np.ndarray
    error_hm1: np.ndarray
    rate: np.ndarray  # NaN where absent


@dataclass
class FitResult:
    m_e: float
    b_e: float
    t_min: float
    t_max: float
    residual: float


@dataclass
class SnapshotData:
    values: np.ndarray
    half_width: tuple
    time: float

    @property
    def extent(self):
        """(xmin, xmax, ymin, ymax) of a 2D snapshot for image axes."""
        hx, hy = self.half_width
        return (-hx, hx, -hy, hy)


def _existing(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ArtifactError(f"{p}: no such input file")
    return p


def _split_csv(path):
    echo = {}
    body = []
    for line in _existing(path).read_text().splitlines():
        if line.startswith("#"):
            stripped = line[1:].strip()
            if "=" in stripped:
                key, value = (part.strip() for part in stripped.split("=", 1))
                echo[key] = value
        elif line.strip():
            body.append(line)
    if not body:
        raise ArtifactError(f"{path}: no CSV body")
    return echo, body


def read_runlog(path) -> RunLogData:
    echo, body = _split_csv(path)
    if body[0] != ",".join(RUNLOG_COLUMNS):
        raise ArtifactError(f"{path}: unexpected runlog header '{body[0]}'")
    rows = []
    for line in body[1:]:
        parts = line.split(",")
        if len(parts) != len(RUNLOG_COLUMNS):
            raise ArtifactError(f"{path}: malformed row '{line}'")
        rows.append([float(p) for p in parts])
    data = np.array(rows, dtype=float) if rows else np.empty((0, 7))
    columns = {name: data[:, i] for i, name in enumerate(RUNLOG_COLUMNS)}
    return RunLogData(params=echo, columns=columns)


def read_rates(path) -> RateTable:
    echo, body = _split_csv(path)
    if body[0] != "tau,error_hm1,rate":
        raise ArtifactError(f"{path}: unexpected rate header '{body[0]}'")
    tau, err, rate = [], [], []
    for line in body[1:]:
        parts = line.split(",")
        if len(parts) != 3:
            raise ArtifactError(f"{path}: malformed row '{line}'")
        tau.append(float(parts[0]))
        err.append(float(parts[1]))
        rate.append(float(parts[2]) if parts[2] else float("nan"))
    return RateTable(params=echo, tau=np.array(tau), error_hm1=np.array(err),
                     rate=np.array(rate))


def read_fit(path) -> FitResult:
    _, body = _split_csv(path)
    if body[0] != "m_e,b_e,t_min,t_max,residual" or len(body) < 2:
        raise ArtifactError(f"{path}: not a fit CSV")
    vals = [float(p) for p in body[1].split(",")]
    return FitResult(*vals)


def read_snapshot(path) -> SnapshotData:
    blob = _existing(path).read_bytes()
    if len(blob) < 12 or blob[:4] != SNAPSHOT_MAGIC:
        raise ArtifactError(f"{path}: not a field snapshot")
    version, dim = struct.unpack("<II", blob[4:12])
    if version != SNAPSHOT_VERSION:
        raise ArtifactError(f"{path}: unsupported snapshot version {version}")
    offset = 12
    n = struct.unpack(f"<{dim}I", blob[offset:offset + 4 * dim])
    offset += 4 * dim
    half_width = struct.unpack(f"<{dim}d", blob[offset:offset + 8 * dim])
    offset += 8 * dim
    (time,) = struct.unpack("<d", blob[offset:offset + 8])
    offset += 8
    expected = 8 * int(np.prod(n))
    if len(blob) - offset != expected:
        raise ArtifactError(
            f"{path}: payload is {len(blob) - offset} bytes, expected {expected}"
        )
    values = np.frombuffer(blob[offset:], dtype="<f8").reshape(n)
    return SnapshotData(values=values, half_width=tuple(half_width), time=time)


def node_coordinates(n: int, half_width: float) -> np.ndarray:
    """Grid nodes -X + j*h, h = 2X/n, matching the solver's layout."""
    h = 2.0 * half_width / n
    return -half_width + h * np.arange(n)
