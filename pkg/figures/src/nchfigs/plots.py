"""Figure builders: steady-state profiles, coarsening panels, energy decay.

All builders return the matplotlib Figure and, when an output path is given,
save it as vector graphics (.svg or .pdf).  Output is deterministic: SVG ids
are salted with a fixed string and date metadata is stripped, so identical
inputs produce byte-identical files.  Phase-field color scales are pinned to
[-1, 1] to keep panels comparable across times and runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "nchfigs"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .readers import (  # noqa: E402
    ArtifactError,
    node_coordinates,
    read_fit,
    read_rates,
    read_runlog,
    read_snapshot,
)

PHASE_RANGE = (-1.0, 1.0)
VECTOR_SUFFIXES = (".svg", ".pdf")

FIGURE_KINDS = ("profile", "contour_panel", "energy_loglog", "rate_table_plot")


@dataclass
class FigureSpec:
    """One figure: what to draw, from which files, where to write it."""

    kind: str
    inputs: list
    output: str | None = None
    labels: list = field(default_factory=list)
    fit_input: str | None = None
    zoom: tuple | None = None  # x-window for interface close-ups
    columns: int = 3

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ArtifactError(f"unknown figure kind '{self.kind}'")
        if not self.inputs:
            raise ArtifactError("figure spec has no input files")


def _save(fig, output):
    if output is None:
        return
    out = str(output)
    if not out.endswith(VECTOR_SUFFIXES):
        raise ArtifactError(f"{out}: output must be vector graphics {VECTOR_SUFFIXES}")
    metadata = {"Date": None} if out.endswith(".svg") else {"CreationDate": None}
    fig.savefig(out, metadata=metadata)


def _label(spec, index, fallback):
    return spec.labels[index] if index < len(spec.labels) else fallback


def profile_figure(spec: FigureSpec):
    """Overlaid 1D solution profiles, one curve per snapshot file."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for i, path in enumerate(spec.inputs):
        snap = read_snapshot(path)
        if snap.values.ndim != 1:
            raise ArtifactError(f"{path}: profile figures need 1D snapshots")
        x = node_coordinates(snap.values.size, snap.half_width[0])
        ax.plot(x, snap.values, lw=1.2, label=_label(spec, i, f"t={snap.time:g}"))
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.set_ylim(-1.2, 1.2)
    if spec.zoom is not None:
        ax.set_xlim(*spec.zoom)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _save(fig, spec.output)
    return fig


def contour_panel_figure(spec: FigureSpec):
    """Sheet of 2D phase-field panels, color scale pinned to [-1, 1]."""
    snaps = []
    for path in spec.inputs:
        snap = read_snapshot(path)
        if snap.values.ndim != 2:
            raise ArtifactError(f"{path}: contour panels need 2D snapshots")
        snaps.append(snap)
    cols = max(1, spec.columns)
    rows = (len(snaps) + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(2.9 * cols, 2.7 * rows),
                             squeeze=False)
    images = []
    for i, snap in enumerate(snaps):
        ax = axes[i // cols][i % cols]
        im = ax.imshow(
            snap.values.T, origin="lower", extent=snap.extent,
            vmin=PHASE_RANGE[0], vmax=PHASE_RANGE[1], cmap="RdBu_r",
            interpolation="nearest",
        )
        images.append(im)
        ax.set_title(_label(spec, i, f"T={snap.time:g}"), fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    for j in range(len(snaps), rows * cols):
        axes[j // cols][j % cols].set_axis_off()
    fig.colorbar(images[0], ax=[a for row in axes for a in row], shrink=0.85)
    _save(fig, spec.output)
    return fig


def energy_loglog_figure(spec: FigureSpec):
    """Energy decay on log-log axes, optionally with a fitted power law."""
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    for i, path in enumerate(spec.inputs):
        log = read_runlog(path)
        t = log.columns["time"]
        e = log.columns["energy"]
        keep = t > 0
        if not keep.any():
            raise ArtifactError(f"{path}: no records with t > 0 to plot")
        ax.loglog(t[keep], e[keep], lw=1.2, label=_label(spec, i, f"run {i}"))
    if spec.fit_input is not None:
        fit = read_fit(spec.fit_input)
        tt = np.logspace(np.log10(fit.t_min), np.log10(fit.t_max), 64)
        ax.loglog(tt, fit.b_e * tt**fit.m_e, "k--", lw=1.0,
                  label=f"{fit.b_e:.3g} t^{{{fit.m_e:.3g}}}")
    ax.set_xlabel("t")
    ax.set_ylabel("E(t)")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _save(fig, spec.output)
    return fig


def rate_table_figure(spec: FigureSpec):
    """Error vs step size on log-log axes with order guide lines."""
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    for i, path in enumerate(spec.inputs):
        table = read_rates(path)
        ax.loglog(table.tau, table.error_hm1, "o-", lw=1.2, ms=4,
                  label=_label(spec, i, f"table {i}"))
        for order, style in ((1, ":"), (2, "--")):
            guide = table.error_hm1[0] * (table.tau / table.tau[0]) ** order
            ax.loglog(table.tau, guide, f"k{style}", lw=0.8,
                      label=f"order {order}" if i == 0 else None)
    ax.set_xlabel("tau")
    ax.set_ylabel("H^-1 error")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _save(fig, spec.output)
    return fig


_BUILDERS = {
    "profile": profile_figure,
    "contour_panel": contour_panel_figure,
    "energy_loglog": energy_loglog_figure,
    "rate_table_plot": rate_table_figure,
}


def plot(spec: FigureSpec):
    """Build (and save, if spec.output is set) the requested figure."""
    return _BUILDERS[spec.kind](spec)
