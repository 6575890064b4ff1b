"""Figure scripts for nch-etd artifacts: pure readers, no physics."""

from .plots import FIGURE_KINDS, FigureSpec, plot
from .readers import (
    ArtifactError,
    FitResult,
    RateTable,
    RunLogData,
    SnapshotData,
    read_fit,
    read_rates,
    read_runlog,
    read_snapshot,
)

__version__ = "0.1.0"
