"""Exception hierarchy for the nchetd package."""


class NchetdError(Exception):
    """Base class for all package errors."""


class SymmetryError(NchetdError):
    """Spectral data is not conjugate-symmetric (would produce a complex field)."""


class MeanError(NchetdError):
    """A zero-mean grid function was required but the mean is too large."""


class DomainError(NchetdError):
    """Scalar function evaluated outside its domain (e.g. negative phi argument)."""


class GammaZeroError(NchetdError):
    """The positivity parameter eps^2*(J conv 1) - 1 is not positive."""


class BlowupError(NchetdError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class MissingHistoryError(NchetdError):
    """A two-step scheme was stepped before its history was initialized."""


class InsufficientDataError(NchetdError):
    """Not enough log records in the requested fitting window."""


class NonpositiveEnergyError(NchetdError):
    """Power-law fitting requires strictly positive energies and times."""


class ConfigError(NchetdError):
    """Configuration document failed to parse or validate."""

    def __init__(self, message, field=None, line=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field '{field}'")
        super().__init__(f"{', '.join(loc)}: {message}" if loc else message)
        self.field = field
        self.line = line


class FileFormatError(NchetdError):
    """An on-disk artifact does not match its documented format."""


class SnapshotFormatError(FileFormatError):
    """Base class for snapshot file format violations."""


class BadMagic(SnapshotFormatError):
    """File does not start with the snapshot magic bytes."""


class VersionMismatch(SnapshotFormatError):
    """Snapshot format version is not supported."""


class TruncatedPayload(SnapshotFormatError):
    """Snapshot payload is shorter than the header promises."""
