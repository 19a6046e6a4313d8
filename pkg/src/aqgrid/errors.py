"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: DataError and its subclasses are
problems with user-supplied data (exit 2), everything else raised from
inside the package is an internal failure (exit 3).
"""


class AqgridError(Exception):
    """Base class for all errors raised by this package."""


class DataError(AqgridError):
    """User-supplied data is missing, malformed, or inconsistent."""


class ValidationError(DataError):
    """A configuration or catalog value failed validation; names the field."""


class RasterReadError(DataError):
    """A raster file could not be decoded."""

    def __init__(self, path, message):
        self.path = str(path)
        super().__init__(f"{self.path}: {message}")


class UnreadableFileError(RasterReadError):
    """File is absent, truncated, or not in the declared format."""


class BandCountError(RasterReadError):
    """Raster has more than one band (or is palette-coded)."""


class GeoreferencingError(RasterReadError):
    """Raster lacks the tags/header fields that locate it on the globe."""


class OutsideBoundsError(AqgridError):
    """A point lies outside a layer's geographic bounds."""


class TrainingError(AqgridError):
    """Model fitting failed (solver did not converge, unusable design)."""
