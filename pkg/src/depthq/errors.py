"""Exception types shared across the package."""


class DepthQError(Exception):
    """Base class for errors raised by this package."""


class DegenerateInputError(DepthQError):
    """An input raster is too small or malformed for the requested operation."""


class DegenerateGroundTruthError(DepthQError):
    """A ground-truth mask is entirely foreground or entirely background.

    Precision/recall analysis is undefined for such masks; callers are
    expected to catch this and exclude the image from threshold-based
    aggregates.
    """


class NoAnchorsError(DepthQError):
    """No anchor pixels survived thresholding, so a spatial prior is undefined."""


class ConfigError(DepthQError):
    """A configuration file or override could not be parsed or validated."""


class DatasetError(DepthQError):
    """A dataset tree is missing required inputs or matched no records."""
