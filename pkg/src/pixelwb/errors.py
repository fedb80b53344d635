"""Exception hierarchy shared by all pixelwb modules."""


class PixelwbError(Exception):
    """Base class for all library errors."""


class FormatError(PixelwbError):
    """Unsupported raster container, bit depth, or color type."""


class DegenerateVectorError(PixelwbError):
    """A vector with (near-)zero norm where a direction is required."""


class DegenerateImageError(PixelwbError):
    """An image whose statistics are unusable (e.g. a zero-mean channel)."""


class DegenerateSpecError(PixelwbError):
    """A stimulus spec whose geometry produces no target pixels."""


class EmptyFieldError(PixelwbError):
    """A sparse field with no usable entries."""


class ConfigError(PixelwbError):
    """Invalid parameter value or unknown estimator id."""


class ManifestError(PixelwbError):
    """A benchmark manifest that violates the manifest schema."""
