"""Global illuminant estimators applied to rectangular image regions.

Each estimator maps a region to a single unit-norm illuminant direction.
These are the classical global algorithms the spatial pipeline wraps:
gray world, white-patch Retinex, shades of gray, and 1st-order gray edge.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import convolve1d

from .errors import ConfigError, DegenerateVectorError
from .imagecore import normalize_to_unit

SATURATION_THRESHOLD = 0.98


@dataclass(frozen=True)
class Region:
    """A rectangular view into an image plus an optional exclusion mask.

    The exclusion mask, when given, is in region-local coordinates and marks
    pixels to drop from estimator statistics.
    """

    image: np.ndarray
    x: int = 0
    y: int = 0
    width: int | None = None
    height: int | None = None
    exclude: np.ndarray | None = None

    def __post_init__(self):
        # structural checks only; content validation (finite, nonnegative)
        # happens once at the API entry points via check_image
        img = np.asarray(self.image, dtype=np.float64)
        if img.ndim != 3 or img.shape[2] != 3:
            raise ConfigError(f"expected (H, W, 3) image, got shape {img.shape}")
        object.__setattr__(self, "image", img)
        h, w = img.shape[:2]
        if self.width is None:
            object.__setattr__(self, "width", w - self.x)
        if self.height is None:
            object.__setattr__(self, "height", h - self.y)
        if (self.x < 0 or self.y < 0 or self.width < 1 or self.height < 1
                or self.x + self.width > w or self.y + self.height > h):
            raise ConfigError("region rectangle outside parent image")

    def patch(self) -> np.ndarray:
        return self.image[self.y:self.y + self.height,
                          self.x:self.x + self.width]

    def included(self, sat_threshold: float = SATURATION_THRESHOLD) -> np.ndarray:
        """Boolean (h, w) mask of pixels that enter the statistics.

        Saturated pixels (any channel >= threshold) and explicitly excluded
        pixels are dropped; if that would empty the region, the full region
        minus explicit exclusions is used instead.
        """
        patch = self.patch()
        keep = np.ones(patch.shape[:2], dtype=bool)
        if self.exclude is not None:
            keep &= ~np.asarray(self.exclude, dtype=bool)
        if not keep.any():
            raise ConfigError("region has no included pixels")
        unsaturated = (patch < sat_threshold).all(axis=2)
        if (keep & unsaturated).any():
            keep = keep & unsaturated
        return keep


def gray_world(r: Region) -> np.ndarray:
    """Per-channel arithmetic mean, normalized to unit norm."""
    patch, keep = r.patch(), r.included()
    return normalize_to_unit(patch[keep].mean(axis=0))


def white_patch(r: Region) -> np.ndarray:
    """Per-channel maximum response, normalized to unit norm."""
    patch, keep = r.patch(), r.included()
    return normalize_to_unit(patch[keep].max(axis=0))


def shades_of_gray(r: Region, p: float = 6.0) -> np.ndarray:
    """Minkowski p-mean of the pixels per channel, normalized."""
    if p < 1:
        raise ConfigError(f"Minkowski exponent must be >= 1, got {p}")
    patch, keep = r.patch(), r.included()
    px = patch[keep].astype(np.float64)
    e = np.mean(px ** p, axis=0) ** (1.0 / p)
    return normalize_to_unit(e)


def _gaussian_kernel1d(sigma: float) -> np.ndarray:
    # truncated at radius ceil(3*sigma), renormalized to sum 1
    radius = int(math.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    return k / k.sum()


def gray_edge(r: Region, p: float = 6.0, smooth_sigma: float = 1.0) -> np.ndarray:
    """Minkowski p-mean of Gaussian-smoothed gradient magnitudes per channel.

    First-order variant: each channel is smoothed, the gradient magnitude
    sqrt(dx^2 + dy^2) is taken via central differences with replicate-edge
    padding, and the p-mean of the magnitudes gives the channel response.
    """
    if p < 1:
        raise ConfigError(f"Minkowski exponent must be >= 1, got {p}")
    if smooth_sigma <= 0:
        raise ConfigError(f"smooth_sigma must be > 0, got {smooth_sigma}")
    if r.width < 3 or r.height < 3:
        raise ConfigError("gray_edge needs a region of at least 3x3")
    patch = r.patch().astype(np.float64)
    kern = _gaussian_kernel1d(smooth_sigma)
    smooth = convolve1d(patch, kern, axis=0, mode="nearest")
    smooth = convolve1d(smooth, kern, axis=1, mode="nearest")
    pad = np.pad(smooth, ((1, 1), (1, 1), (0, 0)), mode="edge")
    dy = (pad[2:, 1:-1] - pad[:-2, 1:-1]) / 2.0
    dx = (pad[1:-1, 2:] - pad[1:-1, :-2]) / 2.0
    mag = np.sqrt(dx ** 2 + dy ** 2)
    keep = r.included()
    e = np.mean(mag[keep] ** p, axis=0) ** (1.0 / p)
    return normalize_to_unit(e)


@dataclass(frozen=True)
class EstimatorId:
    """Parsed estimator name plus its parameters."""

    name: str
    params: dict = field(default_factory=dict)

    def __str__(self) -> str:
        if not self.params:
            return self.name
        args = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(self.params.items()))
        return f"{self.name}:{args}"


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else str(v)


ALGORITHM_NAMES = ["gray-world", "white-patch", "shades-of-gray", "gray-edge"]

_DEFAULTS = {
    "gray-world": {},
    "white-patch": {},
    "shades-of-gray": {"p": 6.0},
    "gray-edge": {"p": 6.0, "sigma": 1.0},
}


def parse_estimator(spec: str | EstimatorId) -> EstimatorId:
    """Parse names like "gray-world" or "shades-of-gray:p=6"."""
    if isinstance(spec, EstimatorId):
        spec = str(spec)
    name, _, argstr = spec.partition(":")
    name = name.strip()
    if name not in _DEFAULTS:
        raise ConfigError(f"unknown estimator {name!r}; "
                          f"known: {', '.join(ALGORITHM_NAMES)}")
    params = dict(_DEFAULTS[name])
    if argstr:
        for part in argstr.split(","):
            m = re.fullmatch(r"\s*(\w+)\s*=\s*([0-9.eE+-]+)\s*", part)
            if not m or m.group(1) not in params:
                raise ConfigError(f"bad estimator parameter {part!r} for {name}")
            params[m.group(1)] = float(m.group(2))
    if "p" in params and params["p"] < 1:
        raise ConfigError(f"Minkowski exponent must be >= 1, got {params['p']}")
    if "sigma" in params and params["sigma"] <= 0:
        raise ConfigError(f"sigma must be > 0, got {params['sigma']}")
    return EstimatorId(name, params)


def estimate(estimator: str | EstimatorId, r: Region) -> np.ndarray:
    """Dispatch to the named estimator; the single registry used everywhere."""
    eid = parse_estimator(estimator)
    if eid.name == "gray-world":
        return gray_world(r)
    if eid.name == "white-patch":
        return white_patch(r)
    if eid.name == "shades-of-gray":
        return shades_of_gray(r, p=eid.params["p"])
    return gray_edge(r, p=eid.params["p"], smooth_sigma=eid.params["sigma"])


def list_algorithms() -> list[str]:
    """Canonical CLI/HTTP spellings of the four estimators."""
    return [str(EstimatorId(n, dict(_DEFAULTS[n]))) for n in ALGORITHM_NAMES]
