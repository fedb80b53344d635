"""Blockwise estimation, sparse centers, and Gaussian interpolation.

The wrapper that turns any global estimator into a pixel-wise one: tile the
image into beta x beta blocks, estimate per block, place each estimate at the
block's center pixel, and interpolate the sparse centers with an isotropic
Gaussian into a dense unit-norm illuminant field.  Optionally the sparse
entries are weighted by a whiteness-derived confidence map before
interpolation.  Von Kries correction divides the image by sqrt(3) times the
per-pixel illuminant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import fftconvolve
from scipy.spatial import cKDTree

from . import estimators
from .errors import ConfigError, DegenerateImageError, DegenerateVectorError, EmptyFieldError
from .imagecore import WHITE, check_image, load_image, normalize_to_unit, save_image

# Half-width of the Gaussian support in units of sigma.  Contributions from
# entries farther than this (Chebyshev distance) are dropped.  8 sigma keeps
# the discarded mass below 1e-13 relative, so the truncated interpolation is
# indistinguishable from the exact weighted sum at 1e-6 degree tolerance.
DEFAULT_TRUNCATE = 8.0


@dataclass(frozen=True)
class Block:
    x: int
    y: int
    width: int
    height: int

    @property
    def center(self) -> tuple[int, int]:
        return (self.x + self.width // 2, self.y + self.height // 2)


def blockify(width: int, height: int, beta: int) -> list[Block]:
    """Tile a width x height raster into beta x beta blocks.

    Interior blocks are exactly beta x beta; remainder pixels at the right and
    bottom edges form smaller border blocks.  Full coverage, no overlap.
    """
    if beta < 2:
        raise ConfigError(f"block size must be >= 2, got {beta}")
    if width < 1 or height < 1:
        raise ConfigError("raster dimensions must be positive")
    xs = list(range(0, width, beta))
    ys = list(range(0, height, beta))
    return [Block(x, y, min(beta, width - x), min(beta, height - y))
            for y in ys for x in xs]


@dataclass
class SparseField:
    """Per-block-center illuminant estimates with weights."""

    width: int
    height: int
    centers: np.ndarray      # (N, 2) int, (x, y)
    values: np.ndarray       # (N, 3) unit illuminants
    weights: np.ndarray      # (N,) nonnegative
    degenerate: np.ndarray   # (N,) bool, True where the fallback was used

    def __post_init__(self):
        n = len(self.centers)
        if self.values.shape != (n, 3) or self.weights.shape != (n,):
            raise ConfigError("inconsistent sparse field arrays")
        if n and (self.centers[:, 0].max() >= self.width
                  or self.centers[:, 1].max() >= self.height
                  or self.centers.min() < 0):
            raise ConfigError("sparse entry center out of bounds")


@dataclass(frozen=True)
class PipelineParams:
    beta: int = 8
    sigma: float = 24.0
    estimator: str = "gray-world"
    confidence: str = "off"          # "off" | "whiteness"
    fallback: np.ndarray = field(default_factory=lambda: WHITE.copy())
    truncate: float = DEFAULT_TRUNCATE

    def __post_init__(self):
        if self.beta < 2:
            raise ConfigError(f"beta must be >= 2, got {self.beta}")
        if self.sigma <= 0:
            raise ConfigError(f"sigma must be > 0, got {self.sigma}")
        if self.confidence not in ("off", "whiteness"):
            raise ConfigError(f"unknown confidence mode {self.confidence!r}")
        estimators.parse_estimator(self.estimator)
        object.__setattr__(self, "fallback", normalize_to_unit(self.fallback))

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "sigma": self.sigma,
            "estimator": str(estimators.parse_estimator(self.estimator)),
            "confidence": self.confidence,
            "fallback": [float(c) for c in self.fallback],
        }


def sparse_estimates(img: np.ndarray, grid: list[Block], estimator: str,
                     fallback: np.ndarray | None = None) -> SparseField:
    """Run the estimator on every block and place the result at its center.

    Blocks where the estimator reports a degenerate vector get the fallback
    illuminant and are flagged.  All weights start at 1.
    """
    img = check_image(img)
    h, w = img.shape[:2]
    fb = normalize_to_unit(fallback if fallback is not None else WHITE)
    centers = np.empty((len(grid), 2), dtype=np.int64)
    values = np.empty((len(grid), 3))
    degenerate = np.zeros(len(grid), dtype=bool)
    for i, b in enumerate(grid):
        centers[i] = b.center
        region = estimators.Region(img, b.x, b.y, b.width, b.height)
        try:
            values[i] = estimators.estimate(estimator, region)
        except (DegenerateVectorError, ConfigError) as exc:
            if isinstance(exc, ConfigError) and not _is_region_size_issue(b):
                raise
            values[i] = fb
            degenerate[i] = True
    return SparseField(w, h, centers, values, np.ones(len(grid)), degenerate)


def _is_region_size_issue(b: Block) -> bool:
    # gray_edge rejects sub-3x3 border blocks; treat those as degenerate blocks
    return b.width < 3 or b.height < 3


def _gaussian_kernel2d(sigma: float, truncate: float) -> np.ndarray:
    radius = int(math.ceil(truncate * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    return np.outer(g, g) / (2.0 * math.pi * sigma ** 2)


def gaussian_interpolate(sparse: SparseField, sigma: float,
                         truncate: float = DEFAULT_TRUNCATE,
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Interpolate sparse entries into a dense unit-norm field.

    Each pixel accumulates sum_e w_e * G(q - c_e; sigma) * L_e over entries
    within the truncation support and is then normalized to unit norm.
    Pixels with no entry in support take the nearest entry's illuminant.

    Returns (field, flagged) where flagged marks the fallback pixels.
    """
    if sigma <= 0:
        raise ConfigError(f"sigma must be > 0, got {sigma}")
    positive = sparse.weights > 0
    if not positive.any():
        raise EmptyFieldError("sparse field has no positive-weight entries")
    h, w = sparse.height, sparse.width
    centers = sparse.centers[positive]
    values = sparse.values[positive]
    weights = sparse.weights[positive]

    raster = np.zeros((h, w, 4))
    np.add.at(raster, (centers[:, 1], centers[:, 0]),
              np.column_stack([values * weights[:, None], weights]))
    kernel = _gaussian_kernel2d(sigma, truncate)
    acc = np.stack([fftconvolve(raster[:, :, k], kernel, mode="same")
                    for k in range(4)], axis=-1)

    # support check is exact: a pixel is covered iff some entry lies within
    # the kernel's Chebyshev radius, independent of fft roundoff
    radius = int(math.ceil(truncate * sigma))
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    covered = np.zeros((h, w), dtype=bool)
    for cx, cy in centers:
        y0, y1 = max(0, cy - radius), min(h, cy + radius + 1)
        x0, x1 = max(0, cx - radius), min(w, cx + radius + 1)
        covered[y0:y1, x0:x1] = True
        if covered.all():
            break

    vec = np.maximum(acc[:, :, :3], 0.0)  # fft roundoff can dip below zero
    norms = np.linalg.norm(vec, axis=2)
    flagged = ~covered | (norms < 1e-300)
    if flagged.any():
        tree = cKDTree(centers)
        pts = np.column_stack([xx[flagged], yy[flagged]])
        _, idx = tree.query(pts)
        vec = vec.copy()
        vec[flagged] = values[idx]
        norms = np.linalg.norm(vec, axis=2)
    field_arr = vec / norms[:, :, None]
    return field_arr, flagged


def whiteness_map(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Angle (radians) of each mean-scaled pixel to the white direction.

    The image is first scaled channel-wise by its own per-channel means, then
    each pixel's angle to (1,1,1) is computed.  Zero pixels get pi/2 and are
    flagged.  Returns (map, flagged).
    """
    img = check_image(img)
    means = img.reshape(-1, 3).mean(axis=0)
    if (means <= 0).any():
        raise DegenerateImageError("a channel has zero mean; whiteness undefined")
    temp = img / means
    norms = np.linalg.norm(temp, axis=2)
    zero = norms < 1e-300
    dots = temp.sum(axis=2) / (math.sqrt(3.0) * np.where(zero, 1.0, norms))
    wmap = np.arccos(np.clip(dots, -1.0, 1.0))
    wmap[zero] = math.pi / 2.0
    return wmap, zero


def confidence_map(wmap: np.ndarray) -> tuple[np.ndarray, bool]:
    """Gaussian curve over the whiteness map, centered at its own mean.

    C = 1/(2 pi sd^2) * exp(-(W - mean)^2 / (2 sd^2)) with population
    statistics over all pixels.  A constant map (sd ~ 0) yields a uniform
    map of ones, flagged degenerate.  Returns (map, degenerate).
    """
    wmap = np.asarray(wmap, dtype=np.float64)
    mu = float(wmap.mean())
    sd = float(wmap.std())
    if sd < 1e-9:
        return np.ones_like(wmap), True
    amp = 1.0 / (2.0 * math.pi * sd ** 2)
    return amp * np.exp(-((wmap - mu) ** 2) / (2.0 * sd ** 2)), False


@dataclass
class PipelineResult:
    """Everything one run of the pixel-wise pipeline produces."""

    field: np.ndarray            # (H, W, 3) unit-norm per pixel
    sparse: SparseField
    global_est: np.ndarray       # (3,) unit norm
    params: PipelineParams
    degenerate_blocks: int
    flagged_pixels: int
    whiteness_degenerate: bool = False


def global_estimate(sparse: SparseField) -> np.ndarray:
    """Per-channel mean of the sparse entries, normalized to unit norm.

    Weights are ignored; averaging the entries equals averaging the sparse
    raster (zeros elsewhere) up to positive scale.
    """
    if len(sparse.centers) == 0:
        raise EmptyFieldError("sparse field has no entries")
    return normalize_to_unit(sparse.values.mean(axis=0))


def run_pipeline(img: np.ndarray, params: PipelineParams | None = None) -> PipelineResult:
    """Full pixel-wise estimation: blockify, estimate, weight, interpolate."""
    params = params or PipelineParams()
    img = check_image(img)
    h, w = img.shape[:2]
    grid = blockify(w, h, params.beta)
    sparse = sparse_estimates(img, grid, params.estimator, params.fallback)
    wh_degen = False
    if params.confidence == "whiteness":
        wmap, _ = whiteness_map(img)
        cmap, wh_degen = confidence_map(wmap)
        conf = cmap[sparse.centers[:, 1], sparse.centers[:, 0]]
        sparse = replace_weights(sparse, sparse.weights * conf)
    field_arr, flagged = gaussian_interpolate(sparse, params.sigma, params.truncate)
    return PipelineResult(
        field=field_arr,
        sparse=sparse,
        global_est=global_estimate(sparse),
        params=params,
        degenerate_blocks=int(sparse.degenerate.sum()),
        flagged_pixels=int(flagged.sum()),
        whiteness_degenerate=wh_degen,
    )


def replace_weights(sparse: SparseField, weights: np.ndarray) -> SparseField:
    return SparseField(sparse.width, sparse.height, sparse.centers,
                       sparse.values, np.asarray(weights, dtype=np.float64),
                       sparse.degenerate)


def pixelwise_estimate(img: np.ndarray, params: PipelineParams | None = None) -> np.ndarray:
    """Convenience wrapper returning just the dense illuminant field."""
    return run_pipeline(img, params).field


def apply_correction(img: np.ndarray, illuminant: np.ndarray) -> np.ndarray:
    """Von Kries correction: divide by sqrt(3) times the illuminant.

    Accepts either a per-pixel field (H, W, 3) or a single global illuminant.
    Components below 1e-6 are clamped before division.  White is the fixed
    point: division by sqrt(3) * 1/sqrt(3) = 1.
    """
    img = check_image(img)
    L = np.asarray(illuminant, dtype=np.float64)
    if L.ndim == 1:
        L = np.broadcast_to(L, img.shape)
    elif L.shape != img.shape:
        raise ConfigError(f"field shape {L.shape} does not match image {img.shape}")
    return img / (math.sqrt(3.0) * np.maximum(L, 1e-6))


FIELD_SIDECAR_SUFFIX = ".meta.json"


def save_field(field_arr: np.ndarray, path: str, meta: dict | None = None) -> None:
    """Persist a unit-norm field as 16-bit PNG (vectors scaled by 65535)
    plus a JSON sidecar with params/flags metadata."""
    save_image(field_arr, path, transfer="linear", depth=16)
    with open(path + FIELD_SIDECAR_SUFFIX, "w") as fh:
        json.dump(meta or {}, fh, indent=2)


def load_field(path: str) -> np.ndarray:
    """Load a field PNG and renormalize each pixel to unit norm."""
    raw = load_image(path, transfer="linear")
    norms = np.linalg.norm(raw, axis=2)
    if (norms < 1e-6).any():
        raise DegenerateImageError(f"field raster {path} has zero pixels")
    return raw / norms[:, :, None]
