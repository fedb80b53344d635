"""Pixel-wise multi-illuminant white balance from blockwise global estimates.

Core entry points:

- estimators: gray world, white-patch Retinex, shades of gray, gray edge
- pipeline: blockwise sparse estimates, Gaussian interpolation, correction
- illusions: color-assimilation stimulus generation and shift measurement
- bench: angular-error metric, synthetic scenes, benchmark/sweep runners
- api: sklearn-style estimator wrappers
"""

from .api import GlobalIlluminantEstimator, PixelwiseIlluminantEstimator
from .bench import angular_error, summary_stats, synth_scene, SceneConfig
from .estimators import Region, estimate, list_algorithms, parse_estimator
from .illusions import IllusionSpec, assimilation_shift, extract_target, generate_illusion
from .imagecore import load_image, normalize_to_unit, save_image, WHITE
from .pipeline import (PipelineParams, apply_correction, blockify,
                       gaussian_interpolate, global_estimate,
                       pixelwise_estimate, run_pipeline, sparse_estimates)

__all__ = [
    "GlobalIlluminantEstimator", "PixelwiseIlluminantEstimator",
    "angular_error", "summary_stats", "synth_scene", "SceneConfig",
    "Region", "estimate", "list_algorithms", "parse_estimator",
    "IllusionSpec", "assimilation_shift", "extract_target", "generate_illusion",
    "load_image", "normalize_to_unit", "save_image", "WHITE",
    "PipelineParams", "apply_correction", "blockify", "gaussian_interpolate",
    "global_estimate", "pixelwise_estimate", "run_pipeline", "sparse_estimates",
]

__version__ = "0.1.0"
