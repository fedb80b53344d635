"""Angular-error metric, summary statistics, synthetic scenes, and runners.

The benchmark harness scores global or pixel-wise estimates against ground
truth with the angular error, aggregates mean / median / best-25% /
worst-25% / max, ingests JSON manifests, and sweeps (beta, sigma) grids.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import pipeline
from .errors import DegenerateVectorError, ManifestError, PixelwbError
from .imagecore import check_image, load_image, normalize_to_unit


def angular_error(gt, est) -> float:
    """Angle between two nonzero 3-vectors, in degrees."""
    gt = np.asarray(gt, dtype=np.float64)
    est = np.asarray(est, dtype=np.float64)
    ngt, nest = np.linalg.norm(gt), np.linalg.norm(est)
    if ngt < 1e-12 or nest < 1e-12:
        raise DegenerateVectorError("angular error of a zero vector")
    dot = float(np.dot(gt, est)) / (ngt * nest)
    return math.degrees(math.acos(max(-1.0, min(1.0, dot))))


def angular_error_field(gt_field: np.ndarray, est_field: np.ndarray) -> np.ndarray:
    """Per-pixel angular error map in degrees for two (H, W, 3) fields."""
    gt = np.asarray(gt_field, dtype=np.float64)
    est = np.asarray(est_field, dtype=np.float64)
    if gt.shape != est.shape:
        raise ManifestError(f"field shapes differ: {gt.shape} vs {est.shape}")
    ngt = np.linalg.norm(gt, axis=2)
    nest = np.linalg.norm(est, axis=2)
    if (ngt < 1e-12).any() or (nest < 1e-12).any():
        raise DegenerateVectorError("zero vector in field")
    dots = np.clip((gt * est).sum(axis=2) / (ngt * nest), -1.0, 1.0)
    return np.degrees(np.arccos(dots))


@dataclass(frozen=True)
class ErrorStats:
    mean: float
    median: float
    best25_mean: float
    worst25_mean: float
    max: float
    count: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "median": self.median,
                "best25Mean": self.best25_mean, "worst25Mean": self.worst25_mean,
                "max": self.max, "count": self.count}


def summary_stats(errors) -> ErrorStats:
    """Mean, median (midpoint for even n), quartile means over ceil(n/4)
    smallest/largest, and max."""
    arr = np.sort(np.asarray(errors, dtype=np.float64).ravel())
    n = arr.size
    if n == 0:
        raise PixelwbError("summary_stats of an empty error list")
    q = math.ceil(n / 4)
    return ErrorStats(
        mean=float(arr.mean()),
        median=float((arr[(n - 1) // 2] + arr[n // 2]) / 2.0),
        best25_mean=float(arr[:q].mean()),
        worst25_mean=float(arr[-q:].mean()),
        max=float(arr[-1]),
        count=int(n),
    )


def pixelwise_error(gt_field: np.ndarray, est_field: np.ndarray,
                    mask: np.ndarray | None = None) -> tuple[np.ndarray, ErrorStats]:
    """Angular error per included pixel plus its summary statistics."""
    err = angular_error_field(gt_field, est_field)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if not mask.any():
            raise PixelwbError("evaluation mask excludes every pixel")
        vals = err[mask]
    else:
        vals = err.ravel()
    return err, summary_stats(vals)


@dataclass(frozen=True)
class SceneConfig:
    """Knobs for the Mondrian-under-illuminant-field generator."""

    width: int = 192
    height: int = 192
    patch_size: int = 12
    illuminant_a: np.ndarray = field(
        default_factory=lambda: normalize_to_unit(np.array([1.0, 0.8, 0.6])))
    illuminant_b: np.ndarray = field(
        default_factory=lambda: normalize_to_unit(np.array([0.6, 0.8, 1.0])))
    blend: str = "half_split"        # "half_split" | "linear_ramp"
    mean_gray: bool = False
    gray_block: int = 8              # block size for the mean-gray centering
    seam: float | None = None        # split position, defaults to width / 2
    peak: float = 0.9


def synth_scene(seed: int, config: SceneConfig | None = None
                ) -> tuple[np.ndarray, np.ndarray]:
    """Random Mondrian reflectance under a two-illuminant field.

    Returns (image, gt_field): image = reflectance * field elementwise,
    rescaled so its peak is config.peak; the field is the per-pixel unit
    illuminant.  With mean_gray, reflectances are re-centered so that each
    gray_block x gray_block block has an achromatic mean, which makes a
    per-block gray-world estimate unbiased by construction.
    """
    cfg = config or SceneConfig()
    rng = np.random.default_rng(seed)
    h, w = cfg.height, cfg.width

    refl = np.empty((h, w, 3))
    for y in range(0, h, cfg.patch_size):
        for x in range(0, w, cfg.patch_size):
            refl[y:y + cfg.patch_size, x:x + cfg.patch_size] = rng.uniform(0.15, 0.95, 3)

    if cfg.mean_gray:
        b = cfg.gray_block
        for y in range(0, h, b):
            for x in range(0, w, b):
                block = refl[y:y + b, x:x + b]
                means = block.reshape(-1, 3).mean(axis=0)
                block *= means.mean() / means

    la = normalize_to_unit(cfg.illuminant_a)
    lb = normalize_to_unit(cfg.illuminant_b)
    seam = cfg.seam if cfg.seam is not None else w / 2.0
    xs = np.arange(w, dtype=np.float64)
    if cfg.blend == "half_split":
        t = (xs >= seam).astype(np.float64)
    elif cfg.blend == "linear_ramp":
        t = xs / max(w - 1, 1)
    else:
        raise ManifestError(f"unknown blend {cfg.blend!r}")
    mix = (1.0 - t)[None, :, None] * la + t[None, :, None] * lb
    gt_field = mix / np.linalg.norm(mix, axis=2)[:, :, None]
    gt_field = np.broadcast_to(gt_field, (h, w, 3)).copy()

    img = refl * gt_field
    img *= cfg.peak / img.max()
    return img, gt_field


# ---------------------------------------------------------------------------
# Manifests and benchmark runs

@dataclass
class ManifestEntry:
    image: str
    transfer: str = "linear"
    gt_rgb: list | None = None
    gt_field: str | None = None
    mask: str | None = None
    black_level: float = 0.0
    saturation_level: float | None = None


@dataclass
class Manifest:
    name: str
    entries: list[ManifestEntry]
    base_dir: str = "."

    def resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)


def load_manifest(path: str) -> Manifest:
    """Read and validate a manifest JSON document."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
    return parse_manifest(doc, base_dir=os.path.dirname(os.path.abspath(path)))


def parse_manifest(doc: dict, base_dir: str = ".") -> Manifest:
    problems = []
    if not isinstance(doc, dict):
        raise ManifestError("manifest root must be an object")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        problems.append("name: required string")
    raw_entries = doc.get("entries")
    if not isinstance(raw_entries, list) or not raw_entries:
        problems.append("entries: required non-empty list")
        raw_entries = []
    entries = []
    for i, e in enumerate(raw_entries):
        where = f"entries[{i}]"
        if not isinstance(e, dict):
            problems.append(f"{where}: must be an object")
            continue
        image = e.get("image")
        if not isinstance(image, str):
            problems.append(f"{where}.image: required string")
        transfer = e.get("transfer", "linear")
        if transfer not in ("linear", "srgb"):
            problems.append(f"{where}.transfer: must be 'linear' or 'srgb'")
        gt_rgb, gt_field = e.get("gtRgb"), e.get("gtField")
        if (gt_rgb is None) == (gt_field is None):
            problems.append(f"{where}: exactly one of gtRgb/gtField required")
        if gt_rgb is not None and (not isinstance(gt_rgb, list) or len(gt_rgb) != 3):
            problems.append(f"{where}.gtRgb: must be a 3-element list")
        entries.append(ManifestEntry(
            image=image or "", transfer=transfer, gt_rgb=gt_rgb,
            gt_field=gt_field, mask=e.get("mask"),
            black_level=float(e.get("blackLevel", 0.0)),
            saturation_level=e.get("saturationLevel")))
    if problems:
        raise ManifestError("; ".join(problems))
    return Manifest(name=name, entries=entries, base_dir=base_dir)


@dataclass
class EntryResult:
    image: str
    error: float | None = None            # global-mode angular error
    stats: ErrorStats | None = None       # pixel-wise statistics
    skipped: str | None = None

    def to_dict(self) -> dict:
        d: dict = {"image": self.image}
        if self.skipped is not None:
            d["skipped"] = self.skipped
        if self.error is not None:
            d["error"] = self.error
        if self.stats is not None:
            d["stats"] = self.stats.to_dict()
        return d


@dataclass
class BenchReport:
    manifest_name: str
    mode: str
    params: pipeline.PipelineParams
    entries: list[EntryResult]
    aggregate: ErrorStats
    elapsed_s: float

    def to_dict(self) -> dict:
        return {
            "manifest": self.manifest_name,
            "mode": self.mode,
            "params": self.params.to_dict(),
            "entries": [e.to_dict() for e in self.entries],
            "aggregate": self.aggregate.to_dict(),
            "elapsedSeconds": self.elapsed_s,
        }

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)


def _prepare_image(manifest: Manifest, entry: ManifestEntry) -> np.ndarray:
    img = load_image(manifest.resolve(entry.image), transfer=entry.transfer)
    if entry.black_level:
        img = np.maximum(img - entry.black_level, 0.0)
    if entry.saturation_level is not None:
        img = np.minimum(img, float(entry.saturation_level))
    return img


def run_benchmark(manifest: Manifest, params: pipeline.PipelineParams | None = None,
                  mode: str = "pixelwise",
                  estimate_hook=None) -> BenchReport:
    """Score every manifest entry and aggregate.

    mode="global" scores the sparse-mean global estimate against gtRgb (or
    against the mean direction of a gtField); mode="pixelwise" scores the
    dense field per pixel.  estimate_hook(image, params) -> PipelineResult
    replaces the pipeline when given (test instrumentation).
    """
    params = params or pipeline.PipelineParams()
    if mode not in ("global", "pixelwise"):
        raise ManifestError(f"unknown mode {mode!r}")
    t0 = time.monotonic()
    results: list[EntryResult] = []
    per_entry_errors: list[float] = []
    for entry in manifest.entries:
        try:
            img = _prepare_image(manifest, entry)
            run = (estimate_hook or pipeline.run_pipeline)(img, params)
            if mode == "global":
                if entry.gt_rgb is not None:
                    gt = np.asarray(entry.gt_rgb, dtype=np.float64)
                else:
                    gt_field = pipeline.load_field(manifest.resolve(entry.gt_field))
                    gt = gt_field.reshape(-1, 3).mean(axis=0)
                err = angular_error(gt, run.global_est)
                results.append(EntryResult(entry.image, error=err))
                per_entry_errors.append(err)
            else:
                if entry.gt_field is None:
                    raise ManifestError(f"{entry.image}: pixelwise mode needs gtField")
                gt_field = pipeline.load_field(manifest.resolve(entry.gt_field))
                mask = None
                if entry.mask:
                    mask = load_image(manifest.resolve(entry.mask))[:, :, 0] > 0.5
                _, stats = pixelwise_error(gt_field, run.field, mask)
                results.append(EntryResult(entry.image, error=stats.mean, stats=stats))
                per_entry_errors.append(stats.mean)
        except (OSError, PixelwbError) as exc:
            results.append(EntryResult(entry.image, skipped=str(exc)))
    if not per_entry_errors:
        raise ManifestError("every manifest entry was skipped")
    return BenchReport(
        manifest_name=manifest.name,
        mode=mode,
        params=params,
        entries=results,
        aggregate=summary_stats(per_entry_errors),
        elapsed_s=time.monotonic() - t0,
    )


def param_sweep(manifest: Manifest, betas, sigmas, estimator: str = "gray-world",
                confidence: str = "off") -> np.ndarray:
    """Mean pixel-wise error for every (beta, sigma) combination.

    Returns a len(betas) x len(sigmas) grid; rows follow betas, columns
    follow sigmas, mirroring the sweep-table layout.
    """
    grid = np.empty((len(betas), len(sigmas)))
    for i, beta in enumerate(betas):
        for j, sigma in enumerate(sigmas):
            params = pipeline.PipelineParams(beta=int(beta), sigma=float(sigma),
                                             estimator=estimator,
                                             confidence=confidence)
            report = run_benchmark(manifest, params, mode="pixelwise")
            grid[i, j] = report.aggregate.mean
    return grid


def save_sweep_csv(grid: np.ndarray, betas, sigmas, path: str) -> None:
    """Persist a sweep grid as CSV: beta rows, sigma columns, 3 decimals."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["beta\\sigma"] + [str(s) for s in sigmas])
        for beta, row in zip(betas, grid):
            writer.writerow([str(beta)] + [f"{v:.3f}" for v in row])
