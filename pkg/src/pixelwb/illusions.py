"""Parametric color-assimilation stimuli and the shift instrument.

Stimuli are built from repeated inducer elements (stripes or rings) whose
colors alternate through a palette, with gray target segments displacing
parts of the first inducer color.  This coaxial arrangement is the one under
which blockwise white balancing measurably drags the targets toward their
surrounding inducers.  The shift report is a regression instrument, not a
perceptual model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy import ndimage

from .bench import angular_error
from .errors import DegenerateSpecError
from .imagecore import check_image

PATTERNS = ("stripe_grating", "concentric_disks", "ring_lattice")

DEFAULT_PALETTE = [(0.7, 0.4, 0.4), (0.3, 0.6, 0.6)]
DEFAULT_BACKGROUND = (0.5, 0.5, 0.5)
DEFAULT_TARGET = (0.5, 0.5, 0.5)


@dataclass(frozen=True)
class IllusionSpec:
    pattern: str = "stripe_grating"
    width: int = 512
    height: int = 512
    background: tuple = DEFAULT_BACKGROUND
    target_color: tuple = DEFAULT_TARGET
    inducer_colors: tuple = tuple(DEFAULT_PALETTE)
    inducer_thickness: int = 3
    inducer_frequency: float = 8.0   # inducer elements per 100 px
    target_geometry: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise DegenerateSpecError(f"unknown pattern {self.pattern!r}")
        if self.width < 64 or self.height < 64:
            raise DegenerateSpecError("canvas must be at least 64x64")
        if self.inducer_thickness < 0:
            raise DegenerateSpecError("inducer thickness must be >= 0")
        if self.inducer_frequency <= 0:
            raise DegenerateSpecError("inducer frequency must be > 0")
        if len(self.inducer_colors) < 1:
            raise DegenerateSpecError("need at least one inducer color")
        for c in (self.background, self.target_color, *self.inducer_colors):
            arr = np.asarray(c, dtype=np.float64)
            if arr.shape != (3,) or arr.min() < 0 or arr.max() > 1:
                raise DegenerateSpecError(f"color {c} outside [0,1]^3")

    @property
    def period(self) -> float:
        return 100.0 / self.inducer_frequency

    def geometry(self, key: str, default):
        return self.target_geometry.get(key, default)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "IllusionSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DegenerateSpecError(f"spec is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "IllusionSpec":
        if not isinstance(doc, dict):
            raise DegenerateSpecError("spec document must be an object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise DegenerateSpecError(f"unknown spec fields: {sorted(unknown)}")
        doc = dict(doc)
        for key in ("background", "target_color"):
            if key in doc:
                doc[key] = tuple(doc[key])
        if "inducer_colors" in doc:
            doc["inducer_colors"] = tuple(tuple(c) for c in doc["inducer_colors"])
        return cls(**doc)


@dataclass
class IllusionStimulus:
    image: np.ndarray
    target_mask: np.ndarray
    inducer_mask: np.ndarray
    spec: IllusionSpec


def generate_illusion(spec: IllusionSpec) -> IllusionStimulus:
    """Render a stimulus with exact (hard-edged) masks.

    Deterministic for a given spec; target pixels carry exactly the target
    color and the target and inducer masks are disjoint.
    """
    h, w = spec.height, spec.width
    img = np.empty((h, w, 3))
    img[:] = np.asarray(spec.background)
    if spec.pattern == "stripe_grating":
        target, inducer, colors = _stripe_layout(spec)
    elif spec.pattern == "concentric_disks":
        target, inducer, colors = _disk_layout(spec)
    else:
        target, inducer, colors = _lattice_layout(spec)
    inducer = inducer & ~target
    img[inducer] = colors[inducer]
    img[target] = np.asarray(spec.target_color)
    if not target.any():
        raise DegenerateSpecError("spec geometry produced no target pixels")
    return IllusionStimulus(img, target, inducer, spec)


def _stripe_layout(spec: IllusionSpec):
    """Vertical stripes alternating through the palette; short target
    segments displace pieces of the color-0 stripes."""
    h, w = spec.height, spec.width
    t = spec.inducer_thickness
    p = spec.period
    k = len(spec.inducer_colors)
    colors = np.zeros((h, w, 3))
    inducer = np.zeros((h, w), dtype=bool)
    target = np.zeros((h, w), dtype=bool)

    seg_len = int(spec.geometry("segment_len", 12))
    seg_period = int(spec.geometry("segment_period", 20))
    seg_phase = int(spec.geometry("segment_phase", 24))
    tw = int(spec.geometry("target_thickness", max(t, 4)))

    i = 0
    while True:
        x0 = int(round(i * p))
        if x0 >= w:
            break
        color_idx = i % k
        x1 = min(x0 + t, w)
        if t > 0:
            inducer[:, x0:x1] = True
            colors[:, x0:x1] = np.asarray(spec.inducer_colors[color_idx])
        if color_idx == 0:
            cx = x0 + t // 2
            tx0 = max(cx - tw // 2, 0)
            tx1 = min(tx0 + tw, w)
            for y0 in range(seg_phase, h - seg_len + 1, seg_period):
                target[y0:y0 + seg_len, tx0:tx1] = True
        i += 1
    return target, inducer, colors


def _disk_layout(spec: IllusionSpec):
    """Concentric rings alternating through the palette; target arcs
    displace short pieces of the color-0 rings."""
    h, w = spec.height, spec.width
    t = spec.inducer_thickness
    p = spec.period
    k = len(spec.inducer_colors)
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    yy, xx = np.meshgrid(np.arange(h) - cy, np.arange(w) - cx, indexing="ij")
    rad = np.hypot(yy, xx)
    ang = np.arctan2(yy, xx)

    seg_len = float(spec.geometry("segment_len", 14))
    arcs = int(spec.geometry("arcs_per_ring", 4))
    tw = int(spec.geometry("target_thickness", max(t, 4)))

    colors = np.zeros((h, w, 3))
    inducer = np.zeros((h, w), dtype=bool)
    target = np.zeros((h, w), dtype=bool)
    rmax = rad.max()
    i = 0
    while True:
        r0 = p / 2.0 + i * p
        if r0 > rmax:
            break
        color_idx = i % k
        if t > 0:
            band = (rad >= r0) & (rad < r0 + t)
            inducer |= band
            colors[band] = np.asarray(spec.inducer_colors[color_idx])
        if color_idx == 0:
            rmid = r0 + t / 2.0
            tband = (rad >= rmid - tw / 2.0) & (rad < rmid + tw / 2.0)
            half = (seg_len / 2.0) / max(rmid, 1.0)
            offset = (i // k) * (math.pi / (2.0 * arcs))  # stagger between rings
            for j in range(arcs):
                a = -math.pi + offset + j * (2.0 * math.pi / arcs)
                diff = np.angle(np.exp(1j * (ang - a)))
                target |= tband & (np.abs(diff) <= half)
        i += 1
    return target, inducer, colors


def _lattice_layout(spec: IllusionSpec):
    """A grid of rings whose colors alternate by column; whole rings in the
    color-0 columns are displaced by target rings."""
    h, w = spec.height, spec.width
    t = spec.inducer_thickness
    p = spec.period
    k = len(spec.inducer_colors)

    pitch_x = p
    pitch_y = float(spec.geometry("pitch_y", 0.75 * p))
    radius = float(spec.geometry("ring_radius", max(0.3 * p, t + 2.0)))
    every = int(spec.geometry("target_every", 2))
    tw = int(spec.geometry("target_thickness", max(t, 4)))

    colors = np.zeros((h, w, 3))
    inducer = np.zeros((h, w), dtype=bool)
    target = np.zeros((h, w), dtype=bool)
    yy, xx = np.meshgrid(np.arange(h, dtype=float), np.arange(w, dtype=float),
                         indexing="ij")
    ci = 0
    cxf = pitch_x / 2.0
    while cxf < w:
        color_idx = ci % k
        ri = 0
        cyf = pitch_y / 2.0
        while cyf < h:
            rad = np.hypot(yy - cyf, xx - cxf)
            is_target = color_idx == 0 and (ri % every) == (ci // k) % every
            if is_target:
                band = (rad >= radius - tw / 2.0) & (rad < radius + tw / 2.0)
                target |= band
            elif t > 0:
                band = (rad >= radius - t / 2.0) & (rad < radius + t / 2.0)
                inducer |= band
                colors[band] = np.asarray(spec.inducer_colors[color_idx])
            ri += 1
            cyf += pitch_y
        ci += 1
        cxf += pitch_x
    return target, inducer, colors


def extract_target(stim: IllusionStimulus, fill=None,
                   inducers_only: bool = False) -> np.ndarray:
    """Replace non-target pixels (or just inducer pixels) by a fill color."""
    fill = np.asarray(fill if fill is not None else stim.spec.background,
                      dtype=np.float64)
    out = stim.image.copy()
    if inducers_only:
        out[stim.inducer_mask] = fill
    else:
        out[~stim.target_mask] = fill
    return out


@dataclass
class RegionShift:
    region: int
    area: int
    inducer_rgb: list
    before_deg: float
    after_deg: float
    delta_deg: float

    def to_dict(self) -> dict:
        return {"region": self.region, "area": self.area,
                "inducerRgb": self.inducer_rgb, "beforeDeg": self.before_deg,
                "afterDeg": self.after_deg, "deltaDeg": self.delta_deg}


def _disk_structure(radius: int) -> np.ndarray:
    y, x = np.ogrid[-radius:radius + 1, -radius:radius + 1]
    return x ** 2 + y ** 2 <= radius ** 2


def assimilation_shift(stim: IllusionStimulus, output_img: np.ndarray
                       ) -> list[RegionShift]:
    """Per-target-region chromatic shift toward the local inducer.

    For each connected target region the local inducer color is the mean of
    inducer pixels within a dilation radius of 2 * thickness + 2 px; the
    report gives the angle of the region mean to that inducer before and
    after processing.  Positive delta means the region moved toward its
    inducers, i.e. assimilation was reproduced.
    """
    output_img = check_image(output_img)
    if output_img.shape != stim.image.shape:
        raise DegenerateSpecError("output image dimensions do not match stimulus")
    labels, nregions = ndimage.label(stim.target_mask,
                                     structure=np.ones((3, 3), dtype=bool))
    if nregions == 0:
        raise DegenerateSpecError("stimulus has no target regions")
    radius = 2 * max(stim.spec.inducer_thickness, 0) + 2
    structure = _disk_structure(radius)
    slices = ndimage.find_objects(labels)
    h, w = labels.shape
    out = []
    for rid in range(1, nregions + 1):
        sy, sx = slices[rid - 1]
        # dilate inside a padded crop; full-frame dilation is needless work
        wy = slice(max(sy.start - radius, 0), min(sy.stop + radius, h))
        wx = slice(max(sx.start - radius, 0), min(sx.stop + radius, w))
        region = labels == rid
        ring_crop = ndimage.binary_dilation(region[wy, wx], structure=structure)
        ring = np.zeros_like(region)
        ring[wy, wx] = ring_crop
        local = ring & stim.inducer_mask
        if not local.any():
            local = stim.inducer_mask
        before_mean = stim.image[region].mean(axis=0)
        after_mean = output_img[region].mean(axis=0)
        if not local.any():
            shift = RegionShift(rid, int(region.sum()), [], 0.0, 0.0, 0.0)
        else:
            inducer_rgb = stim.image[local].mean(axis=0)
            before = angular_error(before_mean, inducer_rgb)
            after = angular_error(after_mean, inducer_rgb)
            shift = RegionShift(rid, int(region.sum()),
                                [float(c) for c in inducer_rgb],
                                before, after, before - after)
        out.append(shift)
    return out


def default_ladder() -> list[IllusionSpec]:
    """The shipped 6-spec set: a 4-point stripe-frequency ladder plus a
    concentric-disk and a ring-lattice stimulus."""
    freqs = frequency_ladder()
    specs = [IllusionSpec(pattern="stripe_grating", inducer_frequency=f)
             for f in freqs]
    specs.append(IllusionSpec(pattern="concentric_disks", inducer_frequency=5.0))
    specs.append(IllusionSpec(pattern="ring_lattice", inducer_frequency=5.0))
    return specs


def frequency_ladder() -> list[float]:
    return [5.0, 6.5, 8.0, 9.5]
