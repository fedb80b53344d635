"""Linear-RGB image containers, sRGB transfer curves, and PNG I/O.

Images are plain numpy arrays of shape (H, W, 3), float64, linear radiometric
units with every channel finite and >= 0.  Illuminants are unit-norm float64
3-vectors with nonnegative components.  Masks are boolean (H, W) arrays.
"""

from __future__ import annotations

import os

import cv2
import numpy as np

from .errors import DegenerateVectorError, FormatError

DEGENERATE_NORM = 1e-12


def check_image(img: np.ndarray) -> np.ndarray:
    """Validate a linear image array and return it as float64."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise FormatError(f"expected (H, W, 3) array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise FormatError("image must be at least 1x1")
    if not np.all(np.isfinite(arr)):
        raise FormatError("image contains non-finite values")
    if arr.min() < 0:
        raise FormatError("image contains negative values")
    return arr


def srgb_decode(v: np.ndarray) -> np.ndarray:
    """sRGB electro-optical decode, [0,1] encoded -> linear."""
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def srgb_encode(v: np.ndarray) -> np.ndarray:
    """Inverse of srgb_decode on [0,1]."""
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= 0.0031308, v * 12.92, 1.055 * v ** (1 / 2.4) - 0.055)


def load_image(path: str, transfer: str = "linear") -> np.ndarray:
    """Load an 8- or 16-bit PNG as a linear (H, W, 3) float64 image.

    Values are scaled to [0,1] by bit depth.  With transfer="srgb" the sRGB
    decode is applied per channel.  Alpha is dropped; grayscale is replicated
    to three channels.
    """
    if transfer not in ("linear", "srgb"):
        raise FormatError(f"unknown transfer {transfer!r}")
    if not os.path.exists(path):
        raise IOError(f"no such file: {path}")
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise IOError(f"unreadable image file: {path}")
    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise FormatError(f"unsupported bit depth {raw.dtype} in {path}")
    if raw.ndim == 2:
        raw = np.repeat(raw[:, :, None], 3, axis=2)
    elif raw.ndim == 3 and raw.shape[2] == 4:
        raw = raw[:, :, :3]
    elif raw.ndim != 3 or raw.shape[2] != 3:
        raise FormatError(f"unsupported color layout {raw.shape} in {path}")
    img = raw[:, :, ::-1].astype(np.float64) / scale  # BGR -> RGB
    if transfer == "srgb":
        img = srgb_decode(img)
    return img


def save_image(img: np.ndarray, path: str, transfer: str = "linear",
               depth: int = 16) -> None:
    """Save a linear image as PNG, clipping channels to [0,1] first."""
    if transfer not in ("linear", "srgb"):
        raise FormatError(f"unknown transfer {transfer!r}")
    if depth not in (8, 16):
        raise FormatError(f"unsupported depth {depth}")
    arr = np.clip(check_image(img), 0.0, 1.0)
    if transfer == "srgb":
        arr = srgb_encode(arr)
    peak = (1 << depth) - 1
    quant = np.round(arr * peak).astype(np.uint16 if depth == 16 else np.uint8)
    ok = cv2.imwrite(path, quant[:, :, ::-1])
    if not ok:
        raise IOError(f"failed to write {path}")


def normalize_to_unit(v: np.ndarray) -> np.ndarray:
    """Return v / ||v||2; raise DegenerateVectorError for near-zero norm."""
    v = np.asarray(v, dtype=np.float64)
    n = float(np.linalg.norm(v))
    if n < DEGENERATE_NORM:
        raise DegenerateVectorError(f"vector norm {n} below {DEGENERATE_NORM}")
    return v / n


WHITE = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
