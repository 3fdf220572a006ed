"""Reading and writing rasters as PNG files.

Gray maps are stored as 8-bit grayscale PNG with the quantisation
``q = floor(v * 255 + 0.5)`` (round half up), and read back as ``q / 255``.
Label rasters use 16-bit grayscale. Four-channel output packs an extra
unit-range map into the alpha plane.
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image

from .raster import GrayMap, RgbMap, require_unit

__all__ = [
    "quantize_unit",
    "read_gray",
    "read_rgb",
    "write_gray",
    "write_labels",
    "write_rgb",
    "write_rgba",
]


def quantize_unit(m: GrayMap) -> np.ndarray:
    """Map a unit-range raster to uint8 with round-half-up."""
    require_unit(m, "quantize_unit input")
    q = np.floor(m.data * 255.0 + 0.5)
    return np.clip(q, 0, 255).astype(np.uint8)


def read_gray(path: str | os.PathLike) -> GrayMap:
    """Load a PNG as a unit-range gray map.

    Color images are converted to luma first; 16-bit grayscale is scaled by
    its full 65535 range.
    """
    with Image.open(path) as im:
        if im.mode in ("I", "I;16", "I;16B", "I;16L"):
            arr = np.asarray(im.convert("I"), dtype=np.float64)
            return GrayMap(arr / 65535.0)
        if im.mode != "L":
            im = im.convert("L")
        arr = np.asarray(im, dtype=np.float64)
    return GrayMap(arr / 255.0)


def read_rgb(path: str | os.PathLike) -> RgbMap:
    """Load a PNG as an RGB raster in [0, 255], dropping any alpha plane."""
    with Image.open(path) as im:
        if im.mode != "RGB":
            im = im.convert("RGB")
        arr = np.asarray(im, dtype=np.float64)
    return RgbMap(arr)


def write_gray(path: str | os.PathLike, m: GrayMap) -> None:
    """Write a unit-range map as 8-bit grayscale PNG."""
    Image.fromarray(quantize_unit(m), mode="L").save(path, format="PNG")


def write_labels(path: str | os.PathLike, labels: np.ndarray) -> None:
    """Write a non-negative integer label raster as 16-bit grayscale PNG."""
    arr = np.asarray(labels)
    if arr.ndim != 2:
        raise ValueError(f"label raster must be 2-D, got shape {arr.shape}")
    if arr.min() < 0 or arr.max() > 65535:
        raise ValueError("label ids must fit in uint16")
    Image.fromarray(arr.astype(np.uint16)).save(path, format="PNG")


def write_rgb(path: str | os.PathLike, rgb: RgbMap) -> None:
    """Write an RGB raster as 8-bit PNG, rounding channel values half-up."""
    q = np.clip(np.floor(rgb.data + 0.5), 0, 255).astype(np.uint8)
    Image.fromarray(q, mode="RGB").save(path, format="PNG")


def write_rgba(path: str | os.PathLike, rgb: RgbMap, alpha: GrayMap) -> None:
    """Write RGB plus a unit-range alpha plane as a 4-channel PNG."""
    if rgb.shape != alpha.shape:
        raise ValueError(f"shape mismatch: rgb {rgb.shape} vs alpha {alpha.shape}")
    q = np.clip(np.floor(rgb.data + 0.5), 0, 255).astype(np.uint8)
    a = quantize_unit(alpha)
    Image.fromarray(np.dstack([q, a]), mode="RGBA").save(path, format="PNG")
