"""Raster containers and the shared 2-D kernels built on top of them.

Conventions used throughout the package:

* Gray rasters are 2-D float64 arrays indexed ``[row, col]``. Whenever a
  pixel coordinate pair appears in an API it is ``(x, y)`` with ``x`` the
  column index.
* Maps produced by the normalising operations lie in [0, 1]. Entropy maps
  are the exception: they are measured in bits and bounded by log2(bins).
* Every windowed operation handles borders by replicating the edge pixel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import DegenerateInputError

__all__ = [
    "GrayMap",
    "RgbMap",
    "GaussianPass",
    "require_unit",
    "normalize_unit",
    "sobel_gradient",
    "gaussian_blur",
    "rectify_shift",
    "hadamard",
    "local_entropy",
    "luminance",
]


class GrayMap:
    """Immutable single-channel raster of float64 intensities.

    The constructor takes ownership of the buffer: the array is made
    C-contiguous float64 (copying only if needed) and marked read-only.
    Values must be finite; the [0, 1] range is a convention of the
    producing operation, not a constructor invariant, because entropy
    rasters legitimately exceed 1.
    """

    __slots__ = ("data",)

    def __init__(self, data) -> None:
        arr = np.ascontiguousarray(data, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DegenerateInputError(
                f"gray raster must be 2-D and non-empty, got shape {arr.shape}"
            )
        if not np.isfinite(arr).all():
            raise ValueError("gray raster contains non-finite values")
        arr.setflags(write=False)
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"GrayMap({self.width}x{self.height})"


class RgbMap:
    """Immutable 3-channel raster with float64 values in [0, 255]."""

    __slots__ = ("data",)

    def __init__(self, data) -> None:
        arr = np.ascontiguousarray(data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DegenerateInputError(
                f"rgb raster must be HxWx3 and non-empty, got shape {arr.shape}"
            )
        if not np.isfinite(arr).all():
            raise ValueError("rgb raster contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 255.0:
            raise ValueError("rgb raster values must lie in [0, 255]")
        arr.setflags(write=False)
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[:2]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"RgbMap({self.width}x{self.height})"


@dataclass(frozen=True)
class GaussianPass:
    """One separable Gaussian smoothing pass.

    ``kernel_side`` is the full side length of the square kernel and must be
    odd so the kernel has a centre tap; ``sigma`` is the standard deviation
    in pixels. The 2-D kernel is the outer product of a single normalised
    1-D profile, so the pass is applied as two 1-D correlations.
    """

    kernel_side: int
    sigma: float

    def __post_init__(self) -> None:
        if self.kernel_side < 1 or self.kernel_side % 2 == 0:
            raise ValueError(f"kernel_side must be odd and >= 1, got {self.kernel_side}")
        if not (self.sigma > 0.0 and np.isfinite(self.sigma)):
            raise ValueError(f"sigma must be finite and > 0, got {self.sigma}")

    def weights(self) -> np.ndarray:
        """Normalised 1-D kernel profile of length ``kernel_side``."""
        half = self.kernel_side // 2
        t = np.arange(-half, half + 1, dtype=np.float64)
        w = np.exp(-0.5 * (t / self.sigma) ** 2)
        return w / w.sum()


def require_unit(m: GrayMap, what: str = "map") -> None:
    """Raise ValueError unless every value of ``m`` lies in [0, 1]."""
    lo = float(m.data.min())
    hi = float(m.data.max())
    if lo < 0.0 or hi > 1.0:
        raise ValueError(f"{what} must lie in [0, 1], observed range [{lo}, {hi}]")


def normalize_unit(m: GrayMap) -> GrayMap:
    """Scale a non-negative raster by its maximum; an all-zero raster stays zero."""
    if float(m.data.min()) < 0.0:
        raise ValueError("normalize_unit requires a non-negative raster")
    peak = float(m.data.max())
    if peak <= 0.0:
        return GrayMap(np.zeros(m.shape))
    return GrayMap(m.data / peak)


def sobel_gradient(m: GrayMap) -> GrayMap:
    """Gradient magnitude of a raster, rescaled to [0, 1].

    Horizontal and vertical 3x3 Sobel responses are combined as
    sqrt(gx^2 + gy^2) and the result is passed through
    :func:`normalize_unit`, so a constant raster maps to all zeros.
    Rasters smaller than 3x3 are rejected.
    """
    if m.height < 3 or m.width < 3:
        raise DegenerateInputError(
            f"sobel_gradient needs at least a 3x3 raster, got {m.width}x{m.height}"
        )
    p = np.pad(m.data, 1, mode="edge")
    # Pairwise differences are taken before the (1, 2, 1) weighting so a
    # constant raster cancels exactly; summing weighted taps instead can
    # leave rounding residue that the final rescale blows up to 1.0.
    dx = p[:, 2:] - p[:, :-2]
    gx = dx[:-2, :] + 2.0 * dx[1:-1, :] + dx[2:, :]
    dy = p[2:, :] - p[:-2, :]
    gy = dy[:, :-2] + 2.0 * dy[:, 1:-1] + dy[:, 2:]
    return normalize_unit(GrayMap(np.sqrt(gx * gx + gy * gy)))


def gaussian_blur(m: GrayMap, gp: GaussianPass) -> GrayMap:
    """Smooth a raster with one separable Gaussian pass (replicate borders)."""
    w = gp.weights()
    out = correlate1d(m.data, w, axis=0, mode="nearest")
    out = correlate1d(out, w, axis=1, mode="nearest")
    return GrayMap(out)


def rectify_shift(m: GrayMap, threshold: float) -> GrayMap:
    """Subtract ``threshold`` and clamp negatives to zero."""
    if not np.isfinite(threshold):
        raise ValueError(f"threshold must be finite, got {threshold}")
    return GrayMap(np.maximum(m.data - threshold, 0.0))


def hadamard(a: GrayMap, b: GrayMap) -> GrayMap:
    """Element-wise product of two same-sized rasters."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return GrayMap(a.data * b.data)


def local_entropy(m: GrayMap, radius: int, bins: int) -> GrayMap:
    """Shannon entropy of the intensity histogram in a sliding square window.

    The input must lie in [0, 1]. Each pixel is binned as
    ``min(floor(v * bins), bins - 1)`` and the entropy at a pixel is
    ``-sum(p * log2(p))`` over the occupancy ``p`` of the (2*radius+1)^2
    window centred there, with edge-replicated padding so every window has
    the same pixel count. Output values lie in [0, log2(bins)].

    Per-bin occupancy counts are computed with integer summed-area tables,
    one per bin, which keeps the window counts exact.
    """
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    require_unit(m, "local_entropy input")
    h, w = m.shape
    win = 2 * radius + 1
    area = float(win * win)
    padded = np.pad(m.data, radius, mode="edge")
    idx = np.minimum((padded * bins).astype(np.int64), bins - 1)
    ent = np.zeros((h, w), dtype=np.float64)
    sat = np.zeros((idx.shape[0] + 1, idx.shape[1] + 1), dtype=np.int64)
    for b in range(bins):
        ind = idx == b
        if not ind.any():
            continue
        np.cumsum(ind, axis=0, out=sat[1:, 1:])
        np.cumsum(sat[1:, 1:], axis=1, out=sat[1:, 1:])
        cnt = sat[win:, win:] - sat[:-win, win:] - sat[win:, :-win] + sat[:-win, :-win]
        p = cnt / area
        nz = cnt > 0
        ent[nz] -= p[nz] * np.log2(p[nz])
    return GrayMap(ent)


_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)


def luminance(rgb: RgbMap) -> GrayMap:
    """Rec. 601 luma of an RGB raster, rescaled from [0, 255] to [0, 1]."""
    return GrayMap(rgb.data @ _LUMA / 255.0)
