"""Edge-consistency quality map: agreement of depth gradients with contours.

The cue is built in four stages. A fine-grained consistency map FG is the
Hadamard product of the depth-gradient magnitude and a contour map, so it
is large only where a depth edge coincides with an object contour. A
conservative threshold (a multiple of mean(FG)) cuts FG down to trusted
evidence, which two Gaussian passes diffuse into a coarse quality field.
Pixels clearing an aggressive threshold become anchor pixels. Finally the
coarse field is pooled over superpixels and re-weighted by an anchor-scoped
colour-similarity average, yielding a piecewise-constant map in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoAnchorsError
from .raster import (
    GaussianPass,
    GrayMap,
    RgbMap,
    gaussian_blur,
    hadamard,
    luminance,
    normalize_unit,
    rectify_shift,
    require_unit,
    sobel_gradient,
)
from .superpixels import Segmentation, slic

__all__ = [
    "AnchorSet",
    "EcConfig",
    "EcResult",
    "default_contour",
    "mutual_consistency",
    "coarse_edge_quality",
    "aggressive_anchors",
    "adaptive_spatial_weight",
    "edge_consistency_map",
]


@dataclass(frozen=True)
class AnchorSet:
    """Pixels whose consistency value strictly exceeds a threshold.

    ``coords`` is an (n, 2) int64 array of (x, y) pairs in raster-scan
    order; ``threshold_used`` records the cut that produced them.
    """

    coords: np.ndarray
    threshold_used: float

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.coords, dtype=np.int64).reshape(-1, 2)
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @classmethod
    def from_map(cls, m: GrayMap, threshold: float) -> "AnchorSet":
        ys, xs = np.nonzero(m.data > threshold)
        return cls(np.stack([xs, ys], axis=1), float(threshold))

    def __len__(self) -> int:
        return self.coords.shape[0]

    @property
    def is_empty(self) -> bool:
        return self.coords.shape[0] == 0


def _default_passes() -> tuple[GaussianPass, GaussianPass]:
    return (GaussianPass(81, 25.0), GaussianPass(21, 20.0))


@dataclass(frozen=True)
class EcConfig:
    """Tunables of the edge-consistency stage.

    ``tc_mult`` and ``ta_mult`` scale mean(FG) into the conservative and
    aggressive thresholds; ``omega1`` is the colour-similarity strength of
    the spatial weighting; ``passes`` are the two smoothing passes applied
    to the rectified consistency map.
    """

    tc_mult: float = 20.0
    ta_mult: float = 30.0
    omega1: float = 0.01
    k_superpixels: int = 400
    passes: tuple[GaussianPass, GaussianPass] = field(default_factory=_default_passes)

    def __post_init__(self) -> None:
        if not (self.ta_mult > self.tc_mult > 0.0):
            raise ValueError(
                f"need ta_mult > tc_mult > 0, got ta_mult={self.ta_mult} tc_mult={self.tc_mult}"
            )
        if self.omega1 <= 0.0:
            raise ValueError(f"omega1 must be > 0, got {self.omega1}")
        if self.k_superpixels < 1:
            raise ValueError(f"k_superpixels must be >= 1, got {self.k_superpixels}")
        if len(self.passes) != 2:
            raise ValueError("exactly two smoothing passes are required")


@dataclass(frozen=True)
class EcResult:
    """Edge-consistency map plus the run metadata the sidecar reports."""

    map: GrayMap
    tc: float
    ta: float
    apc: AnchorSet
    apa: AnchorSet
    low_confidence: bool


def default_contour(rgb: RgbMap) -> GrayMap:
    """Fallback contour map: gradient magnitude of the RGB luminance."""
    return sobel_gradient(luminance(rgb))


def mutual_consistency(dg: GrayMap, contour: GrayMap) -> GrayMap:
    """Hadamard product of depth-gradient and contour maps (both in [0, 1])."""
    require_unit(dg, "depth gradient")
    require_unit(contour, "contour map")
    return hadamard(dg, contour)


def coarse_edge_quality(fg: GrayMap, cfg: EcConfig) -> tuple[GrayMap, AnchorSet]:
    """Rectify FG at the conservative threshold and diffuse it.

    Returns the twice-smoothed map together with the conservative anchor
    set (pixels with fg strictly above tc_mult * mean(fg)).
    """
    tc = cfg.tc_mult * float(fg.data.mean())
    ec_minus = gaussian_blur(gaussian_blur(rectify_shift(fg, tc), cfg.passes[0]), cfg.passes[1])
    return ec_minus, AnchorSet.from_map(fg, tc)


def aggressive_anchors(fg: GrayMap, cfg: EcConfig) -> AnchorSet:
    """Anchor pixels clearing the aggressive threshold ta_mult * mean(fg)."""
    return AnchorSet.from_map(fg, cfg.ta_mult * float(fg.data.mean()))


def adaptive_spatial_weight(
    values: np.ndarray,
    seg: Segmentation,
    apa: AnchorSet,
    omega1: float,
) -> np.ndarray:
    """Anchor-scoped colour-similarity average of per-region values.

    For region i, the scope is every region whose centroid lies within
    r_i of region i's centroid, where r_i is the distance from that
    centroid to the nearest anchor pixel. Values in the scope are averaged
    with weights exp(-omega1 * ||mean_rgb_i - mean_rgb_j||), so the output
    is a convex combination of the inputs and region i always weighs in on
    itself.

    Raises NoAnchorsError when ``apa`` is empty, since no scope exists.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.shape != (seg.n_regions,):
        raise ValueError(f"expected {seg.n_regions} region values, got {vals.shape}")
    if apa.is_empty:
        raise NoAnchorsError("cannot derive a spatial scope from an empty anchor set")

    cents = seg.centroids
    diff_anchor = cents[:, None, :] - apa.coords[None, :, :].astype(np.float64)
    radius = np.sqrt((diff_anchor**2).sum(axis=2)).min(axis=1)

    diff_cent = cents[:, None, :] - cents[None, :, :]
    d_cent = np.sqrt((diff_cent**2).sum(axis=2))
    scope = d_cent <= radius[:, None]

    diff_col = seg.mean_colors[:, None, :] - seg.mean_colors[None, :, :]
    w = np.exp(-omega1 * np.sqrt((diff_col**2).sum(axis=2)))
    w = np.where(scope, w, 0.0)
    return (w * vals[None, :]).sum(axis=1) / w.sum(axis=1)


def edge_consistency_map(
    rgb: RgbMap,
    depth: GrayMap,
    contour: GrayMap,
    cfg: EcConfig | None = None,
    slic_seed: int = 0,
) -> EcResult:
    """Full edge-consistency pipeline for one aligned RGB-D-contour triple.

    The coarse quality field is pooled as a mean over each superpixel of a
    ``cfg.k_superpixels`` segmentation of ``rgb``, re-weighted by
    :func:`adaptive_spatial_weight`, painted back per region and rescaled
    to [0, 1]. With no aggressive anchors the weighting is undefined, so
    the normalised coarse field itself is returned flagged low-confidence.
    """
    cfg = cfg or EcConfig()
    if rgb.shape != depth.shape or rgb.shape != contour.shape:
        raise ValueError(
            f"aligned inputs required, got rgb {rgb.shape}, depth {depth.shape}, "
            f"contour {contour.shape}"
        )
    dg = sobel_gradient(depth)
    fg = mutual_consistency(dg, contour)
    ec_minus, apc = coarse_edge_quality(fg, cfg)
    apa = aggressive_anchors(fg, cfg)
    tc = apc.threshold_used
    ta = apa.threshold_used

    if apa.is_empty:
        return EcResult(normalize_unit(ec_minus), tc, ta, apc, apa, low_confidence=True)

    seg = slic(rgb, cfg.k_superpixels, seed=slic_seed)
    pooled = seg.region_means(ec_minus)
    weighted = adaptive_spatial_weight(pooled, seg, apa, cfg.omega1)
    return EcResult(normalize_unit(seg.paint(weighted)), tc, ta, apc, apa, low_confidence=False)
