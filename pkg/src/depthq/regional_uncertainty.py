"""Regional-uncertainty quality map: depth flatness under RGB texture.

Two signals are multiplied. A localization prior scores each superpixel by
its mean distance to the anchor pixels (diagonal-normalised, squashed
through exp), so regions near trusted evidence score close to 1. An
entropy residual compares windowed Shannon entropy of the RGB-gradient and
depth-gradient maps, firing where RGB is busy but depth is flat. The
product is pooled per superpixel, re-weighted with the same anchor-scoped
colour average used by the edge-consistency stage, and rescaled to [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .edge_consistency import AnchorSet, adaptive_spatial_weight
from .errors import NoAnchorsError
from .raster import (
    GrayMap,
    RgbMap,
    hadamard,
    local_entropy,
    luminance,
    normalize_unit,
    sobel_gradient,
)
from .superpixels import slic
from .superpixels import Segmentation

__all__ = [
    "RuConfig",
    "RuResult",
    "localization_prior",
    "entropy_residual",
    "regional_uncertainty_map",
]


@dataclass(frozen=True)
class RuConfig:
    """Tunables of the regional-uncertainty stage."""

    omega2: float = 7.0
    k_superpixels: int = 1000
    entropy_radius: int = 8
    entropy_bins: int = 64
    omega1: float = 0.01

    def __post_init__(self) -> None:
        for name in ("omega2", "k_superpixels", "entropy_radius", "entropy_bins", "omega1"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class RuResult:
    """Regional-uncertainty map plus the run metadata the sidecar reports."""

    map: GrayMap
    pn: int
    low_confidence: bool


def localization_prior(
    seg: Segmentation,
    apa: AnchorSet,
    cfg: RuConfig,
    diag: float,
) -> np.ndarray:
    """Per-region prior exp(-omega2 * mean anchor distance / diag).

    Distances run from each region centroid to every anchor pixel, are
    normalised by the image diagonal ``diag`` and averaged over the
    anchors, so the output lies in (0, 1] and shrinks as a region drifts
    away from the anchor cloud.
    """
    if apa.is_empty:
        raise NoAnchorsError("localization prior needs at least one anchor pixel")
    if not (diag > 0.0 and math.isfinite(diag)):
        raise ValueError(f"diag must be finite and > 0, got {diag}")
    diff = seg.centroids[:, None, :] - apa.coords[None, :, :].astype(np.float64)
    dist = np.sqrt((diff**2).sum(axis=2))
    return np.exp(-cfg.omega2 * (dist / diag).mean(axis=1))


def entropy_residual(rgbg: GrayMap, dg: GrayMap, cfg: RuConfig) -> GrayMap:
    """Windowed-entropy excess of the RGB-gradient over the depth-gradient.

    Negative excess clamps to zero, so the residual is large exactly where
    the RGB channel varies inside the window while depth stays flat.
    Output in [0, log2(entropy_bins)].
    """
    if rgbg.shape != dg.shape:
        raise ValueError(f"shape mismatch: {rgbg.shape} vs {dg.shape}")
    e_rgb = local_entropy(rgbg, cfg.entropy_radius, cfg.entropy_bins)
    e_d = local_entropy(dg, cfg.entropy_radius, cfg.entropy_bins)
    return GrayMap(np.maximum(e_rgb.data - e_d.data, 0.0))


def regional_uncertainty_map(
    rgb: RgbMap,
    depth: GrayMap,
    apa: AnchorSet,
    cfg: RuConfig | None = None,
    slic_seed: int = 0,
) -> RuResult:
    """Full regional-uncertainty pipeline for one aligned RGB-D pair.

    The entropy residual (rescaled by its log2(bins) ceiling) is multiplied
    by the painted localization prior, pooled as per-region means over a
    ``cfg.k_superpixels`` segmentation of ``rgb``, re-weighted by
    :func:`adaptive_spatial_weight` with the same anchors, painted back and
    rescaled to [0, 1]. With no anchors the prior is undefined, so an
    all-zero map is returned flagged low-confidence.
    """
    cfg = cfg or RuConfig()
    if rgb.shape != depth.shape:
        raise ValueError(f"aligned inputs required, got rgb {rgb.shape}, depth {depth.shape}")
    if apa.is_empty:
        return RuResult(GrayMap(np.zeros(rgb.shape)), pn=0, low_confidence=True)

    rgbg = sobel_gradient(luminance(rgb))
    dg = sobel_gradient(depth)
    ler = entropy_residual(rgbg, dg, cfg)
    ler_unit = GrayMap(ler.data / math.log2(cfg.entropy_bins))

    seg = slic(rgb, cfg.k_superpixels, seed=slic_seed)
    diag = math.hypot(rgb.width, rgb.height)
    prior = localization_prior(seg, apa, cfg, diag)
    raw = hadamard(ler_unit, seg.paint(prior))
    pooled = seg.region_means(raw)
    weighted = adaptive_spatial_weight(pooled, seg, apa, cfg.omega1)
    return RuResult(
        normalize_unit(seg.paint(weighted)), pn=len(apa), low_confidence=False
    )
