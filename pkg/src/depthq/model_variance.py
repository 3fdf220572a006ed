"""Model-variance quality map: plumbing around an external saliency model.

The saliency model itself runs elsewhere. This module prepares its
4-channel input (RGB plus one uniform-noise channel, serialized as RGBA
with the noise in alpha) and diffs the two saliency maps the model
produces for the real-depth and noise-channel inputs. A large difference
marks pixels where the depth channel actually changed the prediction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import GrayMap, RgbMap, require_unit

__all__ = ["RgbrImage", "make_rgbr", "model_variance"]


@dataclass(frozen=True)
class RgbrImage:
    """An RGB raster paired with its seeded uniform noise channel."""

    rgb: RgbMap
    noise: GrayMap
    seed: int

    def __post_init__(self) -> None:
        if self.rgb.shape != self.noise.shape:
            raise ValueError(
                f"noise shape {self.noise.shape} does not match rgb {self.rgb.shape}"
            )


def make_rgbr(rgb: RgbMap, seed: int) -> RgbrImage:
    """Attach a deterministic uniform [0, 1) noise channel to an RGB raster.

    The channel is drawn from numpy's default generator (PCG64) seeded with
    ``seed``, so identical (dimensions, seed) pairs reproduce the channel
    bit-for-bit.
    """
    noise = np.random.default_rng(seed).random((rgb.height, rgb.width))
    return RgbrImage(rgb=rgb, noise=GrayMap(noise), seed=seed)


def model_variance(sal_rgbd: GrayMap, sal_rgbr: GrayMap) -> GrayMap:
    """Absolute per-pixel difference of two saliency maps in [0, 1]."""
    if sal_rgbd.shape != sal_rgbr.shape:
        raise ValueError(f"shape mismatch: {sal_rgbd.shape} vs {sal_rgbr.shape}")
    require_unit(sal_rgbd, "sal_rgbd")
    require_unit(sal_rgbr, "sal_rgbr")
    return GrayMap(np.abs(sal_rgbd.data - sal_rgbr.data))
