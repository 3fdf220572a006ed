"""Quality-weighted fusion of RGB and depth saliency maps.

The per-pixel trust in the depth branch is the mean of whichever quality
maps are present; ablation modes simply omit maps from the bundle. With an
empty bundle the two branches are averaged evenly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .raster import GrayMap, require_unit

__all__ = ["QualityBundle", "quality_weighted_fuse"]


@dataclass(frozen=True)
class QualityBundle:
    """Optional EC/RU/MV quality maps plus their low-confidence flags.

    All present maps must share dimensions and lie in [0, 1].
    ``low_confidence`` names the maps whose producing stage fell back to a
    degenerate path; it is carried through to report sidecars untouched.
    """

    ec: GrayMap | None = None
    ru: GrayMap | None = None
    mv: GrayMap | None = None
    low_confidence: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        unknown = set(self.low_confidence) - {"ec", "ru", "mv"}
        if unknown:
            raise ValueError(f"unknown low-confidence entries: {sorted(unknown)}")
        shapes = {m.shape for _, m in self.present()}
        if len(shapes) > 1:
            raise ValueError(f"quality maps disagree on dimensions: {sorted(shapes)}")
        for name, m in self.present():
            require_unit(m, f"quality map {name}")

    def present(self) -> list[tuple[str, GrayMap]]:
        """The (name, map) pairs actually supplied, in ec, ru, mv order."""
        pairs = [("ec", self.ec), ("ru", self.ru), ("mv", self.mv)]
        return [(n, m) for n, m in pairs if m is not None]


def quality_weighted_fuse(rgb_sal: GrayMap, d_sal: GrayMap, q: QualityBundle) -> GrayMap:
    """Blend the two saliency branches under a per-pixel trust weight.

    The weight w is the pixelwise mean of the present quality maps (0.5
    everywhere for an empty bundle) and the output is
    ``w * d_sal + (1 - w) * rgb_sal``, a convex combination, so the result
    stays between the branches at every pixel.
    """
    if rgb_sal.shape != d_sal.shape:
        raise ValueError(f"shape mismatch: {rgb_sal.shape} vs {d_sal.shape}")
    require_unit(rgb_sal, "rgb_sal")
    require_unit(d_sal, "d_sal")
    present = q.present()
    if present:
        if present[0][1].shape != rgb_sal.shape:
            raise ValueError(
                f"quality maps {present[0][1].shape} do not match saliency {rgb_sal.shape}"
            )
        w = np.mean([m.data for _, m in present], axis=0)
    else:
        w = np.full(rgb_sal.shape, 0.5)
    fused = w * d_sal.data + (1.0 - w) * rgb_sal.data
    # The combination is convex, so any excursion outside [0, 1] is float
    # round-off; clamp it away before downstream quantisation.
    return GrayMap(np.clip(fused, 0.0, 1.0))
