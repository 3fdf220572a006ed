"""Saliency evaluation: PR curves, F/S/E measures, and MAE.

Shared conventions, applied uniformly and relied on by the tests:

* Saliency maps are quantised to integers 0..255 with round-half-up
  (``floor(v * 255 + 0.5)``); threshold T marks ``sal_q >= T`` foreground.
* Ground truth is binarised at 0.5 (``gt >= 0.5`` is foreground).
* Zero denominators in precision/recall/F yield 0.
* The adaptive threshold is ``min(2 * mean(sal_q), 255)``.
* A ground truth with no foreground raises
  :class:`~depthq.errors.DegenerateGroundTruthError` from the
  precision/recall family; S and E instead follow explicit degenerate
  rules, and MAE needs no special case.

The threshold sweeps run on 256-bin histograms of the quantised map
(separately over ground-truth foreground and overall), whose reversed
cumulative sums give exact TP/FP/FN counts per threshold; the resulting
ratios are bit-identical to a per-threshold masking sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGroundTruthError
from .raster import GrayMap, require_unit

__all__ = [
    "PRCurve",
    "FStats",
    "EStats",
    "ImageEval",
    "MetricReport",
    "quantize255",
    "f_measure",
    "pr_curve",
    "f_stats",
    "s_measure",
    "e_measure",
    "mae",
    "evaluate_pair",
]

_EPS = 1e-20
_METRIC_KEYS = ("sm", "adp_e", "max_e", "adp_f", "mean_f", "max_f", "mae")


@dataclass(frozen=True)
class PRCurve:
    """Precision/recall/F at every integer threshold 0..255."""

    thresholds: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    f: np.ndarray

    def __post_init__(self) -> None:
        for name in ("thresholds", "precision", "recall", "f"):
            arr = getattr(self, name)
            if arr.shape != (256,):
                raise ValueError(f"{name} must have 256 entries, got {arr.shape}")
            arr.setflags(write=False)


@dataclass(frozen=True)
class FStats:
    adp_f: float
    mean_f: float
    max_f: float


@dataclass(frozen=True)
class EStats:
    adp_e: float
    max_e: float


def quantize255(sal: GrayMap) -> np.ndarray:
    """Quantise a unit-range map to int64 levels 0..255, rounding half up."""
    require_unit(sal, "saliency map")
    return np.clip(np.floor(sal.data * 255.0 + 0.5), 0, 255).astype(np.int64)


def _gt_foreground(sal: GrayMap, gt: GrayMap) -> np.ndarray:
    if sal.shape != gt.shape:
        raise ValueError(f"shape mismatch: {sal.shape} vs {gt.shape}")
    require_unit(gt, "ground truth")
    return gt.data >= 0.5


def f_measure(precision: float, recall: float, beta2: float = 0.3) -> float:
    """Weighted harmonic mean (beta2+1)PR / (beta2 P + R); 0 on zero denominator."""
    den = beta2 * precision + recall
    if den == 0.0:
        return 0.0
    return (beta2 + 1.0) * precision * recall / den


def _counts(sal: GrayMap, gt: GrayMap) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Reverse-cumulative foreground/overall counts per threshold.

    Returns (tp, pred, npos, n): tp[t] and pred[t] are the ground-truth-hit
    and total pixel counts at sal_q >= t; npos is the ground-truth
    foreground size and n the pixel count. Raises on foreground-free GT.
    """
    fg = _gt_foreground(sal, gt)
    salq = quantize255(sal)
    npos = int(fg.sum())
    if npos == 0:
        raise DegenerateGroundTruthError("ground truth has no foreground pixels")
    hist_fg = np.bincount(salq[fg], minlength=256)
    hist_all = np.bincount(salq.ravel(), minlength=256)
    tp = np.cumsum(hist_fg[::-1])[::-1]
    pred = np.cumsum(hist_all[::-1])[::-1]
    return tp, pred, npos, salq.size


def _divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(num.shape, dtype=np.float64)
    np.divide(num, den, out=out, where=den > 0)
    return out


def pr_curve(sal: GrayMap, gt: GrayMap) -> PRCurve:
    """Precision/recall/F sweep over thresholds 0..255.

    Raises DegenerateGroundTruthError when the ground truth has no
    foreground; recall is non-increasing in the threshold by construction.
    """
    tp, pred, npos, _ = _counts(sal, gt)
    tp = tp.astype(np.float64)
    precision = _divide(tp, pred.astype(np.float64))
    recall = tp / npos
    beta2 = 0.3
    f = _divide((beta2 + 1.0) * precision * recall, beta2 * precision + recall)
    return PRCurve(np.arange(256, dtype=np.int64), precision, recall, f)


def _adaptive_threshold(salq: np.ndarray) -> float:
    return min(2.0 * float(salq.mean()), 255.0)


def f_stats(sal: GrayMap, gt: GrayMap) -> FStats:
    """Adaptive, mean, and maximum F over the threshold sweep.

    ``max_f`` ranges over all 256 thresholds; ``mean_f`` over 1..255 (the
    T=0 row marks every pixel foreground and would dilute the average for
    any map); ``adp_f`` evaluates the curve at the adaptive threshold,
    which lands on row ceil(t) since quantised values are integers.
    """
    curve = pr_curve(sal, gt)
    t_adp = _adaptive_threshold(quantize255(sal))
    row = int(np.ceil(t_adp))
    return FStats(
        adp_f=float(curve.f[row]),
        mean_f=float(curve.f[1:].mean()),
        max_f=float(curve.f.max()),
    )


def s_measure(sal: GrayMap, gt: GrayMap, alpha: float = 0.5) -> float:
    """Structure measure: alpha-blend of object- and region-aware terms.

    Degenerate rules: an all-background ground truth scores
    ``1 - mean(sal)``; all-foreground scores ``mean(sal)``. The result is
    clamped to [0, 1].
    """
    require_unit(sal, "saliency map")
    fg = _gt_foreground(sal, gt)
    mu = float(fg.mean())
    if mu == 0.0:
        return 1.0 - float(sal.data.mean())
    if mu == 1.0:
        return float(sal.data.mean())
    s = alpha * _s_object(sal.data, fg) + (1.0 - alpha) * _s_region(sal.data, fg)
    return float(np.clip(s, 0.0, 1.0))


def _object_score(vals: np.ndarray) -> float:
    # vals: saliency (or inverted saliency) restricted to one side of the GT.
    x = float(vals.mean())
    sigma = float(vals.std())
    return 2.0 * x / (x * x + 1.0 + sigma + _EPS)


def _s_object(sal: np.ndarray, fg: np.ndarray) -> float:
    mu = float(fg.mean())
    o_fg = _object_score(sal[fg])
    o_bg = _object_score(1.0 - sal[~fg])
    return mu * o_fg + (1.0 - mu) * o_bg


def _gt_centroid(fg: np.ndarray) -> tuple[int, int]:
    # 1-based rounded centroid (round half up), so the top-left block is
    # never empty; returned as (col_split, row_split) slice bounds.
    h, w = fg.shape
    total = fg.sum()
    cols = fg.sum(axis=0) @ np.arange(1, w + 1)
    rows = fg.sum(axis=1) @ np.arange(1, h + 1)
    x = int(np.floor(cols / total + 0.5))
    y = int(np.floor(rows / total + 0.5))
    return x, y


def _ssim_block(pred: np.ndarray, gt: np.ndarray) -> float:
    n = pred.size
    if n == 0:
        return 0.0
    x = float(pred.mean())
    y = float(gt.mean())
    sigma_x = float(((pred - x) ** 2).sum()) / (n - 1 + _EPS)
    sigma_y = float(((gt - y) ** 2).sum()) / (n - 1 + _EPS)
    sigma_xy = float(((pred - x) * (gt - y)).sum()) / (n - 1 + _EPS)
    alpha = 4.0 * x * y * sigma_xy
    beta = (x * x + y * y) * (sigma_x + sigma_y)
    if alpha != 0.0:
        return alpha / (beta + _EPS)
    if beta == 0.0:
        return 1.0
    return 0.0


def _s_region(sal: np.ndarray, fg: np.ndarray) -> float:
    h, w = fg.shape
    x, y = _gt_centroid(fg)
    area = float(h * w)
    gtf = fg.astype(np.float64)
    weights = (
        x * y / area,
        (w - x) * y / area,
        x * (h - y) / area,
    )
    q = (
        weights[0] * _ssim_block(sal[:y, :x], gtf[:y, :x])
        + weights[1] * _ssim_block(sal[:y, x:], gtf[:y, x:])
        + weights[2] * _ssim_block(sal[y:, :x], gtf[y:, :x])
        + (1.0 - weights[0] - weights[1] - weights[2])
        * _ssim_block(sal[y:, x:], gtf[y:, x:])
    )
    return q


def _enhanced_mean(n11: int, n10: int, n01: int, n00: int, npos: int, n: int) -> float:
    """Mean enhanced-alignment over pixels from the 4-cell contingency table.

    Cells: n11 fg/fg, n10 gt-only, n01 pred-only, n00 neither. Centring
    makes the alignment value constant within each cell, so the pixel mean
    is a count-weighted sum of at most four values.
    """
    mu_g = npos / n
    mu_f = (n11 + n01) / n
    phi_g = (1.0 - mu_g, -mu_g)
    phi_f = (1.0 - mu_f, -mu_f)
    total = 0.0
    for cnt, pg, pf in (
        (n11, phi_g[0], phi_f[0]),
        (n10, phi_g[0], phi_f[1]),
        (n01, phi_g[1], phi_f[0]),
        (n00, phi_g[1], phi_f[1]),
    ):
        if cnt == 0:
            continue
        den = pg * pg + pf * pf
        xi = 0.0 if den == 0.0 else 2.0 * pg * pf / den
        total += cnt * (1.0 + xi) ** 2 / 4.0
    return total / n


def e_measure(sal: GrayMap, gt: GrayMap) -> EStats:
    """Adaptive and maximum enhanced-alignment over the threshold sweep.

    For each threshold the binary foreground map and the ground truth are
    mean-centred, aligned per pixel, enhanced through ((1+xi)^2)/4 and
    averaged over all pixels. Degenerate ground truths use the explicit
    rules: all-background scores ``1 - mean(FM)``, all-foreground scores
    ``mean(FM)``.
    """
    fg = _gt_foreground(sal, gt)
    salq = quantize255(sal)
    n = salq.size
    npos = int(fg.sum())
    hist_all = np.bincount(salq.ravel(), minlength=256)
    pred = np.cumsum(hist_all[::-1])[::-1]

    if npos == 0:
        scores = 1.0 - pred / n
    elif npos == n:
        scores = pred / n
    else:
        hist_fg = np.bincount(salq[fg], minlength=256)
        tp = np.cumsum(hist_fg[::-1])[::-1]
        scores = np.empty(256, dtype=np.float64)
        for t in range(256):
            n11 = int(tp[t])
            n01 = int(pred[t]) - n11
            n10 = npos - n11
            n00 = n - npos - n01
            scores[t] = _enhanced_mean(n11, n10, n01, n00, npos, n)

    row = int(np.ceil(_adaptive_threshold(salq)))
    return EStats(adp_e=float(scores[row]), max_e=float(scores.max()))


def mae(sal: GrayMap, gt: GrayMap) -> float:
    """Mean absolute per-pixel difference of two unit-range maps."""
    if sal.shape != gt.shape:
        raise ValueError(f"shape mismatch: {sal.shape} vs {gt.shape}")
    require_unit(sal, "saliency map")
    require_unit(gt, "ground truth")
    return float(np.abs(sal.data - gt.data).mean())


@dataclass(frozen=True)
class ImageEval:
    """All per-image metrics; the F family is None on foreground-free GT."""

    stem: str
    sm: float
    adp_e: float
    max_e: float
    adp_f: float | None
    mean_f: float | None
    max_f: float | None
    mae: float

    def as_dict(self) -> dict:
        return {
            "stem": self.stem,
            "sm": self.sm,
            "adp_e": self.adp_e,
            "max_e": self.max_e,
            "adp_f": self.adp_f,
            "mean_f": self.mean_f,
            "max_f": self.max_f,
            "mae": self.mae,
        }


def evaluate_pair(stem: str, sal: GrayMap, gt: GrayMap) -> tuple[ImageEval, PRCurve | None]:
    """Every metric for one saliency/ground-truth pair.

    When the ground truth has no foreground the PR curve and F statistics
    are undefined; those fields come back None and the caller is expected
    to log the exclusion.
    """
    es = e_measure(sal, gt)
    base = {
        "sm": s_measure(sal, gt),
        "adp_e": es.adp_e,
        "max_e": es.max_e,
        "mae": mae(sal, gt),
    }
    try:
        curve = pr_curve(sal, gt)
        fs = f_stats(sal, gt)
    except DegenerateGroundTruthError:
        return ImageEval(stem=stem, adp_f=None, mean_f=None, max_f=None, **base), None
    return (
        ImageEval(stem=stem, adp_f=fs.adp_f, mean_f=fs.mean_f, max_f=fs.max_f, **base),
        curve,
    )


class MetricReport:
    """Per-image metric rows plus their arithmetic-mean aggregate.

    Aggregates average each metric over the images where it is defined;
    a metric undefined everywhere aggregates to None. ``n_images`` counts
    the evaluated rows. Rows are kept sorted by stem so emission order
    never depends on evaluation order.
    """

    def __init__(self, dataset: str, per_image: list[ImageEval]) -> None:
        self.dataset = dataset
        self.per_image = sorted(per_image, key=lambda r: r.stem)
        self.n_images = len(self.per_image)

    @property
    def aggregate(self) -> dict:
        agg = {}
        for key in _METRIC_KEYS:
            vals = [getattr(r, key) for r in self.per_image]
            vals = [v for v in vals if v is not None]
            agg[key] = float(np.mean(vals)) if vals else None
        return agg

    def to_json_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "n_images": self.n_images,
            "per_image": [r.as_dict() for r in self.per_image],
            "aggregate": self.aggregate,
        }
