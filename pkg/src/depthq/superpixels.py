"""Superpixel segmentation with a compact, fully deterministic SLIC variant.

The clustering runs in CIELAB (D65 white point) with the additive distance

    d = d_lab + (compactness / step) * d_xy

where ``d_lab`` and ``d_xy`` are Euclidean distances in colour and pixel
space and ``step = sqrt(n_pixels / k)`` is the sampling interval. Cluster
centres start on a regular grid, each nudged to the lowest-gradient pixel
of its 3x3 neighbourhood, and pixels are claimed inside the usual
2*step x 2*step search window per centre (pixels no window reaches fall
back to the nearest centre). Every stage breaks ties toward the lowest
cluster id,
and the iteration count is fixed, so the segmentation is reproducible
bit-for-bit across runs and platforms.

After the final assignment, connectivity is enforced: each label keeps its
largest 4-connected component and every other component is absorbed into
the largest adjacent surviving region. Region ids are then renumbered to
be contiguous from zero, so the final region count may differ from ``k``.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numba as nb
import numpy as np

from . import pngio
from .raster import GrayMap, RgbMap, luminance, sobel_gradient

__all__ = ["Region", "Segmentation", "slic", "rgb_to_lab", "save_segmentation_debug"]


@dataclass(frozen=True)
class Region:
    """Summary of one superpixel: id, centroid (x, y), mean RGB, pixel count."""

    id: int
    centroid: tuple[float, float]
    mean_color: tuple[float, float, float]
    pixel_count: int


class Segmentation:
    """A label raster plus per-region summaries.

    ``labels`` is an int32 raster of region ids, contiguous from 0; region
    ``i`` of ``regions`` has id ``i``. Per-region summaries are mirrored
    into arrays at construction for vectorised consumers.
    """

    def __init__(self, labels: np.ndarray, regions: tuple[Region, ...]) -> None:
        arr = np.ascontiguousarray(labels, dtype=np.int32)
        if arr.ndim != 2:
            raise ValueError(f"label raster must be 2-D, got shape {arr.shape}")
        if len(regions) == 0:
            raise ValueError("segmentation needs at least one region")
        if int(arr.min()) != 0 or int(arr.max()) != len(regions) - 1:
            raise ValueError("region ids must be contiguous from 0 and match the raster")
        for i, r in enumerate(regions):
            if r.id != i:
                raise ValueError(f"region list out of order at index {i}")
        arr.setflags(write=False)
        self.labels = arr
        self.regions = tuple(regions)
        self.centroids = np.array([r.centroid for r in regions], dtype=np.float64)
        self.mean_colors = np.array([r.mean_color for r in regions], dtype=np.float64)
        self.pixel_counts = np.array([r.pixel_count for r in regions], dtype=np.int64)
        self.centroids.setflags(write=False)
        self.mean_colors.setflags(write=False)
        self.pixel_counts.setflags(write=False)

    @property
    def n_regions(self) -> int:
        return len(self.regions)

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def region_means(self, m: GrayMap) -> np.ndarray:
        """Mean of a gray map over each region, as a (n_regions,) array."""
        if m.shape != self.labels.shape:
            raise ValueError(f"shape mismatch: {m.shape} vs {self.labels.shape}")
        sums = np.bincount(
            self.labels.ravel(), weights=m.data.ravel(), minlength=self.n_regions
        )
        return sums / self.pixel_counts

    def paint(self, values: np.ndarray) -> GrayMap:
        """Broadcast one value per region back onto the raster."""
        vals = np.asarray(values, dtype=np.float64)
        if vals.shape != (self.n_regions,):
            raise ValueError(f"expected {self.n_regions} region values, got {vals.shape}")
        return GrayMap(vals[self.labels])


# sRGB (D65) to XYZ, rows scaled so Y of the white point is 1.
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ],
    dtype=np.float64,
)
_WHITE_D65 = np.array([0.95047, 1.0, 1.08883], dtype=np.float64)


def rgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """Convert an (H, W, 3) sRGB array in [0, 255] to CIELAB (D65)."""
    c = np.asarray(rgb, dtype=np.float64) / 255.0
    linear = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _RGB_TO_XYZ.T
    t = xyz / _WHITE_D65
    delta = 6.0 / 29.0
    f = np.where(t > delta**3, np.cbrt(t), t / (3.0 * delta**2) + 4.0 / 29.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


@nb.njit(cache=True)
def _assign_pixels(lab, center_lab, center_xy, ratio, rad, labels, dist):
    # Clusters are scanned in ascending id order and a pixel is reassigned
    # only on a strictly smaller distance, so ties go to the lowest id.
    h, w = lab.shape[:2]
    k = center_lab.shape[0]
    for y in range(h):
        for x in range(w):
            labels[y, x] = -1
            dist[y, x] = np.inf
    for c in range(k):
        cx = center_xy[c, 0]
        cy = center_xy[c, 1]
        xi = int(round(cx))
        yi = int(round(cy))
        y0 = max(0, yi - rad)
        y1 = min(h, yi + rad + 1)
        x0 = max(0, xi - rad)
        x1 = min(w, xi + rad + 1)
        cl = center_lab[c, 0]
        ca = center_lab[c, 1]
        cb = center_lab[c, 2]
        for y in range(y0, y1):
            for x in range(x0, x1):
                dl = lab[y, x, 0] - cl
                da = lab[y, x, 1] - ca
                db = lab[y, x, 2] - cb
                d_lab = math.sqrt(dl * dl + da * da + db * db)
                dx = x - cx
                dy = y - cy
                d = d_lab + ratio * math.sqrt(dx * dx + dy * dy)
                if d < dist[y, x]:
                    dist[y, x] = d
                    labels[y, x] = c


@nb.njit(cache=True)
def _claim_unreached(center_xy, labels):
    # Safety net: a pixel outside every search window goes to the nearest
    # centre by pixel distance, lowest id winning ties.
    h, w = labels.shape
    k = center_xy.shape[0]
    for y in range(h):
        for x in range(w):
            if labels[y, x] >= 0:
                continue
            best = np.inf
            bi = 0
            for c in range(k):
                dx = x - center_xy[c, 0]
                dy = y - center_xy[c, 1]
                d = dx * dx + dy * dy
                if d < best:
                    best = d
                    bi = c
            labels[y, x] = bi


@nb.njit(cache=True)
def _label_components(labels):
    # 4-connected flood fill; component ids follow the raster order of each
    # component's first pixel.
    h, w = labels.shape
    comp = np.full((h, w), -1, dtype=np.int32)
    stack = np.empty(h * w, dtype=np.int64)
    nc = 0
    for sy in range(h):
        for sx in range(w):
            if comp[sy, sx] >= 0:
                continue
            lab = labels[sy, sx]
            comp[sy, sx] = nc
            stack[0] = sy * w + sx
            top = 1
            while top > 0:
                top -= 1
                p = stack[top]
                y = p // w
                x = p % w
                if x > 0 and comp[y, x - 1] < 0 and labels[y, x - 1] == lab:
                    comp[y, x - 1] = nc
                    stack[top] = p - 1
                    top += 1
                if x + 1 < w and comp[y, x + 1] < 0 and labels[y, x + 1] == lab:
                    comp[y, x + 1] = nc
                    stack[top] = p + 1
                    top += 1
                if y > 0 and comp[y - 1, x] < 0 and labels[y - 1, x] == lab:
                    comp[y - 1, x] = nc
                    stack[top] = p - w
                    top += 1
                if y + 1 < h and comp[y + 1, x] < 0 and labels[y + 1, x] == lab:
                    comp[y + 1, x] = nc
                    stack[top] = p + w
                    top += 1
            nc += 1
    return comp, nc


def _grid_centers(grad: np.ndarray, h: int, w: int, k: int) -> np.ndarray:
    """Integer (x, y) seed positions: a regular grid nudged off edges.

    Each seed moves to the strictly lowest-gradient pixel of its 3x3
    neighbourhood, keeping the grid point itself on ties and preferring
    the earliest row-major candidate among strictly lower ones.
    """
    step = math.sqrt(h * w / k)
    nx = max(1, round(w / step))
    ny = max(1, round(h / step))
    xs = np.minimum(np.round((np.arange(nx) + 0.5) * w / nx - 0.5), w - 1).astype(np.int64)
    ys = np.minimum(np.round((np.arange(ny) + 0.5) * h / ny - 0.5), h - 1).astype(np.int64)
    xs = np.maximum(xs, 0)
    ys = np.maximum(ys, 0)
    seeds = []
    for gy in ys:
        for gx in xs:
            bx, by = int(gx), int(gy)
            bg = grad[by, bx]
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    y, x = int(gy) + dy, int(gx) + dx
                    if 0 <= y < h and 0 <= x < w and grad[y, x] < bg:
                        bg = grad[y, x]
                        bx, by = x, y
            seeds.append((bx, by))
    return np.array(seeds, dtype=np.float64)


@nb.njit(cache=True)
def _absorb_orphans(kept, sizes, indptr, indices):
    # Orphans are scanned in ascending id order, repeatedly, each merging
    # into the adjacent surviving region with the most pixels at that
    # moment (ties to the lowest root id); the best-neighbour choice only
    # compares roots, so adjacency order is irrelevant.
    nc = kept.shape[0]
    parent = np.arange(nc, dtype=np.int64)
    changed = True
    while changed:
        changed = False
        for c in range(nc):
            if kept[c] or parent[c] != c:
                continue
            best = -1
            for ii in range(indptr[c], indptr[c + 1]):
                r = indices[ii]
                while parent[r] != r:
                    parent[r] = parent[parent[r]]
                    r = parent[r]
                if r == c or not kept[r]:
                    continue
                if best < 0 or sizes[r] > sizes[best] or (sizes[r] == sizes[best] and r < best):
                    best = r
            if best >= 0:
                parent[c] = best
                sizes[best] += sizes[c]
                changed = True
    roots = np.empty(nc, dtype=np.int64)
    for c in range(nc):
        r = c
        while parent[r] != r:
            parent[r] = parent[parent[r]]
            r = parent[r]
        roots[c] = r
    return roots


def _merge_orphans(comp: np.ndarray, nc: int, labels: np.ndarray) -> np.ndarray:
    """Absorb non-largest components into adjacent survivors.

    For each label the largest component (ties to the lowest component id)
    survives; every other component is an orphan handed to
    :func:`_absorb_orphans` along with the component adjacency in CSR
    form. Returns the per-pixel surviving component id.
    """
    flat_comp = comp.ravel()
    sizes = np.bincount(flat_comp, minlength=nc).astype(np.int64)
    first_idx = np.full(nc, -1, dtype=np.int64)
    uniq, first = np.unique(flat_comp, return_index=True)
    first_idx[uniq] = first
    comp_label = labels.ravel()[first_idx]

    kept = np.zeros(nc, dtype=bool)
    order = np.lexsort((np.arange(nc), -sizes, comp_label))
    lab_sorted = comp_label[order]
    group_start = np.flatnonzero(np.r_[True, lab_sorted[1:] != lab_sorted[:-1]])
    kept[order[group_start]] = True

    a = np.concatenate(
        [comp[:, :-1].ravel(), comp[:, 1:].ravel(), comp[:-1, :].ravel(), comp[1:, :].ravel()]
    ).astype(np.int64)
    b = np.concatenate(
        [comp[:, 1:].ravel(), comp[:, :-1].ravel(), comp[1:, :].ravel(), comp[:-1, :].ravel()]
    ).astype(np.int64)
    cross = a != b
    a = a[cross]
    b = b[cross]
    indices = b[np.argsort(a, kind="stable")]
    indptr = np.zeros(nc + 1, dtype=np.int64)
    np.cumsum(np.bincount(a, minlength=nc), out=indptr[1:])

    roots = _absorb_orphans(kept, sizes, indptr, indices)
    return roots[comp]


def slic(
    image: RgbMap,
    k: int,
    compactness: float = 10.0,
    iterations: int = 10,
    seed: int = 0,
) -> Segmentation:
    """Segment an RGB raster into roughly ``k`` superpixels.

    Args:
        image: input raster; must be at least 3x3 for the seeding gradient.
        k: requested cluster count, between 1 and the pixel count.
        compactness: weight of the spatial term in the additive distance.
        iterations: fixed number of assign/update rounds (no early exit).
        seed: recorded for interface stability only; the procedure has no
            random component, so the value does not influence the result.

    Returns:
        A :class:`Segmentation` whose region count may differ from ``k``
        after connectivity enforcement.
    """
    h, w = image.shape
    n = h * w
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if compactness <= 0.0:
        raise ValueError(f"compactness must be > 0, got {compactness}")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    del seed

    lab = np.ascontiguousarray(rgb_to_lab(image.data))
    grad = sobel_gradient(luminance(image)).data
    step = math.sqrt(n / k)
    rad = max(1, int(round(step)))
    ratio = compactness / step

    center_xy = _grid_centers(grad, h, w, k)
    k0 = center_xy.shape[0]
    cx = center_xy[:, 0].astype(np.int64)
    cy = center_xy[:, 1].astype(np.int64)
    center_lab = np.ascontiguousarray(lab[cy, cx])

    labels = np.empty((h, w), dtype=np.int32)
    dist = np.empty((h, w), dtype=np.float64)
    xs = np.tile(np.arange(w, dtype=np.float64), h)
    ys = np.repeat(np.arange(h, dtype=np.float64), w)

    for _ in range(iterations):
        _assign_pixels(lab, center_lab, center_xy, ratio, rad, labels, dist)
        _claim_unreached(center_xy, labels)
        flat = labels.ravel()
        counts = np.bincount(flat, minlength=k0)
        nonzero = counts > 0
        safe = np.maximum(counts, 1)
        new_xy = np.stack(
            [
                np.bincount(flat, weights=xs, minlength=k0) / safe,
                np.bincount(flat, weights=ys, minlength=k0) / safe,
            ],
            axis=1,
        )
        new_lab = np.stack(
            [
                np.bincount(flat, weights=lab[..., ch].ravel(), minlength=k0) / safe
                for ch in range(3)
            ],
            axis=1,
        )
        center_xy = np.where(nonzero[:, None], new_xy, center_xy)
        center_lab = np.ascontiguousarray(
            np.where(nonzero[:, None], new_lab, center_lab)
        )

    comp, nc = _label_components(labels)
    surviving = _merge_orphans(comp, nc, labels)
    uniq = np.unique(surviving)
    final = np.searchsorted(uniq, surviving).astype(np.int32)

    r = uniq.shape[0]
    flat = final.ravel()
    counts = np.bincount(flat, minlength=r)
    cxs = np.bincount(flat, weights=xs, minlength=r) / counts
    cys = np.bincount(flat, weights=ys, minlength=r) / counts
    chans = [
        np.bincount(flat, weights=image.data[..., ch].ravel(), minlength=r) / counts
        for ch in range(3)
    ]
    regions = tuple(
        Region(
            id=i,
            centroid=(float(cxs[i]), float(cys[i])),
            mean_color=(float(chans[0][i]), float(chans[1][i]), float(chans[2][i])),
            pixel_count=int(counts[i]),
        )
        for i in range(r)
    )
    return Segmentation(final, regions)


def save_segmentation_debug(seg: Segmentation, out_dir: str | os.PathLike, stem: str) -> None:
    """Write the label raster and region table for inspection.

    Produces ``<stem>_labels.png`` (16-bit grayscale region ids) and
    ``<stem>_regions.csv`` with columns id, cx, cy, r, g, b, count.
    """
    os.makedirs(out_dir, exist_ok=True)
    pngio.write_labels(os.path.join(out_dir, f"{stem}_labels.png"), seg.labels)
    with open(os.path.join(out_dir, f"{stem}_regions.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "cx", "cy", "r", "g", "b", "count"])
        for reg in seg.regions:
            writer.writerow(
                [
                    reg.id,
                    f"{reg.centroid[0]:.6f}",
                    f"{reg.centroid[1]:.6f}",
                    f"{reg.mean_color[0]:.6f}",
                    f"{reg.mean_color[1]:.6f}",
                    f"{reg.mean_color[2]:.6f}",
                    reg.pixel_count,
                ]
            )
