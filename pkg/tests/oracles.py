"""Independent reference implementations used to cross-check the package.

Everything here is written the slow, obvious way: explicit loops, dense
per-threshold sweeps, direct formula evaluation. Nothing imports depthq,
so a bug in the package cannot hide inside its own oracle. Shared
conventions (round-half-up quantisation, gt >= 0.5 foreground, zero on
zero denominators, the adaptive threshold, the structure-measure
constants) are restated here literally.
"""

import math
from collections import deque

import numpy as np

EPS = 1e-20

SOBEL_X = ((-1.0, 0.0, 1.0), (-2.0, 0.0, 2.0), (-1.0, 0.0, 1.0))
SOBEL_Y = ((-1.0, -2.0, -1.0), (0.0, 0.0, 0.0), (1.0, 2.0, 1.0))


def sobel_oracle(arr):
    """Per-pixel 3x3 Sobel magnitude with replicate borders, scaled by max."""
    h, w = arr.shape
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            gx = 0.0
            gy = 0.0
            for dy in range(3):
                for dx in range(3):
                    yy = min(max(y + dy - 1, 0), h - 1)
                    xx = min(max(x + dx - 1, 0), w - 1)
                    cx = SOBEL_X[dy][dx]
                    cy = SOBEL_Y[dy][dx]
                    if cx != 0.0:
                        gx += cx * arr[yy, xx]
                    if cy != 0.0:
                        gy += cy * arr[yy, xx]
            out[y, x] = math.sqrt(gx * gx + gy * gy)
    peak = out.max()
    return out / peak if peak > 0 else out


def sobel_oracle_exact(arr):
    """Sobel magnitude evaluated in the same operation order as the package.

    The package takes the cross-kernel pairwise differences first and then
    applies the (1, 2, 1) weighting; floating-point addition is order
    sensitive, so the bit-exact oracle must replay that order per pixel.
    """
    h, w = arr.shape
    p = np.pad(arr, 1, mode="edge")
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            gx = 0.0
            gy = 0.0
            for i in (0, 1, 2):
                wt = 2.0 if i == 1 else 1.0
                gx += wt * (p[y + i, x + 2] - p[y + i, x])
                gy += wt * (p[y + 2, x + i] - p[y, x + i])
            out[y, x] = math.sqrt(gx * gx + gy * gy)
    peak = out.max()
    return out / peak if peak > 0 else out


def gaussian_kernel_1d(side, sigma):
    half = side // 2
    t = np.arange(-half, half + 1, dtype=np.float64)
    w = np.exp(-0.5 * (t / sigma) ** 2)
    return w / w.sum()


def gaussian_oracle(arr, side, sigma):
    """Dense 2-D Gaussian convolution with replicate borders."""
    h, w = arr.shape
    k1 = gaussian_kernel_1d(side, sigma)
    k2 = np.outer(k1, k1)
    half = side // 2
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(side):
                for dx in range(side):
                    yy = min(max(y + dy - half, 0), h - 1)
                    xx = min(max(x + dx - half, 0), w - 1)
                    acc += k2[dy, dx] * arr[yy, xx]
            out[y, x] = acc
    return out


def entropy_oracle(arr, radius, bins):
    """Per-pixel windowed-histogram Shannon entropy (base 2).

    Values are binned as min(floor(v * bins), bins - 1); the window is the
    (2*radius+1)^2 square under replicate padding.
    """
    h, w = arr.shape
    padded = np.pad(arr, radius, mode="edge")
    idx = np.minimum(np.floor(padded * bins).astype(int), bins - 1)
    win = 2 * radius + 1
    area = float(win * win)
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            window = idx[y : y + win, x : x + win]
            counts = np.bincount(window.ravel(), minlength=bins)
            ent = 0.0
            for b in range(bins):
                if counts[b] > 0:
                    p = counts[b] / area
                    ent -= p * math.log2(p)
            out[y, x] = ent
    return out


def quantize_oracle(arr):
    """Round-half-up quantisation of a unit-range array to 0..255."""
    return np.clip(np.floor(arr * 255.0 + 0.5), 0, 255).astype(np.int64)


def adaptive_threshold_oracle(salq):
    return min(2.0 * float(salq.mean()), 255.0)


def f_formula(p, r, beta2=0.3):
    den = beta2 * p + r
    if den == 0.0:
        return 0.0
    return (beta2 + 1.0) * p * r / den


def pr_oracle(sal, gt):
    """Per-threshold masking sweep: (precision, recall, f) arrays of 256."""
    salq = quantize_oracle(sal)
    fg = gt >= 0.5
    npos = int(fg.sum())
    assert npos > 0, "oracle caller must filter degenerate ground truth"
    precision = np.zeros(256)
    recall = np.zeros(256)
    f = np.zeros(256)
    for t in range(256):
        fm = salq >= t
        tp = float((fm & fg).sum())
        pred = float(fm.sum())
        p = tp / pred if pred > 0 else 0.0
        r = tp / npos
        precision[t] = p
        recall[t] = r
        f[t] = f_formula(p, r)
    return precision, recall, f


def f_stats_oracle(sal, gt):
    """(adp_f, mean_f, max_f): adaptive row by ceil, mean over rows 1..255."""
    _, _, f = pr_oracle(sal, gt)
    row = math.ceil(adaptive_threshold_oracle(quantize_oracle(sal)))
    return float(f[row]), float(f[1:].mean()), float(f.max())


def e_scores_oracle(sal, gt):
    """Dense per-threshold enhanced-alignment scores (256 entries).

    Both maps are mean-centred; the per-pixel alignment
    2*a*b / (a^2 + b^2) (0/0 -> 0) is enhanced through ((1+xi)^2)/4 and
    averaged. A foreground-free ground truth scores 1 - mean(FM) and an
    all-foreground one scores mean(FM).
    """
    salq = quantize_oracle(sal)
    fg = (gt >= 0.5).astype(np.float64)
    n = fg.size
    npos = fg.sum()
    scores = np.zeros(256)
    for t in range(256):
        fm = (salq >= t).astype(np.float64)
        if npos == 0:
            scores[t] = 1.0 - fm.mean()
            continue
        if npos == n:
            scores[t] = fm.mean()
            continue
        phi_g = fg - fg.mean()
        phi_f = fm - fm.mean()
        den = phi_g * phi_g + phi_f * phi_f
        xi = np.zeros_like(den)
        nz = den != 0
        xi[nz] = 2.0 * phi_g[nz] * phi_f[nz] / den[nz]
        scores[t] = ((1.0 + xi) ** 2 / 4.0).mean()
    return scores


def e_oracle(sal, gt):
    """(adp_e, max_e) from the dense per-threshold scores."""
    scores = e_scores_oracle(sal, gt)
    row = math.ceil(adaptive_threshold_oracle(quantize_oracle(sal)))
    return float(scores[row]), float(scores.max())


def _s_ssim_oracle(x, y):
    n = x.size
    if n == 0:
        return 0.0
    mx = x.mean()
    my = y.mean()
    vx = ((x - mx) ** 2).sum() / (n - 1 + EPS)
    vy = ((y - my) ** 2).sum() / (n - 1 + EPS)
    vxy = ((x - mx) * (y - my)).sum() / (n - 1 + EPS)
    a = 4.0 * mx * my * vxy
    b = (mx * mx + my * my) * (vx + vy)
    if a != 0.0:
        return a / (b + EPS)
    if b == 0.0:
        return 1.0
    return 0.0


def s_oracle(sal, gt, alpha=0.5):
    """Loop-based structure measure reference.

    Object term: foreground/background mean-dispersion similarity weighted
    by the foreground ratio. Region term: SSIM over the four blocks cut at
    the 1-based round-half-up ground-truth centroid, weighted by block
    area. Degenerate rules: no foreground -> 1 - mean(sal); all foreground
    -> mean(sal). Clamped to [0, 1].
    """
    fg = gt >= 0.5
    h, w = fg.shape
    mu = fg.mean()
    if mu == 0.0:
        return 1.0 - float(sal.mean())
    if mu == 1.0:
        return float(sal.mean())

    def side_score(vals):
        m = vals.mean()
        s = vals.std()
        return 2.0 * m / (m * m + 1.0 + s + EPS)

    s_object = mu * side_score(sal[fg]) + (1.0 - mu) * side_score(1.0 - sal[~fg])

    total = fg.sum()
    col_w = 0.0
    row_w = 0.0
    for yy in range(h):
        for xx in range(w):
            if fg[yy, xx]:
                col_w += xx + 1
                row_w += yy + 1
    cx = int(math.floor(col_w / total + 0.5))
    cy = int(math.floor(row_w / total + 0.5))

    gtf = fg.astype(np.float64)
    area = float(h * w)
    blocks = (
        ((slice(0, cy), slice(0, cx)), cx * cy / area),
        ((slice(0, cy), slice(cx, w)), (w - cx) * cy / area),
        ((slice(cy, h), slice(0, cx)), cx * (h - cy) / area),
    )
    s_region = 0.0
    used = 0.0
    for (rows, cols), weight in blocks:
        s_region += weight * _s_ssim_oracle(sal[rows, cols], gtf[rows, cols])
        used += weight
    s_region += (1.0 - used) * _s_ssim_oracle(sal[cy:, cx:], gtf[cy:, cx:])

    s = alpha * s_object + (1.0 - alpha) * s_region
    return float(min(max(s, 0.0), 1.0))


def mae_oracle(sal, gt):
    total = 0.0
    h, w = sal.shape
    for y in range(h):
        for x in range(w):
            total += abs(sal[y, x] - gt[y, x])
    return total / (h * w)


def spatial_weight_oracle(values, centroids, colors, anchors, omega1):
    """Direct evaluation of the anchor-scoped colour-weighted average.

    For region i the scope holds every region whose centroid lies within
    the distance from centroid i to its nearest anchor; members are
    averaged with weights exp(-omega1 * colour distance).
    """
    n = len(values)
    out = np.zeros(n)
    for i in range(n):
        r = min(
            math.dist(centroids[i], (float(ax), float(ay))) for ax, ay in anchors
        )
        num = 0.0
        den = 0.0
        for j in range(n):
            if math.dist(centroids[i], centroids[j]) <= r:
                wgt = math.exp(-omega1 * math.dist(colors[i], colors[j]))
                num += wgt * values[j]
                den += wgt
        out[i] = num / den
    return out


def prior_oracle(centroids, anchors, omega2, diag):
    """Direct evaluation of exp(-omega2 * mean anchor distance / diag)."""
    out = np.zeros(len(centroids))
    for i, c in enumerate(centroids):
        mean_d = sum(
            math.dist(c, (float(ax), float(ay))) for ax, ay in anchors
        ) / len(anchors)
        out[i] = math.exp(-omega2 * mean_d / diag)
    return out


def mean_color_oracle(image, labels, region_id):
    """Arithmetic mean colour of one region, accumulated pixel by pixel."""
    h, w = labels.shape
    acc = [0.0, 0.0, 0.0]
    count = 0
    for y in range(h):
        for x in range(w):
            if labels[y, x] == region_id:
                for ch in range(3):
                    acc[ch] += image[y, x, ch]
                count += 1
    return tuple(a / count for a in acc), count


def mask_component_count(mask):
    """Number of 4-connected components of a boolean mask (BFS flood fill)."""
    h, w = mask.shape
    seen = np.zeros((h, w), dtype=bool)
    count = 0
    for sy in range(h):
        for sx in range(w):
            if not mask[sy, sx] or seen[sy, sx]:
                continue
            count += 1
            queue = deque([(sy, sx)])
            seen[sy, sx] = True
            while queue:
                y, x = queue.popleft()
                for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        queue.append((ny, nx))
    return count
