"""Dataset ingestion, batch orchestration, and report emission.

Datasets are directory trees joined on file stems: ``RGB/`` and ``depth/``
are mandatory, ``GT/``, ``contour/``, ``sal_rgb/``, ``sal_d/``,
``sal_rgbd/`` and ``sal_rgbr/`` optional. Images are processed
independently (optionally in a process pool); every per-image artifact is
written to its own path and aggregation runs over stem-sorted rows, so
results do not depend on the parallelism degree. Nothing emitted here
contains a timestamp: re-running with the same inputs, config and seeds
reproduces every output byte.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from . import pngio
from .config import PipelineConfig
from .edge_consistency import (
    EcResult,
    aggressive_anchors,
    default_contour,
    edge_consistency_map,
    mutual_consistency,
)
from .errors import ConfigError, DatasetError
from .fusion import QualityBundle, quality_weighted_fuse
from .metrics import ImageEval, MetricReport, evaluate_pair
from .model_variance import model_variance
from .raster import GrayMap, RgbMap, sobel_gradient
from .regional_uncertainty import RuResult, regional_uncertainty_map

__all__ = [
    "ImageRecord",
    "DatasetIndex",
    "QualityMaps",
    "RunSummary",
    "load_dataset",
    "compute_quality",
    "write_quality",
    "run_pipeline",
    "evaluate_directory",
    "emit_report",
    "write_pr_csv",
]

logger = logging.getLogger("depthq")

_IMAGE_EXTS = (".png", ".jpg", ".jpeg", ".bmp")
_OPTIONAL_DIRS = ("GT", "contour", "sal_rgb", "sal_d", "sal_rgbd", "sal_rgbr")
_CSV_FIELDS = ("stem", "sm", "adp_e", "max_e", "adp_f", "mean_f", "max_f", "mae")


@dataclass(frozen=True)
class ImageRecord:
    """Paths of one dataset image; only rgb and depth are guaranteed."""

    stem: str
    rgb: str
    depth: str
    gt: str | None = None
    contour: str | None = None
    sal_rgb: str | None = None
    sal_d: str | None = None
    sal_rgbd: str | None = None
    sal_rgbr: str | None = None


@dataclass(frozen=True)
class DatasetIndex:
    """Stem-joined dataset records, sorted by stem."""

    root: str
    records: tuple[ImageRecord, ...]

    def __len__(self) -> int:
        return len(self.records)


def _scan_dir(path: str) -> dict[str, str]:
    """Map stem -> file path for the images directly under ``path``.

    Duplicate stems (same name, different extension) keep the
    lexicographically first file and log the rest.
    """
    out: dict[str, str] = {}
    for name in sorted(os.listdir(path)):
        full = os.path.join(path, name)
        if not os.path.isfile(full):
            continue
        stem, ext = os.path.splitext(name)
        if ext.lower() not in _IMAGE_EXTS:
            continue
        if stem in out:
            logger.warning("duplicate stem %r under %s: ignoring %s", stem, path, name)
            continue
        out[stem] = full
    return out


def load_dataset(root: str | os.PathLike) -> DatasetIndex:
    """Index a dataset directory tree, joining files on their stems.

    RGB/ and depth/ must exist and share at least one stem; files present
    on only one side are logged and skipped. Optional per-stem inputs are
    attached when their directories exist.
    """
    root = os.fspath(root)
    if not os.path.isdir(root):
        raise DatasetError(f"dataset root not found: {root}")
    rgb_dir = os.path.join(root, "RGB")
    depth_dir = os.path.join(root, "depth")
    for d in (rgb_dir, depth_dir):
        if not os.path.isdir(d):
            raise DatasetError(f"required dataset subdirectory missing: {d}")
    rgb = _scan_dir(rgb_dir)
    depth = _scan_dir(depth_dir)
    optional = {}
    for name in _OPTIONAL_DIRS:
        d = os.path.join(root, name)
        optional[name] = _scan_dir(d) if os.path.isdir(d) else {}

    stems = sorted(set(rgb) & set(depth))
    for stem in sorted(set(rgb) - set(depth)):
        logger.warning("stem %r has RGB but no depth; skipped", stem)
    for stem in sorted(set(depth) - set(rgb)):
        logger.warning("stem %r has depth but no RGB; skipped", stem)
    if not stems:
        raise DatasetError(f"no stems matched across RGB/ and depth/ under {root}")

    records = tuple(
        ImageRecord(
            stem=stem,
            rgb=rgb[stem],
            depth=depth[stem],
            gt=optional["GT"].get(stem),
            contour=optional["contour"].get(stem),
            sal_rgb=optional["sal_rgb"].get(stem),
            sal_d=optional["sal_d"].get(stem),
            sal_rgbd=optional["sal_rgbd"].get(stem),
            sal_rgbr=optional["sal_rgbr"].get(stem),
        )
        for stem in stems
    )
    return DatasetIndex(root=root, records=records)


@dataclass(frozen=True)
class QualityMaps:
    """The per-image quality maps actually computed for one record."""

    ec: EcResult | None = None
    ru: RuResult | None = None
    mv: GrayMap | None = None

    def bundle(self) -> QualityBundle:
        flags = set()
        if self.ec is not None and self.ec.low_confidence:
            flags.add("ec")
        if self.ru is not None and self.ru.low_confidence:
            flags.add("ru")
        return QualityBundle(
            ec=self.ec.map if self.ec is not None else None,
            ru=self.ru.map if self.ru is not None else None,
            mv=self.mv,
            low_confidence=frozenset(flags),
        )


def compute_quality(
    rgb: RgbMap,
    depth: GrayMap,
    contour: GrayMap | None,
    cfg: PipelineConfig,
    want: frozenset[str],
    sal_rgbd: GrayMap | None = None,
    sal_rgbr: GrayMap | None = None,
) -> QualityMaps:
    """Compute the requested quality maps for one aligned image.

    A missing contour falls back to the RGB-luminance gradient. The
    regional-uncertainty stage reuses the anchor pixels of the
    edge-consistency stage (deriving them directly when EC itself is not
    requested). MV requires both externally produced saliency maps.
    """
    contour = contour if contour is not None else default_contour(rgb)
    ec_res = ru_res = mv_map = None
    apa = None
    if "ec" in want:
        ec_res = edge_consistency_map(rgb, depth, contour, cfg.ec, slic_seed=cfg.slic_seed)
        apa = ec_res.apa
    elif "ru" in want:
        fg = mutual_consistency(sobel_gradient(depth), contour)
        apa = aggressive_anchors(fg, cfg.ec)
    if "ru" in want:
        ru_res = regional_uncertainty_map(rgb, depth, apa, cfg.ru, slic_seed=cfg.slic_seed)
    if "mv" in want:
        if sal_rgbd is None or sal_rgbr is None:
            raise DatasetError("mv requested but sal_rgbd/sal_rgbr inputs are missing")
        mv_map = model_variance(sal_rgbd, sal_rgbr)
    return QualityMaps(ec=ec_res, ru=ru_res, mv=mv_map)


def _write_json(path: str, obj: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_quality(q: QualityMaps, out_dir: str, stem: str, cfg: PipelineConfig) -> None:
    """Write each computed map as PNG plus its JSON metadata sidecar."""
    if q.ec is not None:
        pngio.write_gray(os.path.join(out_dir, f"EC_{stem}.png"), q.ec.map)
        _write_json(
            os.path.join(out_dir, f"EC_{stem}.json"),
            {
                "tc": q.ec.tc,
                "ta": q.ec.ta,
                "apc_count": len(q.ec.apc),
                "apa_count": len(q.ec.apa),
                "low_confidence": q.ec.low_confidence,
                "slic_seed": cfg.slic_seed,
            },
        )
    if q.ru is not None:
        pngio.write_gray(os.path.join(out_dir, f"RU_{stem}.png"), q.ru.map)
        _write_json(
            os.path.join(out_dir, f"RU_{stem}.json"),
            {
                "pn": q.ru.pn,
                "low_confidence": q.ru.low_confidence,
                "slic_seed": cfg.slic_seed,
            },
        )
    if q.mv is not None:
        pngio.write_gray(os.path.join(out_dir, f"MV_{stem}.png"), q.mv)
        _write_json(
            os.path.join(out_dir, f"MV_{stem}.json"),
            {"noise_seed": cfg.noise_seed, "low_confidence": False},
        )


def _process_record(payload: tuple[ImageRecord, PipelineConfig]) -> dict:
    """Full per-image pipeline: quality maps, fusion, optional evaluation.

    Runs in a worker process; returns a picklable result dict and never
    raises (failures come back in the ``error`` field so one bad image
    cannot take down the batch).
    """
    rec, cfg = payload
    out_dir = cfg.out_dir
    try:
        rgb = pngio.read_rgb(rec.rgb)
        depth = pngio.read_gray(rec.depth)
        contour = pngio.read_gray(rec.contour) if rec.contour else None
        sal_rgbd = pngio.read_gray(rec.sal_rgbd) if rec.sal_rgbd else None
        sal_rgbr = pngio.read_gray(rec.sal_rgbr) if rec.sal_rgbr else None
        q = compute_quality(
            rgb, depth, contour, cfg, cfg.components, sal_rgbd=sal_rgbd, sal_rgbr=sal_rgbr
        )
        write_quality(q, out_dir, rec.stem, cfg)

        if rec.sal_rgb is None or rec.sal_d is None:
            raise DatasetError("fusion needs sal_rgb and sal_d inputs")
        rgb_sal = pngio.read_gray(rec.sal_rgb)
        d_sal = pngio.read_gray(rec.sal_d)
        fused = quality_weighted_fuse(rgb_sal, d_sal, q.bundle())
        pngio.write_gray(os.path.join(out_dir, f"fused_{rec.stem}.png"), fused)

        if rec.gt is None:
            logger.info("stem %r has no ground truth; skipping evaluation", rec.stem)
            return {"stem": rec.stem, "error": None, "eval": None, "curve": None}
        gt = pngio.read_gray(rec.gt)
        ev, curve = evaluate_pair(rec.stem, fused, gt)
        if curve is None:
            logger.info(
                "stem %r: ground truth has no foreground; excluded from F aggregates",
                rec.stem,
            )
            return {"stem": rec.stem, "error": None, "eval": ev, "curve": None}
        packed = np.stack([curve.precision, curve.recall, curve.f])
        return {"stem": rec.stem, "error": None, "eval": ev, "curve": packed}
    except Exception as exc:  # noqa: BLE001 - quarantine any per-image failure
        logger.error("stem %r failed: %s", rec.stem, exc)
        return {"stem": rec.stem, "error": f"{type(exc).__name__}: {exc}", "eval": None,
                "curve": None}


@dataclass(frozen=True)
class RunSummary:
    """Outcome of a batch run: the metric report plus quarantined stems."""

    report: MetricReport
    failures: tuple[tuple[str, str], ...]
    aggregate_curve: np.ndarray | None


def run_pipeline(index: DatasetIndex, cfg: PipelineConfig) -> RunSummary:
    """Process every record of ``index`` under ``cfg`` and aggregate.

    Writes per-image maps and sidecars into cfg.out_dir, then report.json,
    report.csv and the PR/F figures. Failed images are quarantined and
    reported, not fatal. The output bytes are independent of cfg.jobs.
    """
    if cfg.out_dir is None:
        raise ConfigError("run_pipeline needs cfg.out_dir")
    if len(index) == 0:
        raise DatasetError("dataset index is empty")
    os.makedirs(cfg.out_dir, exist_ok=True)

    payloads = [(rec, cfg) for rec in index.records]
    if cfg.jobs == 1:
        results = [_process_record(p) for p in payloads]
    else:
        with get_context("fork").Pool(processes=cfg.jobs) as pool:
            results = pool.map(_process_record, payloads)

    failures = tuple((r["stem"], r["error"]) for r in results if r["error"] is not None)
    evals = [r["eval"] for r in results if r["eval"] is not None]
    curves = [r["curve"] for r in results if r["curve"] is not None]

    report = MetricReport(dataset=os.path.basename(os.path.normpath(index.root)), per_image=evals)
    emit_report(report, "json", os.path.join(cfg.out_dir, "report.json"))
    emit_report(report, "csv", os.path.join(cfg.out_dir, "report.csv"))

    aggregate_curve = None
    if curves:
        # Results arrive in stem-sorted payload order, so this mean is a
        # fixed-order reduction regardless of worker scheduling.
        aggregate_curve = np.mean(np.stack(curves), axis=0)
        from .figures import render_report_figures

        render_report_figures(
            cfg.out_dir,
            report.dataset,
            precision=aggregate_curve[0],
            recall=aggregate_curve[1],
            f=aggregate_curve[2],
        )
    return RunSummary(report=report, failures=failures, aggregate_curve=aggregate_curve)


def write_pr_csv(path: str, precision: np.ndarray, recall: np.ndarray, f: np.ndarray) -> None:
    """Write one threshold-indexed PR table: header plus 256 rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "precision", "recall", "f"])
        for t in range(256):
            writer.writerow([t, f"{precision[t]:.6f}", f"{recall[t]:.6f}", f"{f[t]:.6f}"])


def evaluate_directory(
    pred_dir: str,
    gt_dir: str,
    dataset: str | None = None,
    pr_csv_dir: str | None = None,
) -> tuple[RunSummary, int]:
    """Evaluate every stem present in both directories.

    Returns the summary plus the matched-stem count. Unreadable images are
    quarantined; stems lacking a counterpart are logged and skipped; a
    foreground-free ground truth keeps its row but is excluded from the F
    aggregates and gets no PR table.
    """
    for d in (pred_dir, gt_dir):
        if not os.path.isdir(d):
            raise DatasetError(f"directory not found: {d}")
    preds = _scan_dir(pred_dir)
    gts = _scan_dir(gt_dir)
    stems = sorted(set(preds) & set(gts))
    for stem in sorted(set(preds) - set(gts)):
        logger.warning("prediction %r has no ground truth; skipped", stem)
    for stem in sorted(set(gts) - set(preds)):
        logger.warning("ground truth %r has no prediction; skipped", stem)
    if not stems:
        raise DatasetError(f"no stems matched across {pred_dir} and {gt_dir}")
    if pr_csv_dir is not None:
        os.makedirs(pr_csv_dir, exist_ok=True)

    evals: list[ImageEval] = []
    curves = []
    failures = []
    for stem in stems:
        try:
            sal = pngio.read_gray(preds[stem])
            gt = pngio.read_gray(gts[stem])
            ev, curve = evaluate_pair(stem, sal, gt)
        except Exception as exc:  # noqa: BLE001 - quarantine and continue
            logger.error("stem %r failed: %s", stem, exc)
            failures.append((stem, f"{type(exc).__name__}: {exc}"))
            continue
        evals.append(ev)
        if curve is None:
            logger.info(
                "stem %r: ground truth has no foreground; excluded from F aggregates", stem
            )
            continue
        curves.append(np.stack([curve.precision, curve.recall, curve.f]))
        if pr_csv_dir is not None:
            write_pr_csv(
                os.path.join(pr_csv_dir, f"{stem}.csv"),
                curve.precision,
                curve.recall,
                curve.f,
            )

    report = MetricReport(
        dataset=dataset or os.path.basename(os.path.normpath(pred_dir)), per_image=evals
    )
    aggregate_curve = np.mean(np.stack(curves), axis=0) if curves else None
    summary = RunSummary(
        report=report, failures=tuple(failures), aggregate_curve=aggregate_curve
    )
    return summary, len(stems)


def _fmt_cell(v: float | None) -> str:
    return "" if v is None else f"{v:.6f}"


def emit_report(report: MetricReport, fmt: str, out: str | os.PathLike) -> None:
    """Write a metric report as JSON or CSV (per-image rows + AGGREGATE)."""
    if fmt == "json":
        _write_json(os.fspath(out), report.to_json_dict())
        return
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    agg = report.aggregate
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_FIELDS)
        for row in report.per_image:
            d = row.as_dict()
            writer.writerow([d["stem"]] + [_fmt_cell(d[k]) for k in _CSV_FIELDS[1:]])
        writer.writerow(["AGGREGATE"] + [_fmt_cell(agg[k]) for k in _CSV_FIELDS[1:]])
