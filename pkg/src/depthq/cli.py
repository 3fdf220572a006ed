"""Command-line interface.

Subcommands: ``quality`` (per-image EC/RU/MV maps), ``make-rgbr`` (RGB plus
seeded noise channel as RGBA), ``fuse`` (quality-weighted blend of two
saliency maps), ``eval`` (score predictions against ground truth), and
``run`` (full dataset pipeline). Exit codes: 0 success, 1 finished with
per-image failures, 2 fatal.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import pngio
from .config import apply_overrides, parse_components_value, parse_config_file
from .errors import ConfigError, DepthQError
from .fusion import QualityBundle, quality_weighted_fuse
from .harness import (
    compute_quality,
    evaluate_directory,
    load_dataset,
    run_pipeline,
    write_quality,
)
from .model_variance import make_rgbr

logger = logging.getLogger("depthq")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="flat key=value config file")
    p.add_argument("--jobs", type=int, metavar="N", help="parallel worker count")
    p.add_argument("--slic-seed", type=int, metavar="N", help="superpixel seed to record")
    p.add_argument("--noise-seed", type=int, metavar="N", help="noise-channel seed")
    p.add_argument(
        "--components",
        metavar="LIST",
        help="comma-separated subset of ec,ru,mv (or 'none')",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depthq",
        description="Depth-quality maps, quality-guided fusion, and saliency metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quality", help="compute EC/RU/MV maps for one image")
    p.add_argument("--rgb", required=True, metavar="FILE")
    p.add_argument("--depth", required=True, metavar="FILE")
    p.add_argument("--contour", metavar="FILE", help="precomputed contour map")
    p.add_argument("--sal-rgbd", metavar="FILE", help="saliency of the real-depth input")
    p.add_argument("--sal-rgbr", metavar="FILE", help="saliency of the noise-channel input")
    p.add_argument("--out", required=True, metavar="DIR")
    _add_common(p)

    p = sub.add_parser("make-rgbr", help="attach a seeded noise channel to an RGB image")
    p.add_argument("--rgb", required=True, metavar="FILE")
    p.add_argument("--seed", type=int, metavar="N", help="noise seed (defaults to --noise-seed)")
    p.add_argument("--out", required=True, metavar="FILE")
    _add_common(p)

    p = sub.add_parser("fuse", help="fuse RGB and depth saliency under quality maps")
    p.add_argument("--sal-rgb", required=True, metavar="FILE")
    p.add_argument("--sal-d", required=True, metavar="FILE")
    p.add_argument("--ec", metavar="FILE")
    p.add_argument("--ru", metavar="FILE")
    p.add_argument("--mv", metavar="FILE")
    p.add_argument("--out", required=True, metavar="FILE")
    _add_common(p)

    p = sub.add_parser("eval", help="score a directory of predictions against ground truth")
    p.add_argument("--pred", required=True, metavar="DIR")
    p.add_argument("--gt", required=True, metavar="DIR")
    p.add_argument("--out", required=True, metavar="FILE", help="report JSON path")
    p.add_argument("--pr-csv", metavar="DIR", help="write per-image PR tables here")
    p.add_argument("--dataset", metavar="NAME", help="dataset id for the report")
    _add_common(p)

    p = sub.add_parser("run", help="full pipeline over a dataset tree")
    p.add_argument("--data", required=True, metavar="DIR", help="dataset root")
    p.add_argument("--out", required=True, metavar="DIR")
    _add_common(p)

    return parser


def _config_from_args(args: argparse.Namespace, out_dir: str | None = None):
    cfg = parse_config_file(getattr(args, "config", None))
    components = None
    if getattr(args, "components", None) is not None:
        components = parse_components_value(args.components)
    return apply_overrides(
        cfg,
        components=components,
        slic_seed=getattr(args, "slic_seed", None),
        noise_seed=getattr(args, "noise_seed", None),
        out_dir=out_dir,
        jobs=getattr(args, "jobs", None),
    )


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _cmd_quality(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args, out_dir=args.out)
    if "mv" in cfg.components and not (args.sal_rgbd and args.sal_rgbr):
        raise ConfigError("component mv needs --sal-rgbd and --sal-rgbr")
    rgb = pngio.read_rgb(args.rgb)
    depth = pngio.read_gray(args.depth)
    contour = pngio.read_gray(args.contour) if args.contour else None
    sal_rgbd = pngio.read_gray(args.sal_rgbd) if args.sal_rgbd else None
    sal_rgbr = pngio.read_gray(args.sal_rgbr) if args.sal_rgbr else None
    maps = compute_quality(
        rgb, depth, contour, cfg, cfg.components, sal_rgbd=sal_rgbd, sal_rgbr=sal_rgbr
    )
    os.makedirs(args.out, exist_ok=True)
    write_quality(maps, args.out, _stem(args.rgb), cfg)
    return 0


def _cmd_make_rgbr(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    seed = args.seed if args.seed is not None else cfg.noise_seed
    rgb = pngio.read_rgb(args.rgb)
    img = make_rgbr(rgb, seed)
    parent = os.path.dirname(args.out)
    if parent:
        os.makedirs(parent, exist_ok=True)
    pngio.write_rgba(args.out, img.rgb, img.noise)
    sidecar = os.path.splitext(args.out)[0] + ".json"
    with open(sidecar, "w", encoding="utf-8") as fh:
        json.dump({"noise_seed": seed}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_fuse(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    provided = {"ec": args.ec, "ru": args.ru, "mv": args.mv}
    missing = [c for c in sorted(cfg.components) if not provided[c]]
    if missing:
        raise ConfigError(f"components {missing} selected but no map file given")
    rgb_sal = pngio.read_gray(args.sal_rgb)
    d_sal = pngio.read_gray(args.sal_d)
    maps = {
        c: pngio.read_gray(provided[c]) for c in ("ec", "ru", "mv") if c in cfg.components
    }
    bundle = QualityBundle(ec=maps.get("ec"), ru=maps.get("ru"), mv=maps.get("mv"))
    fused = quality_weighted_fuse(rgb_sal, d_sal, bundle)
    parent = os.path.dirname(args.out)
    if parent:
        os.makedirs(parent, exist_ok=True)
    pngio.write_gray(args.out, fused)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    from .figures import render_report_figures
    from .harness import emit_report

    summary, matched = evaluate_directory(
        args.pred, args.gt, dataset=args.dataset, pr_csv_dir=args.pr_csv
    )
    parent = os.path.dirname(args.out)
    if parent:
        os.makedirs(parent, exist_ok=True)
    emit_report(summary.report, "json", args.out)
    emit_report(summary.report, "csv", os.path.splitext(args.out)[0] + ".csv")
    if summary.aggregate_curve is not None:
        render_report_figures(
            parent or ".",
            summary.report.dataset,
            precision=summary.aggregate_curve[0],
            recall=summary.aggregate_curve[1],
            f=summary.aggregate_curve[2],
        )
    logger.info(
        "evaluated %d/%d images; aggregate %s",
        summary.report.n_images,
        matched,
        json.dumps(summary.report.aggregate, sort_keys=True),
    )
    return 1 if summary.failures else 0


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args, out_dir=args.out)
    index = load_dataset(args.data)
    summary = run_pipeline(index, cfg)
    logger.info(
        "processed %d records (%d failures); aggregate %s",
        len(index),
        len(summary.failures),
        json.dumps(summary.report.aggregate, sort_keys=True),
    )
    for stem, err in summary.failures:
        logger.error("quarantined %r: %s", stem, err)
    return 1 if summary.failures else 0


_COMMANDS = {
    "quality": _cmd_quality,
    "make-rgbr": _cmd_make_rgbr,
    "fuse": _cmd_fuse,
    "eval": _cmd_eval,
    "run": _cmd_run,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DepthQError as exc:
        logger.error("%s", exc)
        return 2
    except OSError as exc:
        logger.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
