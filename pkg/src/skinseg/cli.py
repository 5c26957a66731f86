"""Command-line interface: train, segment, eval and baseline subcommands.

Per-image failures are reported and skipped; the exit status is 0 only when
every requested image produced its outputs. ``--set key=value`` overrides
any config-file entry (flags win over the file).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

import numpy as np

from . import colorspace, evalkit, imgio, otsuseg, pipeline, skinmodel


def _load_config(args) -> pipeline.PipelineConfig:
    values: dict[str, str] = {}
    if getattr(args, "config", None):
        values.update(pipeline.parse_config_file(Path(args.config).read_text()))
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        values[key.strip()] = value.strip()
    return pipeline.config_from_values(values)


def _harvest_skin_pixels(image_path: Path, gt_path: Path) -> tuple[np.ndarray, np.ndarray]:
    """(YCbCr, RGB) triplet arrays of the pixels the annotation marks as skin."""
    img = imgio.load_rgb(image_path)
    gt = evalkit.load_ground_truth(imgio.load_rgb(gt_path))
    if gt.shape != img.shape[:2]:
        raise ValueError(f"{gt_path}: annotation size {gt.shape} != image {img.shape[:2]}")
    y, cb, cr = colorspace.ycbcr_planes(img)
    skin = gt == evalkit.GT_SKIN
    ycbcr = np.stack([y[skin], cb[skin], cr[skin]], axis=1).astype(np.int64)
    return ycbcr, img[skin].astype(np.int64)


def _read_triplets(path: Path) -> np.ndarray:
    """RGB triplets from a text file, one 'R,G,B' or 'R G B' line each."""
    rows = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected three components, got {raw!r}")
        rows.append([int(p) for p in parts])
    if not rows:
        raise ValueError(f"{path}: no pixels found")
    return np.asarray(rows, dtype=np.int64)


def _paired_files(a_dir: Path, b_dir: Path, what: str) -> list[tuple[str, Path, Path]]:
    """Match files across two directories by stem.

    When the first directory holds any ``*.mask.png`` files (the segment and
    baseline output layout), only those count as masks so debug artifacts in
    the same directory are ignored; their ``.mask`` suffix is stripped for
    matching.
    """
    pngs = [p for p in sorted(a_dir.iterdir()) if p.suffix.lower() == ".png"]
    masks = [p for p in pngs if p.stem.endswith(".mask")]
    if masks:
        a_files = {p.stem[:-5]: p for p in masks}
    else:
        a_files = {p.stem: p for p in pngs}
    b_files = {p.stem: p for p in sorted(b_dir.iterdir()) if p.suffix.lower() == ".png"}
    if not a_files:
        raise ValueError(f"no PNG files in {a_dir}")
    missing = sorted(set(a_files) ^ set(b_files))
    if missing:
        raise ValueError(f"unmatched {what} names: {', '.join(missing)}")
    return [(stem, a_files[stem], b_files[stem]) for stem in sorted(a_files)]


def cmd_train(args) -> int:
    if bool(args.pixels) == bool(args.images):
        print("train: provide either --pixels or --images/--gt", file=sys.stderr)
        return 2
    if args.images and not args.gt:
        print("train: --images requires --gt", file=sys.stderr)
        return 2
    try:
        if args.pixels:
            rgb = _read_triplets(Path(args.pixels))
            if rgb.min() < 0 or rgb.max() > 255:
                raise ValueError("pixel components must lie in [0, 255]")
            triplets = colorspace.ycbcr_triplets(rgb).astype(np.int64)
            rgb_for_lut = rgb
        else:
            pairs = _paired_files(Path(args.images), Path(args.gt), "image/annotation")
            chunks, rgb_chunks = [], []
            for _, image_path, gt_path in pairs:
                ycbcr, rgb_skin = _harvest_skin_pixels(image_path, gt_path)
                chunks.append(ycbcr)
                rgb_chunks.append(rgb_skin)
            triplets = np.concatenate(chunks)
            rgb_for_lut = np.concatenate(rgb_chunks)
        if triplets.shape[0] == 0:
            raise skinmodel.TrainingError("the corpus marks no skin pixels")
        params = skinmodel.TrainParams(tau_in=args.tau_in, tau_out=args.tau_out,
                                       smoothing=not args.no_smoothing)
        model = skinmodel.train_model(triplets, params)
        out = Path(args.model)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(skinmodel.save_model(model))
        print(f"trained on {triplets.shape[0]} skin pixels -> {out}")
        for pid in skinmodel.PLANE_IDS:
            pair = model.planes[pid]
            print(f"  {pid}: inner {len(pair.inner.vertices)} vertices, "
                  f"outer {len(pair.outer.vertices)} vertices")
        if args.lut_out:
            lut = evalkit.lut_train(rgb_for_lut, bins=args.lut_bins)
            lut_path = Path(args.lut_out)
            lut_path.parent.mkdir(parents=True, exist_ok=True)
            lut_path.write_text(evalkit.save_lut(lut))
            print(f"LUT baseline model ({args.lut_bins} bins/channel) -> {lut_path}")
        return 0
    except (ValueError, OSError) as e:
        print(f"train: {e}", file=sys.stderr)
        return 2


def _segment_one(image_path: str, model_path: str, cfg: pipeline.PipelineConfig,
                 out_dir: str, debug: bool) -> dict:
    model = skinmodel.load_model(Path(model_path).read_text())
    img = imgio.load_rgb(image_path)
    result = pipeline.segment_image(img, model, cfg)
    stem = Path(image_path).stem
    out = Path(out_dir)
    artifacts = {}

    def emit(kind: str, writer, data):
        path = out / f"{stem}.{kind}.png"
        writer(path, data)
        artifacts[kind] = str(path)

    emit("mask", imgio.save_mask, result.mask)
    if debug:
        emit("ternary", imgio.save_gray, result.ternary)
        emit("refined", imgio.save_gray, result.refined)
        for i, ch in enumerate(result.class_maps.channels):
            emit(f"otsu_{ch.value}", imgio.save_gray,
                 otsuseg.stretch_labels(result.class_maps.maps[i], result.class_maps.k))
        emit("edges", imgio.save_mask, result.edges)
        emit("stage1", imgio.save_mask, result.stage1)
        emit("overlay", imgio.save_rgb, imgio.overlay(img, result.mask))
    return {"image": str(image_path), "timings_ms": result.timings_ms,
            "artifacts": artifacts}


def cmd_segment(args) -> int:
    try:
        cfg = _load_config(args)
    except (ValueError, OSError) as e:
        print(f"segment: {e}", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries, failures = [], []
    jobs = [(p, args.model, cfg, str(out_dir), args.debug_artifacts) for p in args.images]

    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = {pool.submit(run_segment_job, job): job[0] for job in jobs}
            results = {}
            for fut, path in futures.items():
                try:
                    results[path] = fut.result()
                except Exception as e:  # per-image isolation
                    failures.append((path, str(e)))
            entries = [results[p] for p in args.images if p in results]
    else:
        for job in jobs:
            try:
                entries.append(run_segment_job(job))
            except Exception as e:
                failures.append((job[0], str(e)))

    report = {"config": cfg.snapshot(), "model": str(args.model), "images": entries}
    (out_dir / "run_report.json").write_text(json.dumps(report, indent=2) + "\n")
    for path, msg in failures:
        print(f"segment: {path}: {msg}", file=sys.stderr)
    print(f"segmented {len(entries)}/{len(args.images)} images -> {out_dir}")
    return 1 if failures else 0


def run_segment_job(job) -> dict:
    """Top-level worker so ProcessPoolExecutor can pickle it."""
    image_path, model_path, cfg, out_dir, debug = job
    return _segment_one(image_path, model_path, cfg, out_dir, debug)


def cmd_eval(args) -> int:
    try:
        pairs = _paired_files(Path(args.masks), Path(args.gt), "mask/annotation")
        records = []
        for stem, mask_path, gt_path in pairs:
            mask = imgio.load_mask(mask_path)
            gt = evalkit.load_ground_truth(imgio.load_rgb(gt_path))
            records.append((stem, evalkit.confusion(mask, gt)))
    except (ValueError, OSError) as e:
        print(f"eval: {e}", file=sys.stderr)
        return 2
    csv_text = evalkit.metrics_csv(records)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(csv_text)
        print(f"metrics for {len(records)} images -> {args.out}")
    else:
        sys.stdout.write(csv_text)
    return 0


def cmd_baseline(args) -> int:
    lut = None
    if args.rule == "lut":
        if not args.lut_model:
            print("baseline: rule 'lut' requires --lut-model", file=sys.stderr)
            return 2
        try:
            lut = evalkit.load_lut(Path(args.lut_model).read_text())
        except (ValueError, OSError) as e:
            print(f"baseline: {e}", file=sys.stderr)
            return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for path in args.images:
        try:
            img = imgio.load_rgb(path)
            if args.rule == "daylight":
                mask = evalkit.kovac_daylight_image(img)
            elif args.rule == "flashlight":
                mask = evalkit.kovac_flashlight_image(img)
            else:
                mask = evalkit.lut_classify_image(lut, img, args.theta)
            imgio.save_mask(out_dir / f"{Path(path).stem}.mask.png", mask)
        except Exception as e:
            print(f"baseline: {path}: {e}", file=sys.stderr)
            failures += 1
    print(f"baseline '{args.rule}' wrote {len(args.images) - failures}/{len(args.images)} "
          f"masks -> {out_dir}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skinseg",
                                     description="Trainable skin segmentation pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the polygon cluster model")
    p_train.add_argument("--images", help="directory of training images")
    p_train.add_argument("--gt", help="directory of annotations (red=skin, black=non-skin, blue=ignore)")
    p_train.add_argument("--pixels", help="text file of raw R,G,B skin triplets instead of images")
    p_train.add_argument("--model", required=True, help="output model path (JSON)")
    p_train.add_argument("--tau-in", type=float, default=0.05,
                         help="inner polygon threshold, fraction of peak density")
    p_train.add_argument("--tau-out", type=float, default=1e-6,
                         help="outer polygon threshold, fraction of total mass")
    p_train.add_argument("--no-smoothing", action="store_true",
                         help="skip the 3x3 box smoothing of density maps")
    p_train.add_argument("--lut-out", help="also write a LUT baseline model here")
    p_train.add_argument("--lut-bins", type=int, default=32,
                         help="LUT bins per channel (power of two)")
    p_train.set_defaults(func=cmd_train)

    p_seg = sub.add_parser("segment", help="segment images with a trained model")
    p_seg.add_argument("images", nargs="+", help="input raster files")
    p_seg.add_argument("--model", required=True, help="trained model path")
    p_seg.add_argument("--out", required=True, help="output directory")
    p_seg.add_argument("--config", help="key=value config file")
    p_seg.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override one config value (repeatable; wins over --config)")
    p_seg.add_argument("--debug-artifacts", action="store_true",
                       help="also write ternary, class map, edge and stage-1 PNGs")
    p_seg.add_argument("--jobs", type=int, default=1, help="parallel image workers")
    p_seg.set_defaults(func=cmd_segment)

    p_eval = sub.add_parser("eval", help="score masks against ground truth")
    p_eval.add_argument("--masks", required=True, help="directory of mask PNGs")
    p_eval.add_argument("--gt", required=True, help="directory of annotation PNGs")
    p_eval.add_argument("--out", help="write CSV here instead of stdout")
    p_eval.set_defaults(func=cmd_eval)

    p_base = sub.add_parser("baseline", help="run a rule-based baseline classifier")
    p_base.add_argument("images", nargs="+", help="input raster files")
    p_base.add_argument("--rule", required=True, choices=("daylight", "flashlight", "lut"))
    p_base.add_argument("--lut-model", help="trained LUT model (required for rule=lut)")
    p_base.add_argument("--theta", type=float, default=0.05,
                        help="LUT probability threshold")
    p_base.add_argument("--out", required=True, help="output directory")
    p_base.set_defaults(func=cmd_baseline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
