"""Command-line entry points.

Subcommands: import-svg, rasterize, stats, consensus, eval, toy-train,
game-field, classify, serve. The CONTOURBENCH_DATA environment variable
overrides any --data flag.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench, dataset
from .consensus import consensus_drawings
from .game import GameParams, classify_submission, field_from_dict, generate_field
from .matching import Tolerance, DOUBLED_DIAGONAL_FRACTION
from .mmloss import l1_term, three_line_fixture, train_toy
from .raster import SoftMap, load_binarymap, load_softmap, save_binarymap, save_softmap
from .strokes import (
    Drawing,
    drawing_stats,
    drawing_to_dict,
    parse_drawing,
    rasterize_drawing,
    serialize_drawing,
)
from .svg_import import DEFAULT_FLATTEN_TOL, import_svg


def _add_data_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", default=None, help="dataset root (CONTOURBENCH_DATA overrides)")


def _tolerance_for(d: Drawing, fraction: float) -> Tolerance:
    return Tolerance.for_image(d.width, d.height, fraction)


def cmd_import_svg(args) -> int:
    text = Path(args.input).read_text()
    drawing = import_svg(
        text, image_id=args.image_id, annotator_id=args.annotator, flatten_tol=args.flatten_tol
    )
    out = serialize_drawing(drawing) + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    return 0


def cmd_rasterize(args) -> int:
    drawing = parse_drawing(Path(args.input).read_text())
    m = rasterize_drawing(drawing, args.scale)
    save_binarymap(m, args.out)
    print(f"wrote {m.width}x{m.height} map with {m.count} on-pixels to {args.out}")
    return 0


def cmd_stats(args) -> int:
    root = dataset.resolve_data_root(args.data)
    ids = dataset.list_image_ids(root)
    if not ids:
        print(f"no drawings under {root}", file=sys.stderr)
        return 1
    drawings = [d for image_id in ids for d in dataset.load_drawings(root, image_id)]
    print(json.dumps(drawing_stats(drawings), indent=2))
    return 0


def cmd_consensus(args) -> int:
    root = dataset.resolve_data_root(args.data)
    ds = dataset.load_drawings(root, args.image)
    tol = _tolerance_for(ds[0], args.tol_fraction)
    result = consensus_drawings(ds, tol, rho=args.rho, union=args.union)
    report = {
        "image_id": args.image,
        "rho": args.rho,
        "d_max": tol.d_max,
        "kept": [list(k) for k in result.kept],
        "per_stroke_fractions": [m.tolist() for m in result.per_stroke_fractions],
    }
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.image}.consensus.json").write_text(json.dumps(report, indent=2) + "\n")
        (out / f"{args.image}.drawing.json").write_text(
            serialize_drawing(result.consensus_drawing) + "\n"
        )
        print(f"wrote consensus for {args.image} to {out}")
    else:
        report["consensus_drawing"] = drawing_to_dict(result.consensus_drawing)
        print(json.dumps(report, indent=2))
    return 0


def _load_prediction(pred_dir: Path, image_id: str):
    for ext, loader in ((".png", load_softmap), (".json", None)):
        p = pred_dir / f"{image_id}{ext}"
        if p.is_file():
            if loader is not None:
                return loader(p)
            return parse_drawing(p.read_text())
    return None


def cmd_eval(args) -> int:
    root = dataset.resolve_data_root(args.gt)
    pred_dir = Path(args.pred)
    ids = dataset.list_image_ids(root)
    if not ids:
        print(f"no ground-truth drawings under {root}", file=sys.stderr)
        return 1
    thresholds = bench.DEFAULT_THRESHOLDS if args.thresholds is None else [
        float(t) for t in args.thresholds.split(",")
    ]
    tasks = []
    for image_id in ids:
        pred = _load_prediction(pred_dir, image_id)
        if pred is None:
            print(f"skipping {image_id}: no prediction found", file=sys.stderr)
            continue
        ds = dataset.load_drawings(root, image_id)
        tol = _tolerance_for(ds[0], args.tol_fraction)
        gt = consensus_drawings(ds, tol, rho=args.rho).consensus_drawing if len(ds) >= 2 else ds[0]
        tasks.append((pred, gt, tol, thresholds, not args.no_thin))
    per_image = bench.evaluate_batch(tasks, jobs=args.jobs)
    if not per_image:
        print("no images evaluated", file=sys.stderr)
        return 1
    summary = bench.aggregate(per_image)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bench.write_summary_json(summary, out / "summary.json")
    bench.write_pr_csv(summary, out / "pr_curve.csv")
    print(json.dumps({"ods": summary.ods, "ois": summary.ois}, indent=2))
    return 0


def cmd_toy_train(args) -> int:
    ts = three_line_fixture()
    model = train_toy([(0, ts)], args.mode, steps=args.steps, learning_rate=args.lr, seed=args.seed)
    pred = model.predict(0)
    per_target = [l1_term(pred, ts.targets[j]) for j in range(ts.m)]
    report = {
        "mode": args.mode,
        "final_min_l1": min(per_target),
        "per_target_l1": per_target,
        "steps": args.steps,
    }
    print(json.dumps(report, indent=2))
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"toy_{args.mode}.json").write_text(json.dumps(report, indent=2) + "\n")
        save_softmap(SoftMap(pred), out / f"toy_{args.mode}_prediction.png")
        for j in range(ts.m):
            save_softmap(SoftMap(ts.targets[j]), out / f"toy_target_{j}.png")
    return 0


def cmd_game_field(args) -> int:
    if args.boundary:
        boundary = load_binarymap(args.boundary)
        image_id = args.image or Path(args.boundary).stem
    else:
        root = dataset.resolve_data_root(args.data)
        src = dataset.find_field_source(root, args.image)
        if src is None:
            print(f"no fields_src map for {args.image!r} under {root}", file=sys.stderr)
            return 1
        boundary = load_binarymap(src)
        image_id = args.image
    params = GameParams(
        n_reward=args.n_reward,
        n_penalty=args.n_penalty,
        collect_radius=args.collect_radius,
        penalty_radius=args.penalty_radius,
        clearance=args.clearance,
        min_sep=args.min_sep,
    )
    field = generate_field(boundary, params, seed=args.seed, image_id=image_id)
    out = json.dumps(field.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(out)
        print(f"wrote field with {len(field.reward_points)} rewards to {args.out}")
    else:
        sys.stdout.write(out)
    return 0


def cmd_classify(args) -> int:
    drawing = parse_drawing(Path(args.drawing).read_text())
    field = field_from_dict(json.loads(Path(args.field).read_text()))
    result = classify_submission(drawing, field, cutoff=args.cutoff)
    print(json.dumps(result, indent=2))
    return 0 if result["accepted"] or not args.fail_rejected else 3


def cmd_serve(args) -> int:
    from .server import ServiceConfig, serve

    root = dataset.resolve_data_root(args.data)
    cfg = ServiceConfig(
        dataset_root=root,
        host=args.host,
        port=args.port,
        cutoff=args.cutoff,
        static_dir=Path(args.static) if args.static else None,
    )
    serve(cfg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contourbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("import-svg", help="convert an SVG file to canonical drawing JSON")
    p.add_argument("input")
    p.add_argument("--out", default=None)
    p.add_argument("--image-id", default="")
    p.add_argument("--annotator", default=None)
    p.add_argument("--flatten-tol", type=float, default=DEFAULT_FLATTEN_TOL)
    p.set_defaults(func=cmd_import_svg)

    p = sub.add_parser("rasterize", help="rasterize a drawing JSON to a binary PNG")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=cmd_rasterize)

    p = sub.add_parser("stats", help="dataset-wide stroke statistics")
    _add_data_arg(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("consensus", help="stroke-level consensus for one image")
    _add_data_arg(p)
    p.add_argument("--image", required=True)
    p.add_argument("--rho", type=float, default=0.75)
    p.add_argument("--tol-fraction", type=float, default=DOUBLED_DIAGONAL_FRACTION)
    p.add_argument("--union", action="store_true", help="merge kept strokes of all drawings")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_consensus)

    p = sub.add_parser("eval", help="benchmark a directory of predictions")
    p.add_argument("--pred", required=True, help="directory of <image_id>.png or .json predictions")
    p.add_argument("--gt", default=None, help="dataset root with ground-truth drawings")
    p.add_argument("--out", default="eval_out")
    p.add_argument("--rho", type=float, default=0.75)
    p.add_argument("--tol-fraction", type=float, default=DOUBLED_DIAGONAL_FRACTION)
    p.add_argument("--thresholds", default=None, help="comma-separated override")
    p.add_argument("--no-thin", action="store_true", help="skip thinning binarized predictions")
    p.add_argument("--jobs", type=int, default=1, help="process pool size for per-image evaluation")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("toy-train", help="min/mean trainer on the three-line fixture")
    p.add_argument("--mode", choices=("min", "mean"), required=True)
    p.add_argument("--steps", type=int, default=3000)
    p.add_argument("--lr", type=float, default=150.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_toy_train)

    p = sub.add_parser("game-field", help="sample a reward/penalty field from a boundary map")
    _add_data_arg(p)
    p.add_argument("--image", default=None)
    p.add_argument("--boundary", default=None, help="boundary PNG (overrides --image lookup)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-reward", type=int, default=50)
    p.add_argument("--n-penalty", type=int, default=50)
    p.add_argument("--collect-radius", type=float, default=6.0)
    p.add_argument("--penalty-radius", type=float, default=4.0)
    p.add_argument("--clearance", type=float, default=15.0)
    p.add_argument("--min-sep", type=float, default=8.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_game_field)

    p = sub.add_parser("classify", help="accept/reject a finished drawing against a field")
    p.add_argument("--drawing", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--cutoff", type=float, default=0.5)
    p.add_argument("--fail-rejected", action="store_true", help="exit nonzero when rejected")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("serve", help="run the drawing-game service")
    _add_data_arg(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--cutoff", type=float, default=0.5)
    p.add_argument("--static", default=None, help="directory with the built browser client")
    p.set_defaults(func=cmd_serve)
    return parser


def cli_dispatch(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
