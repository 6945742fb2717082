"""Command-line interface: the full pipeline as composable subcommands.

Every RNG-dependent subcommand takes an explicit seed and writes a
provenance JSON next to its outputs, so identical argv + config + inputs
give bit-identical files.

Exit codes: 0 success, 2 usage/config error, 3 data error, 4 numeric or
degenerate-fit error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys

from . import __version__, airmask, maskops, metrics, stats, synth, volume_io
from .config import ConfigError, config_hash, parse_config, parse_pair, parse_triple
from .errors import LungCtError

SYNTH_KEYS = {"num_lesions", "steps", "hu_range", "connectivity", "rng_seed", "smooth_radius"}
PHANTOM_KEYS = {"dims", "spacing", "lung_shape", "air_mean", "air_sd", "wall_hu", "rng_seed"}


def _write_provenance(path: str, command: str, settings: dict) -> None:
    record = {
        "tool": "lungct",
        "version": __version__,
        "command": command,
        "settings": settings,
        "config_hash": config_hash({k: str(v) for k, v in settings.items()}),
    }
    with open(path, "w") as fh:
        json.dump(record, fh, indent=2)


def _cmd_synthesize(args) -> int:
    settings = {}
    if args.config:
        settings = parse_config(args.config, SYNTH_KEYS)
    params = synth.LesionSynthesisParams(
        num_lesions=parse_pair(settings.get("num_lesions", "1 5"), int),
        steps=parse_pair(settings.get("steps", "500 20000"), int),
        hu_range=parse_pair(settings.get("hu_range", "-650 -180")),
        connectivity=settings.get("connectivity", "face6"),
        rng_seed=int(settings.get("rng_seed", args.seed)),
        smooth_radius=int(settings.get("smooth_radius", "0")),
    )
    ct = volume_io.read_volume(args.ct)
    lung = volume_io.read_mask(args.lung)
    ct.geometry.require_compatible(lung.geometry)

    result = synth.synthesize(ct, lung, params)

    os.makedirs(args.out_dir, exist_ok=True)
    volume_io.write_volume(result.synthetic_ct, os.path.join(args.out_dir, "synthetic_ct.mhd"))
    volume_io.write_mask(result.lesion_mask, os.path.join(args.out_dir, "lesion_mask.mhd"))
    volume_io.write_mask(result.healthy_mask, os.path.join(args.out_dir, "healthy_mask.mhd"))
    _write_provenance(
        os.path.join(args.out_dir, "provenance.json"),
        "synthesize",
        {
            "ct": args.ct,
            "lung": args.lung,
            "num_lesions": list(params.num_lesions),
            "steps": list(params.steps),
            "hu_range": list(params.hu_range),
            "connectivity": params.connectivity,
            "rng_seed": params.rng_seed,
            "smooth_radius": params.smooth_radius,
            "lesion_count": result.lesion_count,
            "seeds": [list(s) for s in result.seeds],
        },
    )
    print(f"synthesized {result.lesion_count} lesions, "
          f"{result.lesion_mask.count} lesion voxels -> {args.out_dir}")
    return 0


def _cmd_airmask(args) -> int:
    ct = volume_io.read_volume(args.ct)
    lung = volume_io.read_mask(args.lung)
    ct.geometry.require_compatible(lung.geometry)

    hist = airmask.lung_histogram(ct, lung, bin_width=args.bin_width)
    fit = airmask.fit_peak(hist)
    mask = airmask.compute_air_mask(ct, lung, fit.threshold)

    volume_io.write_mask(mask, args.out)
    report = dict(fit.to_json(), bin_width=hist.bin_width)
    with open(args.out.rsplit(".", 1)[0] + "_fit.json", "w") as fh:
        json.dump(report, fh, indent=2)
    print(f"mu={fit.mu:.2f} sigma={fit.sigma:.2f} threshold={fit.threshold:.2f}")
    return 0


def _cmd_combine(args) -> int:
    m = volume_io.read_mask(args.lung)
    m_ht = volume_io.read_mask(args.healthy)
    m_a = volume_io.read_mask(args.air)
    result = maskops.combine_masks(m, m_ht, m_a)
    volume_io.write_mask(result, args.out)
    print(f"combined mask: {result.count} voxels -> {args.out}")
    return 0


def _metrics_row(ident: str, m: metrics.SegMetrics) -> dict:
    return {
        "id": ident,
        "dsc": f"{m.dsc:.6f}",
        "ji": f"{m.ji:.6f}",
        "asd_mm": f"{m.asd_mm:.6f}",
        "n_a": m.n_a,
        "n_b": m.n_b,
    }


def _cmd_evaluate(args) -> int:
    fieldnames = ["id", "dsc", "ji", "asd_mm", "n_a", "n_b"]
    rows = []
    if args.batch:
        with open(args.batch, newline="") as fh:
            for rec in csv.DictReader(fh):
                pred = volume_io.read_mask(rec["pred_path"])
                ref = volume_io.read_mask(rec["ref_path"])
                rows.append(_metrics_row(rec["id"], metrics.evaluate(pred, ref)))
    else:
        pred = volume_io.read_mask(args.pred)
        ref = volume_io.read_mask(args.ref)
        rows.append(_metrics_row(args.pred, metrics.evaluate(pred, ref)))

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
        if args.batch and len(rows) > 1:
            medians = {
                key: f"{statistics.median(float(r[key]) for r in rows):.6f}"
                for key in ("dsc", "ji", "asd_mm")
            }
            writer.writerow(dict(medians, id="median", n_a="", n_b=""))
    finally:
        if args.out:
            out.close()
    return 0


def _cmd_severity(args) -> int:
    ct = volume_io.read_volume(args.ct)
    lesion = volume_io.read_mask(args.lesion)
    lung = volume_io.read_mask(args.lung)
    scores = stats.severity(ct, lesion, lung)
    print(f"DL = {scores.dl:.6f}")
    print(f"DS = {scores.ds:.6f} HU")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "dl", "ds"])
            writer.writerow([args.subject_id, f"{scores.dl:.6f}", f"{scores.ds:.6f}"])
    return 0


def _read_csv_indexed(path: str, key: str) -> dict[str, dict]:
    with open(path, newline="") as fh:
        return {row[key]: row for row in csv.DictReader(fh)}


def _cmd_correlate(args) -> int:
    scores = _read_csv_indexed(args.scores, "id")
    labs = _read_csv_indexed(args.labs, "id")
    records = []
    for ident in scores:
        if ident not in labs:
            continue
        records.append(
            stats.SubjectRecord(
                id=ident,
                wbc=float(labs[ident]["wbc"]),
                lym_pct=float(labs[ident]["lym_pct"]),
                dl=float(scores[ident]["dl"]),
                ds=float(scores[ident]["ds"]),
            )
        )
    results = stats.correlate_table(records)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["score", "lab", "n", "r", "p", "significant"])
        for res in results:
            writer.writerow(
                [
                    res.pair[0],
                    res.pair[1],
                    res.n,
                    res.error if res.error else f"{res.r:.6g}",
                    res.error if res.error else f"{res.p:.6g}",
                    str(res.significant).lower(),
                ]
            )
    for res in results:
        tag = res.error or ("significant" if res.significant else "n.s.")
        print(f"{res.pair[0]} vs {res.pair[1]}: r={res.r:.4f} p={res.p:.4g} ({tag})")
    return 0


def _cmd_export_slices(args) -> int:
    ct = volume_io.read_volume(args.ct)
    mask = volume_io.read_mask(args.mask)
    window = parse_pair(args.window) if args.window else (-1000.0, 400.0)
    manifest = volume_io.export_slice_dataset(ct, mask, args.out_dir, window)
    print(f"exported {len(manifest.entries)} slice pairs -> {args.out_dir}")
    return 0


def _cmd_phantom(args) -> int:
    settings = parse_config(args.spec, PHANTOM_KEYS) if args.spec else {}
    spec = synth.PhantomSpec(
        dims=parse_triple(settings.get("dims", "64 64 64"), int),
        spacing=parse_triple(settings.get("spacing", "1 1 1")),
        lung_shape=settings.get("lung_shape", "box"),
        air_mean=float(settings.get("air_mean", "-900")),
        air_sd=float(settings.get("air_sd", "20")),
        wall_hu=float(settings.get("wall_hu", "0")),
        rng_seed=int(settings.get("rng_seed", "0")),
    )
    ct, lung = synth.make_phantom(spec)

    os.makedirs(args.out_dir, exist_ok=True)
    volume_io.write_volume(ct, os.path.join(args.out_dir, "phantom_ct.mhd"))
    volume_io.write_mask(lung, os.path.join(args.out_dir, "phantom_lung.mhd"))
    _write_provenance(
        os.path.join(args.out_dir, "provenance.json"),
        "phantom",
        {
            "dims": list(spec.dims),
            "spacing": list(spec.spacing),
            "lung_shape": spec.lung_shape,
            "air_mean": spec.air_mean,
            "air_sd": spec.air_sd,
            "wall_hu": spec.wall_hu,
            "rng_seed": spec.rng_seed,
        },
    )
    print(f"phantom {spec.dims} ({spec.lung_shape}) -> {args.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lungct", description=__doc__)
    parser.add_argument("--version", action="version", version=f"lungct {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="grow pseudo-lesions in a lung CT")
    p.add_argument("--ct", required=True)
    p.add_argument("--lung", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("airmask", help="fit the air peak and threshold the lung")
    p.add_argument("--ct", required=True)
    p.add_argument("--lung", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bin-width", type=float, default=2.0)
    p.set_defaults(func=_cmd_airmask)

    p = sub.add_parser("combine", help="combine lung/healthy/air masks into a lesion mask")
    p.add_argument("--lung", required=True)
    p.add_argument("--healthy", required=True)
    p.add_argument("--air", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_combine)

    p = sub.add_parser("evaluate", help="Dice / Jaccard / surface distance")
    p.add_argument("--pred")
    p.add_argument("--ref")
    p.add_argument("--batch", help="CSV with columns id,pred_path,ref_path")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("severity", help="damage load and damage score")
    p.add_argument("--ct", required=True)
    p.add_argument("--lesion", required=True)
    p.add_argument("--lung", required=True)
    p.add_argument("--out")
    p.add_argument("--subject-id", default="subject")
    p.set_defaults(func=_cmd_severity)

    p = sub.add_parser("correlate", help="correlate severity scores with lab values")
    p.add_argument("--scores", required=True, help="CSV: id,dl,ds")
    p.add_argument("--labs", required=True, help="CSV: id,wbc,lym_pct")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser("export-slices", help="export 2D slice pairs for training")
    p.add_argument("--ct", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--window", help="HU window as 'low,high' (default -1000,400)")
    p.set_defaults(func=_cmd_export_slices)

    p = sub.add_parser("phantom", help="generate a test phantom CT + lung mask")
    p.add_argument("--spec", help="flat key=value spec file")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_phantom)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "evaluate" and not args.batch and not (args.pred and args.ref):
        parser.error("evaluate requires --pred and --ref, or --batch")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 2
    except LungCtError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return exc.exit_status
    except OSError as exc:
        print(f"E_IO: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
