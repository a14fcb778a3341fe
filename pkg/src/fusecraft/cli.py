"""Command-line front end: fuse image pairs, score results, compare engines.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 engine or config
error. Set FUSECRAFT_LOG=debug (or info/warning/error) for diagnostics.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from ._version import __version__
from . import report as reporting
from .anfis import AnfisSettings
from .config import default_anfis_settings, default_fuzzy_fis, parse_config
from .errors import (
    ConfigError,
    CorruptDataError,
    FusecraftError,
    UnsupportedFormatError,
)
from .fuzzy import MamdaniFis
from .image_io import crop_to_common, load_image, save_image
from .metrics import evaluate_all
from .pipeline import FusionJob, run_job

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_ENGINE = 4

log = logging.getLogger("fusecraft")


def _configure_logging() -> None:
    name = os.environ.get("FUSECRAFT_LOG", "warning").strip().upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _fuzzy_engine(config_path, defuzz_resolution) -> MamdaniFis:
    if config_path:
        engine = parse_config(config_path)
        if not isinstance(engine, MamdaniFis):
            raise ConfigError(f"{config_path} is not a fuzzy engine config")
    else:
        engine = default_fuzzy_fis()
    if defuzz_resolution is not None:
        engine = dataclasses.replace(engine, defuzz_resolution=defuzz_resolution)
    return engine


def _anfis_engine(config_path, args) -> AnfisSettings:
    if config_path:
        settings = parse_config(config_path)
        if not isinstance(settings, AnfisSettings):
            raise ConfigError(f"{config_path} is not an anfis engine config")
    else:
        settings = default_anfis_settings()
    overrides = {}
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if args.mfs is not None:
        overrides["n_mfs"] = args.mfs
    if args.step_size is not None:
        overrides["step_size"] = args.step_size
    if args.target is not None:
        overrides["target"] = args.target
    return dataclasses.replace(settings, **overrides) if overrides else settings


def _write_sidecar(image_path: Path, provenance: dict) -> Path:
    sidecar = Path(str(image_path) + ".provenance.json")
    sidecar.write_text(
        json.dumps(provenance, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return sidecar


def cmd_fuse(args) -> int:
    a = load_image(args.a)
    b = load_image(args.b)
    if args.method == "fuzzy":
        engine = _fuzzy_engine(args.config, args.defuzz_resolution)
    else:
        engine = _anfis_engine(args.config, args)
    fused, provenance = run_job(FusionJob(args.method, engine, a, b))
    out = Path(args.output)
    save_image(fused, out)
    _write_sidecar(out, provenance)
    log.info("fused %s + %s -> %s (%dx%d)", args.a, args.b, out, fused.rows, fused.cols)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    a = load_image(args.a)
    b = load_image(args.b)
    fused = load_image(args.fused)
    reference = load_image(args.reference) if args.reference else None
    report = evaluate_all(a, b, fused, reference, psnr_formula=args.psnr_formula)
    if args.format == "table":
        sys.stdout.write(reporting.format_table([("fused", report)]))
    else:
        sys.stdout.write(reporting.format_structured(report))
    if report.degenerate:
        log.warning("degenerate metrics: %s", ", ".join(report.degenerate))
    return EXIT_OK


def cmd_compare(args) -> int:
    a = load_image(args.a)
    b = load_image(args.b)
    fuzzy_engine = _fuzzy_engine(args.fuzzy_config, args.defuzz_resolution)
    anfis_settings = _anfis_engine(args.anfis_config, args)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    fuzzy_img, fuzzy_prov = run_job(FusionJob("fuzzy", fuzzy_engine, a, b))
    anfis_img, anfis_prov = run_job(FusionJob("anfis", anfis_settings, a, b))
    for name, img, prov in (
        ("fused_fuzzy.png", fuzzy_img, fuzzy_prov),
        ("fused_anfis.png", anfis_img, anfis_prov),
    ):
        path = out_dir / name
        save_image(img, path)
        _write_sidecar(path, prov)

    rows = [
        ("Fuzzy Fusion", evaluate_all(a, b, fuzzy_img, psnr_formula=args.psnr_formula)),
        ("Neuro Fuzzy Fusion", evaluate_all(a, b, anfis_img, psnr_formula=args.psnr_formula)),
    ]
    table = reporting.format_table(rows)
    (out_dir / "report.txt").write_text(table, encoding="utf-8")
    (out_dir / "report.tsv").write_text(reporting.format_delimited(rows), encoding="utf-8")
    sys.stdout.write(table)

    if not args.no_figures:
        ac, bc = crop_to_common(a, b)
        reporting.save_image_panel(
            out_dir / "comparison.png",
            [
                ("Input A", ac),
                ("Input B", bc),
                ("Fuzzy Fusion", fuzzy_img),
                ("Neuro Fuzzy Fusion", anfis_img),
            ],
        )
        reporting.save_metrics_chart(out_dir / "metrics.png", rows)
        history = (anfis_prov.get("training") or {}).get("rmse_history", [])
        if history:
            reporting.save_training_curve(out_dir / "training_rmse.png", history)
    return EXIT_OK


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--defuzz-resolution", type=int, metavar="N",
                        help="output sampling points for centroid defuzzification")
    parser.add_argument("--epochs", type=int, metavar="N",
                        help="training epochs for the anfis engine")
    parser.add_argument("--mfs", type=int, metavar="N",
                        help="membership functions per input for the anfis engine")
    parser.add_argument("--step-size", type=float, metavar="S",
                        help="initial gradient step size for the anfis engine")
    parser.add_argument("--target", choices=("identity", "mean", "max"),
                        help="synthetic training target preset")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusecraft",
        description="Pixel-level grayscale image fusion and quality reporting.",
    )
    parser.add_argument("--version", action="version", version=f"fusecraft {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fuse = sub.add_parser("fuse", help="fuse an image pair into one output image")
    fuse.add_argument("--method", choices=("fuzzy", "anfis"), required=True)
    fuse.add_argument("-a", "--input-a", dest="a", required=True, metavar="PATH")
    fuse.add_argument("-b", "--input-b", dest="b", required=True, metavar="PATH")
    fuse.add_argument("-o", "--output", dest="output", required=True, metavar="PATH")
    fuse.add_argument("--config", metavar="PATH", help="engine config document")
    _add_engine_flags(fuse)
    fuse.set_defaults(func=cmd_fuse)

    ev = sub.add_parser("evaluate", help="score a fused image against its sources")
    ev.add_argument("-a", "--input-a", dest="a", required=True, metavar="PATH")
    ev.add_argument("-b", "--input-b", dest="b", required=True, metavar="PATH")
    ev.add_argument("--fused", required=True, metavar="PATH")
    ev.add_argument("--reference", metavar="PATH",
                    help="reference image for IQI/RMSE/PSNR/CC (default: input A)")
    ev.add_argument("--format", choices=("table", "structured"), default="table")
    ev.add_argument("--psnr-formula", choices=("paper", "standard"), default="standard")
    ev.set_defaults(func=cmd_evaluate)

    cp = sub.add_parser("compare", help="run both engines and report side by side")
    cp.add_argument("-a", "--input-a", dest="a", required=True, metavar="PATH")
    cp.add_argument("-b", "--input-b", dest="b", required=True, metavar="PATH")
    cp.add_argument("--out-dir", required=True, metavar="DIR")
    cp.add_argument("--fuzzy-config", metavar="PATH")
    cp.add_argument("--anfis-config", metavar="PATH")
    cp.add_argument("--psnr-formula", choices=("paper", "standard"), default="standard")
    cp.add_argument("--no-figures", action="store_true",
                    help="skip rendering the PNG figures")
    _add_engine_flags(cp)
    cp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging()
    try:
        return args.func(args)
    except (UnsupportedFormatError, CorruptDataError) as exc:
        print(f"fusecraft: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:  # includes FileNotFoundError
        print(f"fusecraft: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FusecraftError as exc:
        print(f"fusecraft: engine/config error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
