"""``sarfocus`` command line: simulate, image, autofocus, metrics, compare, export.

Exit codes: 0 success, 1 other failure, 2 configuration, 3 file format,
4 domain (geometry, range ambiguity, undefined metric), 5 optimization,
6 I/O.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import kernels
from .errors import SarError
from .formats import export_image, load_cube, load_image, save_cube, save_image
from .metrics import evaluate
from .pipeline import AUTOFOCUS, PIPELINES, format_table, report_json, run_compare, run_pipeline
from .scenario import ErrorModel, Scenario, load_scenario, save_scenario

EXIT_IO = 6


def _common():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", type=Path, default=argparse.SUPPRESS,
                        help="JSON scenario file (defaults when omitted)")
    parent.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="noise seed, overrides error.seed")
    parent.add_argument("--out-dir", type=Path, default=argparse.SUPPRESS,
                        help="output directory (default: current directory)")
    parent.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="threads for the imaging kernels")
    return parent


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="sarfocus", parents=[common],
                                     description="Automotive FMCW SAR imaging and localization-error autofocus")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate a beat cube (SARC)")
    p.add_argument("--output", type=Path, default=None, help="cube path (default OUT_DIR/cube.sarc)")

    for name, helptext in (("image", "form an image"), ("autofocus", "form an autofocused image")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--pipeline", choices=PIPELINES, default="pfa")
        p.add_argument("--cube", type=Path, default=None, help="SARC cube (simulated when omitted)")
        p.add_argument("--output", type=Path, default=None)
        if name == "autofocus":
            p.add_argument("--method", choices=[a for a in AUTOFOCUS if a != "none"], default="leca_ic")

    p = sub.add_parser("metrics", parents=[common], help="metrics of a saved image")
    p.add_argument("image", type=Path)
    p.add_argument("--n-peaks", type=int, default=5)

    p = sub.add_parser("compare", parents=[common], help="pipeline x autofocus comparison table")
    p.add_argument("--pipelines", nargs="+", choices=PIPELINES, default=list(PIPELINES))
    p.add_argument("--autofocus", nargs="+", choices=AUTOFOCUS, default=["none", "leca_ic", "leca_pga"])

    p = sub.add_parser("export", parents=[common], help="export a saved image as PNG or CSV")
    p.add_argument("image", type=Path)
    p.add_argument("--mode", choices=("png_db", "csv_complex"), default="png_db")
    p.add_argument("--dyn-range", type=float, default=40.0, help="dB range of png_db")
    p.add_argument("--output", type=Path, default=None)
    return parser


def _scenario(args) -> Scenario:
    scenario = load_scenario(args.config) if getattr(args, "config", None) else Scenario()
    seed = getattr(args, "seed", None)
    if seed is not None:
        e = scenario.error
        scenario = scenario.replace(error=ErrorModel(e.beta_true, seed, e.snr_db))
    return scenario


def _out(args, name, explicit=None):
    if explicit is not None:
        explicit.parent.mkdir(parents=True, exist_ok=True)
        return explicit
    out_dir = getattr(args, "out_dir", None) or Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / name


def _image(args, scenario, method):
    cube = load_cube(args.cube) if args.cube else None
    image, report = run_pipeline(args.pipeline, method, scenario, cube)
    name = f"image_{args.pipeline}_{method}.npz"
    path = _out(args, name, args.output)
    save_image(image, path, scenario.digest())
    metrics_path = path.with_suffix(".json")
    metrics_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    summary = {"image": str(path), "metrics": str(metrics_path), "beta_hat": report.beta_hat,
               "ic": report.ic, "ie": report.ie, "ar_m": report.ar_m, "cc_s": report.cc_s}
    print(json.dumps(summary, indent=2))


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None):
        kernels.set_threads(args.threads)
    try:
        scenario = _scenario(args)
        if args.command == "simulate":
            cube = scenario.simulate()
            path = _out(args, "cube.sarc", args.output)
            save_cube(cube, path)
            save_scenario(scenario, path.with_suffix(".json"))
            print(f"wrote {path} ({cube.data.shape}, scenario {scenario.digest()})")
        elif args.command == "image":
            _image(args, scenario, "none")
        elif args.command == "autofocus":
            _image(args, scenario, args.method)
        elif args.command == "metrics":
            image = load_image(args.image)
            report = evaluate(image, args.n_peaks, cc_s=image.meta.get("runtime_s", 0.0),
                              stages=image.meta.get("stages"))
            print(json.dumps(report.to_dict(), indent=2))
        elif args.command == "compare":
            report = run_compare(scenario, args.pipelines, args.autofocus)
            table = format_table(report)
            _out(args, "compare.json").write_text(report_json(report) + "\n")
            _out(args, "compare.txt").write_text(table + "\n")
            print(table)
        elif args.command == "export":
            image = load_image(args.image)
            suffix = ".png" if args.mode == "png_db" else ".csv"
            path = _out(args, args.image.with_suffix(suffix).name, args.output)
            export_image(image, path, args.mode, args.dyn_range)
            print(f"wrote {path}")
    except SarError as exc:
        print(f"sarfocus: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"sarfocus: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
