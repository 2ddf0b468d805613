"""``restore`` command line entry point.

Exit codes: 0 success, 1 unreadable input or I/O failure, 2 partial batch
failure, 3 config error, 4 solver divergence, 5 unsupported image format.
"""

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import config as cfg
from .admm import SolverDivergence
from .pipeline import EmptyBatch, ImageReadError, UnsupportedFormat, run_batch, run_single

EXIT_OK = 0
EXIT_IO = 1
EXIT_PARTIAL = 2
EXIT_CONFIG = 3
EXIT_DIVERGED = 4
EXIT_UNSUPPORTED = 5


def build_parser():
    parser = argparse.ArgumentParser(
        prog="restore",
        description="Restore underwater images by color correction, illumination and "
                    "transmission estimation, then a variational reflectance solve.")
    parser.add_argument("input", nargs="?", help="image file, or a directory with --batch")
    parser.add_argument("-o", "--output",
                        help="output PNG (single mode) or output directory (batch mode)")
    parser.add_argument("-c", "--config", help="config file with section.key = value lines")
    parser.add_argument("--report", help="write a JSON report to this path")
    parser.add_argument("--dump-intermediates", action="store_true",
                        help="also write every stage as a PNG")
    parser.add_argument("--batch", action="store_true", help="process every image in a directory")
    parser.add_argument("--reference", help="reference image (or directory in batch mode) for CIEDE2000")
    parser.add_argument("--print-config", action="store_true",
                        help="print the effective config and exit")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _single(args, conf):
    run = run_single(args.input, conf, output=args.output, reference=args.reference,
                     report=args.report)
    m = run.metrics
    line = f"{run.output}: entropy={m.entropy:.4f} uciqe={m.uciqe:.4f}"
    if m.ciede2000 is not None:
        line += f" ciede2000={m.ciede2000:.4f}"
    line += f" iterations={run.restoration.iterations} converged={run.restoration.converged}"
    print(line)
    return EXIT_OK


def _batch(args, conf):
    result = run_batch(args.input, conf, out_dir=args.output, reference_dir=args.reference)
    if args.report:
        Path(args.report).write_text(json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n",
                                     encoding="utf-8")
    print(f"{len(result.rows)} restored, {len(result.failures)} failed; summary in {result.csv_path}")
    if not result.rows:
        return EXIT_IO
    return EXIT_PARTIAL if result.partial else EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.input is None and not args.print_config:
        parser.error("the following arguments are required: input")
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        conf = cfg.load(args.config) if args.config else cfg.PipelineConfig()
        if args.dump_intermediates:
            conf = conf.replace(output=dataclasses.replace(conf.output, dump_intermediates=True))
    except cfg.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.print_config:
        print(cfg.serialize(conf))
        return EXIT_OK

    try:
        if args.batch:
            return _batch(args, conf)
        return _single(args, conf)
    except SolverDivergence as exc:
        print(f"solver diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except UnsupportedFormat as exc:
        print(f"unsupported input: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ImageReadError, EmptyBatch, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
