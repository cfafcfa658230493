"""Command-line front end.

Three subcommands:

* ``encode`` — run the encoder sweep on a sequence and write CSVs.
* ``bd``     — compare two RD CSVs with Bjontegaard deltas.
* ``plot``   — reshape an RD CSV into per-engine plot tables.

Flags override config-file values; exit status is 0 on success and 1
with a diagnostic on stderr for any failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace

from .codec.encoder import ENGINES
from .codec.metrics import RDPoint, bd_metrics
from .config import ExperimentConfig, load
from .experiment import emit_plot_data, run_experiment


def _parse_qsteps(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad qstep list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specrefine",
        description="Sparse spectral refinement of motion-compensated prediction.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    encode = commands.add_parser("encode", help="encode a sequence and emit RD/timing/BD CSVs")
    encode.add_argument("--input", help="Y4M file, raw YUV file, or PGM directory")
    encode.add_argument("--config", help="key = value config file (flags win)")
    encode.add_argument(
        "--engine",
        action="append",
        choices=ENGINES,
        help="engine to run; repeat the flag for several",
    )
    encode.add_argument("--qsteps", type=_parse_qsteps, help="comma-separated ladder, e.g. 2,4,8")
    encode.add_argument("--frames", type=int, help="number of P-frames to encode")
    encode.add_argument("--out", help="output directory")
    encode.add_argument("--mu", type=float, help="target-block weight")
    encode.add_argument("--rho", type=float, help="neighbor decay base")
    encode.add_argument("--tau", type=float, help="relaxed-selection threshold")
    encode.add_argument("--iters", type=int, help="iteration count for the selected engines")
    encode.add_argument("--cap", type=int, help="max atoms per relaxed iteration")
    encode.add_argument("--search-range", type=int, help="motion search range in samples")
    encode.add_argument("--block-size", type=int, help="macroblock size in samples")
    encode.add_argument("--width", type=int, help="frame width (raw YUV only)")
    encode.add_argument("--height", type=int, help="frame height (raw YUV only)")
    encode.add_argument("--fps", type=float, help="frame rate used by the kbit/s proxy")

    bd = commands.add_parser("bd", help="Bjontegaard deltas between two RD CSVs")
    bd.add_argument("--base", required=True, help="anchor RD CSV")
    bd.add_argument("--test", required=True, help="test RD CSV")

    plot = commands.add_parser("plot", help="emit per-engine plot tables from an RD CSV")
    plot.add_argument("--csv", required=True, help="RD CSV produced by encode")
    plot.add_argument("--out-dir", help="directory for the .dat files (default: beside the CSV)")
    return parser


def _encode_config(args: argparse.Namespace) -> ExperimentConfig:
    config = load(args.config) if args.config else ExperimentConfig()
    overrides = {
        "input": args.input,
        "engines": tuple(args.engine) if args.engine else None,
        "qsteps": args.qsteps,
        "frames": args.frames,
        "output_dir": args.out,
        "mu": args.mu,
        "rho_hat": args.rho,
        "tau": args.tau,
        "max_per_iteration": args.cap,
        "search_range": args.search_range,
        "block_size": args.block_size,
        "width": args.width,
        "height": args.height,
        "fps": args.fps,
    }
    if args.iters is not None:
        overrides["fsa_iterations"] = args.iters
        overrides["ba_iterations"] = args.iters
        overrides["rba_iterations"] = args.iters
    config = replace(config, **{k: v for k, v in overrides.items() if v is not None})
    if not config.input:
        raise ValueError("no input: pass --input or put it in the config file")
    return config


def _read_rd_points(path: str) -> list[RDPoint]:
    points = []
    with open(path, newline="", encoding="utf-8") as source:
        reader = csv.reader(source)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty CSV")
        for row in reader:
            if not row or row[0] == "FAILURE":
                continue
            points.append(RDPoint(float(row[2]), float(row[3])))
    if not points:
        raise ValueError(f"{path}: no RD points")
    return points


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "encode":
            outputs = run_experiment(_encode_config(args))
            for name in sorted(outputs):
                print(f"{name}: {outputs[name]}")
        elif args.command == "bd":
            rate_pct, psnr_db = bd_metrics(
                _read_rd_points(args.base), _read_rd_points(args.test)
            )
            print(f"bd_rate_reduction_pct: {rate_pct:.4f}")
            print(f"bd_psnr_gain_db: {psnr_db:.4f}")
        else:
            for path in emit_plot_data(args.csv, args.out_dir):
                print(path)
    except Exception as exc:  # CLI boundary: report, do not traceback.
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
