"""Command-line interface: detect, generate, bench and fitdist subcommands.

Defaults come from the shipped parameter file; a user parameter file
(--params) overrides the defaults and flags override both. Output
directory and worker count also honour the BLOBTRACK_OUTPUT_DIR and
BLOBTRACK_WORKERS environment variables.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .config import build_params, load_parameter_file
from .container import ContainerReader, write_results
from .detect import fit_distribution
from .errors import BlobtrackError
from .mesh import RegionOfInterest
from .pipeline import (
    RunConfig,
    benchmark,
    format_scaling_table,
    format_timing_report,
    run,
)
from .synthetic import generate_synthetic

USAGE_EXIT = 2
FAILURE_EXIT = 1

_PARAM_FLAGS = [
    # (flag, section, key, type, help)
    ("--alpha", "detection", "alpha", float, "first-stage sigma multiplier"),
    ("--beta", "detection", "beta", float, "second-stage sigma multiplier"),
    ("--min-abs-density", "detection", "min_abs_density", float,
     "absolute normalized-density floor"),
    ("--min-rel-density", "detection", "min_rel_density", float,
     "relative density floor (multiplier of the stage-2 mean)"),
    ("--pooling", "detection", "pooling", str,
     "stats pooling: per-plane or pooled-across-planes"),
    ("--min-area", "blobs", "min_area", int, "minimum blob vertex count"),
    ("--median-abs-min", "blobs", "median_abs_min", float,
     "absolute median-density floor"),
    ("--median-rel-min", "blobs", "median_rel_min", float,
     "relative median-density multiplier"),
    ("--median-abs-max", "blobs", "median_abs_max", float,
     "cap on the relative median criterion"),
    ("--max-jump", "tracking", "max_jump", float,
     "maximum center distance between consecutive frames"),
    ("--max-area-change", "tracking", "max_area_change", float,
     "maximum area change between consecutive frames"),
    ("--min-frames", "tracking", "min_frames", int,
     "shortest reportable track"),
    ("--max-frames", "tracking", "max_frames", int, "longest track"),
    ("--area-gate-mode", "tracking", "area_gate_mode", str,
     "area gate mode: absolute or relative"),
    ("--refine-levels", "mesh", "refine_levels", int,
     "mesh refinement levels (0 disables refinement)"),
]


def _add_param_flags(parser, defaults):
    for flag, section, key, typ, help_text in _PARAM_FLAGS:
        parser.add_argument(
            flag,
            type=typ,
            default=None,
            help=f"{help_text} (default {defaults[section][key]})",
        )


def _merge_param_flags(params, args):
    for flag, section, key, _, _ in _PARAM_FLAGS:
        value = getattr(args, flag.lstrip("-").replace("-", "_"))
        if value is not None:
            params[section][key] = value
    return params


def _add_run_flags(parser):
    parser.add_argument("--input", required=True, help="frame container path")
    parser.add_argument("--rmin", type=float, help="ROI lower r bound")
    parser.add_argument("--rmax", type=float, help="ROI upper r bound")
    parser.add_argument("--zmin", type=float, help="ROI lower z bound")
    parser.add_argument("--zmax", type=float, help="ROI upper z bound")
    parser.add_argument("--t-start", type=int, default=1,
                        help="first time index to analyze (default 1)")
    parser.add_argument("--t-end", type=int, default=None,
                        help="last time index, inclusive (default: end of data)")
    parser.add_argument("--workers", type=int,
                        default=int(os.environ.get("BLOBTRACK_WORKERS", "1")),
                        help="parallel frame workers (default 1, env BLOBTRACK_WORKERS)")


def _roi_from_args(args):
    bounds = (args.rmin, args.rmax, args.zmin, args.zmax)
    if all(b is None for b in bounds):
        return None
    if any(b is None for b in bounds):
        raise BlobtrackError(
            "all of --rmin --rmax --zmin --zmax are required for an ROI"
        )
    return RegionOfInterest(args.rmin, args.rmax, args.zmin, args.zmax)


def _output_dir(args):
    out = args.output_dir or os.environ.get("BLOBTRACK_OUTPUT_DIR", ".")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def build_parser():
    defaults = load_parameter_file()
    parser = argparse.ArgumentParser(
        prog="blobtrack",
        description="Detect and track coherent density structures on "
        "triangular meshes.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_detect = sub.add_parser("detect", help="run detection and tracking")
    _add_run_flags(p_detect)
    p_detect.add_argument("--params", help="TOML parameter file overriding defaults")
    p_detect.add_argument("--output-dir", help="results directory "
                          "(default ., env BLOBTRACK_OUTPUT_DIR)")
    p_detect.add_argument("--prefix", default="blobtrack",
                          help="results file prefix (default blobtrack)")
    p_detect.add_argument("-v", "--verbose", action="store_true")
    _add_param_flags(p_detect, defaults)

    p_gen = sub.add_parser("generate", help="write a synthetic container")
    p_gen.add_argument("--output", required=True, help="container path to write")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--bumps", type=int, default=3)
    p_gen.add_argument("--frames", type=int, default=64)
    p_gen.add_argument("--amplitude", type=float, default=3.0,
                       help="peak normalized density of each bump")
    p_gen.add_argument("--width", type=float, default=0.05)
    p_gen.add_argument("--noise", type=float, default=0.01)
    p_gen.add_argument("--drift-r", type=float, default=0.02)
    p_gen.add_argument("--drift-z", type=float, default=0.0)
    p_gen.add_argument("--spacing", type=float, default=0.02)
    p_gen.add_argument("--text", action="store_true",
                       help="write the text payload encoding")

    p_bench = sub.add_parser("bench", help="strong/weak scaling sweep")
    _add_run_flags(p_bench)
    p_bench.add_argument("--params", help="TOML parameter file overriding defaults")
    p_bench.add_argument("--mode", choices=["strong", "weak"], default="strong")
    p_bench.add_argument("--worker-list", default="1,2,4,8",
                         help="comma-separated worker counts (default 1,2,4,8)")
    p_bench.add_argument("--frames-per-worker", type=int, default=32,
                         help="weak-scaling frames per worker (default 32)")
    p_bench.add_argument("--output-dir", help="where to write the scaling table")
    _add_param_flags(p_bench, defaults)

    p_fit = sub.add_parser("fitdist", help="exploratory distribution fit")
    p_fit.add_argument("--input", required=True, help="frame container path")
    p_fit.add_argument("--t", type=int, default=1, help="time index to fit")
    p_fit.add_argument("--baseline-t", type=int, default=0)
    return parser


def _cmd_detect(args):
    params = _merge_param_flags(load_parameter_file(args.params), args)
    detection, blobs, tracking, levels = build_params(params)
    config = RunConfig(
        input_path=args.input,
        roi=_roi_from_args(args),
        t_start=args.t_start,
        t_end=args.t_end,
        worker_count=args.workers,
        refine_levels=levels,
        detection=detection,
        blobs=blobs,
        tracking=tracking,
    )
    result = run(config)
    out = _output_dir(args)
    paths = write_results(result.blobs_per_frame, result.tracks, out / args.prefix)
    timing_path = out / (args.prefix + "_timing.tsv")
    timing_path.write_text(format_timing_report(result.timing))
    n_blobs = sum(len(b) for b in result.blobs_per_frame.values())
    print(
        f"{len(result.blobs_per_frame)} frames, {n_blobs} blobs, "
        f"{len(result.tracks)} tracks -> {paths[0].parent}"
    )
    if args.verbose and result.skipped_frames:
        for t, msg in sorted(result.skipped_frames.items()):
            print(f"skipped frame {t}: {msg}", file=sys.stderr)
    return 0


def _cmd_generate(args):
    dataset = generate_synthetic(
        bump_count=args.bumps,
        frames=args.frames,
        seed=args.seed,
        noise_sigma=args.noise,
        amplitude=args.amplitude,
        width=args.width,
        drift=(args.drift_r, args.drift_z),
        spacing=args.spacing,
    )
    path = dataset.write(args.output, encoding="text" if args.text else "binary")
    print(
        f"wrote {path}: {dataset.frames.shape[0]} frames, "
        f"{dataset.mesh.vertex_count} vertices, {args.bumps} bumps"
    )
    return 0


def _cmd_bench(args):
    params = _merge_param_flags(load_parameter_file(args.params), args)
    detection, blobs, tracking, levels = build_params(params)
    config = RunConfig(
        input_path=args.input,
        roi=_roi_from_args(args),
        t_start=args.t_start,
        t_end=args.t_end,
        refine_levels=levels,
        detection=detection,
        blobs=blobs,
        tracking=tracking,
    )
    workers = [int(w) for w in args.worker_list.split(",") if w]
    rows = benchmark(
        config, workers, mode=args.mode, frames_per_worker=args.frames_per_worker
    )
    table = format_scaling_table(rows, args.mode)
    print(table, end="")
    if args.output_dir:
        out = _output_dir(args)
        (out / f"scaling_{args.mode}.tsv").write_text(table)
    return 0


def _cmd_fitdist(args):
    reader = ContainerReader(args.input)
    baseline = reader.read_frame(args.baseline_t, 0).values
    values = reader.read_frame(args.t, 0).values / baseline
    report = fit_distribution(values[values > 0])
    ev, ln = report["extreme-value"], report["log-normal"]
    print(f"extreme-value: loc={ev['loc']:.6g} scale={ev['scale']:.6g} "
          f"loglik={ev['log_likelihood']:.6g}")
    print(f"log-normal: mu={ln['mu']:.6g} sigma={ln['sigma']:.6g} "
          f"loglik={ln['log_likelihood']:.6g}")
    print(f"best fit: {report['best']}")
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return exc.code if exc.code is not None else 0
    try:
        if args.command == "detect":
            return _cmd_detect(args)
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "fitdist":
            return _cmd_fitdist(args)
        parser.error(f"unknown command {args.command!r}")
    except BlobtrackError as exc:
        print(f"blobtrack: {exc}", file=sys.stderr)
        return FAILURE_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
