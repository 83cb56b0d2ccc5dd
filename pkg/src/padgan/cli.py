"""Command line entry point: ``padgan run | eval | plot``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .datasets import preset as get_preset
from .datasets import read_points_csv
from .evaluation import score_samples
from .experiment import ConfigError, load_config, run_experiment
from .plotting import plot_density

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padgan", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train and score every variant/run of an experiment")
    run.add_argument("config", nargs="?", help="INI experiment config")
    run.add_argument("--preset")
    run.add_argument("--variant", help="comma-separated variants")
    run.add_argument("--runs", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.add_argument("--workers", type=int)

    ev = sub.add_parser("eval", help="score a samples CSV against a preset")
    ev.add_argument("samples")
    ev.add_argument("--preset", required=True)
    ev.add_argument("--seed", type=int, default=0, help="seed for diversity subsets")
    ev.add_argument("--subset-size", type=int, default=10)
    ev.add_argument("--n-subsets", type=int, default=1000)
    ev.add_argument("--json", help="write the report here instead of stdout")

    pl = sub.add_parser("plot", help="render a density SVG from a samples CSV")
    pl.add_argument("samples")
    pl.add_argument("--preset", required=True)
    pl.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    try:
        if args.command == "run":
            config = load_config(
                args.config,
                preset=args.preset,
                variants=args.variant,
                runs=args.runs,
                seed=args.seed,
                out=args.out,
                workers=args.workers,
            )
        else:
            preset = get_preset(args.preset)
    except (ConfigError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "run":
        return run_experiment(config)

    try:
        samples = read_points_csv(args.samples)
    except (OSError, ValueError) as exc:
        print(f"cannot read {args.samples}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "eval":
        report = score_samples(
            samples, preset.quality, preset.descriptor,
            subset_size=args.subset_size, n_subsets=args.n_subsets, seed=args.seed,
        )
        if args.json:
            with open(args.json, "w") as fh:
                fh.write(report.to_json())
        else:
            print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
        return EXIT_OK

    plot_density(samples, preset, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
