"""Command-line entry point: ``python -m optdual`` or ``optdual-experiment``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiment import load_config, run_experiment, spec_from_options

_FLAGS = [
    ("--experiment", str, "gabor, spike_fourier or custom"),
    ("--trials", int, "number of trials"),
    ("--seed", int, "base seed; trial t uses streams (seed, t, *)"),
    ("--m", int, "measurements"),
    ("--n", int, "signal length"),
    ("--oversampling", int, "Gabor redundancy d/n"),
    ("--window-std", float, "Gabor window width in samples"),
    ("--time-shifts", int, "Gabor time shifts K (default n/2)"),
    ("--sparsity", int, "nonzeros per signal"),
    ("--block-sparsity", str, "per-block nonzeros, e.g. 4,4"),
    ("--eps", float, "noise bound"),
    ("--lambda", float, "splitting penalty"),
    ("--mu", float, "data-fit penalty"),
    ("--tol", float, "residual tolerance"),
    ("--n-inner", int, "inner sweeps per outer step"),
    ("--n-outer", int, "outer step cap"),
    ("--phi-variance", str, "sensing entry variance (number or 1/m)"),
    ("--dictionary", str, "dictionary container for --experiment custom"),
    ("--workers", int, "worker processes"),
    ("--out", str, "output directory"),
]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="optdual-experiment",
        description="Compare l1-synthesis and canonical l1-analysis over random trials.",
    )
    p.add_argument("--config", help="key = value config file; flags override it")
    for flag, typ, help_ in _FLAGS:
        p.add_argument(flag, type=typ, default=None, help=help_)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    opts = load_config(args.config) if args.config else {}
    for flag, _, _ in _FLAGS:
        key = flag.lstrip("-").replace("-", "_")
        value = getattr(args, key)
        if value is not None:
            opts[key] = value
    try:
        spec = spec_from_options(opts)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    records, summary = run_experiment(spec)
    print(json.dumps(summary, indent=1))
    return 0 if summary["failed"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
