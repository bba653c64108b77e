"""Command-line front end reproducing the headline experiments as data files.

Subcommands: ``converge`` (objective trajectories), ``ber-vs-snr`` and
``ber-vs-paths`` (Monte Carlo error-rate sweeps), ``single-run`` (one full
solve dumped as JSON). Exit codes: 0 success, 2 configuration/usage error,
3 solver failure inside a sweep.
"""

from __future__ import annotations

import argparse
import json
import sys

from .beamforming import SolverFailure
from .baselines import SCHEMES
from .config import ConfigError, load_config
from . import experiments

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def parse_seeds(text: str) -> list:
    """Seed list syntax: comma-separated integers and ``start:stop`` ranges."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, hi = part.split(":", 1)
            seeds.extend(range(int(lo), int(hi)))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError(f"no seeds in {text!r}")
    return seeds


def _int_list(text: str) -> list:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list:
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="masm",
        description="Movable-antenna spatial-modulation link design experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="JSON config file (defaults built in)")
        p.add_argument("--seeds", default="0:10", help="e.g. '0,1,2' or '0:50'")
        p.add_argument("--out", required=True, help="output file path")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("converge", help="objective trajectory per (seed, paths, order)")
    common(p)
    p.add_argument("--paths", default=None, help="comma list of path counts")
    p.add_argument("--mods", default=None, help="comma list of constellation orders")

    p = sub.add_parser("ber-vs-snr", help="average BER against SNR per scheme")
    common(p)
    p.add_argument("--schemes", default="ma,fpa,gas", help=f"subset of {','.join(SCHEMES)}")
    p.add_argument("--snr", default=",".join(str(s) for s in experiments.DEFAULT_SNR_GRID_DB))
    p.add_argument("--bits", type=int, default=experiments.DEFAULT_MIN_BITS,
                   help="bits per (channel, scheme, SNR) point before early stop")
    p.add_argument("--max-bits", type=int, default=experiments.DEFAULT_MAX_BITS)
    p.add_argument("--target-errors", type=int, default=experiments.DEFAULT_TARGET_ERRORS)

    p = sub.add_parser("ber-vs-paths", help="average BER against path count at fixed SNR")
    common(p)
    p.add_argument("--schemes", default="ma,fpa,gas")
    p.add_argument("--paths", default="2,4,8,12")
    p.add_argument("--snr", type=float, default=12.0)
    p.add_argument("--bits", type=int, default=experiments.DEFAULT_MIN_BITS)
    p.add_argument("--max-bits", type=int, default=experiments.DEFAULT_MAX_BITS)
    p.add_argument("--target-errors", type=int, default=experiments.DEFAULT_TARGET_ERRORS)

    p = sub.add_parser("single-run", help="one full solve dumped as JSON")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return parser


def _schemes_arg(text: str) -> list:
    schemes = [s.strip() for s in text.split(",") if s.strip()]
    for s in schemes:
        if s not in SCHEMES:
            raise ConfigError(f"unknown scheme {s!r}; expected subset of {SCHEMES}")
    return schemes


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, settings = load_config(args.config)
        if args.command == "converge":
            seeds = parse_seeds(args.seeds)
            rows = experiments.run_converge(
                cfg, settings, seeds,
                paths_list=_int_list(args.paths) if args.paths else None,
                mod_list=_int_list(args.mods) if args.mods else None,
                workers=args.workers,
            )
            experiments.write_csv(
                args.out, ["seed", "n_paths", "mod_order", "iteration", "eta", "wall_ms"],
                rows, cfg, settings, seeds, "converge")
        elif args.command == "ber-vs-snr":
            seeds = parse_seeds(args.seeds)
            rows = experiments.run_ber_vs_snr(
                cfg, settings, _schemes_arg(args.schemes), _float_list(args.snr), seeds,
                min_bits=args.bits, max_bits=args.max_bits,
                target_errors=args.target_errors, workers=args.workers)
            experiments.write_csv(
                args.out, ["scheme", "snr_db", "ber", "ser", "total_bits", "channels"],
                rows, cfg, settings, seeds, "ber-vs-snr")
        elif args.command == "ber-vs-paths":
            seeds = parse_seeds(args.seeds)
            rows = experiments.run_ber_vs_paths(
                cfg, settings, _schemes_arg(args.schemes), _int_list(args.paths),
                args.snr, seeds, min_bits=args.bits, max_bits=args.max_bits,
                target_errors=args.target_errors, workers=args.workers)
            experiments.write_csv(
                args.out, ["scheme", "n_paths", "ber", "ser", "total_bits", "channels"],
                rows, cfg, settings, seeds, "ber-vs-paths")
        elif args.command == "single-run":
            doc = experiments.run_single(cfg, settings, args.seed)
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=1)
                fh.write("\n")
    except (ConfigError, ValueError) as exc:
        print(f"masm: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverFailure as exc:
        print(f"masm: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"masm: i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
