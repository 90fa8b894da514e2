"""Command line entry point: ``superconv <suite> [options]``.

Exit status is 0 on success, 2 when some refinement level failed (jitter
guard, unsolvable system) or a Green check did not pass, and 1 on fatal
errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiments
from .green import verify_green
from .kernels import KERNEL_IDS
from .targets import TARGET_IDS

SUBCOMMANDS = {
    "sobolev-rates": "sobolev-rates",
    "saturation": "saturation",
    "boundary-conditions": "boundary-conditions",
    "periodic": "periodic",
    "expansion": "expansion-superconvergence",
}


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _strings(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def load_config_file(path) -> dict:
    """Read a JSON or YAML mapping of ExperimentConfig fields."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".yaml", ".yml"):
        import yaml

        data = yaml.safe_load(text) or {}
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a mapping")
    return data


def _add_suite_options(p):
    p.add_argument("--config", help="JSON or YAML file with config fields")
    p.add_argument("--kernel", choices=KERNEL_IDS)
    p.add_argument("--d", type=int, choices=(1, 2))
    p.add_argument("--alphas", type=_floats, help="comma-separated alpha grid")
    p.add_argument("--nodes", type=_ints, help="comma-separated node counts per dimension")
    p.add_argument("--eval-grid", type=int, help="evaluation grid points per dimension")
    p.add_argument("--include-boundary", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--targets", type=_strings, help="comma-separated bc targets (bc1,bc2,bc3)")
    p.add_argument("--replicates", type=int)
    p.add_argument("--full", action="store_true", help="100 replicates (periodic suite)")
    p.add_argument("--seed", type=int)
    p.add_argument("--drop-fraction", type=float)
    p.add_argument("--terms", type=int, help="Fourier terms of random periodic targets")
    p.add_argument("--expansion-sites", type=int)
    p.add_argument("--w22-resolution", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("-o", "--output", help="output file (records CSV or JSON document)")
    p.add_argument("--format", choices=("csv", "json"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="superconv", description=__doc__.splitlines()[0])
    parser.add_argument("--list-kernels", action="store_true", help="print kernel identifiers")
    parser.add_argument("--list-targets", action="store_true", help="print target identifiers")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")
    for name in SUBCOMMANDS:
        _add_suite_options(sub.add_parser(name, help=f"run the {name} suite"))
    green = sub.add_parser("verify-green", help="Green-kernel residual and reproducing checks")
    green.add_argument("--seed", type=int, default=0)
    green.add_argument("--w22-resolution", type=int, default=256)
    return parser


def config_from_args(args) -> experiments.ExperimentConfig:
    data = load_config_file(args.config) if args.config else {}
    data["suite"] = SUBCOMMANDS[args.command]
    for key in (
        "kernel", "d", "alphas", "nodes", "eval_grid", "include_boundary", "targets",
        "replicates", "seed", "drop_fraction", "terms", "expansion_sites",
        "w22_resolution", "workers", "output", "format",
    ):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    if args.full:
        data["replicates"] = 100
    return experiments.ExperimentConfig.from_dict(data)


def print_rates(result, out=None):
    out = out or sys.stdout
    cfg = result.config
    print(f"# {cfg['suite']}  kernel={cfg['kernel']}  d={cfg['d']}", file=out)
    rows = list(experiments.rate_rows(result))
    print(f"{'target':>16} {'alpha':>8} {'seed':>5} {'norm':>6} {'rate':>8} {'r2':>7} {'levels':>6}", file=out)
    for _, _, _, target, alpha, seed, norm, rate, r2, levels, unstable in rows:
        seed = "" if seed is None else seed
        flag = "  (integer alpha, unstable)" if unstable else ""
        print(
            f"{target:>16} {alpha:8.4f} {seed!s:>5} {norm:>6} {rate:8.4f} {r2:7.4f} {levels:6d}{flag}",
            file=out,
        )
    if result.summary:
        print("# mean over replicates", file=out)
        for row in result.summary:
            print(
                f"{row['target']:>16} {row['alpha']:8.4f} {row['norm']:>6} "
                f"mean={row['mean']:.4f} std={row['std']:.4f} (R={row['replicates']})",
                file=out,
            )
    for w in result.warnings:
        print(f"warning: {w}", file=out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR)
    if args.list_kernels:
        print("\n".join(KERNEL_IDS))
        return 0
    if args.list_targets:
        print("\n".join(TARGET_IDS))
        return 0
    if args.command is None:
        parser.print_help()
        return 1
    try:
        if args.command == "verify-green":
            checks = verify_green(seed=args.seed, resolution=args.w22_resolution)
            for c in checks:
                status = "ok  " if c.passed else "FAIL"
                print(f"{status} {c.name:<58} {c.value:12.3e} {c.comparison} {c.tolerance:.0e}")
            return 0 if all(c.passed for c in checks) else 2
        config = config_from_args(args)
        result = experiments.run(config)
        print_rates(result)
        if config.output:
            for path in experiments.emit(result, config.format, config.output):
                print(f"wrote {path}")
        return 2 if result.level_failures else 0
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
