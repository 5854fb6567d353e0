"""
Command-line interface for gaplab.

Subcommands: eigen, robin, modulus, flow, verify-gap, sweep. Every run writes
its files and a manifest.json below the output directory.

Exit status: 0 when every verdict passed, 1 when a verdict failed and 2 on a
gaplab error (bad config, solver failure).
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path

from . import __version__
from .exceptions import GapLabError
from .harness import PIPELINES, write_manifest
from .models.config import RunConfig
from .utils import canonical_json, load_json_file

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--n", type=int, help="dimension n")
    common.add_argument("--D", type=float, help="diameter D in (0, pi)")
    common.add_argument("--k", type=int, nargs="+", help="boundary slopes k")
    common.add_argument("--nodes", type=int, help="grid nodes on [0, D/2]")
    common.add_argument("--t-end", type=float, help="evolution horizon")
    common.add_argument("--tol", type=float, help="flow convergence tolerance")
    common.add_argument("--seed", type=int, help="sampling seed")
    common.add_argument("--out", help="output directory")
    common.add_argument(
        "--print-config",
        action="store_true",
        help="print the effective configuration and exit",
    )
    common.add_argument("--debug", action="store_true", help="enable debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaplab",
        description="Fundamental gap computations on spherical domains",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    helps = {
        "eigen": "mu_0 and mu_1 of the model operator",
        "robin": "Robin eigenfunctions and c(eps)",
        "modulus": "initial and stationary moduli psi_{k,0}, psi~_{k,0}",
        "flow": "end-to-end parabolic flow of the modulus",
        "verify-gap": "gap chain on geodesic balls and two-point sampling",
        "sweep": "model gap bound over the (n, D) sweep",
    }
    for name in PIPELINES:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def configure_logging(debug: bool) -> None:
    """Install a stderr handler; DEBUG for gaplab when requested."""
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    logging.getLogger("gaplab").setLevel(logging.DEBUG if debug else logging.WARNING)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then command-line flags."""
    cfg = RunConfig.from_dict(load_json_file(args.config)) if args.config else RunConfig()
    cfg = cfg.override(
        n=args.n,
        D=args.D,
        k_list=tuple(args.k) if args.k else None,
        grid_nodes=args.nodes,
        t_end=args.t_end,
        seed=args.seed,
        output_dir=args.out,
    )
    if args.tol is not None:
        cfg = replace(cfg, tolerances={**cfg.tolerances, "flow": args.tol})
    return cfg.validate()


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``gaplab`` console script."""
    args = build_parser().parse_args(argv)
    configure_logging(args.debug)
    try:
        cfg = resolve_config(args)
        if args.print_config:
            sys.stdout.write(canonical_json(cfg.to_dict()))
            return 0
        out = Path(cfg.output_dir)
        result = PIPELINES[args.command](cfg, out)
        manifest = write_manifest(out, args.command, cfg, result)
    except GapLabError as e:
        print(f"gaplab: error: {e}", file=sys.stderr)
        return 2

    failed = sorted(k for k, ok in manifest.verdicts.items() if not ok)
    for key in failed:
        print(f"FAILED {key}", file=sys.stderr)
    print(
        f"{args.command}: {len(manifest.verdicts) - len(failed)}/"
        f"{len(manifest.verdicts)} verdicts passed, {len(manifest.files)} files "
        f"in {out}"
    )
    return 0 if manifest.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
