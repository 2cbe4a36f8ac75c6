#!/usr/bin/env python3
"""
gammaspec - spectra, sheaves and homological invariants of finite ternary Gamma-semirings.
Reads a semiring from a JSON file or a bundled preset, runs one command and
prints its report on stdout. Logs go to stderr.
"""
import os
import sys
import logging
import argparse
from typing import List, Optional

from dotenv import load_dotenv

from handlers import CommandResult
from handlers.cohomology import cmd_cech
from handlers.golden import cmd_paper_check
from handlers.homological import cmd_tensor, cmd_tor
from handlers.localize import cmd_localize
from handlers.sheaf import cmd_sections
from handlers.spectrum import cmd_spectrum
from handlers.verify import cmd_table, cmd_verify
from utils import EXIT_REFUSED, GammaSpecError
from utils.config import AdditionRule, Coupling, RunConfig
from utils.loaders import load_semiring

# Load environment variables from .env file
load_dotenv()

# Configure logging
logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    level=os.getenv("GAMMASPEC_LOG_LEVEL", "INFO").upper(),
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gammaspec", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--input", default="z12", help="semiring JSON file or preset name (default: z12)")
    parser.add_argument("--format", choices=["json", "dot", "text"], dest="output_format")
    parser.add_argument("--cap-carrier", type=int)
    parser.add_argument("--cap-ideals", type=int)
    parser.add_argument("--cap-stalk", type=int)
    parser.add_argument("--threads", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--coupling", choices=[c.value for c in Coupling])
    parser.add_argument("--addition", choices=[r.value for r in AdditionRule])

    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("verify", help="check every semiring axiom")
    commands.add_parser("spectrum", help="ideals, primes and the Zariski topology")

    table = commands.add_parser("table", help="print the slice b -> {a b c}_gamma")
    table.add_argument("--gamma", help="gamma name or index (default: the first)")
    table.add_argument("-c", type=int, default=1)
    table.add_argument("--rows", type=int, nargs="+")

    localize = commands.add_parser("localize", help="localize at a system or a prime")
    localize.add_argument("--system", type=int, nargs="+")
    localize.add_argument("--prime", type=int, help="index into the spectrum")
    localize.add_argument("--generate", action="store_true", help="close --system under products first")

    sections = commands.add_parser("sections", help="sections over basic opens and the sheaf axioms")
    sections.add_argument("--elements", type=int, nargs="+")

    cech = commands.add_parser("cech", help="Cech cohomology of a basic cover")
    cech.add_argument("--cover", type=int, nargs="+", required=True, help="elements a whose D(a) form the cover")
    cech.add_argument("--module", type=int, help="coefficients in Z/module instead of T")

    for name, text in (("tensor", "Z/m1 (x) Z/m2"), ("tor", "Tor_1(Z/m1, Z/m2)")):
        sub = commands.add_parser(name, help=text)
        sub.add_argument("m1", type=int)
        sub.add_argument("m2", type=int)

    commands.add_parser("golden-check", aliases=["paper-check"], help="replay the worked Z/12 and Z/4 claims")
    return parser


def dispatch(config: RunConfig, args: argparse.Namespace) -> CommandResult:
    T = load_semiring(args.input, config)
    logger.info(f"Loaded {T.describe()}")
    command = args.command
    if command == "verify":
        return cmd_verify(config, T)
    if command == "spectrum":
        return cmd_spectrum(config, T)
    if command == "table":
        return cmd_table(config, T, args.gamma or T.gamma_names[0], args.c, args.rows)
    if command == "localize":
        return cmd_localize(config, T, args.system, args.prime, args.generate)
    if command == "sections":
        return cmd_sections(config, T, args.elements)
    if command == "cech":
        return cmd_cech(config, T, args.cover, args.module)
    if command == "tensor":
        return cmd_tensor(config, T, args.m1, args.m2)
    if command == "tor":
        return cmd_tor(config, T, args.m1, args.m2)
    return cmd_paper_check(config, T)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and print its report."""
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig.from_env().override(
            command=args.command,
            input_path=args.input,
            output_format=args.output_format,
            cap_carrier=args.cap_carrier,
            cap_ideals=args.cap_ideals,
            cap_stalk=args.cap_stalk,
            threads=args.threads,
            seed=args.seed,
            coupling=args.coupling,
            addition=args.addition,
        )
        logger.info(f"Running {args.command} with seed {config.seed} on {config.threads} thread(s)")
        result = dispatch(config, args)
    except GammaSpecError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return getattr(e, "exit_code", EXIT_REFUSED)

    if result.output:
        sys.stdout.write(result.output if result.output.endswith("\n") else result.output + "\n")
    return result.exit_code


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("gammaspec stopped by user")
        sys.exit(130)
