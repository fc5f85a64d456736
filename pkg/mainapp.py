import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Optional

from config import get_settings
from helpers import exit_code_for

# Import commands
from commands import bench, check, gen, synthesize, validate, verify

logger = logging.getLogger(__name__)

COMMANDS = {
    "validate": validate,
    "synthesize": synthesize,
    "verify": verify,
    "check": check,
    "gen": gen,
    "bench": bench,
}


# -------------------- Configuration --------------------
@dataclass(frozen=True)
class CliConfig:
    command: str
    input: Optional[str] = None
    output: Optional[str] = None
    spec: Optional[str] = None
    log: Optional[str] = None
    corpus: Optional[str] = None
    fmt: str = "text"
    report_format: str = "text"
    mode: str = "constraint-count"
    force: bool = False
    alphabet_policy: str = "error"
    sort_by_time: bool = False
    json: bool = False
    state_limit: int = 1_000_000
    iterations: int = 200
    audit_every: int = 10
    audit_state_limit: int = 200_000
    sample_cap: int = 20
    log_level: str = "WARNING"


def build_parser(settings):
    """Argument parser with one subparser per command"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", metavar="PATH", help="input PNML net (or specification for check)")
    common.add_argument("--out", dest="output", metavar="PATH", help="output file or folder; default standard output")
    common.add_argument("--json", action="store_true", help="machine-readable result on standard output")
    common.add_argument("--state-limit", type=int, default=settings.state_limit, metavar="N")
    common.add_argument("--force", action="store_true", help="synthesize even when the net is not safe and sound")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="count", default=0, help="INFO, or DEBUG when repeated")
    verbosity.add_argument("--quiet", action="store_true", help="errors only")

    parser = argparse.ArgumentParser(prog="wf2declare",
                                     description="Declare specifications from safe and sound Workflow nets")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="structural, safety and soundness report")
    p.add_argument("--format", dest="fmt", choices=["text", "dot"], default="text")

    p = sub.add_parser("synthesize", parents=[common], help="write the Declare specification of a net")
    p.add_argument("--format", dest="fmt", choices=["text", "json", "dot"], default="text")

    p = sub.add_parser("verify", parents=[common], help="check net and specification automata are equivalent")
    p.add_argument("--spec", metavar="PATH", help="specification to verify instead of the synthesized one")

    p = sub.add_parser("check", parents=[common], help="fitness of an event log per constraint")
    p.add_argument("--log", metavar="PATH", help="CSV (case,activity[,timestamp]) or XES event log")
    p.add_argument("--report-format", choices=["text", "json", "xlsx"], default="text")
    p.add_argument("--alphabet-policy", choices=["error", "skip-event", "skip-trace"], default="error")
    p.add_argument("--sort-by-time", action="store_true")
    p.add_argument("--sample-cap", type=int, default=settings.sample_cap, metavar="N")

    for name, help_text in (("gen", "write a corpus of expanded nets as PNML"),
                            ("bench", "time synthesis along an expansion chain")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--mode", choices=["constraint-count", "formula-size"], default="constraint-count")
        p.add_argument("--iterations", type=int, default=settings.bench_iterations if name == "bench" else 3,
                       metavar="N")
        if name == "bench":
            p.add_argument("--audit-every", type=int, default=settings.audit_every, metavar="N")
            p.add_argument("--audit-state-limit", type=int, default=settings.audit_state_limit, metavar="N")
            p.add_argument("--corpus", metavar="DIR", help="measure every .pnml in DIR instead")
    return parser


def to_config(args, settings):
    """Parsed arguments layered over the environment settings"""
    values = {key: value for key, value in vars(args).items() if key in CliConfig.__dataclass_fields__}
    level = settings.log_level
    if args.quiet:
        level = "ERROR"
    elif args.verbose:
        level = "DEBUG" if args.verbose > 1 else "INFO"
    return CliConfig(log_level=level, **values)


# -------------------- Entry Point --------------------
def main(argv=None):
    """Run one subcommand and return its exit code"""
    settings = get_settings()
    parser = build_parser(settings)
    args = parser.parse_args(argv)
    config = to_config(args, settings)

    logging.basicConfig(level=getattr(logging, config.log_level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr, force=True)

    try:
        return COMMANDS[config.command].run(config)
    except Exception as e:
        code = exit_code_for(e)
        if code is None:
            raise
        logger.debug("command %s failed", config.command, exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
