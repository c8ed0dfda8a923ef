"""Command line entry point: one subcommand per registered task."""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import harness, sieve, tasks  # noqa: F401  (tasks populates the registry)

_FLOATS = {"epsilon", "alpha"}
_STRINGS = {"forms"}
_SWITCHES = {"all"}

_HELP = {
    "from": "first key of the scanned range",
    "to": "last key of the scanned range (inclusive)",
    "k": "modulus of the residue class",
    "l": "residue of the class",
    "d": "second modulus",
    "a": "residue modulo d",
    "m": "single m",
    "n": "single n",
    "p": "odd prime",
    "epsilon": "exponent slack in (0, 0.5)",
    "alpha": "exponent of the log^alpha n correction",
    "bound": "search or scan bound",
    "exponent": "exponent k in n^k / m^k",
    "target": "even target",
    "w": "class index; target = 2(k w + l)",
    "count": "number of primes to generate",
    "forms": "linear forms as 'a,b;a,b;...'",
    "all": "list every decomposition instead of the first",
    "width": "largest phi(n) the permutation search accepts",
}


def _flag_kwargs(name: str) -> dict:
    if name in _SWITCHES:
        return {"action": "store_true"}
    kind = float if name in _FLOATS else str if name in _STRINGS else int
    return {"type": kind, "default": None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aplab", description=__doc__)
    sub = parser.add_subparsers(dest="task", required=True, metavar="TASK")
    for name, task in sorted(harness.TASKS.items()):
        sp = sub.add_parser(name, help=f"{name} report keyed by {task.key_name}")
        for param in task.params:
            sp.add_argument(f"--{param}", dest=f"p_{param}", help=_HELP.get(param),
                            **_flag_kwargs(param))
        sp.add_argument("--format", choices=harness.FORMATS, default="csv")
        sp.add_argument("--out", help="report path (default: stdout)")
        sp.add_argument("--checkpoint", help="checkpoint path; resumes if it exists")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--sieve-limit", type=int, default=sieve.DEFAULT_CEILING)
        sp.add_argument("--timing", action="store_true",
                        help="append per-record elapsed_ms (breaks byte-identity)")
    return parser


def config_from_args(args: argparse.Namespace) -> harness.TaskConfig:
    task = harness.TASKS[args.task]
    params = {p: getattr(args, f"p_{p}") for p in task.params}
    return harness.TaskConfig(task=args.task, params=params, fmt=args.format, out=args.out,
                              checkpoint=args.checkpoint, jobs=args.jobs,
                              sieve_limit=args.sieve_limit, timing=args.timing)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return harness.EXIT_USAGE if exc.code else harness.EXIT_OK
    return harness.run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
