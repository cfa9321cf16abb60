"""``mancalog`` command-line front end.

Exit codes: 0 success / entailed, 1 usage or input error, 2 inconsistent
program, 3 not entailed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

from .bench import DEFAULT_SIZES, bench
from .diagnostics import DiagnosticError
from .dsl import dump_network, export_timeline, format_program, load_program_files, parse_fact
from .engine import InconsistentProgramError, canon_proc, entails, minimal_model
from .generate import generate_instance
from .model import format_component

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONSISTENT = 2
EXIT_NOT_ENTAILED = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise _UsageError(f"{self.prog}: error: {message}")


def _default_workers() -> int:
    env = os.environ.get("MANCALOG_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise _UsageError(f"MANCALOG_WORKERS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _sizes(text: str) -> List[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("sizes are comma-separated integers") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mancalog", description="Minimal models of network cascade programs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def inputs(p):
        p.add_argument("network", help="network JSON file")
        p.add_argument("program", help="program file (.mcl)")

    def engine_opts(p):
        p.add_argument("--canonical", action="store_true", help="use canonical models")
        p.add_argument("--workers", type=int, default=None, help="engine worker threads")

    p = sub.add_parser("run", help="compute the (canonical) minimal model")
    inputs(p)
    engine_opts(p)
    p.add_argument("--out", help="timeline output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--sparse", action="store_true", help="omit [0,1] cells")

    p = sub.add_parser("entail", help="decide whether the program entails a fact")
    inputs(p)
    engine_opts(p)
    p.add_argument("--fact", required=True, help="e.g. 'watchesA:[0.8,1] @ node 1 in [0,0]'")

    p = sub.add_parser("check", help="decide consistency")
    inputs(p)
    engine_opts(p)

    p = sub.add_parser("validate", help="parse and validate only")
    inputs(p)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("network_out")
    p.add_argument("program_out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nodes", type=int, default=100)
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--tmax", type=int, default=10)
    p.add_argument("--rules", type=int, default=5)
    p.add_argument("--model", choices=("erdos", "preferential"), default="erdos")

    p = sub.add_parser("bench", help="iteration counts and timings on generated instances")
    p.add_argument("--sizes", type=_sizes, default=list(DEFAULT_SIZES))
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--degree", type=int, default=5)
    p.add_argument("--tmax", type=int, default=20)
    p.add_argument("--rules", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", choices=("erdos", "preferential"), default="erdos")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", help="report file (default: stdout)")
    return parser


def _write(path: Optional[str], text: str, stdout) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _report(result, stderr) -> None:
    stderr.write("stats: " + json.dumps(result.stats.as_dict(), sort_keys=True) + "\n")
    for t, c, label in result.witnesses:
        stderr.write(f"witness: t={t} {format_component(c)} {label} empty\n")
    for v in result.violations:
        stderr.write(f"violation: {v}\n")


def _solve(program, args):
    workers = args.workers if args.workers is not None else _default_workers()
    run = canon_proc if args.canonical else minimal_model
    return run(program, workers=workers)


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return _dispatch(args, stdout, stderr)
    except _UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except DiagnosticError as exc:
        for d in exc.diagnostics:
            stderr.write(f"{d}\n")
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        stderr.write(f"mancalog: error: {exc}\n")
        return EXIT_USAGE


def _dispatch(args, stdout, stderr) -> int:
    cmd = args.command
    if cmd == "gen":
        p = generate_instance(args.seed, args.nodes, args.degree, args.tmax, args.rules, args.model)
        _write(args.network_out, dump_network(p.network, p.registry, p.t_max), stdout)
        _write(args.program_out, format_program(p), stdout)
        return EXIT_OK
    if cmd == "bench":
        report = bench(
            args.sizes, args.repetitions, args.degree, args.tmax, args.rules, args.seed, args.model, args.workers
        )
        _write(args.out, json.dumps(report, indent=1, sort_keys=True) + "\n", stdout)
        return EXIT_OK if report["all_within_bound"] else EXIT_USAGE

    program = load_program_files(args.network, args.program)
    if cmd == "validate":
        stdout.write("valid\n")
        return EXIT_OK
    if cmd == "entail":
        fact = parse_fact(args.fact, filename="--fact")
        result = _solve(program, args)
        _report(result, stderr)
        try:
            answer = entails(program, fact, canonical=args.canonical, result=result)
        except InconsistentProgramError:
            stdout.write("inconsistent-program\n")
            return EXIT_INCONSISTENT
        stdout.write("true\n" if answer else "false\n")
        return EXIT_OK if answer else EXIT_NOT_ENTAILED

    result = _solve(program, args)
    _report(result, stderr)
    if cmd == "check":
        stdout.write(f"{result.status}\n")
    else:
        text = export_timeline(result.model, args.format, args.sparse, program.network, program.labels)
        _write(args.out, text, stdout)
    return EXIT_OK if result.consistent else EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
