"""
histclaims command-line interface

Reads a problem (or axiom-check instance) as JSON, runs one command and
writes the result as JSON or CSV. Exit code 0 means success, 2 an input or
validation error, and 3 a violated axiom or mismatched fixture.

Usage:
    python -m histclaims solve-hist --rule cel --input problem.json
    python -m histclaims axioms-search --axiom self-duality --rule prop --budget 1000
    python -m histclaims fixtures
    python -m histclaims trace --rule talmud --samples exact --format csv --input claims.json
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from .core import codec
from .core.axioms import check, resolve_axiom
from .core.fixtures import run_published_fixtures
from .core.operator import apply_historical, apply_historical_iterative, resolve_operator
from .core.paths import EXACT, trace_historical, trace_standard
from .core.problems import ValidationError, validate_historical, validate_problem
from .core.rules import resolve_rule
from .core.search import DEFAULT_BUDGET, search_counterexample

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_VIOLATION = 3

COMMANDS = ("solve", "solve-hist", "axioms-check", "axioms-search", "fixtures", "trace")
NO_OPERATOR = "none"

# Commands that read a JSON document from the input.
_READS_INPUT = {"solve", "solve-hist", "axioms-check", "trace"}

logger = logging.getLogger("histclaims")


def _log(message, level=logging.INFO):
    """Log a message to the histclaims logger.

    Args:
        message: The message to log.
        level: The log level (logging.DEBUG, logging.INFO, logging.WARNING).
    """
    logger.log(level, str(message))


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation.

    Attributes:
        command: One of ``COMMANDS``.
        rule: Rule registry name.
        operator: Operator name, or ``"none"`` for standard axiom checks.
        axiom: Axiom name for the ``axioms-*`` commands.
        input: Input file path, ``-`` for standard input.
        output: Output file path, ``-`` for standard output.
        seed: Base seed for ``axioms-search``.
        budget: Trial count for ``axioms-search``.
        samples: ``"exact"`` or a sample count for ``trace``.
        format: ``json`` or ``csv`` (``csv`` only for ``trace``).
        workers: Search worker processes; None reads ``HISTCLAIMS_WORKERS``.
    """

    command: str
    rule: str = "prop"
    operator: str = "phi"
    axiom: Optional[str] = None
    input: str = "-"
    output: str = "-"
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    samples: Union[int, str] = EXACT
    format: str = "json"
    workers: Optional[int] = None


def _error_payload(exc: Exception) -> bytes:
    index = exc.index if isinstance(exc, ValidationError) else None
    if isinstance(index, tuple):
        index = list(index)
    return codec.dumps(
        {"error": {"type": type(exc).__name__, "message": str(exc), "index": index}}
    )


def _execute(config: RunConfig, data: bytes) -> Tuple[int, bytes]:
    if config.command not in COMMANDS:
        raise codec.ParseError(f"Unknown command {config.command!r}")
    if config.format not in ("json", "csv"):
        raise codec.ParseError(f"Unknown format {config.format!r}")
    if config.format == "csv" and config.command != "trace":
        raise codec.ParseError("CSV output is only available for 'trace'")

    # Names are resolved before any computation.
    rule = resolve_rule(config.rule) if config.command != "fixtures" else None
    op = None
    if config.operator != NO_OPERATOR:
        op = resolve_operator(config.operator)
    axiom = None
    if config.command in ("axioms-check", "axioms-search"):
        if config.axiom is None:
            raise codec.ParseError(f"'{config.command}' needs --axiom")
        axiom = resolve_axiom(config.axiom)

    document = codec.loads(data) if config.command in _READS_INPUT else None

    if config.command == "solve":
        hp = codec.problem_from_json(document)
        if len(hp.history):
            raise codec.ParseError("'solve' takes a problem without history; use 'solve-hist'")
        validate_problem(hp.problem)
        return EXIT_OK, codec.dumps(codec.awards_to_json(hp.agents, rule(hp.problem)))

    if config.command == "solve-hist":
        if op is None:
            raise codec.ParseError("'solve-hist' needs an operator; use 'solve' for a standard rule")
        hp = codec.problem_from_json(document)
        validate_historical(hp)
        if op.name == "phi":
            solution = apply_historical(rule, hp)
            _, trace = apply_historical_iterative(rule, hp)
            return EXIT_OK, codec.dumps(codec.solution_to_json(hp, solution, trace))
        return EXIT_OK, codec.dumps(codec.awards_to_json(hp.agents, op(rule, hp)))

    if config.command == "axioms-check":
        result = check(axiom, rule, op, codec.instance_from_json(document))
        code = EXIT_OK if result.holds else EXIT_VIOLATION
        return code, codec.dumps(codec.result_to_json(result))

    if config.command == "axioms-search":
        result = search_counterexample(
            axiom, rule, op, budget=config.budget, seed=config.seed, workers=config.workers
        )
        code = EXIT_OK if result.holds else EXIT_VIOLATION
        return code, codec.dumps(codec.result_to_json(result))

    if config.command == "fixtures":
        report = codec.report_to_json(run_published_fixtures())
        return (EXIT_OK if report["all_match"] else EXIT_VIOLATION), codec.dumps(report)

    if isinstance(document, dict):
        document = {"endowment": "0", **document}
    hp = codec.problem_from_json(document)
    if len(hp.history):
        path = trace_historical(rule, hp.claims, hp.history, config.samples, hp.agents)
    else:
        path = trace_standard(rule, hp.claims, config.samples, hp.agents)
    if config.format == "csv":
        return EXIT_OK, codec.path_to_csv(path).encode("utf-8")
    return EXIT_OK, codec.dumps(codec.path_to_json(path))


def run(config: RunConfig, data: bytes = b"") -> Tuple[int, bytes]:
    """Run one command on raw input bytes.

    Args:
        config: The invocation.
        data: The JSON input; ignored by ``axioms-search`` and ``fixtures``.

    Returns:
        ``(exit code, output bytes)``. Errors never escape: they become an
        ``{"error": ...}`` payload with exit code 2.
    """
    try:
        return _execute(config, data)
    except ValueError as exc:
        _log(f"{config.command} failed: {exc}", logging.WARNING)
        return EXIT_ERROR, _error_payload(exc)


def _samples(text: str) -> Union[int, str]:
    if text == EXACT:
        return EXACT
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or {EXACT!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="histclaims",
        description="Exact claims problems with history",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    parser.add_argument("command", choices=COMMANDS, help="What to run")
    parser.add_argument("--rule", default="prop", help="Rule name (default: prop)")
    parser.add_argument(
        "--operator",
        default="phi",
        help="Operator name, or 'none' for standard axiom checks (default: phi)",
    )
    parser.add_argument("--axiom", help="Axiom name for axioms-check / axioms-search")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="Search trials")
    parser.add_argument("--seed", type=int, default=0, help="Search seed")
    parser.add_argument("--samples", type=_samples, default=EXACT, help="'exact' or a count")
    parser.add_argument("--input", "-i", default="-", help="Input file, '-' for stdin")
    parser.add_argument("--output", "-o", default="-", help="Output file, '-' for stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--workers", type=int, help="Search worker processes")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    config = RunConfig(
        command=args.command,
        rule=args.rule,
        operator=args.operator,
        axiom=args.axiom,
        input=args.input,
        output=args.output,
        seed=args.seed,
        budget=args.budget,
        samples=args.samples,
        format=args.format,
        workers=args.workers,
    )

    data = b""
    if config.command in _READS_INPUT:
        try:
            if config.input == "-":
                data = sys.stdin.buffer.read()
            else:
                with open(config.input, "rb") as handle:
                    data = handle.read()
        except OSError as exc:
            sys.stderr.write(f"Cannot read input: {exc}\n")
            return EXIT_ERROR

    code, output = run(config, data)
    if config.output == "-":
        sys.stdout.buffer.write(output)
        sys.stdout.flush()
    else:
        with open(config.output, "wb") as handle:
            handle.write(output)
    return code


if __name__ == "__main__":
    sys.exit(main())
