"""Command line interface.

Exit codes: 0 when the query holds (consistent, satisfiable, subsumed),
1 when it does not, 2 for unreadable or ill-formed input, 3 when an
internal resource bound was hit before an answer was reached.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import EngineLimitError, ParseError, ValidationError
from .forest import to_dot
from .parser import parse_concept_text, parse_kb
from .reasoner import Answer, consistency, satisfiability, subsumption
from .semantics import format_interpretation
from .tableau import extract_model
from .errors import ExtractionError

EXIT_YES = 0
EXIT_NO = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiqtab",
        description="Tableau reasoner for SHIQ knowledge bases.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("kb", help="knowledge base file")
        p.add_argument(
            "--trace",
            metavar="FILE",
            help="write one line per rule application to FILE ('-' for stdout)",
        )
        p.add_argument(
            "--dot",
            metavar="FILE",
            help="write the final completion forest in DOT format to FILE",
        )
        p.add_argument(
            "--model",
            metavar="FILE",
            help="write a finite model extracted from the forest to FILE "
            "(only available when no blocking occurred)",
        )
        p.add_argument(
            "--max-nodes",
            type=int,
            default=None,
            metavar="N",
            help="abort with exit code 3 when the forest grows past N nodes",
        )
        p.add_argument(
            "--seed",
            type=int,
            default=None,
            metavar="S",
            help="shuffle the order in which branch alternatives are tried",
        )

    p = sub.add_parser("consistent", help="decide knowledge base consistency")
    common(p)
    p = sub.add_parser("sat", help="decide concept satisfiability")
    common(p)
    p.add_argument(
        "--concept", required=True, metavar="EXPR", help="concept expression"
    )
    p = sub.add_parser("subsumes", help="decide concept subsumption")
    common(p)
    p.add_argument(
        "--sub", required=True, metavar="EXPR", help="candidate subsumee"
    )
    p.add_argument(
        "--super",
        dest="super_",
        required=True,
        metavar="EXPR",
        help="candidate subsumer",
    )
    return parser


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _emit_outputs(args, answer: Answer) -> None:
    result = answer.result
    if args.trace:
        lines = "".join(
            record.format() + "\n" for record in (result.trace or [])
        )
        _write(args.trace, lines)
    if args.dot:
        _write(args.dot, to_dot(result.forest))
    if args.model:
        if not result.consistent:
            print(
                "no model: the problem is inconsistent", file=sys.stderr
            )
        else:
            try:
                interp = extract_model(result.forest, answer.problem)
            except ExtractionError as exc:
                print(f"no finite model extracted: {exc}", file=sys.stderr)
            else:
                _write(args.model, format_interpretation(interp))


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    options = {"collect_trace": bool(args.trace)}
    if args.max_nodes is not None:
        options["max_nodes"] = args.max_nodes
    if args.seed is not None:
        options["seed"] = args.seed
    try:
        with open(args.kb, encoding="utf-8") as handle:
            kb = parse_kb(handle.read())
        if args.command == "consistent":
            answer = consistency(kb, **options)
            verdict = "CONSISTENT" if answer.affirmative else "INCONSISTENT"
        elif args.command == "sat":
            concept = parse_concept_text(args.concept)
            answer = satisfiability(kb, concept, **options)
            verdict = "SAT" if answer.affirmative else "UNSAT"
        else:
            sub = parse_concept_text(args.sub)
            sup = parse_concept_text(args.super_)
            answer = subsumption(kb, sub, sup, **options)
            verdict = "YES" if answer.affirmative else "NO"
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EngineLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    print(verdict)
    _emit_outputs(args, answer)
    return EXIT_YES if answer.affirmative else EXIT_NO


if __name__ == "__main__":
    sys.exit(main())
