"""Command line front end.

Exit codes: 0 success, 1 ``equiv`` found a counterexample, 2 parse or
validation error, 3 iteration budget exceeded, 4 audited invariant breach.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .automata import counterexample, language_of, minimize
from .errors import (
    InvariantBreach,
    IterationBudgetExceeded,
    ParseError,
    SignatureMismatch,
    TreeLearnError,
)
from .functor import parse_signature_tree, to_literal
from .learner import LearnConfig, Learner
from .teacher import AutomatonTeacher, CachingTeacher
from .textformat import format_automaton, parse_automaton, to_dot

EXIT_OK = 0
EXIT_DIFFERENT = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4


class InputError(Exception):
    pass


def _load(path: str):
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{path}: no such file")
    try:
        return parse_automaton(p.read_text(encoding="utf-8"))
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_learn(args) -> int:
    target = _load(args.target)
    teacher = CachingTeacher(AutomatonTeacher(target))
    config = LearnConfig(
        audit=args.audit, max_iterations=args.max_iterations, dump_tables=args.dump_tables
    )
    learner = Learner(teacher, config)
    try:
        hyp = learner.run()
    finally:
        if args.stats:
            Path(args.stats).write_text(learner.trace.to_jsonl(), encoding="utf-8")
    for table in learner.tables:
        sys.stdout.write(table + "\n")
    reps = {q: to_literal(t) for q, t in learner.table.representatives().items()}
    sys.stdout.write(format_automaton(hyp, comments=reps))
    if args.dot:
        Path(args.dot).write_text(to_dot(hyp), encoding="utf-8")
    return EXIT_OK


def cmd_member(args) -> int:
    target = _load(args.target)
    try:
        tree = parse_signature_tree(target.signature, args.tree)
    except ParseError as exc:
        raise InputError(f"--tree: {exc}") from None
    print(language_of(target, tree))
    return EXIT_OK


def cmd_equiv(args) -> int:
    a, b = _load(args.a), _load(args.b)
    try:
        witness = counterexample(a, b)
    except SignatureMismatch as exc:
        raise InputError(str(exc)) from None
    if witness is None:
        print("equivalent")
        return EXIT_OK
    print(f"counterexample: {to_literal(witness)}")
    return EXIT_DIFFERENT


def cmd_minimize(args) -> int:
    _write(args.output, format_automaton(minimize(_load(args.target))))
    return EXIT_OK


def cmd_export_dot(args) -> int:
    _write(args.output, to_dot(_load(args.target)))
    return EXIT_OK


def cmd_validate(args) -> int:
    _load(args.target)
    print("ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treelearn",
        description="Learn and manipulate word, tree and unordered-tree automata.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn a target automaton from queries")
    p.add_argument("--target", required=True, help="automaton answering the queries")
    p.add_argument("--stats", help="write the JSON-lines trace here")
    p.add_argument("--dot", help="write the learned automaton as DOT here")
    p.add_argument("--dump-tables", action="store_true", help="print every closed and consistent table")
    p.add_argument("--audit", action="store_true", help="check learning invariants at runtime")
    p.add_argument("--max-iterations", type=int, default=None)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("member", help="evaluate a tree literal")
    p.add_argument("--target", required=True)
    p.add_argument("--tree", required=True)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("equiv", help="compare two automata")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("minimize", help="minimize an automaton")
    p.add_argument("--target", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("export-dot", help="render an automaton as Graphviz DOT")
    p.add_argument("--target", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("validate", help="parse and check an automaton file")
    p.add_argument("--target", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except IterationBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantBreach as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except TreeLearnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
