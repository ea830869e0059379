"""``ra``: command-line workbench for reaction automata.

Exit status: 0 on acceptance or success, 1 on rejection (or an invalid file
for ``validate``), 2 on usage, parse or input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import constructions as C
from .errors import ReactionAutomatonError
from .fileformat import parse_automaton, parse_dfa, parse_gsm, parse_morphism, serialize_automaton
from .model import BoundSpec, ReactionAutomaton, as_word, constant
from .oracle import FIXTURE_NAMES, enumerate_language, fixture
from .render import automaton_dot, trace_dot, trace_json, trace_text
from .semantics import InputError, accepts

EXIT_ACCEPT, EXIT_REJECT, EXIT_ERROR = 0, 1, 2

UNARY = {"normal-form", "lambda-normal-form", "rderiv", "lderiv", "gsm", "morph", "inv-morph", "star",
         "plus", "to-lambda", "pad-exp"}
BINARY = {"union", "intersection", "concat", "shuffle"}
OPS = sorted(UNARY | BINARY | {"from-dfa"})


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_automaton(spec: str) -> ReactionAutomaton:
    """A ``.ra`` path, or ``fixture:NAME`` for a built-in fixture automaton."""
    if spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        if name not in FIXTURE_NAMES or name == "sigma_plus_dfa":
            raise UsageError(f"unknown fixture {name!r}")
        return fixture(name)
    return parse_automaton(_read(spec))


def parse_bound(text: str | None) -> BoundSpec | None:
    if text is None:
        return None
    if text.strip().isdigit():
        return constant(int(text))
    return BoundSpec.parse(text)


def parse_word(text: str):
    # "<eps>" is the empty word; letters may be run together or space separated
    return as_word(text)


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bound", help="workspace bound: 'constant k', 'linear c1 c0', 'poly c d c0', 'exp c1 c2' or k")
    p.add_argument("--mode", choices=["ordinary", "lambda"], default="ordinary")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ra", description="Simulate and transform reaction automata.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("accept", help="decide bounded acceptance of a word")
    p.add_argument("file")
    p.add_argument("word", help="input word; <eps> for the empty word")
    _add_search_flags(p)

    p = sub.add_parser("trace", help="print one accepting interactive process")
    p.add_argument("file")
    p.add_argument("word")
    _add_search_flags(p)
    p.add_argument("--format", choices=["text", "dot", "json"], default="text")

    p = sub.add_parser("lang", help="list the accepted words up to a length")
    p.add_argument("file")
    p.add_argument("--max-len", type=int, required=True)
    _add_search_flags(p)

    p = sub.add_parser("construct", help="apply a closure construction")
    p.add_argument("op", help="one of: " + ", ".join(OPS))
    p.add_argument("operands", nargs="*", help=".ra files (fixture:NAME for built-ins); from-dfa takes no operand")
    p.add_argument("-o", "--output", help="write the result here instead of standard output")
    p.add_argument("--mode", choices=["ordinary", "lambda"], default="ordinary")
    p.add_argument("--x", help="word for rderiv / lderiv")
    p.add_argument("--gsm", help="gsm sidecar file")
    p.add_argument("--morphism", help="morphism sidecar file")
    p.add_argument("--dfa", help="DFA sidecar file for from-dfa")
    p.add_argument("--side", choices=["prefix", "suffix"], default="prefix")
    p.add_argument("--pad-symbol", default="z")
    p.add_argument("--literal", action="store_true", help="emit the reaction set without repairs")

    p = sub.add_parser("validate", help="check an automaton file")
    p.add_argument("file")

    p = sub.add_parser("diagram", help="DOT reaction diagram of an automaton")
    p.add_argument("file")
    return parser


def _need(value, flag: str, op: str):
    if value is None:
        raise UsageError(f"{op} needs {flag}")
    return value


def construct(args) -> ReactionAutomaton:
    op = args.op
    if op not in OPS:
        raise UsageError(f"unknown construction {op!r}; expected one of {', '.join(OPS)}")
    arity = 0 if op == "from-dfa" else 2 if op in BINARY else 1
    if len(args.operands) != arity:
        raise UsageError(f"{op} takes {arity} operand file(s), got {len(args.operands)}")
    ops = [load_automaton(x) for x in args.operands]
    lit = args.literal
    if op == "normal-form":
        return C.to_normal_form(ops[0])
    if op == "lambda-normal-form":
        return C.to_lambda_normal_form(ops[0], literal=lit)
    if op in BINARY:
        fn = {"union": C.union, "intersection": C.intersection, "concat": C.concatenation,
              "shuffle": C.shuffle}[op]
        return fn(ops[0], ops[1], args.mode, literal=lit)
    if op == "rderiv":
        return C.right_derivative(ops[0], parse_word(_need(args.x, "--x", op)), args.mode, literal=lit)
    if op == "lderiv":
        return C.left_derivative(ops[0], parse_word(_need(args.x, "--x", op)), args.mode, literal=lit)
    if op == "gsm":
        return C.gsm_image(ops[0], parse_gsm(_read(_need(args.gsm, "--gsm", op))), literal=lit)
    if op == "morph":
        return C.morphism_image(ops[0], parse_morphism(_read(_need(args.morphism, "--morphism", op))), args.mode)
    if op == "inv-morph":
        h = parse_morphism(_read(_need(args.morphism, "--morphism", op)))
        return C.inverse_morphism_lambda(ops[0], h, literal=lit)
    if op == "star":
        return C.kleene_star_lambda(ops[0], literal=lit)
    if op == "plus":
        return C.kleene_plus_lambda(ops[0], literal=lit)
    if op == "to-lambda":
        return C.lra_to_lambda(ops[0], literal=lit)
    if op == "from-dfa":
        return C.from_dfa(parse_dfa(_read(_need(args.dfa, "--dfa", op))))
    return C.pad_exponential(ops[0], args.pad_symbol, args.side, literal=lit)


def run(args, out) -> int:
    if args.command == "validate":
        try:
            a = parse_automaton(_read(args.file))
        except ReactionAutomatonError as exc:
            print(f"invalid: {exc}", file=out)
            return EXIT_REJECT
        print(f"valid: {len(a.background)} symbols, {len(a.reactions)} reactions", file=out)
        return EXIT_ACCEPT
    if args.command == "construct":
        result = construct(args)
        text = serialize_automaton(result)
        if args.output:
            Path(args.output).write_text(text)
        else:
            out.write(text)
        return EXIT_ACCEPT
    automaton = load_automaton(args.file)
    if args.command == "diagram":
        out.write(automaton_dot(automaton))
        return EXIT_ACCEPT
    bound = parse_bound(args.bound)
    if args.command == "lang":
        if args.max_len < 0:
            raise UsageError("--max-len must be non-negative")
        out.write(enumerate_language(automaton, args.max_len, bound, args.mode).serialize())
        return EXIT_ACCEPT
    outcome = accepts(automaton, parse_word(args.word), bound, args.mode)
    if args.command == "accept":
        verdict = "accepted" if outcome.accepted else "rejected"
        pruned = "true" if outcome.pruned_by_bound else "false"
        print(f"{verdict} explored={outcome.explored} pruned_by_bound={pruned}", file=out)
        return EXIT_ACCEPT if outcome.accepted else EXIT_REJECT
    if not outcome.accepted:
        print("no accepting trace", file=out)
        return EXIT_REJECT
    render = {"text": trace_text, "dot": trace_dot, "json": trace_json}[args.format]
    out.write(render(outcome.witness))
    return EXIT_ACCEPT


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args, sys.stdout)
    except (UsageError, InputError, ReactionAutomatonError) as exc:
        print(f"ra: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
