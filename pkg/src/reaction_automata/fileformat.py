"""The line-oriented ``.ra`` automaton format and the gsm / morphism / DFA sidecar formats.

An automaton file::

    # comments run to end of line
    @symbols p0 a b c a' b' c' f
    @input a b c
    @init p0
    @final f
    @bound linear 2 4
    @reaction a1: a | b b' | a'

Reaction lines give reactants, inhibitors and products separated by ``|``;
``-`` stands for an empty multiset or an empty inhibitor set.  Inhibitors
may also be written as ``{b, b'}``.
"""

from __future__ import annotations

from .errors import ModelError, MultisetError, ParseError
from .model import (
    DFA,
    GSM,
    BoundSpec,
    Morphism,
    Reaction,
    ReactionAutomaton,
    as_word,
    build_automaton,
    make_dfa,
    make_gsm,
    make_morphism,
    validate,
    word_str,
)
from .multiset import check_symbol, format_multiset, parse_multiset


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if body.strip():
            yield no, raw, body


def _col(raw: str, fragment: str, start: int = 0) -> int:
    i = raw.find(fragment.strip(), start) if fragment.strip() else -1
    return (i if i >= 0 else start) + 1


def _symbols(text: str, no: int, raw: str) -> list[str]:
    out = []
    for tok in text.replace("{", " ").replace("}", " ").replace(",", " ").split():
        if tok == "-":
            continue
        try:
            out.append(check_symbol(tok))
        except MultisetError as exc:
            raise ParseError(str(exc), no, _col(raw, tok)) from None
    return out


def parse_automaton(text: str) -> ReactionAutomaton:
    """Parse ``.ra`` text into a validated automaton; errors carry line and column."""
    symbols: list[str] = []
    sigma: list[str] | None = None
    init = None
    final = None
    bound: BoundSpec | None = None
    reactions: list[Reaction] = []
    where: dict[str, int] = {}
    seen_labels: dict[str, int] = {}
    header_line: dict[str, int] = {}
    for no, raw, body in _lines(text):
        stripped = body.strip()
        if not stripped.startswith("@"):
            raise ParseError(f"expected a directive, got {stripped.split()[0]!r}", no, _col(raw, stripped))
        directive, _, rest = stripped.partition(" ")
        rest = rest.strip()
        rest_col = _col(raw, rest, raw.find(directive) + len(directive)) if rest else len(raw) + 1
        if directive == "@symbols":
            for s in _symbols(rest, no, raw):
                if s in symbols:
                    raise ParseError(f"symbol {s!r} listed twice", no, _col(raw, s))
                symbols.append(s)
            header_line["symbols"] = no
        elif directive == "@input":
            sigma = (sigma or []) + _symbols(rest, no, raw)
            header_line["input"] = no
        elif directive == "@init":
            try:
                init = parse_multiset(rest)
            except MultisetError as exc:
                raise ParseError(str(exc), no, rest_col) from None
            header_line["init"] = no
        elif directive == "@final":
            names = _symbols(rest, no, raw)
            if len(names) != 1:
                raise ParseError("@final takes exactly one symbol", no, rest_col)
            final = names[0]
            header_line["final"] = no
        elif directive == "@bound":
            try:
                bound = BoundSpec.parse(rest)
            except ModelError as exc:
                raise ParseError(str(exc), no, rest_col) from None
        elif directive == "@reaction":
            label, colon, spec = rest.partition(":")
            label = label.strip()
            if not colon or not label:
                raise ParseError("expected '@reaction <label>: R | I | P'", no, rest_col)
            try:
                check_symbol(label)
            except MultisetError as exc:
                raise ParseError(f"reaction label: {exc}", no, rest_col) from None
            if label in seen_labels:
                raise ParseError(f"duplicate reaction label {label!r} (first on line {seen_labels[label]})",
                                 no, rest_col)
            seen_labels[label] = no
            parts = spec.split("|")
            if len(parts) != 3:
                raise ParseError("reaction needs three '|'-separated fields", no, _col(raw, spec))
            colon_at = raw.index(":", raw.find("@reaction"))
            bars = [i for i in range(colon_at, len(body)) if raw[i] == "|"]
            starts = [colon_at + 1, bars[0] + 1, bars[1] + 1]
            fields_at = [_col(raw, p, s) for p, s in zip(parts, starts)]
            try:
                reactants = parse_multiset(parts[0])
            except MultisetError as exc:
                raise ParseError(f"reactants: {exc}", no, fields_at[0]) from None
            inhibitors = frozenset(_symbols(parts[1], no, raw))
            try:
                products = parse_multiset(parts[2])
            except MultisetError as exc:
                raise ParseError(f"products: {exc}", no, fields_at[2]) from None
            clash = set(reactants) & inhibitors
            if clash:
                raise ParseError(f"reaction {label}: reactant intersects inhibitor ({' '.join(sorted(clash))})",
                                 no, fields_at[1])
            reactions.append(Reaction(label, reactants, inhibitors, products))
            where[label] = no
        else:
            raise ParseError(f"unknown directive {directive!r}", no, _col(raw, directive))
    for key in ("symbols", "init", "final"):
        if key not in header_line:
            raise ParseError(f"missing @{key} directive")
    automaton = ReactionAutomaton(tuple(symbols), tuple(sigma or ()), tuple(reactions), init, final, bound)
    problems = validate(automaton)
    if problems:
        first = problems[0]
        line = None
        for label, no in where.items():
            if f"reaction {label}:" in first:
                line = no
                break
        if line is None:
            for key, no in header_line.items():
                if key in first or (key == "input" and "input symbol" in first):
                    line = no
        raise ParseError("; ".join(problems), line)
    return automaton


def _inhibitor_str(inhibitors) -> str:
    return " ".join(sorted(inhibitors)) or "-"


def serialize_automaton(automaton: ReactionAutomaton) -> str:
    """Canonical ``.ra`` text; parsing it back yields an equal automaton."""
    lines = [
        "@symbols " + " ".join(automaton.background),
        "@input " + " ".join(automaton.input_alphabet) if automaton.input_alphabet else "@input",
        "@init " + format_multiset(automaton.initial),
        "@final " + automaton.final,
    ]
    if automaton.declared_bound is not None:
        lines.append(f"@bound {automaton.declared_bound}")
    for r in automaton.reactions:
        lines.append(f"@reaction {r.label}: {format_multiset(r.reactants)} | "
                     f"{_inhibitor_str(r.inhibitors)} | {format_multiset(r.products)}")
    return "\n".join(lines) + "\n"


def canonical(text: str) -> str:
    return serialize_automaton(parse_automaton(text))


# Sidecars


def _arrow_lines(text: str):
    for no, raw, body in _lines(text):
        yield no, raw, body.strip()


def parse_gsm(text: str) -> GSM:
    """Lines ``p a -> q x`` plus ``@start p`` and ``@final q ...``; optional ``@input`` / ``@output``."""
    transitions = []
    start = None
    finals: list[str] = []
    sigma = delta = None
    for no, raw, line in _arrow_lines(text):
        if line.startswith("@"):
            directive, _, rest = line.partition(" ")
            names = _symbols(rest, no, raw)
            if directive == "@start":
                if len(names) != 1:
                    raise ParseError("@start takes one state", no)
                start = names[0]
            elif directive == "@final":
                finals.extend(names)
            elif directive == "@input":
                sigma = names
            elif directive == "@output":
                delta = names
            else:
                raise ParseError(f"unknown directive {directive!r}", no, 1)
            continue
        left, arrow, right = line.partition("->")
        lhs, rhs = left.split(), right.split()
        if not arrow or len(lhs) != 2 or not rhs:
            raise ParseError("expected 'p a -> q x'", no, 1)
        out = as_word(" ".join(rhs[1:]) if len(rhs) > 2 else (rhs[1] if len(rhs) == 2 else "<eps>"))
        transitions.append((lhs[0], lhs[1], rhs[0], out))
    if start is None:
        raise ParseError("missing @start directive")
    try:
        return make_gsm(transitions, start, finals, sigma, delta)
    except ModelError as exc:
        raise ParseError(str(exc)) from None


def serialize_gsm(g: GSM) -> str:
    lines = [f"@start {g.start}", "@final " + " ".join(sorted(g.finals)),
             "@input " + " ".join(g.input_alphabet), "@output " + " ".join(g.output_alphabet)]
    for p, a, q, x in g.transitions:
        lines.append(f"{p} {a} -> {q} {word_str(x)}")
    return "\n".join(lines) + "\n"


def parse_morphism(text: str) -> Morphism:
    """Lines ``a -> xyz`` or ``a -> <eps>``."""
    images: dict[str, str] = {}
    for no, raw, line in _arrow_lines(text):
        left, arrow, right = line.partition("->")
        lhs = left.split()
        if not arrow or len(lhs) != 1:
            raise ParseError("expected 'a -> image'", no, 1)
        if lhs[0] in images:
            raise ParseError(f"symbol {lhs[0]!r} mapped twice", no, 1)
        images[lhs[0]] = right.strip() or "<eps>"
    return make_morphism(images)


def serialize_morphism(h: Morphism) -> str:
    return "".join(f"{a} -> {word_str(h.images[a])}\n" for a in h.source)


def parse_dfa(text: str) -> DFA:
    """Lines ``p a -> q`` plus ``@start``, ``@final`` and optional ``@input``."""
    trans: dict[tuple[str, str], str] = {}
    start = None
    finals: list[str] = []
    sigma: list[str] | None = None
    states: list[str] = []
    for no, raw, line in _arrow_lines(text):
        if line.startswith("@"):
            directive, _, rest = line.partition(" ")
            names = _symbols(rest, no, raw)
            if directive == "@start":
                start = names[0] if names else None
            elif directive == "@final":
                finals.extend(names)
            elif directive == "@input":
                sigma = names
            elif directive == "@states":
                states.extend(names)
            else:
                raise ParseError(f"unknown directive {directive!r}", no, 1)
            continue
        left, arrow, right = line.partition("->")
        lhs, rhs = left.split(), right.split()
        if not arrow or len(lhs) != 2 or len(rhs) != 1:
            raise ParseError("expected 'p a -> q'", no, 1)
        trans[(lhs[0], lhs[1])] = rhs[0]
    if start is None:
        raise ParseError("missing @start directive")
    all_states = list(dict.fromkeys([start, *states, *(p for p, _ in trans), *trans.values(), *finals]))
    alphabet = sigma if sigma is not None else list(dict.fromkeys(a for _, a in trans))
    try:
        return make_dfa(all_states, alphabet, trans, start, finals)
    except ModelError as exc:
        raise ParseError(str(exc)) from None


def serialize_dfa(m: DFA) -> str:
    lines = [f"@start {m.start}", "@final " + " ".join(sorted(m.finals)), "@input " + " ".join(m.alphabet),
             "@states " + " ".join(m.states)]
    for p in m.states:
        for a in m.alphabet:
            lines.append(f"{p} {a} -> {m.transition[(p, a)]}")
    return "\n".join(lines) + "\n"
