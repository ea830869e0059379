"""Data model: reactions, reaction automata, bounds, gsm machines, DFAs, morphisms."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .errors import ModelError
from .multiset import EMPTY, Multiset, check_symbol, msum, scale

# Multisets of reactions are multisets over reaction labels.
ReactionMultiset = Multiset

Word = tuple[str, ...]


def as_word(word: str | Iterable[str]) -> Word:
    """Normalize a word: a plain string is split into characters, or on whitespace if it has any."""
    if isinstance(word, str):
        if word == "<eps>":
            return ()
        if any(ch.isspace() for ch in word):
            return tuple(word.split())
        return tuple(word)
    return tuple(word)


def word_str(word: Sequence[str]) -> str:
    if not word:
        return "<eps>"
    if all(len(s) == 1 for s in word):
        return "".join(word)
    return " ".join(word)


@dataclass(frozen=True)
class Reaction:
    label: str
    reactants: Multiset
    inhibitors: frozenset[str]
    products: Multiset

    def symbols(self) -> set[str]:
        return set(self.reactants) | set(self.inhibitors) | set(self.products)

    def __str__(self) -> str:
        inh = " ".join(sorted(self.inhibitors)) or "-"
        return f"{self.label}: ({self.reactants}, {{{inh}}}, {self.products})"


def reaction(label: str, reactants: Multiset | str, inhibitors: Iterable[str] | str, products: Multiset | str) -> Reaction:
    """Convenience constructor accepting multiset literals and symbol sets or strings."""
    from .multiset import parse_multiset

    if isinstance(reactants, str):
        reactants = parse_multiset(reactants)
    if isinstance(products, str):
        products = parse_multiset(products)
    if isinstance(inhibitors, str):
        inhibitors = [] if inhibitors.strip() in ("", "-") else inhibitors.split()
    return Reaction(label, reactants, frozenset(inhibitors), products)


_BOUND_ARITY = {"constant": 1, "linear": 2, "polynomial": 3, "exponential": 2}
_BOUND_RANK = {"constant": 0, "linear": 1, "polynomial": 2, "exponential": 3}


@dataclass(frozen=True)
class BoundSpec:
    """Workspace bound family evaluated at input length n.

    constant (k,) -> k;  linear (c1, c0) -> c1*n + c0;
    polynomial (c, d, c0) -> c*n**d + c0;  exponential (c1, c2) -> c1*c2**n.
    """

    kind: str
    params: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in _BOUND_ARITY:
            raise ModelError(f"unknown bound kind {self.kind!r}")
        if len(self.params) != _BOUND_ARITY[self.kind]:
            raise ModelError(f"{self.kind} bound takes {_BOUND_ARITY[self.kind]} parameters")
        if any(not isinstance(p, int) or p < 0 for p in self.params):
            raise ModelError("bound parameters must be non-negative integers")
        if self.kind == "exponential" and self.params[1] < 2:
            raise ModelError("exponential bound base must be >= 2")

    def __call__(self, n: int) -> int:
        p = self.params
        if self.kind == "constant":
            return p[0]
        if self.kind == "linear":
            return p[0] * n + p[1]
        if self.kind == "polynomial":
            return p[0] * n ** p[1] + p[2]
        return p[0] * p[1] ** n

    def __str__(self) -> str:
        short = {"constant": "constant", "linear": "linear", "polynomial": "poly", "exponential": "exp"}
        return " ".join([short[self.kind], *map(str, self.params)])

    @classmethod
    def parse(cls, text: str) -> BoundSpec:
        toks = text.split()
        if not toks:
            raise ModelError("empty bound specification")
        kind = {"constant": "constant", "const": "constant", "linear": "linear", "lin": "linear",
                "poly": "polynomial", "polynomial": "polynomial", "exp": "exponential",
                "exponential": "exponential"}.get(toks[0])
        if kind is None:
            raise ModelError(f"unknown bound kind {toks[0]!r}")
        try:
            params = tuple(int(t) for t in toks[1:])
        except ValueError:
            raise ModelError(f"bound parameters must be integers: {text!r}") from None
        return cls(kind, params)

    # Arithmetic used by constructions to advertise a dominating bound.

    def as_kind(self, kind: str) -> BoundSpec:
        """A bound of the (not lower) family ``kind`` dominating this one pointwise."""
        if _BOUND_RANK[kind] < _BOUND_RANK[self.kind]:
            raise ModelError(f"cannot express a {self.kind} bound as {kind}")
        b = self
        if b.kind == kind:
            return b
        if b.kind == "constant":
            b = linear(0, b.params[0])
        if kind == "linear":
            return b
        if b.kind == "linear":
            b = polynomial(b.params[0], 1, b.params[1])
        if kind == "polynomial":
            return b
        c, d, c0 = b.params
        # c*n**d + c0 <= C * 2**n with C the maximum of the ratio over n.
        ratio = max((c * n ** d + c0) / 2 ** n for n in range(0, 4 * d + 8))
        return exponential(math.ceil(ratio), 2)

    def grow(self, factor: int = 1, offset: int = 0) -> BoundSpec:
        """Dominate ``factor * s(n) + offset``."""
        p = self.params
        if self.kind == "constant":
            return constant(factor * p[0] + offset)
        if self.kind == "linear":
            return linear(factor * p[0], factor * p[1] + offset)
        if self.kind == "polynomial":
            return polynomial(factor * p[0], p[1], factor * p[2] + offset)
        return exponential(factor * p[0] + offset, p[1])

    def shift(self, k: int) -> BoundSpec:
        """Dominate ``s(n + k)``."""
        p = self.params
        if k == 0 or self.kind == "constant":
            return self
        if self.kind == "linear":
            return linear(p[0], p[0] * k + p[1])
        if self.kind == "polynomial":
            c, d, c0 = p
            return polynomial(c * (k + 1) ** d, d, c * k ** d + c0)
        return exponential(p[0] * p[1] ** k, p[1])

    def stretch(self, k: int) -> BoundSpec:
        """Dominate ``s(k * n)``."""
        p = self.params
        if k <= 1 or self.kind == "constant":
            return self
        if self.kind == "linear":
            return linear(p[0] * k, p[1])
        if self.kind == "polynomial":
            return polynomial(p[0] * k ** p[1], p[1], p[2])
        return exponential(p[0], p[1] ** k)

    def plus(self, other: BoundSpec) -> BoundSpec:
        """Dominate ``s1(n) + s2(n)``."""
        kind = max(self.kind, other.kind, key=_BOUND_RANK.__getitem__)
        a, b = self.as_kind(kind), other.as_kind(kind)
        if kind == "constant":
            return constant(a.params[0] + b.params[0])
        if kind == "linear":
            return linear(a.params[0] + b.params[0], a.params[1] + b.params[1])
        if kind == "polynomial":
            if a.params[1] != b.params[1]:
                d = max(a.params[1], b.params[1])
                # n**e <= n**d + 1 for e <= d
                a = polynomial(a.params[0], d, a.params[2] + a.params[0])
                b = polynomial(b.params[0], d, b.params[2] + b.params[0])
            return polynomial(a.params[0] + b.params[0], a.params[1], a.params[2] + b.params[2])
        base = max(a.params[1], b.params[1])
        return exponential(a.params[0] + b.params[0], base)


def constant(k: int) -> BoundSpec:
    return BoundSpec("constant", (k,))


def linear(c1: int, c0: int) -> BoundSpec:
    return BoundSpec("linear", (c1, c0))


def polynomial(c: int, d: int, c0: int) -> BoundSpec:
    return BoundSpec("polynomial", (c, d, c0))


def exponential(c1: int, c2: int) -> BoundSpec:
    return BoundSpec("exponential", (c1, c2))


@dataclass(frozen=True)
class ReactionAutomaton:
    """The 5-tuple (S, Sigma, A, D0, f) plus an optional declared workspace bound."""

    background: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    reactions: tuple[Reaction, ...]
    initial: Multiset
    final: str
    declared_bound: BoundSpec | None = field(default=None)

    @cached_property
    def by_label(self) -> dict[str, Reaction]:
        return {r.label: r for r in self.reactions}

    def reaction(self, label: str) -> Reaction:
        try:
            return self.by_label[label]
        except KeyError:
            raise ModelError(f"unknown reaction label {label!r}") from None

    def with_bound(self, bound: BoundSpec | None) -> ReactionAutomaton:
        return ReactionAutomaton(self.background, self.input_alphabet, self.reactions,
                                 self.initial, self.final, bound)

    def __str__(self) -> str:
        from .fileformat import serialize_automaton

        return serialize_automaton(self)


def build_automaton(background: Iterable[str], input_alphabet: Iterable[str],
                    reactions: Iterable[Reaction], initial: Multiset, final: str,
                    declared_bound: BoundSpec | None = None) -> ReactionAutomaton:
    """Construct and validate; raises :class:`ModelError` listing every violation."""
    automaton = ReactionAutomaton(tuple(background), tuple(input_alphabet), tuple(reactions),
                                  initial, final, declared_bound)
    problems = validate(automaton)
    if problems:
        raise ModelError("invalid reaction automaton:\n  " + "\n  ".join(problems))
    return automaton


def validate(automaton: ReactionAutomaton) -> list[str]:
    """Return the list of invariant violations; an empty list means the automaton is valid."""
    problems: list[str] = []
    background = set(automaton.background)
    if len(background) != len(automaton.background):
        problems.append("background set lists a symbol more than once")
    for sym in automaton.background:
        try:
            check_symbol(sym)
        except ValueError as exc:
            problems.append(str(exc))
    for a in automaton.input_alphabet:
        if a not in background:
            problems.append(f"input symbol {a!r} not in background")
    if len(set(automaton.input_alphabet)) != len(automaton.input_alphabet):
        problems.append("input alphabet lists a symbol more than once")
    if automaton.final not in background:
        problems.append(f"final symbol {automaton.final!r} not in background")
    for s in automaton.initial:
        if s not in background:
            problems.append(f"initial multiset symbol {s!r} not in background")
    seen: set[str] = set()
    for r in automaton.reactions:
        if r.label in seen:
            problems.append(f"duplicate reaction label {r.label!r}")
        seen.add(r.label)
        try:
            check_symbol(r.label)
        except ValueError as exc:
            problems.append(f"reaction label: {exc}")
        clash = set(r.reactants) & r.inhibitors
        if clash:
            problems.append(f"reaction {r.label}: reactant intersects inhibitor ({' '.join(sorted(clash))})")
        if not r.reactants:
            problems.append(f"reaction {r.label}: empty reactant (maximal parallelism undefined)")
        unknown = r.symbols() - background
        if unknown:
            problems.append(f"reaction {r.label}: symbols not in background ({' '.join(sorted(unknown))})")
    return problems


def reaction_multiset_parts(automaton: ReactionAutomaton, alpha: ReactionMultiset
                            ) -> tuple[Multiset, frozenset[str], Multiset]:
    """(R_alpha, I_alpha, P_alpha) for a multiset of reaction labels."""
    reactants, products = EMPTY, EMPTY
    inhibitors: set[str] = set()
    for label, k in alpha.items():
        r = automaton.reaction(label)
        reactants = msum(reactants, scale(r.reactants, k))
        products = msum(products, scale(r.products, k))
        inhibitors |= r.inhibitors
    return reactants, frozenset(inhibitors), products


def _fresh_label(base: str, taken: set[str]) -> str:
    label, i = base, 1
    while label in taken:
        i += 1
        label = f"{base}{i}"
    taken.add(label)
    return label


def extend_alphabet(automaton: ReactionAutomaton, alphabet: Iterable[str]) -> ReactionAutomaton:
    """Enlarge the input alphabet; each new symbol gets a self-loop that prevents convergence."""
    new_sigma = list(dict.fromkeys(alphabet))
    missing = [a for a in automaton.input_alphabet if a not in new_sigma]
    if missing:
        raise ModelError(f"extension must contain the old alphabet (missing {' '.join(missing)})")
    added = [a for a in new_sigma if a not in automaton.input_alphabet]
    if not added:
        return automaton
    clash = [a for a in added if a in automaton.background]
    if clash:
        raise ModelError(f"new input symbols clash with background symbols: {' '.join(clash)}")
    taken = {r.label for r in automaton.reactions}
    poison = [Reaction(_fresh_label(f"poison.{a}", taken), Multiset({a: 1}), frozenset(), Multiset({a: 1}))
              for a in added]
    sigma = list(automaton.input_alphabet) + added
    return build_automaton(list(automaton.background) + added, sigma,
                           list(automaton.reactions) + poison, automaton.initial,
                           automaton.final, automaton.declared_bound)


def rename_multiset(m: Multiset, mapping: Mapping[str, str]) -> Multiset:
    data: dict[str, int] = {}
    for s, k in m.items():
        t = mapping.get(s, s)
        data[t] = data.get(t, 0) + k
    return Multiset(data)


def rename_reaction(r: Reaction, mapping: Mapping[str, str], label: str | None = None) -> Reaction:
    return Reaction(label or r.label, rename_multiset(r.reactants, mapping),
                    frozenset(mapping.get(s, s) for s in r.inhibitors),
                    rename_multiset(r.products, mapping))


def rename_symbols(automaton: ReactionAutomaton, mapping: Mapping[str, str]) -> ReactionAutomaton:
    """Relabel background symbols; symbols absent from ``mapping`` keep their names."""
    full = {s: mapping.get(s, s) for s in automaton.background}
    if len(set(full.values())) != len(full):
        raise ModelError("symbol renaming is not injective on the background set")
    return build_automaton([full[s] for s in automaton.background],
                           [full[a] for a in automaton.input_alphabet],
                           [rename_reaction(r, full) for r in automaton.reactions],
                           rename_multiset(automaton.initial, full), full[automaton.final],
                           automaton.declared_bound)


@dataclass(frozen=True)
class GSM:
    """Generalized sequential machine; transitions are (p, a, q, output word)."""

    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    output_alphabet: tuple[str, ...]
    transitions: tuple[tuple[str, str, str, Word], ...]
    start: str
    finals: frozenset[str]

    @property
    def lambda_free(self) -> bool:
        return all(x for _, _, _, x in self.transitions)

    def validate(self) -> list[str]:
        problems = []
        states = set(self.states)
        if self.start not in states:
            problems.append(f"start state {self.start!r} unknown")
        for q in self.finals - states:
            problems.append(f"final state {q!r} unknown")
        for p, a, q, x in self.transitions:
            if p not in states or q not in states:
                problems.append(f"transition {p} {a} -> {q}: unknown state")
            if a not in self.input_alphabet:
                problems.append(f"transition {p} {a} -> {q}: input {a!r} not in alphabet")
            for b in x:
                if b not in self.output_alphabet:
                    problems.append(f"transition {p} {a} -> {q}: output {b!r} not in alphabet")
        return problems


def make_gsm(transitions: Iterable[tuple[str, str, str, str | Iterable[str]]], start: str,
             finals: Iterable[str], input_alphabet: Iterable[str] | None = None,
             output_alphabet: Iterable[str] | None = None) -> GSM:
    trans = tuple((p, a, q, as_word(x)) for p, a, q, x in transitions)
    states = list(dict.fromkeys([start, *[t[0] for t in trans], *[t[2] for t in trans], *finals]))
    sigma = tuple(input_alphabet) if input_alphabet is not None else tuple(dict.fromkeys(t[1] for t in trans))
    delta = (tuple(output_alphabet) if output_alphabet is not None
             else tuple(dict.fromkeys(b for t in trans for b in t[3])))
    g = GSM(tuple(states), sigma, delta, trans, start, frozenset(finals))
    problems = g.validate()
    if problems:
        raise ModelError("invalid gsm:\n  " + "\n  ".join(problems))
    return g


@dataclass(frozen=True)
class DFA:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    transition: Mapping[tuple[str, str], str]
    start: str
    finals: frozenset[str]

    def validate(self) -> list[str]:
        problems = []
        if self.start not in self.states:
            problems.append(f"start state {self.start!r} unknown")
        for p in self.states:
            for a in self.alphabet:
                q = self.transition.get((p, a))
                if q is None:
                    problems.append(f"transition ({p}, {a}) undefined")
                elif q not in self.states:
                    problems.append(f"transition ({p}, {a}) -> unknown state {q!r}")
        for q in self.finals:
            if q not in self.states:
                problems.append(f"final state {q!r} unknown")
        return problems

    def accepts(self, word: str | Iterable[str]) -> bool:
        q = self.start
        for a in as_word(word):
            q = self.transition[(q, a)]
        return q in self.finals

    def __hash__(self) -> int:
        return hash((self.states, self.alphabet, frozenset(self.transition.items()), self.start, self.finals))


def make_dfa(states: Iterable[str], alphabet: Iterable[str], transition: Mapping[tuple[str, str], str],
             start: str, finals: Iterable[str]) -> DFA:
    m = DFA(tuple(states), tuple(alphabet), dict(transition), start, frozenset(finals))
    problems = m.validate()
    if problems:
        raise ModelError("invalid DFA:\n  " + "\n  ".join(problems))
    return m


@dataclass(frozen=True)
class Morphism:
    source: tuple[str, ...]
    images: Mapping[str, Word]

    @property
    def lambda_free(self) -> bool:
        return all(self.images[a] for a in self.source)

    @property
    def is_coding(self) -> bool:
        return all(len(self.images[a]) == 1 for a in self.source)

    @property
    def target(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(b for a in self.source for b in self.images[a]))

    def apply(self, word: str | Iterable[str]) -> Word:
        out: list[str] = []
        for a in as_word(word):
            out.extend(self.images[a])
        return tuple(out)

    def __hash__(self) -> int:
        return hash((self.source, frozenset(self.images.items())))


def make_morphism(images: Mapping[str, str | Iterable[str]], target: Iterable[str] | None = None) -> Morphism:
    imgs = {a: as_word(x) for a, x in images.items()}
    return Morphism(tuple(imgs), imgs)
