"""Automaton-to-automaton combinators for the closure constructions.

Every combinator returns a validated :class:`ReactionAutomaton` whose
language (ordinary or lambda-input mode, as documented) is the image of the
operand languages under the corresponding operation.  Fresh symbols come from
a :class:`FreshNamer` so outputs are deterministic.

Several constructions as originally published do not compute the intended
language in every case.  Where that happens the combinator applies a small
repair by default and keeps the unrepaired reaction set available through
``literal=True``; the docstrings say what each repair adds.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence

from .errors import ConstructionError
from .model import (
    DFA,
    GSM,
    BoundSpec,
    Morphism,
    Reaction,
    ReactionAutomaton,
    as_word,
    build_automaton,
    constant,
    extend_alphabet,
    linear,
    polynomial,
    rename_multiset,
    validate,
)
from .multiset import EMPTY, Multiset, msum, stm
from .semantics import LAMBDA, ORDINARY, normalize_mode

SymbolsLike = Multiset | Iterable[str] | str | None


class FreshNamer:
    """Deterministic generator of symbol names distinct from everything seen so far."""

    def __init__(self, taken: Iterable[str] = ()):
        self.taken: set[str] = set(taken)

    def reserve(self, names: Iterable[str]) -> None:
        self.taken.update(names)

    def fresh(self, base: str, tag: str = "") -> str:
        """``base`` if unused, else ``base.tag``, else ``base.tagK`` for the least K >= 2
        (``base.K`` from K = 1 when no tag is given)."""
        if base not in self.taken:
            self.taken.add(base)
            return base
        if tag:
            cand = f"{base}.{tag}"
            k = 2
            while cand in self.taken:
                cand = f"{base}.{tag}{k}"
                k += 1
        else:
            k = 1
            cand = f"{base}.{k}"
            while cand in self.taken:
                k += 1
                cand = f"{base}.{k}"
        self.taken.add(cand)
        return cand


def _ms(x: SymbolsLike) -> Multiset:
    if x is None:
        return EMPTY
    if isinstance(x, Multiset):
        return x
    if isinstance(x, str):
        return Multiset([x])
    return Multiset(list(x))


class _Builder:
    """Accumulates background symbols (in order) and reactions with unique labels."""

    def __init__(self):
        self.background: dict[str, None] = {}
        self.reactions: list[Reaction] = []
        self.labels: set[str] = set()

    def symbols(self, names: Iterable[str]) -> None:
        for s in names:
            self.background.setdefault(s)

    def add(self, label: str, reactants: SymbolsLike, inhibitors: Iterable[str] = (),
            products: SymbolsLike = None) -> Reaction:
        if label in self.labels:
            raise ConstructionError(f"internal error: duplicate reaction label {label!r}")
        self.labels.add(label)
        r = Reaction(label, _ms(reactants), frozenset(inhibitors), _ms(products))
        self.symbols(sorted(r.symbols()))
        self.reactions.append(r)
        return r

    def copy(self, automaton: ReactionAutomaton, mapping: Mapping[str, str], prefix: str,
             extra_inhibitors: Iterable[str] = (), extra_products: SymbolsLike = None,
             inhibitors_for=None) -> None:
        """Add h(r) for every reaction r, with extra inhibitors and products.

        ``inhibitors_for`` optionally maps a reaction to further inhibitors.
        """
        extra_i = frozenset(extra_inhibitors)
        extra_p = _ms(extra_products)
        for r in automaton.reactions:
            more = frozenset(inhibitors_for(r)) if inhibitors_for else frozenset()
            self.add(f"{prefix}.{r.label}", rename_multiset(r.reactants, mapping),
                     frozenset(mapping.get(s, s) for s in r.inhibitors) | extra_i | more,
                     msum(rename_multiset(r.products, mapping), extra_p))

    def build(self, sigma: Sequence[str], initial: Multiset, final: str,
              bound: BoundSpec | None) -> ReactionAutomaton:
        self.symbols(sigma)
        self.symbols(initial)
        self.symbols([final])
        return build_automaton(list(self.background), list(sigma), self.reactions, initial, final, bound)


def _grow(bound: BoundSpec | None, factor: int, offset: int) -> BoundSpec | None:
    return None if bound is None else bound.grow(factor, offset)


def _plus(b1: BoundSpec | None, b2: BoundSpec | None, offset: int) -> BoundSpec | None:
    if b1 is None or b2 is None:
        return None
    return b1.plus(b2).grow(1, offset)


def _require_valid(automaton: ReactionAutomaton) -> None:
    problems = validate(automaton)
    if problems:
        raise ConstructionError("operand is not a valid automaton: " + "; ".join(problems))


def _primed(automaton: ReactionAutomaton, namer: FreshNamer, suffix: str = "'") -> dict[str, str]:
    """h(a) = a' for input symbols (fresh), identity elsewhere."""
    return {a: namer.fresh(a + suffix) for a in automaton.input_alphabet}


def _seal(b: _Builder, final: str, sigma: Sequence[str], namer: FreshNamer, inputs_consumed_by=None) -> None:
    """Make a lambda-mode acceptor reject input that arrives after the final symbol exists.

    Reactions producing ``final`` are inhibited by raw input and by a fresh
    blocker z; reactions consuming raw input are inhibited by ``final``; and
    (final a) -> z for every input symbol a, then (final z) -> z, so a late
    symbol removes every copy of ``final`` and prevents it from being made again.
    """
    z = namer.fresh("z")
    sig = frozenset(sigma)
    out = []
    for r in b.reactions:
        inh = set(r.inhibitors)
        if final in r.products:
            inh |= sig | {z}
        if sig & set(r.reactants) and final not in r.reactants:
            inh.add(final)
        out.append(Reaction(r.label, r.reactants, frozenset(inh), r.products))
    b.reactions = out
    for a in sigma:
        b.add(f"seal.{a}", [final, a], (), [z])
    label = "seal.z"
    while label in b.labels:
        label += "'"
    b.add(label, [final, z], (), [z])


# Normal forms


def to_normal_form(automaton: ReactionAutomaton) -> ReactionAutomaton:
    """An equivalent automaton whose final symbol f' occurs only in converged states (ordinary mode).

    Input symbols are primed one step late; p0 turns into p1 at the first step
    without input; each copied reaction emits a clock symbol c that is erased
    one step later, so (f, {c, p0}, f') fires only once the embedded process
    has stopped and the input is over.
    """
    _require_valid(automaton)
    namer = FreshNamer(automaton.background)
    h = _primed(automaton, namer)
    p0, p1, c, d, f2 = (namer.fresh(x) for x in ("p0", "p1", "c", "d", "f'"))
    sigma = list(automaton.input_alphabet)
    b = _Builder()
    b.symbols(automaton.background)
    b.copy(automaton, h, "A", extra_inhibitors=[f2], extra_products=[c])
    for a in sigma:
        b.add(f"in.{a}", [a], (), [h[a]])
    b.add("a1", [p0], sigma, [p1])
    b.add("a2", [c], (), None)
    b.add("a3", [automaton.final], [c, p0], [f2])
    b.add("a4", [d], (), rename_multiset(automaton.initial, h))
    return b.build(sigma, _ms([d, p0]), f2, _grow(automaton.declared_bound, 2, 6))


def to_lambda_normal_form(automaton: ReactionAutomaton, literal: bool = False) -> ReactionAutomaton:
    """An automaton with the same lambda-mode language whose final symbol occurs only in converged states.

    On a step without input, p0 either becomes p1 (the input is over) or
    stays (a5).  Repair: the literal reaction set keeps f' when input
    arrives after the guess "input is over" has already produced f', so it
    accepts every extension of an accepted word; the repaired version seals
    the final symbol (see :func:`_seal`).
    """
    _require_valid(automaton)
    namer = FreshNamer(automaton.background)
    h = _primed(automaton, namer)
    p0, p1, c, d, f2 = (namer.fresh(x) for x in ("p0", "p1", "c", "d", "f'"))
    sigma = list(automaton.input_alphabet)
    b = _Builder()
    b.symbols(automaton.background)
    b.copy(automaton, h, "A", extra_inhibitors=[f2], extra_products=[c])
    for a in sigma:
        b.add(f"in.{a}", [a], [p1], [h[a]])
    b.add("a1", [p0], sigma, [p1])
    b.add("a2", [c], (), None)
    b.add("a3", [automaton.final], [c, p0, *sigma], [f2])
    b.add("a4", [d], (), rename_multiset(automaton.initial, h))
    b.add("a5", [p0], (), [p0])
    if not literal:
        _seal(b, f2, sigma, namer)
    return b.build(sigma, _ms([d, p0]), f2, _grow(automaton.declared_bound, 2, 6))


def normal_form_for(automaton: ReactionAutomaton, mode: str) -> ReactionAutomaton:
    return to_lambda_normal_form(automaton) if normalize_mode(mode) == LAMBDA else to_normal_form(automaton)


# Binary combinators


def _align(a1: ReactionAutomaton, a2: ReactionAutomaton) -> tuple[ReactionAutomaton, ReactionAutomaton]:
    """Extend both operands to the union of their input alphabets."""
    s1, s2 = list(a1.input_alphabet), list(a2.input_alphabet)
    if s1 == s2:
        return a1, a2
    joint = list(dict.fromkeys(s1 + s2))
    try:
        return extend_alphabet(a1, joint), extend_alphabet(a2, joint)
    except Exception as exc:
        raise ConstructionError(f"alphabet mismatch: {exc}") from None


class _Pair:
    """Two operands with internals renamed apart: h_i maps input a to a(i), other symbols s to s.i."""

    def __init__(self, a1: ReactionAutomaton, a2: ReactionAutomaton, reserved: Iterable[str] = ()):
        self.ops = (a1, a2)
        self.sigma = list(a1.input_alphabet)
        self.namer = FreshNamer(self.sigma)
        self.namer.reserve(reserved)
        self.h: list[dict[str, str]] = []
        for i, op in enumerate(self.ops, start=1):
            m = {s: self.namer.fresh(f"{s}.{i}") for s in op.background if s not in self.sigma}
            self.h.append(m)
        for i, m in enumerate(self.h, start=1):
            for a in self.sigma:
                m[a] = self.namer.fresh(f"{a}({i})")

    def final(self, i: int) -> str:
        return self.h[i - 1][self.ops[i - 1].final]

    def copies(self, i: int) -> list[str]:
        return [self.h[i - 1][a] for a in self.sigma]

    def init(self, i: int) -> Multiset:
        return rename_multiset(self.ops[i - 1].initial, self.h[i - 1])

    def builder(self) -> _Builder:
        b = _Builder()
        for i, (op, m) in enumerate(zip(self.ops, self.h), start=1):
            b.symbols(m.get(s, s) for s in op.background)
        return b


def _prepare_pair(a1, a2, mode):
    _require_valid(a1)
    _require_valid(a2)
    a1, a2 = _align(a1, a2)
    return normal_form_for(a1, mode), normal_form_for(a2, mode)


def union(a1: ReactionAutomaton, a2: ReactionAutomaton, mode: str = ORDINARY,
          literal: bool = False) -> ReactionAutomaton:
    """L(A1) | L(A2).  Each input a is copied to a(1) a(2); (f_i) -> f.

    In lambda mode the repaired version also inhibits (f_i) -> f by pending
    copies and seals the final symbol.
    """
    mode = normalize_mode(mode)
    n1, n2 = _prepare_pair(a1, a2, mode)
    P = _Pair(n1, n2)
    d, f = P.namer.fresh("d"), P.namer.fresh("f")
    b = P.builder()
    for i in (1, 2):
        b.copy(P.ops[i - 1], P.h[i - 1], f"A{i}", extra_inhibitors=[f])
    for a in P.sigma:
        b.add(f"in.{a}", [a], (), [P.h[0][a], P.h[1][a]])
    repair = mode == LAMBDA and not literal
    pending = P.copies(1) + P.copies(2) if repair else []
    for i in (1, 2):
        b.add(f"fin{i}", [P.final(i)], pending, [f])
    b.add("start", [d], (), msum(P.init(1), P.init(2)))
    if repair:
        _seal(b, f, P.sigma, P.namer)
    return b.build(P.sigma, _ms([d]), f, _plus(n1.declared_bound, n2.declared_bound, 4))


def intersection(a1: ReactionAutomaton, a2: ReactionAutomaton, mode: str = ORDINARY,
                 literal: bool = False) -> ReactionAutomaton:
    """L(A1) & L(A2).

    Ordinary mode: the union construction with (f_1 f_2) -> f.  Lambda mode:
    each input a becomes primed copies a(1)' a(2)' that each wait a
    nondeterministic number of steps before turning into a(i); operand i is
    frozen while the other operand's primed copy is pending.  Repair: an
    operand can reach its final symbol while its own copy a(i) is still
    unread and frozen, and in the literal version (f_1 f_2) -> f then races
    the operand's own rejection; and a new input can be copied in while an
    operand still holds the previous copy a(i), so the operand sees two
    letters at once.  The repaired version inhibits both (f_1 f_2) -> f and
    the input copying by unread copies, and seals the final symbol.
    """
    mode = normalize_mode(mode)
    n1, n2 = _prepare_pair(a1, a2, mode)
    P = _Pair(n1, n2)
    d, f = P.namer.fresh("d"), P.namer.fresh("f")
    b = P.builder()
    if mode == ORDINARY:
        for i in (1, 2):
            b.copy(P.ops[i - 1], P.h[i - 1], f"A{i}", extra_inhibitors=[f])
        for a in P.sigma:
            b.add(f"in.{a}", [a], (), [P.h[0][a], P.h[1][a]])
        b.add("fin", [P.final(1), P.final(2)], (), [f])
        b.add("start", [d], (), msum(P.init(1), P.init(2)))
        return b.build(P.sigma, _ms([d]), f, _plus(n1.declared_bound, n2.declared_bound, 4))
    primed = [{a: P.namer.fresh(f"{P.h[i][a]}'") for a in P.sigma} for i in (0, 1)]
    all_primed = list(primed[0].values()) + list(primed[1].values())
    for i in (1, 2):
        other = list(primed[2 - i].values())
        b.copy(P.ops[i - 1], P.h[i - 1], f"A{i}", extra_inhibitors=[*P.sigma, *other, f])
    unread = [] if literal else P.copies(1) + P.copies(2)
    for a in P.sigma:
        b.add(f"in.{a}", [a], all_primed + unread, [primed[0][a], primed[1][a]])
    for i in (1, 2):
        for a in P.sigma:
            b.add(f"go{i}.{a}", [primed[i - 1][a]], P.sigma, [P.h[i - 1][a]])
            b.add(f"wait{i}.{a}", [primed[i - 1][a]], P.sigma, [primed[i - 1][a]])
    b.add("start", [d], (), msum(P.init(1), P.init(2)))
    b.add("fin", [P.final(1), P.final(2)], [*P.sigma, *all_primed, *unread], [f])
    if not literal:
        _seal(b, f, P.sigma, P.namer)
    return b.build(P.sigma, _ms([d]), f, _plus(n1.declared_bound, n2.declared_bound, 6))


def concatenation(a1: ReactionAutomaton, a2: ReactionAutomaton, mode: str = ORDINARY,
                  literal: bool = False) -> ReactionAutomaton:
    """L(A1) L(A2).  Phase p1 routes input to A1; (p1 a) -> p2 a(2) + D0(2) starts A2.

    Repair: the literal version only starts A2 on an input symbol, so it
    misses L(A1) when the empty word is in L(A2).  The repaired version adds
    (p1, Sigma) -> p2 + D0(2), which in ordinary mode fires at the first step
    without input; in lambda mode a self-loop (p1, Sigma) -> p1 makes the
    switch a nondeterministic choice on lambda steps, the final reaction is
    inhibited by unread copies and the final symbol is sealed.
    """
    mode = normalize_mode(mode)
    n1, n2 = _prepare_pair(a1, a2, mode)
    P = _Pair(n1, n2)
    p1, p2, d, f = (P.namer.fresh(x) for x in ("p1", "p2", "d", "f"))
    b = P.builder()
    for i in (1, 2):
        b.copy(P.ops[i - 1], P.h[i - 1], f"A{i}", extra_inhibitors=[f])
    for a in P.sigma:
        b.add(f"in1.{a}", [a], [p2], [P.h[0][a]])
    b.add("start1", [d], (), P.init(1))
    for a in P.sigma:
        b.add(f"in2.{a}", [a], [p1], [P.h[1][a]])
    for a in P.sigma:
        b.add(f"switch.{a}", [p1, a], (), msum(_ms([p2, P.h[1][a]]), P.init(2)))
    lam_repair = mode == LAMBDA and not literal
    b.add("fin", [P.final(1), P.final(2)], P.copies(1) + P.copies(2) if lam_repair else (), [f])
    if not literal:
        b.add("switch", [p1], P.sigma, msum(_ms([p2]), P.init(2)))
        if mode == LAMBDA:
            b.add("stay", [p1], P.sigma, [p1])
            _seal(b, f, P.sigma, P.namer)
    return b.build(P.sigma, _ms([d, p1]), f, _plus(n1.declared_bound, n2.declared_bound, 6))


def shuffle(a1: ReactionAutomaton, a2: ReactionAutomaton, mode: str = ORDINARY,
            literal: bool = False) -> ReactionAutomaton:
    """Shuffle of L(A1) and L(A2).  Each input goes to exactly one operand; operand i is
    frozen while a symbol for the other operand is present.  In lambda mode the repaired version
    inhibits (f_1 f_2) -> f by unread copies and seals the final symbol."""
    mode = normalize_mode(mode)
    n1, n2 = _prepare_pair(a1, a2, mode)
    P = _Pair(n1, n2)
    d, f = P.namer.fresh("d"), P.namer.fresh("f")
    b = P.builder()
    for i in (1, 2):
        b.copy(P.ops[i - 1], P.h[i - 1], f"A{i}", extra_inhibitors=[*P.copies(3 - i), f])
    for i in (1, 2):
        for a in P.sigma:
            b.add(f"in{i}.{a}", [a], (), [P.h[i - 1][a]])
    b.add("start", [d], (), msum(P.init(1), P.init(2)))
    repair = mode == LAMBDA and not literal
    b.add("fin", [P.final(1), P.final(2)], P.copies(1) + P.copies(2) if repair else (), [f])
    if repair:
        _seal(b, f, P.sigma, P.namer)
    return b.build(P.sigma, _ms([d]), f, _plus(n1.declared_bound, n2.declared_bound, 4))


# Unary combinators


def _check_x(automaton: ReactionAutomaton, x) -> tuple[str, ...]:
    xw = as_word(x)
    if not xw:
        raise ConstructionError("derivative needs a non-empty word x")
    bad = [a for a in xw if a not in automaton.input_alphabet]
    if bad:
        raise ConstructionError(f"symbols of x not in the input alphabet: {' '.join(bad)}")
    return xw


def lra_to_lambda(automaton: ReactionAutomaton, literal: bool = False) -> ReactionAutomaton:
    """An automaton whose lambda-mode language is the ordinary language of ``automaton``.

    Input letters are primed only while p1 is absent, and p0 becomes p1 at the
    first step without input, so a lambda before a letter strands that letter.
    Repair: the literal start reaction (d, Sigma) -> h(D0) waits for a step
    without input and so desynchronizes the embedded process; the repaired
    version starts it unconditionally and seals the final symbol.
    """
    _require_valid(automaton)
    nf = to_normal_form(automaton)
    namer = FreshNamer(nf.background)
    h = _primed(nf, namer)
    p0, p1, d, f2 = (namer.fresh(x) for x in ("p0", "p1", "d", "f'"))
    sigma = list(nf.input_alphabet)
    b = _Builder()
    b.symbols(nf.background)
    b.copy(nf, h, "A", extra_inhibitors=[f2])
    for a in sigma:
        b.add(f"in.{a}", [a], [p1], [h[a]])
    b.add("a1", [d], sigma if literal else (), rename_multiset(nf.initial, h))
    b.add("a2", [p0], sigma, [p1])
    b.add("a3", [nf.final], sigma, [f2])
    if not literal:
        _seal(b, f2, sigma, namer)
    return b.build(sigma, _ms([d, p0]), f2, _grow(nf.declared_bound, 1, 4))


def right_derivative(automaton: ReactionAutomaton, x, mode: str = ORDINARY,
                     literal: bool = False) -> ReactionAutomaton:
    """{w | wx in L(A)}.  After the input, q_0 .. q_n inject the primed letters of x.

    Repair: the literal initial state h(D0) q0 lets the embedded process take
    its first step with no letter, which a normal-form operand reads as the
    end of its input (ordinary mode) or as a forced leading lambda (lambda
    mode).  The repaired version starts it one step late through
    (d) -> h(D0).  In lambda mode it also inhibits the final reaction by
    unread primed letters, which otherwise races the operand's own
    rejection of a late letter, and seals the final symbol.
    """
    mode = normalize_mode(mode)
    _require_valid(automaton)
    xw = _check_x(automaton, x)
    nf = normal_form_for(automaton, mode)
    namer = FreshNamer(nf.background)
    h = _primed(nf, namer)
    sigma = list(nf.input_alphabet)
    n = len(xw)
    q = [namer.fresh(f"q{i}") for i in range(n + 1)]
    f2 = namer.fresh("f'")
    b = _Builder()
    b.symbols(nf.background)
    b.copy(nf, h, "A", extra_inhibitors=[f2])
    for a in sigma:
        b.add(f"in.{a}", [a], q[1:] if mode == LAMBDA else (), [h[a]])
    for i in range(n):
        b.add(f"x{i + 1}", [q[i]], sigma, [h[xw[i]], q[i + 1]])
    if mode == LAMBDA:
        for i in range(n + 1):
            b.add(f"wait{i}", [q[i]], sigma, [q[i]])
    unread = [h[a] for a in sigma] if mode == LAMBDA and not literal else []
    b.add("fin", [nf.final, q[n]], [*sigma, *unread], [f2])
    init = msum(rename_multiset(nf.initial, h), _ms([q[0]]))
    if not literal:
        d = namer.fresh("d")
        b.add("start", [d], (), rename_multiset(nf.initial, h))
        init = _ms([d, q[0]])
    if mode == LAMBDA and not literal:
        _seal(b, f2, sigma, namer)
    return b.build(sigma, init, f2, _grow(nf.declared_bound.shift(n) if nf.declared_bound else None, 1, n + 3))


def left_derivative(automaton: ReactionAutomaton, x, mode: str = ORDINARY,
                    literal: bool = False) -> ReactionAutomaton:
    """{w | xw in L(A)}.

    Ordinary mode: q_0 .. q_n inject x while every input letter climbs a
    ladder of delay copies a(1), a(2), ... before the embedded process sees
    it.  Repair: with n levels the first letter of w reaches the embedded
    process together with the last letter of x; the repaired version uses
    n + 1 levels.  Lambda mode: x is injected by lambda steps before any
    input; the repaired version starts the embedded process one step late,
    inhibits the final reaction by unread primed letters and seals the final
    symbol (see :func:`right_derivative`).
    """
    mode = normalize_mode(mode)
    _require_valid(automaton)
    xw = _check_x(automaton, x)
    nf = normal_form_for(automaton, mode)
    namer = FreshNamer(nf.background)
    sigma = list(nf.input_alphabet)
    n = len(xw)
    q = [namer.fresh(f"q{i}") for i in range(n + 1)]
    b = _Builder()
    b.symbols(nf.background)
    bound = _grow(nf.declared_bound.shift(n) if nf.declared_bound else None, 1, 2 * n + 4)
    if mode == ORDINARY:
        levels = n if literal else n + 1
        lev = [{a: namer.fresh(f"{a}({i})") for a in sigma} for i in range(1, levels + 1)]
        top = lev[-1]
        d = namer.fresh("d")
        b.copy(nf, top, "A")
        for i in range(n):
            b.add(f"x{i + 1}", [q[i]], (), [top[xw[i]], q[i + 1]])
        for a in sigma:
            b.add(f"in.{a}", [a], (), [lev[0][a]])
        for i in range(levels - 1):
            for a in sigma:
                b.add(f"up{i + 1}.{a}", [lev[i][a]], (), [lev[i + 1][a]])
        b.add("start", [d], (), rename_multiset(nf.initial, top))
        bound = _grow(nf.declared_bound.shift(n) if nf.declared_bound else None, 1, (n + 2) * (n + 1) + 2)
        return b.build(sigma, _ms([d, q[0]]), nf.final, bound)
    h = _primed(nf, namer)
    f2 = namer.fresh("f'")
    b.copy(nf, h, "A", extra_inhibitors=[f2])
    for a in sigma:
        b.add(f"in.{a}", [a], q[:n], [h[a]])
    for i in range(n):
        b.add(f"x{i + 1}", [q[i]], sigma, [h[xw[i]], q[i + 1]])
    for i in range(n + 1):
        b.add(f"wait{i}", [q[i]], sigma, [q[i]])
    init = msum(rename_multiset(nf.initial, h), _ms([q[0]]))
    if literal:
        b.add("fin", [nf.final, q[n]], sigma, [f2])
    else:
        d = namer.fresh("d")
        b.add("start", [d], (), rename_multiset(nf.initial, h))
        init = _ms([d, q[0]])
        b.add("fin", [nf.final, q[n]], [*sigma, *(h[a] for a in sigma)], [f2])
        _seal(b, f2, sigma, namer)
    return b.build(sigma, init, f2, bound)


def gsm_image(automaton: ReactionAutomaton, g: GSM, literal: bool = False) -> ReactionAutomaton:
    """g(L(A)) for a lambda-free gsm g (ordinary mode).

    Output symbols double every step, so after a block x has been fed the
    buffer holds stm(x); (p c + stm(x)) -> q d a' then hands the letter a to
    the embedded process, which is frozen by c while a block is being read.
    Transcription: the handed-over letter is the primed a' the embedded
    reactions consume, and the inhibitor written Sigma in (d, Sigma) -> and
    in the final reaction is read as the output alphabet.  Repair: with the
    empty input the literal version never releases c, so it rejects the
    empty word even when it is in g(L(A)); the repaired version adds
    (c, Delta) -> lambda.  Doubling reactions are only emitted for output
    symbols that occur before the last position of some block; any other
    symbol left unmatched turns into a junk symbol that blocks the final
    reaction, which keeps dead runs small.
    """
    if not g.lambda_free:
        raise ConstructionError("gsm_image needs a lambda-free gsm (every output non-empty)")
    problems = g.validate()
    if problems:
        raise ConstructionError("invalid gsm: " + "; ".join(problems))
    _require_valid(automaton)
    missing = set(automaton.input_alphabet) - set(g.input_alphabet)
    if missing:
        raise ConstructionError(f"gsm input alphabet lacks {' '.join(sorted(missing))}")
    nf = to_normal_form(automaton)
    delta = list(g.output_alphabet)
    sigma = list(nf.input_alphabet)
    # Output symbols may reuse raw input names of A (unused by its reactions) but no other symbol.
    internal = [s for s in nf.background if s not in sigma]
    namer = FreshNamer(set(nf.background) | set(delta))
    clash = {s: namer.fresh(s) for s in internal if s in delta}
    h = _primed(nf, namer)
    h.update(clash)
    state = {p: namer.fresh(p, "g") for p in g.states}
    c, d, f2 = (namer.fresh(x) for x in ("c", "d", "f'"))
    b = _Builder()
    b.symbols(h.get(s, s) for s in nf.background if s not in sigma)
    b.copy(nf, h, "A", extra_inhibitors=[c, f2])
    # only symbols fed before the end of a block have to wait in the doubling buffer
    doubling = delta if literal else [y for y in delta if any(y in x[:-1] for *_, x in g.transitions)]
    for y in doubling:
        b.add(f"dbl.{y}", [y], (), [y, y])
    junk = []
    if not literal:
        z = namer.fresh("z")
        junk = [z]
        for y in delta:
            if y not in doubling:
                b.add(f"drop.{y}", [y], (), [z])
    handed = (lambda a: a) if literal else (lambda a: h[a])
    for k, (p, a, q, x) in enumerate(g.transitions, start=1):
        if a not in h:
            continue  # input letter A never reads
        b.add(f"t{k}", msum(_ms([state[p], c]), stm(x)), (), [state[q], d, handed(a)])
        if len(x) == 1:
            b.add(f"t{k}.d", msum(_ms([state[p], d]), stm(x)), (), [state[q], d, handed(a)])
    stop = sigma if literal else delta
    for k, p in enumerate(sorted(g.finals), start=1):
        b.add(f"fin{k}", [state[p], h.get(nf.final, nf.final)], [*stop, c, d, *junk], [f2])
    b.add("c.keep", [c], (), [c])
    b.add("d.next", [d], (), [c])
    b.add("d.stop", [d], stop, None)
    if not literal:
        b.add("c.stop", [c], delta, None)
    longest = max((len(x) for *_, x in g.transitions), default=1)
    bound = _grow(nf.declared_bound, 1, 2 ** (longest + 1) + 4)
    return b.build(delta, msum(rename_multiset(nf.initial, h), _ms([c, state[g.start]])), f2, bound)


def _one_state_gsm(h: Morphism, sigma: Sequence[str]) -> GSM:
    from .model import make_gsm

    return make_gsm([("q", a, "q", h.images[a]) for a in sigma], "q", ["q"], sigma, h.target)


def morphism_image(automaton: ReactionAutomaton, h: Morphism, mode: str = ORDINARY) -> ReactionAutomaton:
    """h(L(A)) for a lambda-free morphism h.

    Ordinary mode runs :func:`gsm_image` with a one-state gsm.  Lambda mode
    with a coding uses the direct construction (h(a)) -> a'; other
    lambda-free morphisms are decomposed as coding(inverse(L) & R) over the
    alphabet of positions [a, i] of the images.
    """
    mode = normalize_mode(mode)
    _require_valid(automaton)
    missing = [a for a in automaton.input_alphabet if a not in h.images]
    if missing:
        raise ConstructionError(f"morphism undefined on {' '.join(missing)}")
    sigma = list(automaton.input_alphabet)
    if not all(h.images[a] for a in sigma):
        raise ConstructionError("morphism_image needs a lambda-free morphism")
    if mode == ORDINARY:
        return gsm_image(automaton, _one_state_gsm(h, sigma))
    if all(len(h.images[a]) == 1 for a in sigma):
        return _coding_lambda(automaton, h)
    return _lambda_free_morphism_lambda(automaton, h)


def _coding_lambda(automaton: ReactionAutomaton, h: Morphism) -> ReactionAutomaton:
    nf = to_lambda_normal_form(automaton)
    sigma = list(nf.input_alphabet)
    delta = list(dict.fromkeys(h.images[a][0] for a in sigma))
    internal = [s for s in nf.background if s not in sigma]
    namer = FreshNamer(set(nf.background) | set(delta))
    g = _primed(nf, namer)
    g.update({s: namer.fresh(s) for s in internal if s in delta})
    d = namer.fresh("d")
    b = _Builder()
    b.symbols(g.get(s, s) for s in nf.background if s not in sigma)
    b.copy(nf, g, "A")
    for a in sigma:
        b.add(f"in.{a}", [h.images[a][0]], (), [g[a]])
    b.add("start", [d], (), rename_multiset(nf.initial, g))
    return b.build(delta, _ms([d]), g.get(nf.final, nf.final), _grow(nf.declared_bound, 1, 2))


def _lambda_free_morphism_lambda(automaton: ReactionAutomaton, h: Morphism) -> ReactionAutomaton:
    from .model import make_dfa, make_morphism

    sigma = list(automaton.input_alphabet)
    pos = {(a, i): f"{a}[{i + 1}]" for a in sigma for i in range(len(h.images[a]))}
    gamma = list(pos.values())
    # [a,1] -> a, later positions erased
    erase = make_morphism({pos[k]: (k[0] if k[1] == 0 else "<eps>") for k in pos})
    pre = inverse_morphism_lambda(automaton, erase)
    # R = ( [a,1] [a,2] ... [a,|h(a)|] )*
    states = ["r0"] + [f"r.{a}.{i}" for (a, i) in pos if i > 0]
    sink = "r.sink"
    trans = {}
    for st in states + [sink]:
        for y in gamma:
            trans[(st, y)] = sink
    for (a, i), y in pos.items():
        src = "r0" if i == 0 else f"r.{a}.{i}"
        last = i == len(h.images[a]) - 1
        trans[(src, y)] = "r0" if last else f"r.{a}.{i + 1}"
    regular = lra_to_lambda(from_dfa(make_dfa(states + [sink], gamma, trans, "r0", ["r0"])))
    restricted = intersection(pre, regular, LAMBDA)
    coding = make_morphism({pos[k]: h.images[k[0]][k[1]] for k in pos})
    return _coding_lambda(restricted, coding)


def inverse_morphism_lambda(automaton: ReactionAutomaton, h: Morphism, literal: bool = False) -> ReactionAutomaton:
    """h^{-1}(L_lambda(A)) for an arbitrary morphism h (lambda mode).

    A letter a emits the first primed letter of h(a) at once and a ladder
    q_(a,i) emits the rest on later steps, each ladder rung being allowed to
    wait.  Letters with an empty image are erased while the embedded
    process is frozen.  Repair: in the literal version a new input letter is
    converted while a ladder is still pending, interleaving the images of
    consecutive letters, and (f, Q + Sigma, f') can fire while the image of
    the last letter is still unread.  The repaired version inhibits
    conversion by the ladder symbols, inhibits the final reaction by unread
    image letters, and seals the final symbol.  It also holds back (d) ->
    g(D0) while an erasable letter is present: a leading erased letter would
    otherwise force the embedded process into a lambda step before it sees
    the first image letter.
    """
    _require_valid(automaton)
    delta = list(automaton.input_alphabet)
    src = list(h.source)
    for y in (y for a in src for y in h.images[a]):
        if y not in delta:
            raise ConstructionError(f"morphism image symbol {y!r} not in the input alphabet of A")
    nf = to_lambda_normal_form(automaton)
    internal = [s for s in nf.background if s not in delta]
    namer = FreshNamer(set(nf.background) | set(src))
    g = _primed(nf, namer)
    g.update({s: namer.fresh(s) for s in internal if s in src})
    ladders = {(a, i): namer.fresh(f"q.{a}.{i}") for a in src for i in range(1, len(h.images[a]))}
    ladder_syms = list(ladders.values())
    d, f2 = namer.fresh("d"), namer.fresh("f'")
    erased = [a for a in src if not h.images[a]]
    b = _Builder()
    b.symbols(g.get(s, s) for s in nf.background if s not in delta)
    b.copy(nf, g, "A", extra_inhibitors=[*erased, f2])
    block = () if literal else ladder_syms
    for a in src:
        img = [g[y] for y in h.images[a]]
        if not img:
            b.add(f"in.{a}", [a], (), None)
        elif len(img) == 1:
            b.add(f"in.{a}", [a], block, [img[0]])
        else:
            b.add(f"in.{a}", [a], block, [ladders[(a, 1)], img[0]])
            for i in range(1, len(img)):
                nxt = [ladders[(a, i + 1)], img[i]] if i + 1 < len(img) else [img[i]]
                b.add(f"lad.{a}.{i}", [ladders[(a, i)]], src, nxt)
    for k, qs in enumerate(ladder_syms, start=1):
        b.add(f"wait{k}", [qs], (), [qs])
    b.add("start", [d], () if literal else erased, rename_multiset(nf.initial, g))
    fin_final = g.get(nf.final, nf.final)
    unread = [] if literal else [g[y] for y in delta]
    b.add("fin", [fin_final], [*ladder_syms, *src, *unread], [f2])
    if not literal:
        _seal(b, f2, src, namer)
    longest = max((len(h.images[a]) for a in src), default=1)
    bound = None
    if nf.declared_bound is not None:
        bound = nf.declared_bound.stretch(max(longest, 1)).grow(1, 2 * longest + 4)
    return b.build(src, _ms([d]), f2, bound)


def kleene_star_lambda(automaton: ReactionAutomaton, literal: bool = False,
                       _allow_empty: bool = True) -> ReactionAutomaton:
    """L_lambda(A)* in lambda mode.

    Each iteration runs h(D0) under a marker e; (e f) -> f'' ends it, the
    residue is swept by (s, e) -> lambda, and f'' either restarts
    (f'', {p1}) -> h(D0) e or accepts (f'', Sigma p0) -> f'.  Repairs: the
    f-producing reactions are inhibited by raw input instead of being
    duplicated; (d, Sigma) -> f'' lets the empty word be accepted; (e f) is
    also inhibited by pending primed letters, which would otherwise be swept
    away unread; and the final symbol is sealed.
    """
    _require_valid(automaton)
    nf = to_lambda_normal_form(automaton)
    namer = FreshNamer(nf.background)
    h = _primed(nf, namer)
    sigma = list(nf.input_alphabet)
    primed = [h[a] for a in sigma]
    p0, p1, d, e, f3, f2 = (namer.fresh(x) for x in ("p0", "p1", "d", "e", "f''", "f'"))
    b = _Builder()
    b.symbols(nf.background)
    f = nf.final
    start = msum(rename_multiset(nf.initial, h), _ms([e]))
    if literal:
        b.copy(nf, h, "A", extra_inhibitors=[f2, f3])
        for r in nf.reactions:
            if f in r.products:
                b.add(f"A.{r.label}.s", rename_multiset(r.reactants, h),
                      frozenset(h.get(s, s) for s in r.inhibitors) | {*sigma, f2, f3},
                      rename_multiset(r.products, h))
    else:
        b.copy(nf, h, "A", extra_inhibitors=[f2, f3],
               inhibitors_for=lambda r: sigma if f in r.products else ())
    for a in sigma:
        b.add(f"in.{a}", [a], [p1], [h[a]])
    sweepable = [h.get(s, s) for s in nf.background if s not in sigma] + primed
    for s in dict.fromkeys(sweepable):
        b.add(f"sweep.{s}", [s], [e], None)
    b.add("start", [d], (), start)
    b.add("p0.end", [p0], sigma, [p1])
    b.add("p0.keep", [p0], (), [p0])
    b.add("iter.end", [e, f], sigma if literal else [*sigma, *primed], [f3])
    b.add("restart", [f3], [p1], start)
    b.add("accept", [f3], [*sigma, p0], [f2])
    if not literal:
        if _allow_empty:
            b.add("skip", [d], sigma, [f3])
        _seal(b, f2, sigma, namer)
    return b.build(sigma, _ms([d, p0]), f2, _grow(nf.declared_bound, 2, 6))


def kleene_plus_lambda(automaton: ReactionAutomaton, literal: bool = False) -> ReactionAutomaton:
    """L_lambda(A)+ in lambda mode.

    The literal route intersects the star automaton with the non-empty
    words, which loses the empty word when it belongs to L_lambda(A).  The
    default is the star construction without the empty-word skip, so at
    least one iteration must complete.
    """
    if literal:
        from .oracle import sigma_plus_dfa

        star = kleene_star_lambda(automaton)
        plus_dfa = from_dfa(sigma_plus_dfa(list(automaton.input_alphabet)))
        return intersection(star, plus_dfa, LAMBDA)
    return kleene_star_lambda(automaton, _allow_empty=False)


def from_dfa(m: DFA) -> ReactionAutomaton:
    """Constant-bounded automaton for L(M): (p a) -> q per transition, (p, Sigma) -> f per final p."""
    problems = m.validate()
    if problems:
        raise ConstructionError("invalid DFA: " + "; ".join(problems))
    sigma = list(m.alphabet)
    namer = FreshNamer(sigma)
    st = {p: namer.fresh(p) for p in m.states}
    f = namer.fresh("f")
    b = _Builder()
    b.symbols(sigma)
    b.symbols(st[p] for p in m.states)
    for p in m.states:
        for a in sigma:
            b.add(f"t.{p}.{a}", [st[p], a], (), [st[m.transition[(p, a)]]])
    for p in m.states:
        if p in m.finals:
            b.add(f"fin.{p}", [st[p]], sigma, [f])
    return b.build(sigma, _ms([st[m.start]]), f, constant(2))


def pad_exponential(automaton: ReactionAutomaton, pad: str = "c", side: str = "prefix",
                    literal: bool = False) -> ReactionAutomaton:
    """An automaton accepting pad^(2^n) w (prefix) or w pad^(2^n) (suffix) for w of length n in L(A).

    The doubling-counter gadget counts n + 1 halvings of the pad block in n1
    while n2 records |w| + 1; (n1 n2) -> lambda cancels them pairwise and the
    final reaction requires both to be gone.  The suffix side is a
    reconstruction: the same gadget with the roles of the two phases
    swapped; since A finishes before the pad block is counted there, A's
    final symbol is not an inhibitor of the n1 counter on that side.
    Repairs (prefix side): the operand is put in normal form; and p3 is
    present from the start with (p3, Sigma c) -> p4, so for w = lambda the
    input end is detected in the same step as the end of the pad block and
    n2 is not counted twice.
    """
    side = side.lower()
    if side not in ("prefix", "suffix"):
        raise ConstructionError("side must be prefix or suffix")
    _require_valid(automaton)
    if pad in automaton.background:
        raise ConstructionError(f"pad symbol {pad!r} already in the background set")
    base = automaton if literal else to_normal_form(automaton)
    if pad in base.background:
        base = to_normal_form(automaton)
    namer = FreshNamer(set(base.background) | {pad})
    g = {x: namer.fresh(x) for x in ("p0", "p1", "p2", "p3", "p4", "n1", "n2", "c1", "c2", "d", "e", "f'", "f''")}
    c = pad
    sigma = list(base.input_alphabet)
    f = base.final
    b = _Builder()
    b.symbols(base.background)
    b.symbols([c])
    b.copy(base, {}, "A", extra_inhibitors=[c, g["f'"]])
    counter_inh = [g["e"], g["f'"], g["f''"]] if side == "suffix" else [g["e"], f, g["f'"], g["f''"]]
    if side == "prefix" and literal:
        b.add("a1", [g["p0"]], [c], [g["p1"], g["p2"], g["p3"], g["n2"]])
        init = msum(base.initial, _ms([g["d"], g["p0"]]))
    elif side == "prefix":
        b.add("a1", [g["p0"]], [c], [g["p1"], g["p2"], g["n2"]])
        init = msum(base.initial, _ms([g["d"], g["p0"], g["p3"]]))
    else:
        b.add("a1", [g["p0"], g["c1"]], [c], [g["p1"], g["c1"]])
        init = msum(base.initial, _ms([g["d"], g["p0"], g["p2"], g["p3"], g["n2"]]))
    b.add("a2", [g["p1"]], counter_inh, [g["p1"], g["n1"]])
    b.add("a3", [c], [g["p1"]], [g["c1"]])
    b.add("a4", [g["c1"], g["c1"]], [g["p0"], g["c2"], g["e"]], [g["c2"]])
    b.add("a5", [g["c2"], g["c2"]], [g["p0"], g["c1"], g["e"]], [g["c1"]])
    b.add("a6", [g["c1"], g["d"]], [g["p0"], g["c2"]], [g["e"]])
    b.add("a7", [g["c2"], g["d"]], [g["p0"], g["c1"]], [g["e"]])
    b.add("a8", [g["e"]], [g["p0"], c, g["c1"], g["c2"]], [g["f''"]])
    b.add("a9", [g["p2"]], [c, g["p4"]], [g["p2"], g["n2"]])
    b.add("a10", [g["p3"]], [*sigma, c] if side == "prefix" and not literal else sigma, [g["p4"]])
    b.add("a11", [g["n1"], g["n2"]], (), None)
    b.add("a12", [f, g["f''"]], [g["p3"], g["n1"], g["n2"]], [g["f'"]])
    bound = None
    if base.declared_bound is not None:
        eb = base.declared_bound.as_kind("exponential")
        c1, c2 = eb.params
        if c2 == 2:
            bound = linear(c1 + 4, c1 + 12)
        else:
            k = (c2 - 1).bit_length()
            bound = polynomial(c1 + 4, k, c1 + 12)
    return b.build([*sigma, c], init, g["f'"], bound)
