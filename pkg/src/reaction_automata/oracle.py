"""Brute-force ground truth: language samples, reference set operations, fixtures, predicates."""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache

from .errors import SampleError
from .model import (
    DFA,
    GSM,
    BoundSpec,
    Morphism,
    ReactionAutomaton,
    Word,
    as_word,
    build_automaton,
    constant,
    extend_alphabet,
    linear,
    make_dfa,
    reaction,
    word_str,
)
from .multiset import ms
from .semantics import ORDINARY, accepted_words, normalize_mode


def shortlex(word: Sequence[str]) -> tuple:
    return (len(word), tuple(word))


def all_words(alphabet: Sequence[str], max_length: int) -> Iterable[Word]:
    for n in range(max_length + 1):
        yield from itertools.product(alphabet, repeat=n)


@dataclass(frozen=True)
class FiniteLanguageSample:
    """The words of length at most ``max_length`` of some language over ``alphabet``."""

    alphabet: tuple[str, ...]
    max_length: int
    words: frozenset[Word]

    def __post_init__(self):
        sigma = set(self.alphabet)
        for w in self.words:
            if len(w) > self.max_length:
                raise SampleError(f"word {word_str(w)} longer than {self.max_length}")
            if not set(w) <= sigma:
                raise SampleError(f"word {word_str(w)} not over the alphabet")

    def __contains__(self, word) -> bool:
        return as_word(word) in self.words

    def __len__(self) -> int:
        return len(self.words)

    def sorted_words(self) -> list[Word]:
        return sorted(self.words, key=shortlex)

    def as_strings(self) -> list[str]:
        return [word_str(w) for w in self.sorted_words()]

    def serialize(self) -> str:
        return "".join(s + "\n" for s in self.as_strings())

    def restrict(self, max_length: int) -> FiniteLanguageSample:
        if max_length > self.max_length:
            raise SampleError("cannot extend a sample beyond its max_length")
        return FiniteLanguageSample(self.alphabet, max_length,
                                    frozenset(w for w in self.words if len(w) <= max_length))


def sample(alphabet: Iterable[str], max_length: int, words: Iterable) -> FiniteLanguageSample:
    return FiniteLanguageSample(tuple(alphabet), max_length, frozenset(as_word(w) for w in words))


def enumerate_language(automaton: ReactionAutomaton, max_length: int, bound: BoundSpec | int | None = None,
                       mode: str = ORDINARY) -> FiniteLanguageSample:
    words, _ = accepted_words(automaton, max_length, bound, normalize_mode(mode))
    return FiniteLanguageSample(tuple(automaton.input_alphabet), max_length, frozenset(words))


# Reference set operations


def _need(s: FiniteLanguageSample, length: int, op: str):
    if s.max_length < length:
        raise SampleError(f"{op}: operand sample covers length {s.max_length}, need {length}")


def _shuffles(u: Word, v: Word) -> set[Word]:
    out = set()
    n = len(u) + len(v)
    for pos in itertools.combinations(range(n), len(u)):
        w, iu, iv = [], 0, 0
        chosen = set(pos)
        for i in range(n):
            if i in chosen:
                w.append(u[iu])
                iu += 1
            else:
                w.append(v[iv])
                iv += 1
        out.add(tuple(w))
    return out


def gsm_outputs(g: GSM, word: Sequence[str]) -> set[Word]:
    """All outputs of ``g`` on ``word`` ending in a final state."""
    current = {(g.start, ())}
    for a in word:
        current = {(q, out + x) for p, out in current for (p2, b, q, x) in g.transitions if p2 == p and b == a}
    return {out for q, out in current if q in g.finals}


def sample_ops(op: str, *operands: FiniteLanguageSample, max_length: int | None = None,
               x: Sequence[str] | str | None = None, morphism: Morphism | None = None,
               gsm: GSM | None = None, alphabet: Sequence[str] | None = None) -> FiniteLanguageSample:
    """Apply a set operation to samples and truncate to ``max_length``.

    Operands must cover every length that can contribute to a result word of
    length at most ``max_length``; otherwise :class:`SampleError` is raised.
    """
    op = op.replace("_", "-")
    s1 = operands[0]
    k = s1.max_length if max_length is None else max_length
    sigma = tuple(alphabet) if alphabet is not None else s1.alphabet
    if op in ("union", "intersection", "concatenation", "concat", "shuffle"):
        if len(operands) != 2:
            raise SampleError(f"{op} takes two operands")
        s2 = operands[1]
        _need(s1, k, op)
        _need(s2, k, op)
        sigma = tuple(dict.fromkeys(s1.alphabet + s2.alphabet)) if alphabet is None else sigma
        if op == "union":
            words = {w for w in s1.words | s2.words if len(w) <= k}
        elif op == "intersection":
            words = {w for w in s1.words & s2.words if len(w) <= k}
        elif op in ("concatenation", "concat"):
            words = {u + v for u in s1.words for v in s2.words if len(u) + len(v) <= k}
        else:
            words = set()
            for u in s1.words:
                for v in s2.words:
                    if len(u) + len(v) <= k:
                        words |= _shuffles(u, v)
        return FiniteLanguageSample(sigma, k, frozenset(words))
    if len(operands) != 1:
        raise SampleError(f"{op} takes one operand")
    if op in ("star", "plus"):
        _need(s1, k, op)
        base = {w for w in s1.words if len(w) <= k}
        reach = {()} if op == "star" else set(base)
        frontier = set(reach) if op == "star" else set(base)
        while frontier:
            new = {u + v for u in frontier for v in base if len(u) + len(v) <= k} - reach
            reach |= new
            frontier = new
        return FiniteLanguageSample(sigma, k, frozenset(reach))
    if op in ("left-derivative", "right-derivative"):
        xw = as_word(x or ())
        _need(s1, k + len(xw), op)
        if op == "left-derivative":
            words = {w[len(xw):] for w in s1.words if w[:len(xw)] == xw and len(w) - len(xw) <= k}
        else:
            words = {w[:len(w) - len(xw)] for w in s1.words
                     if len(w) >= len(xw) and w[len(w) - len(xw):] == xw and len(w) - len(xw) <= k}
        return FiniteLanguageSample(sigma, k, frozenset(words))
    if op == "morphism-image":
        if morphism is None:
            raise SampleError("morphism-image needs a morphism")
        if not morphism.lambda_free:
            raise SampleError("morphism-image sample truncation needs a lambda-free morphism")
        _need(s1, k, op)
        words = {morphism.apply(w) for w in s1.words}
        sigma = morphism.target if alphabet is None else sigma
        return FiniteLanguageSample(sigma, k, frozenset(w for w in words if len(w) <= k))
    if op == "gsm-image":
        if gsm is None:
            raise SampleError("gsm-image needs a gsm")
        if not gsm.lambda_free:
            raise SampleError("gsm-image sample truncation needs a lambda-free gsm")
        _need(s1, k, op)
        words = set()
        for w in s1.words:
            words |= {y for y in gsm_outputs(gsm, w) if len(y) <= k}
        sigma = gsm.output_alphabet if alphabet is None else sigma
        return FiniteLanguageSample(sigma, k, frozenset(words))
    if op == "inverse-morphism-image":
        if morphism is None:
            raise SampleError("inverse-morphism-image needs a morphism")
        longest = max((len(morphism.images[a]) for a in morphism.source), default=0)
        _need(s1, k * longest, op)
        sigma = morphism.source if alphabet is None else sigma
        words = {u for u in all_words(sigma, k) if morphism.apply(u) in s1.words}
        return FiniteLanguageSample(sigma, k, frozenset(words))
    raise SampleError(f"unknown sample operation {op!r}")


def check_equal(a: FiniteLanguageSample, b: FiniteLanguageSample) -> Word | None:
    """None if the samples agree, else a shortest (then lexicographically least) differing word."""
    if a.max_length != b.max_length:
        raise SampleError(f"samples have different max_length ({a.max_length} vs {b.max_length})")
    if set(a.alphabet) != set(b.alphabet):
        raise SampleError("samples have different alphabets")
    diff = a.words ^ b.words
    if not diff:
        return None
    return min(diff, key=shortlex)


# Reference languages


@dataclass(frozen=True)
class PredicateLanguage:
    alphabet: tuple[str, ...]
    membership: Callable[[Word], bool]
    description: str

    def __call__(self, word) -> bool:
        w = as_word(word)
        if not set(w) <= set(self.alphabet):
            return False
        return bool(self.membership(w))

    def sample(self, max_length: int) -> FiniteLanguageSample:
        return FiniteLanguageSample(self.alphabet, max_length,
                                    frozenset(w for w in all_words(self.alphabet, max_length) if self(w)))


def _anbncn(w: Word) -> bool:
    n = len(w) // 3
    return len(w) == 3 * n and w == ("a",) * n + ("b",) * n + ("c",) * n


def _c_pow2(w: Word) -> bool:
    n = len(w)
    return n >= 1 and n & (n - 1) == 0


def _mismatch(w: Word, min_tail: int) -> bool:
    m = len(w)
    if m % 2:
        return False
    half = m // 2 - 1  # |u1| + |u2|
    for i in range(half + 1):
        j = half - i
        if j >= min_tail and w[i] != w[2 * i + j + 1]:
            return True
    return False


_PREDICATES = {
    "anbncn": (("a", "b", "c"), _anbncn, "a^n b^n c^n, n >= 0"),
    "c_pow2": (("c",), _c_pow2, "c^(2^n), n >= 0"),
    "mismatch_claimed": (("a", "b"), lambda w: _mismatch(w, 0),
                         "u1 s u2 v1 t v2 with |u1|=|v1|, |u2|=|v2|, s != t"),
    "mismatch_reachable": (("a", "b"), lambda w: _mismatch(w, 1),
                           "u1 s u2 v1 t v2 with |u1|=|v1|, |u2|=|v2| >= 1, s != t"),
}


def predicate(name: str) -> PredicateLanguage:
    try:
        alphabet, fn, desc = _PREDICATES[name]
    except KeyError:
        raise SampleError(f"unknown predicate {name!r}") from None
    return PredicateLanguage(alphabet, fn, desc)


# Fixture automata


@lru_cache(maxsize=None)
def _a0() -> ReactionAutomaton:
    return build_automaton(
        ["p0", "a", "b", "c", "a'", "b'", "c'", "f"], ["a", "b", "c"],
        [reaction("a1", "a", "b b'", "a'"),
         reaction("a2", "a' b", "c c'", "b'"),
         reaction("a3", "b' c", "", "c'"),
         reaction("a4", "p0", "a b c a' b'", "f")],
        ms("p0"), "f", linear(2, 4))


@lru_cache(maxsize=None)
def _c2n() -> ReactionAutomaton:
    return build_automaton(
        ["c", "p0", "p1", "n1", "c1", "c2", "d", "e", "f"], ["c"],
        [reaction("a1", "p0", "c", "p1"),
         reaction("a2", "p1", "e f", "p1 n1"),
         reaction("a3", "c", "p1", "c1"),
         reaction("a4", "c1^2", "p0 c2 e", "c2"),
         reaction("a5", "c2^2", "p0 c1 e", "c1"),
         reaction("a6", "c1 d", "p0 c2", "e"),
         reaction("a7", "c2 d", "p0 c1", "e"),
         reaction("a8", "e", "p0 c c1 c2", "f")],
        ms("d p0"), "f", linear(2, 6))


@lru_cache(maxsize=None)
def _c2n_ext() -> ReactionAutomaton:
    """The c^(2^n) automaton over {a, b, c}: the extra letters block convergence."""
    return extend_alphabet(_c2n(), ["c", "a", "b"])


@lru_cache(maxsize=None)
def _mismatch_automaton() -> ReactionAutomaton:
    return build_automaton(
        ["a", "b", "a'", "b'", "c1", "c2", "p0", "p1", "p2", "p3", "f"], ["a", "b"],
        [reaction("a1", "p0 a", "", "p0 c1"),
         reaction("a2", "p0 b", "", "p0 c1"),
         reaction("a3", "p0 a", "", "p1 a'"),
         reaction("a4", "p0 b", "", "p1 b'"),
         reaction("a5", "p1 a", "", "p1 c2"),
         reaction("a6", "p1 b", "", "p1 c2"),
         reaction("a7", "p1 a", "", "p2 c2"),
         reaction("a8", "p1 b", "", "p2 c2"),
         reaction("a9", "p2 a c1", "", "p2"),
         reaction("a10", "p2 b c1", "", "p2"),
         reaction("a11", "p2 a' b", "c1", "p3"),
         reaction("a12", "p2 b' a", "c1", "p3"),
         reaction("a13", "p3 a c2", "", "p3"),
         reaction("a14", "p3 b c2", "", "p3"),
         reaction("a15", "p3", "a b c2", "f")],
        ms("p0"), "f", linear(2, 4))


@lru_cache(maxsize=None)
def _empty() -> ReactionAutomaton:
    return build_automaton(["p0", "f", "a", "b", "c"], ["a", "b", "c"], [], ms("p0"), "f", linear(1, 1))


def sigma_plus_dfa(alphabet: Sequence[str] = ("a", "b", "c")) -> DFA:
    """Two-state DFA for the non-empty words over ``alphabet``."""
    trans = {(p, a): "q1" for p in ("q0", "q1") for a in alphabet}
    return make_dfa(["q0", "q1"], alphabet, trans, "q0", ["q1"])


_FIXTURES = {"a0": _a0, "c2n": _c2n, "c2n_ext": _c2n_ext, "mismatch": _mismatch_automaton, "empty": _empty,
             "sigma_plus_dfa": sigma_plus_dfa}

FIXTURE_NAMES = tuple(_FIXTURES)


def fixture(name: str) -> ReactionAutomaton | DFA:
    try:
        return _FIXTURES[name]()
    except KeyError:
        raise SampleError(f"unknown fixture {name!r}") from None


__all__ = [
    "FiniteLanguageSample", "PredicateLanguage", "enumerate_language", "sample_ops", "check_equal",
    "fixture", "predicate", "sample", "gsm_outputs", "all_words", "sigma_plus_dfa",
]
