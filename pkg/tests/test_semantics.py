import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reaction_automata.errors import InputError
from reaction_automata.model import Reaction, ReactionAutomaton, build_automaton, constant, linear
from reaction_automata.multiset import EMPTY, Multiset, contains, ms
from reaction_automata.oracle import all_words, fixture
from reaction_automata.semantics import (
    LAMBDA,
    ORDINARY,
    Configuration,
    _Search,
    accepting_trace,
    accepts,
    core,
    enabled,
    enumerate_maximal,
    fire,
    normalize_mode,
    replay,
    results,
    successors,
    workspace,
)

A0 = fixture("a0")
C2N = fixture("c2n")


def test_enabled_examples():
    assert enabled(A0, ms("a4"), ms("p0"))
    assert not enabled(A0, ms("a1"), ms("p0 a' b' a"))
    assert enabled(A0, EMPTY, ms("a b c"))


def test_enumerate_maximal_examples():
    assert enumerate_maximal(A0, ms("p0")) == {ms("a4")}
    assert enumerate_maximal(A0, ms("p0 a")) == {ms("a1")}
    assert enumerate_maximal(A0, EMPTY) == set()


def test_maximal_step_uses_every_copy():
    assert enumerate_maximal(A0, ms("a^3 p0")) == {ms("a1^3")}


def test_competing_reactions_split_nondeterministically():
    a = build_automaton(["x", "y", "z", "f"], ["x"],
                        [Reaction("r1", ms("x"), frozenset(), ms("y")),
                         Reaction("r2", ms("x"), frozenset(), ms("z"))], ms("f"), "f")
    assert enumerate_maximal(a, ms("x^2")) == {ms("r1^2"), ms("r1 r2"), ms("r2^2")}
    assert results(a, ms("x^2")) == {ms("y^2"), ms("y z"), ms("z^2")}


def test_results_examples():
    assert results(A0, ms("p0 a' a")) == {ms("p0 a'^2")}
    assert results(A0, ms("f c'")) == {ms("f c'")}
    assert results(A0, ms("p0 a' b")) == {ms("p0 b'")}
    assert fire(A0, ms("p0 a' b"), ms("a2")) == ms("p0 b'")


def test_successors_examples():
    start = Configuration(ms("p0"), 0)
    assert successors(A0, start, "abc") == {Configuration(ms("p0 a'"), 1)}
    assert successors(A0, Configuration(ms("f c'"), 3), "abc") == set()
    assert successors(A0, start, "abc", LAMBDA) == {Configuration(ms("p0 a'"), 1), Configuration(ms("f"), 0)}


def test_unknown_mode_and_symbol():
    with pytest.raises(InputError):
        normalize_mode("greedy")
    with pytest.raises(InputError):
        accepts(A0, "abd")


def test_missing_bound_is_an_error():
    with pytest.raises(InputError):
        accepts(A0.with_bound(None), "abc")


def test_accepts_examples():
    assert accepts(A0, "aabbcc", linear(2, 4)).accepted
    assert not accepts(A0, "ab", linear(2, 4)).accepted
    assert accepts(C2N, "c" * 8, linear(2, 6)).accepted
    assert accepts(A0, "", constant(4)).accepted


def test_pruned_by_bound_flag():
    tight = accepts(A0, "aabbcc", constant(2))
    assert not tight.accepted and tight.pruned_by_bound
    loose = accepts(A0, "ab", linear(2, 4))
    assert not loose.pruned_by_bound
    assert loose.explored > 0


def test_accepting_trace_examples():
    t = accepting_trace(A0, "abc")
    assert [s.result for s in t.steps] == [ms("p0 a'"), ms("p0 b'"), ms("p0 c'"), ms("f c'")]
    assert t.converged_at == 4
    assert replay(A0, t) == []
    assert accepting_trace(A0, "ba") is None
    t4 = accepting_trace(C2N, "cccc")
    assert replay(C2N, t4) == []
    assert len(t4.states) == len(t4.steps) + 1


def test_trace_search_is_deterministic():
    assert accepting_trace(C2N, "c" * 8) == accepting_trace(C2N, "c" * 8)


def test_replay_rejects_a_tampered_trace():
    t = accepting_trace(A0, "abc")
    assert replay(A0, t.__class__(t.word, ms("p0 a"), t.steps, t.converged_at))
    assert replay(A0, t.__class__(("a", "b"), t.initial, t.steps, t.converged_at))


def test_workspace_examples():
    assert workspace(A0, "") == 1
    assert workspace(A0, "abc") == 2
    assert workspace(A0, "ba") is None
    assert workspace(A0, "aabbcc") <= linear(2, 4)(6)


def test_lambda_mode_accepts_ordinary_language_of_example_1():
    for n in (1, 2, 4):
        assert accepts(C2N, "c" * n, mode=LAMBDA).accepted


def test_bound_monotonicity():
    for w in ["", "abc", "aabbcc", "aab"]:
        for k in range(1, 8):
            if accepts(A0, w, constant(k)).accepted:
                assert accepts(A0, w, constant(k + 1)).accepted


def test_dead_state_pruning_is_sound():
    # the same verdict with and without pruning of configurations that can never produce f
    for name in ("a0", "c2n", "mismatch"):
        a = fixture(name)
        c = core(a)
        for n in range(5):
            for w in all_words(a.input_alphabet, n):
                for mode in (ORDINARY, LAMBDA):
                    cap = a.declared_bound(n)
                    fast = _Search(c, w, mode, cap).run(c.vec(a.initial)) is not None
                    slow = _Search(c, w, mode, cap, prune_dead=False).run(c.vec(a.initial)) is not None
                    assert fast == slow, (name, w, mode)


def random_automaton(rng: random.Random) -> ReactionAutomaton:
    symbols = [f"s{i}" for i in range(rng.randint(2, 5))]
    reactions = []
    for i in range(rng.randint(1, 4)):
        r = Multiset(rng.choices(symbols, k=rng.randint(1, 3)))
        inh = frozenset(s for s in symbols if s not in r and rng.random() < 0.3)
        reactions.append(Reaction(f"r{i}", r, inh, Multiset(rng.choices(symbols, k=rng.randint(0, 2)))))
    return build_automaton(symbols, [symbols[0]], reactions, ms(symbols[-1]), symbols[-1], constant(8))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9), st.lists(st.integers(0, 4), max_size=6))
def test_maximality_soundness_and_conservation(seed, picks):
    a = random_automaton(random.Random(seed))
    state = Multiset([a.background[i % len(a.background)] for i in picks])
    for alpha in enumerate_maximal(a, state):
        assert enabled(a, alpha, state)
        for r in a.reactions:
            assert not enabled(a, alpha + ms(r.label), state)
        consumed = EMPTY
        for label, k in alpha.items():
            for _ in range(k):
                consumed = consumed + a.reaction(label).reactants
        assert contains(consumed, state)
        assert fire(a, state, alpha) == state - consumed + sum(
            (a.reaction(l).products for l, k in alpha.items() for _ in range(k)), EMPTY)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(0, 3))
def test_traces_consume_monotonically(seed, n):
    a = random_automaton(random.Random(seed))
    for w in all_words(a.input_alphabet, n):
        for mode in (ORDINARY, LAMBDA):
            t = accepting_trace(a, w, mode=mode)
            if t is None:
                continue
            fed = [s.fed for s in t.steps if s.fed is not None]
            assert tuple(fed) == w
            assert replay(a, t, mode) == []
            if accepts(a, w).accepted:
                assert accepts(a, w, mode=LAMBDA).accepted
