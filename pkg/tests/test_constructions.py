"""Closure constructions: oracle agreement at small lengths, normal forms, bounds, golden files."""

from pathlib import Path

import pytest

from reaction_automata.constructions import (
    FreshNamer,
    concatenation,
    from_dfa,
    gsm_image,
    intersection,
    inverse_morphism_lambda,
    kleene_plus_lambda,
    kleene_star_lambda,
    left_derivative,
    lra_to_lambda,
    morphism_image,
    pad_exponential,
    right_derivative,
    shuffle,
    to_lambda_normal_form,
    to_normal_form,
    union,
)
from reaction_automata.errors import ConstructionError
from reaction_automata.fileformat import parse_automaton, serialize_automaton
from reaction_automata.model import constant, make_dfa, make_gsm, make_morphism
from reaction_automata.oracle import all_words, check_equal, enumerate_language, fixture, predicate, sample, sample_ops
from reaction_automata.semantics import LAMBDA, ORDINARY, accepts, core, reachable_states, workspace

GOLDEN = Path(__file__).resolve().parent / "golden"
A0 = fixture("a0")
C2E = fixture("c2n_ext")
L_A0 = predicate("anbncn")
AB_STAR = make_dfa(["s", "t", "x"], "abc",
                   {("s", "a"): "t", ("t", "b"): "t", **{(p, a): "x" for p, a in
                    [("s", "b"), ("s", "c"), ("t", "a"), ("t", "c"), ("x", "a"), ("x", "b"), ("x", "c")]}},
                   "s", ["t"])
L_AB = sample("abc", 6, [w for w in all_words("abc", 6) if AB_STAR.accepts(w)])
DOUBLE = make_gsm([("q", a, "q", a + a) for a in "abc"], "q", ["q"])
X0 = lra_to_lambda(A0)
Y_AB = lra_to_lambda(from_dfa(AB_STAR))


def agree(automaton, k, expected, mode=ORDINARY):
    got = enumerate_language(automaton, k, mode=mode)
    return check_equal(got, expected.restrict(k) if expected.max_length > k else expected)


def test_fresh_namer():
    n = FreshNamer(["a", "a.1"])
    assert n.fresh("b") == "b"
    assert n.fresh("a") == "a.2"
    assert n.fresh("a", "g") == "a.g"
    assert n.fresh("a", "g") == "a.g2"


# Normal forms


def final_only_when_converged(automaton, mode, max_len):
    c = core(automaton)
    for n in range(max_len + 1):
        for w in all_words(automaton.input_alphabet, n):
            for state in reachable_states(automaton, w, None, mode):
                if automaton.final in state and not c.converged(c.vec(state)):
                    return state
    return None


@pytest.mark.parametrize("name", ["a0", "c2n", "mismatch"])
def test_normal_form(name):
    a = fixture(name)
    nf = to_normal_form(a)
    assert final_only_when_converged(nf, ORDINARY, 3) is None
    assert agree(nf, 5, enumerate_language(a, 5)) is None


@pytest.mark.parametrize("name", ["a0", "c2n"])
def test_lambda_normal_form(name):
    a = fixture(name)
    nf = to_lambda_normal_form(a)
    assert final_only_when_converged(nf, LAMBDA, 3) is None
    assert agree(nf, 4, enumerate_language(a, 4, mode=LAMBDA), LAMBDA) is None


def test_normal_form_reaction_set():
    nf = to_normal_form(A0)
    labels = [r.label for r in nf.reactions]
    assert labels[:4] == ["A.a1", "A.a2", "A.a3", "A.a4"]
    assert {"in.a", "in.b", "in.c", "a1", "a2", "a3", "a4"} <= set(labels)
    assert nf.reaction("a3").inhibitors == frozenset({"c.1", "p0.1"})
    assert nf.final == "f'"


# Ordinary-mode combinators


@pytest.mark.parametrize("build,op", [(union, "union"), (concatenation, "concat"), (shuffle, "shuffle")])
def test_binary_ordinary(build, op):
    expected = sample_ops(op, L_A0.sample(4), enumerate_language(C2E, 4))
    assert agree(build(A0, C2E), 4, expected) is None


def test_intersection_ordinary():
    expected = sample_ops("intersection", L_A0.sample(4), L_AB.restrict(4))
    assert agree(intersection(A0, from_dfa(AB_STAR)), 4, expected) is None


def test_operands_over_different_alphabets_are_aligned():
    u = union(A0, fixture("c2n"))
    assert set(u.input_alphabet) == {"a", "b", "c"}
    assert accepts(u, "cc").accepted and accepts(u, "abc").accepted and not accepts(u, "ccc").accepted


@pytest.mark.parametrize("x", ["a", "c", "bcc"])
def test_derivatives(x):
    assert agree(right_derivative(A0, x), 4,
                 sample_ops("right-derivative", L_A0.sample(7), x=x, max_length=4)) is None
    assert agree(left_derivative(A0, x), 4,
                 sample_ops("left-derivative", L_A0.sample(7), x=x, max_length=4)) is None


def test_derivative_by_empty_word_is_refused():
    with pytest.raises(ConstructionError):
        right_derivative(A0, "")
    with pytest.raises(ConstructionError):
        left_derivative(A0, "<eps>")


def test_gsm_and_morphism_images():
    assert agree(gsm_image(A0, DOUBLE), 6, sample_ops("gsm-image", L_A0.sample(6), gsm=DOUBLE)) is None
    h = make_morphism({"a": "x", "b": "y", "c": "x"})
    assert agree(morphism_image(A0, h), 6, sample_ops("morphism-image", L_A0.sample(6), morphism=h)) is None
    h2 = make_morphism({"a": "ab", "b": "b", "c": "a"})
    assert agree(morphism_image(A0, h2), 5, sample_ops("morphism-image", L_A0.sample(5), morphism=h2)) is None


def test_gsm_with_two_states():
    g = make_gsm([("p", "a", "p", "a"), ("p", "b", "q", "x"), ("q", "b", "q", "y"), ("q", "c", "r", "z"),
                  ("r", "c", "r", "z")], "p", ["p", "r"])
    assert agree(gsm_image(A0, g), 5, sample_ops("gsm-image", L_A0.sample(5), gsm=g)) is None


def test_from_dfa():
    assert agree(from_dfa(AB_STAR), 5, L_AB) is None


# Lambda-mode combinators


def test_lra_to_lambda():
    assert agree(X0, 5, L_A0.sample(5), LAMBDA) is None
    assert agree(Y_AB, 4, L_AB, LAMBDA) is None


@pytest.mark.parametrize("build,op", [(union, "union"), (concatenation, "concat"), (shuffle, "shuffle")])
def test_binary_lambda(build, op):
    expected = sample_ops(op, L_A0.sample(3), L_AB.restrict(3))
    assert agree(build(X0, Y_AB, LAMBDA), 3, expected, LAMBDA) is None


def test_intersection_lambda():
    sp = sample("abc", 3, [w for w in all_words("abc", 3) if w])
    assert agree(intersection(Y_AB, from_dfa(AB_STAR), LAMBDA), 3,
                 sample_ops("intersection", L_AB.restrict(3), enumerate_language(from_dfa(AB_STAR), 3,
                                                                                 mode=LAMBDA)),
                 LAMBDA) is None
    assert sp


def test_derivatives_lambda():
    assert agree(right_derivative(X0, "c", LAMBDA), 3,
                 sample_ops("right-derivative", L_A0.sample(4), x="c", max_length=3), LAMBDA) is None
    assert agree(left_derivative(X0, "a", LAMBDA), 3,
                 sample_ops("left-derivative", L_A0.sample(4), x="a", max_length=3), LAMBDA) is None


def test_coding_lambda():
    h = make_morphism({"a": "x", "b": "x", "c": "y"})
    assert agree(morphism_image(X0, h, LAMBDA), 4,
                 sample_ops("morphism-image", L_A0.sample(4), morphism=h), LAMBDA) is None


def test_inverse_morphism_lambda():
    h = make_morphism({"x": "abc"})
    assert agree(inverse_morphism_lambda(X0, h), 3, sample("x", 3, ["", "x"]), LAMBDA) is None
    erasing = make_morphism({"x": "a", "y": "<eps>"})
    dfa = lra_to_lambda(from_dfa(AB_STAR))
    expected = sample_ops("inverse-morphism-image", L_AB, morphism=erasing, max_length=3)
    assert agree(inverse_morphism_lambda(dfa, erasing), 3, expected, LAMBDA) is None
    mixed = make_morphism({"x": "ab", "y": "<eps>", "z": "b"})
    expected = sample_ops("inverse-morphism-image", L_AB, morphism=mixed, max_length=3)
    assert agree(inverse_morphism_lambda(Y_AB, mixed), 3, expected, LAMBDA) is None


def test_non_coding_morphism_lambda():
    # goes through the decomposition into a coding and an inverse morphism; short words only
    h = make_morphism({"a": "ab", "b": "b", "c": "c"})
    expected = sample_ops("morphism-image", L_AB, morphism=h, max_length=1)
    assert agree(morphism_image(Y_AB, h, LAMBDA), 1, expected, LAMBDA) is None


def test_kleene_closures():
    assert agree(kleene_star_lambda(X0), 3, sample_ops("star", L_A0.sample(3)), LAMBDA) is None
    assert agree(kleene_plus_lambda(X0), 3, sample_ops("plus", L_A0.sample(3)), LAMBDA) is None


def test_kleene_plus_keeps_the_empty_word_only_if_present():
    assert accepts(kleene_plus_lambda(X0), "", mode=LAMBDA).accepted
    ab = kleene_plus_lambda(Y_AB)
    assert not accepts(ab, "", mode=LAMBDA).accepted
    assert accepts(ab, "aba", mode=LAMBDA).accepted


# Padding


@pytest.mark.parametrize("side", ["prefix", "suffix"])
def test_pad_exponential(side):
    padded = pad_exponential(A0, "z", side)
    for w in ["", "a", "abc"]:
        for p in range(9):
            word = ["z"] * p + list(w) if side == "prefix" else list(w) + ["z"] * p
            assert accepts(padded, word).accepted == (p == 2 ** len(w) and L_A0(w)), (w, p)


def test_pad_symbol_must_be_fresh():
    with pytest.raises(ConstructionError):
        pad_exponential(A0, "c")
    with pytest.raises(ConstructionError):
        pad_exponential(A0, "z", "middle")


# Errors


def test_derivative_word_must_be_over_sigma():
    with pytest.raises(ConstructionError):
        right_derivative(A0, "d")


def test_gsm_alphabet_must_match():
    g = make_gsm([("q", "x", "q", "x")], "q", ["q"])
    with pytest.raises(ConstructionError):
        gsm_image(A0, g)


def test_lambda_gsm_is_refused():
    g = make_gsm([("q", "a", "q", "<eps>"), ("q", "b", "q", "b"), ("q", "c", "q", "c")], "q", ["q"])
    with pytest.raises(ConstructionError):
        gsm_image(A0, g)


# Literal reaction sets: the repairs are needed


def test_literal_left_derivative_misses_a_word():
    assert agree(left_derivative(A0, "a", literal=True), 4,
                 sample_ops("left-derivative", L_A0.sample(5), x="a", max_length=4)) == ("b", "c")


def test_literal_lambda_normal_form_differs():
    expected = enumerate_language(Y_AB, 3, mode=LAMBDA)
    assert agree(to_lambda_normal_form(Y_AB, literal=True), 3, expected, LAMBDA) is not None
    assert agree(to_lambda_normal_form(Y_AB), 3, expected, LAMBDA) is None


def test_literal_lra_to_lambda_differs():
    assert agree(lra_to_lambda(A0, literal=True), 3, L_A0.sample(3), LAMBDA) == ("a",)


def test_literal_lambda_union_differs():
    expected = sample_ops("union", L_A0.sample(2), L_AB.restrict(2))
    assert agree(union(X0, Y_AB, LAMBDA, literal=True), 2, expected, LAMBDA) == ("b",)


def test_literal_lambda_concatenation_differs():
    expected = sample_ops("concat", L_A0.sample(2), L_AB.restrict(2))
    assert agree(concatenation(X0, Y_AB, LAMBDA, literal=True), 2, expected, LAMBDA) == ("a", "a")


def test_literal_star_differs():
    assert agree(kleene_star_lambda(X0, literal=True), 2, sample_ops("star", L_A0.sample(2)), LAMBDA) == ("a",)


def test_literal_pad_differs():
    padded = pad_exponential(A0, "z", literal=True)
    assert accepts(padded, "z").accepted != (1 == 2 ** 0)


# Bounds


BOUND_CASES = [
    ("normal form", lambda: to_normal_form(A0), ORDINARY, ["", "abc", "aabbcc"]),
    ("union", lambda: union(A0, C2E), ORDINARY, ["abc", "cccc"]),
    ("concat", lambda: concatenation(A0, C2E), ORDINARY, ["abcc", "cc"]),
    ("shuffle", lambda: shuffle(A0, C2E), ORDINARY, ["acbc", "cabc"]),
    ("rderiv", lambda: right_derivative(A0, "c"), ORDINARY, ["ab", "aabbc"]),
    ("lderiv", lambda: left_derivative(A0, "a"), ORDINARY, ["bc", "abbcc"]),
    ("gsm", lambda: gsm_image(A0, DOUBLE), ORDINARY, ["aabbcc"]),
    ("to lambda", lambda: X0, LAMBDA, ["abc"]),
    ("star", lambda: kleene_star_lambda(X0), LAMBDA, ["abc"]),
    ("pad", lambda: pad_exponential(A0, "z"), ORDINARY, ["z", "zzzzzzzzabc"]),
]


@pytest.mark.parametrize("name,build,mode,words", BOUND_CASES, ids=[c[0] for c in BOUND_CASES])
def test_advertised_bound_dominates_workspace(name, build, mode, words):
    a = build()
    for w in words:
        ws = workspace(a, w, constant(a.declared_bound(len(w)) + 20), mode)
        assert ws is not None, w
        assert ws <= a.declared_bound(len(w)), (w, ws, str(a.declared_bound))


# Golden files: the exact reaction sets emitted on A0


GOLDEN_CASES = {
    "normal-form": lambda: to_normal_form(A0),
    "lambda-normal-form": lambda: to_lambda_normal_form(A0),
    "union": lambda: union(A0, C2E),
    "intersection-lambda": lambda: intersection(A0, A0, LAMBDA),
    "rderiv-c": lambda: right_derivative(A0, "c"),
    "lderiv-a": lambda: left_derivative(A0, "a"),
    "gsm-double": lambda: gsm_image(A0, DOUBLE),
    "to-lambda": lambda: lra_to_lambda(A0),
    "star": lambda: kleene_star_lambda(A0),
    "pad-prefix": lambda: pad_exponential(A0, "z"),
    "pad-prefix-literal": lambda: pad_exponential(A0, "z", literal=True),
}


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden(name):
    text = serialize_automaton(GOLDEN_CASES[name]())
    path = GOLDEN / f"{name}.ra"
    assert path.read_text() == text
    assert serialize_automaton(parse_automaton(text)) == text
