import pytest

from reaction_automata.errors import SampleError
from reaction_automata.model import make_gsm, make_morphism
from reaction_automata.oracle import (
    FIXTURE_NAMES,
    all_words,
    check_equal,
    enumerate_language,
    fixture,
    gsm_outputs,
    predicate,
    sample,
    sample_ops,
    shortlex,
)


def test_all_words_in_shortlex_order():
    words = list(all_words("ab", 2))
    assert words == [(), ("a",), ("b",), ("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]
    assert words == sorted(words, key=shortlex)


def test_sample_validation_and_serialization():
    s = sample("ab", 2, ["", "ab"])
    assert ("a", "b") in s and "ab" in s and len(s) == 2
    assert s.serialize() == "<eps>\nab\n"
    with pytest.raises(SampleError):
        sample("ab", 1, ["ab"])
    with pytest.raises(SampleError):
        sample("ab", 2, ["c"])
    with pytest.raises(SampleError):
        s.restrict(3)


def test_set_algebra():
    s1 = sample("ab", 3, ["a", "ab"])
    s2 = sample("ab", 3, ["", "b"])
    assert sample_ops("union", s1, s2).as_strings() == ["<eps>", "a", "b", "ab"]
    assert sample_ops("intersection", s1, s2).words == frozenset()
    assert sample_ops("concat", s1, s2).as_strings() == ["a", "ab", "abb"]
    assert sample_ops("shuffle", s1, s2).as_strings() == ["a", "ab", "ba", "abb", "bab"]
    assert sample_ops("star", sample("ab", 3, ["ab"])).as_strings() == ["<eps>", "ab"]
    assert sample_ops("plus", sample("ab", 3, ["a"])).as_strings() == ["a", "aa", "aaa"]


def test_derivatives_need_longer_operands():
    s = sample("ab", 3, ["ab", "abb"])
    assert sample_ops("left-derivative", s, x="a", max_length=2).as_strings() == ["b", "bb"]
    assert sample_ops("right-derivative", s, x="b", max_length=2).as_strings() == ["a", "ab"]
    with pytest.raises(SampleError):
        sample_ops("left-derivative", s, x="a", max_length=3)


def test_images():
    s = sample("ab", 2, ["a", "ab"])
    h = make_morphism({"a": "x", "b": "yy"})
    assert sample_ops("morphism-image", s, morphism=h, max_length=2).as_strings() == ["x"]
    g = make_gsm([("p", "a", "q", "a"), ("q", "b", "q", "bb")], "p", ["q"])
    assert gsm_outputs(g, "ab") == {("a", "b", "b")}
    assert gsm_outputs(g, "b") == set()
    inv = sample_ops("inverse-morphism-image", sample("abc", 6, ["abc", "abcabc"]),
                     morphism=make_morphism({"x": "abc"}), max_length=2)
    assert inv.as_strings() == ["x", "xx"]


def test_lambda_images_are_refused():
    s = sample("a", 2, ["a"])
    with pytest.raises(SampleError):
        sample_ops("morphism-image", s, morphism=make_morphism({"a": "<eps>"}))
    with pytest.raises(SampleError):
        sample_ops("rotate", s)


def test_check_equal_gives_shortest_difference():
    s1 = sample("ab", 3, ["a", "ab", "abb"])
    s2 = sample("ab", 3, ["a", "ba", "bbb"])
    assert check_equal(s1, s2) == ("a", "b")
    assert check_equal(s1, s1) is None
    with pytest.raises(SampleError):
        check_equal(s1, s1.restrict(2))


def test_predicates():
    assert predicate("anbncn")("aabbcc") and not predicate("anbncn")("abcabc")
    assert predicate("c_pow2")("cccc") and not predicate("c_pow2")("ccc")
    assert predicate("mismatch_claimed")("ab")
    assert not predicate("mismatch_reachable")("ab")
    assert predicate("mismatch_reachable")("abba")
    with pytest.raises(SampleError):
        predicate("palindromes")


def test_fixture_languages():
    assert enumerate_language(fixture("a0"), 6).as_strings() == ["<eps>", "abc", "aabbcc"]
    assert enumerate_language(fixture("c2n"), 4).as_strings() == ["c", "cc", "cccc"]
    assert enumerate_language(fixture("c2n_ext"), 4).as_strings() == ["c", "cc", "cccc"]
    assert enumerate_language(fixture("empty"), 3).words == frozenset()
    assert enumerate_language(fixture("a0"), 0).as_strings() == ["<eps>"]
    assert "sigma_plus_dfa" in FIXTURE_NAMES
    assert fixture("sigma_plus_dfa").accepts("ab") and not fixture("sigma_plus_dfa").accepts("")
    with pytest.raises(SampleError):
        fixture("nope")


def test_enumeration_agrees_with_single_word_search():
    from reaction_automata.semantics import accepts

    for name in ("a0", "c2n", "mismatch"):
        a = fixture(name)
        for mode in ("ordinary", "lambda"):
            lang = enumerate_language(a, 4, mode=mode)
            for w in all_words(a.input_alphabet, 4):
                assert (w in lang) == accepts(a, w, mode=mode).accepted, (name, w, mode)
