import json
from pathlib import Path

import pytest

from reaction_automata.cli import main
from reaction_automata.fileformat import parse_automaton
from reaction_automata.oracle import enumerate_language, fixture, sample_ops
from reaction_automata.semantics import replay

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
A0 = str(FIXTURES / "a0.ra")
C2N = str(FIXTURES / "c2n.ra")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("word,code", [("aabbcc", 0), ("ab", 1), ("abd", 2), ("<eps>", 0)])
def test_accept_exit_codes(capsys, word, code):
    assert run(capsys, "accept", A0, word)[0] == code


def test_accept_report(capsys):
    code, out, _ = run(capsys, "accept", A0, "abc")
    assert code == 0
    assert out.startswith("accepted explored=")
    assert "pruned_by_bound=false" in out
    code, out, _ = run(capsys, "accept", A0, "aabbcc", "--bound", "constant 2")
    assert code == 1 and "pruned_by_bound=true" in out


def test_bound_override_and_missing_bound(capsys, tmp_path):
    bare = tmp_path / "bare.ra"
    bare.write_text("".join(line + "\n" for line in Path(A0).read_text().splitlines()
                            if not line.startswith("@bound")))
    code, _, err = run(capsys, "accept", str(bare), "abc")
    assert code == 2 and "bound" in err
    assert run(capsys, "accept", str(bare), "abc", "--bound", "linear 2 4")[0] == 0
    assert run(capsys, "accept", str(bare), "abc", "--bound", "9")[0] == 0
    assert run(capsys, "accept", str(bare), "abc", "--bound", "cubic 1")[0] == 2


def test_usage_errors(capsys):
    assert run(capsys, "accept", str(FIXTURES / "missing.ra"), "a")[0] == 2
    for argv in (["frobnicate"], ["accept", A0, "abc", "--mode", "greedy"], ["lang", A0]):
        with pytest.raises(SystemExit) as err:
            main(argv)
        assert err.value.code == 2


def test_trace_text(capsys):
    code, out, _ = run(capsys, "trace", A0, "abc", "--format", "text")
    lines = out.splitlines()
    assert code == 0
    assert lines[1] == "init: p0"
    assert len([l for l in lines if " | " in l]) == 4
    assert lines[-2].endswith("c' f")


def test_trace_json_replays(capsys):
    code, out, _ = run(capsys, "trace", A0, "aabbcc", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["word"] == list("aabbcc")
    assert doc["steps"][0] == {"fed": "a", "fired": "a1", "result": "a' p0"}


def test_trace_dot_for_c8(capsys):
    code, out, _ = run(capsys, "trace", C2N, "c" * 8, "--format", "dot")
    assert code == 0
    nodes = [l for l in out.splitlines() if l.strip().startswith("s") and "->" not in l and "[label" in l]
    edges = [l for l in out.splitlines() if "->" in l]
    assert len(nodes) == len(edges) + 1 == 15
    assert '[label="c / ' in edges[0]
    assert edges[-1].endswith('[label="<eps> / a8"];')


def test_trace_rejected_word(capsys):
    code, out, _ = run(capsys, "trace", A0, "ba")
    assert code == 1 and out.strip() == "no accepting trace"


def test_lang(capsys):
    assert run(capsys, "lang", A0, "--max-len", "6")[1] == "<eps>\nabc\naabbcc\n"
    assert run(capsys, "lang", C2N, "--max-len", "4")[1] == "c\ncc\ncccc\n"
    assert run(capsys, "lang", A0, "--max-len", "0")[1] == "<eps>\n"
    assert run(capsys, "lang", A0, "--max-len", "-1")[0] == 2


def test_fixture_names(capsys):
    assert run(capsys, "accept", "fixture:c2n", "cccc")[0] == 0
    assert run(capsys, "accept", "fixture:nope", "c")[0] == 2


def test_construct_union_matches_oracle(capsys, tmp_path):
    out = tmp_path / "u.ra"
    assert run(capsys, "construct", "union", A0, str(FIXTURES / "c2n-ext.ra"), "-o", str(out))[0] == 0
    got = run(capsys, "lang", str(out), "--max-len", "5")[1]
    expected = sample_ops("union", enumerate_language(fixture("a0"), 5), enumerate_language(fixture("c2n_ext"), 5))
    assert sorted(got.split()) == sorted(expected.serialize().split())


def test_construct_star_lambda(capsys, tmp_path):
    out = tmp_path / "s.ra"
    assert run(capsys, "construct", "star", A0, "-o", str(out), "--mode", "lambda")[0] == 0
    assert run(capsys, "accept", str(out), "abcabc", "--mode", "lambda")[0] == 0


@pytest.mark.parametrize("argv", [
    ("normal-form", A0),
    ("lambda-normal-form", A0),
    ("intersection", A0, A0),
    ("concat", A0, C2N),
    ("shuffle", A0, A0, "--mode", "lambda"),
    ("rderiv", A0, "--x", "c"),
    ("lderiv", A0, "--x", "a", "--mode", "lambda"),
    ("gsm", A0, "--gsm", str(FIXTURES / "double.gsm")),
    ("morph", A0, "--morphism", str(FIXTURES / "swap.morph")),
    ("inv-morph", A0, "--morphism", str(FIXTURES / "abc.morph")),
    ("plus", A0),
    ("to-lambda", A0),
    ("from-dfa", "--dfa", str(FIXTURES / "sigma-plus.dfa")),
    ("pad-exp", A0, "--side", "suffix"),
    ("union", A0, A0, "--literal"),
])
def test_every_construction_emits_a_parseable_automaton(capsys, argv):
    code, out, err = run(capsys, "construct", *argv)
    assert code == 0, err
    parse_automaton(out)


@pytest.mark.parametrize("argv", [
    ("bogus", A0),
    ("union", A0),
    ("rderiv", A0),
    ("rderiv", A0, "--x", "d"),
    ("gsm", A0),
    ("pad-exp", A0, "--pad-symbol", "a"),
    ("from-dfa", A0),
])
def test_construct_errors(capsys, argv):
    assert run(capsys, "construct", *argv)[0] == 2


def test_validate(capsys, tmp_path):
    assert run(capsys, "validate", A0)[0] == 0
    bad = tmp_path / "bad.ra"
    bad.write_text("@symbols a f\n@input a\n@init a\n@final f\n@reaction x: a | a | f\n")
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1 and "line 5" in out


def test_diagram(capsys):
    code, out, _ = run(capsys, "diagram", A0)
    assert code == 0 and out.startswith('digraph "automaton"')
    assert '"s:b" -> "r:a1" [style=dashed, arrowhead=tee];' in out


def test_trace_output_replays():
    from reaction_automata.semantics import accepting_trace

    t = accepting_trace(fixture("c2n"), "c" * 8)
    assert replay(fixture("c2n"), t) == []
