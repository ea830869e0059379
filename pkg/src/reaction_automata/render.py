"""Text, DOT and JSON renderings of traces and reaction automata."""

from __future__ import annotations

import json

from .model import ReactionAutomaton, word_str
from .multiset import format_multiset
from .semantics import Trace


def _fed(x: str | None) -> str:
    return "<eps>" if x is None else x


def trace_text(trace: Trace) -> str:
    """``init: D0`` then one ``fed | fired | result`` line per step."""
    lines = [f"word: {word_str(trace.word)}", f"init: {format_multiset(trace.initial)}"]
    for s in trace.steps:
        lines.append(f"{_fed(s.fed)} | {format_multiset(s.fired)} | {format_multiset(s.result)}")
    if trace.converged_at is not None:
        lines.append(f"converged at step {trace.converged_at}")
    return "\n".join(lines) + "\n"


def trace_json(trace: Trace) -> str:
    doc = {
        "word": list(trace.word),
        "initial": format_multiset(trace.initial),
        "steps": [{"fed": s.fed, "fired": format_multiset(s.fired), "result": format_multiset(s.result)}
                  for s in trace.steps],
        "converged_at": trace.converged_at,
    }
    return json.dumps(doc, indent=2) + "\n"


def dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def trace_dot(trace: Trace, name: str = "trace") -> str:
    """A chain with one node per state, edges labelled ``input / fired``."""
    lines = [f"digraph {dot_quote(name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    for i, state in enumerate(trace.states):
        attrs = f"label={dot_quote(format_multiset(state))}"
        if trace.converged_at is not None and i == trace.converged_at:
            attrs += ", peripheries=2"
        lines.append(f"  s{i} [{attrs}];")
    for i, s in enumerate(trace.steps):
        label = f"{_fed(s.fed)} / {format_multiset(s.fired)}"
        lines.append(f"  s{i} -> s{i + 1} [label={dot_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def automaton_dot(automaton: ReactionAutomaton, name: str = "automaton") -> str:
    """Bipartite reaction diagram: symbols as ellipses, reactions as boxes, inhibitors dashed."""
    lines = [f"digraph {dot_quote(name)} {{"]
    for s in automaton.background:
        shape = "doublecircle" if s == automaton.final else "ellipse"
        lines.append(f"  {dot_quote('s:' + s)} [label={dot_quote(s)}, shape={shape}];")
    for r in automaton.reactions:
        rid = dot_quote("r:" + r.label)
        lines.append(f"  {rid} [label={dot_quote(r.label)}, shape=box];")
        for s, k in sorted(r.reactants.items()):
            lines.append(f"  {dot_quote('s:' + s)} -> {rid} [label={dot_quote(str(k))}];")
        for s in sorted(r.inhibitors):
            lines.append(f"  {dot_quote('s:' + s)} -> {rid} [style=dashed, arrowhead=tee];")
        for s, k in sorted(r.products.items()):
            lines.append(f"  {rid} -> {dot_quote('s:' + s)} [label={dot_quote(str(k))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
