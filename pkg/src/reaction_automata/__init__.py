"""Reaction automata: maximally parallel multiset-rewriting acceptors and their closure constructions."""

from .constructions import (
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
from .errors import (
    ConstructionError,
    InputError,
    ModelError,
    MultisetError,
    ParseError,
    ReactionAutomatonError,
    SampleError,
)
from .fileformat import parse_automaton, serialize_automaton
from .model import (
    DFA,
    GSM,
    BoundSpec,
    Morphism,
    Reaction,
    ReactionAutomaton,
    build_automaton,
    constant,
    exponential,
    extend_alphabet,
    linear,
    polynomial,
    reaction,
)
from .multiset import Multiset, ms, stm
from .oracle import enumerate_language, fixture, predicate
from .semantics import LAMBDA, ORDINARY, accepting_trace, accepts, enumerate_maximal, replay, workspace

__version__ = "0.1.0"
