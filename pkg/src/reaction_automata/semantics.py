"""Operational semantics: enabledness, maximally parallel steps, interactive processes.

States are handled internally as count vectors indexed by the background set;
the public functions take and return :class:`Multiset` values.
"""

from __future__ import annotations

import heapq
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .errors import InputError
from .model import BoundSpec, ReactionAutomaton, ReactionMultiset, Word, as_word, constant, reaction_multiset_parts
from .multiset import Multiset, contains, disjoint_with_set, msum, difference

ORDINARY = "ordinary"
LAMBDA = "lambda"

Vec = tuple[int, ...]
Alpha = tuple[tuple[int, int], ...]  # (reaction index, count), sorted by index


def normalize_mode(mode: str) -> str:
    m = mode.lower()
    if m in ("ordinary", "ord"):
        return ORDINARY
    if m in ("lambda", "λ", "lam", "lambda-input"):
        return LAMBDA
    raise InputError(f"unknown input mode {mode!r} (expected ordinary or lambda)")


class _Core:
    """Vector form of an automaton with per-state caches for maximal steps."""

    def __init__(self, automaton: ReactionAutomaton):
        self.automaton = automaton
        self.symbols = tuple(automaton.background)
        self.index = {s: i for i, s in enumerate(self.symbols)}
        rs = sorted(automaton.reactions, key=lambda r: r.label)
        self.labels = [r.label for r in rs]
        self.req = [tuple((self.index[s], k) for s, k in r.reactants.items()) for r in rs]
        self.inh = [tuple(self.index[s] for s in r.inhibitors) for r in rs]
        delta = []
        for r in rs:
            d: dict[int, int] = {}
            for s, k in r.reactants.items():
                d[self.index[s]] = d.get(self.index[s], 0) - k
            for s, k in r.products.items():
                d[self.index[s]] = d.get(self.index[s], 0) + k
            delta.append(tuple((i, k) for i, k in d.items() if k))
        self.delta = delta
        self.req_syms = [frozenset(i for i, _ in q) for q in self.req]
        self.final = self.index[automaton.final]
        self._maximal: dict[Vec, list[Alpha]] = {}
        self.req_mask = [sum(1 << i for i in q) for q in self.req_syms]
        self.inh_mask = [sum(1 << i for i in q) for q in self.inh]
        self.prod_mask = [sum(1 << self.index[s] for s in r.products) for r in rs]
        self.consumers = [[j for j, q in enumerate(self.req_syms) if i in q] for i in range(len(self.symbols))]
        self._viable: dict[tuple[Vec, int], bool] = {}
        self._results: dict[Vec, list[tuple[Vec, Alpha]]] = {}

    # conversions

    def vec(self, m: Multiset) -> Vec:
        v = [0] * len(self.symbols)
        for s, k in m.items():
            try:
                v[self.index[s]] = k
            except KeyError:
                raise InputError(f"symbol {s!r} is not in the background set") from None
        return tuple(v)

    def ms(self, v: Vec) -> Multiset:
        return Multiset._trusted({self.symbols[i]: k for i, k in enumerate(v) if k})

    def alpha_ms(self, alpha: Alpha) -> ReactionMultiset:
        return Multiset._trusted({self.labels[j]: k for j, k in alpha})

    def add_symbol(self, v: Vec, sym: str) -> Vec:
        i = self.index[sym]
        return v[:i] + (v[i] + 1,) + v[i + 1:]

    # maximal parallelism

    def candidates(self, t: Vec) -> list[int]:
        """Reactions applicable on their own; any sub-multiset of these whose demand fits is enabled."""
        out = []
        for j, q in enumerate(self.req):
            if all(t[i] >= k for i, k in q) and not any(t[i] for i in self.inh[j]):
                out.append(j)
        return out

    def maximal(self, t: Vec) -> list[Alpha]:
        """En^p(t) as sorted index/count tuples.

        Inhibitors depend on t alone, so a multiset of individually applicable
        reactions is enabled iff its total demand fits in t.  Reactions sharing
        no reactant symbol are independent, so the search runs per connected
        component and the results are combined as a product.  Within a
        component, a depth-first search (scarcest reaction first) tries counts from the
        largest down and keeps leaves where no reaction still fits.
        """
        hit = self._maximal.get(t)
        if hit is not None:
            return hit
        cands = self.candidates(t)
        if not cands:
            self._maximal[t] = []
            return []
        comps = self._components(cands)
        partial: list[Alpha] = [()]
        for comp in comps:
            options = self._component_maximal(t, comp)
            partial = [a + b for a in partial for b in options]
        out = [tuple(sorted(a)) for a in partial]
        self._maximal[t] = out
        return out

    def _components(self, cands: list[int]) -> list[list[int]]:
        parent = {j: j for j in cands}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        owner: dict[int, int] = {}
        for j in cands:
            for i in self.req_syms[j]:
                if i in owner:
                    parent[find(j)] = find(owner[i])
                else:
                    owner[i] = j
        groups: dict[int, list[int]] = {}
        for j in cands:
            groups.setdefault(find(j), []).append(j)
        return sorted(groups.values())

    def _component_maximal(self, t: Vec, comp: list[int]) -> list[Alpha]:
        req = self.req
        if len(comp) == 1:
            j = comp[0]
            return [((j, min(t[i] // k for i, k in req[j])),)]
        # scarce reactions first: the abundant ones placed last are then forced to their maximum
        comp = sorted(comp, key=lambda j: (min(t[i] // k for i, k in req[j]), j))
        # later_share[p]: some reaction after position p shares a reactant symbol with comp[p]
        later_share = [any(self.req_syms[comp[p]] & self.req_syms[comp[r]] for r in range(p + 1, len(comp)))
                       for p in range(len(comp))]
        # closing[pos]: reactions whose demand no reaction from position pos on can reduce any more;
        # if one of them still fits there, no leaf below is maximal
        last_partner = [max([r for r in range(len(comp)) if self.req_syms[comp[p]] & self.req_syms[comp[r]]],
                            default=p) for p in range(len(comp))]
        closing: list[list[int]] = [[] for _ in range(len(comp) + 1)]
        for p, r in enumerate(last_partner):
            closing[max(p, r) + 1].append(comp[p])
        rem = {i: t[i] for j in comp for i in self.req_syms[j]}
        out: list[Alpha] = []
        chosen: list[tuple[int, int]] = []

        def fits(j):
            return all(rem[i] >= k for i, k in req[j])

        def rec(pos):
            if any(fits(j) for j in closing[pos]):
                return
            if pos == len(comp):
                if not any(fits(j) for j in comp):
                    out.append(tuple(chosen))
                return
            j = comp[pos]
            kmax = min(rem[i] // k for i, k in req[j])
            low = 0 if later_share[pos] else kmax
            for c in range(kmax, low - 1, -1):
                for i, k in req[j]:
                    rem[i] -= c * k
                if c:
                    chosen.append((j, c))
                rec(pos + 1)
                if c:
                    chosen.pop()
                for i, k in req[j]:
                    rem[i] += c * k

        rec(0)
        return out

    def apply(self, t: Vec, alpha: Alpha) -> Vec:
        v = list(t)
        for j, c in alpha:
            for i, k in self.delta[j]:
                v[i] += c * k
        return tuple(v)

    def results(self, t: Vec) -> list[tuple[Vec, Alpha]]:
        """Res(t) with one generating alpha per distinct result; [(t, ())] if nothing is enabled."""
        hit = self._results.get(t)
        if hit is not None:
            return hit
        alphas = self.maximal(t)
        if not alphas:
            out = [(t, ())]
        else:
            seen: dict[Vec, Alpha] = {}
            for a in alphas:
                seen.setdefault(self.apply(t, a), a)
            out = list(seen.items())
        self._results[t] = out
        return out

    def symbol_mask(self, symbols: Iterable[str]) -> int:
        return sum(1 << self.index[a] for a in set(symbols))

    def viable(self, t: Vec, future: int) -> bool:
        """False only if the final symbol can never appear from ``t`` when at most the
        symbols in the bit mask ``future`` are fed later.

        A reaction is dead when a reactant can never appear, or when an
        inhibitor is present in ``t`` and only dead reactions consume it (so it
        stays present for ever).  The possible symbols are the closure of the
        support and ``future`` under the live reactions; the two sets are
        refined together until they stop changing.
        """
        key = (t, future)
        hit = self._viable.get(key)
        if hit is not None:
            return hit
        support = 0
        for i, k in enumerate(t):
            if k:
                support |= 1 << i
        n = len(self.req_mask)
        dead = 0  # bit j set: reaction j can never fire again
        while True:
            possible = support | future
            grew = True
            while grew:
                grew = False
                for j in range(n):
                    if not dead >> j & 1 and self.req_mask[j] & ~possible == 0 and self.prod_mask[j] & ~possible:
                        possible |= self.prod_mask[j]
                        grew = True
            new_dead = dead
            for j in range(n):
                if self.req_mask[j] & ~possible:
                    new_dead |= 1 << j
            stuck = 0
            rest = support
            while rest:
                low = rest & -rest
                i = low.bit_length() - 1
                if all(new_dead >> j & 1 for j in self.consumers[i]):
                    stuck |= low
                rest ^= low
            for j in range(n):
                if self.inh_mask[j] & stuck:
                    new_dead |= 1 << j
            if new_dead == dead:
                break
            dead = new_dead
        out = bool(possible >> self.final & 1)
        self._viable[key] = out
        return out

    def converged(self, t: Vec) -> bool:
        hit = self._maximal.get(t)
        return not (self.candidates(t) if hit is None else hit)


def core(automaton: ReactionAutomaton) -> _Core:
    """The cached vector form of ``automaton``."""
    c = automaton.__dict__.get("_core")
    if c is None:
        c = _Core(automaton)
        automaton.__dict__["_core"] = c
    return c


# Public single-step operations


def enabled(automaton: ReactionAutomaton, alpha: ReactionMultiset, state: Multiset) -> bool:
    reactants, inhibitors, _ = reaction_multiset_parts(automaton, alpha)
    return contains(reactants, state) and disjoint_with_set(state, inhibitors)


def enumerate_maximal(automaton: ReactionAutomaton, state: Multiset) -> set[ReactionMultiset]:
    c = core(automaton)
    return {c.alpha_ms(a) for a in c.maximal(c.vec(state))}


def results(automaton: ReactionAutomaton, state: Multiset) -> set[Multiset]:
    c = core(automaton)
    return {c.ms(v) for v, _ in c.results(c.vec(state))}


def fire(automaton: ReactionAutomaton, state: Multiset, alpha: ReactionMultiset) -> Multiset:
    """T - R_alpha + P_alpha (no enabledness check)."""
    reactants, _, products = reaction_multiset_parts(automaton, alpha)
    return msum(difference(state, reactants), products)


@dataclass(frozen=True)
class Configuration:
    state: Multiset
    consumed: int


def _check_word(automaton: ReactionAutomaton, word) -> Word:
    w = as_word(word)
    sigma = set(automaton.input_alphabet)
    for a in w:
        if a not in sigma:
            raise InputError(f"symbol {a!r} is not in the input alphabet")
    return w


def successors(automaton: ReactionAutomaton, config: Configuration, word, mode: str = ORDINARY
               ) -> set[Configuration]:
    mode = normalize_mode(mode)
    w = _check_word(automaton, word)
    c = core(automaton)
    t = c.vec(config.state)
    out: set[Configuration] = set()
    if config.consumed < len(w):
        fed = c.add_symbol(t, w[config.consumed])
        out |= {Configuration(c.ms(v), config.consumed + 1) for v, _ in c.results(fed)}
        if mode == LAMBDA and not c.converged(t):
            out |= {Configuration(c.ms(v), config.consumed) for v, _ in c.results(t)}
    elif not c.converged(t):
        out |= {Configuration(c.ms(v), config.consumed) for v, _ in c.results(t)}
    return out


# Traces and search


@dataclass(frozen=True)
class TraceStep:
    fed: str | None  # None: nothing fed (a lambda step or post-input evolution)
    fired: ReactionMultiset
    result: Multiset


@dataclass(frozen=True)
class Trace:
    word: Word
    initial: Multiset
    steps: tuple[TraceStep, ...]
    converged_at: int | None

    @property
    def states(self) -> list[Multiset]:
        return [self.initial] + [s.result for s in self.steps]

    @property
    def workspace(self) -> int:
        return max(m.weight for m in self.states)


@dataclass(frozen=True)
class SearchOutcome:
    accepted: bool
    witness: Trace | None
    explored: int
    pruned_by_bound: bool


def resolve_bound(automaton: ReactionAutomaton, bound: BoundSpec | int | None) -> BoundSpec:
    if bound is None:
        bound = automaton.declared_bound
    if bound is None:
        raise InputError("no workspace bound given and the automaton declares none")
    if isinstance(bound, int):
        return constant(bound)
    return bound


@dataclass
class _Search:
    """Breadth-first exploration of (state, consumed) configurations within a weight cap."""

    core: _Core
    word: Word
    mode: str
    cap: int
    state_cap: int | None = None  # optional tighter cap on the D_i only, used by workspace
    parents: dict = field(default_factory=dict)
    pruned: bool = False
    prune_dead: bool = True  # drop configurations from which the final symbol cannot appear

    def __post_init__(self):
        self.future = [self.core.symbol_mask(self.word[n:]) for n in range(len(self.word) + 1)]

    def live(self, v: Vec, n: int) -> bool:
        return not self.prune_dead or self.core.viable(v, self.future[n])

    def ok(self, v: Vec, seeded: bool = False) -> bool:
        w = sum(v)
        if w > self.cap or (not seeded and self.state_cap is not None and w > self.state_cap):
            self.pruned = True
            return False
        return True

    def expand(self, v: Vec, n: int):
        """Yield (successor config, fed symbol or None, alpha)."""
        c, w = self.core, self.word
        if n < len(w):
            fed = c.add_symbol(v, w[n])
            if self.ok(fed, seeded=True):
                for r, a in c.results(fed):
                    if self.ok(r) and self.live(r, n + 1):
                        yield (r, n + 1), w[n], a
            if self.mode == LAMBDA and not c.converged(v):
                for r, a in c.results(v):
                    if self.ok(r) and self.live(r, n):
                        yield (r, n), None, a
        elif not c.converged(v):
            for r, a in c.results(v):
                if self.ok(r) and self.live(r, n):
                    yield (r, n), None, a

    def accepting(self, cfg) -> bool:
        v, n = cfg
        return n == len(self.word) and v[self.core.final] > 0 and self.core.converged(v)

    def run(self, start: Vec):
        if not self.ok(start):
            return None
        self.parents = {(start, 0): None}
        queue = deque([(start, 0)])
        while queue:
            cfg = queue.popleft()
            if self.accepting(cfg):
                return cfg
            for nxt, fed, a in self.expand(*cfg):
                if nxt not in self.parents:
                    self.parents[nxt] = (cfg, fed, a)
                    queue.append(nxt)
        return None

    def trace(self, end) -> Trace:
        steps = []
        cfg = end
        while self.parents[cfg] is not None:
            prev, fed, a = self.parents[cfg]
            steps.append(TraceStep(fed, self.core.alpha_ms(a), self.core.ms(cfg[0])))
            cfg = prev
        steps.reverse()
        return Trace(self.word, self.core.ms(cfg[0]), tuple(steps), len(steps))


def accepts(automaton: ReactionAutomaton, word, bound: BoundSpec | int | None = None,
            mode: str = ORDINARY) -> SearchOutcome:
    """Decide bounded acceptance of ``word``; every visited state, seeded ones included, respects the bound."""
    mode = normalize_mode(mode)
    w = _check_word(automaton, word)
    b = resolve_bound(automaton, bound)
    c = core(automaton)
    search = _Search(c, w, mode, b(len(w)))
    end = search.run(c.vec(automaton.initial))
    if end is None:
        return SearchOutcome(False, None, len(search.parents), search.pruned)
    return SearchOutcome(True, search.trace(end), len(search.parents), search.pruned)


def accepting_trace(automaton: ReactionAutomaton, word, bound: BoundSpec | int | None = None,
                    mode: str = ORDINARY) -> Trace | None:
    return accepts(automaton, word, bound, mode).witness


def workspace(automaton: ReactionAutomaton, word, bound: BoundSpec | int | None = None,
              mode: str = ORDINARY) -> int | None:
    """min over accepting processes of max |D_i|, searched within the bound.

    A bottleneck (minimax) variant of Dijkstra's algorithm: configurations are
    settled in order of the largest state weight on the best path to them, so
    the first accepting configuration settled carries the workspace.
    """
    mode = normalize_mode(mode)
    w = _check_word(automaton, word)
    b = resolve_bound(automaton, bound)
    c = core(automaton)
    search = _Search(c, w, mode, b(len(w)))
    start = c.vec(automaton.initial)
    if not search.ok(start):
        return None
    best = {(start, 0): sum(start)}
    heap = [(sum(start), 0, (start, 0))]
    tick = 1
    done = set()
    while heap:
        cost, _, cfg = heapq.heappop(heap)
        if cfg in done:
            continue
        done.add(cfg)
        if search.accepting(cfg):
            return cost
        for nxt, _fed, _a in search.expand(*cfg):
            nc = max(cost, sum(nxt[0]))
            if nc < best.get(nxt, nc + 1):
                best[nxt] = nc
                heapq.heappush(heap, (nc, tick, nxt))
                tick += 1
    return None


def replay(automaton: ReactionAutomaton, trace: Trace, mode: str = ORDINARY) -> list[str]:
    """Check every step of ``trace`` against the step relation; returns problems (empty if valid)."""
    mode = normalize_mode(mode)
    problems = []
    if trace.initial != automaton.initial:
        problems.append("trace does not start at the initial multiset")
    state = trace.initial
    consumed = 0
    for i, step in enumerate(trace.steps):
        t = state
        if step.fed is not None:
            if consumed >= len(trace.word) or trace.word[consumed] != step.fed:
                problems.append(f"step {i}: fed {step.fed!r} out of order")
                break
            t = msum(t, Multiset._trusted({step.fed: 1}))
            consumed += 1
        elif consumed < len(trace.word) and mode == ORDINARY:
            problems.append(f"step {i}: lambda step in ordinary mode")
        maximal = enumerate_maximal(automaton, t)
        if maximal:
            if step.fired not in maximal:
                problems.append(f"step {i}: fired {step.fired} is not maximally enabled")
            elif fire(automaton, t, step.fired) != step.result:
                problems.append(f"step {i}: result does not match fired reactions")
        elif step.fired or step.result != t:
            problems.append(f"step {i}: nothing enabled but state changed")
        state = step.result
    if consumed != len(trace.word):
        problems.append("trace does not consume the whole word")
    if enumerate_maximal(automaton, state):
        problems.append("trace does not end in a converged state")
    if automaton.final not in state:
        problems.append("final state lacks the final symbol")
    return problems


def reachable_states(automaton: ReactionAutomaton, word, bound: BoundSpec | int | None = None,
                     mode: str = ORDINARY) -> set[Multiset]:
    """Every state reachable (within the bound) while processing ``word``."""
    mode = normalize_mode(mode)
    w = _check_word(automaton, word)
    b = resolve_bound(automaton, bound)
    c = core(automaton)
    search = _Search(c, w, mode, b(len(w)), prune_dead=False)
    start = c.vec(automaton.initial)
    if not search.ok(start):
        return set()
    seen = {(start, 0)}
    queue = deque(seen)
    while queue:
        cfg = queue.popleft()
        for nxt, _, _ in search.expand(*cfg):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return {c.ms(v) for v, _ in seen}


# Language enumeration with shared prefixes


def accepted_words(automaton: ReactionAutomaton, max_length: int, bound: BoundSpec | int | None = None,
                   mode: str = ORDINARY, alphabet: Sequence[str] | None = None
                   ) -> tuple[set[Word], bool]:
    """All words up to ``max_length`` accepted within the bound, plus a pruned-by-bound flag.

    Equivalent to calling :func:`accepts` on every word, but for each target
    length the prefixes are explored as a trie: the set of configurations
    after a prefix is computed once, and a prefix with no live configuration
    cuts off all its extensions.
    """
    mode = normalize_mode(mode)
    b = resolve_bound(automaton, bound)
    c = core(automaton)
    sigma = list(alphabet) if alphabet is not None else list(automaton.input_alphabet)
    start = c.vec(automaton.initial)
    words: set[Word] = set()
    pruned = False
    for n in range(max_length + 1):
        cap = b(n)
        if sum(start) > cap:
            pruned = True
            continue
        search = _Search(c, (), mode, cap)
        everything = c.symbol_mask(sigma)
        finish: dict[Vec, bool] = {}

        def can_finish(v: Vec) -> bool:
            hit = finish.get(v)
            if hit is None:
                hit = _free_accepts(search, v)
                finish[v] = hit
            return hit

        def closure(states: Iterable[Vec], future: int) -> frozenset[Vec]:
            seen = {v for v in states if c.viable(v, future)}
            if mode == LAMBDA:
                queue = deque(seen)
                while queue:
                    v = queue.popleft()
                    if c.converged(v):
                        continue
                    for r, _ in c.results(v):
                        if r not in seen and search.ok(r) and c.viable(r, future):
                            seen.add(r)
                            queue.append(r)
            return frozenset(seen)

        def walk(prefix: Word, states: frozenset[Vec]):
            if len(prefix) == n:
                if any(can_finish(v) for v in states):
                    words.add(prefix)
                return
            future = everything if len(prefix) + 1 < n else 0
            for a in sigma:
                nxt = []
                for v in states:
                    fed = c.add_symbol(v, a)
                    if not search.ok(fed, seeded=True):
                        continue
                    nxt.extend(r for r, _ in c.results(fed) if search.ok(r))
                live = closure(nxt, future)
                if live:
                    walk(prefix + (a,), live)

        walk((), closure([start], everything if n else 0))
        pruned = pruned or search.pruned
    return words, pruned


def _free_accepts(search: _Search, v: Vec) -> bool:
    c = search.core
    seen = {v}
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        if c.converged(u):
            if u[c.final]:
                return True
            continue
        for r, _ in c.results(u):
            if r not in seen and search.ok(r) and c.viable(r, 0):
                seen.add(r)
                queue.append(r)
    return False
