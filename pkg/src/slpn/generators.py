"""Random nets, automata and traces for property tests and experiments."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .automata import DFA, WILDCARD, make_dfa
from .errors import SlpnError
from .net import IMMEDIATE, LGSPN, LSP, TAU, TIMED, Marking, Transition
from .reachability import StochasticTransitionSystem, build_reachability_graph

WEIGHTS = (0.5, 1.0, 1.0, 2.0, 3.0)


@dataclass(frozen=True)
class NetShape:
    max_places: int = 10
    max_transitions: int = 12
    labels: tuple[str, ...] = ("a", "b", "c", "d")
    silent_share: float = 0.35
    immediate_share: float = 0.25
    min_states: int = 6
    state_cap: int = 300


def _pick(rng, seq, k):
    idx = rng.choice(len(seq), size=k, replace=False)
    return [seq[i] for i in sorted(idx)]


def _transitions(rng, n, shape: NetShape, allow_immediate=True):
    ts = []
    for i in range(n):
        silent = rng.random() < shape.silent_share
        label = TAU if silent else shape.labels[rng.integers(len(shape.labels))]
        kind = IMMEDIATE if allow_immediate and rng.random() < shape.immediate_share else TIMED
        ts.append(Transition(f"t{i}", kind, WEIGHTS[rng.integers(len(WEIGHTS))], label))
    if not any(t.silent for t in ts):
        j = int(rng.integers(n))
        ts[j] = Transition(ts[j].id, ts[j].kind, ts[j].weight, TAU)
    return ts


def random_net(rng: np.random.Generator, shape: NetShape = NetShape()) -> LSP:
    """One unconstrained draw; may be unbounded or trivial."""
    n_p = int(rng.integers(2, shape.max_places + 1))
    n_t = int(rng.integers(2, shape.max_transitions + 1))
    places = [f"p{i}" for i in range(n_p)]
    ts = _transitions(rng, n_t, shape)
    arcs = []
    for t in ts:
        pre = _pick(rng, places, int(rng.choice([1, 1, 1, 2])))
        post = _pick(rng, places, int(rng.choice([0, 1, 1, 1, 2])))
        arcs += [(p, t.id) for p in pre] + [(t.id, p) for p in post]
    initial = {"p0": 1}
    if rng.random() < 0.3:
        initial[places[rng.integers(1, n_p)]] = 1
    return LSP(LGSPN(tuple(places), tuple(ts), tuple(arcs)), Marking(initial))


def random_bounded_lsp(
    rng: np.random.Generator, shape: NetShape = NetShape(), max_tries: int = 20000
) -> tuple[LSP, StochasticTransitionSystem]:
    """Rejection-sample a net whose reachability graph has between
    ``shape.min_states`` and ``shape.state_cap`` states and a final marking."""
    for _ in range(max_tries):
        lsp = random_net(rng, shape)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                sts = build_reachability_graph(lsp, shape.state_cap)
        except SlpnError:
            continue
        if sts.finals and len(sts) >= shape.min_states:
            return lsp, sts
    raise RuntimeError("no bounded net found; loosen the shape")


def random_acyclic_lsp(
    rng: np.random.Generator, shape: NetShape = NetShape(), max_tries: int = 20000
) -> tuple[LSP, StochasticTransitionSystem]:
    """Net whose runs all terminate.

    Every transition only produces into places with a higher index than the
    lowest place it consumes from, so each firing strictly decreases the
    marking in lexicographic order of the place vector.
    """
    for _ in range(max_tries):
        n_p = int(rng.integers(3, shape.max_places + 1))
        n_t = int(rng.integers(2, shape.max_transitions + 1))
        places = [f"p{i}" for i in range(n_p)]
        ts = _transitions(rng, n_t, shape)
        arcs = []
        for t in ts:
            lo = int(rng.integers(0, n_p - 1))
            pre = [lo] + ([int(rng.integers(lo + 1, n_p))] if rng.random() < 0.3 else [])
            later = list(range(lo + 1, n_p))
            k = min(len(later), int(rng.choice([0, 1, 1, 2])))
            post = _pick(rng, later, k)
            arcs += [(places[i], t.id) for i in sorted(set(pre))]
            arcs += [(t.id, places[i]) for i in post]
        lsp = LSP(LGSPN(tuple(places), tuple(ts), tuple(arcs)), Marking({"p0": 1}))
        try:
            sts = build_reachability_graph(lsp, shape.state_cap)
        except SlpnError:
            continue
        if len(sts) >= shape.min_states:
            return lsp, sts
    raise RuntimeError("no acyclic net found; loosen the shape")


def random_timed_lsp(
    rng: np.random.Generator, shape: NetShape = NetShape()
) -> tuple[LSP, StochasticTransitionSystem]:
    """Bounded net with timed transitions only."""
    return random_bounded_lsp(rng, NetShape(**{**shape.__dict__, "immediate_share": 0.0}))


def random_dfa(
    rng: np.random.Generator, alphabet, n_states: int = 3, accept_share: float = 0.5
) -> DFA:
    """Random automaton; some states get a wildcard, others stay partial."""
    alphabet = sorted(alphabet)
    states = [f"q{i}" for i in range(n_states)]
    triples = []
    for s in states:
        for a in alphabet:
            if rng.random() < 0.6:
                triples.append((s, a, states[rng.integers(n_states)]))
        if rng.random() < 0.5:
            triples.append((s, WILDCARD, states[rng.integers(n_states)]))
    acc = [s for s in states if rng.random() < accept_share]
    return make_dfa(alphabet, states, states[0], acc, triples)


def model_traces(sts: StochasticTransitionSystem, max_runs: int = 100_000) -> set[tuple[str, ...]]:
    """All traces of an acyclic graph, by exhaustive run enumeration."""
    out: set[tuple[str, ...]] = set()
    stack = [(sts.initial, ())]
    runs = 0
    while stack:
        s, trace = stack.pop()
        if s in sts.finals:
            out.add(trace)
        for e in sts.outgoing[s]:
            runs += 1
            if runs > max_runs:
                raise RuntimeError("too many runs; is the graph acyclic?")
            stack.append((e.target, trace if e.label == TAU else trace + (e.label,)))
    return out


def random_trace(rng: np.random.Generator, labels, max_len: int = 5) -> tuple[str, ...]:
    n = int(rng.integers(0, max_len + 1))
    labels = sorted(labels)
    return tuple(labels[rng.integers(len(labels))] for _ in range(n)) if labels else ()


def insert_silent_chain(lsp: LSP, transition: str, place: str, length: int = 1) -> LSP:
    """Route the arc ``transition -> place`` through ``length`` immediate
    silent transitions of weight 1."""
    net = lsp.net
    if (transition, place) not in net.arcs:
        raise ValueError(f"no arc {transition} -> {place}")
    if length < 1:
        raise ValueError("chain length must be positive")
    names = set(net.places) | {t.id for t in net.transitions}
    fresh_p, fresh_t = [], []
    i = 0
    while len(fresh_p) < length:
        p, t = f"ins_p{i}", f"ins_t{i}"
        if p not in names and t not in names:
            fresh_p.append(p)
            fresh_t.append(t)
        i += 1
    arcs = [a for a in net.arcs if a != (transition, place)]
    arcs.append((transition, fresh_p[0]))
    for k in range(length):
        arcs.append((fresh_p[k], fresh_t[k]))
        arcs.append((fresh_t[k], fresh_p[k + 1] if k + 1 < length else place))
    ts = net.transitions + tuple(Transition(t, IMMEDIATE, 1.0, TAU) for t in fresh_t)
    new = LGSPN(net.places + tuple(fresh_p), ts, tuple(arcs))
    return LSP(new, lsp.initial, lsp.finals)
