"""Deterministic finite automata over activity labels and their product
with stochastic transition systems.

DFAs may be partial: a missing transition rejects. A state may carry an
``other`` target that handles every non-silent label without an explicit
transition, which is how the ``*`` wildcard of the text format survives for
labels outside the declared alphabet.
"""

from __future__ import annotations

import shlex
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .errors import ParseError
from .net import TAU
from .reachability import Edge, StochasticTransitionSystem

WILDCARD = "*"


@dataclass(frozen=True)
class DFA:
    alphabet: frozenset[str]
    states: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    delta: dict[tuple[str, str], str] = field(hash=False)
    other: dict[str, str] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        known = set(self.states)
        if len(known) != len(self.states):
            raise ValueError("duplicate DFA state")
        if self.initial not in known:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        if not self.accepting <= known:
            raise ValueError(f"accepting states {sorted(self.accepting - known)} are not states")
        for (src, label), dst in self.delta.items():
            if src not in known or dst not in known:
                raise ValueError(f"transition {src} -{label}-> {dst} refers to unknown state")
            if label not in self.alphabet:
                raise ValueError(f"transition label {label!r} not in alphabet")
        for src, dst in self.other.items():
            if src not in known or dst not in known:
                raise ValueError(f"wildcard {src} -> {dst} refers to unknown state")

    @property
    def silenced(self) -> bool:
        return TAU in self.alphabet

    def step(self, state: str, label: str) -> str | None:
        # alphabet labels are fully expanded in delta; the wildcard fallback
        # only serves labels the automaton never declared
        if label in self.alphabet:
            return self.delta.get((state, label))
        return self.other.get(state)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DFA):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.states == other.states
            and self.initial == other.initial
            and self.accepting == other.accepting
            and self.delta == other.delta
            and self.other == other.other
        )

    __hash__ = None  # type: ignore[assignment]


def make_dfa(
    alphabet: Iterable[str],
    states: Sequence[str],
    initial: str,
    accepting: Iterable[str],
    transitions: Iterable[tuple[str, str, str]],
) -> DFA:
    """Build a DFA from ``(src, label, dst)`` triples; ``label`` may be ``*``.

    Wildcards are expanded against the alphabet and also kept as the
    state's fallback for labels outside it.
    """
    alphabet = frozenset(alphabet)
    delta: dict[tuple[str, str], str] = {}
    other: dict[str, str] = {}
    for src, label, dst in transitions:
        if label == WILDCARD:
            if src in other:
                raise ValueError(f"two wildcard transitions from {src}")
            other[src] = dst
            continue
        if (src, label) in delta:
            raise ValueError(f"nondeterministic transitions from {src} on {label!r}")
        delta[(src, label)] = dst
    for src, dst in other.items():
        for label in alphabet:
            if label != TAU:
                delta.setdefault((src, label), dst)
    return DFA(alphabet, tuple(states), initial, frozenset(accepting), delta, other)


def accepts(dfa: DFA, word: Iterable[str]) -> bool:
    state: str | None = dfa.initial
    for label in word:
        if label not in dfa.alphabet:
            raise ValueError(f"symbol {label!r} outside the automaton alphabet")
        state = dfa.step(state, label)
        if state is None:
            return False
    return state in dfa.accepting


def silence(dfa: DFA) -> DFA:
    """Add a silent self-loop to every state."""
    if dfa.silenced:
        raise ValueError("automaton is already silenced")
    delta = dict(dfa.delta)
    for s in dfa.states:
        delta[(s, TAU)] = s
    return DFA(dfa.alphabet | {TAU}, dfa.states, dfa.initial, dfa.accepting, delta, dict(dfa.other))


def trace_dfa(trace: Sequence[str]) -> DFA:
    """Linear automaton accepting exactly ``trace``."""
    states = tuple(f"q{i}" for i in range(len(trace) + 1))
    delta = {(states[i], a): states[i + 1] for i, a in enumerate(trace)}
    return DFA(frozenset(trace), states, states[0], frozenset({states[-1]}), delta)


def universal_dfa(alphabet: Iterable[str]) -> DFA:
    return make_dfa(alphabet, ["u"], "u", ["u"], [("u", WILDCARD, "u")])


def empty_dfa(alphabet: Iterable[str]) -> DFA:
    return make_dfa(alphabet, ["e"], "e", [], [("e", WILDCARD, "e")])


def complement(dfa: DFA) -> DFA:
    """Complement over the DFA's own alphabet plus anything its wildcards catch.

    The automaton is first totalised with a rejecting sink; labels with no
    transition and no wildcard then lead to the sink, which becomes
    accepting after the flip.
    """
    if dfa.silenced:
        raise ValueError("complement expects an unsilenced automaton")
    sink = "__sink__"
    while sink in dfa.states:
        sink += "_"
    states = list(dfa.states) + [sink]
    triples = [(s, a, t) for (s, a), t in dfa.delta.items() if (s, a) not in _wild_expanded(dfa)]
    for s in dfa.states:
        triples.append((s, WILDCARD, dfa.other.get(s, sink)))
    triples.append((sink, WILDCARD, sink))
    acc = [s for s in states if s not in dfa.accepting]
    return make_dfa(dfa.alphabet, states, dfa.initial, acc, triples)


def _wild_expanded(dfa: DFA) -> set[tuple[str, str]]:
    # delta entries the wildcard would regenerate; tau is never one of them
    return {(s, a) for (s, a), t in dfa.delta.items() if a != TAU and dfa.other.get(s) == t}


def product(sts: StochasticTransitionSystem, sdfa: DFA) -> StochasticTransitionSystem:
    """Synchronous product of a stochastic transition system with a silenced DFA.

    Only pairs reachable from the initial pair are built. Graph edges whose
    label the automaton cannot read are dropped, so product states may be
    sub-stochastic. A pair is final when its graph state is final and its
    automaton state accepting.
    """
    if not sdfa.silenced:
        raise ValueError("product expects a silenced automaton")
    start = (sts.initial, sdfa.initial)
    states = [start]
    index = {start: 0}
    edges: list[Edge] = []
    finals = set()
    queue = deque([0])
    while queue:
        i = queue.popleft()
        g, q = states[i]
        if g in sts.finals and q in sdfa.accepting:
            finals.add(i)
        for e in sts.outgoing[g]:
            q2 = sdfa.step(q, e.label)
            if q2 is None:
                continue
            pair = (e.target, q2)
            j = index.get(pair)
            if j is None:
                j = len(states)
                states.append(pair)
                index[pair] = j
                queue.append(j)
            edges.append(Edge(i, e.transition, e.label, j, e.probability))
    return StochasticTransitionSystem(tuple(states), tuple(edges), frozenset(finals), 0)


def complete_product(prod: StochasticTransitionSystem) -> StochasticTransitionSystem:
    """Export-only completion: route missing mass to a fresh non-final sink."""
    sink = len(prod)
    extra = []
    for s in range(len(prod)):
        if s in prod.finals:
            continue
        gap = 1.0 - prod.out_mass(s)
        if gap > 1e-12:
            extra.append(Edge(s, "t_sink", TAU, sink, gap))
    if not extra:
        return prod
    return StochasticTransitionSystem(
        prod.states + ("sink",), prod.edges + tuple(extra), prod.finals, prod.initial
    )


def parse_dfa(text: str) -> DFA:
    """Parse the ``alphabet`` / ``state`` / ``trans`` text format."""
    alphabet: list[str] | None = None
    states: list[str] = []
    initial: str | None = None
    accepting: list[str] = []
    triples: list[tuple[str, str, str]] = []
    silenced = False
    trans_lines: list[tuple[int, str, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        try:
            toks = shlex.split(raw, comments=True)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if not toks:
            continue
        kw, args = toks[0], toks[1:]
        if kw == "silenced":
            silenced = True
        elif kw == "alphabet":
            if alphabet is not None:
                raise ParseError("alphabet declared twice", lineno)
            if TAU in args:
                raise ParseError("'tau' cannot be declared in the alphabet", lineno)
            alphabet = args
        elif kw == "state":
            if not args:
                raise ParseError("expected: state <id> [initial] [accepting]", lineno)
            sid, flags = args[0], args[1:]
            if sid in states:
                raise ParseError(f"duplicate state {sid!r}", lineno)
            states.append(sid)
            for f in flags:
                if f == "initial":
                    if initial is not None:
                        raise ParseError("more than one initial state", lineno)
                    initial = sid
                elif f == "accepting":
                    accepting.append(sid)
                else:
                    raise ParseError(f"unknown state flag {f!r}", lineno)
        elif kw == "trans":
            if len(args) != 3:
                raise ParseError("expected: trans <src> <label|*|tau> <dst>", lineno)
            trans_lines.append((lineno, *args))
        else:
            raise ParseError(f"unknown declaration {kw!r}", lineno)
    if initial is None:
        raise ParseError("no initial state")
    alpha = set(alphabet or ())
    seen: set[tuple[str, str]] = set()
    for lineno, src, label, dst in trans_lines:
        for s in (src, dst):
            if s not in states:
                raise ParseError(f"unknown state {s!r}", lineno)
        if label == TAU and not silenced:
            raise ParseError("tau transitions need the 'silenced' header", lineno)
        if label not in alpha and label not in (WILDCARD, TAU):
            raise ParseError(f"label {label!r} not in alphabet", lineno)
        if (src, label) in seen:
            raise ParseError(f"nondeterministic transitions from {src} on {label!r}", lineno)
        seen.add((src, label))
        triples.append((src, label, dst))
    if silenced:
        alpha.add(TAU)
    try:
        return make_dfa(alpha, states, initial, accepting, triples)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def serialize_dfa(dfa: DFA) -> str:
    from .slpnfile import quote_label

    lines = []
    if dfa.silenced:
        lines.append("silenced")
    visible = sorted(dfa.alphabet - {TAU})
    lines.append("alphabet " + " ".join(quote_label(a) for a in visible) if visible else "alphabet")
    for s in dfa.states:
        flags = (" initial" if s == dfa.initial else "") + (" accepting" if s in dfa.accepting else "")
        lines.append(f"state {quote_label(s)}{flags}")
    implied = _wild_expanded(dfa)
    for (s, a), t in sorted(dfa.delta.items()):
        if (s, a) in implied:
            continue
        lines.append(f"trans {quote_label(s)} {quote_label(a)} {quote_label(t)}")
    for s, t in dfa.other.items():
        lines.append(f"trans {quote_label(s)} {WILDCARD} {quote_label(t)}")
    return "\n".join(lines) + "\n"


def load_dfa(path) -> DFA:
    with open(path, encoding="utf-8") as fh:
        return parse_dfa(fh.read())
