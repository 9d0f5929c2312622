"""Stochastic reachability graphs and state classification."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Literal

from .errors import (
    InvalidFinalMarking,
    StateSpaceExceeded,
    UnboundednessWarning,
    UnreachableFinalWarning,
)
from .net import LSP, TAU, Marking, enabled_distribution

DEFAULT_MAX_STATES = 1_000_000

StateClass = Literal["deadlock", "livelock", "live"]


@dataclass(frozen=True)
class Edge:
    source: int
    transition: str
    label: str
    target: int
    probability: float


@dataclass(frozen=True)
class StochasticTransitionSystem:
    """Finite labelled transition system with per-edge probabilities.

    ``states`` holds one payload per state index: a :class:`Marking` for a
    reachability graph, a ``(graph state, automaton state)`` pair for a
    product. Edge labels keep both the net transition and its label.
    """

    states: tuple[Hashable, ...]
    edges: tuple[Edge, ...]
    finals: frozenset[int]
    initial: int = 0
    diagnostics: tuple[str, ...] = ()

    @cached_property
    def outgoing(self) -> list[list[Edge]]:
        out: list[list[Edge]] = [[] for _ in self.states]
        for e in self.edges:
            out[e.source].append(e)
        return out

    @cached_property
    def index(self) -> dict[Hashable, int]:
        return {s: i for i, s in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    def out_mass(self, s: int) -> float:
        return sum(e.probability for e in self.outgoing[s])

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(e.label for e in self.edges)

    def to_edge_list(self) -> str:
        lines = [f"# states {len(self.states)} initial {self.initial}"]
        lines.append("# finals " + " ".join(str(s) for s in sorted(self.finals)))
        for e in self.edges:
            lines.append(f"{e.source} {e.target} {e.transition} {e.label!r} {e.probability!r}")
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        lines = ["digraph sts {", "  rankdir=LR;"]
        for i, s in enumerate(self.states):
            shape = "doublecircle" if i in self.finals else "circle"
            text = str(s).replace('"', '\\"')
            lines.append(f'  s{i} [shape={shape}, label="s{i}\\n{text}"];')
        lines.append(f"  init [shape=point]; init -> s{self.initial};")
        for e in self.edges:
            lab = f"({e.transition}, {e.label}) {e.probability:.4g}".replace('"', '\\"')
            style = ", style=dashed" if e.label == TAU else ""
            lines.append(f'  s{e.source} -> s{e.target} [label="{lab}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_reachability_graph(
    lsp: LSP, max_states: int = DEFAULT_MAX_STATES
) -> StochasticTransitionSystem:
    """Breadth-first closure of the token game from the initial marking.

    State 0 is the initial marking. Raises :class:`StateSpaceExceeded` once
    more than ``max_states`` markings have been discovered; warns with
    :class:`UnboundednessWarning` the first time a new marking strictly
    covers a marking on its own generation path.
    """
    net = lsp.net
    states: list[Marking] = [lsp.initial]
    index: dict[Marking, int] = {lsp.initial: 0}
    parent: list[tuple[int, str] | None] = [None]
    edges: list[Edge] = []
    diagnostics: list[str] = []
    warned = False
    queue = deque([0])

    while queue:
        s = queue.popleft()
        m = states[s]
        for tid, prob in enabled_distribution(net, m):
            m2 = (m - net.preset[tid]) + net.postset[tid]
            t = index.get(m2)
            if t is None:
                t = len(states)
                states.append(m2)
                index[m2] = t
                parent.append((s, tid))
                if not warned:
                    anc = _dominated_ancestor(states, parent, s, m2)
                    if anc is not None:
                        warned = True
                        msg = (
                            f"marking {m2} strictly covers ancestor marking {states[anc]}; "
                            "the net may be unbounded"
                        )
                        diagnostics.append(msg)
                        warnings.warn(msg, UnboundednessWarning, stacklevel=2)
                if len(states) > max_states:
                    raise StateSpaceExceeded(len(states), _path(parent, t))
                queue.append(t)
            edges.append(Edge(s, tid, net.transition(tid).label, t, prob))

    deadlocks = {i for i, m in enumerate(states) if not net.token_enabled(m)}
    if lsp.finals is None:
        finals = frozenset(deadlocks)
    else:
        found = set()
        for fm in lsp.finals:
            i = index.get(fm)
            if i is None:
                msg = f"final marking {fm} is not reachable"
                diagnostics.append(msg)
                warnings.warn(msg, UnreachableFinalWarning, stacklevel=2)
            elif i not in deadlocks:
                raise InvalidFinalMarking(f"final marking {fm} is reachable but not a deadlock")
            else:
                found.add(i)
        finals = frozenset(found)
    return StochasticTransitionSystem(
        tuple(states), tuple(edges), finals, 0, tuple(diagnostics)
    )


def _dominated_ancestor(states, parent, s, m2) -> int | None:
    node: int | None = s
    while node is not None:
        if states[node] < m2:
            return node
        link = parent[node]
        node = link[0] if link else None
    return None


def _path(parent, t) -> list[str]:
    path = []
    while parent[t] is not None:
        t, tid = parent[t]
        path.append(tid)
    return path[::-1]


def reaches(sts: StochasticTransitionSystem, targets) -> set[int]:
    """States with a directed path (possibly empty) to some state in ``targets``."""
    preds: list[list[int]] = [[] for _ in sts.states]
    for e in sts.edges:
        preds[e.target].append(e.source)
    seen = set(targets)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for u in preds[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def classify_states(sts: StochasticTransitionSystem) -> dict[int, StateClass]:
    dead = [i for i in range(len(sts)) if not sts.outgoing[i]]
    live = reaches(sts, dead)
    out: dict[int, StateClass] = {}
    for i in range(len(sts)):
        if not sts.outgoing[i]:
            out[i] = "deadlock"
        elif i in live:
            out[i] = "live"
        else:
            out[i] = "livelock"
    return out


@dataclass(frozen=True)
class GraphStats:
    states: int
    edges: int
    finals: int
    deadlocks: int
    livelocks: int
    bounded: bool
    domination_detected: bool

    def verdict(self) -> str:
        if not self.bounded:
            return "unbounded"
        if self.domination_detected:
            return "bounded (fully explored; coverability heuristic fired)"
        return "bounded"


def graph_stats(sts: StochasticTransitionSystem) -> GraphStats:
    classes = classify_states(sts)
    counts = {c: 0 for c in ("deadlock", "livelock", "live")}
    for c in classes.values():
        counts[c] += 1
    return GraphStats(
        states=len(sts),
        edges=len(sts.edges),
        finals=len(sts.finals),
        deadlocks=counts["deadlock"],
        livelocks=counts["livelock"],
        bounded=True,
        domination_detected=any("strictly covers" in d for d in sts.diagnostics),
    )
