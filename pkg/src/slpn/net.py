"""Labelled generalised stochastic Petri nets and their token game.

A net is immutable once built. Markings are canonical multisets (no zero
entries), so structural equality is marking equality and markings can be
used directly as dictionary keys during state-space exploration.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, Union

from .errors import NotEnabledError

TAU = "tau"
"""The silent label. Never a valid activity name."""

IMMEDIATE = "immediate"
TIMED = "timed"
Kind = Literal["immediate", "timed"]


def is_silent(label: str) -> bool:
    return label == TAU


class Marking(Mapping[str, int]):
    """Multiset of places, stored in canonical sorted form."""

    __slots__ = ("_items", "_counts", "_hash")

    def __init__(self, counts: Mapping[str, int] | Iterable[str] = ()):
        if isinstance(counts, Mapping):
            pairs = counts.items()
        else:
            acc: dict[str, int] = {}
            for place in counts:
                acc[place] = acc.get(place, 0) + 1
            pairs = acc.items()
        cleaned = {}
        for place, n in pairs:
            if n < 0:
                raise ValueError(f"negative multiplicity for place {place!r}")
            if n:
                cleaned[place] = int(n)
        self._items = tuple(sorted(cleaned.items()))
        self._counts = dict(self._items)
        self._hash = hash(self._items)

    def __getitem__(self, place: str) -> int:
        return self._counts.get(place, 0)

    def __contains__(self, place: object) -> bool:
        return place in self._counts

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Marking):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self == Marking(other)
        return NotImplemented

    def __le__(self, other: Marking) -> bool:
        return all(other[p] >= n for p, n in self._items)

    def __lt__(self, other: Marking) -> bool:
        return self <= other and self != other

    def __add__(self, other: Marking) -> Marking:
        acc = dict(self._counts)
        for p, n in other._items:
            acc[p] = acc.get(p, 0) + n
        return Marking(acc)

    def __sub__(self, other: Marking) -> Marking:
        if not other <= self:
            raise ValueError("multiset difference undefined: subtrahend not included")
        acc = dict(self._counts)
        for p, n in other._items:
            acc[p] -= n
        return Marking(acc)

    @property
    def tokens(self) -> int:
        return sum(n for _, n in self._items)

    def items(self):  # type: ignore[override]
        return self._items

    def __repr__(self) -> str:
        return f"Marking({dict(self._items)!r})"

    def __str__(self) -> str:
        parts = [p if n == 1 else f"{p}^{n}" for p, n in self._items]
        return "[" + ", ".join(parts) + "]"

    def spec(self) -> str:
        """``place:mult,...`` form used by the file formats and the CLI."""
        return ",".join(f"{p}:{n}" for p, n in self._items)


@dataclass(frozen=True)
class Transition:
    id: str
    kind: Kind
    weight: float
    label: str

    def __post_init__(self):
        if self.kind not in (IMMEDIATE, TIMED):
            raise ValueError(f"transition {self.id}: unknown kind {self.kind!r}")
        w = self.weight
        if not (w > 0 and w != float("inf")):
            raise ValueError(f"transition {self.id}: nonpositive weight {w!r}")
        if not self.label:
            raise ValueError(f"transition {self.id}: empty label")

    @property
    def silent(self) -> bool:
        return self.label == TAU

    @property
    def immediate(self) -> bool:
        return self.kind == IMMEDIATE


@dataclass(frozen=True)
class LGSPN:
    """Net structure: places, weighted transitions, unweighted flow arcs."""

    places: tuple[str, ...]
    transitions: tuple[Transition, ...]
    arcs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        places = set(self.places)
        if len(places) != len(self.places):
            raise ValueError("duplicate place identifier")
        tids = [t.id for t in self.transitions]
        if len(set(tids)) != len(tids):
            raise ValueError("duplicate transition identifier")
        if places & set(tids):
            raise ValueError("place and transition identifiers overlap")
        seen = set()
        for src, dst in self.arcs:
            if (src, dst) in seen:
                raise ValueError(f"duplicate arc {src} -> {dst}")
            seen.add((src, dst))
            ok = (src in places and dst in self._by_id) or (
                src in self._by_id and dst in places
            )
            if not ok:
                raise ValueError(f"arc {src} -> {dst} must connect a place and a transition")

    @cached_property
    def _by_id(self) -> dict[str, Transition]:
        return {t.id: t for t in self.transitions}

    def transition(self, tid: str) -> Transition:
        try:
            return self._by_id[tid]
        except KeyError:
            raise KeyError(f"unknown transition {tid!r}") from None

    @cached_property
    def preset(self) -> dict[str, Marking]:
        pre: dict[str, list[str]] = {t.id: [] for t in self.transitions}
        for src, dst in self.arcs:
            if dst in pre:
                pre[dst].append(src)
        return {tid: Marking(ps) for tid, ps in pre.items()}

    @cached_property
    def postset(self) -> dict[str, Marking]:
        post: dict[str, list[str]] = {t.id: [] for t in self.transitions}
        for src, dst in self.arcs:
            if src in post:
                post[src].append(dst)
        return {tid: Marking(ps) for tid, ps in post.items()}

    @cached_property
    def alphabet(self) -> frozenset[str]:
        """Visible labels used by the net."""
        return frozenset(t.label for t in self.transitions if not t.silent)

    def token_enabled(self, m: Marking) -> list[Transition]:
        """Transitions whose preset is covered by ``m``, ignoring priority."""
        pre = self.preset
        return [t for t in self.transitions if pre[t.id] <= m]

    def scaled(self, factor: float) -> LGSPN:
        ts = tuple(
            Transition(t.id, t.kind, t.weight * factor, t.label) for t in self.transitions
        )
        return LGSPN(self.places, ts, self.arcs)


@dataclass(frozen=True)
class LSP:
    """A net with an initial marking and final markings.

    ``finals`` set to ``None`` means the process is complete: the final
    markings are exactly the reachable deadlock markings.
    """

    net: LGSPN
    initial: Marking = field(default_factory=Marking)
    finals: frozenset[Marking] | None = None

    def __post_init__(self):
        places = set(self.net.places)
        markings = [self.initial, *(self.finals or ())]
        for m in markings:
            unknown = set(m) - places
            if unknown:
                raise ValueError(f"marking refers to unknown places {sorted(unknown)}")

    @property
    def complete(self) -> bool:
        return self.finals is None


NetLike = Union[LSP, LGSPN]


def _net(x: NetLike) -> LGSPN:
    return x.net if isinstance(x, LSP) else x


def enabled(lsp: NetLike, m: Marking) -> list[str]:
    """Identifiers of the transitions enabled in ``m`` under immediate priority."""
    cands = _net(lsp).token_enabled(m)
    if any(t.immediate for t in cands):
        cands = [t for t in cands if t.immediate]
    return [t.id for t in cands]


def enabled_distribution(lsp: NetLike, m: Marking) -> list[tuple[str, float]]:
    """``(transition id, firing probability)`` for every enabled transition."""
    net = _net(lsp)
    ids = enabled(net, m)
    if not ids:
        return []
    weights = [net.transition(t).weight for t in ids]
    total = sum(weights)
    return [(t, w / total) for t, w in zip(ids, weights)]


def fire(lsp: NetLike, m: Marking, tid: str) -> Marking:
    net = _net(lsp)
    if tid not in enabled(net, m):
        raise NotEnabledError(f"transition {tid} is not enabled in {m}")
    return (m - net.preset[tid]) + net.postset[tid]


def firing_probability(lsp: NetLike, m: Marking, tid: str) -> float:
    for t, p in enabled_distribution(lsp, m):
        if t == tid:
            return p
    return 0.0


def is_deadlock(lsp: NetLike, m: Marking) -> bool:
    return not _net(lsp).token_enabled(m)


@dataclass(frozen=True)
class Diagnostic:
    level: Literal["warning", "error"]
    message: str

    def __str__(self) -> str:
        return f"{self.level}: {self.message}"


def validate(lsp: LSP, sts=None) -> list[Diagnostic]:
    """Structural diagnostics; reachability-based ones need ``sts``.

    Passing the reachability graph of ``lsp`` adds warnings for places that
    are never marked and transitions that never fire.
    """
    net = lsp.net
    out: list[Diagnostic] = []
    touched = {n for arc in net.arcs for n in arc}
    for p in net.places:
        if p not in touched:
            out.append(Diagnostic("warning", f"place {p} is not connected to any transition"))
    for t in net.transitions:
        if t.id not in touched:
            out.append(Diagnostic("warning", f"transition {t.id} is not connected to any place"))
        elif not net.preset[t.id]:
            out.append(
                Diagnostic("warning", f"transition {t.id} has an empty preset (token generator)")
            )
    for m in sorted(lsp.finals or (), key=str):
        if not is_deadlock(net, m):
            out.append(Diagnostic("error", f"final marking {m} is not a deadlock"))
    if sts is not None:
        marked = {p for s in sts.states for p in s}
        fired = {e.transition for e in sts.edges}
        for p in net.places:
            if p in touched and p not in marked:
                out.append(Diagnostic("warning", f"place {p} is never marked"))
        for t in net.transitions:
            if t.id in touched and t.id not in fired:
                out.append(Diagnostic("warning", f"transition {t.id} never fires"))
    return out
