"""Reading and writing the line-oriented ``.slpn`` net format.

::

    place <id>
    transition <id> immediate|timed <weight> <label>
    arc <id> <id>
    initial <place> [<mult>]
    final <place>:<mult>[,<place>:<mult>...]   |   final complete

Labels are bare tokens or double-quoted strings; ``tau`` is the silent
label. Weights are positive decimals or ``p/q`` fractions. ``#`` starts a
comment. Without any ``final`` line the process is complete.
"""

from __future__ import annotations

import re
import shlex
from fractions import Fraction

from .errors import ParseError
from .net import IMMEDIATE, LGSPN, LSP, TAU, TIMED, Marking, Transition

IDENT = re.compile(r"[A-Za-z0-9_]+\Z")
_BARE_LABEL = re.compile(r"[^\s\"'#\\]+\Z")


def parse_number(text: str) -> Fraction:
    """Parse a decimal or ``p/q`` literal exactly."""
    if "/" in text:
        num, _, den = text.partition("/")
        if not (num.isdigit() and den.isdigit()):
            raise ValueError(f"bad fraction {text!r}")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad number {text!r}") from None


def parse_marking_spec(text: str, places=None, line: int | None = None) -> Marking:
    """Parse ``place:mult[,place:mult...]`` (multiplicity defaults to 1)."""
    counts: dict[str, int] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, mult = part.partition(":")
        name = name.strip()
        if not IDENT.match(name):
            raise ParseError(f"bad place identifier {name!r}", line)
        if places is not None and name not in places:
            raise ParseError(f"unknown place {name!r} in marking", line)
        try:
            n = int(mult) if sep else 1
        except ValueError:
            raise ParseError(f"bad multiplicity {mult!r}", line) from None
        if n < 0:
            raise ParseError(f"negative multiplicity for {name}", line)
        if name in counts:
            raise ParseError(f"place {name} listed twice in marking", line)
        counts[name] = n
    return Marking(counts)


def _tokens(raw: str, lineno: int) -> list[str]:
    try:
        return shlex.split(raw, comments=True, posix=True)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None


def parse_slpn(text: str) -> LSP:
    places: list[str] = []
    transitions: list[Transition] = []
    arcs: list[tuple[str, str]] = []
    initial: dict[str, int] = {}
    finals: list[Marking] = []
    complete_declared = False
    ids: set[str] = set()
    arc_lines: list[tuple[int, str, str]] = []
    initial_lines: list[tuple[int, str, int]] = []
    final_lines: list[tuple[int, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw, lineno)
        if not toks:
            continue
        kw, args = toks[0], toks[1:]
        if kw == "place":
            if len(args) != 1:
                raise ParseError("expected: place <id>", lineno)
            _declare(args[0], ids, lineno)
            places.append(args[0])
        elif kw == "transition":
            if len(args) != 4:
                raise ParseError(
                    "expected: transition <id> immediate|timed <weight> <label>", lineno
                )
            tid, kind, wtext, label = args
            _declare(tid, ids, lineno)
            if kind not in (IMMEDIATE, TIMED):
                raise ParseError(f"unknown transition kind {kind!r}", lineno)
            try:
                weight = parse_number(wtext)
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if weight <= 0:
                raise ParseError(f"nonpositive weight {wtext}", lineno)
            if label == TAU and _quoted_tau(raw):
                raise ParseError("'tau' is reserved for the silent label", lineno)
            if not label:
                raise ParseError("empty label", lineno)
            transitions.append(Transition(tid, kind, float(weight), label))
        elif kw == "arc":
            if len(args) == 3:
                if args[2] != "1":
                    raise ParseError("arc multiplicities other than 1 are unsupported", lineno)
            elif len(args) != 2:
                raise ParseError("expected: arc <id> <id>", lineno)
            arc_lines.append((lineno, args[0], args[1]))
        elif kw == "initial":
            if len(args) not in (1, 2):
                raise ParseError("expected: initial <place> [<mult>]", lineno)
            try:
                mult = int(args[1]) if len(args) == 2 else 1
            except ValueError:
                raise ParseError(f"bad multiplicity {args[1]!r}", lineno) from None
            if mult < 0:
                raise ParseError("negative multiplicity", lineno)
            initial_lines.append((lineno, args[0], mult))
        elif kw == "final":
            if not args:
                raise ParseError("expected: final <marking> | final complete", lineno)
            final_lines.append((lineno, " ".join(args)))
        else:
            raise ParseError(f"unknown declaration {kw!r}", lineno)

    if not places:
        raise ParseError("no places declared")
    place_set = set(places)
    tids = {t.id for t in transitions}
    seen_arcs = set()
    for lineno, src, dst in arc_lines:
        for node in (src, dst):
            if node not in place_set and node not in tids:
                raise ParseError(f"unknown identifier {node!r} in arc", lineno)
        if (src in place_set) == (dst in place_set):
            raise ParseError(f"arc {src} -> {dst} must connect a place and a transition", lineno)
        if (src, dst) in seen_arcs:
            raise ParseError(f"duplicate arc {src} -> {dst}", lineno)
        seen_arcs.add((src, dst))
        arcs.append((src, dst))
    for lineno, place, mult in initial_lines:
        if place not in place_set:
            raise ParseError(f"unknown place {place!r} in initial marking", lineno)
        if place in initial:
            raise ParseError(f"place {place} appears twice in the initial marking", lineno)
        initial[place] = mult
    for lineno, spec in final_lines:
        if spec == "complete":
            complete_declared = True
            continue
        m = parse_marking_spec(spec, place_set, lineno)
        if m in finals:
            raise ParseError(f"duplicate final marking {m}", lineno)
        finals.append(m)
    if complete_declared and finals:
        raise ParseError("'final complete' cannot be combined with explicit final markings")

    net = LGSPN(tuple(places), tuple(transitions), tuple(arcs))
    return LSP(net, Marking(initial), frozenset(finals) if finals else None)


def _declare(ident: str, ids: set[str], lineno: int) -> None:
    if not IDENT.match(ident):
        raise ParseError(f"bad identifier {ident!r}", lineno)
    if ident in ids:
        raise ParseError(f"duplicate identifier {ident!r}", lineno)
    ids.add(ident)


def _quoted_tau(raw: str) -> bool:
    return bool(re.search(r"[\"']tau[\"']", raw))


def quote_label(label: str) -> str:
    if _BARE_LABEL.match(label):
        return label
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_weight(w: float) -> str:
    return repr(float(w))


def serialize_slpn(lsp: LSP) -> str:
    net = lsp.net
    lines = [f"place {p}" for p in net.places]
    for t in net.transitions:
        lines.append(f"transition {t.id} {t.kind} {format_weight(t.weight)} {quote_label(t.label)}")
    lines.extend(f"arc {src} {dst}" for src, dst in net.arcs)
    lines.extend(f"initial {p} {n}" for p, n in lsp.initial.items())
    if lsp.finals is not None:
        lines.extend(f"final {m.spec()}" for m in sorted(lsp.finals, key=lambda m: m.spec()))
    return "\n".join(lines) + "\n"


def load_slpn(path) -> LSP:
    with open(path, encoding="utf-8") as fh:
        return parse_slpn(fh.read())
