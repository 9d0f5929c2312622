"""Probabilistic Declare constraints: template automata, parsing, compliance."""

from __future__ import annotations

import os
import re
import shlex
import warnings
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from .analysis import AnalysisConfig, language_mass, spec_probability
from .automata import DFA, WILDCARD, load_dfa, make_dfa
from .errors import LivelockWarning, ParseError
from .net import LSP
from .reachability import build_reachability_graph
from .slpnfile import parse_number

EQ_TOLERANCE = 1e-9
W = WILDCARD


def _existence(a):
    return ["s0", "s1"], ["s1"], [("s0", a, "s1"), ("s0", W, "s0"), ("s1", W, "s1")]


def _absence(a):
    return ["s0", "x"], ["s0"], [("s0", a, "x"), ("s0", W, "s0"), ("x", W, "x")]


def _response(a, b):
    return ["s0", "s1"], ["s0"], [
        ("s0", a, "s1"), ("s0", W, "s0"),
        ("s1", b, "s0"), ("s1", W, "s1"),
    ]


def _precedence(a, b):
    return ["s0", "s1", "s2"], ["s0", "s1"], [
        ("s0", a, "s1"), ("s0", b, "s2"), ("s0", W, "s0"),
        ("s1", W, "s1"), ("s2", W, "s2"),
    ]


def _not_coexistence(a, b):
    return ["n", "a", "b", "x"], ["n", "a", "b"], [
        ("n", a, "a"), ("n", b, "b"), ("n", W, "n"),
        ("a", b, "x"), ("a", W, "a"),
        ("b", a, "x"), ("b", W, "b"),
        ("x", W, "x"),
    ]


def _coexistence(a, b):
    return ["n", "a", "b", "ab"], ["n", "ab"], [
        ("n", a, "a"), ("n", b, "b"), ("n", W, "n"),
        ("a", b, "ab"), ("a", W, "a"),
        ("b", a, "ab"), ("b", W, "b"),
        ("ab", W, "ab"),
    ]


def _eventually_then(a, b):
    return ["s0", "s1", "s2"], ["s2"], [
        ("s0", a, "s1"), ("s0", W, "s0"),
        ("s1", b, "s2"), ("s1", W, "s1"),
        ("s2", W, "s2"),
    ]


TEMPLATES = {
    "existence": (1, _existence),
    "absence": (1, _absence),
    "response": (2, _response),
    "precedence": (2, _precedence),
    "not-coexistence": (2, _not_coexistence),
    "coexistence": (2, _coexistence),
    "eventually-then": (2, _eventually_then),
}


def template_to_dfa(name: str, args: Iterable[str], alphabet: Iterable[str]) -> DFA:
    """Hand-built automaton for a Declare template over ``alphabet``.

    Labels outside the alphabet follow the wildcard transitions, so they are
    treated like any activity the template does not mention.
    """
    args = list(args)
    alphabet = frozenset(alphabet)
    if name not in TEMPLATES:
        raise ValueError(f"unknown template {name!r}")
    arity, build = TEMPLATES[name]
    if len(args) != arity:
        raise ValueError(f"{name} takes {arity} argument(s), got {len(args)}")
    for a in args:
        if a not in alphabet:
            raise ValueError(f"argument {a!r} not in alphabet")
    if arity == 2 and args[0] == args[1]:
        raise ValueError(f"{name} needs two distinct activities")
    states, acc, trans = build(*args)
    return make_dfa(alphabet, states, states[0], acc, trans)


OPERATORS = ("=", "!=", "<=", ">=", "<", ">")


def holds(value: float, op: str, p: float, tol: float = EQ_TOLERANCE) -> bool:
    """Evaluate ``value op p``. Equalities and non-strict bounds get ``tol``
    slack; strict comparisons are exact on the float."""
    if op == "=":
        return abs(value - p) <= tol
    if op == "!=":
        return abs(value - p) > tol
    if op == "<=":
        return value <= p + tol
    if op == ">=":
        return value >= p - tol
    if op == "<":
        return value < p
    if op == ">":
        return value > p
    raise ValueError(f"unknown operator {op!r}")


@dataclass(frozen=True)
class ProbabilisticConstraint:
    name: str
    formula: DFA
    op: str
    probability: Fraction
    source: str = ""

    def __post_init__(self):
        if self.op not in OPERATORS:
            raise ValueError(f"unknown operator {self.op!r}")
        if not 0 <= self.probability <= 1:
            raise ValueError(f"probability {self.probability} outside [0, 1]")


@dataclass
class ProbDeclareSpec:
    alphabet: frozenset[str]
    constraints: list[ProbabilisticConstraint] = field(default_factory=list)

    def __post_init__(self):
        names = [c.name for c in self.constraints]
        if len(set(names)) != len(names):
            raise ValueError("constraint names must be unique")


_LINE = re.compile(r"constraint\s+(\S+)\s+(.*?\)|dfa\s+.*?)\s*(!=|<=|>=|=|<|>)\s*(\S+)\s*\Z")
_CALL = re.compile(r"([A-Za-z][A-Za-z-]*)\s*\((.*)\)\Z")


def _strip_comment(line: str) -> str:
    quoted = False
    for i, ch in enumerate(line):
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            return line[:i]
    return line


def _split_args(text: str, lineno: int) -> list[str]:
    try:
        lex = shlex.shlex(text, posix=True, punctuation_chars=",")
        lex.whitespace_split = True
        # the lexer groups runs of commas into one token
        toks = [t for tok in lex for t in (tok if set(tok) == {","} else [tok])]
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None
    args, expect_arg = [], True
    for tok in toks:
        if tok == ",":
            if expect_arg:
                raise ParseError("empty template argument", lineno)
            expect_arg = True
        else:
            if not expect_arg:
                raise ParseError(f"missing comma before {tok!r}", lineno)
            args.append(tok)
            expect_arg = False
    if expect_arg and args:
        raise ParseError("trailing comma in template arguments", lineno)
    return args


def parse_probdeclare(text: str, base_dir: str | os.PathLike | None = None) -> ProbDeclareSpec:
    """Parse ``alphabet`` and ``constraint`` lines; automata are built eagerly.

    ``dfa <path>`` constraints resolve relative paths against ``base_dir``.
    """
    alphabet: list[str] | None = None
    pending: list[tuple[int, str, str, str, Fraction]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        kw = line.split(None, 1)[0]
        if kw == "alphabet":
            if alphabet is not None:
                raise ParseError("alphabet declared twice", lineno)
            try:
                alphabet = shlex.split(line)[1:]
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        elif kw == "constraint":
            m = _LINE.match(line)
            if not m:
                raise ParseError("expected: constraint <name> <formula> <op> <p>", lineno)
            name, body, op, ptext = m.groups()
            try:
                p = parse_number(ptext)
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if not 0 <= p <= 1:
                raise ParseError(f"probability {ptext} outside [0, 1]", lineno)
            if any(c[1] == name for c in pending):
                raise ParseError(f"duplicate constraint name {name!r}", lineno)
            pending.append((lineno, name, body, op, p))
        else:
            raise ParseError(f"unknown declaration {kw!r}", lineno)
    if alphabet is None:
        raise ParseError("no alphabet declared")
    alpha = frozenset(alphabet)
    constraints = []
    for lineno, name, body, op, p in pending:
        if body.startswith("dfa "):
            try:
                (path,) = shlex.split(body[4:])
            except ValueError:
                raise ParseError("expected: dfa <path>", lineno) from None
            if base_dir is not None and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            dfa = load_dfa(path)
        else:
            call = _CALL.match(body)
            if not call:
                raise ParseError(f"bad formula {body!r}", lineno)
            tname, argtext = call.groups()
            args = _split_args(argtext, lineno)
            try:
                dfa = template_to_dfa(tname, args, alpha)
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        constraints.append(ProbabilisticConstraint(name, dfa, op, p, body))
    return ProbDeclareSpec(alpha, constraints)


def load_probdeclare(path) -> ProbDeclareSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_probdeclare(fh.read(), os.path.dirname(os.path.abspath(path)))


@dataclass(frozen=True)
class ConstraintResult:
    name: str
    formula: str
    op: str
    threshold: Fraction
    probability: float
    holds: bool


@dataclass
class ComplianceReport:
    results: list[ConstraintResult]
    language_mass: float
    notes: list[str] = field(default_factory=list)

    @property
    def compliant(self) -> bool:
        return all(r.holds for r in self.results)

    def as_dict(self) -> dict:
        return {
            "compliant": self.compliant,
            "language_mass": self.language_mass,
            "constraints": [
                {
                    "name": r.name,
                    "formula": r.formula,
                    "operator": r.op,
                    "threshold": str(r.threshold),
                    "probability": r.probability,
                    "holds": r.holds,
                }
                for r in self.results
            ],
        }


def check_compliance(
    lsp: LSP,
    spec: ProbDeclareSpec,
    config: AnalysisConfig | None = None,
    sts=None,
) -> ComplianceReport:
    """Evaluate every constraint's probability and its threshold condition."""
    config = config or AnalysisConfig()
    sts = sts if sts is not None else build_reachability_graph(lsp, config.max_states)
    mass = language_mass(lsp, config, sts)
    notes = []
    if 1.0 - mass > EQ_TOLERANCE:
        msg = (
            f"livelock mass {1.0 - mass:.3g}: the process does not induce a "
            "stochastic language, probabilities are sub-stochastic"
        )
        notes.append(msg)
        warnings.warn(msg, LivelockWarning, stacklevel=2)
    results = []
    for c in spec.constraints:
        v = spec_probability(lsp, c.formula, config, sts).value
        results.append(
            ConstraintResult(c.name, c.source, c.op, c.probability, v,
                             holds(v, c.op, float(c.probability)))
        )
    return ComplianceReport(results, mass, notes)
