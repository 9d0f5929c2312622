"""Specification and trace probabilities of labelled stochastic processes."""

from __future__ import annotations

import time
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field

from .automata import DFA, product, silence, trace_dfa
from .errors import AlphabetWarning
from .markov import DEFAULT_TOLERANCE, solve_state_values
from .net import LSP, TAU
from .reachability import (
    DEFAULT_MAX_STATES,
    StochasticTransitionSystem,
    build_reachability_graph,
)


@dataclass(frozen=True)
class AnalysisConfig:
    max_states: int = DEFAULT_MAX_STATES
    tolerance: float = DEFAULT_TOLERANCE
    oracle: bool = False
    epsilon: float = 1e-9
    max_steps: int = 10_000_000


@dataclass
class AnalysisResult:
    value: float
    graph_states: int
    product_states: int
    residual: float
    seconds: float
    bracket: tuple[float, float] | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        d = {
            "value": self.value,
            "graph_states": self.graph_states,
            "product_states": self.product_states,
            "residual": self.residual,
            "seconds": self.seconds,
        }
        if self.bracket is not None:
            d["bracket"] = {"lower": self.bracket[0], "upper": self.bracket[1]}
        return d


def _graph(lsp: LSP, config: AnalysisConfig, sts) -> StochasticTransitionSystem:
    return sts if sts is not None else build_reachability_graph(lsp, config.max_states)


def check_alphabet(sts: StochasticTransitionSystem, dfa: DFA) -> list[str]:
    """Visible graph labels the automaton does not declare, unless every
    state has a wildcard that reads them anyway."""
    if all(s in dfa.other for s in dfa.states):
        return []
    return sorted(sts.labels - dfa.alphabet - {TAU})


def spec_probability(
    lsp: LSP,
    dfa: DFA,
    config: AnalysisConfig | None = None,
    sts: StochasticTransitionSystem | None = None,
    warn_alphabet: bool = False,
) -> AnalysisResult:
    """Probability that the process terminates with a trace accepted by ``dfa``.

    ``sts`` lets callers reuse one reachability graph across many queries.
    """
    config = config or AnalysisConfig()
    start = time.perf_counter()
    sts = _graph(lsp, config, sts)
    notes = []
    missing = check_alphabet(sts, dfa)
    if missing:
        msg = f"labels {missing} are not in the automaton alphabet"
        notes.append(msg)
        if warn_alphabet:
            warnings.warn(msg, AlphabetWarning, stacklevel=2)
    sdfa = dfa if dfa.silenced else silence(dfa)
    prod = product(sts, sdfa)
    sol = solve_state_values(prod, prod.finals, config.tolerance)
    value = float(sol.values[prod.initial])
    bracket = None
    if config.oracle:
        from .oracle import enumerate_bracket

        b = enumerate_bracket(prod, prod.finals, config.epsilon, config.max_steps)
        bracket = (b.lower, b.upper)
    return AnalysisResult(
        value, len(sts), len(prod), sol.residual, time.perf_counter() - start, bracket, notes
    )


def trace_probability(
    lsp: LSP,
    trace: Sequence[str],
    config: AnalysisConfig | None = None,
    sts: StochasticTransitionSystem | None = None,
) -> AnalysisResult:
    """Probability that the process produces exactly ``trace``."""
    if TAU in trace:
        raise ValueError("a trace cannot contain the silent label")
    result = spec_probability(lsp, trace_dfa(trace), config, sts)
    result.notes.clear()  # labels missing from a trace simply reject
    return result


def language_mass(
    lsp: LSP,
    config: AnalysisConfig | None = None,
    sts: StochasticTransitionSystem | None = None,
) -> float:
    """Total probability of terminating in a final marking."""
    config = config or AnalysisConfig()
    sts = _graph(lsp, config, sts)
    if not sts.finals:
        return 0.0
    sol = solve_state_values(sts, sts.finals, config.tolerance)
    return float(sol.values[sts.initial])
