"""Exact trace, specification and outcome probabilities for labelled
stochastic Petri nets with silent transitions."""

__version__ = "0.1.0"

from .analysis import AnalysisConfig, AnalysisResult, language_mass, spec_probability, trace_probability
from .automata import DFA, accepts, make_dfa, parse_dfa, product, serialize_dfa, silence, trace_dfa
from .conformance import StochasticLog, parse_log_csv, parse_xes, uemsc
from .markov import livelock_mass, outcome_probability, state_values
from .net import LGSPN, LSP, TAU, Marking, Transition, enabled, fire
from .probdeclare import check_compliance, parse_probdeclare, template_to_dfa
from .reachability import build_reachability_graph, classify_states, graph_stats
from .slpnfile import load_slpn, parse_slpn, serialize_slpn

__all__ = [
    "AnalysisConfig", "AnalysisResult", "DFA", "LGSPN", "LSP", "Marking", "StochasticLog",
    "TAU", "Transition", "accepts", "build_reachability_graph", "check_compliance",
    "classify_states", "enabled", "fire", "graph_stats", "language_mass", "livelock_mass",
    "load_slpn", "make_dfa", "outcome_probability", "parse_dfa", "parse_log_csv",
    "parse_probdeclare", "parse_slpn", "parse_xes", "product", "serialize_dfa",
    "serialize_slpn", "silence", "spec_probability", "state_values", "template_to_dfa",
    "trace_dfa", "trace_probability", "uemsc",
]
