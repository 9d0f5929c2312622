from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exact_outcome
from slpn.errors import NumericalWarning
from slpn.generators import random_bounded_lsp
from slpn.markov import (
    LinearSystem, absorption_by_iteration, assemble_system, embed_chain, livelock_mass,
    outcome_probability, solve_linear, solve_state_values, state_values,
)
from slpn.net import Marking
from slpn.reachability import Edge, StochasticTransitionSystem, build_reachability_graph, reaches
from slpn.slpnfile import parse_slpn

TOL = 1e-9


def chain_sts(n_states, edges, finals):
    return StochasticTransitionSystem(
        tuple(range(n_states)), tuple(Edge(u, f"t{i}", "a", v, p) for i, (u, v, p) in enumerate(edges)),
        frozenset(finals),
    )


def test_embed_order(order):
    sts = build_reachability_graph(order)
    chain = embed_chain(sts)
    assert len(chain.absorbing) == 3 and chain.sink is None
    P = chain.matrix()
    assert np.allclose(P.sum(axis=1), 1)
    for a in chain.absorbing:
        assert P[a, a] == 1


def test_embed_no_finals():
    chain = embed_chain(chain_sts(1, [(0, 0, 1.0)], []))
    assert chain.absorbing == frozenset()


def test_embed_two_states():
    chain = embed_chain(chain_sts(2, [(0, 1, 1.0)], [1]))
    assert chain.n_states == 2 and chain.absorbing == {1}


def test_embed_sub_stochastic_gets_sink():
    chain = embed_chain(chain_sts(2, [(0, 1, 0.5)], [1]))
    assert chain.sink == 2
    assert np.allclose(chain.matrix().sum(axis=1), 1)


def test_order_outcomes_exact(order):
    sts = build_reachability_graph(order)
    got = {p: outcome_probability(order, [Marking({p: 1})], sts=sts) for p in "hcr"}
    ref = {p: exact_outcome(order, [Marking({p: 1})]) for p in "hcr"}
    # the equation system gives 1/11, 7/11, 3/11
    assert ref == {"h": Fraction(1, 11), "c": Fraction(7, 11), "r": Fraction(3, 11)}
    for p in "hcr":
        assert abs(got[p] - float(ref[p])) <= TOL
    assert livelock_mass(order, sts=sts) <= TOL


def test_livelock_values(live):
    sts = build_reachability_graph(live)
    assert state_values(sts)[0] == pytest.approx(2 / 3, abs=TOL)
    assert livelock_mass(live) == pytest.approx(1 / 3, abs=TOL)


def test_self_loop_only_net():
    lsp = parse_slpn("place p\ntransition t timed 1 a\narc p t\narc t p\ninitial p\n")
    assert livelock_mass(lsp) == 1.0


def test_linear_net_outcome():
    lsp = parse_slpn("place p\nplace q\ntransition t timed 1 a\narc p t\narc t q\ninitial p\n")
    assert outcome_probability(lsp, [Marking({"q": 1})]) == 1.0


def test_outcome_rejects_non_final(order):
    with pytest.raises(ValueError):
        outcome_probability(order, [Marking({"q1": 1})])
    with pytest.raises(ValueError):
        outcome_probability(order, [])


def test_trivial_system():
    system = LinearSystem(sp.identity(3, format="csr"), np.array([1.0, 0.0, 1.0]),
                          frozenset({0, 2}), frozenset({1}))
    sol = solve_linear(system)
    assert list(sol.values) == [1.0, 0.0, 1.0]
    assert sol.residual == 0.0


def test_system_text(live):
    sts = build_reachability_graph(live)
    text = assemble_system(sts, sts.finals).to_text(3)
    assert "x_0 = 0.333*x_1 + 0.333*x_2 + 0.333*x_3" in text
    assert text.count("= 0\n") == 2


def random_chain(rng, n):
    """Absorbing chain with a few absorbing states and random sparse rows."""
    edges = []
    finals = set(rng.choice(n, size=max(1, n // 10), replace=False).tolist())
    for s in range(n):
        if s in finals:
            continue
        k = int(rng.integers(1, 4))
        targets = rng.choice(n, size=k, replace=False)
        w = rng.random(k) + 0.1
        w /= w.sum()
        edges += [(s, int(t), float(p)) for t, p in zip(targets, w)]
    return chain_sts(n, edges, finals)


@pytest.mark.parametrize("seed", range(5))
def test_fifty_state_chain_against_iteration(seed):
    sts = random_chain(np.random.default_rng(seed), 50)
    x = state_values(sts)
    y = absorption_by_iteration(embed_chain(sts), sts.finals)[: len(sts)]
    assert np.max(np.abs(x - y)) <= 1e-8


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(5, 200))
def test_iteration_oracle_and_solvers_agree(seed, n):
    rng = np.random.default_rng(seed)
    sts = random_chain(rng, n)
    dense = solve_state_values(sts, method="dense")
    sparse = solve_state_values(sts, method="sparse")
    gs = solve_state_values(sts, method="gauss-seidel")
    it = absorption_by_iteration(embed_chain(sts), sts.finals)[: len(sts)]
    assert np.max(np.abs(dense.values - sparse.values)) <= 1e-10
    assert np.max(np.abs(dense.values - gs.values)) <= 1e-9
    assert np.max(np.abs(dense.values - it)) <= 1e-7
    assert dense.residual <= 1e-9
    # zeroing soundness
    good = reaches(sts, sts.finals)
    assert all(s in good for s in np.nonzero(dense.values > 1e-12)[0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_complementarity(seed):
    rng = np.random.default_rng(seed)
    lsp, sts = random_bounded_lsp(rng)
    finals = sorted(sts.finals)
    split = int(rng.integers(0, len(finals) + 1))
    f1, f2 = finals[:split], finals[split:]
    v1 = state_values(sts, f1)[0] if f1 else 0.0
    v2 = state_values(sts, f2)[0] if f2 else 0.0
    assert abs(v1 + v2 + livelock_mass(lsp, sts=sts) - 1) <= TOL


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_exact_rationals(seed):
    lsp, sts = random_bounded_lsp(np.random.default_rng(seed))
    assert abs(state_values(sts)[0] - float(exact_outcome(lsp))) <= TOL


def test_permuted_rows_same_solution(order):
    sts = build_reachability_graph(order)
    a = state_values(sts)
    perm = StochasticTransitionSystem(sts.states, tuple(reversed(sts.edges)), sts.finals)
    assert np.max(np.abs(a - state_values(perm))) <= 1e-10


def test_out_of_range_warns():
    # a hand-made non-stochastic row pushes the value above 1
    sts = chain_sts(2, [(0, 1, 2.0)], [1])
    with pytest.warns(NumericalWarning):
        x = state_values(sts)
    assert x[0] == 1.0
