import pytest
from hypothesis import given
from hypothesis import strategies as st

from slpn.errors import NotEnabledError
from slpn.net import (
    LGSPN, LSP, Marking, Transition, enabled, enabled_distribution, fire,
    firing_probability, is_deadlock, validate,
)
from slpn.reachability import build_reachability_graph


def small_net(*transitions, arcs, places=("p", "q", "r")):
    return LGSPN(tuple(places), tuple(transitions), tuple(arcs))


class TestMarking:
    def test_canonical(self):
        assert Marking({"p": 1, "q": 0}) == Marking({"p": 1})
        assert hash(Marking(["p", "p"])) == hash(Marking({"p": 2}))
        assert len(Marking({"q": 0})) == 0

    def test_arithmetic(self):
        m = Marking({"p": 2, "q": 1})
        assert m - Marking({"p": 1}) == Marking({"p": 1, "q": 1})
        assert m + Marking({"r": 1}) == Marking({"p": 2, "q": 1, "r": 1})
        assert Marking({"p": 1}) <= m and Marking({"p": 1}) < m
        assert not m < m
        with pytest.raises(ValueError):
            Marking({"p": 1}) - m

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            Marking({"p": -1})

    def test_text_forms(self):
        m = Marking({"q": 1, "p": 2})
        assert str(m) == "[p^2, q]"
        assert m.spec() == "p:2,q:1"
        assert m.tokens == 3

    @given(st.dictionaries(st.sampled_from("abcd"), st.integers(0, 4)),
           st.dictionaries(st.sampled_from("abcd"), st.integers(0, 4)))
    def test_add_sub_inverse(self, a, b):
        ma, mb = Marking(a), Marking(b)
        assert (ma + mb) - mb == ma
        assert (ma + mb).tokens == ma.tokens + mb.tokens


class TestStructure:
    def test_bad_weights(self):
        for w in (0, -1, float("inf")):
            with pytest.raises(ValueError):
                Transition("t", "timed", w, "a")

    def test_disjoint_ids(self):
        with pytest.raises(ValueError):
            small_net(Transition("p", "timed", 1, "a"), arcs=())

    def test_arc_endpoints(self):
        t = Transition("t", "timed", 1, "a")
        with pytest.raises(ValueError):
            small_net(t, arcs=[("p", "q")])
        with pytest.raises(ValueError):
            small_net(t, arcs=[("p", "x")])
        with pytest.raises(ValueError):
            small_net(t, arcs=[("p", "t"), ("p", "t")])

    def test_lsp_unknown_place(self):
        net = small_net(arcs=())
        with pytest.raises(ValueError):
            LSP(net, Marking({"zz": 1}))


def test_order_net_enabled_at_q2(order):
    assert sorted(enabled(order, Marking({"q2": 1}))) == ["s1", "s2"]


def test_empty_marking_deadlock(order):
    assert enabled(order, Marking()) == []
    assert is_deadlock(order, Marking())


def test_priority_immediate_over_timed():
    net = small_net(
        Transition("slow", "timed", 5, "a"),
        Transition("fast", "immediate", 1, "tau"),
        arcs=[("p", "slow"), ("slow", "q"), ("p", "fast"), ("fast", "r")],
    )
    assert enabled(net, Marking({"p": 1})) == ["fast"]
    assert firing_probability(net, Marking({"p": 1}), "slow") == 0.0
    with pytest.raises(NotEnabledError):
        fire(net, Marking({"p": 1}), "slow")


def test_fire_examples(order):
    assert fire(order, Marking({"qs": 1}), "o") == Marking({"q1": 1})
    assert fire(order, Marking({"q8": 1}), "s5") == Marking({"q9": 1, "q10": 1})


def test_self_loop_fire_unchanged():
    net = small_net(Transition("t", "timed", 1, "a"), arcs=[("p", "t"), ("t", "p")])
    assert fire(net, Marking({"p": 1}), "t") == Marking({"p": 1})


def test_firing_probabilities(fig1a):
    after_a = Marking({"p1": 1})
    assert firing_probability(fig1a, after_a, "b") == 0.5
    assert firing_probability(fig1a, after_a, "t1") == 0.5
    assert firing_probability(fig1a, Marking({"source": 1}), "a") == 1.0


def test_rate_race():
    net = small_net(
        Transition("x", "timed", 2, "a"), Transition("y", "timed", 1, "b"),
        arcs=[("p", "x"), ("x", "q"), ("p", "y"), ("y", "r")],
    )
    dist = dict(enabled_distribution(net, Marking({"p": 1})))
    assert dist["x"] == pytest.approx(2 / 3, abs=1e-15)
    assert dist["y"] == pytest.approx(1 / 3, abs=1e-15)


def test_bundled_nets_validate_clean(fig1a, fig1b, order, live):
    for lsp in (fig1a, fig1b, order, live):
        assert validate(lsp, build_reachability_graph(lsp)) == []


def test_validate_isolated_place():
    net = small_net(Transition("t", "timed", 1, "a"), arcs=[("p", "t"), ("t", "q")])
    diags = validate(LSP(net, Marking({"p": 1})))
    assert [d.level for d in diags] == ["warning"]
    assert "r" in diags[0].message


def test_validate_final_not_deadlock():
    net = small_net(Transition("t", "timed", 1, "a"), arcs=[("p", "t"), ("t", "q")],
                    places=("p", "q"))
    lsp = LSP(net, Marking({"p": 1}), frozenset({Marking({"p": 1})}))
    assert any(d.level == "error" for d in validate(lsp))


def test_validate_reachability_warnings():
    net = small_net(
        Transition("t", "timed", 1, "a"), Transition("u", "timed", 1, "b"),
        arcs=[("p", "t"), ("t", "q"), ("r", "u"), ("u", "q")],
    )
    lsp = LSP(net, Marking({"p": 1}))
    msgs = [d.message for d in validate(lsp, build_reachability_graph(lsp))]
    assert "place r is never marked" in msgs
    assert "transition u never fires" in msgs
