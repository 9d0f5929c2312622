import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slpn.analysis import language_mass, spec_probability
from slpn.automata import accepts, complement
from slpn.errors import LivelockWarning, ParseError
from slpn.generators import NetShape, model_traces, random_acyclic_lsp
from slpn.probdeclare import (
    TEMPLATES, check_compliance, holds, parse_probdeclare, template_to_dfa,
)

ALPH = {"a", "b", "c"}
TOL = 1e-9


def words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(sorted(alphabet), repeat=n)


PREDICATES = {
    "existence": lambda w, a: a in w,
    "absence": lambda w, a: a not in w,
    "response": lambda w, a, b: all(b in w[i + 1:] for i, x in enumerate(w) if x == a),
    "precedence": lambda w, a, b: all(a in w[:i] for i, x in enumerate(w) if x == b),
    "not-coexistence": lambda w, a, b: not (a in w and b in w),
    "coexistence": lambda w, a, b: (a in w) == (b in w),
    "eventually-then": lambda w, a, b: any(x == a and b in w[i + 1:] for i, x in enumerate(w)),
}


@pytest.mark.parametrize("name", sorted(TEMPLATES))
def test_templates_against_predicates(name):
    arity = TEMPLATES[name][0]
    args = ["a", "b"][:arity]
    dfa = template_to_dfa(name, args, ALPH)
    for w in words(ALPH, 5):
        assert accepts(dfa, w) == PREDICATES[name](w, *args), (name, w)


def test_response_matches_figure_shape():
    alph = {"open", "ship", "close"}
    dfa = template_to_dfa("response", ["open", "ship"], alph)
    assert dfa.states == ("s0", "s1") and dfa.accepting == {"s0"}
    assert dfa.delta[("s0", "open")] == "s1"
    assert dfa.delta[("s1", "ship")] == "s0"
    assert all(dfa.delta[("s0", x)] == "s0" for x in alph - {"open"})
    assert all(dfa.delta[("s1", x)] == "s1" for x in alph - {"ship"})


def test_absence_examples():
    dfa = template_to_dfa("absence", ["a"], {"a", "b"})
    assert accepts(dfa, ["b", "b"]) and not accepts(dfa, ["a"])


@pytest.mark.parametrize(
    "name, args",
    [("nope", ["a"]), ("response", ["a"]), ("existence", ["z"]), ("coexistence", ["a", "a"])],
)
def test_template_errors(name, args):
    with pytest.raises(ValueError):
        template_to_dfa(name, args, ALPH)


def test_parse_order_spec(data_dir):
    spec = parse_probdeclare((data_dir / "order.pdecl").read_text())
    assert [c.name for c in spec.constraints] == ["pr", "op", "or"]
    op = spec.constraints[1]
    assert op.op == ">=" and op.probability == Fraction(1, 20) and float(op.probability) == 0.05
    assert spec.constraints[2].op == "<="
    assert "ack reject" in spec.alphabet


def test_parse_empty_spec(order):
    spec = parse_probdeclare("alphabet a b\n")
    assert spec.constraints == []
    assert check_compliance(order, spec).compliant


def test_parse_dfa_constraint(tmp_path, data_dir):
    (tmp_path / "r.dfa").write_text((data_dir / "response_open_pay.dfa").read_text())
    spec = parse_probdeclare("alphabet open pay\nconstraint x dfa r.dfa > 0\n", base_dir=tmp_path)
    assert spec.constraints[0].op == ">"


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("alphabet a\nconstraint x existence(a) = 1.5\n", "outside"),
        ("alphabet a\nconstraint x existence(a) ~ 1\n", "expected"),
        ("alphabet a\nconstraint x existence(a) = 1\nconstraint x absence(a) = 0\n", "duplicate"),
        ("alphabet a\nconstraint x existence(q) = 1\n", "not in alphabet"),
        ("constraint x existence(a) = 1\n", "no alphabet"),
        ("alphabet a\nconstraint x existence(a,,) = 1\n", "^line 2: empty template argument"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_probdeclare(text)


def test_operators():
    assert holds(0.5, "=", 0.5 + 1e-12) and not holds(0.5, "!=", 0.5 + 1e-12)
    assert holds(1 - 1e-15, ">=", 1) and holds(1 + 1e-15, "<=", 1)
    assert not holds(0.5, "<", 0.5) and holds(0.5, ">", 0.4999)
    with pytest.raises(ValueError):
        holds(0.5, "==", 0.5)


def test_order_compliance(order, data_dir):
    spec = parse_probdeclare((data_dir / "order.pdecl").read_text())
    report = check_compliance(order, spec)
    probs = [r.probability for r in report.results]
    assert probs == pytest.approx([1, 1 / 11, 3 / 11], abs=TOL)
    assert [r.holds for r in report.results] == [True, True, False]
    assert report.compliant == all(r.holds for r in report.results)
    assert report.as_dict()["compliant"] is False


def test_livelock_warns(live):
    spec = parse_probdeclare("alphabet a b\nconstraint x existence(a) >= 0\n")
    with pytest.warns(LivelockWarning):
        report = check_compliance(live, spec)
    assert report.notes


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(sorted(TEMPLATES)))
def test_complement_sums_to_mass(seed, name):
    lsp, sts = random_acyclic_lsp(np.random.default_rng(seed), NetShape(labels=("a", "b", "c"), state_cap=100))
    dfa = template_to_dfa(name, ["a", "b"][: TEMPLATES[name][0]], ALPH)
    p = spec_probability(lsp, dfa, sts=sts).value
    q = spec_probability(lsp, complement(dfa), sts=sts).value
    assert abs(p + q - language_mass(lsp, sts=sts)) <= TOL


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(sorted(TEMPLATES)))
def test_crisp_satisfaction(seed, name):
    lsp, sts = random_acyclic_lsp(np.random.default_rng(seed), NetShape(labels=("a", "b", "c"), state_cap=100))
    args = ["a", "b"][: TEMPLATES[name][0]]
    dfa = template_to_dfa(name, args, ALPH)
    p = spec_probability(lsp, dfa, sts=sts).value
    every = all(PREDICATES[name](t, *args) for t in model_traces(sts))
    assert holds(p, "=", 1.0) == every
