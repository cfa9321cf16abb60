from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mancalog.bounds import EMPTY, FULL, Bound
from mancalog.diagnostics import DiagnosticError
from mancalog.dsl import (
    dump_network,
    export_timeline,
    format_formula,
    format_program,
    import_timeline,
    load_network,
    parse_fact,
    parse_program,
    tokenize,
)
from mancalog.engine import minimal_model
from mancalog.generate import generate_instance, random_program
from mancalog.influence import negtip, softtip, threshold_influence
from mancalog.model import TRUE, And, Atom, Fact, IntegrityConstraint, NeighborCriterion, Not, Or, Rule, validate
from mancalog.semantics import Interpretation

from conftest import load_fixture, parse_on_social_net

B = Bound.parse
ONE = B("[1,1]")


def _codes(exc):
    return [d.code for d in exc.value.diagnostics]


# -- programs ------------------------------------------------------------------


def test_rule_statement():
    p = parse_on_social_net(
        "rule watchesA <- 2 : female:[1,1], (strongTie:[0.9,1], true, watchesA:[0.9,1]) : softtip;"
    )
    assert p.rules == (
        Rule(
            "watchesA",
            2,
            Atom("female", ONE),
            NeighborCriterion(Atom("strongTie", B("[0.9,1]")), TRUE, Atom("watchesA", B("[0.9,1]")), softtip()),
        ),
    )


def test_fact_statement():
    p = parse_on_social_net("#tmax 10; fact male:[1,1] @ node 1 in [0, 10];")
    assert p.facts == (Fact(Atom("male", ONE), "1", 0, 10),)
    assert p.facts[0].span.line == 1 and p.facts[0].span.column == 11


def test_edge_fact_and_constraint_statements():
    p = parse_on_social_net(
        "fact strongTie:[1,1] @ edge 1->2 in [0,10]; constraint watchesA:[0,0] <~ female:[1,1] & watchesB:(0.5,1];",
    )
    assert p.facts[0].component == ("1", "2")
    assert p.constraints == (
        IntegrityConstraint(Atom("watchesA", B("[0,0]")), (Atom("female", ONE), Atom("watchesB", B("(0.5,1]")))),
    )


def test_nonfluent_constraint_head_is_reported():
    with pytest.raises(DiagnosticError) as exc:
        parse_on_social_net("constraint male:[0,0] <~ female:[1,1];")
    assert _codes(exc) == ["nonfluent-head"]
    p = parse_on_social_net("constraint male:[0,0] <~ female:[1,1];", check=False)
    assert p.constraints[0].head == Atom("male", B("[0,0]"))


def test_short_nonfluent_window_is_reported():
    with pytest.raises(DiagnosticError) as exc:
        parse_on_social_net("fact male:[1,1] @ node 1 in [2,5];")
    assert _codes(exc) == ["nonfluent-window"]
    assert exc.value.diagnostics[0].span.line == 1


def test_formula_precedence():
    p = parse_on_social_net(
        "rule watchesA <- 1 : true, (true, true, !watchesA:[1,1] & watchesB:[1,1] | watchesA:[0,0] & true) : tip;"
    )
    a, b, c = Atom("watchesA", ONE), Atom("watchesB", ONE), Atom("watchesA", B("[0,0]"))
    assert p.rules[0].neighbor.trigger == Or(And(Not(a), b), And(c, TRUE))
    assert format_formula(Or(And(Not(a), b), And(c, TRUE))) == "!watchesA:[1.0,1.0] & watchesB:[1.0,1.0] | watchesA:[0.0,0.0] & true"
    assert format_formula(And(a, Or(b, c))) == "watchesA:[1.0,1.0] & (watchesB:[1.0,1.0] | watchesA:[0.0,0.0])"
    assert format_formula(Not(And(a, b))) == "!(watchesA:[1.0,1.0] & watchesB:[1.0,1.0])"
    assert format_formula(And(a, And(b, c))) == "watchesA:[1.0,1.0] & (watchesB:[1.0,1.0] & watchesA:[0.0,0.0])"


def test_bound_keywords_and_parameters():
    p = parse_on_social_net(
        "rule watchesA <- 1 : true, (true, male:true, watchesB:empty) : softtip(2/3, [0.6,1]);"
        "rule watchesB <- 3 : true, (true, true, true) : steps(0.25, [0.1,1], 0.75, [0.5,1]);"
        "rule watchesB <- 1 : true, (true, true, true) : negtip([0,0.1]);"
    )
    r1, r2, r3 = p.rules
    assert r1.neighbor.node_formula == Atom("male", FULL)
    assert r1.neighbor.trigger == Atom("watchesB", EMPTY)
    assert r1.neighbor.influence == softtip(Fraction(2, 3), B("[0.6,1]"))
    assert r2.neighbor.influence == threshold_influence("steps", [("0.25", B("[0.1,1]")), ("0.75", B("[0.5,1]"))])
    assert r3.neighbor.influence == negtip(B("[0,0.1]"))


def test_directives_merge_with_network(social_net):
    net, reg, t_max = social_net
    p = parse_program("#fluent likes; fact likes:[0.5,1] @ node 2 in [0,1];", net, reg, t_max)
    assert p.registry.is_fluent("likes") and p.registry.is_fluent("watchesA")
    with pytest.raises(DiagnosticError) as exc:
        parse_program("#tmax 4;", net, reg, t_max)
    assert _codes(exc) == ["tmax-conflict"]
    with pytest.raises(DiagnosticError) as exc:
        parse_program("", net, reg, None)
    assert _codes(exc) == ["missing-tmax"]
    with pytest.raises(DiagnosticError) as exc:
        parse_program("#nonfluent watchesA;", net, reg, t_max)
    assert _codes(exc) == ["label-conflict"]


def test_syntax_errors_carry_line_and_column():
    with pytest.raises(DiagnosticError) as exc:
        parse_on_social_net(
            "fact watchesA:[0.8,1.0] @ node 1 in [0, 10];\n"
            "rule watchesB <- 1 : male:[1,1] (true, true) : softtip;\n"
            "fact watchesA:[0.8,1.0] @ node 3 in [0 10];\n",
            filename="bad.mcl",
        )
    diags = exc.value.diagnostics
    assert [(d.code, d.span.line, d.span.column) for d in diags] == [("syntax", 2, 33), ("syntax", 3, 40)]
    assert str(diags[0]).startswith("bad.mcl:2:33: syntax:")


@pytest.mark.parametrize(
    "text, code",
    [
        ("fact watchesA:[0.8,1.0] @ node 9 in [0,1];", "dangling-component"),
        ("fact likes:[0.8,1.0] @ node 1 in [0,1];", "unregistered-label"),
        ("fact watchesA:[0.9;0.2] @ node 1 in [0,1];", "syntax"),
        ("fact watchesA:[0.8,1.5] @ node 1 in [0,1];", "syntax"),
        ("rule watchesA <- 1 : true, (true, true, true) : nosuch;", "syntax"),
        ("rule watchesA <- 0 : true, (true, true, true) : tip;", "bad-delta"),
        ("fact watchesA:[0.8,1.0] @ node 1 in [0,1] $", "syntax"),
    ],
)
def test_error_codes(text, code):
    with pytest.raises(DiagnosticError) as exc:
        parse_on_social_net(text)
    assert code in _codes(exc)
    assert all(d.span is not None for d in exc.value.diagnostics)


def test_parse_fact_forms():
    f = parse_fact("watchesA:[0.8,1] @ node 1 in [0,0]")
    assert f == Fact(Atom("watchesA", B("[0.8,1]")), "1", 0, 0)
    assert parse_fact("fact watchesA:[0.8,1] @ edge 1->2 in [0,3];").component == ("1", "2")
    with pytest.raises(DiagnosticError):
        parse_fact("watchesA:[0.8,1] @ node 1 in [0,0] extra")
    with pytest.raises(DiagnosticError):
        parse_fact("watchesA @ node 1")


def test_decimal_literals_are_exact():
    p = parse_on_social_net("fact watchesA:[0.123456789,0.987654321] @ node 1 in [0,1];")
    b = p.facts[0].atom.bound
    assert (b.lower, b.upper) == (Fraction(123456789, 10**9), Fraction(987654321, 10**9))
    assert str(b) == "[0.123456789,0.987654321]"


def test_print_parse_round_trip_on_fixtures(social_net):
    net, reg, t_max = social_net
    for name in ("full_program.mcl", "full_program_literal.mcl", "running_canonical.mcl"):
        p = load_fixture(name)
        again = parse_program(format_program(p), net, reg, t_max)
        assert again == p
        assert format_program(again) == format_program(p)


@settings(max_examples=80)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_print_parse_round_trip_on_random_programs(seed, monotone):
    p = random_program(random.Random(seed), max_nodes=6, max_edges=10, max_t=4, monotone=monotone)
    text = format_program(p)
    again = parse_program(text, p.network)
    assert again == p
    assert validate(again) == validate(p) == []


_ALPHABET = st.sampled_from(
    list("fact rule constraint node edge in @ : ; , ( ) [ ] ! & | <- <~ -> 0 1 0.5 true empty watchesA male tip #tmax".split())
    + [" ", "\n", "{", "\x00", "é", "1/0", "//"]
)


@settings(max_examples=300)
@given(st.lists(_ALPHABET, max_size=40).map(" ".join))
def test_token_soup_only_yields_diagnostics(text):
    try:
        parse_on_social_net(text)
    except DiagnosticError as exc:
        assert exc.diagnostics and all(d.span is not None for d in exc.diagnostics)


@settings(max_examples=200)
@given(st.binary(max_size=200))
def test_arbitrary_bytes_only_yield_diagnostics(data):
    text = data.decode("utf-8", errors="replace")
    try:
        parse_on_social_net(text)
    except DiagnosticError as exc:
        assert all(d.span is not None for d in exc.diagnostics)
    tokens, diags = tokenize(text)
    assert tokens[-1].kind == "eof"


# -- networks ------------------------------------------------------------------


def test_load_example_network(social_net):
    net, reg, t_max = social_net
    assert len(net.nodes) == 5 and len(net.edges) == 7 and t_max == 10
    assert reg.is_fluent("watchesB") and not reg.is_fluent("weakTie")
    again = load_network(dump_network(net, reg, t_max))
    assert again == (net, reg, t_max)


@pytest.mark.parametrize(
    "doc, code, path",
    [
        ({"nodes": [], "edges": [["1", "2"]]}, "dangling-endpoint", "$.edges[0]"),
        ({"nodes": ["1", "2"], "edges": [["1", "2"], ["1", "2"]]}, "duplicate-edge", "$.edges[1]"),
        ({"nodes": ["1", "1"]}, "duplicate-node", "$.nodes[1]"),
        ({"nodes": ["1"], "edges": [["1"]]}, "schema", "$.edges[0]"),
        ({"nodes": ["1"], "t_max": -1}, "schema", "$.t_max"),
        ({"nodes": ["1"], "colour": 3}, "schema", "$.colour"),
        ({"fluent": ["a"], "nonfluent": ["a"]}, "label-conflict", "$.nonfluent[0]"),
        ([], "schema", "$"),
    ],
)
def test_network_errors(doc, code, path):
    with pytest.raises(DiagnosticError) as exc:
        load_network(json.dumps(doc))
    d = exc.value.diagnostics[0]
    assert (d.code, d.path) == (code, path)


def test_malformed_json():
    with pytest.raises(DiagnosticError) as exc:
        load_network('{"nodes": [1,')
    assert _codes(exc) == ["json"]


# -- timelines -----------------------------------------------------------------


def test_sparse_timeline_of_single_fact():
    m = minimal_model(load_fixture("f7.mcl")).model
    text = export_timeline(m, "csv")
    lines = text.splitlines()
    assert lines[0] == "t,component,label,bound"
    assert lines[1:] == [f'{t},node:1,watchesA,"[0.8,1.0]"' for t in range(11)]
    assert import_timeline(text, "csv", 10) == m


def test_bottom_timeline_is_header_only():
    assert export_timeline(Interpretation.bottom(3), "csv") == "t,component,label,bound\n"
    doc = json.loads(export_timeline(Interpretation.bottom(3), "json"))
    assert doc == {"t_max": 3, "rows": []}


def test_dense_timeline(social_net):
    net, reg, t_max = social_net
    m = minimal_model(load_fixture("f7.mcl")).model
    text = export_timeline(m, "csv", sparse=False, network=net, labels=reg.labels)
    assert len(text.splitlines()) == 1 + 11 * 12 * 6
    assert import_timeline(text, "csv") == m
    with pytest.raises(ValueError):
        export_timeline(m, "csv", sparse=False)
    with pytest.raises(ValueError):
        export_timeline(m, "xml")


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["csv", "json"]))
def test_timeline_round_trip(seed, fmt):
    p = random_program(random.Random(seed), max_nodes=8, max_edges=12, max_t=4)
    m = minimal_model(p, verify=False).model
    assert import_timeline(export_timeline(m, fmt), fmt, p.t_max) == m


def test_generated_instances_survive_printing():
    p = generate_instance(3, 40, 3, 5, 6)
    again = parse_program(format_program(p), p.network, p.registry, p.t_max)
    assert again == p
