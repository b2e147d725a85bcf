"""Specification logic: parsing, normal form, cut graph, exact evaluation."""

from __future__ import annotations

import pytest

from tamc.eltl import (
    EltlError,
    cut_graph,
    eval_lasso,
    eval_prop,
    parse_eltl,
    to_normal_form,
    topo_orders,
)
from tamc.semantics import Configuration, apply_rule

ACCEPT = [
    "(eq0 l0)",
    "(eq0 l0 l2 l3)",
    "(neq0 l1)",
    "(not (eq0 l1))",
    "(G (eq0 l3))",
    "(F (neq0 l3))",
    "(and (eq0 l0) (G (eq0 l3)))",
    "(imp (ge x (+ t 1)) (eq0 l0))",
    "(imp (or (ge x (+ t 1)) (ge x (- n t))) (eq0 l0))",
    "(imp (and (ge x 1) (lt x n)) (eq0 l0))",
    "(G (F (and (imp (ge x (* (/ 1 2) n)) (eq0 l1)) (eq0 l2))))",
    "(and)",
]

REJECT = [
    "",  # empty
    "l0",  # bare symbol
    "(eq0 nowhere)",  # unknown location
    "(ge y 1)",  # unknown shared variable
    "(ge x (* n t))",  # nonlinear
    "(F (ge x 1))",  # guard formula outside a premise
    "(imp (eq0 l0) (eq0 l1))",  # premise must be a guard formula
    "(imp (ge x 1) (ge x 2))",  # conclusion must be a counter formula
    "(not (neq0 l0))",  # negation only over eq0
    "(or (eq0 l0) (eq0 l1))",  # or only between guard formulas
    "(until (eq0 l0) (eq0 l1))",  # no such operator
    "(G (eq0 l3)) trailing",
    "(/ 1 0)",
]


def test_parser_accepts(strb):
    for text in ACCEPT:
        parse_eltl(text, strb)


def test_parser_rejects(strb):
    for text in REJECT:
        with pytest.raises(EltlError, match="."):
            parse_eltl(text, strb)


def test_eval_prop(strb):
    sigma = Configuration.make(strb, {"l1": 3}, {"x": 0}, {"n": 4, "t": 1, "f": 1})
    cases = [
        ("(eq0 l0 l2 l3)", True),
        ("(eq0 l1)", False),
        ("(neq0 l1)", True),
        ("(neq0 l2 l3)", False),  # at least one of them occupied: no
        ("(imp (ge x 1) (eq0 l1))", True),  # premise false at x=0
        ("(imp (ge x (- t t)) (eq0 l1))", False),  # x >= 0 holds, l1 nonempty
        ("(and (eq0 l0) (neq0 l1))", True),
    ]
    for text, want in cases:
        formula = parse_eltl(text, strb)
        assert formula.kind == "prop"
        assert eval_prop(strb, sigma, formula.prop) is want, text


def test_eval_lasso_positions(strb):
    sigma0 = Configuration.make(strb, {"l1": 3}, {"x": 0}, {"n": 4, "t": 1, "f": 1})
    configs = [sigma0]
    for rid in ["r1", "r1", "r3", "sl3"]:
        configs.append(apply_rule(strb, configs[-1], rid))
    # loop is the final sl3 self-loop: positions 4... repeat config 4
    loop_start = 4
    assert eval_lasso(strb, parse_eltl("(F (neq0 l3))", strb), configs, loop_start)
    assert eval_lasso(strb, parse_eltl("(F (G (neq0 l3)))", strb), configs, loop_start)
    assert not eval_lasso(strb, parse_eltl("(G (eq0 l3))", strb), configs, loop_start)
    assert not eval_lasso(strb, parse_eltl("(G (neq0 l3))", strb), configs, loop_start)
    assert eval_lasso(strb, parse_eltl("(and (eq0 l2 l3) (F (neq0 l2)))", strb), configs, loop_start)


def test_normal_form_shapes(strb):
    nf = to_normal_form(parse_eltl("(G (G (eq0 l3)))", strb))
    assert nf.always is not None and nf.always.always is None  # GG collapsed
    nf2 = to_normal_form(parse_eltl("(F (and (F (neq0 l2)) (F (neq0 l3))))", strb))
    assert len(nf2.eventualities) == 2  # F(Fa and Fb) = Fa and Fb
    nf3 = to_normal_form(parse_eltl("(and (eq0 l0) (G (eq0 l3)) (G (F (neq0 l1))))", strb))
    assert len(nf3.phi0) == 1
    assert nf3.always is not None and len(nf3.always.eventualities) == 1


# (formula, node count, ordering count) — the cut graph fixes how many
# interleavings of eventualities the reachability backend must try.
CUT_CASES = [
    ("(G (eq0 l3))", 3, 1),
    ("(and (F (neq0 l2)) (F (neq0 l3)))", 4, 2),
    ("(F (and (neq0 l2) (F (neq0 l3))))", 4, 1),  # nested F orders the two cuts
]


def test_cut_graph_counts(strb, unforg_text):
    for text, nodes, orders in CUT_CASES:
        graph = cut_graph(to_normal_form(parse_eltl(text, strb)))
        assert len(graph.nodes) == nodes, text
        assert len(list(topo_orders(graph))) == orders, text
    fairness = cut_graph(to_normal_form(parse_eltl(unforg_text, strb)))
    assert len(fairness.nodes) == 4
    assert [n.kind for n in fairness.nodes] == ["root", "loop_st", "loop_end", "ev"]
    assert len(list(topo_orders(fairness))) == 1
    assert fairness.nodes[3].in_loop  # the recurring eventuality sits in the loop


def test_topo_orders_cap(strb):
    graph = cut_graph(to_normal_form(parse_eltl("(and (F (neq0 l2)) (F (neq0 l3)))", strb)))
    assert len(list(topo_orders(graph, max_orders=1))) == 1
