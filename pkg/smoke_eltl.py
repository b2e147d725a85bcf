"""Smoke checks for tamc.eltl: parsing, normal form, cut graphs, orderings."""
from __future__ import annotations

import json
from pathlib import Path

from tamc.model import parse_ta
from tamc.eltl import (
    CF, EF, GF, PF, collect_guard_atoms, cut_graph, eval_lasso, parse_eltl,
    to_normal_form, topo_orders,
)
from tamc.semantics import Configuration, run, trace

ta = parse_ta(Path("src/tamc/benchmarks/strb.ta.json").read_text())

# --- parsing ---------------------------------------------------------------
unforg = parse_eltl("(and (eq0 l0 l2 l3) (G (eq0 l3)))", ta)
print("unforg parsed:", unforg.render())
fair = parse_eltl(
    "(G (F (and (imp (or (ge x (+ t 1)) (ge x (- n t))) (eq0 l0))"
    " (eq0 l1)"
    " (imp (ge x (- n t)) (eq0 l2)))))",
    ta,
)
print("fair parsed:", fair.render())
atoms = collect_guard_atoms(fair)
print("fair guard atoms:", [a.render(ta.env.params) for a in atoms])
assert len(atoms) == 2

both = parse_eltl(
    "(and (eq0 l0 l2 l3) (G (eq0 l3))"
    " (G (F (and (imp (or (ge x (+ t 1)) (ge x (- n t))) (eq0 l0))"
    " (eq0 l1)"
    " (imp (ge x (- n t)) (eq0 l2))))))",
    ta,
)

# --- normal form -----------------------------------------------------------
nf = to_normal_form(both)
assert len(nf.phi0) == 1 and nf.phi0[0].premise is None          # eq0 l0 l2 l3
assert nf.eventualities == ()
assert nf.always is not None
assert len(nf.always.phi0) == 1                                   # G(eq0 l3)
assert len(nf.always.eventualities) == 1                          # G F fair
assert nf.always.eventualities[0].phi0 and nf.always.always is None

g = cut_graph(nf)
labels = sorted(n.kind for n in g.nodes)
print("unforg+fair cut graph kinds:", labels)
assert labels == ["ev", "loop_end", "loop_st", "root"]
orders = list(topo_orders(g))
assert len(orders) == 1
print("unforg+fair orderings:", len(orders))

# --- no eventualities => 3 nodes, 1 order ----------------------------------
nf2 = to_normal_form(unforg)
g2 = cut_graph(nf2)
assert sorted(n.kind for n in g2.nodes) == ["loop_end", "loop_st", "root"]
assert len(list(topo_orders(g2))) == 1
print("no-eventualities graph: 3 nodes, 1 order")

# --- F(a & Fb & Fc & Gd & GFe) => 6 nodes, 2 orders ------------------------
# a: l0=0, b: l1=0, c: l2=0, d: l3=0, e: x>=1 -> l0=0
big = parse_eltl(
    "(F (and (eq0 l0) (F (eq0 l1)) (F (eq0 l2)) (G (eq0 l3))"
    " (G (F (imp (ge x 1) (eq0 l0))))))",
    ta,
)
nf3 = to_normal_form(big)
assert nf3.phi0 == () and nf3.always is None and len(nf3.eventualities) == 1
g3 = cut_graph(nf3)
kinds = sorted(n.kind for n in g3.nodes)
print("Fig5-shaped graph kinds:", kinds)
assert kinds == ["ev", "ev", "ev", "ev", "loop_end", "loop_st"]
orders3 = list(topo_orders(g3))
print("Fig5-shaped orderings:", len(orders3))
assert len(orders3) == 2
# One ordering must be A <= B <= C <= loop_st <= E <= loop_end.
def names(order):
    out = []
    by_idx = {n.idx: n for n in g3.nodes}
    for i in order:
        node = by_idx[i]
        if node.kind == "ev":
            pf = node.local[0] if node.local else None
            out.append(pf.render() if pf else "?")
        else:
            out.append(node.kind)
    return out
for o in orders3:
    print("  order:", names(o))

# --- Fa & Fb => 2 orders ----------------------------------------------------
fafb = parse_eltl("(and (F (eq0 l0)) (F (eq0 l1)))", ta)
nf4 = to_normal_form(fafb)
g4 = cut_graph(nf4)
assert len(list(topo_orders(g4))) == 2
print("Fa&Fb orderings: 2")

# --- max_orders cap ----------------------------------------------------------
assert len(list(topo_orders(g4, max_orders=1))) == 1

# --- eval_lasso sanity: F(neq0 l3) on an sl3 lasso ---------------------------
spec = parse_eltl("(F (neq0 l3))", ta)
sigma0 = Configuration.make(ta, {"l1": 3}, params={"n": 4, "t": 1, "f": 1})
tr = trace(ta, sigma0, ["r1", "r1", "r1", "r3"])
# loop: stay at the last config via sl3
last = tr[-1]
assert eval_lasso(ta, spec, list(tr), len(tr) - 1)
unforg_violated = eval_lasso(ta, unforg, list(tr), len(tr) - 1)
assert not unforg_violated  # G(eq0 l3) fails on this lasso
print("eval_lasso checks pass")
print("ALL ELTL SMOKE CHECKS PASS")
