"""Scratch validation for liveness.check_spec / phi_prop / replay_lasso."""

from __future__ import annotations

import json
import pathlib
import time

from tamc.eltl import CF, PF, cut_graph, parse_eltl, to_normal_form, topo_orders
from tamc.liveness import LassoWitness, check_spec, phi_prop, replay_lasso
from tamc.model import parse_ta
from tamc.reach import ReachEncoder
from tamc.smt import And, Lin, Solver, eq

BENCH = pathlib.Path("src/tamc/benchmarks")
strb = parse_ta(json.loads((BENCH / "strb.ta.json").read_text()))
strb_weak = parse_ta(json.loads((BENCH / "strb_weak.ta.json").read_text()))
fair_spec = (BENCH / "strb_unforg.eltl").read_text()

# --- 1. F(neq0 l3) on strb: a run reaching l3 exists; sl3 closes the lasso.
t0 = time.monotonic()
res = check_spec(strb, "(F (neq0 l3))")
print(f"[1] F(neq0 l3): {res.status} in {res.seconds:.2f}s, orderings={res.orderings_tried}")
assert res.status == "violated", res
w = res.witness
assert w is not None
assert replay_lasso(strb, w) is True
assert w.loop, w
print(f"    params={w.params_map()} stem={list(w.stem)} loop={list(w.loop)}")
print(f"    ordering={w.ordering} c={w.c}")
blob = w.to_json(strb)
assert blob["params"] and blob["loop"], blob

# --- 2. cut graph shape for the fairness conjunction: 4 nodes, 1 ordering.
formula = parse_eltl(fair_spec, strb)
nf = to_normal_form(formula)
graph = cut_graph(nf)
orders = list(topo_orders(graph))
print(f"[2] fairness-conjunction graph: {len(graph.nodes)} nodes, {len(orders)} ordering(s)")
for n in graph.nodes:
    print(f"    node {n.idx} kind={n.kind} local={[p.render() for p in n.local]} globals={[p.render() for p in n.globals_]}")
assert len(orders) >= 1

# --- 3. strb + unforgeability/fairness conjunction: Holds (< 120 s budget).
t0 = time.monotonic()
res2 = check_spec(strb, fair_spec)
print(f"[3] strb fair spec: {res2.status} in {res2.seconds:.2f}s, orderings={res2.orderings_tried}")
assert res2.status == "holds", res2

# --- 4. strb_weak (n > 2t only): Violated with a replayable lasso.
res3 = check_spec(strb_weak, fair_spec)
print(f"[4] strb_weak fair spec: {res3.status} in {res3.seconds:.2f}s, orderings={res3.orderings_tried}")
assert res3.status == "violated", res3
w3 = res3.witness
assert w3 is not None
assert replay_lasso(strb_weak, w3) is True
print(f"    params={w3.params_map()} stem={list(w3.stem)} loop={list(w3.loop)}")

# --- 5. phi_prop endpoint examples over strb.
enc = ReachEncoder(strb)
li = {loc: i for i, loc in enumerate(strb.locations)}


def pin(cfg, kappa, shared, params):
    parts = []
    for loc, v in kappa.items():
        parts.append(eq(Lin.var(cfg.kappa[li[loc]]), v))
    for name, v in zip(cfg.shared, shared):
        parts.append(eq(Lin.var(name), v))
    for name, v in zip(cfg.params, params):
        parts.append(eq(Lin.var(name), v))
    return parts


p_l3 = PF(conclusion=CF(zero=frozenset({"l3"}), nonzero=()), premise=None)
p_l1 = PF(conclusion=CF(zero=frozenset({"l1"}), nonzero=()), premise=None)
p_nz = PF(conclusion=CF(zero=frozenset(), nonzero=(frozenset({"l1", "l2"}),)), premise=None)

with Solver() as sv:
    # (a) {l3}=0 from sigma0(kappa l1=3) to kappa(l2)=3, x=3: Sat.
    chain, phi = phi_prop(enc, p_l3, "pa")
    pins = pin(chain.first, {"l0": 0, "l1": 3, "l2": 0, "l3": 0}, [0], [4, 1, 1])
    pins += pin(chain.last, {"l0": 0, "l1": 0, "l2": 3, "l3": 0}, [3], [4, 1, 1])
    ra = sv.check(And([phi] + pins))
    print(f"[5a] {{l3}}=0 sigma0 -> kappa(l2)=3,x=3: {ra.status}")
    assert ra.status == "sat"

    # (b) {l1}=0 with kappa(l1)=3 at the start: Unsat (endpoint violates).
    chain, phi = phi_prop(enc, p_l1, "pb")
    pins = pin(chain.first, {"l0": 0, "l1": 3, "l2": 0, "l3": 0}, [0], [4, 1, 1])
    rb = sv.check(And([phi] + pins))
    print(f"[5b] {{l1}}=0 from kappa(l1)=3: {rb.status}")
    assert rb.status == "unsat"

    # (c) not({l1,l2}=0): all-in-l3 endpoint Unsat; one left in l2 Sat.
    chain, phi = phi_prop(enc, p_nz, "pc")
    pins = pin(chain.first, {"l0": 0, "l1": 3, "l2": 0, "l3": 0}, [0], [4, 1, 1])
    pins += pin(chain.last, {"l0": 0, "l1": 0, "l2": 0, "l3": 3}, [3], [4, 1, 1])
    rc = sv.check(And([phi] + pins))
    chain, phi = phi_prop(enc, p_nz, "pd")
    pins = pin(chain.first, {"l0": 0, "l1": 3, "l2": 0, "l3": 0}, [0], [4, 1, 1])
    pins += pin(chain.last, {"l0": 0, "l1": 0, "l2": 1, "l3": 2}, [3], [4, 1, 1])
    rd = sv.check(And([phi] + pins))
    print(f"[5c] nonzero l1/l2, all-in-l3: {rc.status}; one-in-l2: {rd.status}")
    assert rc.status == "unsat"
    assert rd.status == "sat"

print("ALL LIVENESS SMOKE CHECKS PASSED")
