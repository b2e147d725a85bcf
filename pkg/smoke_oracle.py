"""Smoke checks for tamc.oracle: BFS reachability, lasso search, trace I/O."""
from __future__ import annotations

import json
from pathlib import Path

from tamc.model import parse_ta
from tamc.eltl import parse_eltl
from tamc.oracle import (
    OracleLasso, check_lasso, context_change_count, enumerate_param_valuations,
    goal_from_sets, oracle_lasso_search, oracle_search, replay_trace,
    trace_to_json,
)
from tamc.semantics import Configuration, run, trace

ta = parse_ta(Path("src/tamc/benchmarks/strb.ta.json").read_text())
sigma0 = Configuration.make(ta, {"l1": 3}, params={"n": 4, "t": 1, "f": 1})

# --- oracle_search: strb reach l3 at p=(4,1,1), L=4 -------------------------
goal = goal_from_sets(ta, positive=["l3"])
found = oracle_search(ta, sigma0, goal, 4)
assert found is not None
start, sched = found
assert start == sigma0
print("oracle_search L=4 schedule:", sched)
final = run(ta, start, sched)
assert final.kappa_map(ta)["l3"] >= 1
# shortest: two r1 fires make x=2 >= n-t-f, then r3
assert sched == ["r1", "r1", "r3"]
# the longer four-step route replays to the same goal
assert run(ta, start, ["r1", "r1", "r1", "r3"]).kappa_map(ta)["l3"] == 1

assert oracle_search(ta, sigma0, goal, 1) is None
assert oracle_search(ta, sigma0, goal, 2) is None
print("oracle_search L<=2: None (needs 3 steps)")

# --- parameterized seeding over all admissible valuations --------------------
bounds = {"n": (1, 4), "t": (0, 1), "f": (0, 1)}
vals = list(enumerate_param_valuations(ta, bounds))
print("admissible valuations within bounds:", vals)
assert {"n": 4, "t": 1, "f": 1} in vals
found2 = oracle_search(ta, bounds, goal, 6)
assert found2 is not None
s2, sched2 = found2
assert run(ta, s2, sched2).kappa_map(ta)["l3"] >= 1
print("parameterized oracle_search found:", s2.param_map(ta), sched2)

# --- context changes along the witness ---------------------------------------
cc = context_change_count(ta, start, sched)
print("context changes along [r1,r1,r1,r3]:", cc)
assert cc <= len(ta.guard_atoms())

# --- trace JSON round-trip ----------------------------------------------------
doc = trace_to_json(ta, start, sched)
replay_trace(ta, json.loads(json.dumps(doc)))
print("trace JSON replay OK")

# --- lasso search: F(neq0 l3) must be violated (reach l3, loop on sl3) -------
spec = parse_eltl("(F (neq0 l3))", ta)
lasso = oracle_lasso_search(ta, spec, bounds, stem_len=6, loop_len=2)
assert lasso is not None
print("lasso found: stem", lasso.stem, "loop", lasso.loop)
assert check_lasso(ta, spec, lasso)
assert "l3" in {ta.rules_by_id[r].to_loc for r in lasso.stem} or \
       lasso.sigma0.kappa_map(ta).get("l3", 0) > 0 or \
       any(ta.rules_by_id[r].to_loc == "l3" for r in lasso.loop)

# --- lasso search: unforgeability formula has no violating lasso --------------
# (G (eq0 l3)) with kappa(l0)=N start: no rule can reach l3 without x rising,
# but from all-l0 the spec is the VIOLATION target here: the searcher looks for
# a lasso satisfying the formula, so feed it the violation shape directly.
unforg_viol = parse_eltl("(and (eq0 l0 l2 l3) (F (neq0 l3)))", ta)
lasso2 = oracle_lasso_search(ta, unforg_viol, bounds, stem_len=6, loop_len=2)
# initial configs with kappa(l0)=0 everywhere put everyone in l1; they can
# still reach l3, so a lasso must exist.
assert lasso2 is not None
assert lasso2.sigma0.kappa_map(ta).get("l0", 0) == 0
assert check_lasso(ta, unforg_viol, lasso2)
print("shaped lasso found with kappa(l0)=0 start")

# --- a formula that no lasso can satisfy --------------------------------------
impossible = parse_eltl("(and (eq0 l0 l1 l2 l3))", ta)  # empty system? N>=1 always
# With N = n - f >= 1 under n>3t, t>=f... n>=1: kappa can't be all-zero.
none_found = oracle_lasso_search(ta, impossible, bounds, stem_len=3, loop_len=2)
assert none_found is None
print("impossible formula: no lasso (as expected)")

print("ALL ORACLE SMOKE CHECKS PASS")
