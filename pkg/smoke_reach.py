"""Smoke checks for tamc.reach against the hand-derived strb facts."""
from __future__ import annotations

import json
import time
from pathlib import Path

from tamc.model import parse_ta
from tamc.oracle import goal_from_sets, oracle_search
from tamc.reach import (
    ReachEncoder, ReachWitness, realize_steady, replay_witness, solve_reach,
)
from tamc.semantics import Configuration, run
from tamc.smt import And, Lin, Solver, eq, ge

ta = parse_ta(Path("src/tamc/benchmarks/strb.ta.json").read_text())
solver = Solver()
enc = ReachEncoder(ta)
print("atoms:", [a.render(ta.env.params) for a in enc.atoms], "num_steps:", enc.num_steps)
assert len(enc.atoms) == 2 and enc.num_steps == 3

def fix(cfg, kappa, shared, params):
    parts = []
    for li, v in enumerate(kappa):
        parts.append(eq(Lin.var(cfg.kappa[li]), v))
    for j, v in enumerate(shared):
        parts.append(eq(Lin.var(cfg.shared[j]), v))
    for m, v in enumerate(params):
        parts.append(eq(Lin.var(cfg.params[m]), v))
    return parts

# --- phi_steady: sigma0 -> kappa(l2)=3,x=3 must be Unsat (context flips) ----
a = enc.new_config("u")
b = enc.new_config("v")
X = enc.new_counts("w")
f = And([enc.phi_steady(a, b, X)]
        + fix(a, (0, 3, 0, 0), (0,), (4, 1, 1))
        + fix(b, (0, 0, 3, 0), (3,), (4, 1, 1)))
r = solver.check(f)
print("steady sigma0->l2=3:", r.status)
assert r.status == "unsat"

# --- phi_steady: kappa(l1)=1,x=1 -> kappa(l2)=1,x=2 ------------------------
# p=(4,1,1): x=2 crosses n-t-f=2 -> Unsat; p=(7,2,2): n-t-f=3 -> Sat
for params, expected in (((4, 1, 1), "unsat"), ((7, 2, 2), "sat")):
    n = params[0] - params[2]  # system size n - f
    ka = [0, 1, 0, 0]
    kb = [0, 0, 1, 0]
    # park the remaining processes on l0 at both ends
    ka[0] = n - 1
    kb[0] = n - 1
    f = And([enc.phi_steady(a, b, X)] + fix(a, ka, (1,), params) + fix(b, kb, (2,), params))
    r = solver.check(f)
    print(f"steady l1->l2 at {params}:", r.status)
    assert r.status == expected

# --- phi_steady(sigma, sigma) Sat with all counts zero ----------------------
f = And([enc.phi_steady(a, b, X)]
        + fix(a, (0, 3, 0, 0), (0,), (4, 1, 1))
        + fix(b, (0, 3, 0, 0), (0,), (4, 1, 1)))
r = solver.check(f)
assert r.status == "sat"
assert all(r.model.get(name, 0) == 0 for name in X.x)
print("steady identity: sat with zero counts")

# --- phi_base param equality ------------------------------------------------
f = And([enc.phi_base(a, b)]
        + [eq(Lin.var(a.params[0]), 4), eq(Lin.var(b.params[0]), 5)])
assert solver.check(f).status == "unsat"
print("phi_base: parameter equality enforced")

# --- solve_reach, concrete init: sigma0 ->* kappa(l2)=2, kappa(l3)=1 --------
sigma0 = Configuration.make(ta, {"l1": 3}, params={"n": 4, "t": 1, "f": 1})
res = solve_reach(ta, sigma0, positive=["l3"], solver=solver)
assert res.status == "sat"
w = res.witness
print("witness schedule:", w.schedule)
print("witness segments:", len(w.segments), "steps:", [s.rule_id for s in w.steps])
assert run(ta, sigma0, w.schedule).kappa_map(ta)["l3"] >= 1
replay_witness(ta, w)

# --- JSON round trip ---------------------------------------------------------
doc = json.loads(json.dumps(w.to_json(ta)))
w2 = ReachWitness.from_json(ta, doc)
assert w2 == w
print("witness JSON round-trip OK")

# --- parameterized: zero={l0,l1}, positive={l3} ------------------------------
res = solve_reach(ta, None, zero=["l0", "l1"], positive=["l3"], solver=solver)
assert res.status == "sat"
print("parameterized reach params:", res.witness.params_map())

# --- parameterized: move EVERYONE to l3 --------------------------------------
res = solve_reach(ta, None, zero=["l0", "l1", "l2"], positive=["l3"], solver=solver)
assert res.status == "sat"
w3 = res.witness
final = w3.final
assert final.kappa_map(ta).get("l2", 0) == 0 and final.kappa_map(ta)["l3"] >= 1
print("all-to-l3 schedule:", w3.schedule)

# --- unreachable: conservation violated --------------------------------------
res = solve_reach(ta, sigma0, zero=["l0", "l1", "l2", "l3"], solver=solver)
assert res.status == "unsat"
print("empty target: unsat")

# --- bound: needs 3 firings --------------------------------------------------
res = solve_reach(ta, sigma0, positive=["l3"], bound=2, solver=solver)
assert res.status == "unsat"
res = solve_reach(ta, sigma0, positive=["l3"], bound=3, solver=solver)
assert res.status == "sat" and len(res.witness.schedule) == 3
print("bound 2/3 behaves like the oracle")

# --- differential vs oracle at tiny bounds ------------------------------------
t0 = time.time()
bounds = {"n": (1, 4), "t": (0, 1), "f": (0, 1)}
goal = goal_from_sets(ta, positive=["l3"])
for L in range(0, 5):
    got = solve_reach(ta, None, positive=["l3"], bound=L,
                      param_bounds=bounds, solver=solver)
    want = oracle_search(ta, bounds, goal, L)
    assert (got.status == "sat") == (want is not None), (L, got.status, want)
print(f"oracle differential L=0..4 agrees ({time.time()-t0:.1f}s)")

# --- chains encoding agrees ---------------------------------------------------
for L in (1, 2, 3):
    a_res = solve_reach(ta, sigma0, positive=["l3"], bound=L, solver=solver, appl="rank")
    b_res = solve_reach(ta, sigma0, positive=["l3"], bound=L, solver=solver, appl="chains")
    assert a_res.status == b_res.status
print("rank vs chains agree on strb")

# --- realize_steady spec cases ------------------------------------------------
sig = Configuration.make(ta, {"l1": 2, "l0": 1}, params={"n": 4, "t": 1, "f": 1})
assert realize_steady(ta, sig, {"r1": 2}) == ["r1", "r1"]
sig2 = Configuration.make(ta, {"l2": 1, "l0": 2}, {"x": 2}, {"n": 4, "t": 1, "f": 1})
sched = realize_steady(ta, sig2, {"sl2": 2, "r3": 1})
from collections import Counter
assert Counter(sched) == Counter({"sl2": 2, "r3": 1})
assert run(ta, sig2, sched) is not None
print("realize_steady cases:", sched)
assert realize_steady(ta, sig, {}) == []

solver.close()
print("ALL REACH SMOKE CHECKS PASS")
