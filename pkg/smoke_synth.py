"""Scratch smoke checks for synthesis.py + generators.py."""

from __future__ import annotations

import time

from tamc.cover import cover
from tamc.generators import (
    Cnf3,
    Sigma2Instance,
    brute_sat,
    brute_sigma2,
    gen_3sat,
    gen_sigma2,
    parse_dimacs,
    parse_qdimacs_lite,
)
from tamc.model import check_multiplicative
from tamc.synthesis import Assignment, CandidateSpace, instantiate, sane_space, synthesize

# ---------------------------------------------------------------- [1] 3-SAT
fig3 = Cnf3(num_vars=3, clauses=((1, -2, 3), (-1, -2, -3)))
assert brute_sat(fig3) is True
assert brute_sat(Cnf3(num_vars=1, clauses=((1,), (-1,)))) is False
assert brute_sat(Cnf3(num_vars=0, clauses=())) is True

dim = parse_dimacs("c comment\np cnf 3 2\n1 -2 3 0\n-1 -2 -3 0\n")
assert dim == fig3, dim

ta = gen_3sat(fig3)
print("[1] 3sat param TA:", len(ta.locations), "locs,", len(ta.rules), "rules")
assert len(ta.locations) == 3 * 3 + 2
assert len(ta.rules) == 4 * 3 + 1
mult = check_multiplicative(ta)
print("    multiplicative:", mult.kind)

t0 = time.time()
res = cover(ta, "lF")
print(f"    cover lF: {res.status} ({time.time() - t0:.2f}s) method={res.method}")
assert res.status == "coverable", res

ta_unsat = gen_3sat(Cnf3(num_vars=1, clauses=((1,), (-1,))))
res2 = cover(ta_unsat, "lF")
print("    cover lF (x & !x):", res2.status)
assert res2.status == "uncoverable", res2

ta_np = gen_3sat(fig3, variant="nonparam")
assert all(not r.guard for r in ta_np.rules if r.id.startswith(("t", "b")))
res3 = cover(ta_np, "lF")
print("    nonparam cover lF:", res3.status)
assert res3.status == "coverable", res3

# ------------------------------------------------------------ [2] sigma2 gen
# TRUE instance: exists x1 forall y1 . (x1 & y1) | (x1 & !y1)
q_true = Sigma2Instance(exists_vars=1, forall_vars=1, dnf=((1, 2), (1, -2)))
assert brute_sigma2(q_true) is True
# FALSE instance: exists x1,x2 forall y1 . (x1 & y1 & !y1) | (!x1 & !x2 & y1)
q_false = Sigma2Instance(exists_vars=2, forall_vars=1, dnf=((1, 3, -3), (-1, -2, 3)))
assert brute_sigma2(q_false) is False

qd = parse_qdimacs_lite(
    "c example\np cnf 3 2\ne 1 2 0\na 3 0\n1 3 -3 0\n-1 -2 3 0\n"
)
assert qd == q_false, qd

sk_true, spec_true = gen_sigma2(q_true)
print("[2] sigma2 sketch:", len(sk_true.locations), "locs,", len(sk_true.rules), "rules;",
      "indets:", sk_true.indeterminates)
print("    spec:", spec_true)
assert sk_true.is_sketch()
assert sk_true.indeterminates == ("v1",)

# ------------------------------------------------------------- [3] sane space
space = sane_space(sk_true, 1, num_bound=1)
print("[3] sane space D=1 B=1:", space.ranges, "size", space.size)
assert space.ranges == (("v1", 0, 1),), space.ranges
cands = list(space.candidates())
assert [str(c) for c in cands] == ["{v1=0}", "{v1=1}"], cands

ta_v1 = instantiate(sk_true, Assignment.of({"v1": 1}))
assert not ta_v1.is_sketch()

# derived window (no num_bound): RC n >= 1 is a degenerate delta shape with no
# t-coefficients, so the n-coefficient role bound [0, D] applies
space_d = sane_space(sk_true, 1)
print("    derived window:", space_d.ranges)
assert space_d.ranges == (("v1", 0, 1),), space_d.ranges

# --------------------------------------------------------- [4] synthesize TRUE
t0 = time.time()
out = synthesize(sk_true, spec_true, denominator=1, num_bound=1)
print(f"[4] synthesize (true instance): {out.status} {out.assignment} "
      f"tried={out.candidates_tried} pruned={out.pruned} ({time.time() - t0:.1f}s)")
print("    log:", out.log)
assert out.status == "found", out
assert out.assignment is not None and out.assignment.mapping()["v1"] == 1

# -------------------------------------------------------- [5] synthesize FALSE
sk_false, spec_false = gen_sigma2(q_false)
t0 = time.time()
out2 = synthesize(sk_false, spec_false, denominator=1, num_bound=1)
print(f"[5] synthesize (false instance): {out2.status} "
      f"tried={out2.candidates_tried} pruned={out2.pruned} ({time.time() - t0:.1f}s)")
print("    log:", out2.log)
assert out2.status == "none_in_space", out2

# ------------------------------------------- [6] zero-indeterminate degenerate
q_triv = Sigma2Instance(exists_vars=0, forall_vars=1, dnf=((1,), (-1,)))
assert brute_sigma2(q_triv) is True
sk_triv, spec_triv = gen_sigma2(q_triv)
assert not sk_triv.is_sketch()
out3 = synthesize(sk_triv, spec_triv, denominator=1, num_bound=1)
print(f"[6] synthesize (no indets, true): {out3.status}")
assert out3.status == "found" and out3.assignment is not None
assert out3.assignment.mapping() == {}

q_triv_f = Sigma2Instance(exists_vars=0, forall_vars=1, dnf=((1,),))
assert brute_sigma2(q_triv_f) is False
sk_tf, spec_tf = gen_sigma2(q_triv_f)
out4 = synthesize(sk_tf, spec_tf, denominator=1, num_bound=1)
print(f"[7] synthesize (no indets, false): {out4.status}")
assert out4.status == "none_in_space", out4

print("ALL SYNTH SMOKE OK")
