"""Parameterized reachability: ask about *all* system sizes at once.

Instead of fixing n, t, f, the query ranges over every admissible valuation
and every initial placement of the processes.  The engine compiles the
question into a linear-integer formula over steady schedule segments (one
per threshold context) and asks an SMT solver; a Sat answer is decoded into
concrete parameters plus a schedule, realized, and replayed step by step
before being reported.
"""

from __future__ import annotations

from importlib import resources

from tamc import parse_ta, replay_witness, solve_reach

ta = parse_ta(resources.files("tamc.benchmarks").joinpath("strb.ta.json").read_text())

# Can the system reach a state where someone accepted (l3 nonempty) while
# nobody is stuck in l0?  Parameterized: no fixed n, t, f.
result = solve_reach(ta, None, zero=["l0"], positive=["l3"])
print("verdict:", result.status)
assert result.witness is not None
w = result.witness

print("parameters found:", w.params_map())
print("schedule:", " ".join(w.schedule))
print("rule totals:", w.sums_map())

final = replay_witness(ta, w)
print("replayed final kappa:", {k: v for k, v in final.kappa_map(ta).items() if v})

# The same query under a tiny firing budget is unsatisfiable: populating l3
# needs at least an echo and an accept.
tight = solve_reach(ta, None, zero=["l0"], positive=["l3"], bound=1)
print("with bound 1:", tight.status)
