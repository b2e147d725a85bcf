"""Temporal verification via lasso witnesses.

The specification file describes the *violation*: a Holds verdict means no
infinite fair run matches it.  The bundled property says "processes start
only in l0/l1, l3 stays empty forever, and fairness: everyone eventually
drains out of l0/l1/l2 once the relevant thresholds are met".  On `strb`
(resilience n > 3t, t >= f) it holds: with l3 permanently empty the fairness
obligations force all correct processes through l2, whose exit threshold
must then fire.  Dropping t >= f from the resilience condition (`strb_weak`)
breaks the argument — with more faults than tolerated the premises of the
fairness obligations can stay false forever — and the checker produces a
concrete infinite run showing it.
"""

from __future__ import annotations

from importlib import resources

from tamc import check_spec, parse_ta

bench = resources.files("tamc.benchmarks")
spec = bench.joinpath("strb_unforg.eltl").read_text()

strb = parse_ta(bench.joinpath("strb.ta.json").read_text())
res = check_spec(strb, spec)
print(f"strb      : {res.status}  ({res.orderings_tried} milestone orderings tried)")

weak = parse_ta(bench.joinpath("strb_weak.ta.json").read_text())
res = check_spec(weak, spec)
print(f"strb_weak : {res.status}")
assert res.witness is not None
w = res.witness

print("\ncounterexample lasso (reported at a doubled valuation so every")
print("schedule segment realizes as two identical halves):")
print("  parameters:", w.params_map())
print("  stem:", " ".join(w.stem) or "(empty)")
print("  loop:", " ".join(w.loop))
kappa = {k: v for k, v in w.milestones[w.c].kappa_map(weak).items() if v}
print("  loop entry kappa:", kappa)
print("\nThe loop only stutters in l2: with f > t the echo threshold is never")
print("reached, so the fairness premises stay false and nothing forces l2 to drain.")
