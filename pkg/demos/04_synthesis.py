"""Guard synthesis: fill numeric coefficients into a sketch automaton.

A sketch leaves coefficients v1, v2, ... in its guards unspecified.  The
synthesizer enumerates a finite *sane* candidate space (thresholds that can
neither be trivially true nor trivially false under the resilience
condition), model-checks each instantiation, and reuses counterexamples to
discard later candidates without calling the solver.

The input here is compiled from a quantified formula: exists x1 forall y1 .
(x1 & y1) | (x1 & !y1).  The existential choice becomes the coefficient v1;
the formula is true (pick x1 = true), so synthesis must find v1 = 1.
"""

from __future__ import annotations

from importlib import resources

from tamc import sane_space, synthesize
from tamc.generators import brute_sigma2, gen_sigma2, parse_qdimacs_lite

bench = resources.files("tamc.benchmarks")
q = parse_qdimacs_lite(bench.joinpath("sigma2_true.qdimacs").read_text())
print("quantified formula true?", brute_sigma2(q))

sketch, spec = gen_sigma2(q)
print("sketch:", len(sketch.locations), "locations,", len(sketch.rules), "rules,",
      "indeterminates:", ", ".join(sketch.indeterminates))
print("specification:", spec)

space = sane_space(sketch, 1, num_bound=1)
print("sane candidate space:", space.ranges, "->", space.size, "candidates")

result = synthesize(sketch, spec, denominator=1, num_bound=1)
print("verdict:", result.status)
print("assignment:", result.assignment)
print("log:")
for candidate, outcome in result.log:
    print(f"  {candidate}: {outcome}")
