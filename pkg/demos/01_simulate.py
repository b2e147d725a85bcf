"""Step through a threshold automaton by hand.

The bundled `strb` automaton models a core broadcast loop: correct processes
start in l0 (no message) or l1 (message received), echo into a shared counter
x, and accept (l3) once enough echoes accumulate.  Thresholds compare x
against expressions in the environment parameters n (processes), t (tolerated
faults), f (actual faults).
"""

from __future__ import annotations

from importlib import resources

from tamc import Configuration, apply_rule, context, enables, parse_ta

source = resources.files("tamc.benchmarks").joinpath("strb.ta.json").read_text()
ta = parse_ta(source)

print(f"{ta.name}: {len(ta.locations)} locations, {len(ta.rules)} rules")
print("locations:", ", ".join(ta.locations))
print("rules:")
for rule in ta.rules:
    guard = " and ".join(str(g) for g in rule.guard) or "true"
    print(f"  {rule.id}: {rule.from_loc} -> {rule.to_loc}  when {guard}  {rule.update_map or ''}")

def show(config) -> str:
    kappa = {k: v for k, v in config.kappa_map(ta).items() if v}
    shared = config.shared_map(ta)
    return f"kappa={kappa} shared={shared}"


# n=4 processes, one faulty (its messages are modeled by the guards' -f slack),
# three correct ones that all start with the message received.
sigma = Configuration.make(ta, {"l1": 3}, {}, {"n": 4, "t": 1, "f": 1})


def met(config) -> str:
    return "{" + ", ".join(sorted(str(g) for g in context(ta, config))) + "}"


print("\ninitial:", show(sigma))
print("met thresholds:", met(sigma))

for rid in ["r1", "r1", "r3"]:
    rule = ta.rules_by_id[rid]
    assert enables(ta, sigma, rule), f"{rid} should be enabled here"
    sigma = apply_rule(ta, sigma, rule)
    print(f"after {rid}:", show(sigma), "| met:", met(sigma))

print("\nl3 is populated — the echo threshold n-t-f was crossed by two sends.")
