"""Seeded random instance families shared by the differential test suites.

Every generator takes a :class:`random.Random` (or a seed) so the suites are
reproducible run to run; sizes are kept small enough that the brute-force
oracles stay exact references.
"""

from __future__ import annotations

import random
from typing import Optional

from tamc.generators import Cnf3, Sigma2Instance
from tamc.model import ThresholdAutomaton, parse_ta


def random_ta(seed: int) -> ThresholdAutomaton:
    """Small random automaton: <= 5 locations, <= 8 rules, <= 2 shared
    variables, 1-2 parameters, integer guard coefficients."""
    rng = random.Random(seed)
    locs = [f"q{i}" for i in range(rng.randint(2, 5))]
    shared = [f"s{i}" for i in range(rng.randint(0, 2))]
    params = ["p", "r"][: rng.randint(1, 2)]
    resilience = ["p >= r"] if len(params) == 2 and rng.random() < 0.5 else []
    initial = sorted(rng.sample(locs, rng.randint(1, min(2, len(locs)))))

    def guard_atom(var: str) -> str:
        roll = rng.random()
        if roll < 0.45:
            return f"{var} >= {rng.randint(0, 3)}"
        if roll < 0.75:
            a0 = rng.randint(0, 1)
            coef = rng.randint(1, 2)
            term = f"{coef} * {rng.choice(params)}" if coef > 1 else rng.choice(params)
            return f"{var} >= {a0} + {term}" if a0 else f"{var} >= {term}"
        return f"{var} < {rng.randint(1, 3)}"

    rules = []
    for i in range(rng.randint(1, 8)):
        guard = [guard_atom(rng.choice(shared)) for _ in range(rng.randint(0, 2)) if shared]
        update = {v: 1 for v in shared if rng.random() < 0.4}
        rules.append({
            "id": f"t{i}",
            "from": rng.choice(locs),
            "to": rng.choice(locs),
            "guard": guard,
            "update": update,
        })
    return parse_ta({
        "name": f"rand{seed}",
        "parameters": params,
        "resilience": resilience,
        "system_size": "p",
        "locations": locs,
        "initial": initial,
        "shared": shared,
        "rules": rules,
    })


def random_query(ta: ThresholdAutomaton, seed: int) -> tuple[list[str], list[str]]:
    """A (zero, positive) location-set goal for the given automaton."""
    rng = random.Random(seed ^ 0x5EED)
    positive = [rng.choice(ta.locations)]
    zero: list[str] = []
    if len(ta.locations) > 1 and rng.random() < 0.3:
        other = rng.choice([loc for loc in ta.locations if loc not in positive])
        zero = [other]
    return zero, positive


def random_constant_rise_ta(seed: int) -> ThresholdAutomaton:
    """Random automaton in the saturation fragment: rise guards with constant
    thresholds <= 3 only, <= 6 locations, <= 10 rules, scaling-friendly
    environment (size = parameter, no resilience constraints)."""
    rng = random.Random(seed)
    locs = [f"q{i}" for i in range(rng.randint(2, 6))]
    shared = [f"s{i}" for i in range(rng.randint(0, 2))]
    initial = sorted(rng.sample(locs, rng.randint(1, min(2, len(locs)))))
    rules = []
    for i in range(rng.randint(1, 10)):
        guard = [
            f"{rng.choice(shared)} >= {rng.randint(1, 3)}"
            for _ in range(rng.randint(0, 2))
            if shared
        ]
        update = {v: 1 for v in shared if rng.random() < 0.4}
        rules.append({
            "id": f"t{i}",
            "from": rng.choice(locs),
            "to": rng.choice(locs),
            "guard": guard,
            "update": update,
        })
    return parse_ta({
        "name": f"crise{seed}",
        "parameters": ["k"],
        "resilience": [],
        "system_size": "k",
        "locations": locs,
        "initial": initial,
        "shared": shared,
        "rules": rules,
    })


def wave_cover(ta: ThresholdAutomaton) -> set[str]:
    """Independent coverability reference for the constant-rise fragment.

    Simulates one giant instance: stock every initial location with an
    exponential reserve of processes and sweep the rules, moving half of a
    populated source per firing (batch moves are sound here — rise guards
    over monotone counters stay true once true, and constant thresholds never
    depend on the move size).  Locations seen populated are coverable; with
    the reserve exceeding any threshold times the number of sweeps, the sweep
    reaches every coverable location.
    """
    thresholds = []
    for g in ta.guard_atoms():
        assert g.is_rise and g.rhs.is_constant()
        thresholds.append(int(g.rhs.const))
    need = max(thresholds, default=0) + 1
    sweeps = len(ta.rules) + len(ta.locations) + 2
    stock = need * (2 ** (sweeps + 2))

    kappa = {loc: (stock if loc in ta.initial else 0) for loc in ta.locations}
    shared = {v: 0 for v in ta.shared}
    seen = {loc for loc, count in kappa.items() if count}
    for _ in range(sweeps):
        moved = False
        for rule in ta.rules:
            src = kappa[rule.from_loc]
            if src < 1:
                continue
            if not all(
                shared[g.var] >= int(g.rhs.const) for g in rule.guard
            ):
                continue
            batch = max(1, src // 2)
            kappa[rule.from_loc] -= batch
            kappa[rule.to_loc] += batch
            for var, inc in rule.update_map.items():
                shared[var] += inc * batch
            seen.add(rule.to_loc)
            moved = True
        if not moved:
            break
    return seen


def random_cnf(seed: int) -> Cnf3:
    """Random 3-CNF: 1-4 variables, 1-5 clauses, 1-3 literals each."""
    rng = random.Random(seed)
    num_vars = rng.randint(1, 4)
    clauses = []
    for _ in range(rng.randint(1, 5)):
        width = rng.randint(1, 3)
        chosen = rng.sample(range(1, num_vars + 1), min(width, num_vars))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in chosen))
    return Cnf3(num_vars=num_vars, clauses=tuple(clauses))


def random_sigma2(seed: int, *, max_exists: int = 2) -> Sigma2Instance:
    """Random quantified DNF: <= 2 existential and <= 1 universal variables,
    1-2 conjuncts of 1-3 literals."""
    rng = random.Random(seed)
    m = rng.randint(0, max_exists)
    k = rng.randint(0 if m else 1, 1)
    total = m + k
    conjuncts = []
    for _ in range(rng.randint(1, 2)):
        width = rng.randint(1, min(3, total))
        chosen = rng.sample(range(1, total + 1), width)
        conjuncts.append(tuple(v if rng.random() < 0.5 else -v for v in chosen))
    return Sigma2Instance(exists_vars=m, forall_vars=k, dnf=tuple(conjuncts))
