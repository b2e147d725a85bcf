"""Coverability queries.

Two engines back `cover`:

* `cover_fixpoint` — a polynomial saturation that applies when every guard is
  a rise guard with a constant threshold and the environment scales.  Under
  scaling, an unlocked rule can be fired as often as needed from a large
  enough initial configuration, so coverability degenerates to a joint
  fixed point over reachable locations and fireable rules.
* `solve_reach` — the general constraint encoding, used whenever the
  saturation's preconditions fail, a concrete initial configuration is given,
  or a firing bound must be honoured.  This path also produces a replayable
  witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Optional

from tamc.model import (
    Guard,
    TaError,
    TaSemanticError,
    ThresholdAutomaton,
    check_multiplicative,
    normalize_guard,
)
from tamc.reach import ReachWitness, solve_reach
from tamc.semantics import Configuration
from tamc.smt import Solver


class NotConstantRise(TaError):
    """A guard is not of the shape ``shared >= constant``."""


def _constant_threshold(guard: Guard) -> int:
    """The integer threshold of a constant rise guard.

    Raises NotConstantRise for fall guards, parameterized thresholds, or
    indeterminate coefficients.  The returned value is the least integer the
    shared variable must reach, so ``<= 0`` means the conjunct is vacuous.
    """
    if guard.indeterminates():
        raise NotConstantRise(f"guard {guard.var} has indeterminate coefficients")
    if guard.is_fall:
        raise NotConstantRise(f"fall guard on {guard.var} is not a constant rise guard")
    if not guard.rhs.is_constant():
        raise NotConstantRise(f"guard on {guard.var} has a parameterized threshold")
    ng = normalize_guard(guard)
    const = ng.rhs.const
    assert isinstance(const, Fraction)
    return ceil(const / ng.scale)


@dataclass(frozen=True)
class SaturationState:
    locations: frozenset[str]
    rules: frozenset[str]


def cover_fixpoint(
    ta: ThresholdAutomaton,
    *,
    assume_multiplicative: bool = False,
) -> tuple[set[str], set[str]]:
    """Saturate (coverable locations, fireable rules) for constant-rise TAs.

    Starting from the initial locations, a rule joins once its source is
    known coverable and every guard conjunct with a positive threshold has
    some already-joined rule incrementing its variable; its target location
    joins with it.  The result is exact for scalable environments because a
    joined rule can be fired arbitrarily often from a large enough initial
    configuration.
    """
    thresholds: dict[str, list[tuple[str, int]]] = {}
    for rule in ta.rules:
        conjuncts = []
        for g in rule.guard:
            c = _constant_threshold(g)
            if c > 0:
                conjuncts.append((g.var, c))
        thresholds[rule.id] = conjuncts

    if not assume_multiplicative:
        verdict = check_multiplicative(ta)
        if verdict.kind == "no":
            raise TaSemanticError(
                f"environment does not scale ({verdict.reason}); saturation would be unsound"
            )

    incrementers: dict[str, set[str]] = {var: set() for var in ta.shared}
    for rule in ta.rules:
        for var, amount in rule.update_map.items():
            if amount > 0:
                incrementers[var].add(rule.id)

    x_locations: set[str] = set(ta.initial)
    x_rules: set[str] = set()
    ordered = sorted(ta.rules, key=lambda r: r.id)
    changed = True
    while changed:
        changed = False
        for rule in ordered:
            if rule.id in x_rules or rule.from_loc not in x_locations:
                continue
            if all(
                incrementers[var] & x_rules
                for var, _ in thresholds[rule.id]
            ):
                x_rules.add(rule.id)
                if rule.to_loc not in x_locations:
                    x_locations.add(rule.to_loc)
                changed = True
    return x_locations, x_rules


@dataclass(frozen=True)
class CoverResult:
    status: str  # 'coverable' | 'uncoverable' | 'unknown'
    witness: Optional[ReachWitness]
    method: str  # 'fixpoint' | 'reach'
    seconds: float

    @property
    def is_coverable(self) -> bool:
        return self.status == "coverable"


def cover(
    ta: ThresholdAutomaton,
    location: str,
    *,
    init: Optional[Configuration] = None,
    bound: Optional[int] = None,
    solver: Optional[Solver] = None,
    method: str = "auto",
    assume_multiplicative: bool = False,
) -> CoverResult:
    """Can some reachable configuration populate ``location``?

    Parameterized when ``init`` is None (the initial configuration ranges over
    all admissible ones).  The saturation engine handles the parameterized
    constant-rise case; anything else goes through the reachability encoding,
    which also yields a replayable witness.  ``method`` forces an engine for
    differential testing.
    """
    if location not in ta.loc_index:
        raise TaSemanticError(f"unknown location {location!r}")
    if method not in ("auto", "fixpoint", "reach"):
        raise ValueError(f"unknown method {method!r}")

    if method in ("auto", "fixpoint"):
        applicable = init is None and bound is None and ta.has_only_constant_rise_guards()
        if method == "fixpoint" and not applicable:
            raise TaSemanticError("saturation requires parameterized mode, no bound, and constant rise guards")
        if applicable:
            try:
                x_locations, _ = cover_fixpoint(ta, assume_multiplicative=assume_multiplicative)
            except (NotConstantRise, TaSemanticError):
                if method == "fixpoint":
                    raise
            else:
                status = "coverable" if location in x_locations else "uncoverable"
                return CoverResult(status, None, "fixpoint", 0.0)
        if method == "fixpoint":
            raise TaSemanticError("saturation not applicable")

    result = solve_reach(
        ta,
        init,
        positive=[location],
        bound=bound,
        solver=solver,
    )
    status = {
        "sat": "coverable",
        "unsat": "uncoverable",
        "unknown": "unknown",
    }[result.status]
    return CoverResult(status, result.witness, "reach", result.seconds)
