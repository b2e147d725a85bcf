"""Concrete counter-system semantics of a threshold automaton.

A configuration counts processes per location and records the shared-counter
values and the (fixed) parameter valuation.  Rules move one process along an
edge when every guard atom holds, incrementing shared counters; shared
counters never decrease, so the set of met thresholds only grows along a run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from tamc.model import Guard, Rule, TaError, TaSemanticError, ThresholdAutomaton


class NotEnabled(TaError):
    """Raised when a rule is applied in a configuration that disables it."""


@dataclass(frozen=True)
class Configuration:
    """An immutable configuration: location counters, shared values, parameters."""

    kappa: tuple[int, ...]
    shared: tuple[int, ...]
    params: tuple[int, ...]

    @staticmethod
    def make(
        ta: ThresholdAutomaton,
        kappa: Mapping[str, int],
        shared: Mapping[str, int] | None = None,
        params: Mapping[str, int] | None = None,
        *,
        check: bool = True,
    ) -> "Configuration":
        kvec = tuple(int(kappa.get(loc, 0)) for loc in ta.locations)
        svec = tuple(int((shared or {}).get(v, 0)) for v in ta.shared)
        pvec = tuple(int((params or {}).get(p, 0)) for p in ta.env.params)
        config = Configuration(kvec, svec, pvec)
        if check:
            validate(ta, config)
        return config

    def kappa_map(self, ta: ThresholdAutomaton) -> dict[str, int]:
        return dict(zip(ta.locations, self.kappa))

    def shared_map(self, ta: ThresholdAutomaton) -> dict[str, int]:
        return dict(zip(ta.shared, self.shared))

    def param_map(self, ta: ThresholdAutomaton) -> dict[str, int]:
        return dict(zip(ta.env.params, self.params))


def validate(ta: ThresholdAutomaton, config: Configuration) -> None:
    """Check counter shapes, nonnegativity, resilience, and total size."""
    if len(config.kappa) != len(ta.locations):
        raise TaSemanticError("location counter vector has the wrong length")
    if len(config.shared) != len(ta.shared):
        raise TaSemanticError("shared counter vector has the wrong length")
    if len(config.params) != len(ta.env.params):
        raise TaSemanticError("parameter vector has the wrong length")
    if any(v < 0 for v in config.kappa) or any(v < 0 for v in config.shared):
        raise TaSemanticError("counters must be nonnegative")
    pmap = config.param_map(ta)
    if not ta.env.admits(pmap):
        raise TaSemanticError(f"parameters {pmap} violate the resilience condition")
    total = ta.env.size(pmap)
    if sum(config.kappa) != total:
        raise TaSemanticError(
            f"location counters sum to {sum(config.kappa)}, expected system size {total}"
        )


def is_initial(ta: ThresholdAutomaton, config: Configuration) -> bool:
    """All processes in initial locations and all shared counters at zero."""
    initial = set(ta.initial)
    for loc, count in zip(ta.locations, config.kappa):
        if count > 0 and loc not in initial:
            return False
    return all(v == 0 for v in config.shared)


def enables(ta: ThresholdAutomaton, config: Configuration, rule: Rule) -> bool:
    """Is the rule applicable: populated source and all guard atoms true?"""
    if config.kappa[ta.loc_index[rule.from_loc]] < 1:
        return False
    smap = config.shared_map(ta)
    pmap = config.param_map(ta)
    return all(g.eval(smap, pmap) for g in rule.guard)


def apply_rule(ta: ThresholdAutomaton, config: Configuration, rule: Union[Rule, str]) -> Configuration:
    """Fire the rule once; raises :class:`NotEnabled` if it cannot fire."""
    if isinstance(rule, str):
        try:
            rule = ta.rules_by_id[rule]
        except KeyError:
            raise TaSemanticError(f"unknown rule id '{rule}'") from None
    if not enables(ta, config, rule):
        raise NotEnabled(f"rule '{rule.id}' is not enabled")
    li = ta.loc_index
    kappa = list(config.kappa)
    kappa[li[rule.from_loc]] -= 1
    kappa[li[rule.to_loc]] += 1
    shared = list(config.shared)
    si = ta.shared_index
    for var, amount in rule.update:
        shared[si[var]] += amount
    return Configuration(tuple(kappa), tuple(shared), config.params)


def run(
    ta: ThresholdAutomaton,
    config: Configuration,
    schedule: Iterable[Union[Rule, str]],
) -> Configuration:
    """Apply a schedule of rules in order, returning the final configuration."""
    current = config
    for i, rule in enumerate(schedule):
        try:
            current = apply_rule(ta, current, rule)
        except NotEnabled as exc:
            raise NotEnabled(f"step {i}: {exc}") from None
    return current


def trace(
    ta: ThresholdAutomaton,
    config: Configuration,
    schedule: Iterable[Union[Rule, str]],
) -> list[Configuration]:
    """All configurations visited, starting with ``config`` itself."""
    out = [config]
    for rule in schedule:
        out.append(apply_rule(ta, out[-1], rule))
    return out


def context(ta: ThresholdAutomaton, config: Configuration) -> frozenset[Guard]:
    """The set of guard atoms whose threshold is met.

    A rise atom belongs to the context when it holds; a fall atom belongs to
    it when its comparison has flipped (the shared value reached the
    threshold).  Because shared counters only grow, this set is monotonically
    nondecreasing along every run.
    """
    smap = config.shared_map(ta)
    pmap = config.param_map(ta)
    met = set()
    for g in ta.guard_atoms():
        holds = g.eval(smap, pmap)
        if (g.is_rise and holds) or (g.is_fall and not holds):
            met.add(g)
    return frozenset(met)


def lift(config: Configuration, factor: int) -> Configuration:
    """Scale every counter and parameter by a positive integer factor."""
    if factor < 1:
        raise TaSemanticError("lift factor must be a positive integer")
    return Configuration(
        tuple(factor * v for v in config.kappa),
        tuple(factor * v for v in config.shared),
        tuple(factor * v for v in config.params),
    )
