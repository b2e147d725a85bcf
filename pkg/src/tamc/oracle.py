"""Brute-force ground truth: bounded explicit-state search.

Everything here works by running the concrete semantics — no solver, no
encoding — so its answers are used as the reference in differential tests.
Reachability search is breadth-first over schedules of bounded length;
lasso search enumerates reachable states and closes counter-returning loops,
evaluating the specification exactly on the resulting infinite word.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence, Union

from tamc import eltl
from tamc.model import ResourceLimit, TaError, ThresholdAutomaton
from tamc.semantics import Configuration, apply_rule, context, enables, is_initial, run


# Parameter bounds: name -> (lo, hi) inclusive, or a bare upper bound.
ParamBounds = Mapping[str, Union[int, tuple[int, int]]]


def _normalize_bounds(ta: ThresholdAutomaton, bounds: ParamBounds) -> list[tuple[int, int]]:
    out = []
    for p in ta.env.params:
        raw = bounds.get(p, 0)
        if isinstance(raw, int):
            out.append((0, raw))
        else:
            out.append((int(raw[0]), int(raw[1])))
    return out


def enumerate_param_valuations(ta: ThresholdAutomaton, bounds: ParamBounds) -> list[dict[str, int]]:
    """All admissible integer parameter valuations within the given ranges."""
    ranges = _normalize_bounds(ta, bounds)
    out = []
    for point in itertools.product(*(range(lo, hi + 1) for lo, hi in ranges)):
        valuation = dict(zip(ta.env.params, point))
        if ta.env.admits(valuation) and ta.env.size_ok(valuation):
            out.append(valuation)
    return out


def enumerate_initial_configs(
    ta: ThresholdAutomaton, params: Mapping[str, int]
) -> Iterator[Configuration]:
    """All distributions of N(params) processes over the initial locations."""
    total = ta.env.size(params)
    slots = len(ta.initial)
    pvec = tuple(int(params[p]) for p in ta.env.params)
    zeros = (0,) * len(ta.shared)
    loc_pos = [ta.loc_index[loc] for loc in ta.initial]

    def compositions(remaining: int, slots_left: int) -> Iterator[tuple[int, ...]]:
        if slots_left == 1:
            yield (remaining,)
            return
        for first in range(remaining + 1):
            for rest in compositions(remaining - first, slots_left - 1):
                yield (first,) + rest

    for split in compositions(total, slots):
        kappa = [0] * len(ta.locations)
        for pos, count in zip(loc_pos, split):
            kappa[pos] += count
        yield Configuration(tuple(kappa), zeros, pvec)


def _seed_configs(
    ta: ThresholdAutomaton,
    init: Union[Configuration, Iterable[Configuration], ParamBounds],
    *,
    config_cap: int = 100_000,
) -> list[Configuration]:
    if isinstance(init, Configuration):
        return [init]
    if isinstance(init, Mapping):
        seeds: list[Configuration] = []
        for valuation in enumerate_param_valuations(ta, init):
            for config in enumerate_initial_configs(ta, valuation):
                seeds.append(config)
                if len(seeds) > config_cap:
                    raise ResourceLimit(f"more than {config_cap} initial configurations")
        return seeds
    return sorted(set(init), key=lambda c: (c.params, c.kappa, c.shared))


def oracle_search(
    ta: ThresholdAutomaton,
    init: Union[Configuration, Iterable[Configuration], ParamBounds],
    goal: Callable[[Configuration], bool],
    L: int,
    *,
    state_cap: int = 100_000,
) -> Optional[tuple[Configuration, list[str]]]:
    """Breadth-first search for a goal configuration within ``L`` rule firings.

    Returns a shortest witness (ties broken by expansion order: initial
    configurations sorted, rules by id) as ``(σ0, schedule)``, or None.
    """
    seeds = _seed_configs(ta, init)
    rules = sorted(ta.rules, key=lambda r: r.id)
    parent: dict[Configuration, Optional[tuple[Configuration, str]]] = {}
    origin: dict[Configuration, Configuration] = {}
    frontier: list[Configuration] = []
    for seed in seeds:
        if seed in parent:
            continue
        parent[seed] = None
        origin[seed] = seed
        if goal(seed):
            return seed, []
        frontier.append(seed)

    for _ in range(L):
        next_frontier: list[Configuration] = []
        for config in frontier:
            for rule in rules:
                if not enables(ta, config, rule):
                    continue
                nxt = apply_rule(ta, config, rule)
                if nxt in parent:
                    continue
                parent[nxt] = (config, rule.id)
                origin[nxt] = origin[config]
                if len(parent) > state_cap:
                    raise ResourceLimit(f"visited more than {state_cap} states")
                if goal(nxt):
                    schedule: list[str] = []
                    cursor: Configuration = nxt
                    while parent[cursor] is not None:
                        prev, rid = parent[cursor]  # type: ignore[misc]
                        schedule.append(rid)
                        cursor = prev
                    schedule.reverse()
                    return origin[nxt], schedule
                next_frontier.append(nxt)
        frontier = next_frontier
        if not frontier:
            break
    return None


def goal_from_sets(
    ta: ThresholdAutomaton, zero: Sequence[str] = (), positive: Sequence[str] = ()
) -> Callable[[Configuration], bool]:
    """Goal predicate: listed locations empty / nonempty."""
    zero_idx = [ta.loc_index[loc] for loc in zero]
    pos_idx = [ta.loc_index[loc] for loc in positive]

    def goal(config: Configuration) -> bool:
        return all(config.kappa[i] == 0 for i in zero_idx) and all(
            config.kappa[i] >= 1 for i in pos_idx
        )

    return goal


def context_change_count(ta: ThresholdAutomaton, σ0: Configuration, schedule: Sequence[str]) -> int:
    """Number of steps along the run where the set of met thresholds changes."""
    changes = 0
    current = σ0
    ctx = context(ta, current)
    for rid in schedule:
        current = apply_rule(ta, current, rid)
        nxt = context(ta, current)
        if nxt != ctx:
            changes += 1
            ctx = nxt
    return changes


# ---------------------------------------------------------------------------
# Lasso search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleLasso:
    """A concrete infinite run witness: stem then endlessly repeatable loop."""

    sigma0: Configuration
    stem: tuple[str, ...]
    loop: tuple[str, ...]


def _loop_delta_ok(ta: ThresholdAutomaton, start: Configuration, loop: Sequence[str]) -> bool:
    """Can the loop repeat forever?

    The loop returns the location counters by construction.  Shared counters
    may grow by a fixed amount per iteration; that is harmless to rise guards
    (monotone) but would eventually disable a fall guard, so any variable
    incremented by the loop must not appear in a fall guard of a loop rule.
    """
    end = run(ta, start, loop)
    grown = {v for v, i in ta.shared_index.items() if end.shared[i] > start.shared[i]}
    if not grown:
        return True
    for rid in loop:
        for g in ta.rules_by_id[rid].guard:
            if g.is_fall and g.var in grown:
                return False
    return True


def _stabilization_iterations(
    ta: ThresholdAutomaton,
    formula: eltl.EF,
    loop_start_config: Configuration,
    delta: Sequence[int],
) -> int:
    """Loop iterations after which every specification guard atom is constant.

    Counter atoms repeat immediately (κ returns each iteration).  A threshold
    atom over a variable the loop increments flips at most once, after a
    computable number of iterations.
    """
    worst = 0
    pmap = loop_start_config.param_map(ta)
    for atom in eltl.collect_guard_atoms(formula):
        i = ta.shared_index[atom.var]
        if delta[i] == 0:
            continue
        threshold = atom.rhs.eval(pmap)
        value = loop_start_config.shared[i]
        if value >= threshold:
            continue  # already over the threshold; stays over
        need = threshold - value
        iterations = int(need // delta[i]) + 1
        worst = max(worst, iterations)
    return worst


def check_lasso(
    ta: ThresholdAutomaton, formula: eltl.EF, lasso: OracleLasso
) -> bool:
    """Exactly decide whether the lasso's infinite run satisfies the formula.

    Replays the stem, then unrolls the loop until every guard atom of the
    formula has stabilized, and evaluates on the resulting ultimately
    periodic word.
    """
    stem_configs = [lasso.sigma0]
    for rid in lasso.stem:
        stem_configs.append(apply_rule(ta, stem_configs[-1], rid))
    loop_start = stem_configs[-1]
    after_once = run(ta, loop_start, lasso.loop)
    if after_once.kappa != loop_start.kappa:
        raise TaError("loop does not return the location counters")
    delta = [b - a for a, b in zip(loop_start.shared, after_once.shared)]
    unroll = _stabilization_iterations(ta, formula, loop_start, delta)

    configs = stem_configs[:]
    current = loop_start
    for _ in range(unroll):
        for rid in lasso.loop:
            current = apply_rule(ta, current, rid)
            configs.append(current)
    # The stable loop: one more iteration, minus the final repeated state.
    loop_positions_start = len(configs)
    for rid in lasso.loop[:-1]:
        current = apply_rule(ta, current, rid)
        configs.append(current)
    # configs[loop_positions_start - 1] is the loop-start state of the stable
    # iteration; positions from there repeat with period len(loop).
    return eltl.eval_lasso(ta, formula, configs, loop_positions_start - 1)


def oracle_lasso_search(
    ta: ThresholdAutomaton,
    formula: eltl.EF,
    bounds: ParamBounds,
    *,
    stem_len: int = 6,
    loop_len: int = 4,
    state_cap: int = 200_000,
) -> Optional[OracleLasso]:
    """Find a concrete lasso run satisfying the formula, within bounds.

    Sound but bounded: every returned lasso is a genuine infinite run
    (validated by replay and the fall-guard growth check) satisfying the
    formula exactly; returning None only means nothing was found at these
    bounds.  Stems are explored breadth-first with visited-state
    deduplication; from every reachable state, loops of bounded length that
    return the location counters are closed and checked.
    """
    rules = sorted(ta.rules, key=lambda r: r.id)
    visited_total = 0
    for valuation in enumerate_param_valuations(ta, bounds):
        parent: dict[Configuration, Optional[tuple[Configuration, str]]] = {}
        origin: dict[Configuration, Configuration] = {}
        frontier: list[Configuration] = []
        for seed in enumerate_initial_configs(ta, valuation):
            if seed in parent:
                continue
            parent[seed] = None
            origin[seed] = seed
            frontier.append(seed)
        layers = [list(frontier)]
        for _ in range(stem_len):
            nxt_frontier: list[Configuration] = []
            for config in frontier:
                for rule in rules:
                    if not enables(ta, config, rule):
                        continue
                    nxt = apply_rule(ta, config, rule)
                    if nxt in parent:
                        continue
                    parent[nxt] = (config, rule.id)
                    origin[nxt] = origin[config]
                    nxt_frontier.append(nxt)
            visited_total += len(nxt_frontier)
            if visited_total > state_cap:
                raise ResourceLimit(f"visited more than {state_cap} states")
            frontier = nxt_frontier
            layers.append(list(frontier))
            if not frontier:
                break

        def stem_of(config: Configuration) -> list[str]:
            schedule: list[str] = []
            cursor = config
            while parent[cursor] is not None:
                prev, rid = parent[cursor]  # type: ignore[misc]
                schedule.append(rid)
                cursor = prev
            schedule.reverse()
            return schedule

        for layer in layers:
            for config in layer:
                for loop in _find_loops(ta, config, rules, loop_len):
                    if not _loop_delta_ok(ta, config, loop):
                        continue
                    lasso = OracleLasso(origin[config], tuple(stem_of(config)), tuple(loop))
                    if check_lasso(ta, formula, lasso):
                        return lasso
    return None


def _find_loops(
    ta: ThresholdAutomaton,
    start: Configuration,
    rules: Sequence,
    max_len: int,
) -> Iterator[list[str]]:
    """Depth-first enumeration of nonempty schedules returning κ to start."""

    def rec(config: Configuration, path: list[str]) -> Iterator[list[str]]:
        if path and config.kappa == start.kappa:
            yield list(path)
        if len(path) >= max_len:
            return
        for rule in rules:
            if enables(ta, config, rule):
                path.append(rule.id)
                yield from rec(apply_rule(ta, config, rule), path)
                path.pop()

    yield from rec(start, [])


# ---------------------------------------------------------------------------
# Witness trace serialization
# ---------------------------------------------------------------------------


def trace_to_json(
    ta: ThresholdAutomaton, sigma0: Configuration, schedule: Sequence[str]
) -> dict:
    """Replayable witness document: params, initial counters, schedule, states."""
    states = [sigma0]
    for rid in schedule:
        states.append(apply_rule(ta, states[-1], rid))
    return {
        "params": sigma0.param_map(ta),
        "init": {**sigma0.kappa_map(ta), **sigma0.shared_map(ta)},
        "schedule": list(schedule),
        "states": [
            {**s.kappa_map(ta), **s.shared_map(ta)} for s in states
        ],
    }


def replay_trace(ta: ThresholdAutomaton, doc: Mapping) -> Configuration:
    """Re-run a serialized witness; raises on any mismatch with its states."""
    params = {p: int(doc["params"][p]) for p in ta.env.params}
    init = doc["init"]
    sigma0 = Configuration.make(
        ta,
        {loc: int(init.get(loc, 0)) for loc in ta.locations},
        {v: int(init.get(v, 0)) for v in ta.shared},
        params,
    )
    states = doc.get("states")
    current = sigma0
    for i, rid in enumerate(doc["schedule"]):
        current = apply_rule(ta, current, rid)
        if states is not None:
            expected = states[i + 1]
            for loc in ta.locations:
                if current.kappa[ta.loc_index[loc]] != int(expected.get(loc, 0)):
                    raise TaError(f"state {i + 1} diverges at location {loc}")
            for v in ta.shared:
                if current.shared[ta.shared_index[v]] != int(expected.get(v, 0)):
                    raise TaError(f"state {i + 1} diverges at shared variable {v}")
    return current
