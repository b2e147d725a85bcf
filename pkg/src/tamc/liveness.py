"""Deciding temporal specifications by constraint-encoded lasso search.

A violating run of an F/G/∧ specification, if one exists, can be taken to be
a *lasso*: a finite stem followed by a finite loop whose location counters
return to their loop-start values.  The search space of lassos is organized
by an ordering skeleton derived from the formula's normal form: each
eventuality must be *met* at some milestone configuration, eventualities
demanded forever (under G) must be met inside the loop, and every global
constraint applies from its activation point onward.  For one topological
ordering of the skeleton the existence question becomes a conjunction of
reachability chains between milestone configurations — one chain per
ordering segment — strengthened so that the required propositions hold on
every configuration of the chain, not only at its milestones:

* zero-sets: the endpoint counters of every steady block vanish on the set
  and no rule targeting the set fires anywhere in the chain;
* nonzero-sets: every steady block keeps some listed location populated at
  both endpoints;
* guard-gated propositions: per steady block, if the premise holds at the
  block's start (the premise's threshold atoms are constant across a block
  because they are part of the atom set) the conclusion's constraints hold
  block-locally.

Endpoint constraints do not control a block's interior, where a scheduled
permutation may transiently empty a nonzero-set.  Doubling fixes this: the
witness is reported at twice the model's parameter valuation, each steady
block's schedule fired twice from the doubled block start, and each
separating step fired twice.  During the first pass one half of the
processes moves while the other half sits at the block start; during the
second pass the roles swap, so every intermediate counter vector is a sum of
two constrained ones.  Scaling environments (`check_multiplicative`) keep
admissibility and guard truth intact under the doubling.

A loop found this way repeats forever: rise guards only become truer as the
shared counters grow, and a dedicated exclusion constraint forbids the loop
from both growing a variable and firing rules that need it small.  Every
Violated verdict is certified by `replay_lasso`, which re-runs the schedule
through the concrete semantics, checks every proposition on every
configuration, replays the loop twice, and finally evaluates the formula
exactly on the stabilized infinite word.

Known certification limits, flagged by `CertificateInvalid` rather than
silently misreported: a guard-gated proposition whose premise uses
fractional coefficients can change truth value under doubling, and a step
rule that increments a variable its own fall guard watches may not fire
twice in a row.  Neither shape occurs in the bundled benchmarks.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from tamc.eltl import (
    EF,
    GF,
    PF,
    CutGraph,
    CutNode,
    collect_guard_atoms,
    cut_graph,
    eval_prop,
    parse_eltl,
    to_normal_form,
    topo_orders,
)
from tamc.model import (
    TaError,
    TaSemanticError,
    ThresholdAutomaton,
    check_multiplicative,
)
from tamc.oracle import OracleLasso, _loop_delta_ok, check_lasso
from tamc.reach import (
    ReachChain,
    ReachEncoder,
    SymbolicConfig,
    decode_chain,
    decode_config,
    realize_steady,
)
from tamc.semantics import Configuration, apply_rule, is_initial, validate
from tamc.smt import And, Formula, Implies, Lin, Or, Solver, eq, ge


class CertificateInvalid(TaError):
    """A Violated verdict failed its concrete replay; indicates a bug or a
    documented certification limit, never a property of the input run."""


class UnsupportedShape(TaError):
    """A proposition outside the supported zero/nonzero/gated fragment."""


# ---------------------------------------------------------------------------
# Proposition encodings
# ---------------------------------------------------------------------------


def _gf_formula(enc: ReachEncoder, cfg: SymbolicConfig, gf: GF) -> Formula:
    if gf.op == "atom":
        assert gf.atom is not None
        return enc.guard_holds(cfg, gf.atom)
    parts = [_gf_formula(enc, cfg, a) for a in gf.args]
    return And(parts) if gf.op == "and" else Or(parts)


def _cf_at(enc: ReachEncoder, cfg: SymbolicConfig, pf: PF) -> list[Formula]:
    out: list[Formula] = []
    for loc in sorted(pf.conclusion.zero):
        out.append(eq(enc.kappa_lin(cfg, loc), 0))
    for group in pf.conclusion.nonzero:
        out.append(Or([ge(enc.kappa_lin(cfg, loc), 1) for loc in sorted(group)]))
    return out


def pf_at(enc: ReachEncoder, cfg: SymbolicConfig, pf: PF) -> Formula:
    """The proposition evaluated on a single symbolic configuration."""
    if not isinstance(pf, PF):
        raise UnsupportedShape(f"not a state proposition: {pf!r}")
    body = And(_cf_at(enc, cfg, pf))
    if pf.premise is None:
        return body
    return Implies(_gf_formula(enc, cfg, pf.premise), body)


def strengthen_chain(
    enc: ReachEncoder, chain: ReachChain, props: Sequence[PF]
) -> list[Formula]:
    """Constraints making every chain configuration satisfy the propositions.

    Ungated propositions constrain all block endpoints plus, for zero-sets,
    the chain-wide totals of rules entering the set (so the set stays empty
    between endpoints too).  Gated propositions are applied per steady block,
    conditionally on the premise at the block start, with the rule-total
    zeroing made block-local since the premise need not hold chain-wide.
    """
    rules = enc.ta.rules
    parts: list[Formula] = []
    for pf in props:
        if not isinstance(pf, PF):
            raise UnsupportedShape(f"not a state proposition: {pf!r}")
        entering = [ri for ri, r in enumerate(rules) if r.to_loc in pf.conclusion.zero]
        if pf.premise is None:
            for piece in chain.blocks:
                for cfg in (piece.start, piece.end):
                    parts.extend(_cf_at(enc, cfg, pf))
            for ri in entering:
                parts.append(eq(Lin.var(chain.sums[ri]), 0))
        else:
            for piece in chain.blocks:
                body: list[Formula] = []
                for cfg in (piece.start, piece.end):
                    body.extend(_cf_at(enc, cfg, pf))
                for ri in entering:
                    body.append(eq(Lin.var(piece.counts.x[ri]), 0))
                parts.append(Implies(_gf_formula(enc, piece.start, pf.premise), And(body)))
    return parts


def phi_prop(
    enc: ReachEncoder,
    props: Union[PF, Sequence[PF]],
    prefix: str = "p",
    *,
    start: Optional[SymbolicConfig] = None,
    end: Optional[SymbolicConfig] = None,
) -> tuple[ReachChain, Formula]:
    """A reachability chain whose every configuration satisfies the
    propositions, as (chain, formula)."""
    seq = [props] if isinstance(props, PF) else list(props)
    chain = enc.build_reach(f"{prefix}_", start=start, end=end)
    extra = strengthen_chain(enc, chain, seq)
    return chain, And(list(chain.parts) + extra)


# ---------------------------------------------------------------------------
# Witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LassoWitness:
    """A concrete violating lasso, reported at the doubled valuation.

    ``milestones[j]`` is where the ordering's j-th obligation is met;
    ``segment_schedules[j]`` runs from milestone j to milestone j+1.  The
    loop spans milestones ``c .. len(milestones)-1`` and returns the location
    counters to those of milestone ``c``.
    """

    params: tuple[tuple[str, int], ...]
    ordering: tuple[str, ...]
    milestones: tuple[Configuration, ...]
    segment_counts: tuple[tuple[tuple[str, int], ...], ...]
    segment_schedules: tuple[tuple[str, ...], ...]
    c: int
    formula: EF
    milestone_props: tuple[tuple[PF, ...], ...]
    segment_props: tuple[tuple[PF, ...], ...]

    @property
    def stem(self) -> tuple[str, ...]:
        return tuple(r for sched in self.segment_schedules[: self.c] for r in sched)

    @property
    def loop(self) -> tuple[str, ...]:
        return tuple(r for sched in self.segment_schedules[self.c :] for r in sched)

    @property
    def initial(self) -> Configuration:
        return self.milestones[0]

    def params_map(self) -> dict[str, int]:
        return dict(self.params)

    def to_json(self, ta: ThresholdAutomaton) -> dict:
        def cfg(c: Configuration) -> dict:
            return {
                "kappa": {loc: v for loc, v in zip(ta.locations, c.kappa) if v},
                "shared": {var: v for var, v in zip(ta.shared, c.shared) if v},
            }

        return {
            "params": self.params_map(),
            "spec": self.formula.render(),
            "ordering": list(self.ordering),
            "loop_start_index": self.c,
            "milestones": [cfg(m) for m in self.milestones],
            "milestone_props": [[p.render() for p in props] for props in self.milestone_props],
            "segments": [
                {
                    "counts": dict(self.segment_counts[j]),
                    "schedule": list(self.segment_schedules[j]),
                    "props": [p.render() for p in self.segment_props[j]],
                }
                for j in range(len(self.segment_schedules))
            ],
            "stem": list(self.stem),
            "loop": list(self.loop),
        }


@dataclass(frozen=True)
class MCResult:
    status: str  # 'holds' | 'violated' | 'unknown'
    witness: Optional[LassoWitness]
    orderings_tried: int
    seconds: float

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    @property
    def violated(self) -> bool:
        return self.status == "violated"


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------


def _double(ta: ThresholdAutomaton, config: Configuration) -> Configuration:
    doubled = Configuration(
        kappa=tuple(2 * v for v in config.kappa),
        shared=tuple(2 * v for v in config.shared),
        params=tuple(2 * v for v in config.params),
    )
    try:
        validate(ta, doubled)
    except TaError as exc:
        raise CertificateInvalid(
            f"doubled configuration is not admissible ({exc}); the environment does not scale"
        ) from exc
    return doubled


def replay_lasso(ta: ThresholdAutomaton, witness: LassoWitness) -> bool:
    """Certify a witness against the concrete semantics.

    Replays every segment checking its propositions on every configuration,
    verifies the milestones and their propositions, replays the loop twice
    more to confirm counter return and enabledness, re-checks the loop's
    growth/fall-guard compatibility, and finally evaluates the formula
    exactly on the stabilized infinite word.  Raises CertificateInvalid on
    the first discrepancy; returns True otherwise.
    """

    def fail(message: str) -> None:
        raise CertificateInvalid(message)

    n_segments = len(witness.segment_schedules)
    if len(witness.milestones) != n_segments + 1:
        fail("milestone/segment count mismatch")
    if not 0 <= witness.c < n_segments + 1 - 1:
        fail(f"loop boundary {witness.c} out of range")
    if not is_initial(ta, witness.initial):
        fail("first milestone is not an initial configuration")

    for j, sched in enumerate(witness.segment_schedules):
        if Counter(sched) != Counter(dict(witness.segment_counts[j])):
            fail(f"segment {j} schedule disagrees with its counts")
        current = witness.milestones[j]
        configs = [current]
        try:
            for rid in sched:
                current = apply_rule(ta, current, rid)
                configs.append(current)
        except TaError as exc:
            fail(f"segment {j} schedule is not firable: {exc}")
        if current != witness.milestones[j + 1]:
            fail(f"segment {j} does not end at milestone {j + 1}")
        for pf in witness.segment_props[j]:
            for config in configs:
                if not eval_prop(ta, config, pf):
                    fail(f"segment {j} violates {pf.render()}")

    last = len(witness.milestones) - 1
    for j, props in enumerate(witness.milestone_props):
        if j in (witness.c, last):
            continue
        for pf in props:
            if not eval_prop(ta, witness.milestones[j], pf):
                fail(f"milestone {j} violates {pf.render()}")

    loop = witness.loop
    if not loop:
        fail("empty loop")
    loop_start = witness.milestones[witness.c]
    loop_end = witness.milestones[last]
    if loop_start.kappa != loop_end.kappa:
        fail("loop does not return the location counters")
    if not _loop_delta_ok(ta, loop_start, loop):
        fail("loop grows a variable watched by one of its own fall guards")

    # Two further iterations: counters must return and every firing stay
    # enabled; loop-segment propositions must keep holding as shared grow.
    current = loop_end
    for iteration in (2, 3):
        for j in range(witness.c, n_segments):
            boundary = current
            configs = [current]
            try:
                for rid in witness.segment_schedules[j]:
                    current = apply_rule(ta, current, rid)
                    configs.append(current)
            except TaError as exc:
                fail(f"loop iteration {iteration} stalls in segment {j}: {exc}")
            for pf in witness.segment_props[j]:
                for config in configs:
                    if not eval_prop(ta, config, pf):
                        fail(f"loop iteration {iteration} violates {pf.render()}")
            if j != witness.c:
                for pf in witness.milestone_props[j]:
                    if not eval_prop(ta, boundary, pf):
                        fail(f"loop iteration {iteration} milestone {j} violates {pf.render()}")
        if current.kappa != loop_start.kappa:
            fail(f"loop iteration {iteration} does not return the location counters")

    if not check_lasso(ta, witness.formula, OracleLasso(witness.initial, witness.stem, loop)):
        fail("the infinite word does not satisfy the formula")
    return True


# ---------------------------------------------------------------------------
# The decision procedure
# ---------------------------------------------------------------------------


def _milestone_nodes(graph: CutGraph, ordering: Sequence[int]) -> list[Optional[CutNode]]:
    """Ordering nodes as milestone slots, with a virtual initial slot when the
    formula has no root obligation."""
    nodes = [graph.nodes[i] for i in ordering]
    if graph.root is not None:
        assert nodes[0].kind == "root", "the root must come first in every ordering"
        return list(nodes)
    return [None] + list(nodes)


def _assemble(
    enc: ReachEncoder,
    graph: CutGraph,
    ordering: Sequence[int],
) -> tuple[Formula, list[SymbolicConfig], list[ReachChain], int, list[Optional[CutNode]], list[tuple[PF, ...]]]:
    """The full constraint system for one topological ordering.

    Returns (formula, milestone configs, segment chains, loop-start index,
    milestone nodes, per-segment proposition sets).
    """
    ta = enc.ta
    slots = _milestone_nodes(graph, ordering)
    last = len(slots) - 1
    assert slots[last] is not None and slots[last].kind == "loop_end"
    c = next(j for j, node in enumerate(slots) if node is not None and node.kind == "loop_st")

    configs = [enc.new_config(f"m{j}") for j in range(len(slots))]
    chains = [
        enc.build_reach(f"seg{j}_", start=configs[j], end=configs[j + 1])
        for j in range(last)
    ]

    parts: list[Formula] = []

    # Initial configuration: processes only on initial locations, shared zero.
    first = configs[0]
    initial = set(ta.initial)
    for li, loc in enumerate(ta.locations):
        if loc not in initial:
            parts.append(eq(Lin.var(first.kappa[li]), 0))
    for name in first.shared:
        parts.append(eq(Lin.var(name), 0))

    # Loop closes on the location counters.
    for ka, kb in zip(configs[c].kappa, configs[last].kappa):
        parts.append(eq(Lin.var(ka), Lin.var(kb)))

    # Each met obligation holds at its milestone.
    for j, node in enumerate(slots):
        if node is None or j in (c, last):
            continue
        for pf in node.local:
            parts.append(pf_at(enc, configs[j], pf))

    # Global constraints activate at their node and bind every later segment;
    # inside the loop every global binds regardless of ordering position,
    # since the loop repeats past all of them.
    acc: list[tuple[PF, ...]] = []
    gathered: list[PF] = []
    for node in slots:
        if node is not None:
            gathered.extend(node.globals_)
        acc.append(tuple(gathered))
    all_globals = acc[-1]

    segment_props: list[tuple[PF, ...]] = []
    for j in range(last):
        props = acc[j] if j < c else all_globals
        segment_props.append(props)
        parts.append(chains[j].formula)
        parts.extend(strengthen_chain(enc, chains[j], props))

    # A loop that grows a variable must not fire rules falling on it.
    loop_chains = chains[c:]
    for var in ta.shared:
        inc = [ri for ri, r in enumerate(ta.rules) if r.update_map.get(var, 0) > 0]
        fall = [
            ri
            for ri, r in enumerate(ta.rules)
            if any(g.is_fall and g.var == var for g in r.guard)
        ]
        if not inc or not fall:
            continue
        grows = ge(Lin.of({ch.sums[ri]: 1 for ch in loop_chains for ri in inc}), 1)
        frozen = And(
            [eq(Lin.of({ch.sums[ri]: 1 for ch in loop_chains}), 0) for ri in fall]
        )
        parts.append(Implies(grows, frozen))

    # The loop fires at least one rule; an empty loop repeats nothing.
    parts.append(
        ge(
            Lin.of({ch.sums[ri]: 1 for ch in loop_chains for ri in range(len(ta.rules))}),
            1,
        )
    )

    return And(parts), configs, chains, c, slots, segment_props


def _decode_lasso(
    ta: ThresholdAutomaton,
    enc: ReachEncoder,
    formula: EF,
    configs: Sequence[SymbolicConfig],
    chains: Sequence[ReachChain],
    c: int,
    slots: Sequence[Optional[CutNode]],
    segment_props: Sequence[tuple[PF, ...]],
    model: Mapping[str, int],
) -> LassoWitness:
    milestones_raw = [decode_config(ta, cfg, model) for cfg in configs]

    schedules: list[tuple[str, ...]] = []
    counts: list[tuple[tuple[str, int], ...]] = []
    for chain in chains:
        segments, steps, sums = decode_chain(ta, enc, chain, model)
        lifted: list[str] = []
        for i, seg in enumerate(segments):
            tau = realize_steady(ta, seg.start, seg.counts_map())
            lifted.extend(tau)
            lifted.extend(tau)
            if i < len(steps):
                lifted.extend([steps[i].rule_id] * 2)
        schedules.append(tuple(lifted))
        counts.append(tuple(sorted((r, 2 * v) for r, v in sums.items() if v)))

    milestones = tuple(_double(ta, m) for m in milestones_raw)
    params = {p: v for p, v in zip(ta.env.params, milestones[0].params)}
    labels = tuple(("start" if node is None else node.label) for node in slots)
    milestone_props = tuple(
        () if node is None else tuple(node.local) for node in slots
    )

    witness = LassoWitness(
        params=tuple(sorted(params.items())),
        ordering=labels,
        milestones=milestones,
        segment_counts=tuple(counts),
        segment_schedules=tuple(schedules),
        c=c,
        formula=formula,
        milestone_props=milestone_props,
        segment_props=tuple(segment_props),
    )
    replay_lasso(ta, witness)
    return witness


def check_spec(
    ta: ThresholdAutomaton,
    spec: Union[EF, str],
    *,
    solver: Optional[Solver] = None,
    assume_multiplicative: bool = False,
    max_orders: Optional[int] = None,
    appl: str = "rank",
) -> MCResult:
    """Does some initial configuration admit an infinite run satisfying the
    specification?

    Returns Violated with a certified lasso if so, Holds if no topological
    ordering admits one, and Unknown when the solver gave up on some ordering
    or the ordering cap cut the enumeration short.  The environment must
    scale (pass ``assume_multiplicative`` to skip the check; doubling-based
    certification may then fail).
    """
    started = time.monotonic()
    formula = parse_eltl(spec, ta) if isinstance(spec, str) else spec

    if not assume_multiplicative:
        verdict = check_multiplicative(ta)
        if verdict.kind == "no":
            raise TaSemanticError(
                f"environment does not scale ({verdict.reason}); verdicts would be unsound"
            )

    nf = to_normal_form(formula)
    graph = cut_graph(nf)
    enc = ReachEncoder(ta, extra_atoms=collect_guard_atoms(formula), appl=appl)

    own = solver is None
    sv = solver if solver is not None else Solver()
    tried = 0
    saw_unknown = False
    capped = False
    try:
        orders = topo_orders(graph)
        while True:
            try:
                ordering = next(orders)
            except StopIteration:
                break
            if max_orders is not None and tried >= max_orders:
                capped = True
                break
            tried += 1
            assembled, configs, chains, c, slots, seg_props = _assemble(enc, graph, ordering)
            result = sv.check(assembled)
            if result.status == "sat":
                assert result.model is not None
                witness = _decode_lasso(
                    ta, enc, formula, configs, chains, c, slots, seg_props, result.model
                )
                return MCResult("violated", witness, tried, time.monotonic() - started)
            if result.status == "unknown":
                saw_unknown = True
    finally:
        if own:
            sv.close()

    status = "unknown" if (saw_unknown or capped) else "holds"
    return MCResult(status, None, tried, time.monotonic() - started)
