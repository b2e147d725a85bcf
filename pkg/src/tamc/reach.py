"""Reachability as integer linear constraint solving.

The encoding rests on one structural fact about threshold automata: shared
variables only grow, so the truth value of every guard atom changes at most
once along a run.  A run therefore decomposes into at most ``|atoms| + 1``
maximal *steady* segments — stretches on which every guard atom keeps a fixed
truth value — separated by single rule firings that flip at least one atom.

Within a steady segment the order of firings is irrelevant up to
applicability, so a segment is summarized by how often each rule fires
(a counter per rule).  Five constraint groups make a counter vector sound:

* ``phi_base``  — both endpoint configurations are admissible, agree on the
  parameters, and agree on every guard atom;
* ``phi_flow``  — per location, incoming minus outgoing firings equals the
  counter delta;
* ``phi_shared`` — per shared variable, the summed updates equal the delta;
* ``phi_enabled`` — a fired rule's guards hold at the segment start;
* ``phi_appl``  — a fired rule is fed by a chain of fired rules rooted at a
  populated location (encoded with per-rule rank variables; an explicit
  chain enumeration is kept for differential testing).

``phi_reach`` chains alternating steady segments and single steps, and
``solve_reach`` turns a satisfying assignment into a `ReachWitness` whose
schedule is rebuilt by `realize_steady` and replayed through the concrete
semantics before being reported.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from tamc.model import (
    Guard,
    InternalInvariantViolation,
    LinExpr,
    ResourceLimit,
    TaError,
    TaSemanticError,
    ThresholdAutomaton,
    normalize_guard,
)
from tamc.semantics import Configuration, run, validate
from tamc.smt import (
    And,
    Atom,
    Formula,
    Iff,
    Implies,
    Lin,
    Or,
    Solver,
    TRUE,
    eq,
    ge,
    gt,
    le,
    lt,
)

# Realization is exact, so its length is the sum of the model's counters.
# Solvers prefer small models but nothing forces them to; fail loudly rather
# than build a schedule with millions of entries.
_REALIZE_CAP = 200_000

# Explicit chain enumeration is exponential; it exists for differential
# testing on small automata only.
_CHAIN_CAP = 250_000


# ---------------------------------------------------------------------------
# Symbolic structures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymbolicConfig:
    """Solver variable names for one configuration."""

    tag: str
    kappa: tuple[str, ...]
    shared: tuple[str, ...]
    params: tuple[str, ...]


@dataclass(frozen=True)
class SteadyCounts:
    """Per-rule firing counters ``x`` and rank variables ``rho``."""

    tag: str
    x: tuple[str, ...]
    rho: tuple[str, ...]


@dataclass(frozen=True)
class ChainPiece:
    """One steady segment or one single step of a reachability chain."""

    start: SymbolicConfig
    end: SymbolicConfig
    counts: SteadyCounts


@dataclass(frozen=True)
class ReachChain:
    """The full alternating chain built by `ReachEncoder.build_reach`.

    ``blocks[i]`` is a steady segment; ``steps[i]`` fires at most one rule
    between ``blocks[i].end`` and ``blocks[i+1].start``.  ``sums[ri]`` is the
    name of the per-rule total over all blocks and steps.
    """

    blocks: tuple[ChainPiece, ...]
    steps: tuple[ChainPiece, ...]
    sums: tuple[str, ...]
    parts: tuple[Formula, ...]

    @property
    def first(self) -> SymbolicConfig:
        return self.blocks[0].start

    @property
    def last(self) -> SymbolicConfig:
        return self.blocks[-1].end

    @property
    def formula(self) -> Formula:
        return And(self.parts)


class ReachEncoder:
    """Builds the constraint groups over a fixed atom set.

    ``extra_atoms`` widens the atom set beyond the automaton's own guards;
    segments are then steady with respect to the wider set, which callers use
    to keep additional threshold tests constant per segment.
    """

    def __init__(
        self,
        ta: ThresholdAutomaton,
        *,
        extra_atoms: Iterable[Guard] = (),
        appl: str = "rank",
    ):
        if ta.is_sketch():
            raise TaSemanticError("cannot encode a sketch automaton; instantiate its indeterminates first")
        if appl not in ("rank", "chains"):
            raise ValueError(f"unknown applicability encoding {appl!r}")
        self.ta = ta
        self.appl = appl
        atoms = list(ta.guard_atoms())
        for atom in extra_atoms:
            if atom not in atoms:
                atoms.append(atom)
        self.atoms: tuple[Guard, ...] = tuple(atoms)
        self._norm = {a: normalize_guard(a) for a in self.atoms}
        self._feeders: dict[int, list[int]] = {
            ri: [
                qi
                for qi, q in enumerate(ta.rules)
                if q.to_loc == r.from_loc and qi != ri
            ]
            for ri, r in enumerate(ta.rules)
        }

    # -- variable allocation ------------------------------------------------

    @property
    def num_steps(self) -> int:
        """Single steps in a chain: one per possible atom flip, plus one."""
        return len(self.atoms) + 1

    def new_config(self, tag: str) -> SymbolicConfig:
        return SymbolicConfig(
            tag=tag,
            kappa=tuple(f"k_{tag}_{i}" for i in range(len(self.ta.locations))),
            shared=tuple(f"g_{tag}_{j}" for j in range(len(self.ta.shared))),
            params=tuple(f"p_{tag}_{m}" for m in range(len(self.ta.env.params))),
        )

    def new_counts(self, tag: str) -> SteadyCounts:
        return SteadyCounts(
            tag=tag,
            x=tuple(f"x_{tag}_{ri}" for ri in range(len(self.ta.rules))),
            rho=tuple(f"q_{tag}_{ri}" for ri in range(len(self.ta.rules))),
        )

    # -- arithmetic helpers ---------------------------------------------------

    def _param_lin(self, cfg: SymbolicConfig, expr: LinExpr) -> Lin:
        """An integer-coefficient LinExpr over parameters, as a solver term."""
        coeffs: dict[str, int] = {}
        order = self.ta.env.params
        for name, c in expr.items:
            assert isinstance(c, Fraction) and c.denominator == 1
            coeffs[cfg.params[order.index(name)]] = int(c)
        assert isinstance(expr.const, Fraction) and expr.const.denominator == 1
        return Lin.of(coeffs, int(expr.const))

    def kappa_lin(self, cfg: SymbolicConfig, loc: str) -> Lin:
        return Lin.var(cfg.kappa[self.ta.loc_index[loc]])

    def count_lin(self, counts: SteadyCounts, rule_id: str) -> Lin:
        ri = [r.id for r in self.ta.rules].index(rule_id)
        return Lin.var(counts.x[ri])

    # -- constraint groups ----------------------------------------------------

    def admissible(self, cfg: SymbolicConfig) -> Formula:
        """Resilience constraints plus the system-size equation."""
        parts: list[Formula] = []
        for rc in self.ta.env.resilience:
            e = rc.expr()
            lin = self._param_lin(cfg, e.scale(e.denominator_lcm()))
            if rc.rel == "<":
                parts.append(lt(lin, 0))
            elif rc.rel == "<=":
                parts.append(le(lin, 0))
            elif rc.rel == "=":
                parts.append(eq(lin, 0))
            elif rc.rel == ">=":
                parts.append(ge(lin, 0))
            else:
                parts.append(gt(lin, 0))
        size = self.ta.env.size_fn
        scale = size.denominator_lcm()
        size_lin = self._param_lin(cfg, size.scale(scale))
        total = Lin.of({name: scale for name in cfg.kappa})
        parts.append(eq(total, size_lin))
        return And(parts)

    def guard_holds(self, cfg: SymbolicConfig, guard: Guard) -> Formula:
        ng = self._norm.get(guard)
        if ng is None:
            ng = normalize_guard(guard)
        lhs = Lin.of({cfg.shared[self.ta.shared_index[ng.var]]: ng.scale})
        rhs = self._param_lin(cfg, ng.rhs)
        return ge(lhs, rhs) if ng.op == ">=" else lt(lhs, rhs)

    def params_equal(self, a: SymbolicConfig, b: SymbolicConfig) -> Formula:
        return And([eq(Lin.var(pa), Lin.var(pb)) for pa, pb in zip(a.params, b.params)])

    def context_equal(self, a: SymbolicConfig, b: SymbolicConfig) -> Formula:
        return And([Iff(self.guard_holds(a, g), self.guard_holds(b, g)) for g in self.atoms])

    def phi_base(self, a: SymbolicConfig, b: SymbolicConfig) -> Formula:
        return And(
            [
                self.params_equal(a, b),
                self.admissible(a),
                self.admissible(b),
                self.context_equal(a, b),
            ]
        )

    def phi_flow(self, a: SymbolicConfig, b: SymbolicConfig, counts: SteadyCounts) -> Formula:
        parts = []
        for li, loc in enumerate(self.ta.locations):
            flow: dict[str, int] = {}
            for ri, r in enumerate(self.ta.rules):
                delta = (1 if r.to_loc == loc else 0) - (1 if r.from_loc == loc else 0)
                if delta:
                    flow[counts.x[ri]] = delta
            flow[b.kappa[li]] = flow.get(b.kappa[li], 0) - 1
            flow[a.kappa[li]] = flow.get(a.kappa[li], 0) + 1
            parts.append(eq(Lin.of(flow), 0))
        return And(parts)

    def phi_shared(self, a: SymbolicConfig, b: SymbolicConfig, counts: SteadyCounts) -> Formula:
        parts = []
        for j, var in enumerate(self.ta.shared):
            upd: dict[str, int] = {}
            for ri, r in enumerate(self.ta.rules):
                amount = r.update_map.get(var, 0)
                if amount:
                    upd[counts.x[ri]] = amount
            upd[b.shared[j]] = upd.get(b.shared[j], 0) - 1
            upd[a.shared[j]] = upd.get(a.shared[j], 0) + 1
            parts.append(eq(Lin.of(upd), 0))
        return And(parts)

    def phi_enabled(self, cfg: SymbolicConfig, counts: SteadyCounts) -> Formula:
        parts = []
        for ri, r in enumerate(self.ta.rules):
            if not r.guard:
                continue
            holds = And([self.guard_holds(cfg, g) for g in r.guard])
            parts.append(Implies(gt(Lin.var(counts.x[ri]), 0), holds))
        return And(parts)

    def phi_appl(self, cfg: SymbolicConfig, counts: SteadyCounts) -> Formula:
        """Rank encoding of chain applicability.

        A fired rule needs either a process already waiting at its source or
        some fired feeder with a strictly smaller rank; descending ranks
        bottom out at a populated location.
        """
        parts = []
        for ri, r in enumerate(self.ta.rules):
            options: list[Formula] = [gt(self.kappa_lin(cfg, r.from_loc), 0)]
            for qi in self._feeders[ri]:
                options.append(
                    And(
                        [
                            gt(Lin.var(counts.x[qi]), 0),
                            lt(Lin.var(counts.rho[qi]), Lin.var(counts.rho[ri])),
                        ]
                    )
                )
            parts.append(Implies(gt(Lin.var(counts.x[ri]), 0), Or(options)))
        return And(parts)

    def phi_appl_chains(self, cfg: SymbolicConfig, counts: SteadyCounts) -> Formula:
        """Literal chain enumeration (exponential; small automata only)."""
        parts = []
        for ri in range(len(self.ta.rules)):
            options = [
                And(
                    [gt(self.kappa_lin(cfg, self.ta.rules[chain[0]].from_loc), 0)]
                    + [gt(Lin.var(counts.x[ci]), 0) for ci in chain]
                )
                for chain in self._chains_ending_at(ri)
            ]
            parts.append(Implies(gt(Lin.var(counts.x[ri]), 0), Or(options)))
        return And(parts)

    def _chains_ending_at(self, ri: int) -> list[tuple[int, ...]]:
        """All simple feeder chains ``(r1, ..., rm)`` with ``rm == ri``."""
        chains: list[tuple[int, ...]] = []

        def extend(chain: tuple[int, ...]) -> None:
            chains.append(chain)
            if len(chains) > _CHAIN_CAP:
                raise ResourceLimit("chain enumeration blew past the cap; use the rank encoding")
            for qi in self._feeders[chain[0]]:
                if qi not in chain:
                    extend((qi,) + chain)

        extend((ri,))
        return chains

    def _applicability(self, cfg: SymbolicConfig, counts: SteadyCounts) -> Formula:
        if self.appl == "rank":
            return self.phi_appl(cfg, counts)
        return self.phi_appl_chains(cfg, counts)

    def phi_steady(self, a: SymbolicConfig, b: SymbolicConfig, counts: SteadyCounts) -> Formula:
        return And(
            [
                self.phi_base(a, b),
                self.phi_flow(a, b, counts),
                self.phi_shared(a, b, counts),
                self.phi_enabled(a, counts),
                self._applicability(a, counts),
            ]
        )

    def phi_step(self, a: SymbolicConfig, b: SymbolicConfig, counts: SteadyCounts) -> Formula:
        """At most one firing; atoms may flip, so no context equality."""
        total = Lin.of({name: 1 for name in counts.x})
        return And(
            [
                self.params_equal(a, b),
                self.admissible(a),
                self.admissible(b),
                self.phi_flow(a, b, counts),
                self.phi_shared(a, b, counts),
                self.phi_enabled(a, counts),
                self._applicability(a, counts),
                le(total, 1),
            ]
        )

    def build_reach(
        self,
        prefix: str = "",
        *,
        start: SymbolicConfig | None = None,
        end: SymbolicConfig | None = None,
    ) -> ReachChain:
        """Alternate steady segments with single steps.

        ``start``/``end`` let callers stitch several chains through shared
        endpoint configurations.
        """
        n_steps = self.num_steps
        blocks: list[ChainPiece] = []
        steps: list[ChainPiece] = []
        parts: list[Formula] = []
        cursor = start if start is not None else self.new_config(f"{prefix}a0")
        for i in range(n_steps + 1):
            if i == n_steps and end is not None:
                block_end = end
            else:
                block_end = self.new_config(f"{prefix}b{i}")
            counts = self.new_counts(f"{prefix}s{i}")
            blocks.append(ChainPiece(cursor, block_end, counts))
            parts.append(self.phi_steady(cursor, block_end, counts))
            if i < n_steps:
                nxt = self.new_config(f"{prefix}a{i + 1}")
                stc = self.new_counts(f"{prefix}t{i}")
                steps.append(ChainPiece(block_end, nxt, stc))
                parts.append(self.phi_step(block_end, nxt, stc))
                cursor = nxt
        sums = tuple(f"tot_{prefix}{ri}" for ri in range(len(self.ta.rules)))
        for ri, name in enumerate(sums):
            contribution: dict[str, int] = {name: -1}
            for piece in itertools.chain(blocks, steps):
                contribution[piece.counts.x[ri]] = 1
            parts.append(eq(Lin.of(contribution), 0))
        return ReachChain(tuple(blocks), tuple(steps), sums, tuple(parts))


# ---------------------------------------------------------------------------
# Decoding models into witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SteadySegment:
    start: Configuration
    end: Configuration
    counts: tuple[tuple[str, int], ...]

    def counts_map(self) -> dict[str, int]:
        return dict(self.counts)


@dataclass(frozen=True)
class WitnessStep:
    rule_id: str
    start: Configuration
    end: Configuration


@dataclass(frozen=True)
class ReachWitness:
    """A decoded, realized, and replayed reachability certificate.

    ``segments`` and ``steps`` alternate: ``segments[0], steps[0],
    segments[1], ...``; the schedule fires every segment's counted rules in a
    valid order with the step rules spliced between segments.
    """

    params: tuple[tuple[str, int], ...]
    segments: tuple[SteadySegment, ...]
    steps: tuple[WitnessStep, ...]
    sums: tuple[tuple[str, int], ...]
    schedule: tuple[str, ...]

    @property
    def initial(self) -> Configuration:
        return self.segments[0].start

    @property
    def final(self) -> Configuration:
        return self.segments[-1].end

    def params_map(self) -> dict[str, int]:
        return dict(self.params)

    def sums_map(self) -> dict[str, int]:
        return dict(self.sums)

    def to_json(self, ta: ThresholdAutomaton) -> dict:
        def cfg(c: Configuration) -> dict:
            return {
                "kappa": {loc: v for loc, v in zip(ta.locations, c.kappa) if v},
                "shared": {var: v for var, v in zip(ta.shared, c.shared) if v},
            }

        return {
            "params": self.params_map(),
            "segments": [
                {"start": cfg(s.start), "end": cfg(s.end), "counts": s.counts_map()}
                for s in self.segments
            ],
            "steps": [
                {"rule": st.rule_id, "start": cfg(st.start), "end": cfg(st.end)}
                for st in self.steps
            ],
            "sums": self.sums_map(),
            "schedule": list(self.schedule),
        }

    @staticmethod
    def from_json(ta: ThresholdAutomaton, doc: Mapping) -> "ReachWitness":
        params = {str(k): int(v) for k, v in doc["params"].items()}

        def cfg(d: Mapping) -> Configuration:
            return Configuration.make(
                ta,
                {str(k): int(v) for k, v in d.get("kappa", {}).items()},
                {str(k): int(v) for k, v in d.get("shared", {}).items()},
                params,
            )

        segments = tuple(
            SteadySegment(
                cfg(s["start"]),
                cfg(s["end"]),
                tuple(sorted((str(k), int(v)) for k, v in s["counts"].items())),
            )
            for s in doc["segments"]
        )
        steps = tuple(
            WitnessStep(str(s["rule"]), cfg(s["start"]), cfg(s["end"]))
            for s in doc["steps"]
        )
        return ReachWitness(
            params=tuple(sorted(params.items())),
            segments=segments,
            steps=steps,
            sums=tuple(sorted((str(k), int(v)) for k, v in doc["sums"].items())),
            schedule=tuple(str(r) for r in doc["schedule"]),
        )


@dataclass(frozen=True)
class ReachResult:
    status: str  # 'sat' | 'unsat' | 'unknown'
    witness: Optional[ReachWitness]
    seconds: float

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


def decode_config(ta: ThresholdAutomaton, cfg: SymbolicConfig, model: Mapping[str, int]) -> Configuration:
    concrete = Configuration(
        kappa=tuple(model.get(name, 0) for name in cfg.kappa),
        shared=tuple(model.get(name, 0) for name in cfg.shared),
        params=tuple(model.get(name, 0) for name in cfg.params),
    )
    validate(ta, concrete)
    return concrete


def decode_counts(ta: ThresholdAutomaton, counts: SteadyCounts, model: Mapping[str, int]) -> dict[str, int]:
    out: dict[str, int] = {}
    for ri, r in enumerate(ta.rules):
        v = model.get(counts.x[ri], 0)
        if v:
            out[r.id] = v
    return out


def _atom_truth(ta: ThresholdAutomaton, atoms: Sequence[Guard], config: Configuration) -> tuple[bool, ...]:
    shared = config.shared_map(ta)
    params = config.param_map(ta)
    return tuple(g.eval(shared, params) for g in atoms)


def decode_chain(
    ta: ThresholdAutomaton,
    encoder: ReachEncoder,
    chain: ReachChain,
    model: Mapping[str, int],
) -> tuple[tuple[SteadySegment, ...], tuple[WitnessStep, ...], dict[str, int]]:
    """Concrete segments and steps, with steady neighbours merged.

    Two adjacent steady segments merge whenever the single step between them
    leaves every atom's truth value unchanged (in particular whenever it fires
    nothing); the step's firing folds into the merged counter map.  Because
    atoms flip at most once, at most ``len(atoms) + 1`` merged segments can
    remain, which is asserted.
    """
    raw_blocks = [
        (
            decode_config(ta, piece.start, model),
            decode_config(ta, piece.end, model),
            decode_counts(ta, piece.counts, model),
        )
        for piece in chain.blocks
    ]
    raw_steps = []
    for piece in chain.steps:
        fired = decode_counts(ta, piece.counts, model)
        assert sum(fired.values()) <= 1
        rule_id = next(iter(fired)) if fired else None
        raw_steps.append((decode_config(ta, piece.start, model), decode_config(ta, piece.end, model), rule_id))

    segments: list[tuple[Configuration, Configuration, Counter]] = []
    seg_start, seg_end, seg_counts = raw_blocks[0]
    segments.append((seg_start, seg_end, Counter(seg_counts)))
    for (step_start, step_end, rule_id), (blk_start, blk_end, blk_counts) in zip(
        raw_steps, raw_blocks[1:]
    ):
        assert segments[-1][1] == step_start and step_end == blk_start
        if _atom_truth(ta, encoder.atoms, step_start) == _atom_truth(ta, encoder.atoms, step_end):
            start, _, folded = segments[-1]
            if rule_id is not None:
                folded[rule_id] += 1
            folded.update(blk_counts)
            segments[-1] = (start, blk_end, folded)
        else:
            assert rule_id is not None
            segments.append((blk_start, blk_end, Counter(blk_counts)))

    merged_segments = []
    merged_steps = []
    for start, end, counts in segments:
        merged_segments.append(
            SteadySegment(start, end, tuple(sorted((r, c) for r, c in counts.items() if c)))
        )
    for step_start, step_end, rule_id in raw_steps:
        if _atom_truth(ta, encoder.atoms, step_start) != _atom_truth(ta, encoder.atoms, step_end):
            assert rule_id is not None
            merged_steps.append(WitnessStep(rule_id, step_start, step_end))

    assert len(merged_segments) == len(merged_steps) + 1
    assert len(merged_segments) <= len(encoder.atoms) + 1

    sums = {}
    for ri, r in enumerate(ta.rules):
        v = model.get(chain.sums[ri], 0)
        if v:
            sums[r.id] = v
    fired_total: Counter = Counter()
    for seg in merged_segments:
        fired_total.update(dict(seg.counts))
    for st in merged_steps:
        fired_total[st.rule_id] += 1
    assert dict(fired_total) == sums

    return tuple(merged_segments), tuple(merged_steps), sums


# ---------------------------------------------------------------------------
# Realization: from counters back to concrete schedules
# ---------------------------------------------------------------------------


def _chain_head(
    ta: ThresholdAutomaton,
    kappa: Sequence[int],
    remaining: Mapping[str, int],
    target: str,
) -> Optional[str]:
    """A remaining rule with populated source that feeds ``target``.

    Walks feeder edges backwards from ``target`` (restricted to rules with
    remaining count) and returns the first populated head in breadth-first,
    id-sorted order.
    """
    by_id = ta.rules_by_id
    seen = {target}
    queue = [target]
    while queue:
        rid = queue.pop(0)
        rule = by_id[rid]
        if kappa[ta.loc_index[rule.from_loc]] > 0:
            return rid
        feeders = sorted(
            q.id
            for q in ta.rules
            if q.id in remaining and q.id not in seen and q.to_loc == rule.from_loc
        )
        for fid in feeders:
            seen.add(fid)
            queue.append(fid)
    return None


def _cycle_edge(
    ta: ThresholdAutomaton,
    remaining: Mapping[str, int],
    loc: str,
) -> Optional[str]:
    """The least remaining rule leaving ``loc`` that lies on a remaining cycle
    through ``loc``, if any."""
    by_loc: dict[str, list[str]] = {}
    for rid in remaining:
        by_loc.setdefault(ta.rules_by_id[rid].from_loc, []).append(rid)
    for rid in sorted(by_loc.get(loc, ())):
        # Is loc reachable from this edge's endpoint through remaining rules?
        seen = set()
        stack = [ta.rules_by_id[rid].to_loc]
        while stack:
            cur = stack.pop()
            if cur == loc:
                return rid
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(ta.rules_by_id[q].to_loc for q in by_loc.get(cur, ()))
    return None


def realize_steady(
    ta: ThresholdAutomaton,
    sigma: Configuration,
    counts: Mapping[str, int],
) -> list[str]:
    """Order a steady segment's counters into a firable schedule.

    Guards are not consulted: on a steady segment every counted rule's guard
    holds throughout, so applicability reduces to source population.  The
    extraction repeatedly picks the least pending rule, walks back to a chain
    head whose source is populated, and prefers serving a remaining cycle
    through that location before leaving it.  Replaying the result through
    the concrete semantics is the caller's final check.
    """
    by_id = ta.rules_by_id
    remaining: dict[str, int] = {}
    for rid, c in counts.items():
        if rid not in by_id:
            raise TaError(f"unknown rule id {rid!r} in counts")
        if c < 0:
            raise TaError(f"negative count for rule {rid!r}")
        if c:
            remaining[rid] = int(c)
    if sum(remaining.values()) > _REALIZE_CAP:
        raise ResourceLimit(f"refusing to realize a schedule longer than {_REALIZE_CAP}")

    kappa = list(sigma.kappa)
    schedule: list[str] = []
    while remaining:
        target = min(remaining)
        head = _chain_head(ta, kappa, remaining, target)
        if head is None:
            raise InternalInvariantViolation(
                f"steady extraction stalled with counts {remaining} at kappa {kappa}"
            )
        loc = by_id[head].from_loc
        fire = _cycle_edge(ta, remaining, loc) or head
        rule = by_id[fire]
        assert kappa[ta.loc_index[rule.from_loc]] > 0
        kappa[ta.loc_index[rule.from_loc]] -= 1
        kappa[ta.loc_index[rule.to_loc]] += 1
        remaining[fire] -= 1
        if not remaining[fire]:
            del remaining[fire]
        schedule.append(fire)

    assert Counter(schedule) == Counter({r: c for r, c in counts.items() if c})
    return schedule


def realize_path(ta: ThresholdAutomaton, witness: ReachWitness) -> list[str]:
    """Concatenate per-segment realizations and the separating steps."""
    schedule: list[str] = []
    for i, seg in enumerate(witness.segments):
        schedule.extend(realize_steady(ta, seg.start, seg.counts_map()))
        if i < len(witness.steps):
            schedule.append(witness.steps[i].rule_id)
    return schedule


def replay_witness(ta: ThresholdAutomaton, witness: ReachWitness) -> Configuration:
    """Re-run the witness schedule and cross-check every reported value."""
    final = run(ta, witness.initial, witness.schedule)
    if final != witness.final:
        raise InternalInvariantViolation("witness schedule does not replay to its final configuration")
    if Counter(witness.schedule) != Counter(witness.sums_map()):
        raise InternalInvariantViolation("witness schedule disagrees with its per-rule totals")
    return final


# ---------------------------------------------------------------------------
# Top-level queries
# ---------------------------------------------------------------------------


def _decode_witness(
    ta: ThresholdAutomaton,
    encoder: ReachEncoder,
    chain: ReachChain,
    model: Mapping[str, int],
) -> ReachWitness:
    segments, steps, sums = decode_chain(ta, encoder, chain, model)
    params = segments[0].start.param_map(ta)
    draft = ReachWitness(
        params=tuple(sorted(params.items())),
        segments=segments,
        steps=steps,
        sums=tuple(sorted(sums.items())),
        schedule=(),
    )
    schedule = tuple(realize_path(ta, draft))
    witness = ReachWitness(
        params=draft.params,
        segments=segments,
        steps=steps,
        sums=draft.sums,
        schedule=schedule,
    )
    replay_witness(ta, witness)
    return witness


ParamBounds = Mapping[str, Union[int, tuple[int, int]]]


def solve_reach(
    ta: ThresholdAutomaton,
    init: Optional[Configuration] = None,
    *,
    zero: Iterable[str] = (),
    positive: Iterable[str] = (),
    bound: Optional[int] = None,
    param_bounds: Optional[ParamBounds] = None,
    solver: Optional[Solver] = None,
    appl: str = "rank",
    extra_atoms: Iterable[Guard] = (),
) -> ReachResult:
    """Decide reachability of a target location predicate.

    With ``init=None`` the query is parameterized: the initial configuration
    ranges over all admissible placements of the processes on the initial
    locations with all shared variables zero.  ``zero``/``positive`` constrain
    the final configuration's location counters; ``bound`` caps the summed
    rule firings; ``param_bounds`` boxes individual parameters.
    """
    encoder = ReachEncoder(ta, extra_atoms=extra_atoms, appl=appl)
    chain = encoder.build_reach()
    parts = list(chain.parts)
    first, last = chain.first, chain.last

    if init is None:
        initial = set(ta.initial)
        for li, loc in enumerate(ta.locations):
            if loc not in initial:
                parts.append(eq(Lin.var(first.kappa[li]), 0))
        for name in first.shared:
            parts.append(eq(Lin.var(name), 0))
    else:
        validate(ta, init)
        for li in range(len(ta.locations)):
            parts.append(eq(Lin.var(first.kappa[li]), init.kappa[li]))
        for j in range(len(ta.shared)):
            parts.append(eq(Lin.var(first.shared[j]), init.shared[j]))
        for m in range(len(ta.env.params)):
            parts.append(eq(Lin.var(first.params[m]), init.params[m]))

    for loc in zero:
        if loc not in ta.loc_index:
            raise TaSemanticError(f"unknown location {loc!r} in zero set")
        parts.append(eq(encoder.kappa_lin(last, loc), 0))
    for loc in positive:
        if loc not in ta.loc_index:
            raise TaSemanticError(f"unknown location {loc!r} in positive set")
        parts.append(ge(encoder.kappa_lin(last, loc), 1))

    if param_bounds:
        for name, bounds in param_bounds.items():
            if name not in ta.env.params:
                raise TaSemanticError(f"unknown parameter {name!r} in bounds")
            lo, hi = (0, bounds) if isinstance(bounds, int) else bounds
            var = Lin.var(first.params[ta.param_index[name]])
            parts.append(ge(var, lo))
            parts.append(le(var, hi))

    if bound is not None:
        parts.append(le(Lin.of({name: 1 for name in chain.sums}), bound))

    formula = And(parts)
    own = solver is None
    sv = solver if solver is not None else Solver()
    try:
        result = sv.check(formula)
    finally:
        if own:
            sv.close()

    if result.status == "sat":
        assert result.model is not None
        witness = _decode_witness(ta, encoder, chain, result.model)
        return ReachResult("sat", witness, result.seconds)
    return ReachResult(result.status, None, result.seconds)
