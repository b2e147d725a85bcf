"""Threshold-coefficient synthesis for sketch automata.

A sketch automaton leaves rational coefficients in its guards open as named
indeterminates.  Synthesis looks for an assignment making the instantiated
automaton satisfy a temporal specification — concretely, making the
violation formula unsatisfiable over all runs.

The search space is finite once a denominator bound ``D`` is fixed: every
assigned value is a numerator over ``D``, and numerators range over a window
that is either supplied (``num_bound``) or derived from a resilience
condition of the common shape ``n > Σ δ_i·t_i``.  Within the window,
numerators are filtered by *sanity*: a guard threshold must stay within
``[0, n]`` for every rational parameter valuation admitted by the resilience
condition, since a shared counter can never exceed the number of processes.
Each single-indeterminate guard yields an exact linear feasibility probe of
the negated sanity condition, decided here by Fourier–Motzkin elimination
over exact rationals (guards coupling several indeterminates keep the full
window; the verification loop still rejects their unsound instances).

Enumeration is counterexample-guided: candidates are tried in lexicographic
numerator order; a violating lasso found for one candidate is re-evaluated —
by concrete replay and exact formula evaluation, no solver involved — against
every remaining candidate, and candidates on which the same lasso remains a
valid violation are blocked without ever reaching the solver.  Blocked
candidates are provably wrong (the run transfers verbatim), which a
per-run spot check re-verifies on a seeded sample.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Sequence, Union

from tamc.eltl import EF, parse_eltl
from tamc.liveness import check_spec
from tamc.model import (
    Indeterminate,
    InternalInvariantViolation,
    LinearConstraint,
    TaError,
    TaSemanticError,
    ThresholdAutomaton,
    check_multiplicative,
    normalize_guard,
)
from tamc.oracle import OracleLasso, _loop_delta_ok, check_lasso
from tamc.semantics import Configuration, is_initial, run, validate
from tamc.smt import Solver


class MissingIndeterminate(TaError):
    """The assignment leaves some sketch indeterminate without a value."""


class UnboundedSpace(TaError):
    """No finite numerator window is derivable and none was supplied."""


# ---------------------------------------------------------------------------
# Assignments and candidate spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Assignment:
    """Values for the indeterminates, exact rationals."""

    values: tuple[tuple[str, Fraction], ...]

    @staticmethod
    def of(mapping: Mapping[str, Union[int, Fraction]]) -> "Assignment":
        return Assignment(tuple(sorted((k, Fraction(v)) for k, v in mapping.items())))

    def mapping(self) -> dict[str, Fraction]:
        return dict(self.values)

    def render(self) -> dict[str, str]:
        return {k: f"{v.numerator}/{v.denominator}" for k, v in self.values}

    def __str__(self) -> str:
        if not self.values:
            return "{}"
        return "{" + ", ".join(f"{k}={v}" for k, v in self.values) + "}"


@dataclass(frozen=True)
class CandidateSpace:
    """Per-indeterminate inclusive numerator windows over one denominator."""

    denominator: int
    ranges: tuple[tuple[str, int, int], ...]

    def __post_init__(self) -> None:
        if self.denominator < 1:
            raise TaSemanticError("denominator bound must be positive")

    @property
    def size(self) -> int:
        total = 1
        for _, lo, hi in self.ranges:
            total *= max(0, hi - lo + 1)
        return total

    def candidates(self) -> Iterator[Assignment]:
        """All assignments, lexicographic in the numerator vector."""
        names = [name for name, _, _ in self.ranges]
        axes = [range(lo, hi + 1) for _, lo, hi in self.ranges]
        for numerators in itertools.product(*axes):
            yield Assignment(
                tuple((n, Fraction(a, self.denominator)) for n, a in zip(names, numerators))
            )


def instantiate(
    sketch: ThresholdAutomaton, assignment: Union[Assignment, Mapping[str, Union[int, Fraction]]]
) -> ThresholdAutomaton:
    """The concrete automaton with every indeterminate substituted."""
    mapping = assignment.mapping() if isinstance(assignment, Assignment) else dict(assignment)
    missing = set(sketch.indeterminates) - set(mapping)
    if missing:
        raise MissingIndeterminate(f"assignment misses indeterminates {sorted(missing)}")
    concrete = sketch.substitute({k: Fraction(v) for k, v in mapping.items()})
    for g in concrete.guard_atoms():
        normalize_guard(g)  # validates integer renormalization
    return concrete


# ---------------------------------------------------------------------------
# Rational feasibility by Fourier–Motzkin elimination
# ---------------------------------------------------------------------------

# A row means  sum(coeffs[x] * x) + const  (>|>=)  0, strict when flagged.
_Row = tuple[dict[str, Fraction], Fraction, bool]


def _fm_feasible(rows: Sequence[_Row], variables: Sequence[str]) -> bool:
    current = [({k: Fraction(v) for k, v in c.items() if v}, Fraction(k0), s) for c, k0, s in rows]
    for var in variables:
        pos = [r for r in current if r[0].get(var, 0) > 0]
        neg = [r for r in current if r[0].get(var, 0) < 0]
        rest = [r for r in current if not r[0].get(var, 0)]
        combined: list[_Row] = []
        for pc, pk, ps in pos:
            a = pc[var]
            for nc, nk, ns in neg:
                b = -nc[var]
                coeffs: dict[str, Fraction] = {}
                for k in set(pc) | set(nc):
                    if k == var:
                        continue
                    v = b * pc.get(k, Fraction(0)) + a * nc.get(k, Fraction(0))
                    if v:
                        coeffs[k] = v
                combined.append((coeffs, b * pk + a * nk, ps or ns))
        current = rest + combined
    for coeffs, const, strict in current:
        assert not coeffs
        if const < 0 or (strict and const == 0):
            return False
    return True


def _rc_rows(rc: Sequence[LinearConstraint], params: Sequence[str]) -> list[_Row]:
    rows: list[_Row] = [({p: Fraction(1)}, Fraction(0), False) for p in params]
    for c in rc:
        expr = c.expr()
        coeffs = {k: Fraction(v) for k, v in expr.items}
        const = Fraction(expr.const)
        if c.rel in (">", ">="):
            rows.append((coeffs, const, c.rel == ">"))
        elif c.rel in ("<", "<="):
            rows.append(({k: -v for k, v in coeffs.items()}, -const, c.rel == "<"))
        elif c.rel == "=":
            rows.append((coeffs, const, False))
            rows.append(({k: -v for k, v in coeffs.items()}, -const, False))
        else:
            raise TaSemanticError(f"unsupported relation '{c.rel}' in resilience condition")
    return rows


def _delta_shape(
    rc: Sequence[LinearConstraint],
) -> Optional[tuple[str, dict[str, int]]]:
    """Match some constraint of shape ``n > Σ δ_i·t_i`` (δ_i natural).

    Returns (the bounding parameter, {t_i: δ_i}) or None.
    """
    for c in rc:
        if c.rel not in (">", ">="):
            continue
        expr = c.expr()
        if expr.indeterminates():
            continue
        const = Fraction(expr.const)
        if c.rel == ">" and const != 0:
            continue
        if c.rel == ">=" and const > 0:
            continue
        tops = [(k, v) for k, v in expr.items if v > 0]
        if len(tops) != 1 or tops[0][1] != 1:
            continue
        deltas = {}
        ok = True
        for k, v in expr.items:
            if v > 0:
                continue
            d = -Fraction(v)
            if d.denominator != 1:
                ok = False
                break
            deltas[k] = int(d)
        if ok:
            return tops[0][0], deltas
    return None


def _numerator_window(
    sketch: ThresholdAutomaton,
    name: str,
    denominator: int,
    shape: Optional[tuple[str, dict[str, int]]],
) -> Optional[tuple[int, int]]:
    """Window implied by guard sanity under the δ-shape resilience condition.

    An indeterminate multiplying the bounding parameter stays in [0, 1];
    one multiplying t_i stays strictly inside ±(δ_i + 1); an additive
    constant stays within ±(2Σδ + k + 1).  Unknown roles have no derivable
    window.
    """
    if shape is None:
        return None
    n_param, deltas = shape
    spread = 2 * sum(deltas.values()) + len(deltas) + 1
    lo: Optional[int] = None
    hi: Optional[int] = None

    def widen(a: int, b: int) -> None:
        nonlocal lo, hi
        lo = a if lo is None else min(lo, a)
        hi = b if hi is None else max(hi, b)

    for g in sketch.guard_atoms():
        for param, coeff in g.rhs.items:
            if isinstance(coeff, Indeterminate) and coeff.name == name:
                if param == n_param:
                    widen(0, denominator)
                elif param in deltas:
                    bound = (deltas[param] + 1) * denominator
                    widen(-bound + 1, bound - 1)
                else:
                    return None
        if isinstance(g.rhs.const, Indeterminate) and g.rhs.const.name == name:
            widen(-spread * denominator, spread * denominator)
    if lo is None or hi is None:
        return (0, 0)  # declared but unused: any value works, pin zero
    return (lo, hi)


def _numerator_sane(
    sketch: ThresholdAutomaton,
    name: str,
    value: Fraction,
    n_param: str,
) -> bool:
    """Can the threshold leave [0, n] for some admissible rational valuation?

    Probes each guard in which ``name`` is the only indeterminate; guards
    coupling several indeterminates are not probed (kept).
    """
    params = list(sketch.env.params)
    base = _rc_rows(sketch.env.resilience, params)
    for g in sketch.guard_atoms():
        if g.indeterminates() != {name}:
            continue
        thr = g.rhs.substitute({name: value})
        coeffs = {k: Fraction(v) for k, v in thr.items}
        const = Fraction(thr.const)
        below = ({k: -v for k, v in coeffs.items()}, -const, True)  # thr < 0
        over_coeffs = dict(coeffs)
        over_coeffs[n_param] = over_coeffs.get(n_param, Fraction(0)) - 1
        over = (over_coeffs, const, True)  # thr > n
        if _fm_feasible(base + [below], params) or _fm_feasible(base + [over], params):
            return False
    return True


def sane_space(
    sketch: ThresholdAutomaton,
    denominator: int,
    *,
    num_bound: Optional[int] = None,
    rc: Optional[Sequence[LinearConstraint]] = None,
) -> CandidateSpace:
    """The finite candidate space of sane numerators over ``denominator``.

    The window comes from ``num_bound`` when given, otherwise from the
    δ-shape of the resilience condition; either way, numerators whose
    single-indeterminate guards provably violate sanity for some admissible
    rational valuation are filtered out.  Raises UnboundedSpace when neither
    window source applies.
    """
    if denominator < 1:
        raise TaSemanticError("denominator bound must be positive")
    resilience = tuple(rc) if rc is not None else sketch.env.resilience
    shape = _delta_shape(resilience)
    ranges: list[tuple[str, int, int]] = []
    for name in sorted(sketch.indeterminates):
        if num_bound is not None:
            window: Optional[tuple[int, int]] = (-num_bound * denominator, num_bound * denominator)
        else:
            window = _numerator_window(sketch, name, denominator, shape)
        if window is None:
            raise UnboundedSpace(
                f"no numerator window derivable for '{name}' "
                "(resilience condition not of the bounding shape); pass a numerator bound"
            )
        lo, hi = window
        if shape is not None:
            sane = [
                a
                for a in range(lo, hi + 1)
                if _numerator_sane(sketch, name, Fraction(a, denominator), shape[0])
            ]
            if sane:
                lo, hi = min(sane), max(sane)
                # Windows stay contiguous: sanity regions of linear probes
                # are intervals, which the assertion below double-checks.
                assert len(sane) == hi - lo + 1, "sanity filter produced a gap"
            else:
                lo, hi = 0, -1
        ranges.append((name, lo, hi))
    return CandidateSpace(denominator=denominator, ranges=tuple(ranges))


# ---------------------------------------------------------------------------
# Counterexample-guided search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Counterexample:
    initial: Configuration
    stem: tuple[str, ...]
    loop: tuple[str, ...]


def _transfers(ta: ThresholdAutomaton, formula: EF, cx: _Counterexample) -> bool:
    """Does the recorded lasso remain a valid violation on this automaton?

    Pure replay plus exact formula evaluation; no solver involved.
    """
    try:
        validate(ta, cx.initial)
        if not is_initial(ta, cx.initial):
            return False
        loop_start = run(ta, cx.initial, cx.stem)
        if not _loop_delta_ok(ta, loop_start, cx.loop):
            return False
        return check_lasso(ta, formula, OracleLasso(cx.initial, cx.stem, cx.loop))
    except TaError:
        return False


@dataclass(frozen=True)
class SynthesisResult:
    status: str  # 'found' | 'none_in_space' | 'unknown'
    assignment: Optional[Assignment]
    candidates_tried: int
    pruned: int
    space_size: int
    seconds: float
    log: tuple[tuple[str, str], ...]

    @property
    def found(self) -> bool:
        return self.status == "found"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "assignment": self.assignment.render() if self.assignment else None,
            "candidates_tried": self.candidates_tried,
            "pruned": self.pruned,
            "space_size": self.space_size,
            "seconds": self.seconds,
        }


def synthesize(
    sketch: ThresholdAutomaton,
    spec: Union[EF, str],
    *,
    denominator: int = 1,
    num_bound: Optional[int] = None,
    budget_s: Optional[float] = None,
    solver: Optional[Solver] = None,
    space: Optional[CandidateSpace] = None,
    max_orders: Optional[int] = None,
    verify_pruned: int = 5,
    rng_seed: int = 0,
) -> SynthesisResult:
    """Search the sane candidate space for an assignment whose instantiation
    admits no run satisfying the violation formula.

    Found(μ) means check_spec(TA[μ], spec) = Holds.  NoneInSpace means every
    candidate was either verified Violated or blocked by a transferred
    counterexample (assignments whose environment provably fails to scale
    are skipped as ineligible).  Unknown reports budget exhaustion or an
    inconclusive solver verdict on some candidate.
    """
    started = time.monotonic()
    formula = parse_eltl(spec, sketch) if isinstance(spec, str) else spec
    if space is None:
        space = sane_space(sketch, denominator, num_bound=num_bound)
    candidates = list(space.candidates())

    own = solver is None
    sv = solver if solver is not None else Solver()
    blocked: dict[int, str] = {}
    log: list[tuple[str, str]] = []
    tried = 0
    pruned_count = 0
    unknown_seen = False
    found: Optional[Assignment] = None

    def out_of_budget() -> bool:
        return budget_s is not None and time.monotonic() - started > budget_s

    def result(status: str, assignment: Optional[Assignment]) -> SynthesisResult:
        return SynthesisResult(
            status=status,
            assignment=assignment,
            candidates_tried=tried,
            pruned=pruned_count,
            space_size=space.size,
            seconds=time.monotonic() - started,
            log=tuple(log),
        )

    try:
        for idx, mu in enumerate(candidates):
            if out_of_budget():
                log.append((str(mu), "budget"))
                return result("unknown", None)
            if idx in blocked:
                log.append((str(mu), blocked[idx]))
                continue
            ta_mu = instantiate(sketch, mu)
            if check_multiplicative(ta_mu).kind == "no":
                log.append((str(mu), "non_scaling"))
                continue
            tried += 1
            res = check_spec(
                ta_mu, formula, solver=sv, assume_multiplicative=True, max_orders=max_orders
            )
            if res.status == "holds":
                log.append((str(mu), "found"))
                found = mu
                break
            if res.status == "unknown":
                unknown_seen = True
                log.append((str(mu), "unknown"))
                continue
            blocked[idx] = "violated"
            log.append((str(mu), "violated"))
            w = res.witness
            assert w is not None
            cx = _Counterexample(initial=w.initial, stem=w.stem, loop=w.loop)
            for j in range(idx + 1, len(candidates)):
                if j in blocked:
                    continue
                try:
                    ta_j = instantiate(sketch, candidates[j])
                except TaError:
                    continue
                if _transfers(ta_j, formula, cx):
                    blocked[j] = "pruned"
                    pruned_count += 1

        # Spot-check pruning: a blocked-by-transfer candidate must verify
        # Violated when actually checked.
        pre_blocked = [i for i, why in blocked.items() if why == "pruned"]
        sample = random.Random(rng_seed).sample(
            pre_blocked, min(verify_pruned, len(pre_blocked))
        )
        for i in sorted(sample):
            if out_of_budget():
                break
            res = check_spec(
                instantiate(sketch, candidates[i]),
                formula,
                solver=sv,
                assume_multiplicative=True,
                max_orders=max_orders,
            )
            if res.status != "violated":
                raise InternalInvariantViolation(
                    f"pruned candidate {candidates[i]} did not re-verify as violated "
                    f"(got {res.status})"
                )
    finally:
        if own:
            sv.close()

    if found is not None:
        return result("found", found)
    if unknown_seen:
        return result("unknown", None)
    return result("none_in_space", None)
