"""Specification logic: syntax, normal form, cut graph, and exact evaluation.

Formulas combine F/G/∧ over two kinds of state propositions: counter
emptiness (``S = 0`` for a set of locations, its negation, and conjunctions)
and guard premises (``gf ⇒ cf`` where gf is a positive Boolean combination of
threshold atoms over shared variables).  There is no next/until and no
negation over temporal operators, which is what makes lasso-shaped witness
search complete.

The textual format is s-expressions::

    (and (eq0 l0 l2 l3) (G (eq0 l3)))
    (G (F (and (imp (or (ge x (+ t 1)) (ge x (- n t))) (eq0 l0)) (eq0 l1))))

Atoms: ``(eq0 loc...)``, ``(neq0 loc...)`` or ``(not (eq0 ...))``,
``(ge var expr)``, ``(lt var expr)``; arithmetic ``+ - *`` with integer or
``(/ p q)`` rational literals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from tamc.model import Guard, LinExpr, TaError, ThresholdAutomaton
from tamc.semantics import Configuration


class EltlError(TaError):
    """Malformed or ill-typed specification text."""


class NormalizationFailed(TaError):
    """A formula did not reduce to the supported normal form."""


# ---------------------------------------------------------------------------
# Propositional layer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CF:
    """Counter formula: conjunction of zero-sets and negated zero-sets.

    ``zero`` is the union of all sets required empty; each entry of
    ``nonzero`` is a set of locations of which at least one must be occupied.
    """

    zero: frozenset[str] = frozenset()
    nonzero: tuple[frozenset[str], ...] = ()

    def conjoin(self, other: "CF") -> "CF":
        return CF(self.zero | other.zero, self.nonzero + other.nonzero)

    def render(self) -> str:
        parts = []
        if self.zero:
            parts.append("{" + ",".join(sorted(self.zero)) + "}=0")
        for group in self.nonzero:
            parts.append("!({" + ",".join(sorted(group)) + "}=0)")
        return " & ".join(parts) if parts else "true"


@dataclass(frozen=True)
class GF:
    """Guard formula: positive Boolean combination of threshold atoms."""

    op: str  # 'atom' | 'and' | 'or'
    atom: Optional[Guard] = None
    args: tuple["GF", ...] = ()

    def atoms(self) -> list[Guard]:
        if self.op == "atom":
            assert self.atom is not None
            return [self.atom]
        out: list[Guard] = []
        for a in self.args:
            out.extend(a.atoms())
        return out

    def render(self) -> str:
        if self.op == "atom":
            return str(self.atom)
        joiner = " & " if self.op == "and" else " | "
        return "(" + joiner.join(a.render() for a in self.args) + ")"


@dataclass(frozen=True)
class PF:
    """State proposition: a counter formula, optionally guard-gated."""

    conclusion: CF
    premise: Optional[GF] = None

    def render(self) -> str:
        if self.premise is None:
            return self.conclusion.render()
        return f"({self.premise.render()} => {self.conclusion.render()})"


@dataclass(frozen=True)
class EF:
    """Temporal formula tree: prop leaves, F, G, and conjunction."""

    kind: str  # 'prop' | 'F' | 'G' | 'and'
    prop: Optional[PF] = None
    args: tuple["EF", ...] = ()

    def render(self) -> str:
        if self.kind == "prop":
            assert self.prop is not None
            return self.prop.render()
        if self.kind in ("F", "G"):
            return f"{self.kind} ({self.args[0].render()})"
        return " & ".join(f"({a.render()})" for a in self.args)


def eval_cf(ta: ThresholdAutomaton, config: Configuration, cf: CF) -> bool:
    kappa = config.kappa_map(ta)
    if any(kappa[loc] != 0 for loc in cf.zero):
        return False
    for group in cf.nonzero:
        if all(kappa[loc] == 0 for loc in group):
            return False
    return True


def eval_gf(ta: ThresholdAutomaton, config: Configuration, gf: GF) -> bool:
    if gf.op == "atom":
        assert gf.atom is not None
        return gf.atom.eval(config.shared_map(ta), config.param_map(ta))
    values = (eval_gf(ta, config, a) for a in gf.args)
    return all(values) if gf.op == "and" else any(values)


def eval_prop(ta: ThresholdAutomaton, config: Configuration, pf: PF) -> bool:
    """Evaluate a state proposition on one configuration."""
    if pf.premise is not None and not eval_gf(ta, config, pf.premise):
        return True
    return eval_cf(ta, config, pf.conclusion)


def eval_lasso(
    ta: ThresholdAutomaton,
    formula: EF,
    configs: Sequence[Configuration],
    loop_start: int,
) -> bool:
    """Exact evaluation on the infinite word ``configs[:loop_start] ·
    (configs[loop_start:])^ω``.

    Correct for this F/G/∧ fragment because the loop configurations repeat
    verbatim: any position in the loop eventually reaches every loop
    position, so F and G quantify over suffix positions plus the whole loop.
    """
    n = len(configs)
    if not (0 <= loop_start < n):
        raise ValueError("loop_start out of range")
    memo: dict[tuple[int, int], bool] = {}

    def ev(f: EF, i: int) -> bool:
        key = (id(f), i)
        if key in memo:
            return memo[key]
        if f.kind == "prop":
            assert f.prop is not None
            out = eval_prop(ta, configs[i], f.prop)
        elif f.kind == "and":
            out = all(ev(a, i) for a in f.args)
        elif f.kind == "F":
            positions = range(i, n) if i < loop_start else range(loop_start, n)
            out = any(ev(f.args[0], j) for j in positions)
        elif f.kind == "G":
            positions = range(i, n) if i < loop_start else range(loop_start, n)
            out = all(ev(f.args[0], j) for j in positions)
        else:
            raise EltlError(f"unknown formula node {f.kind!r}")
        memo[key] = out
        return out

    return ev(formula, 0)


def collect_guard_atoms(formula: EF) -> list[Guard]:
    """All distinct threshold atoms in guard premises, first-occurrence order."""
    seen: dict[Guard, None] = {}

    def walk(f: EF) -> None:
        if f.kind == "prop":
            assert f.prop is not None
            if f.prop.premise is not None:
                for atom in f.prop.premise.atoms():
                    seen.setdefault(atom, None)
        for a in f.args:
            walk(a)

    walk(formula)
    return list(seen)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _tokenize(text: str) -> list[str]:
    out: list[str] = []
    token = ""
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            if token:
                out.append(token)
                token = ""
            out.append(ch)
        elif ch.isspace():
            if token:
                out.append(token)
                token = ""
        else:
            token += ch
        i += 1
    if token:
        out.append(token)
    return out


def _read(tokens: list[str], pos: int) -> tuple[object, int]:
    if pos >= len(tokens):
        raise EltlError("unexpected end of specification text")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            node, pos = _read(tokens, pos)
            items.append(node)
        if pos >= len(tokens):
            raise EltlError("missing ')'")
        return items, pos + 1
    if tok == ")":
        raise EltlError("unexpected ')'")
    return tok, pos + 1


def _parse_linexpr(node: object, ta: ThresholdAutomaton) -> LinExpr:
    if isinstance(node, str):
        if node in ta.env.params:
            return LinExpr.make({node: Fraction(1)})
        try:
            return LinExpr.constant(int(node))
        except ValueError:
            raise EltlError(f"unknown parameter or malformed number {node!r}") from None
    assert isinstance(node, list)
    if not node:
        raise EltlError("empty arithmetic expression")
    head = node[0]
    args = [_parse_linexpr(a, ta) for a in node[1:]]
    if head == "+":
        out = LinExpr.constant(0)
        for a in args:
            out = out + a
        return out
    if head == "-":
        if len(args) == 1:
            return args[0].scale(-1)
        out = args[0]
        for a in args[1:]:
            out = out - a
        return out
    if head == "*":
        consts = [a for a in args if a.is_constant()]
        others = [a for a in args if not a.is_constant()]
        if len(others) > 1:
            raise EltlError("nonlinear product in specification arithmetic")
        factor = Fraction(1)
        for c in consts:
            assert isinstance(c.const, Fraction)
            factor *= c.const
        return others[0].scale(factor) if others else LinExpr.constant(factor)
    if head == "/":
        if len(node) != 3:
            raise EltlError("(/ p q) takes exactly two integer arguments")
        p, q = args
        if not (p.is_constant() and q.is_constant()):
            raise EltlError("(/ p q) arguments must be integers")
        assert isinstance(p.const, Fraction) and isinstance(q.const, Fraction)
        if q.const == 0:
            raise EltlError("division by zero")
        return LinExpr.constant(p.const / q.const)
    raise EltlError(f"unknown arithmetic operator {head!r}")


# Internal tagged union for grammar classification during parsing.
_Parsed = tuple[str, object]  # ('cf', CF) | ('gf', GF) | ('pf', PF) | ('ef', EF)


def _as_pf(tagged: _Parsed) -> PF:
    tag, value = tagged
    if tag == "cf":
        return PF(conclusion=value)  # type: ignore[arg-type]
    if tag == "pf":
        return value  # type: ignore[return-value]
    raise EltlError(f"expected a state proposition, found a {tag} formula")


def _as_ef(tagged: _Parsed) -> EF:
    tag, value = tagged
    if tag == "ef":
        return value  # type: ignore[return-value]
    return EF("prop", prop=_as_pf(tagged))


def _parse_node(node: object, ta: ThresholdAutomaton) -> _Parsed:
    locs = set(ta.locations)
    if isinstance(node, str):
        raise EltlError(f"bare symbol {node!r} is not a formula")
    assert isinstance(node, list)
    if not node:
        raise EltlError("empty form")
    head = node[0]
    if head == "eq0":
        names = [str(x) for x in node[1:]]
        for name in names:
            if name not in locs:
                raise EltlError(f"unknown location {name!r} in eq0")
        return ("cf", CF(zero=frozenset(names)))
    if head == "neq0":
        names = [str(x) for x in node[1:]]
        for name in names:
            if name not in locs:
                raise EltlError(f"unknown location {name!r} in neq0")
        return ("cf", CF(nonzero=(frozenset(names),)))
    if head == "not":
        if len(node) != 2 or not isinstance(node[1], list) or node[1][:1] != ["eq0"]:
            raise EltlError("negation is only supported as (not (eq0 ...))")
        inner = _parse_node(node[1], ta)[1]
        assert isinstance(inner, CF)
        return ("cf", CF(nonzero=(inner.zero,)))
    if head in ("ge", "lt"):
        if len(node) != 3 or not isinstance(node[1], str):
            raise EltlError(f"({head} var expr) takes a shared variable and an expression")
        var = node[1]
        if var not in ta.shared:
            raise EltlError(f"unknown shared variable {var!r} in guard atom")
        rhs = _parse_linexpr(node[2], ta)
        return ("gf", GF("atom", atom=Guard(var, ">=" if head == "ge" else "<", rhs)))
    if head == "imp":
        if len(node) != 3:
            raise EltlError("(imp gf cf) takes exactly two arguments")
        prem_tag, prem = _parse_node(node[1], ta)
        concl_tag, concl = _parse_node(node[2], ta)
        if prem_tag != "gf":
            raise EltlError("the premise of imp must be a guard formula")
        if concl_tag != "cf":
            raise EltlError("the conclusion of imp must be a counter formula")
        return ("pf", PF(conclusion=concl, premise=prem))  # type: ignore[arg-type]
    if head in ("F", "G"):
        if len(node) != 2:
            raise EltlError(f"({head} x) takes exactly one argument")
        body = _as_ef(_parse_node(node[1], ta))
        return ("ef", EF(head, args=(body,)))
    if head == "and":
        children = [_parse_node(a, ta) for a in node[1:]]
        if not children:
            return ("cf", CF())
        tags = {t for t, _ in children}
        if tags <= {"cf"}:
            out = CF()
            for _, c in children:
                out = out.conjoin(c)  # type: ignore[arg-type]
            return ("cf", out)
        if tags <= {"gf"}:
            return ("gf", GF("and", args=tuple(c for _, c in children)))  # type: ignore[misc]
        if "gf" in tags:
            raise EltlError("cannot mix guard formulas with other formulas under and")
        return ("ef", EF("and", args=tuple(_as_ef(c) for c in children)))
    if head == "or":
        children = [_parse_node(a, ta) for a in node[1:]]
        if not children or any(t != "gf" for t, _ in children):
            raise EltlError("or is only supported between guard formulas")
        return ("gf", GF("or", args=tuple(c for _, c in children)))  # type: ignore[misc]
    raise EltlError(f"unknown form {head!r}")


def parse_eltl(text: str, ta: ThresholdAutomaton) -> EF:
    """Parse a specification s-expression against a concrete automaton."""
    tokens = _tokenize(text)
    if not tokens:
        raise EltlError("empty specification")
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise EltlError("trailing input after the formula")
    return _as_ef(_parse_node(node, ta))


# ---------------------------------------------------------------------------
# Normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NF:
    """Normal form: props ∧ ⋀F(eventualities) ∧ G(always).

    ``always`` is None when absent; a present ``always`` is itself flattened
    (its own ``always`` is None) because G distributes over conjunction and
    nested G collapses.
    """

    phi0: tuple[PF, ...] = ()
    eventualities: tuple["NF", ...] = ()
    always: Optional["NF"] = None

    def is_trivial(self) -> bool:
        return not self.phi0 and not self.eventualities and self.always is None


def _merge_always(parts: list[NF]) -> Optional[NF]:
    live = [p for p in parts if not p.is_trivial()]
    if not live:
        return None
    phi0: tuple[PF, ...] = ()
    evs: tuple[NF, ...] = ()
    for p in live:
        phi0 += p.phi0
        evs += p.eventualities
        assert p.always is None
    return NF(phi0, evs, None)


def _flatten_under_g(nf: NF) -> NF:
    """G(φ0 ∧ F… ∧ Gψ) = G φ0 ∧ G F… ∧ G ψ: pull ψ's parts up."""
    if nf.always is None:
        return nf
    inner = _flatten_under_g(nf.always)
    return NF(nf.phi0 + inner.phi0, nf.eventualities + inner.eventualities, None)


def to_normal_form(formula: EF) -> NF:
    """Rewrite into props ∧ ⋀F ∧ G shape.

    Uses the equivalences G(a∧b) = Ga∧Gb, GGa = Ga, F(Fa∧Fb∧…) = Fa∧Fb∧…
    and conjunction flattening.  Every formula of this F/G/∧ grammar reduces;
    an unknown node kind raises :class:`NormalizationFailed`.
    """
    if formula.kind == "prop":
        assert formula.prop is not None
        return NF(phi0=(formula.prop,))
    if formula.kind == "and":
        parts = [to_normal_form(a) for a in formula.args]
        phi0: tuple[PF, ...] = ()
        evs: tuple[NF, ...] = ()
        always_parts: list[NF] = []
        for p in parts:
            phi0 += p.phi0
            evs += p.eventualities
            if p.always is not None:
                always_parts.append(p.always)
        return NF(phi0, evs, _merge_always(always_parts))
    if formula.kind == "F":
        inner = to_normal_form(formula.args[0])
        if not inner.phi0 and inner.always is None and inner.eventualities:
            # F(Fa ∧ Fb) = Fa ∧ Fb (and FFa = Fa as the singleton case).
            return NF(eventualities=inner.eventualities)
        return NF(eventualities=(inner,))
    if formula.kind == "G":
        inner = to_normal_form(formula.args[0])
        return NF(always=_flatten_under_g(inner) if not inner.is_trivial() else NF())
    raise NormalizationFailed(f"cannot normalize node kind {formula.kind!r}")


# ---------------------------------------------------------------------------
# Cut graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CutNode:
    idx: int
    label: str
    local: tuple[PF, ...]
    globals_: tuple[PF, ...]
    in_loop: bool
    kind: str  # 'root' | 'ev' | 'loop_st' | 'loop_end'


@dataclass(frozen=True)
class CutGraph:
    nodes: tuple[CutNode, ...]
    edges: frozenset[tuple[int, int]]

    @property
    def loop_st(self) -> CutNode:
        return next(n for n in self.nodes if n.kind == "loop_st")

    @property
    def loop_end(self) -> CutNode:
        return next(n for n in self.nodes if n.kind == "loop_end")

    @property
    def root(self) -> Optional[CutNode]:
        return next((n for n in self.nodes if n.kind == "root"), None)


def _pf_label(props: tuple[PF, ...]) -> str:
    return " & ".join(p.render() for p in props) if props else "true"


def cut_graph(nf: NF) -> CutGraph:
    """Build the ordering skeleton whose topological orders are lasso shapes.

    One node per eventuality, plus loop_st/loop_end, plus a root node when
    the top level carries its own proposition or global constraint.
    Eventualities met before the loop point edge into loop_st; eventualities
    under a G live between loop_st and loop_end.
    """
    nodes: list[CutNode] = []
    edges: set[tuple[int, int]] = set()

    def new_node(label: str, local: tuple[PF, ...], globals_: tuple[PF, ...], in_loop: bool, kind: str) -> int:
        idx = len(nodes)
        nodes.append(CutNode(idx, label, local, globals_, in_loop, kind))
        return idx

    root_globals = nf.always.phi0 if nf.always is not None else ()
    root_trivial = not nf.phi0 and not root_globals
    root_idx: Optional[int] = None
    if not root_trivial:
        root_idx = new_node(_pf_label(nf.phi0), nf.phi0, root_globals, False, "root")

    loop_st = new_node("loop_st", (), (), False, "loop_st")
    loop_end = new_node("loop_end", (), (), True, "loop_end")
    edges.add((loop_st, loop_end))
    if root_idx is not None:
        edges.add((root_idx, loop_st))

    def add_stem(ev: NF, parent: Optional[int]) -> None:
        globals_ = ev.always.phi0 if ev.always is not None else ()
        idx = new_node(_pf_label(ev.phi0), ev.phi0, globals_, False, "ev")
        if parent is not None:
            edges.add((parent, idx))
        edges.add((idx, loop_st))
        for child in ev.eventualities:
            add_stem(child, idx)
        if ev.always is not None:
            for child in ev.always.eventualities:
                add_loop(child, None)

    def add_loop(ev: NF, parent: Optional[int]) -> None:
        globals_ = ev.always.phi0 if ev.always is not None else ()
        idx = new_node(_pf_label(ev.phi0), ev.phi0, globals_, True, "ev")
        edges.add((loop_st, idx))
        edges.add((idx, loop_end))
        if parent is not None:
            edges.add((parent, idx))
        for child in ev.eventualities:
            add_loop(child, idx)
        if ev.always is not None:
            for child in ev.always.eventualities:
                add_loop(child, idx)

    for ev in nf.eventualities:
        add_stem(ev, root_idx)
    if nf.always is not None:
        for ev in nf.always.eventualities:
            add_loop(ev, None)

    return CutGraph(tuple(nodes), frozenset(edges))


def topo_orders(graph: CutGraph, *, max_orders: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    """Lazily enumerate all topological orderings, deterministically.

    Candidates at each step are taken in node-index order, so the first
    ordering (and the whole sequence) is reproducible.
    """
    n = len(graph.nodes)
    succs: dict[int, list[int]] = {i: [] for i in range(n)}
    indeg = [0] * n
    for a, b in sorted(graph.edges):
        succs[a].append(b)
        indeg[b] += 1

    produced = 0

    def rec(order: list[int], indeg: list[int], remaining: int) -> Iterator[tuple[int, ...]]:
        nonlocal produced
        if max_orders is not None and produced >= max_orders:
            return
        if remaining == 0:
            produced += 1
            yield tuple(order)
            return
        for v in range(n):
            if indeg[v] == 0 and v not in order_set:
                order.append(v)
                order_set.add(v)
                for w in succs[v]:
                    indeg[w] -= 1
                yield from rec(order, indeg, remaining - 1)
                for w in succs[v]:
                    indeg[w] += 1
                order_set.discard(v)
                order.pop()
            if max_orders is not None and produced >= max_orders:
                return

    order_set: set[int] = set()
    yield from rec([], indeg, n)
