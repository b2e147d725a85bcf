"""Core model types: linear expressions, guards, rules, environments, automata.

A threshold automaton is a finite location graph whose rules are guarded by
threshold conditions ``x >= a0 + a1*p1 + ...`` (rise guards) or
``x < a0 + a1*p1 + ...`` (fall guards) over shared counters ``x`` that only
ever increase, and environment parameters ``p1, ...`` constrained by a
resilience condition.  All arithmetic is exact: coefficients are
:class:`fractions.Fraction` values, or named indeterminates in sketch
automata whose guards are to be synthesized.

The module also provides the JSON file format (:func:`parse_ta`,
:func:`print_ta`), guard normalization to integer coefficients
(:func:`normalize_guard`), and the multiplicativity check
(:func:`check_multiplicative`) that the symbolic pipeline relies on.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union


class TaError(Exception):
    """Base class for model errors."""


class TaSyntaxError(TaError):
    """Malformed source text (JSON or embedded expression grammar)."""


class TaSemanticError(TaError):
    """Well-formed text that violates a model constraint."""


class ResourceLimit(TaError):
    """A bounded computation exceeded its configured cap."""


class InternalInvariantViolation(TaError):
    """A structural guarantee failed; indicates a bug, not bad input."""


@dataclass(frozen=True, order=True)
class Indeterminate:
    """A named coefficient slot to be filled in by synthesis."""

    name: str

    def __str__(self) -> str:
        return self.name


# A coefficient is an exact rational or an indeterminate symbol.
Coeff = Union[Fraction, Indeterminate]
Rat = Union[int, Fraction]


def _as_fraction(value: Rat) -> Fraction:
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    return Fraction(value)


@dataclass(frozen=True)
class LinExpr:
    """A linear expression ``const + sum(coeff_i * param_i)``.

    ``items`` is kept sorted by parameter name so that structurally equal
    expressions compare and hash equal.  Coefficients and the constant may be
    indeterminates in sketch automata.
    """

    items: tuple[tuple[str, Coeff], ...] = ()
    const: Coeff = Fraction(0)

    @staticmethod
    def make(coeffs: Mapping[str, Coeff] | None = None, const: Coeff = Fraction(0)) -> "LinExpr":
        items = []
        for name, c in sorted((coeffs or {}).items()):
            if isinstance(c, Fraction) and c == 0:
                continue
            items.append((name, c))
        return LinExpr(tuple(items), const)

    @staticmethod
    def constant(value: Rat) -> "LinExpr":
        return LinExpr((), _as_fraction(value))

    @property
    def coeffs(self) -> dict[str, Coeff]:
        return dict(self.items)

    def params(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.items)

    def indeterminates(self) -> set[str]:
        found = {c.name for _, c in self.items if isinstance(c, Indeterminate)}
        if isinstance(self.const, Indeterminate):
            found.add(self.const.name)
        return found

    def is_constant(self) -> bool:
        return not self.items

    def substitute(self, assignment: Mapping[str, Rat]) -> "LinExpr":
        """Replace indeterminates by rationals."""

        def sub(c: Coeff) -> Coeff:
            if isinstance(c, Indeterminate):
                if c.name not in assignment:
                    raise TaSemanticError(f"no value for indeterminate '{c.name}'")
                return _as_fraction(assignment[c.name])
            return c

        return LinExpr.make({n: sub(c) for n, c in self.items}, sub(self.const))

    def eval(self, valuation: Mapping[str, Rat]) -> Fraction:
        if self.indeterminates():
            raise TaSemanticError(
                f"cannot evaluate expression with indeterminates {sorted(self.indeterminates())}"
            )
        total = _as_fraction(self.const)  # type: ignore[arg-type]
        for name, c in self.items:
            if name not in valuation:
                raise TaSemanticError(f"no value for parameter '{name}'")
            total += _as_fraction(c) * _as_fraction(valuation[name])  # type: ignore[arg-type]
        return total

    def __add__(self, other: "LinExpr") -> "LinExpr":
        coeffs = {n: c for n, c in self.items}
        for n, c in other.items:
            if n in coeffs:
                if isinstance(coeffs[n], Indeterminate) or isinstance(c, Indeterminate):
                    raise TaSemanticError("cannot add indeterminate coefficients")
                coeffs[n] = coeffs[n] + c  # type: ignore[operator]
            else:
                coeffs[n] = c
        if isinstance(self.const, Indeterminate) or isinstance(other.const, Indeterminate):
            raise TaSemanticError("cannot add indeterminate constants")
        return LinExpr.make(coeffs, self.const + other.const)  # type: ignore[operator]

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        return self + other.scale(-1)

    def scale(self, factor: Rat) -> "LinExpr":
        f = _as_fraction(factor)
        coeffs: dict[str, Coeff] = {}
        for n, c in self.items:
            if isinstance(c, Indeterminate):
                if f == 1:
                    coeffs[n] = c
                    continue
                raise TaSemanticError("cannot scale an indeterminate coefficient")
            coeffs[n] = c * f
        const: Coeff
        if isinstance(self.const, Indeterminate):
            if f != 1:
                raise TaSemanticError("cannot scale an indeterminate constant")
            const = self.const
        else:
            const = self.const * f
        return LinExpr.make(coeffs, const)

    def denominator_lcm(self) -> int:
        """Least common multiple of all coefficient denominators (1 if none)."""
        dens = [c.denominator for _, c in self.items if isinstance(c, Fraction)]
        if isinstance(self.const, Fraction):
            dens.append(self.const.denominator)
        out = 1
        for d in dens:
            out = out * d // math.gcd(out, d)
        return out

    def render(self, param_order: Sequence[str] | None = None) -> str:
        """Deterministic textual form, parseable by the expression grammar."""
        order = list(param_order) if param_order is not None else [n for n, _ in self.items]
        coeffs = self.coeffs
        parts: list[tuple[int, str]] = []  # (sign, magnitude-text)

        def coeff_text(c: Coeff, name: str) -> tuple[int, str]:
            if isinstance(c, Indeterminate):
                return (1, f"{c.name}*{name}")
            if c < 0:
                c = -c
                sign = -1
            else:
                sign = 1
            if c == 1:
                return (sign, name)
            if c.denominator == 1:
                return (sign, f"{c.numerator}*{name}")
            return (sign, f"{c.numerator}/{c.denominator}*{name}")

        for name in order:
            if name in coeffs:
                parts.append(coeff_text(coeffs[name], name))
        for name in coeffs:
            if name not in order:
                parts.append(coeff_text(coeffs[name], name))
        if isinstance(self.const, Indeterminate):
            parts.append((1, self.const.name))
        elif self.const != 0:
            c = self.const
            sign = 1 if c > 0 else -1
            c = abs(c)
            parts.append((sign, str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"))
        if not parts:
            return "0"
        first_sign, first_text = parts[0]
        out = ("-" if first_sign < 0 else "") + first_text
        for sign, text in parts[1:]:
            out += (" - " if sign < 0 else " + ") + text
        return out

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Guard:
    """A threshold guard ``var >= rhs`` (rise) or ``var < rhs`` (fall)."""

    var: str
    op: str  # ">=" or "<"
    rhs: LinExpr

    def __post_init__(self) -> None:
        if self.op not in (">=", "<"):
            raise TaSemanticError(f"guard operator must be '>=' or '<', got {self.op!r}")

    @property
    def is_rise(self) -> bool:
        return self.op == ">="

    @property
    def is_fall(self) -> bool:
        return self.op == "<"

    def indeterminates(self) -> set[str]:
        return self.rhs.indeterminates()

    def substitute(self, assignment: Mapping[str, Rat]) -> "Guard":
        return Guard(self.var, self.op, self.rhs.substitute(assignment))

    def eval(self, shared: Mapping[str, Rat], params: Mapping[str, Rat]) -> bool:
        lhs = _as_fraction(shared[self.var])
        rhs = self.rhs.eval(params)
        return lhs >= rhs if self.op == ">=" else lhs < rhs

    def render(self, param_order: Sequence[str] | None = None) -> str:
        return f"{self.var} {self.op} {self.rhs.render(param_order)}"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class NormalizedGuard:
    """An integer-coefficient form of a guard: ``scale*var op rhs``.

    ``scale`` is the least common multiple of the denominators appearing in
    the original right-hand side, so all coefficients of ``rhs`` and ``scale``
    itself are integers and the normalized atom holds exactly iff the original
    one does.
    """

    var: str
    op: str
    scale: int
    rhs: LinExpr

    def eval(self, shared: Mapping[str, Rat], params: Mapping[str, Rat]) -> bool:
        lhs = self.scale * _as_fraction(shared[self.var])
        rhs = self.rhs.eval(params)
        return lhs >= rhs if self.op == ">=" else lhs < rhs


def normalize_guard(guard: Guard) -> NormalizedGuard:
    """Clear denominators: return an equivalent integer-coefficient atom."""
    if guard.indeterminates():
        raise TaSemanticError("cannot normalize a guard with indeterminates; instantiate first")
    scale = guard.rhs.denominator_lcm()
    rhs = guard.rhs.scale(scale)
    for _, c in rhs.items:
        assert isinstance(c, Fraction) and c.denominator == 1
    assert isinstance(rhs.const, Fraction) and rhs.const.denominator == 1
    return NormalizedGuard(guard.var, guard.op, scale, rhs)


@dataclass(frozen=True)
class LinearConstraint:
    """A resilience constraint ``lhs rel rhs`` over the parameters."""

    lhs: LinExpr
    rel: str  # one of <, <=, =, >=, >
    rhs: LinExpr

    def __post_init__(self) -> None:
        if self.rel not in ("<", "<=", "=", ">=", ">"):
            raise TaSemanticError(f"unknown relation {self.rel!r}")

    def expr(self) -> LinExpr:
        """The constraint as ``expr rel 0``."""
        return self.lhs - self.rhs

    def is_homogeneous(self) -> bool:
        e = self.expr()
        return isinstance(e.const, Fraction) and e.const == 0

    def holds(self, valuation: Mapping[str, Rat]) -> bool:
        value = self.expr().eval(valuation)
        return {
            "<": value < 0,
            "<=": value <= 0,
            "=": value == 0,
            ">=": value >= 0,
            ">": value > 0,
        }[self.rel]

    def render(self, param_order: Sequence[str] | None = None) -> str:
        return f"{self.lhs.render(param_order)} {self.rel} {self.rhs.render(param_order)}"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Environment:
    """Parameters, resilience condition, and the system-size function."""

    params: tuple[str, ...]
    resilience: tuple[LinearConstraint, ...]
    size_fn: LinExpr

    def admits(self, valuation: Mapping[str, Rat]) -> bool:
        """Does the valuation satisfy the resilience condition?"""
        return all(c.holds(valuation) for c in self.resilience)

    def size(self, valuation: Mapping[str, Rat]) -> int:
        """Number of modeled processes; must be a nonnegative integer."""
        value = self.size_fn.eval(valuation)
        if value.denominator != 1 or value < 0:
            raise TaSemanticError(
                f"system size {value} is not a nonnegative integer at {dict(valuation)}"
            )
        return int(value)

    def size_ok(self, valuation: Mapping[str, Rat]) -> bool:
        value = self.size_fn.eval(valuation)
        return value.denominator == 1 and value >= 0


@dataclass(frozen=True)
class Rule:
    """A rule ``from -> to`` with a guard conjunction and counter increments."""

    id: str
    from_loc: str
    to_loc: str
    guard: tuple[Guard, ...]
    update: tuple[tuple[str, int], ...]

    @property
    def update_map(self) -> dict[str, int]:
        return dict(self.update)

    def indeterminates(self) -> set[str]:
        out: set[str] = set()
        for g in self.guard:
            out |= g.indeterminates()
        return out

    def substitute(self, assignment: Mapping[str, Rat]) -> "Rule":
        return Rule(
            self.id,
            self.from_loc,
            self.to_loc,
            tuple(g.substitute(assignment) for g in self.guard),
            self.update,
        )


@dataclass(frozen=True)
class ThresholdAutomaton:
    """A threshold automaton (or a sketch of one, if indeterminates remain)."""

    env: Environment
    locations: tuple[str, ...]
    initial: tuple[str, ...]
    shared: tuple[str, ...]
    rules: tuple[Rule, ...]
    indeterminates: tuple[str, ...] = ()
    name: str = "ta"

    def __post_init__(self) -> None:
        locset = set(self.locations)
        if len(locset) != len(self.locations):
            raise TaSemanticError("duplicate location names")
        if not self.initial:
            raise TaSemanticError("the set of initial locations must not be empty")
        for loc in self.initial:
            if loc not in locset:
                raise TaSemanticError(f"initial location '{loc}' is not declared")
        sharedset = set(self.shared)
        if len(sharedset) != len(self.shared):
            raise TaSemanticError("duplicate shared variable names")
        paramset = set(self.env.params)
        if len(paramset) != len(self.env.params):
            raise TaSemanticError("duplicate parameter names")
        if sharedset & paramset:
            raise TaSemanticError("shared variables and parameters must be disjoint")
        indetset = set(self.indeterminates)
        seen_ids: set[str] = set()
        for rule in self.rules:
            if rule.id in seen_ids:
                raise TaSemanticError(f"duplicate rule id '{rule.id}'")
            seen_ids.add(rule.id)
            if rule.from_loc not in locset:
                raise TaSemanticError(f"rule '{rule.id}': unknown location '{rule.from_loc}'")
            if rule.to_loc not in locset:
                raise TaSemanticError(f"rule '{rule.id}': unknown location '{rule.to_loc}'")
            for g in rule.guard:
                if g.var not in sharedset:
                    raise TaSemanticError(
                        f"rule '{rule.id}': guard over undeclared shared variable '{g.var}'"
                    )
                for pname in g.rhs.params():
                    if pname not in paramset:
                        raise TaSemanticError(
                            f"rule '{rule.id}': guard mentions undeclared parameter '{pname}'"
                        )
                for ind in g.indeterminates():
                    if ind not in indetset:
                        raise TaSemanticError(
                            f"rule '{rule.id}': undeclared indeterminate '{ind}'"
                        )
            for var, amount in rule.update:
                if var not in sharedset:
                    raise TaSemanticError(
                        f"rule '{rule.id}': update of undeclared shared variable '{var}'"
                    )
                if amount < 0:
                    raise TaSemanticError(f"rule '{rule.id}': updates must be nonnegative")
        for pname in self.size_params_used():
            if pname not in paramset:
                raise TaSemanticError(f"system size mentions undeclared parameter '{pname}'")

    def size_params_used(self) -> set[str]:
        used = set(self.env.size_fn.params())
        for c in self.env.resilience:
            used |= set(c.expr().params())
        return used

    # -- derived lookups -------------------------------------------------

    @property
    def loc_index(self) -> dict[str, int]:
        return {loc: i for i, loc in enumerate(self.locations)}

    @property
    def shared_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.shared)}

    @property
    def param_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.env.params)}

    @property
    def rules_by_id(self) -> dict[str, Rule]:
        return {r.id: r for r in self.rules}

    def rules_from(self, loc: str) -> list[Rule]:
        return [r for r in self.rules if r.from_loc == loc]

    def rules_into(self, loc: str) -> list[Rule]:
        return [r for r in self.rules if r.to_loc == loc]

    def guard_atoms(self) -> list[Guard]:
        """All distinct guard atoms, in first-occurrence order."""
        seen: dict[Guard, None] = {}
        for rule in self.rules:
            for g in rule.guard:
                seen.setdefault(g, None)
        return list(seen)

    def is_sketch(self) -> bool:
        return bool(self.indeterminates)

    def has_only_constant_rise_guards(self) -> bool:
        """True when every guard is a rise guard with a constant threshold."""
        for g in self.guard_atoms():
            if g.is_fall or not g.rhs.is_constant() or g.indeterminates():
                return False
        return True

    def substitute(self, assignment: Mapping[str, Rat]) -> "ThresholdAutomaton":
        """Replace every indeterminate with the assigned rational value."""
        missing = set(self.indeterminates) - set(assignment)
        if missing:
            raise TaSemanticError(f"assignment misses indeterminates {sorted(missing)}")
        return ThresholdAutomaton(
            env=self.env,
            locations=self.locations,
            initial=self.initial,
            shared=self.shared,
            rules=tuple(r.substitute(assignment) for r in self.rules),
            indeterminates=(),
            name=self.name,
        )


# ---------------------------------------------------------------------------
# Expression grammar
#
#   linexpr := ['-'] term (('+' | '-') term)*
#   term    := factor ('*' factor)*
#   factor  := NUMBER ['/' NUMBER] | IDENT | '(' linexpr ')'
#
# where a term multiplies at most one parameter with at most one coefficient
# (a rational literal, a parenthesized constant expression, or an
# indeterminate).  Decimal literals are rejected; rationals are written p/q.
# ---------------------------------------------------------------------------


@dataclass
class _Token:
    kind: str  # 'num', 'ident', 'op'
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                raise TaSyntaxError(f"decimal literals are not allowed (column {i}): {text!r}")
            tokens.append(_Token("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
            continue
        if ch in "+-*/()":
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        raise TaSyntaxError(f"unexpected character {ch!r} at column {i} in {text!r}")
    return tokens


class _ExprParser:
    def __init__(self, text: str, params: Sequence[str], indets: Sequence[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.params = set(params)
        self.indets = set(indets)

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> _Token:
        tok = self._peek()
        if tok is None:
            raise TaSyntaxError(f"unexpected end of expression in {self.text!r}")
        self.pos += 1
        return tok

    def parse(self) -> LinExpr:
        expr = self._linexpr()
        if self._peek() is not None:
            tok = self._peek()
            assert tok is not None
            raise TaSyntaxError(f"trailing input at column {tok.pos} in {self.text!r}")
        return expr

    def _linexpr(self) -> LinExpr:
        negate = False
        tok = self._peek()
        if tok is not None and tok.kind == "op" and tok.text in "+-":
            self._next()
            negate = tok.text == "-"
        expr = self._term()
        if negate:
            expr = expr.scale(-1)
        while True:
            tok = self._peek()
            if tok is None or tok.kind != "op" or tok.text not in "+-":
                break
            self._next()
            rhs = self._term()
            expr = expr + (rhs.scale(-1) if tok.text == "-" else rhs)
        return expr

    def _term(self) -> LinExpr:
        factors = [self._factor()]
        while True:
            tok = self._peek()
            if tok is None or tok.kind != "op" or tok.text != "*":
                break
            self._next()
            factors.append(self._factor())
        return self._combine(factors)

    def _combine(self, factors: list[LinExpr]) -> LinExpr:
        param_factors = [f for f in factors if not f.is_constant()]
        const_factors = [f for f in factors if f.is_constant()]
        if len(param_factors) > 1:
            raise TaSyntaxError(f"nonlinear product of parameters in {self.text!r}")
        coeff: Coeff = Fraction(1)
        for f in const_factors:
            c = f.const
            if isinstance(c, Indeterminate):
                if not (isinstance(coeff, Fraction) and coeff == 1):
                    raise TaSyntaxError(
                        f"indeterminates cannot be scaled by other coefficients in {self.text!r}"
                    )
                coeff = c
            else:
                if isinstance(coeff, Indeterminate):
                    if c == 1:
                        continue
                    raise TaSyntaxError(
                        f"indeterminates cannot be scaled by other coefficients in {self.text!r}"
                    )
                coeff = coeff * c
        if not param_factors:
            return LinExpr((), coeff)
        base = param_factors[0]
        if base.indeterminates() and (not isinstance(coeff, Fraction) or coeff != 1):
            raise TaSyntaxError(
                f"indeterminates cannot be scaled by other coefficients in {self.text!r}"
            )
        if isinstance(coeff, Indeterminate):
            if len(base.items) != 1 or base.const != 0:
                raise TaSyntaxError(
                    f"an indeterminate may only scale a single parameter in {self.text!r}"
                )
            name, c = base.items[0]
            if not (isinstance(c, Fraction) and c == 1):
                raise TaSyntaxError(
                    f"an indeterminate may only scale a bare parameter in {self.text!r}"
                )
            return LinExpr.make({name: coeff})
        return base.scale(coeff)

    def _factor(self) -> LinExpr:
        tok = self._next()
        if tok.kind == "num":
            numer = int(tok.text)
            nxt = self._peek()
            if nxt is not None and nxt.kind == "op" and nxt.text == "/":
                self._next()
                den_tok = self._next()
                if den_tok.kind != "num":
                    raise TaSyntaxError(
                        f"expected an integer denominator at column {den_tok.pos} in {self.text!r}"
                    )
                denom = int(den_tok.text)
                if denom == 0:
                    raise TaSyntaxError(f"zero denominator in {self.text!r}")
                return LinExpr.constant(Fraction(numer, denom))
            return LinExpr.constant(numer)
        if tok.kind == "ident":
            if tok.text in self.params:
                return LinExpr.make({tok.text: Fraction(1)})
            if tok.text in self.indets:
                return LinExpr((), Indeterminate(tok.text))
            raise TaSyntaxError(
                f"unknown identifier '{tok.text}' at column {tok.pos} in {self.text!r}"
            )
        if tok.kind == "op" and tok.text == "(":
            inner = self._linexpr()
            closing = self._next()
            if closing.kind != "op" or closing.text != ")":
                raise TaSyntaxError(f"expected ')' at column {closing.pos} in {self.text!r}")
            return inner
        raise TaSyntaxError(f"unexpected token {tok.text!r} at column {tok.pos} in {self.text!r}")


def parse_linexpr(text: str, params: Sequence[str], indets: Sequence[str] = ()) -> LinExpr:
    """Parse a linear expression over the given parameter names."""
    return _ExprParser(text, params, indets).parse()


def parse_guard_atom(text: str, shared: Sequence[str], params: Sequence[str], indets: Sequence[str] = ()) -> Guard:
    """Parse ``<sharedvar> (>=|<) <linexpr>``."""
    for op in (">=", "<"):
        if op in text:
            left, right = text.split(op, 1)
            # ">=" contains no "<", and a "<" split cannot eat a ">=".
            var = left.strip()
            if var not in shared:
                raise TaSemanticError(f"guard over undeclared shared variable '{var}' in {text!r}")
            rhs = parse_linexpr(right, params, indets)
            return Guard(var, op, rhs)
    raise TaSyntaxError(f"guard atom must use '>=' or '<': {text!r}")


_REL_ORDER = ("<=", ">=", "=", "<", ">")  # two-char relations first


def parse_constraint(text: str, params: Sequence[str]) -> LinearConstraint:
    """Parse ``<linexpr> rel <linexpr>``."""
    for rel in _REL_ORDER:
        idx = text.find(rel)
        if idx >= 0:
            lhs = parse_linexpr(text[:idx], params)
            rhs = parse_linexpr(text[idx + len(rel):], params)
            return LinearConstraint(lhs, rel, rhs)
    raise TaSyntaxError(f"constraint must contain a relation (<, <=, =, >=, >): {text!r}")


# ---------------------------------------------------------------------------
# JSON file format
# ---------------------------------------------------------------------------


def parse_ta(source: Union[str, Mapping], *, strict: bool = False, name: str | None = None) -> ThresholdAutomaton:
    """Parse a threshold automaton from JSON text or an already-decoded dict.

    With ``strict=True`` rule updates must be 0/1 increments; otherwise larger
    increments are admitted with a warning.
    """
    if isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise TaSyntaxError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    else:
        data = dict(source)
    if not isinstance(data, dict):
        raise TaSyntaxError("top-level JSON value must be an object")

    def need(key: str) -> object:
        if key not in data:
            raise TaSemanticError(f"missing required key '{key}'")
        return data[key]

    params = _string_list(need("parameters"), "parameters")
    resilience_src = _string_list(data.get("resilience", []), "resilience")
    size_src = need("system_size")
    if not isinstance(size_src, str):
        raise TaSemanticError("'system_size' must be a string expression")
    locations = _string_list(need("locations"), "locations")
    initial = _string_list(need("initial"), "initial")
    shared = _string_list(data.get("shared", []), "shared")
    indets = _string_list(data.get("indeterminates", []), "indeterminates")

    resilience = tuple(parse_constraint(s, params) for s in resilience_src)
    size_fn = parse_linexpr(size_src, params)
    env = Environment(tuple(params), resilience, size_fn)

    rules_src = need("rules")
    if not isinstance(rules_src, list):
        raise TaSemanticError("'rules' must be a list")
    rules = []
    for i, r in enumerate(rules_src):
        if not isinstance(r, dict):
            raise TaSemanticError(f"rules[{i}] must be an object")
        try:
            rid = r["id"]
            from_loc = r["from"]
            to_loc = r["to"]
        except KeyError as exc:
            raise TaSemanticError(f"rules[{i}]: missing key {exc.args[0]!r}") from exc
        guard_src = r.get("guard", [])
        if not isinstance(guard_src, list):
            raise TaSemanticError(f"rules[{i}]: 'guard' must be a list of atoms")
        guards = []
        for j, atom in enumerate(guard_src):
            if not isinstance(atom, str):
                raise TaSemanticError(f"rules[{i}].guard[{j}] must be a string")
            try:
                guards.append(parse_guard_atom(atom, shared, params, indets))
            except TaError as exc:
                raise type(exc)(f"rules[{i}].guard[{j}]: {exc}") from exc
        update_src = r.get("update", {})
        if not isinstance(update_src, dict):
            raise TaSemanticError(f"rules[{i}]: 'update' must be an object")
        update = []
        for var, amount in update_src.items():
            if not isinstance(amount, int) or isinstance(amount, bool) or amount < 0:
                raise TaSemanticError(f"rules[{i}]: update of '{var}' must be a nonnegative integer")
            if amount > 1:
                if strict:
                    raise TaSemanticError(
                        f"rules[{i}]: update of '{var}' is {amount}, but strict mode only admits 0/1"
                    )
                warnings.warn(
                    f"rule '{rid}': update of '{var}' by {amount} (greater than 1)",
                    stacklevel=2,
                )
            if amount > 0:
                update.append((var, amount))
        update.sort()
        rules.append(Rule(str(rid), str(from_loc), str(to_loc), tuple(guards), tuple(update)))

    return ThresholdAutomaton(
        env=env,
        locations=tuple(locations),
        initial=tuple(initial),
        shared=tuple(shared),
        rules=tuple(rules),
        indeterminates=tuple(indets),
        name=name or str(data.get("name", "ta")),
    )


def _string_list(value: object, key: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise TaSemanticError(f"'{key}' must be a list of strings")
    return list(value)


def print_ta(ta: ThresholdAutomaton) -> dict:
    """Serialize to the JSON file format; ``parse_ta(print_ta(ta)) == ta``."""
    order = ta.env.params
    out: dict = {
        "parameters": list(ta.env.params),
        "resilience": [c.render(order) for c in ta.env.resilience],
        "system_size": ta.env.size_fn.render(order),
        "locations": list(ta.locations),
        "initial": list(ta.initial),
        "shared": list(ta.shared),
        "rules": [
            {
                "id": r.id,
                "from": r.from_loc,
                "to": r.to_loc,
                "guard": [g.render(order) for g in r.guard],
                "update": {var: amount for var, amount in r.update},
            }
            for r in ta.rules
        ],
    }
    if ta.indeterminates:
        out["indeterminates"] = list(ta.indeterminates)
    if ta.name != "ta":
        out["name"] = ta.name
    return out


def print_ta_json(ta: ThresholdAutomaton) -> str:
    return json.dumps(print_ta(ta), indent=2)


# ---------------------------------------------------------------------------
# Multiplicativity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiplicativityVerdict:
    """Outcome of :func:`check_multiplicative`: yes / no(reason) / unknown."""

    kind: str  # 'yes' | 'no' | 'unknown'
    reason: Optional[str] = None

    @property
    def is_yes(self) -> bool:
        return self.kind == "yes"

    @property
    def is_no(self) -> bool:
        return self.kind == "no"


_GUARD_SAMPLE_VALUES = tuple(
    Fraction(n, d) for n, d in ((-2, 1), (-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1), (3, 2), (2, 1), (3, 1))
)
_SCALES = (2, 3)


def check_multiplicative(ta: ThresholdAutomaton, *, param_range: int = 5) -> MultiplicativityVerdict:
    """Check whether the environment behaves linearly under scaling.

    Scaling a run by a factor mu requires (a) admissible parameter valuations
    to stay admissible with the system size scaling along, and (b) every
    guard's solution set to be closed under scaling.  A sufficient syntactic
    condition gives a definite *yes*: homogeneous resilience constraints and
    size function, rise guards with nonnegative constant term, fall guards
    with nonpositive constant term.  Small-grid sampling can give a definite
    *no*; otherwise the verdict is *unknown*.
    """
    if ta.is_sketch():
        raise TaSemanticError("multiplicativity is checked on instantiated automata only")

    syntactic = True
    for c in ta.env.resilience:
        if not c.is_homogeneous():
            syntactic = False
    if not (isinstance(ta.env.size_fn.const, Fraction) and ta.env.size_fn.const == 0):
        syntactic = False
    for g in ta.guard_atoms():
        a0 = g.rhs.const
        assert isinstance(a0, Fraction)
        if g.is_rise and a0 < 0:
            syntactic = False
        if g.is_fall and a0 > 0:
            syntactic = False
    if syntactic:
        return MultiplicativityVerdict("yes")

    # Sampling refutation on the environment: integer valuations.
    k = len(ta.env.params)
    if k > 0:
        rng = range(0, param_range + 1)
        for point in itertools.product(rng, repeat=k):
            valuation = dict(zip(ta.env.params, point))
            if not ta.env.admits(valuation) or not ta.env.size_ok(valuation):
                continue
            n0 = ta.env.size(valuation)
            for mu in _SCALES:
                scaled = {p: mu * v for p, v in valuation.items()}
                if not ta.env.admits(scaled):
                    return MultiplicativityVerdict(
                        "no",
                        f"admissible valuation {valuation} leaves the resilience condition when scaled by {mu}",
                    )
                if not ta.env.size_ok(scaled) or ta.env.size(scaled) != mu * n0:
                    return MultiplicativityVerdict(
                        "no",
                        f"system size is not linear under scaling by {mu} at {valuation}",
                    )

    # Sampling refutation on guards: rational solutions, arbitrary sign.
    for g in ta.guard_atoms():
        names = list(g.rhs.params())
        values = _GUARD_SAMPLE_VALUES if len(names) <= 2 else _GUARD_SAMPLE_VALUES[::2]
        for xval in values:
            for point in itertools.product(values, repeat=len(names)):
                valuation = dict(zip(names, point))
                if not g.eval({g.var: xval}, valuation):
                    continue
                for mu in _SCALES:
                    scaled_g = {g.var: xval * mu}
                    scaled_p = {p: v * mu for p, v in valuation.items()}
                    if not g.eval(scaled_g, scaled_p):
                        return MultiplicativityVerdict(
                            "no",
                            f"guard '{g}' has solution {g.var}={xval}, {valuation} "
                            f"that is no longer a solution when scaled by {mu}",
                        )

    return MultiplicativityVerdict("unknown")
