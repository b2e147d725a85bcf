"""Automaton file format, guard algebra, and the scaling check."""

from __future__ import annotations

from fractions import Fraction

import pytest

from tamc.model import (
    Indeterminate,
    LinExpr,
    TaSemanticError,
    TaSyntaxError,
    check_multiplicative,
    normalize_guard,
    parse_ta,
    print_ta,
)

MINIMAL = {
    "name": "tiny",
    "parameters": ["n"],
    "resilience": [],
    "system_size": "n",
    "locations": ["a", "b"],
    "initial": ["a"],
    "shared": ["x"],
    "rules": [
        {"id": "r", "from": "a", "to": "b", "guard": ["x >= 1"], "update": {"x": 1}},
    ],
}


def test_roundtrip(strb):
    assert parse_ta(print_ta(strb)) == strb


def test_roundtrip_minimal():
    ta = parse_ta(MINIMAL)
    assert parse_ta(print_ta(ta)) == ta
    assert ta.locations == ("a", "b")
    assert ta.rules[0].guard[0].var == "x"


def test_parse_rejects():
    bad = [
        ({**MINIMAL, "initial": ["zzz"]}, "zzz"),
        ({**MINIMAL, "locations": ["a", "a"]}, "duplicate"),
        ({**MINIMAL, "system_size": "q"}, "q"),
        (
            {**MINIMAL, "rules": [{"id": "r", "from": "a", "to": "b", "guard": ["y >= 1"], "update": {}}]},
            "y",
        ),
        (
            {**MINIMAL, "rules": [{"id": "r", "from": "a", "to": "b", "guard": ["x >= n * n"], "update": {}}]},
            "",
        ),
    ]
    for doc, needle in bad:
        with pytest.raises((TaSyntaxError, TaSemanticError)) as err:
            parse_ta(doc)
        assert needle in str(err.value)


def test_strict_updates():
    doc = {**MINIMAL, "rules": [{"id": "r", "from": "a", "to": "b", "guard": [], "update": {"x": 2}}]}
    with pytest.warns(UserWarning, match="update of 'x' by 2"):
        parse_ta(doc)  # accepted by default, but flagged
    with pytest.raises(TaSemanticError):
        parse_ta(doc, strict=True)


def test_guard_parsing_shapes(strb):
    r2, r3 = strb.rules_by_id["r2"], strb.rules_by_id["r3"]
    # x >= t + 1 - f and x >= n - t - f, as coefficient maps
    assert r2.guard[0].rhs.coeffs == {"t": Fraction(1), "f": Fraction(-1)}
    assert r2.guard[0].rhs.const == 1
    assert r3.guard[0].rhs.coeffs == {"n": Fraction(1), "t": Fraction(-1), "f": Fraction(-1)}
    assert r3.guard[0].is_rise and not r3.guard[0].is_fall


def test_guard_eval_boundaries():
    ta = parse_ta(MINIMAL)
    g = ta.rules[0].guard[0]  # x >= 1
    assert not g.eval({"x": 0}, {"n": 5})
    assert g.eval({"x": 1}, {"n": 5})
    fall = parse_ta(
        {**MINIMAL, "rules": [{"id": "r", "from": "a", "to": "b", "guard": ["x < n"], "update": {}}]}
    ).rules[0].guard[0]
    assert fall.is_fall
    assert fall.eval({"x": 2}, {"n": 3})
    assert not fall.eval({"x": 3}, {"n": 3})


def test_normalize_guard_rejects_indeterminate():
    sketch = parse_ta(
        {
            **MINIMAL,
            "indeterminates": ["v1"],
            "rules": [{"id": "r", "from": "a", "to": "b", "guard": ["x >= v1 * n"], "update": {}}],
        }
    )
    assert sketch.is_sketch()
    with pytest.raises(TaSemanticError):
        normalize_guard(sketch.rules[0].guard[0])


def test_sketch_substitute_roundtrip():
    sketch = parse_ta(
        {
            **MINIMAL,
            "indeterminates": ["v1"],
            "rules": [{"id": "r", "from": "a", "to": "b", "guard": ["x >= v1 * n"], "update": {}}],
        }
    )
    ta = sketch.substitute({"v1": Fraction(1, 2)})
    assert not ta.is_sketch()
    g = ta.rules[0].guard[0]
    assert g.rhs.coeffs == {"n": Fraction(1, 2)}
    # parse/print keeps the indeterminate declaration
    assert parse_ta(print_ta(sketch)) == sketch


def test_linexpr_arithmetic():
    e = LinExpr.make({"n": Fraction(2)}, Fraction(1))
    f = e + LinExpr.make({"n": Fraction(-2), "t": Fraction(1)})
    assert f.coeffs == {"t": Fraction(1)}
    assert f.const == 1
    assert f.eval({"t": 3}) == 4
    v = LinExpr.make({"n": Indeterminate("v1")})
    assert v.indeterminates() == {"v1"}
    assert v.substitute({"v1": Fraction(2)}).coeffs == {"n": Fraction(2)}
    with pytest.raises(TaSemanticError):
        v.substitute({})


# Scaling verdicts: strb's syntactic shape qualifies; a fall guard with a
# positive constant refutes by sampling; a non-homogeneous resilience
# condition that is still closed under scaling stays unknown.
def test_multiplicative_verdicts(strb):
    assert check_multiplicative(strb).kind == "yes"
    falling = parse_ta(
        {**MINIMAL, "rules": [{"id": "r", "from": "a", "to": "b", "guard": ["x < 1"], "update": {}}]}
    )
    assert check_multiplicative(falling).kind == "no"
    offset_rc = parse_ta({**MINIMAL, "resilience": ["n >= 1"]})
    assert check_multiplicative(offset_rc).kind == "unknown"
