"""Linear-integer formula layer and the external solver bridge."""

from __future__ import annotations

import pytest

from tamc.smt import (
    And,
    Atom,
    BoolConst,
    Implies,
    Lin,
    Not,
    Or,
    SolverError,
    eq,
    ge,
    gt,
    le,
    lt,
    parse_model,
    to_smtlib,
)

x, y = Lin.var("x"), Lin.var("y")


def test_lin_arithmetic():
    e = x + y - 2
    assert e.eval({"x": 3, "y": 1}) == 2
    assert (e + 2).eval({"x": 0, "y": 0}) == 0
    assert e.scale(3).eval({"x": 1, "y": 1}) == 0
    assert (x - x).variables() == set()
    assert Lin.of({"x": 2}, 5).smt() == "(+ (* 2 x) 5)"
    assert Lin.const_of(-1).smt() == "(- 1)"


FORMULA_CASES = [
    (ge(x, 1), {"x": 1}, True),
    (ge(x, 1), {"x": 0}, False),
    (lt(x, y), {"x": 1, "y": 2}, True),
    (lt(x, y), {"x": 2, "y": 2}, False),
    (gt(x, 0) & le(x, 2), {"x": 2}, True),
    (gt(x, 0) & le(x, 2), {"x": 3}, False),
    (eq(x, y) | eq(x, 0), {"x": 0, "y": 5}, True),
    (~eq(x, y), {"x": 1, "y": 1}, False),
    (Implies(ge(x, 1), ge(y, 1)), {"x": 0, "y": 0}, True),
    (Implies(ge(x, 1), ge(y, 1)), {"x": 1, "y": 0}, False),
    (BoolConst(True), {}, True),
]


def test_formula_eval_table():
    for formula, model, want in FORMULA_CASES:
        assert formula.eval(model) is want, f"{formula.smt()} on {model}"


def test_connective_flattening():
    f = And([ge(x, 0), And([ge(y, 0), ge(x, 1)])])
    assert len(f.args) == 3
    g = Or([f, Or([BoolConst(False)])])
    assert g.smt().count("or") == 1
    assert Not(Not(ge(x, 0))).smt() == "(not (not (>= x 0)))"


def test_to_smtlib_shape():
    script, variables = to_smtlib(ge(x, 1) & lt(y, 3), free_sign=["y"])
    assert variables == ["x", "y"]
    assert "(declare-const x Int)" in script
    assert "(assert (>= x 0))" in script
    assert "(assert (>= y 0))" not in script  # y may go negative
    assert script.rstrip().endswith("(get-value (x y))")


def test_parse_model():
    assert parse_model("((x 3) (y (- 2)))", ["x", "y"]) == {"x": 3, "y": -2}
    with pytest.raises(SolverError):
        parse_model("", ["x"])
    with pytest.raises(SolverError):
        parse_model("((x foo))", ["x"])


def test_solver_sat_with_model(solver):
    res = solver.check(ge(x + y, 4) & le(x, 1) & eq(y, 5))
    assert res.is_sat
    assert res.model == {"x": 0, "y": 5} or (res.model["y"] == 5 and res.model["x"] <= 1)


def test_solver_unsat(solver):
    res = solver.check(ge(x, 3) & lt(x, 3))
    assert res.is_unsat
    assert res.model is None


def test_solver_free_sign(solver):
    # x < 0 has no nonnegative solution, but a free-sign one
    f = lt(x, 0)
    assert solver.check(f).is_unsat
    res = solver.check(f, free_sign=["x"])
    assert res.is_sat and res.model["x"] < 0


def test_solver_info(solver):
    info = solver.info()
    assert set(info) >= {"path", "version", "timeout_ms", "seed"}
    assert isinstance(info["version"], str) and info["version"]
