"""Reachability queries answered through the solver, cross-checked by replay."""

from __future__ import annotations

import pytest

from tamc.model import parse_ta
from tamc.oracle import context_change_count, goal_from_sets, oracle_search
from tamc.reach import ReachWitness, replay_witness, solve_reach
from tamc.semantics import Configuration, is_initial, run


def test_parameterized_query_sat(strb, solver):
    res = solve_reach(strb, zero=["l0", "l1"], positive=["l3"], solver=solver)
    assert res.is_sat
    w = res.witness
    assert is_initial(strb, w.initial)
    final = replay_witness(strb, w)
    kappa = final.kappa_map(strb)
    assert kappa["l0"] == 0 and kappa["l1"] == 0 and kappa["l3"] >= 1


def test_parameterized_query_unsat(solver):
    # each of the n processes can add at most 1 to x, so x >= n + 1 never fires
    ta = parse_ta(
        {
            "name": "starved",
            "parameters": ["n"],
            "resilience": [],
            "system_size": "n",
            "locations": ["a", "b"],
            "initial": ["a"],
            "shared": ["x"],
            "rules": [
                {"id": "go", "from": "a", "to": "b", "guard": ["x >= n + 1"], "update": {"x": 1}},
            ],
        }
    )
    res = solve_reach(ta, positive=["b"], solver=solver)
    assert res.status == "unsat"
    assert res.witness is None


def test_fixed_init_bound_semantics(strb, solver):
    """From kappa(l1)=3 at (4,1,1) the target needs three firings."""
    init = Configuration.make(strb, {"l1": 3}, {"x": 0}, {"n": 4, "t": 1, "f": 1})
    tight = solve_reach(strb, init, positive=["l3"], bound=3, solver=solver)
    assert tight.is_sat
    assert len(tight.witness.schedule) <= 3
    short = solve_reach(strb, init, positive=["l3"], bound=2, solver=solver)
    assert short.status == "unsat"


def test_oracle_agrees_on_shortest(strb, solver):
    init = Configuration.make(strb, {"l1": 3}, {"x": 0}, {"n": 4, "t": 1, "f": 1})
    goal = goal_from_sets(strb, positive=["l3"])
    found = oracle_search(strb, init, goal, 6)
    assert found is not None
    _, schedule = found
    assert list(schedule) == ["r1", "r1", "r3"]  # BFS-shortest, stable tie-break


def test_encoding_strategies_agree(strb, solver):
    for appl in ("rank", "chains"):
        res = solve_reach(strb, zero=["l0", "l1"], positive=["l3"], appl=appl, solver=solver)
        assert res.is_sat, appl
        replay_witness(strb, res.witness)


def test_witness_json_roundtrip(strb, solver):
    res = solve_reach(strb, zero=["l0", "l1"], positive=["l3"], solver=solver)
    doc = res.witness.to_json(strb)
    back = ReachWitness.from_json(strb, doc)
    assert back == res.witness
    replay_witness(strb, back)


def test_witness_tamper_detected(strb, solver):
    res = solve_reach(strb, zero=["l0", "l1"], positive=["l3"], solver=solver)
    doc = res.witness.to_json(strb)
    doc["schedule"] = doc["schedule"][:-1]
    bad = ReachWitness.from_json(strb, doc)
    with pytest.raises(Exception):
        replay_witness(strb, bad)


def test_context_changes_bounded_by_atoms(strb, solver):
    res = solve_reach(strb, zero=["l0", "l1"], positive=["l3"], solver=solver)
    w = res.witness
    changes = context_change_count(strb, w.initial, list(w.schedule))
    assert changes <= len({str(g) for g in strb.guard_atoms()})


def test_schedule_validity_end_to_end(strb, solver):
    res = solve_reach(strb, zero=["l0", "l1"], positive=["l3"], solver=solver)
    w = res.witness
    final = run(strb, w.initial, w.schedule)  # raises if any step is disabled
    assert final == w.final
