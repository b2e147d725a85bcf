"""Brute-force reference engines used to cross-check the symbolic ones."""

from __future__ import annotations

import pytest

from tamc.eltl import parse_eltl
from tamc.model import TaError, parse_ta
from tamc.oracle import (
    OracleLasso,
    check_lasso,
    context_change_count,
    enumerate_initial_configs,
    enumerate_param_valuations,
    goal_from_sets,
    oracle_search,
    replay_trace,
    trace_to_json,
)
from tamc.semantics import Configuration, run


def test_admissible_valuations_frozen(strb):
    vals = enumerate_param_valuations(strb, {"n": 7, "t": 2, "f": 2})
    assert len(vals) == 18
    assert {"n": 4, "t": 1, "f": 1} in vals
    assert {"n": 3, "t": 1, "f": 1} not in vals  # needs n > 3t
    assert {"n": 4, "t": 1, "f": 2} not in vals  # needs t >= f
    assert all(v["n"] - v["f"] >= 1 for v in vals)


def test_initial_configs_frozen(strb):
    configs = list(enumerate_initial_configs(strb, {"n": 4, "t": 1, "f": 1}))
    assert len(configs) == 4  # three processes split over l0 and l1
    splits = sorted((c.kappa_map(strb)["l0"], c.kappa_map(strb)["l1"]) for c in configs)
    assert splits == [(0, 3), (1, 2), (2, 1), (3, 0)]
    assert all(sum(c.kappa) == 3 and c.shared == (0,) for c in configs)


def test_shortest_schedule(strb):
    init = Configuration.make(strb, {"l1": 3}, {"x": 0}, {"n": 4, "t": 1, "f": 1})
    goal = goal_from_sets(strb, positive=["l3"])
    sigma0, schedule = oracle_search(strb, init, goal, 6)
    assert sigma0 == init
    assert list(schedule) == ["r1", "r1", "r3"]
    # the longer route through r2 exists too and replays fine
    run(strb, Configuration.make(strb, {"l0": 1, "l1": 2}, None, {"n": 4, "t": 1, "f": 1}),
        ["r1", "r1", "r2", "r3"])


def test_search_respects_length_budget(strb):
    init = Configuration.make(strb, {"l1": 3}, {"x": 0}, {"n": 4, "t": 1, "f": 1})
    goal = goal_from_sets(strb, positive=["l3"])
    assert oracle_search(strb, init, goal, 2) is None


def test_goal_from_sets(strb):
    init = Configuration.make(strb, {"l1": 3}, {"x": 0}, {"n": 4, "t": 1, "f": 1})
    both = goal_from_sets(strb, zero=["l1"], positive=["l3"])
    assert not both(init)
    end = run(strb, init, ["r1", "r1", "r1", "r3"])
    assert end.kappa_map(strb)["l1"] == 0 and end.kappa_map(strb)["l3"] == 1
    assert both(end)


def test_context_change_count(strb):
    init = Configuration.make(strb, {"l1": 3}, {"x": 0}, {"n": 4, "t": 1, "f": 1})
    # x: 0 -> 1 (flips x>=1+t-f) -> 2 (flips x>=n-t-f) -> stays
    assert context_change_count(strb, init, ["r1", "r1", "r1", "r3"]) == 2
    assert context_change_count(strb, init, ["r1"]) == 1
    assert context_change_count(strb, init, []) == 0


def test_trace_roundtrip_and_tamper(strb):
    init = Configuration.make(strb, {"l1": 3}, {"x": 0}, {"n": 4, "t": 1, "f": 1})
    doc = trace_to_json(strb, init, ["r1", "r1", "r3"])
    assert doc["params"] == {"n": 4, "t": 1, "f": 1}
    assert len(doc["states"]) == 4
    final = replay_trace(strb, doc)
    assert final.kappa_map(strb)["l3"] == 1
    doc["states"][2]["x"] = 99
    with pytest.raises(TaError, match="diverges"):
        replay_trace(strb, doc)


def test_check_lasso_accept_reject(strb):
    init = Configuration.make(strb, {"l1": 3}, {"x": 0}, {"n": 4, "t": 1, "f": 1})
    lasso = OracleLasso(init, ("r1", "r1", "r3"), ("sl3",))
    assert check_lasso(strb, parse_eltl("(F (neq0 l3))", strb), lasso)
    assert not check_lasso(strb, parse_eltl("(G (eq0 l3))", strb), lasso)
    # a loop that moves processes is rejected outright
    moving = OracleLasso(init, (), ("r1",))
    with pytest.raises(TaError, match="loop"):
        check_lasso(strb, parse_eltl("(F (neq0 l2))", strb), moving)


def test_lasso_with_growing_shared():
    """Loops may pump shared counters as long as location counters return.

    The evaluation must unroll far enough for every atom to stabilize: the
    premise x >= 3 only flips after three loop iterations.
    """
    ta = parse_ta(
        {
            "name": "pump",
            "parameters": ["n"],
            "resilience": [],
            "system_size": "n",
            "locations": ["a", "b"],
            "initial": ["a"],
            "shared": ["x"],
            "rules": [
                {"id": "step", "from": "a", "to": "b", "guard": [], "update": {}},
                {"id": "pump", "from": "b", "to": "b", "guard": [], "update": {"x": 1}},
            ],
        }
    )
    init = Configuration.make(ta, {"a": 1}, {"x": 0}, {"n": 1})
    lasso = OracleLasso(init, ("step",), ("pump",))
    assert check_lasso(ta, parse_eltl("(G (imp (ge x 1) (eq0 a)))", ta), lasso)
    assert not check_lasso(ta, parse_eltl("(G (imp (ge x 3) (eq0 b)))", ta), lasso)
