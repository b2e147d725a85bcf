"""Counter-system semantics: stepping, enabledness, contexts, lifting."""

from __future__ import annotations

import pytest

from tamc.model import TaSemanticError
from tamc.semantics import (
    Configuration,
    NotEnabled,
    apply_rule,
    context,
    enables,
    is_initial,
    lift,
    run,
    trace,
)


def _start(strb):
    return Configuration.make(strb, {"l0": 1, "l1": 2}, {"x": 0}, {"n": 4, "t": 1, "f": 1})


def test_initial_recognition(strb):
    sigma = _start(strb)
    assert is_initial(strb, sigma)
    assert not is_initial(strb, apply_rule(strb, sigma, "r1"))  # l2 is not initial
    nonzero_shared = Configuration(sigma.kappa, (1,), sigma.params)
    assert not is_initial(strb, nonzero_shared)


def test_frozen_walk(strb):
    """Step-by-step counters and shared values along r1, r1, r3."""
    sigma = _start(strb)
    expected = [
        ({"l0": 1, "l1": 1, "l2": 1, "l3": 0}, {"x": 1}),
        ({"l0": 1, "l1": 0, "l2": 2, "l3": 0}, {"x": 2}),
        ({"l0": 1, "l1": 0, "l2": 1, "l3": 1}, {"x": 2}),
    ]
    for rule_id, (kappa, shared) in zip(["r1", "r1", "r3"], expected):
        sigma = apply_rule(strb, sigma, rule_id)
        assert sigma.kappa_map(strb) == kappa
        assert sigma.shared_map(strb) == shared
    assert enables(strb, sigma, strb.rules_by_id["r2"])  # x=2 >= t+1-f = 1, l0 populated
    assert enables(strb, sigma, strb.rules_by_id["r3"])  # x=2 >= n-t-f = 2


def test_not_enabled_cases(strb):
    sigma = _start(strb)
    # r3 needs x >= n - t - f = 2 but x = 0
    with pytest.raises(NotEnabled, match="r3"):
        apply_rule(strb, sigma, "r3")
    # sl2 starts at l2, which holds no process
    with pytest.raises(NotEnabled, match="sl2"):
        apply_rule(strb, sigma, "sl2")
    with pytest.raises(TaSemanticError, match="unknown rule"):
        apply_rule(strb, sigma, "nope")


def test_run_and_trace(strb):
    sigma = _start(strb)
    end = run(strb, sigma, ["r1", "r1", "r3"])
    assert end.kappa_map(strb) == {"l0": 1, "l1": 0, "l2": 1, "l3": 1}
    assert end.shared_map(strb) == {"x": 2}
    states = trace(strb, sigma, ["r1", "r1", "r3"])
    assert states[0] == sigma and states[-1] == end and len(states) == 4
    with pytest.raises(NotEnabled, match="step 1"):
        run(strb, sigma, ["r1", "r3"])  # after one r1, x=1 < n-t-f


def test_make_validation(strb):
    with pytest.raises(TaSemanticError):
        Configuration.make(strb, {"nowhere": 3}, {"x": 0}, {"n": 4, "t": 1, "f": 1})
    with pytest.raises(TaSemanticError, match="nonnegative"):
        Configuration.make(strb, {"l1": 3}, {"x": -1}, {"n": 4, "t": 1, "f": 1})
    with pytest.raises(TaSemanticError, match="resilience"):
        # n > 3t fails for n=4, t=2
        Configuration.make(strb, {"l1": 2}, {"x": 0}, {"n": 4, "t": 2, "f": 1})
    with pytest.raises(TaSemanticError, match="sum"):
        # N = n - f = 3, not 2
        Configuration.make(strb, {"l1": 2}, {"x": 0}, {"n": 4, "t": 1, "f": 1})


def test_context_flips_monotonically(strb):
    """Shared counters only grow, so met thresholds accumulate."""
    sigma = _start(strb)
    seen = context(strb, sigma)
    assert seen == frozenset()
    for rule_id in ["r1", "r1", "r3", "r2"]:
        sigma = apply_rule(strb, sigma, rule_id)
        now = context(strb, sigma)
        assert seen <= now
        seen = now
    assert {str(g) for g in seen} == {"x >= -f + t + 1", "x >= -f + n - t"}


def test_lift_scales_counters_and_shared(strb):
    sigma = _start(strb)
    end = run(strb, sigma, ["r1", "r1", "r3"])
    doubled = lift(end, 2)
    assert doubled.param_map(strb) == {"n": 8, "t": 2, "f": 2}
    assert doubled.kappa_map(strb) == {"l0": 2, "l1": 0, "l2": 2, "l3": 2}
    assert doubled.shared_map(strb) == {"x": 4}
    # the doubled run reaches the doubled configuration
    assert run(strb, lift(_start(strb), 2), ["r1"] * 4 + ["r3"] * 2) == doubled
    with pytest.raises(TaSemanticError):
        lift(end, 0)
