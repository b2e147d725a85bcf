"""tamc — verification and synthesis for threshold automata.

Threshold automata model fault-tolerant distributed algorithms: an anonymous
crowd of processes moves between locations along rules guarded by threshold
conditions over shared counters and environment parameters.  This package
provides:

* exact parsing, simulation and brute-force exploration of threshold automata
  (:mod:`tamc.model`, :mod:`tamc.semantics`, :mod:`tamc.oracle`);
* parameterized reachability and coverability through a linear-integer
  encoding discharged by an external SMT solver (:mod:`tamc.reach`,
  :mod:`tamc.cover`, :mod:`tamc.smt`);
* model checking of a fault-tolerant fragment of LTL via lasso witnesses
  (:mod:`tamc.eltl`, :mod:`tamc.liveness`);
* threshold-guard synthesis for sketch automata (:mod:`tamc.synthesis`);
* reductions from propositional satisfiability used as test generators
  (:mod:`tamc.generators`);
* a command-line front end (``tamc``, :mod:`tamc.cli`).
"""

from tamc.model import (
    Environment,
    Guard,
    Indeterminate,
    LinExpr,
    LinearConstraint,
    MultiplicativityVerdict,
    Rule,
    TaError,
    TaSyntaxError,
    TaSemanticError,
    ThresholdAutomaton,
    check_multiplicative,
    normalize_guard,
    parse_ta,
    print_ta,
)
from tamc.semantics import Configuration, NotEnabled, apply_rule, context, enables, lift, run
from tamc.cover import CoverResult, cover
from tamc.eltl import EltlError, parse_eltl
from tamc.liveness import LassoWitness, MCResult, check_spec, replay_lasso
from tamc.oracle import check_lasso, oracle_lasso_search, oracle_search
from tamc.reach import ReachResult, ReachWitness, replay_witness, solve_reach
from tamc.smt import Solver, SolverError
from tamc.synthesis import (
    Assignment,
    CandidateSpace,
    SynthesisResult,
    instantiate,
    sane_space,
    synthesize,
)

__all__ = [
    "Environment",
    "Guard",
    "Indeterminate",
    "LinExpr",
    "LinearConstraint",
    "MultiplicativityVerdict",
    "Rule",
    "TaError",
    "TaSyntaxError",
    "TaSemanticError",
    "ThresholdAutomaton",
    "check_multiplicative",
    "normalize_guard",
    "parse_ta",
    "print_ta",
    "Configuration",
    "NotEnabled",
    "apply_rule",
    "context",
    "enables",
    "lift",
    "run",
    "CoverResult",
    "cover",
    "EltlError",
    "parse_eltl",
    "LassoWitness",
    "MCResult",
    "check_spec",
    "replay_lasso",
    "check_lasso",
    "oracle_lasso_search",
    "oracle_search",
    "ReachResult",
    "ReachWitness",
    "replay_witness",
    "solve_reach",
    "Solver",
    "SolverError",
    "Assignment",
    "CandidateSpace",
    "SynthesisResult",
    "instantiate",
    "sane_space",
    "synthesize",
]

__version__ = "0.1.0"
