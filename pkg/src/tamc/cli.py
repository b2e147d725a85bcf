"""Command-line front end: verdicts as exit codes, JSON run reports, witnesses.

Every verdict-bearing subcommand emits exactly one JSON report on stdout
(optionally duplicated to a file via ``--json``) and communicates the verdict
through the process exit code so shell pipelines can branch on it:

* 0 — positive verdict (reachable / coverable / violation found / assignment
  found / replay succeeded),
* 1 — negative verdict (unreachable / holds / no assignment / replay failed),
* 2 — usage or input error,
* 3 — unknown verdict or a resource limit was hit.

Reports carry sha256 digests of all input files, solver metadata, and a
determinism digest computed over the report with timing fields removed, so
byte-level reproducibility of reruns can be checked cheaply.

Positive verdicts with a trace also write a self-contained witness file
(the automaton is embedded) that ``tamc oracle --replay`` re-validates using
only the concrete semantics — no solver involved except that found
assignments are re-challenged by a small bounded lasso search.

Flags can be preset in a plain ``key = value`` config file (``--config``);
command-line values win over the file, which wins over built-in defaults.
``TAMC_SOLVER`` and ``TAMC_TIMEOUT_MS`` select the solver binary and its
per-query timeout when no explicit flag or config entry does.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from tamc.cover import cover
from tamc.eltl import parse_eltl
from tamc.generators import gen_3sat, gen_sigma2, parse_dimacs, parse_qdimacs_lite
from tamc.liveness import check_spec
from tamc.model import (
    ResourceLimit,
    TaError,
    ThresholdAutomaton,
    parse_ta,
    print_ta_json,
)
from tamc.oracle import (
    OracleLasso,
    _loop_delta_ok,
    check_lasso,
    goal_from_sets,
    oracle_lasso_search,
    oracle_search,
    replay_trace,
    trace_to_json,
)
from tamc.reach import solve_reach
from tamc.semantics import Configuration, is_initial, run
from tamc.smt import Solver, SolverError
from tamc.synthesis import Assignment, instantiate, synthesize

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3

# Bounded re-challenge applied when replaying a found assignment.
_ASSIGNMENT_REPLAY_BOUNDS = {
    "param_bound": 2,
    "stem_len": 6,
    "loop_len": 3,
    "state_cap": 50_000,
}


# ---------------------------------------------------------------------------
# Config file and reports
# ---------------------------------------------------------------------------


def load_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment; quotes are optional."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip().strip("'\"")
    return out


_CONFIG_COERCE = {
    "seed": int,
    "timeout_ms": int,
    "bound": int,
    "max_orders": int,
    "jobs": int,
    "denom": int,
    "num_bound": int,
    "state_cap": int,
    "param_bound": int,
    "verify_pruned": int,
    "budget_s": float,
}
_CONFIG_FLAGS = {"assume_multiplicative", "strict", "param_mode"}


def _apply_config(ns: argparse.Namespace) -> None:
    """Fill in unset options from the config file; flags on the line win."""
    if not getattr(ns, "config", None):
        return
    table = load_config(ns.config)
    for key, raw in table.items():
        dest = key.replace("-", "_")
        if not hasattr(ns, dest):
            continue
        if dest in _CONFIG_FLAGS:
            if getattr(ns, dest) is False and raw.lower() in ("1", "true", "yes", "on"):
                setattr(ns, dest, True)
            continue
        if getattr(ns, dest) is None:
            setattr(ns, dest, _CONFIG_COERCE.get(dest, str)(raw))


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _canonical(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


_TIMING_KEYS = {"wall_ms", "seconds", "determinism_digest"}


def _scrub_timing(doc: Any) -> Any:
    if isinstance(doc, dict):
        return {k: _scrub_timing(v) for k, v in doc.items() if k not in _TIMING_KEYS}
    if isinstance(doc, list):
        return [_scrub_timing(v) for v in doc]
    return doc


def make_report(
    command: Sequence[str],
    inputs: Mapping[str, str],
    verdict: str,
    *,
    witness: Optional[str] = None,
    solver_info: Optional[Mapping[str, object]] = None,
    details: Optional[Mapping[str, object]] = None,
    wall_ms: int = 0,
) -> dict:
    report: dict[str, Any] = {
        "command": list(command),
        "inputs": dict(inputs),
        "verdict": verdict,
        "witness": witness,
        "solver": dict(solver_info) if solver_info else None,
        "details": dict(details) if details else {},
        "wall_ms": wall_ms,
    }
    report["determinism_digest"] = _sha256_text(_canonical(_scrub_timing(report)))
    return report


def _emit_report(ns: argparse.Namespace, report: Mapping[str, object]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if getattr(ns, "json_out", None):
        Path(ns.json_out).write_text(text + "\n")
    print(text)


def _write_witness(ns: argparse.Namespace, stem: str, doc: Mapping[str, object]) -> str:
    path = getattr(ns, "witness", None) or f"{stem}.witness.json"
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def _ta_doc(ta: ThresholdAutomaton) -> dict:
    return json.loads(print_ta_json(ta))


def _read_input(path: str, inputs: dict[str, str]) -> str:
    text = Path(path).read_text()
    inputs[path] = _sha256_text(text)
    return text


def _stem(path: str) -> str:
    name = Path(path).name
    for suffix in (".ta.json", ".json", ".eltl", ".cnf", ".qdimacs"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return Path(name).stem


def _split_csv(raw: Optional[str]) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()] if raw else []


def _parse_init(raw: str, ta: ThresholdAutomaton) -> Configuration:
    """Initial configuration: inline JSON or a path to a JSON file with
    ``{"params": {...}, "kappa": {...}, "shared": {...}}``."""
    text = Path(raw).read_text() if Path(raw).is_file() else raw
    doc = json.loads(text)
    return Configuration.make(
        ta,
        {k: int(v) for k, v in doc.get("kappa", {}).items()},
        {k: int(v) for k, v in doc.get("shared", {}).items()},
        {k: int(v) for k, v in doc["params"].items()},
    )


def _parse_param_values(raw: str) -> dict[str, int]:
    """``n=4,t=1,f=1`` -> {'n': 4, 't': 1, 'f': 1}."""
    out: dict[str, int] = {}
    for piece in _split_csv(raw):
        if "=" not in piece:
            raise ValueError(f"expected name=value in {piece!r}")
        name, value = piece.split("=", 1)
        out[name.strip()] = int(value)
    return out


def _make_solver(ns: argparse.Namespace) -> Solver:
    return Solver(
        getattr(ns, "solver", None),
        timeout_ms=getattr(ns, "timeout_ms", None),
        seed=getattr(ns, "seed", None) or 0,
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_parse(ns: argparse.Namespace) -> int:
    t0 = time.monotonic()
    inputs: dict[str, str] = {}
    ta = parse_ta(_read_input(ns.file, inputs), strict=ns.strict)
    if ns.out:
        Path(ns.out).write_text(print_ta_json(ta) + "\n")
    details = {
        "name": ta.name,
        "locations": len(ta.locations),
        "rules": len(ta.rules),
        "parameters": list(ta.env.params),
        "shared": list(ta.shared),
        "initial": list(ta.initial),
        "sketch": ta.is_sketch(),
        "indeterminates": list(ta.indeterminates),
    }
    _emit_report(
        ns,
        make_report(
            ns.command_line, inputs, "ok",
            details=details, wall_ms=int((time.monotonic() - t0) * 1000),
        ),
    )
    return EXIT_POSITIVE


def cmd_reach(ns: argparse.Namespace) -> int:
    t0 = time.monotonic()
    inputs: dict[str, str] = {}
    ta = parse_ta(_read_input(ns.file, inputs))
    init = _parse_init(ns.init, ta) if ns.init else None
    zero, pos = _split_csv(ns.zero), _split_csv(ns.pos)
    with _make_solver(ns) as sv:
        info = sv.info()
        res = solve_reach(
            ta, init, zero=zero, positive=pos, bound=ns.bound, solver=sv, appl=ns.appl
        )
    witness_path = None
    if res.status == "sat":
        assert res.witness is not None
        doc = {
            "kind": "reach",
            "parameterized": init is None,
            "ta": _ta_doc(ta),
            "goal": {"zero": zero, "positive": pos},
            "trace": trace_to_json(ta, res.witness.initial, res.witness.schedule),
        }
        witness_path = _write_witness(ns, f"{_stem(ns.file)}.reach", doc)
    _emit_report(
        ns,
        make_report(
            ns.command_line, inputs, res.status,
            witness=witness_path, solver_info=info,
            details={"zero": zero, "positive": pos, "bound": ns.bound},
            wall_ms=int((time.monotonic() - t0) * 1000),
        ),
    )
    return {"sat": EXIT_POSITIVE, "unsat": EXIT_NEGATIVE, "unknown": EXIT_UNKNOWN}[res.status]


def cmd_cover(ns: argparse.Namespace) -> int:
    t0 = time.monotonic()
    inputs: dict[str, str] = {}
    ta = parse_ta(_read_input(ns.file, inputs))
    init = _parse_init(ns.init, ta) if ns.init else None
    with _make_solver(ns) as sv:
        info = sv.info()
        res = cover(
            ta, ns.location, init=init, bound=ns.bound, solver=sv,
            method=ns.method, assume_multiplicative=ns.assume_multiplicative,
        )
    witness_path = None
    if res.witness is not None:
        doc = {
            "kind": "reach",
            "parameterized": init is None,
            "ta": _ta_doc(ta),
            "goal": {"zero": [], "positive": [ns.location]},
            "trace": trace_to_json(ta, res.witness.initial, res.witness.schedule),
        }
        witness_path = _write_witness(ns, f"{_stem(ns.file)}.cover", doc)
    _emit_report(
        ns,
        make_report(
            ns.command_line, inputs, res.status,
            witness=witness_path, solver_info=info,
            details={"location": ns.location, "method": res.method},
            wall_ms=int((time.monotonic() - t0) * 1000),
        ),
    )
    return {
        "coverable": EXIT_POSITIVE,
        "uncoverable": EXIT_NEGATIVE,
        "unknown": EXIT_UNKNOWN,
    }[res.status]


def cmd_mc(ns: argparse.Namespace) -> int:
    t0 = time.monotonic()
    inputs: dict[str, str] = {}
    ta = parse_ta(_read_input(ns.file, inputs))
    spec_text = _read_input(ns.spec, inputs)
    formula = parse_eltl(spec_text, ta)
    with _make_solver(ns) as sv:
        info = sv.info()
        res = check_spec(
            ta, formula, solver=sv,
            assume_multiplicative=ns.assume_multiplicative, max_orders=ns.max_orders,
        )
    witness_path = None
    if res.status == "violated":
        assert res.witness is not None
        doc = {
            "kind": "lasso",
            "ta": _ta_doc(ta),
            "spec_text": spec_text,
            "witness": res.witness.to_json(ta),
        }
        witness_path = _write_witness(ns, f"{_stem(ns.file)}.mc", doc)
    _emit_report(
        ns,
        make_report(
            ns.command_line, inputs, res.status,
            witness=witness_path, solver_info=info,
            details={"orderings_tried": res.orderings_tried},
            wall_ms=int((time.monotonic() - t0) * 1000),
        ),
    )
    return {
        "violated": EXIT_POSITIVE,
        "holds": EXIT_NEGATIVE,
        "unknown": EXIT_UNKNOWN,
    }[res.status]


def cmd_synth(ns: argparse.Namespace) -> int:
    t0 = time.monotonic()
    inputs: dict[str, str] = {}
    sketch = parse_ta(_read_input(ns.file, inputs))
    spec_text = _read_input(ns.spec, inputs)
    with _make_solver(ns) as sv:
        info = sv.info()
        out = synthesize(
            sketch, spec_text,
            denominator=ns.denom, num_bound=ns.num_bound, budget_s=ns.budget_s,
            solver=sv, max_orders=ns.max_orders,
            verify_pruned=ns.verify_pruned, rng_seed=ns.seed or 0,
        )
    witness_path = None
    if out.status == "found":
        assert out.assignment is not None
        doc = {
            "kind": "assignment",
            "sketch": _ta_doc(sketch),
            "assignment": out.assignment.render(),
            "spec_text": spec_text,
            "replay_bounds": dict(_ASSIGNMENT_REPLAY_BOUNDS),
        }
        witness_path = _write_witness(ns, f"{_stem(ns.file)}.synth", doc)
    _emit_report(
        ns,
        make_report(
            ns.command_line, inputs, out.status,
            witness=witness_path, solver_info=info,
            details=out.to_json(),
            wall_ms=int((time.monotonic() - t0) * 1000),
        ),
    )
    return {
        "found": EXIT_POSITIVE,
        "none_in_space": EXIT_NEGATIVE,
        "unknown": EXIT_UNKNOWN,
    }[out.status]


def _replay_reach(doc: Mapping) -> None:
    ta = parse_ta(doc["ta"])
    trace = doc["trace"]
    final = replay_trace(ta, trace)
    if doc.get("parameterized", False):
        params = {p: int(trace["params"][p]) for p in ta.env.params}
        init_map = trace["init"]
        sigma0 = Configuration.make(
            ta,
            {loc: int(init_map.get(loc, 0)) for loc in ta.locations},
            {v: int(init_map.get(v, 0)) for v in ta.shared},
            params,
        )
        if not is_initial(ta, sigma0):
            raise TaError("witness start is not an initial configuration")
    goal = doc.get("goal", {})
    check = goal_from_sets(ta, goal.get("zero", []), goal.get("positive", []))
    if not check(final):
        raise TaError("replayed final configuration misses the goal")


def _replay_lasso_doc(doc: Mapping) -> None:
    ta = parse_ta(doc["ta"])
    w = doc["witness"]
    params = {p: int(w["params"][p]) for p in ta.env.params}
    first = w["milestones"][0]
    sigma0 = Configuration.make(
        ta,
        {k: int(v) for k, v in first.get("kappa", {}).items()},
        {k: int(v) for k, v in first.get("shared", {}).items()},
        params,
    )
    if not is_initial(ta, sigma0):
        raise TaError("lasso start is not an initial configuration")
    stem = [str(r) for r in w["stem"]]
    loop = [str(r) for r in w["loop"]]
    mid = run(ta, sigma0, stem)
    if not _loop_delta_ok(ta, mid, loop):
        raise TaError("loop is not repeatable forever (fall guard grows)")
    formula = parse_eltl(doc["spec_text"], ta)
    if not check_lasso(ta, formula, OracleLasso(sigma0, tuple(stem), tuple(loop))):
        raise TaError("lasso does not satisfy the specification")


def _replay_assignment(doc: Mapping) -> None:
    sketch = parse_ta(doc["sketch"])
    mu = Assignment.of({k: Fraction(v) for k, v in doc["assignment"].items()})
    ta = instantiate(sketch, mu)
    formula = parse_eltl(doc["spec_text"], ta)
    b = doc.get("replay_bounds", _ASSIGNMENT_REPLAY_BOUNDS)
    found = oracle_lasso_search(
        ta, formula,
        {p: int(b.get("param_bound", 2)) for p in ta.env.params},
        stem_len=int(b.get("stem_len", 6)),
        loop_len=int(b.get("loop_len", 3)),
        state_cap=int(b.get("state_cap", 50_000)),
    )
    if found is not None:
        raise TaError(
            f"assignment refuted: violating lasso at params {found.sigma0.param_map(ta)}"
        )


def cmd_oracle(ns: argparse.Namespace) -> int:
    t0 = time.monotonic()
    inputs: dict[str, str] = {}

    if ns.replay:
        doc = json.loads(_read_input(ns.replay, inputs))
        kind = doc.get("kind")
        try:
            if kind == "reach":
                _replay_reach(doc)
            elif kind == "lasso":
                _replay_lasso_doc(doc)
            elif kind == "assignment":
                _replay_assignment(doc)
            else:
                print(f"error: unknown witness kind {kind!r}", file=sys.stderr)
                return EXIT_USAGE
        except TaError as exc:
            _emit_report(
                ns,
                make_report(
                    ns.command_line, inputs, "replay_failed",
                    details={"kind": kind, "reason": str(exc)},
                    wall_ms=int((time.monotonic() - t0) * 1000),
                ),
            )
            return EXIT_NEGATIVE
        _emit_report(
            ns,
            make_report(
                ns.command_line, inputs, "replay_ok",
                details={"kind": kind},
                wall_ms=int((time.monotonic() - t0) * 1000),
            ),
        )
        return EXIT_POSITIVE

    if not ns.file:
        print("error: oracle needs a TA file (or --replay)", file=sys.stderr)
        return EXIT_USAGE
    ta = parse_ta(_read_input(ns.file, inputs))
    zero, pos = _split_csv(ns.zero), _split_csv(ns.pos)
    if ns.init:
        seeds: object = _parse_init(ns.init, ta)
    elif ns.params:
        values = _parse_param_values(ns.params)
        seeds = {name: (v, v) for name, v in values.items()}
    else:
        seeds = {p: ns.param_bound for p in ta.env.params}
    found = oracle_search(
        ta, seeds, goal_from_sets(ta, zero, pos), ns.bound, state_cap=ns.state_cap
    )
    witness_path = None
    if found is not None:
        sigma0, schedule = found
        doc = {
            "kind": "reach",
            "parameterized": ns.init is None,
            "ta": _ta_doc(ta),
            "goal": {"zero": zero, "positive": pos},
            "trace": trace_to_json(ta, sigma0, schedule),
        }
        witness_path = _write_witness(ns, f"{_stem(ns.file)}.oracle", doc)
    _emit_report(
        ns,
        make_report(
            ns.command_line, inputs, "found" if found else "not_found",
            witness=witness_path,
            details={"zero": zero, "positive": pos, "bound": ns.bound},
            wall_ms=int((time.monotonic() - t0) * 1000),
        ),
    )
    return EXIT_POSITIVE if found else EXIT_NEGATIVE


def cmd_gen(ns: argparse.Namespace) -> int:
    t0 = time.monotonic()
    inputs: dict[str, str] = {}
    text = _read_input(ns.input, inputs)
    spec_text: Optional[str] = None
    if ns.family == "3sat":
        ta = gen_3sat(parse_dimacs(text), variant=ns.variant)
    else:
        ta, spec_text = gen_sigma2(parse_qdimacs_lite(text))
    rendered = print_ta_json(ta)
    spec_path = None
    if ns.out:
        Path(ns.out).write_text(rendered + "\n")
        if spec_text is not None:
            spec_path = ns.spec_out or f"{_stem(ns.out)}.eltl"
            Path(spec_path).write_text(spec_text + "\n")
    else:
        doc = json.loads(rendered)
        print(json.dumps({"ta": doc, "spec": spec_text} if spec_text else doc, indent=2))
    details = {
        "family": ns.family,
        "locations": len(ta.locations),
        "rules": len(ta.rules),
        "out": ns.out,
        "spec_out": spec_path,
    }
    if ns.out:
        _emit_report(
            ns,
            make_report(
                ns.command_line, inputs, "ok",
                details=details, wall_ms=int((time.monotonic() - t0) * 1000),
            ),
        )
    return EXIT_POSITIVE


def _bench_case(case: Mapping, base: Path, ns: argparse.Namespace) -> list[dict]:
    rows: list[dict] = []
    name = str(case.get("name") or _stem(str(case["ta"])))
    ta_path = base / str(case["ta"])
    try:
        ta = parse_ta(ta_path.read_text())
    except (OSError, TaError) as exc:
        return [{
            "case": name, "task": "parse", "locations": 0, "rules": 0,
            "verdict": "error", "seconds": 0.0, "detail": str(exc),
        }]
    shape = {"locations": len(ta.locations), "rules": len(ta.rules)}

    def attempt(task: str, runner) -> None:
        t0 = time.monotonic()
        try:
            verdict = runner()
            detail = ""
        except ResourceLimit as exc:
            verdict, detail = "unknown", str(exc)
        except (TaError, SolverError, OSError) as exc:
            verdict, detail = "error", str(exc)
        rows.append({
            "case": name, "task": task, **shape, "verdict": verdict,
            "seconds": round(time.monotonic() - t0, 3), "detail": detail,
        })

    for loc in case.get("cover", []):
        def run_cover(loc: str = str(loc)) -> str:
            with _make_solver(ns) as sv:
                return cover(ta, loc, solver=sv).status
        attempt(f"cover:{loc}", run_cover)
    for spec_rel in case.get("specs", []):
        def run_mc(spec_rel: str = str(spec_rel)) -> str:
            spec_text = (base / spec_rel).read_text()
            with _make_solver(ns) as sv:
                return check_spec(
                    ta, parse_eltl(spec_text, ta), solver=sv,
                    assume_multiplicative=ns.assume_multiplicative,
                ).status
        attempt(f"mc:{_stem(str(spec_rel))}", run_mc)
    return rows


def cmd_bench(ns: argparse.Namespace) -> int:
    t0 = time.monotonic()
    inputs: dict[str, str] = {}
    manifest = json.loads(_read_input(ns.manifest, inputs))
    cases = manifest["cases"] if isinstance(manifest, Mapping) else manifest
    base = Path(ns.manifest).parent
    jobs = max(1, ns.jobs or 1)
    rows: list[dict] = []
    if cases:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for case_rows in pool.map(lambda c: _bench_case(c, base, ns), cases):
                rows.extend(case_rows)

    prefix = ns.out or "bench_report"
    with open(f"{prefix}.csv", "w", newline="") as handle:
        writer = csv.DictWriter(
            handle,
            fieldnames=["case", "task", "locations", "rules", "verdict", "seconds", "detail"],
        )
        writer.writeheader()
        writer.writerows(rows)
    Path(f"{prefix}.json").write_text(json.dumps({"rows": rows}, indent=2) + "\n")

    widths = {
        "case": max([4] + [len(r["case"]) for r in rows]),
        "task": max([4] + [len(r["task"]) for r in rows]),
    }
    print(f"{'case':<{widths['case']}}  {'task':<{widths['task']}}  |L|  |R|  verdict      s")
    for r in rows:
        print(
            f"{r['case']:<{widths['case']}}  {r['task']:<{widths['task']}}  "
            f"{r['locations']:>3}  {r['rules']:>3}  {r['verdict']:<11}  {r['seconds']}"
        )
    _emit_report(
        ns,
        make_report(
            ns.command_line, inputs, "ok",
            details={
                "cases": len(cases), "rows": len(rows),
                "csv": f"{prefix}.csv", "json": f"{prefix}.json",
            },
            wall_ms=int((time.monotonic() - t0) * 1000),
        ),
    )
    return EXIT_POSITIVE


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tamc",
        description="Parameterized verification and synthesis for threshold automata.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file presetting any long option")
    common.add_argument("--json", dest="json_out", help="also write the JSON report here")

    solver_opts = argparse.ArgumentParser(add_help=False)
    solver_opts.add_argument("--solver", help="SMT solver binary (default: $TAMC_SOLVER or autodetect)")
    solver_opts.add_argument("--seed", type=int, help="solver / search seed (default 0)")
    solver_opts.add_argument("--timeout-ms", type=int, help="per-query solver timeout (default $TAMC_TIMEOUT_MS or 120000)")
    solver_opts.add_argument("--witness", help="path for the witness file (default: derived from the input name)")

    p = sub.add_parser("parse", parents=[common], help="validate a TA file and summarize it")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true", help="restrict updates to 0/1 increments")
    p.add_argument("-o", "--out", help="write the normalized TA JSON here")
    p.set_defaults(handler=cmd_parse)

    p = sub.add_parser("reach", parents=[common, solver_opts], help="decide reachability of a counter predicate")
    p.add_argument("file")
    p.add_argument("--init", help="fixed start: inline JSON or file with params/kappa/shared")
    p.add_argument("--zero", help="comma-separated locations that must be empty")
    p.add_argument("--pos", help="comma-separated locations that must be nonempty")
    p.add_argument("--bound", type=int, help="cap on the total number of rule firings")
    p.add_argument("--appl", choices=("rank", "chains"), default="rank", help="acyclicity encoding")
    p.set_defaults(handler=cmd_reach)

    p = sub.add_parser("cover", parents=[common, solver_opts], help="decide coverability of one location")
    p.add_argument("file")
    p.add_argument("--location", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--param-mode", action="store_true", help="range over all admissible initial configurations (default)")
    group.add_argument("--init", help="fixed start: inline JSON or file with params/kappa/shared")
    p.add_argument("--bound", type=int, help="cap on the total number of rule firings")
    p.add_argument("--method", choices=("auto", "fixpoint", "reach"), default="auto")
    p.add_argument("--assume-multiplicative", action="store_true")
    p.set_defaults(handler=cmd_cover)

    p = sub.add_parser("mc", parents=[common, solver_opts], help="model check a temporal specification")
    p.add_argument("file")
    p.add_argument("--spec", required=True, help="specification file (violation description)")
    p.add_argument("--max-orders", type=int, help="cap on milestone orderings to try")
    p.add_argument("--assume-multiplicative", action="store_true")
    p.set_defaults(handler=cmd_mc)

    p = sub.add_parser("synth", parents=[common, solver_opts], help="synthesize sketch coefficients")
    p.add_argument("file", help="sketch TA file")
    p.add_argument("--spec", required=True, help="specification file (violation description)")
    p.add_argument("--denom", type=int, default=1, help="common denominator of the coefficients")
    p.add_argument("--num-bound", type=int, help="numerator window override |a| <= B*denom")
    p.add_argument("--budget-s", type=float, help="wall-clock budget in seconds")
    p.add_argument("--max-orders", type=int)
    p.add_argument("--verify-pruned", type=int, default=5, help="spot-check this many pruned candidates")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("oracle", parents=[common, solver_opts], help="bounded explicit-state search / witness replay")
    p.add_argument("file", nargs="?", help="TA file (search mode)")
    p.add_argument("--replay", help="witness file to re-validate")
    p.add_argument("--zero", help="comma-separated locations that must be empty")
    p.add_argument("--pos", help="comma-separated locations that must be nonempty")
    p.add_argument("--bound", type=int, default=6, help="schedule length bound")
    p.add_argument("--init", help="fixed start instead of parameter enumeration")
    p.add_argument("--params", help="exact parameter valuation, e.g. n=4,t=1,f=1")
    p.add_argument("--param-bound", type=int, default=4, help="enumerate each parameter in 0..N")
    p.add_argument("--state-cap", type=int, default=100_000)
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("gen", parents=[common], help="compile logic inputs into automata")
    p.add_argument("family", choices=("3sat", "sigma2"))
    p.add_argument("input", help="DIMACS CNF (3sat) or quantified DNF file (sigma2)")
    p.add_argument("-o", "--out", help="output TA JSON path")
    p.add_argument("--variant", choices=("param", "nonparam"), default="param", help="3sat flavor")
    p.add_argument("--spec-out", help="sigma2: path for the companion specification")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("bench", parents=[common, solver_opts], help="run a benchmark manifest")
    p.add_argument("manifest", help='JSON: {"cases": [{"ta": path, "specs": [...], "cover": [...]}]}')
    p.add_argument("-o", "--out", help="report file prefix (default bench_report)")
    p.add_argument("--jobs", type=int, help="concurrent cases (default 1)")
    p.add_argument("--assume-multiplicative", action="store_true")
    p.set_defaults(handler=cmd_bench)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(args)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_USAGE
    ns.command_line = ["tamc"] + args
    try:
        _apply_config(ns)
        return ns.handler(ns)
    except ResourceLimit as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (TaError, SolverError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
