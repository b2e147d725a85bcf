"""Linear-integer-arithmetic formulas and the external solver harness.

Encoders in this package build quantifier-free formulas over named integer
variables (counters, rule multiplicities, parameters).  This module provides
the formula AST, exact local evaluation, SMT-LIB2 emission, and a
:class:`Solver` that runs an external SMT solver as a child process.

Solver discovery order: the ``TAMC_SOLVER`` environment variable (a path or a
command name), then ``z3`` and ``cvc5`` on PATH, then the bundled
``tools/z3wasm`` Node wrapper.  Every satisfiable answer is re-checked by
evaluating the formula on the returned model with exact integer arithmetic,
so a miscommunication with the child process can never produce a bogus
witness.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from queue import Empty, Queue
from typing import Iterable, Mapping, Optional, Sequence, Union


class SolverError(Exception):
    """The solver failed, disagreed with local evaluation, or emitted garbage."""


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lin:
    """An integer linear term ``const + sum(coeff_i * var_i)``."""

    coeffs: tuple[tuple[str, int], ...] = ()
    const: int = 0

    @staticmethod
    def of(coeffs: Mapping[str, int] | None = None, const: int = 0) -> "Lin":
        items = tuple(sorted((v, c) for v, c in (coeffs or {}).items() if c != 0))
        return Lin(items, const)

    @staticmethod
    def var(name: str) -> "Lin":
        return Lin(((name, 1),), 0)

    @staticmethod
    def const_of(value: int) -> "Lin":
        return Lin((), value)

    def __add__(self, other: Union["Lin", int]) -> "Lin":
        if isinstance(other, int):
            return Lin(self.coeffs, self.const + other)
        merged = dict(self.coeffs)
        for v, c in other.coeffs:
            merged[v] = merged.get(v, 0) + c
        return Lin.of(merged, self.const + other.const)

    def __sub__(self, other: Union["Lin", int]) -> "Lin":
        if isinstance(other, int):
            return Lin(self.coeffs, self.const - other)
        return self + other.scale(-1)

    def scale(self, factor: int) -> "Lin":
        return Lin.of({v: c * factor for v, c in self.coeffs}, self.const * factor)

    def eval(self, model: Mapping[str, int]) -> int:
        return self.const + sum(c * model[v] for v, c in self.coeffs)

    def variables(self) -> set[str]:
        return {v for v, _ in self.coeffs}

    def smt(self) -> str:
        def lit(value: int) -> str:
            return str(value) if value >= 0 else f"(- {-value})"

        parts = []
        for v, c in self.coeffs:
            parts.append(v if c == 1 else f"(* {lit(c)} {v})")
        if self.const != 0 or not parts:
            parts.append(lit(self.const))
        if len(parts) == 1:
            return parts[0]
        return "(+ " + " ".join(parts) + ")"


class Formula:
    """Base class; subclasses form a small Boolean algebra over atoms."""

    def eval(self, model: Mapping[str, int]) -> bool:
        raise NotImplementedError

    def variables(self) -> set[str]:
        raise NotImplementedError

    def smt(self) -> str:
        raise NotImplementedError

    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))

    def __invert__(self) -> "Formula":
        return Not(self)


@dataclass(frozen=True)
class BoolConst(Formula):
    value: bool

    def eval(self, model: Mapping[str, int]) -> bool:
        return self.value

    def variables(self) -> set[str]:
        return set()

    def smt(self) -> str:
        return "true" if self.value else "false"


TRUE = BoolConst(True)
FALSE = BoolConst(False)


@dataclass(frozen=True)
class Atom(Formula):
    """``lin >= 0`` or ``lin = 0`` over integer variables."""

    lin: Lin
    rel: str  # ">=" or "="

    def __post_init__(self) -> None:
        assert self.rel in (">=", "=")

    def eval(self, model: Mapping[str, int]) -> bool:
        value = self.lin.eval(model)
        return value >= 0 if self.rel == ">=" else value == 0

    def variables(self) -> set[str]:
        return self.lin.variables()

    def smt(self) -> str:
        return f"({self.rel} {self.lin.smt()} 0)"


def _flatten(kind: type, args: Iterable[Formula]) -> tuple[Formula, ...]:
    out: list[Formula] = []
    for a in args:
        if isinstance(a, kind):
            out.extend(a.args)  # type: ignore[attr-defined]
        else:
            out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def __init__(self, args: Iterable[Formula]):
        object.__setattr__(self, "args", _flatten(And, args))

    def eval(self, model: Mapping[str, int]) -> bool:
        return all(a.eval(model) for a in self.args)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.args:
            out |= a.variables()
        return out

    def smt(self) -> str:
        if not self.args:
            return "true"
        if len(self.args) == 1:
            return self.args[0].smt()
        return "(and " + " ".join(a.smt() for a in self.args) + ")"


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def __init__(self, args: Iterable[Formula]):
        object.__setattr__(self, "args", _flatten(Or, args))

    def eval(self, model: Mapping[str, int]) -> bool:
        return any(a.eval(model) for a in self.args)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.args:
            out |= a.variables()
        return out

    def smt(self) -> str:
        if not self.args:
            return "false"
        if len(self.args) == 1:
            return self.args[0].smt()
        return "(or " + " ".join(a.smt() for a in self.args) + ")"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def eval(self, model: Mapping[str, int]) -> bool:
        return not self.arg.eval(model)

    def variables(self) -> set[str]:
        return self.arg.variables()

    def smt(self) -> str:
        return f"(not {self.arg.smt()})"


def Implies(premise: Formula, conclusion: Formula) -> Formula:
    return Or((Not(premise), conclusion))


def Iff(a: Formula, b: Formula) -> Formula:
    return And((Implies(a, b), Implies(b, a)))


# Convenience atom builders.  Strict comparisons are integer-tightened.

def ge(lhs: Lin, rhs: Union[Lin, int] = 0) -> Formula:
    rhs_lin = Lin.const_of(rhs) if isinstance(rhs, int) else rhs
    return Atom(lhs - rhs_lin, ">=")


def le(lhs: Lin, rhs: Union[Lin, int] = 0) -> Formula:
    rhs_lin = Lin.const_of(rhs) if isinstance(rhs, int) else rhs
    return Atom(rhs_lin - lhs, ">=")


def gt(lhs: Lin, rhs: Union[Lin, int] = 0) -> Formula:
    rhs_lin = Lin.const_of(rhs) if isinstance(rhs, int) else rhs
    return Atom(lhs - rhs_lin - 1, ">=")


def lt(lhs: Lin, rhs: Union[Lin, int] = 0) -> Formula:
    rhs_lin = Lin.const_of(rhs) if isinstance(rhs, int) else rhs
    return Atom(rhs_lin - lhs - 1, ">=")


def eq(lhs: Lin, rhs: Union[Lin, int] = 0) -> Formula:
    rhs_lin = Lin.const_of(rhs) if isinstance(rhs, int) else rhs
    return Atom(lhs - rhs_lin, "=")


# ---------------------------------------------------------------------------
# Script emission and model parsing
# ---------------------------------------------------------------------------


def to_smtlib(
    formula: Formula,
    *,
    free_sign: Iterable[str] = (),
    get_values: bool = True,
    logic: str = "QF_LIA",
) -> tuple[str, list[str]]:
    """Emit a complete SMT-LIB2 script; returns (script, declared variables).

    Every variable is declared as an ``Int`` and constrained to be
    nonnegative unless listed in ``free_sign``.
    """
    variables = sorted(formula.variables())
    free = set(free_sign)
    lines = ["(set-option :produce-models true)", f"(set-logic {logic})"]
    for v in variables:
        lines.append(f"(declare-const {v} Int)")
    for v in variables:
        if v not in free:
            lines.append(f"(assert (>= {v} 0))")
    lines.append(f"(assert {formula.smt()})")
    lines.append("(check-sat)")
    if get_values and variables:
        lines.append("(get-value (" + " ".join(variables) + "))")
    return "\n".join(lines) + "\n", variables


def _tokenize_sexpr(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read_sexpr(tokens: list[str], pos: int) -> tuple[object, int]:
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while tokens[pos] != ")":
            item, pos = _read_sexpr(tokens, pos)
            items.append(item)
        return items, pos + 1
    return tok, pos + 1


def parse_model(text: str, variables: Sequence[str]) -> dict[str, int]:
    """Parse a ``get-value`` response into an integer model."""

    def as_int(node: object) -> int:
        if isinstance(node, str):
            try:
                return int(node)
            except ValueError:
                raise SolverError(f"cannot interpret model value {node!r}") from None
        if isinstance(node, list) and len(node) == 2 and node[0] == "-":
            return -as_int(node[1])
        raise SolverError(f"cannot interpret model value {node!r}")

    tokens = _tokenize_sexpr(text)
    if not tokens:
        raise SolverError("empty model response")
    tree, _ = _read_sexpr(tokens, 0)
    if not isinstance(tree, list):
        raise SolverError(f"unexpected model response: {text!r}")
    model: dict[str, int] = {}
    for entry in tree:
        if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], str)):
            raise SolverError(f"unexpected model entry: {entry!r}")
        model[entry[0]] = as_int(entry[1])
    missing = [v for v in variables if v not in model]
    if missing:
        raise SolverError(f"model is missing values for {missing}")
    return model


# ---------------------------------------------------------------------------
# External solver process
# ---------------------------------------------------------------------------


_SERVER_END = "%%%END%%%"
_SERVER_DONE = "%%%DONE%%%"


def _default_timeout_ms() -> int:
    raw = os.environ.get("TAMC_TIMEOUT_MS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 60_000


def discover_solver(preferred: str | None = None) -> str:
    """Resolve the solver executable path.

    Order: explicit argument, ``TAMC_SOLVER``, ``z3`` on PATH, ``cvc5`` on
    PATH, the bundled ``tools/z3wasm/bin/z3wasm`` wrapper.
    """
    candidates: list[str] = []
    if preferred:
        candidates.append(preferred)
    env = os.environ.get("TAMC_SOLVER", "").strip()
    if env:
        candidates.append(env)
    candidates.extend(["z3", "cvc5"])
    bundled = Path(__file__).resolve().parents[2] / "tools" / "z3wasm" / "bin" / "z3wasm"
    candidates.append(str(bundled))
    for cand in candidates:
        path = Path(cand)
        if path.is_file() and os.access(path, os.X_OK):
            return str(path)
        resolved = shutil.which(cand)
        if resolved:
            return resolved
    raise SolverError(
        "no SMT solver found: set TAMC_SOLVER, install z3 or cvc5, "
        "or run 'npm install' inside tools/z3wasm"
    )


def _solver_args(path: str, script_path: str, timeout_ms: int, seed: int) -> list[str]:
    base = os.path.basename(path)
    if base.startswith("z3wasm"):
        return [path, f"--timeout-ms={timeout_ms}", f"--seed={seed}", script_path]
    if base.startswith("cvc5"):
        return [path, "--lang=smt2", f"--tlimit={timeout_ms}", f"--seed={seed}", script_path]
    # Default: z3-style argument syntax.
    return [
        path,
        "-smt2",
        f"-t:{timeout_ms}",
        f"sat.random_seed={seed}",
        f"smt.random_seed={seed}",
        script_path,
    ]


@dataclass
class SolverStats:
    queries: int = 0
    sat: int = 0
    unsat: int = 0
    unknown: int = 0
    total_seconds: float = 0.0


@dataclass(frozen=True)
class SolverResult:
    status: str  # 'sat' | 'unsat' | 'unknown'
    model: Optional[dict[str, int]]
    seconds: float

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"

    @property
    def is_unsat(self) -> bool:
        return self.status == "unsat"


class _ServerProcess:
    """A persistent z3wasm child answering framed SMT-LIB2 scripts."""

    def __init__(self, path: str, timeout_ms: int, seed: int):
        self.path = path
        self.timeout_ms = timeout_ms
        self.seed = seed
        self.proc: subprocess.Popen | None = None
        self.queue: Queue[str | None] = Queue()

    def _start(self) -> None:
        self.proc = subprocess.Popen(
            [self.path, "--server", f"--timeout-ms={self.timeout_ms}", f"--seed={self.seed}"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
        )
        self.queue = Queue()

        def pump(proc: subprocess.Popen, queue: Queue) -> None:
            assert proc.stdout is not None
            for line in proc.stdout:
                queue.put(line.rstrip("\n"))
            queue.put(None)

        threading.Thread(target=pump, args=(self.proc, self.queue), daemon=True).start()

    def stop(self) -> None:
        if self.proc is not None:
            self.proc.kill()
            self.proc.wait()
            self.proc = None

    def ask(self, script: str, deadline_s: float) -> str:
        if self.proc is None or self.proc.poll() is not None:
            self.stop()
            self._start()
        assert self.proc is not None and self.proc.stdin is not None
        try:
            self.proc.stdin.write(script + "\n" + _SERVER_END + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            self.stop()
            raise SolverError(f"solver process died: {exc}") from exc
        lines: list[str] = []
        deadline = time.monotonic() + deadline_s
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self.stop()
                raise TimeoutError("solver exceeded its hard deadline")
            try:
                line = self.queue.get(timeout=min(remaining, 0.5))
            except Empty:
                continue
            if line is None:
                self.stop()
                raise SolverError("solver closed its output stream mid-query")
            if line.strip() == _SERVER_DONE:
                return "\n".join(lines)
            lines.append(line)


class Solver:
    """Run SMT-LIB2 scripts through an external solver, with re-validation."""

    def __init__(
        self,
        path: str | None = None,
        *,
        timeout_ms: int | None = None,
        seed: int = 0,
    ):
        self.path = discover_solver(path)
        self.timeout_ms = timeout_ms if timeout_ms is not None else _default_timeout_ms()
        self.seed = seed
        self.stats = SolverStats()
        self._server: _ServerProcess | None = None
        if os.path.basename(self.path).startswith("z3wasm"):
            self._server = _ServerProcess(self.path, self.timeout_ms, self.seed)

    # -- lifecycle -------------------------------------------------------

    def close(self) -> None:
        if self._server is not None:
            self._server.stop()

    def __enter__(self) -> "Solver":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    def version(self) -> str:
        try:
            out = subprocess.run(
                [self.path, "--version"], capture_output=True, text=True, timeout=60
            )
            return (out.stdout or out.stderr).strip().splitlines()[0]
        except (OSError, subprocess.TimeoutExpired, IndexError):
            return "unknown"

    def info(self) -> dict[str, object]:
        return {
            "path": self.path,
            "version": self.version(),
            "timeout_ms": self.timeout_ms,
            "seed": self.seed,
        }

    # -- raw script execution ---------------------------------------------

    def run_script(self, script: str, timeout_ms: int | None = None) -> str:
        """Run one script; returns the solver's raw textual output."""
        budget_ms = timeout_ms if timeout_ms is not None else self.timeout_ms
        hard_s = budget_ms / 1000.0 * 2 + 10.0
        if self._server is not None and budget_ms == self.timeout_ms:
            return self._server.ask(script, hard_s)
        with tempfile.NamedTemporaryFile(
            "w", suffix=".smt2", prefix="tamc_", delete=False
        ) as handle:
            handle.write(script)
            script_path = handle.name
        try:
            args = _solver_args(self.path, script_path, budget_ms, self.seed)
            proc = subprocess.run(args, capture_output=True, text=True, timeout=hard_s)
            return proc.stdout
        finally:
            os.unlink(script_path)

    # -- high-level check --------------------------------------------------

    def check(
        self,
        formula: Formula,
        *,
        free_sign: Iterable[str] = (),
        timeout_ms: int | None = None,
    ) -> SolverResult:
        """Decide satisfiability; a sat answer always carries a verified model."""
        script, variables = to_smtlib(formula, free_sign=free_sign)
        started = time.monotonic()
        status = "unknown"
        model: dict[str, int] | None = None
        try:
            raw = self.run_script(script, timeout_ms=timeout_ms)
        except (TimeoutError, subprocess.TimeoutExpired):
            raw = ""
        elapsed = time.monotonic() - started

        lines = [ln.strip() for ln in raw.splitlines() if ln.strip()]
        verdict_idx = None
        for i, ln in enumerate(lines):
            if ln in ("sat", "unsat", "unknown"):
                status = ln
                verdict_idx = i
                break
            if ln.startswith("(error"):
                raise SolverError(f"solver error: {ln}")
        if verdict_idx is None:
            status = "unknown"
        if status == "sat":
            if variables:
                rest = "\n".join(lines[verdict_idx + 1 :])
                model = parse_model(rest, variables)
                if not formula.eval(model):
                    raise SolverError(
                        "solver returned a model that fails exact re-evaluation; "
                        "this indicates an encoding or communication bug"
                    )
            else:
                model = {}

        self.stats.queries += 1
        self.stats.total_seconds += elapsed
        if status == "sat":
            self.stats.sat += 1
        elif status == "unsat":
            self.stats.unsat += 1
        else:
            self.stats.unknown += 1
        return SolverResult(status, model, elapsed)
