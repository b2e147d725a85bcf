"""Logic-to-automaton compilers and their brute-force logical oracles.

Two constructions turn propositional questions into automaton questions,
giving the test suite families whose ground truth is computable by truth
tables:

* a 3-CNF formula compiles to an automaton in which a location ``lF`` is
  coverable if and only if the formula is satisfiable.  Each variable gets a
  chooser location whose two exits are mutually locking (taking one branch
  raises a counter that disables the other forever), so every run commits to
  a consistent assignment no matter how many processes participate;
* an exists/forall DNF question compiles to a sketch automaton plus a
  temporal specification such that some coefficient assignment makes the
  specification hold if and only if the quantified formula is true.  The
  existential choices become threshold coefficients (a never-incremented
  counter compares against ``v_i·n``, so each chooser pair has exactly one
  firable member per assignment); the universal choices become lockstep
  gadgets that force all ``n`` processes to pick the same branch.

Both compilers use deterministic naming so traces diff cleanly across runs.
File formats: DIMACS CNF for the first (``p cnf <vars> <clauses>`` header,
clauses as 0-terminated signed integer lines), and a quantified variant for
the second (``e``/``a`` prefix lines declaring the two blocks, body lines
read as DNF conjuncts).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from tamc.model import TaError, TaSemanticError, ThresholdAutomaton, parse_ta


class TooLarge(TaError):
    """The instance exceeds the brute-force evaluation cap."""


_BRUTE_CAP = 20


# ---------------------------------------------------------------------------
# 3-CNF
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cnf3:
    """A CNF with at most three literals per clause (1-based, sign = polarity)."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.num_vars < 0:
            raise TaSemanticError("negative variable count")
        for ci, clause in enumerate(self.clauses):
            if not 1 <= len(clause) <= 3:
                raise TaSemanticError(f"clause {ci + 1} must have 1..3 literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise TaSemanticError(f"clause {ci + 1}: literal {lit} out of range")


def parse_dimacs(text: str) -> Cnf3:
    """DIMACS CNF: comment lines ``c …``, header ``p cnf <vars> <clauses>``,
    then 0-terminated clauses (possibly spanning lines)."""
    header: tuple[int, int] | None = None
    numbers: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise TaSemanticError(f"line {lineno}: malformed DIMACS header")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise TaSemanticError(f"line {lineno}: clause before header")
        try:
            numbers.extend(int(tok) for tok in line.split())
        except ValueError as exc:
            raise TaSemanticError(f"line {lineno}: {exc}") from exc
    if header is None:
        raise TaSemanticError("missing DIMACS header")
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for n in numbers:
        if n == 0:
            clauses.append(tuple(current))
            current = []
        else:
            current.append(n)
    if current:
        raise TaSemanticError("last clause is not 0-terminated")
    num_vars, num_clauses = header
    if len(clauses) != num_clauses:
        raise TaSemanticError(
            f"header promises {num_clauses} clauses, found {len(clauses)}"
        )
    return Cnf3(num_vars=num_vars, clauses=tuple(clauses))


def gen_3sat(f: Cnf3, *, variant: str = "param") -> ThresholdAutomaton:
    """The coverability automaton of a 3-CNF formula.

    ``lF`` is coverable (from some initial configuration in the ``param``
    variant; from one process per chooser in the ``nonparam`` variant, whose
    chooser exits are unguarded) if and only if the formula is satisfiable.
    """
    if variant not in ("param", "nonparam"):
        raise TaSemanticError(f"unknown variant '{variant}'")
    n, m = f.num_vars, len(f.clauses)
    locations = (
        [f"l{i}" for i in range(1, n + 1)]
        + [f"top{i}" for i in range(1, n + 1)]
        + [f"bot{i}" for i in range(1, n + 1)]
        + ["lmid", "lF"]
    )
    shared = (
        [f"y{i}" for i in range(1, n + 1)]
        + [f"yb{i}" for i in range(1, n + 1)]
        + [f"c{j}" for j in range(1, m + 1)]
    )
    rules = []
    for i in range(1, n + 1):
        if variant == "param":
            rules.append(
                {"id": f"t{i}", "from": f"l{i}", "to": f"top{i}", "guard": [f"yb{i} < 1"], "update": {f"y{i}": 1}}
            )
            rules.append(
                {"id": f"b{i}", "from": f"l{i}", "to": f"bot{i}", "guard": [f"y{i} < 1"], "update": {f"yb{i}": 1}}
            )
        else:
            rules.append({"id": f"t{i}", "from": f"l{i}", "to": f"top{i}", "guard": [], "update": {}})
            rules.append({"id": f"b{i}", "from": f"l{i}", "to": f"bot{i}", "guard": [], "update": {}})
        pos = {f"c{j}": 1 for j, clause in enumerate(f.clauses, 1) if i in clause}
        neg = {f"c{j}": 1 for j, clause in enumerate(f.clauses, 1) if -i in clause}
        rules.append({"id": f"mt{i}", "from": f"top{i}", "to": "lmid", "guard": [], "update": pos})
        rules.append({"id": f"mb{i}", "from": f"bot{i}", "to": "lmid", "guard": [], "update": neg})
    rules.append(
        {
            "id": "fin",
            "from": "lmid",
            "to": "lF",
            "guard": [f"c{j} >= 1" for j in range(1, m + 1)],
            "update": {},
        }
    )
    return parse_ta(
        {
            "name": f"cnf3_{variant}",
            "parameters": ["k"],
            "resilience": [],
            "system_size": "k",
            "locations": locations,
            "initial": [f"l{i}" for i in range(1, n + 1)],
            "shared": shared,
            "rules": rules,
        }
    )


def brute_sat(f: Cnf3) -> bool:
    """Truth-table satisfiability (≤ 20 variables)."""
    if f.num_vars > _BRUTE_CAP:
        raise TooLarge(f"{f.num_vars} variables exceed the brute-force cap")
    for bits in range(1 << f.num_vars):
        if all(
            any((lit > 0) == bool(bits >> (abs(lit) - 1) & 1) for lit in clause)
            for clause in f.clauses
        ):
            return True
    return False


# ---------------------------------------------------------------------------
# Exists/forall DNF
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sigma2Instance:
    """∃x₁..x_m ∀y₁..y_k φ with φ in DNF, ≤ 3 literals per conjunct.

    Literals are signed 1-based indices; 1..exists_vars name the existential
    block, the rest the universal block.
    """

    exists_vars: int
    forall_vars: int
    dnf: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.exists_vars < 0 or self.forall_vars < 0:
            raise TaSemanticError("negative variable count")
        total = self.exists_vars + self.forall_vars
        for ci, conj in enumerate(self.dnf):
            if not 1 <= len(conj) <= 3:
                raise TaSemanticError(f"conjunct {ci + 1} must have 1..3 literals")
            for lit in conj:
                if lit == 0 or abs(lit) > total:
                    raise TaSemanticError(f"conjunct {ci + 1}: literal {lit} out of range")


def parse_qdimacs_lite(text: str) -> Sigma2Instance:
    """DIMACS-like input with one ``e`` and one ``a`` block; body lines are
    DNF conjuncts.  Variables must number the existential block first."""
    header_seen = False
    exists: list[int] = []
    foralls: list[int] = []
    numbers: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            header_seen = True
            continue
        if line.startswith("e ") or line.startswith("a "):
            block = exists if line.startswith("e ") else foralls
            vals = [int(t) for t in line.split()[1:]]
            if not vals or vals[-1] != 0:
                raise TaSemanticError(f"line {lineno}: quantifier line must end in 0")
            block.extend(vals[:-1])
            continue
        if not header_seen:
            raise TaSemanticError(f"line {lineno}: body before header")
        numbers.extend(int(t) for t in line.split())
    m, k = len(exists), len(foralls)
    if sorted(exists) != list(range(1, m + 1)) or sorted(foralls) != list(range(m + 1, m + k + 1)):
        raise TaSemanticError("existential block must be 1..m and universal block m+1..m+k")
    conjuncts: list[tuple[int, ...]] = []
    current: list[int] = []
    for v in numbers:
        if v == 0:
            conjuncts.append(tuple(current))
            current = []
        else:
            current.append(v)
    if current:
        raise TaSemanticError("last conjunct is not 0-terminated")
    return Sigma2Instance(exists_vars=m, forall_vars=k, dnf=tuple(conjuncts))


def _sigma2_counter(q: Sigma2Instance, lit: int) -> str:
    """The shared counter that witnesses a literal's truth."""
    i = abs(lit)
    if i <= q.exists_vars:
        return (f"b{i}" if lit > 0 else f"bb{i}")
    j = i - q.exists_vars
    return (f"c{j}" if lit > 0 else f"cb{j}")


def gen_sigma2(q: Sigma2Instance) -> tuple[ThresholdAutomaton, str]:
    """The synthesis instance of an exists/forall DNF question.

    Returns (sketch automaton, specification text).  Some sane assignment of
    the coefficients v₁..v_m makes the specification hold on the instantiated
    automaton if and only if the quantified formula is true.
    """
    m, k = q.exists_vars, q.forall_vars
    locations = (
        [f"lx{i}" for i in range(m + 1)]
        + [f"ly{i}" for i in range(k + 1)]
        + [loc for i in range(1, k + 1) for loc in (f"lz{i}", f"lzb{i}")]
        + ["lF"]
    )
    shared = (
        ["a"]
        + [v for i in range(1, m + 1) for v in (f"b{i}", f"bb{i}")]
        + [v for j in range(1, k + 1) for v in (f"c{j}", f"cb{j}")]
    )
    rules = []
    for i in range(1, m + 1):
        rules.append(
            {"id": f"xt{i}", "from": f"lx{i-1}", "to": f"lx{i}", "guard": [f"a < v{i} * n"], "update": {f"b{i}": 1}}
        )
        rules.append(
            {"id": f"xf{i}", "from": f"lx{i-1}", "to": f"lx{i}", "guard": [f"a >= v{i} * n"], "update": {f"bb{i}": 1}}
        )
    rules.append({"id": "xy", "from": f"lx{m}", "to": "ly0", "guard": [], "update": {}})
    for j in range(1, k + 1):
        rules.append({"id": f"yt{j}", "from": f"ly{j-1}", "to": f"lz{j}", "guard": [], "update": {f"c{j}": 1}})
        rules.append({"id": f"yf{j}", "from": f"ly{j-1}", "to": f"lzb{j}", "guard": [], "update": {f"cb{j}": 1}})
        rules.append({"id": f"zt{j}", "from": f"lz{j}", "to": f"ly{j}", "guard": [f"c{j} >= n"], "update": {}})
        rules.append({"id": f"zf{j}", "from": f"lzb{j}", "to": f"ly{j}", "guard": [f"cb{j} >= n"], "update": {}})
    for d, conj in enumerate(q.dnf, 1):
        rules.append(
            {
                "id": f"d{d}",
                "from": f"ly{k}",
                "to": "lF",
                "guard": [f"{_sigma2_counter(q, lit)} >= 1" for lit in conj],
                "update": {},
            }
        )
    rules.append({"id": "sly", "from": f"ly{k}", "to": f"ly{k}", "guard": [], "update": {}})
    rules.append({"id": "slf", "from": "lF", "to": "lF", "guard": [], "update": {}})

    sketch = parse_ta(
        {
            "name": "sigma2",
            "parameters": ["n"],
            "resilience": ["n >= 1"],
            "system_size": "n",
            "locations": locations,
            "initial": ["lx0"],
            "shared": shared,
            "indeterminates": [f"v{i}" for i in range(1, m + 1)],
            "rules": rules,
        }
    )

    disjuncts = [
        "(and " + " ".join(f"(ge {_sigma2_counter(q, lit)} 1)" for lit in conj) + ")"
        for conj in q.dnf
    ]
    if not disjuncts:
        spec = "(G (eq0 lF))"
    else:
        unlock = disjuncts[0] if len(disjuncts) == 1 else "(or " + " ".join(disjuncts) + ")"
        spec = f"(and (F (G (imp {unlock} (eq0 ly{k})))) (G (eq0 lF)))"
    return sketch, spec


def brute_sigma2(q: Sigma2Instance) -> bool:
    """Exhaustive evaluation of the quantified DNF (≤ 20 total variables)."""
    total = q.exists_vars + q.forall_vars
    if total > _BRUTE_CAP:
        raise TooLarge(f"{total} variables exceed the brute-force cap")

    def dnf_true(bits: int) -> bool:
        return any(
            all((lit > 0) == bool(bits >> (abs(lit) - 1) & 1) for lit in conj)
            for conj in q.dnf
        )

    for xbits in range(1 << q.exists_vars):
        if all(
            dnf_true(xbits | (ybits << q.exists_vars))
            for ybits in range(1 << q.forall_vars)
        ):
            return True
    return False
