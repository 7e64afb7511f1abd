"""Deciding logical equivalence of closed formulas over a shared signature.

Two complementary routes are provided.

* A finite-model oracle: ``brute_force_check`` enumerates interpretations up
  to a domain-size bound (exhaustively while the interpretation count fits
  the budget, by uniform sampling afterwards) and reports the first
  distinguishing structure.  It can refute equivalence but never confirm it.

* An external SMT solver: ``emit_smtlib`` produces an SMT-LIB2 script
  asserting the negated bi-implication of the two formulas, and
  ``solver_check`` pipes it through a solver subprocess.  ``unsat`` means the
  formulas are equivalent.  The solver command is taken from an explicit
  config, the FOLBENCH_SOLVER environment variable, a ``z3`` binary on PATH,
  or the bundled solver (folbench.smtsolver), in that order.

The two routes are algorithmically independent on purpose: the oracle
evaluates the satisfaction clauses recursively over explicit structures,
while the bundled solver works on clause forms (SAT-based model search,
Herbrand grounding, resolution).  Their agreement is part of the acceptance
suite.
"""

from __future__ import annotations

import hashlib
import math
import os
import random
import re
import shutil
import subprocess
import sys
import threading
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Mapping, Sequence

from .ontology import Signature, UnknownSymbol
from .syntax import (
    And,
    Atom,
    Constant,
    Exists,
    FolbenchError,
    Forall,
    Formula,
    FunctionApp,
    Iff,
    Implies,
    Not,
    Or,
    Term,
    Variable,
    free_vars,
)


class BudgetExceeded(FolbenchError):
    pass


class SolverNotFound(FolbenchError):
    pass


class SolverCrashed(FolbenchError):
    def __init__(self, message: str, stderr: str = ""):
        self.stderr = stderr
        super().__init__(message + (f"\nsolver stderr:\n{stderr}" if stderr else ""))


class UnsupportedConstruct(FolbenchError):
    pass


# ---------------------------------------------------------------------------
# Structures and the satisfaction relation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SigmaStructure:
    """A finite interpretation: domain elements are integers 0..n-1."""

    domain: tuple[int, ...]
    constant_interp: Mapping[str, int] = field(default_factory=dict)
    predicate_interp: Mapping[str, frozenset[tuple[int, ...]]] = field(default_factory=dict)
    function_interp: Mapping[str, Mapping[tuple[int, ...], int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.domain:
            raise ValueError("structure domain must be non-empty")
        object.__setattr__(self, "constant_interp", dict(self.constant_interp))
        object.__setattr__(
            self,
            "predicate_interp",
            {k: frozenset(map(tuple, v)) for k, v in self.predicate_interp.items()},
        )
        object.__setattr__(
            self,
            "function_interp",
            {k: dict(v) for k, v in self.function_interp.items()},
        )


def _term_value(t: Term, s: SigmaStructure, env: Mapping[str, int]) -> int:
    if isinstance(t, Variable):
        try:
            return env[t.name]
        except KeyError:
            raise UnknownSymbol(t.name, "free variable not bound by the environment") from None
    if isinstance(t, Constant):
        try:
            return s.constant_interp[t.name]
        except KeyError:
            raise UnknownSymbol(t.name, "constant not interpreted by the structure") from None
    try:
        table = s.function_interp[t.name]
    except KeyError:
        raise UnknownSymbol(t.name, "function not interpreted by the structure") from None
    return table[tuple(_term_value(a, s, env) for a in t.args)]


def evaluate(f: Formula, s: SigmaStructure, env: Mapping[str, int] | None = None) -> bool:
    """Truth of f in s under env, by the inductive satisfaction clauses."""
    env = env or {}
    if isinstance(f, Atom):
        try:
            extension = s.predicate_interp[f.predicate]
        except KeyError:
            raise UnknownSymbol(f.predicate, "predicate not interpreted by the structure") from None
        return tuple(_term_value(a, s, env) for a in f.args) in extension
    if isinstance(f, Not):
        return not evaluate(f.operand, s, env)
    if isinstance(f, And):
        return evaluate(f.left, s, env) and evaluate(f.right, s, env)
    if isinstance(f, Or):
        return evaluate(f.left, s, env) or evaluate(f.right, s, env)
    if isinstance(f, Implies):
        return (not evaluate(f.left, s, env)) or evaluate(f.right, s, env)
    if isinstance(f, Iff):
        return evaluate(f.left, s, env) == evaluate(f.right, s, env)
    if isinstance(f, Forall):
        return all(evaluate(f.body, s, {**env, f.var: d}) for d in s.domain)
    return any(evaluate(f.body, s, {**env, f.var: d}) for d in s.domain)


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivVerdict:
    kind: str  # "equivalent" | "not_equivalent" | "unknown"
    method: str | None = None
    reason: str | None = None  # bound-exhausted | solver-unknown | timeout
    counter_structure: SigmaStructure | None = None

    @property
    def is_equivalent(self) -> bool:
        return self.kind == "equivalent"

    @property
    def is_not_equivalent(self) -> bool:
        return self.kind == "not_equivalent"

    @property
    def is_unknown(self) -> bool:
        return self.kind == "unknown"

    @staticmethod
    def equivalent(method: str) -> "EquivVerdict":
        return EquivVerdict("equivalent", method=method)

    @staticmethod
    def not_equivalent(witness: SigmaStructure | None, method: str) -> "EquivVerdict":
        return EquivVerdict("not_equivalent", method=method, counter_structure=witness)

    @staticmethod
    def unknown(reason: str) -> "EquivVerdict":
        return EquivVerdict("unknown", reason=reason)


# ---------------------------------------------------------------------------
# Finite-model oracle
# ---------------------------------------------------------------------------


def _interpretation_count(d: int, sig: Signature) -> int:
    total = d ** len(sig.constants)
    for arity in sig.predicates.values():
        total *= 2 ** (d**arity)
    for arity in sig.functions.values():
        total *= d ** (d**arity)
    return total


def _structure_from_index(idx: int, d: int, sig: Signature) -> SigmaStructure:
    """Decode a mixed-radix index into a structure; the layout is fixed by
    sorted symbol order so enumeration and sampling share one code path."""
    consts: dict[str, int] = {}
    for name in sorted(sig.constants):
        consts[name] = idx % d
        idx //= d
    funcs: dict[str, dict[tuple[int, ...], int]] = {}
    for name in sorted(sig.functions):
        arity = sig.functions[name]
        table: dict[tuple[int, ...], int] = {}
        for point in product(range(d), repeat=arity):
            table[point] = idx % d
            idx //= d
        funcs[name] = table
    preds: dict[str, frozenset[tuple[int, ...]]] = {}
    for name in sorted(sig.predicates):
        arity = sig.predicates[name]
        points = list(product(range(d), repeat=arity))
        mask = idx % (2 ** len(points))
        idx //= 2 ** len(points)
        preds[name] = frozenset(p for bit, p in enumerate(points) if mask >> bit & 1)
    return SigmaStructure(tuple(range(d)), consts, preds, funcs)


def brute_force_check(
    f1: Formula,
    f2: Formula,
    sig: Signature,
    max_domain: int = 3,
    budget: int = 200_000,
    rng_seed: int = 0,
) -> EquivVerdict:
    """Search for a structure on which f1 and f2 disagree.

    Domain sizes 1..max_domain are tried in order.  A size is enumerated
    exhaustively while its interpretation count fits the remaining budget;
    otherwise that many structures are sampled uniformly (deterministically
    in rng_seed).  Signatures with function symbols are only enumerated up to
    domain size 2, where their tables stay tractable.

    Returns NotEquivalent with the first distinguishing structure found, or
    Unknown("bound-exhausted"); this check can never confirm equivalence.
    """
    if budget < 1:
        raise BudgetExceeded(f"budget must be at least 1, got {budget}")
    rng = random.Random(rng_seed)
    remaining = budget
    for d in range(1, max_domain + 1):
        if sig.functions and d > 2:
            break
        if remaining <= 0:
            break
        total = _interpretation_count(d, sig)
        if total <= remaining:
            indices = range(total)
            remaining -= total
        else:
            indices = (rng.randrange(total) for _ in range(remaining))
            remaining = 0
        for idx in indices:
            s = _structure_from_index(idx, d, sig)
            if evaluate(f1, s) != evaluate(f2, s):
                return EquivVerdict.not_equivalent(s, method="brute-force")
    return EquivVerdict.unknown("bound-exhausted")


# ---------------------------------------------------------------------------
# SMT-LIB emission
# ---------------------------------------------------------------------------

_SMT_SIMPLE = re.compile(r"[A-Za-z~!@$%^&*_+=<>.?/-][A-Za-z0-9~!@$%^&*_+=<>.?/-]*")
_SMT_RESERVED = {
    "and", "or", "not", "xor", "forall", "exists", "let", "ite", "as", "par",
    "true", "false", "distinct", "assert", "check-sat", "declare-fun",
    "declare-sort", "Bool", "sat", "unsat", "unknown", "model",
}


def _smt_symbol(name: str) -> str:
    if _SMT_SIMPLE.fullmatch(name) and name not in _SMT_RESERVED:
        return name
    if "|" in name or "\\" in name:
        raise UnsupportedConstruct(f"symbol {name!r} cannot be written in SMT-LIB2")
    return f"|{name}|"


def _smt_term(t: Term) -> str:
    if isinstance(t, (Variable, Constant)):
        return _smt_symbol(t.name)
    return "(" + " ".join([_smt_symbol(t.name), *(_smt_term(a) for a in t.args)]) + ")"


def _smt_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return _smt_symbol(f.predicate)
        return "(" + " ".join([_smt_symbol(f.predicate), *(_smt_term(a) for a in f.args)]) + ")"
    if isinstance(f, Not):
        return f"(not {_smt_formula(f.operand)})"
    if isinstance(f, And):
        return f"(and {_smt_formula(f.left)} {_smt_formula(f.right)})"
    if isinstance(f, Or):
        return f"(or {_smt_formula(f.left)} {_smt_formula(f.right)})"
    if isinstance(f, Implies):
        return f"(=> {_smt_formula(f.left)} {_smt_formula(f.right)})"
    if isinstance(f, Iff):
        return f"(= {_smt_formula(f.left)} {_smt_formula(f.right)})"
    if isinstance(f, Forall):
        return f"(forall (({_smt_symbol(f.var)} U)) {_smt_formula(f.body)})"
    return f"(exists (({_smt_symbol(f.var)} U)) {_smt_formula(f.body)})"


def emit_smtlib(f1: Formula, f2: Formula, sig: Signature) -> str:
    """SMT-LIB2 script whose satisfiability decides non-equivalence.

    One uninterpreted sort U carries the universe; constants are nullary U
    functions and predicates Bool-valued functions over U.  The single
    assertion is the negated bi-implication of the two formulas, so the
    script is unsat exactly when they are equivalent.  Output is byte-stable
    for identical inputs.
    """
    for f in (f1, f2):
        if free_vars(f):
            raise UnsupportedConstruct("only closed formulas can be checked")
    lines = ["(declare-sort U 0)"]
    for name in sorted(sig.constants):
        lines.append(f"(declare-fun {_smt_symbol(name)} () U)")
    for name in sorted(sig.functions):
        params = " ".join(["U"] * sig.functions[name])
        lines.append(f"(declare-fun {_smt_symbol(name)} ({params}) U)")
    for name in sorted(sig.predicates):
        params = " ".join(["U"] * sig.predicates[name])
        lines.append(f"(declare-fun {_smt_symbol(name)} ({params}) Bool)")
    lines.append(f"(assert (not (= {_smt_formula(f1)} {_smt_formula(f2)})))")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# External solver driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    """How to reach the SMT solver.

    path/args override automatic discovery.  keep_smt_dir, when set, writes
    each emitted script there (content-addressed) for audit.
    """

    path: str | None = None
    args: tuple[str, ...] = ()
    timeout_ms: int = 10_000
    keep_smt_dir: str | None = None
    max_domain: int = 3


_process_cap_lock = threading.Lock()
_process_semaphore = threading.BoundedSemaphore(8)


def configure_process_cap(n: int) -> None:
    """Cap the number of simultaneous solver subprocesses (default 8)."""
    global _process_semaphore
    if n < 1:
        raise ValueError("process cap must be at least 1")
    with _process_cap_lock:
        _process_semaphore = threading.BoundedSemaphore(n)


def resolve_solver_command(config: SolverConfig | None = None) -> list[str]:
    config = config or SolverConfig()
    if config.path:
        return [config.path, *config.args]
    env_path = os.environ.get("FOLBENCH_SOLVER")
    if env_path:
        return [env_path, *config.args]
    z3 = shutil.which("z3")
    if z3:
        return [z3, "-in", "-smt2", *config.args]
    return [
        sys.executable,
        "-m",
        "folbench.smtsolver",
        "--model",
        "--max-domain",
        str(config.max_domain),
        *config.args,
    ]


def _maybe_keep_script(script: str, config: SolverConfig) -> None:
    if not config.keep_smt_dir:
        return
    digest = hashlib.sha256(script.encode()).hexdigest()[:16]
    path = Path(config.keep_smt_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / f"{digest}.smt2"
    if not target.exists():
        target.write_text(script, encoding="utf-8")


def solver_check(
    f1: Formula,
    f2: Formula,
    sig: Signature,
    timeout_ms: int | None = None,
    config: SolverConfig | None = None,
) -> EquivVerdict:
    """Equivalence verdict from the external solver.

    unsat means Equivalent; sat means NotEquivalent, carrying a witness
    structure when the solver prints a model in the bundled solver's format
    (otherwise the witness is simply unavailable); anything else is Unknown.
    """
    config = config or SolverConfig()
    timeout_ms = timeout_ms if timeout_ms is not None else config.timeout_ms
    script = emit_smtlib(f1, f2, sig)
    _maybe_keep_script(script, config)
    cmd = resolve_solver_command(config)
    with _process_semaphore:
        try:
            proc = subprocess.run(
                cmd,
                input=script.encode(),
                capture_output=True,
                timeout=timeout_ms / 1000.0,
            )
        except FileNotFoundError:
            raise SolverNotFound(f"solver executable not found: {cmd[0]}") from None
        except subprocess.TimeoutExpired:
            return EquivVerdict.unknown("timeout")
    stdout = proc.stdout.decode(errors="replace")
    answer = stdout.split(None, 1)[0] if stdout.split() else ""
    if answer == "unsat":
        return EquivVerdict.equivalent("solver")
    if answer == "sat":
        witness = _parse_model(stdout)
        return EquivVerdict.not_equivalent(witness, method="solver")
    if answer == "unknown":
        return EquivVerdict.unknown("solver-unknown")
    raise SolverCrashed(
        f"solver {cmd[0]!r} produced no verdict (exit status {proc.returncode})",
        proc.stderr.decode(errors="replace"),
    )


def _parse_model(stdout: str) -> SigmaStructure | None:
    """Parse the bundled solver's model block; None for any other format."""
    start = stdout.find("(model")
    if start < 0:
        return None
    from .smtsolver.sexpr import parse_all

    try:
        forms = parse_all(stdout[start:])
    except Exception:
        return None
    if not forms or not isinstance(forms[0], list) or forms[0][:1] != ["model"]:
        return None
    domain_size = None
    consts: dict[str, int] = {}
    preds: dict[str, frozenset[tuple[int, ...]]] = {}
    funcs: dict[str, dict[tuple[int, ...], int]] = {}
    for entry in forms[0][1:]:
        if not isinstance(entry, list) or not entry:
            return None
        tag = entry[0]
        if tag == "universe":
            domain_size = int(entry[1])
        elif tag == "const":
            consts[entry[1]] = int(entry[2])
        elif tag == "pred":
            name = entry[1]
            tuples = frozenset(tuple(int(x) for x in group) for group in entry[3:])
            preds[name] = tuples
        elif tag == "fun":
            name = entry[1]
            table: dict[tuple[int, ...], int] = {}
            for group in entry[3:]:
                table[tuple(int(x) for x in group[0])] = int(group[1])
            funcs[name] = table
    if domain_size is None:
        return None
    return SigmaStructure(tuple(range(domain_size)), consts, preds, funcs)
