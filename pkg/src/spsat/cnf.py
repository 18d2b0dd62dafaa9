"""CNF formula model, DIMACS reading/writing and assignment evaluation."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

STREAMLINE_MARKER = "c streamlined"


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Origin(enum.Enum):
    ORIGINAL = "original"
    STREAMLINING = "streamlining"


@dataclass(frozen=True, order=True)
class Literal:
    var: int
    negated: bool = False

    def __post_init__(self):
        if self.var < 1:
            raise ValueError(f"variable index must be >= 1, got {self.var}")

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        return cls(abs(lit), lit < 0)

    def to_int(self) -> int:
        return -self.var if self.negated else self.var

    def __neg__(self) -> "Literal":
        return Literal(self.var, not self.negated)

    def value_under(self, value: int) -> bool:
        """Truth value of this literal when its variable takes ``value``."""
        return bool(value) != self.negated

    def __repr__(self):
        return f"{'~' if self.negated else ''}x{self.var}"


@dataclass(frozen=True)
class Clause:
    literals: tuple
    origin: Origin = Origin.ORIGINAL

    def __post_init__(self):
        lits = tuple(lit if isinstance(lit, Literal) else Literal.from_int(lit)
                     for lit in self.literals)
        object.__setattr__(self, "literals", lits)
        if not lits:
            raise ValueError("clause must be nonempty")
        seen = {}
        for lit in lits:
            if lit.var in seen:
                if seen[lit.var] != lit.negated:
                    raise ValueError(f"tautological clause over x{lit.var}")
                raise ValueError(f"x{lit.var} repeated in clause")
            seen[lit.var] = lit.negated
        if self.origin is Origin.STREAMLINING and len(lits) > 2:
            raise ValueError("streamlining clauses have at most two literals")

    @classmethod
    def from_ints(cls, lits: Iterable[int], origin=Origin.ORIGINAL) -> "Clause":
        return cls(tuple(Literal.from_int(x) for x in lits), origin)

    def to_ints(self) -> list:
        return [lit.to_int() for lit in self.literals]

    @property
    def variables(self):
        return [lit.var for lit in self.literals]

    def __len__(self):
        return len(self.literals)

    def __iter__(self):
        return iter(self.literals)

    def is_satisfied(self, values: Mapping[int, int]) -> bool:
        return any(lit.value_under(values[lit.var]) for lit in self.literals)


@dataclass(frozen=True)
class Formula:
    """Immutable CNF formula over variables ``1..n_vars``."""

    n_vars: int
    clauses: tuple = field(default=())

    def __post_init__(self):
        clauses = tuple(self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.n_vars < 0:
            raise ValueError("n_vars must be nonnegative")
        for idx, clause in enumerate(clauses):
            if not isinstance(clause, Clause):
                raise TypeError(f"clause {idx} is not a Clause")
            for lit in clause.literals:
                if lit.var > self.n_vars:
                    raise ValueError(
                        f"clause {idx} mentions x{lit.var} but n_vars={self.n_vars}")

    @classmethod
    def from_ints(cls, n_vars: int, clauses: Iterable[Iterable[int]],
                  origin=Origin.ORIGINAL) -> "Formula":
        return cls(n_vars, tuple(Clause.from_ints(c, origin) for c in clauses))

    def to_ints(self) -> list:
        return [c.to_ints() for c in self.clauses]

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    @property
    def density(self) -> float:
        return self.n_clauses / self.n_vars if self.n_vars else float("inf")

    def __len__(self):
        return len(self.clauses)

    def with_clauses(self, extra: Iterable[Clause]) -> "Formula":
        return Formula(self.n_vars, self.clauses + tuple(extra))

    def original(self) -> "Formula":
        """Copy with streamlining clauses dropped."""
        return Formula(self.n_vars, tuple(c for c in self.clauses
                                          if c.origin is Origin.ORIGINAL))

    @cached_property
    def csr(self):
        """``(starts, vars0, negs)`` arrays: 0-based variables, per-clause slices."""
        lengths = np.fromiter((len(c) for c in self.clauses), dtype=np.int64,
                              count=len(self.clauses))
        starts = np.zeros(len(self.clauses) + 1, dtype=np.int64)
        np.cumsum(lengths, out=starts[1:])
        flat = [lit for c in self.clauses for lit in c.literals]
        vars0 = np.fromiter((lit.var - 1 for lit in flat), dtype=np.int64, count=len(flat))
        negs = np.fromiter((lit.negated for lit in flat), dtype=np.bool_, count=len(flat))
        return starts, vars0, negs


@dataclass(frozen=True)
class Evaluation:
    satisfied: bool
    violated: tuple

    def __bool__(self):
        return self.satisfied


def as_value_map(assignment, n_vars=None) -> dict:
    """Accept a dict ``{var: 0/1}`` or a sequence indexed from variable 1."""
    if isinstance(assignment, Mapping):
        return {int(k): int(v) for k, v in assignment.items()}
    values = list(assignment)
    if n_vars is not None and len(values) != n_vars:
        raise ValueError(f"assignment has {len(values)} values, expected {n_vars}")
    return {i + 1: int(v) for i, v in enumerate(values)}


def evaluate(formula: Formula, assignment) -> Evaluation:
    """Check ``assignment`` against every clause.

    Violated clause ids are 1-based, matching clause order in DIMACS files.
    """
    values = as_value_map(assignment)
    missing = [v for v in range(1, formula.n_vars + 1) if v not in values]
    if missing:
        raise ValueError(f"assignment is incomplete, missing {missing[:10]}")
    for var, val in values.items():
        if val not in (0, 1):
            raise ValueError(f"x{var} has non-boolean value {val}")
    violated = tuple(idx + 1 for idx, clause in enumerate(formula.clauses)
                     if not clause.is_satisfied(values))
    return Evaluation(not violated, violated)


def parse_dimacs(text) -> Formula:
    """Read a DIMACS CNF document (``str`` or ``bytes``).

    A ``c streamlined`` comment marks the next clause as a streamlining
    clause, so files written by :func:`emit_dimacs` read back unchanged.
    Duplicate literals inside a clause are dropped; tautologies are errors.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode()
    n_vars = n_decl = None
    clauses = []
    current: list = []
    current_line = None
    pending_streamline = False
    clause_origin = Origin.ORIGINAL

    def close_clause(lineno):
        nonlocal current, pending_streamline, clause_origin
        if not current:
            raise ParseError("empty clause", lineno)
        seen = {}
        lits = []
        for lit in current:
            var, neg = abs(lit), lit < 0
            if var in seen:
                if seen[var] != neg:
                    raise ParseError(f"tautological clause (x{var} and ~x{var})", lineno)
                continue
            seen[var] = neg
            lits.append(Literal(var, neg))
        try:
            clauses.append(Clause(tuple(lits), clause_origin))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        current = []
        pending_streamline = False
        clause_origin = Origin.ORIGINAL

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            if line == STREAMLINE_MARKER or line.startswith(STREAMLINE_MARKER + " "):
                pending_streamline = True
            continue
        if line.startswith("p"):
            if n_vars is not None:
                raise ParseError("duplicate header", lineno)
            fields = line.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise ParseError(f"malformed header {line!r}", lineno)
            try:
                n_vars, n_decl = int(fields[2]), int(fields[3])
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if n_vars < 0 or n_decl < 0:
                raise ParseError(f"negative counts in header {line!r}", lineno)
            continue
        if line.startswith("%"):
            # SATLIB end-of-data marker
            break
        if n_vars is None:
            raise ParseError("clause before header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                close_clause(lineno)
                continue
            if abs(lit) > n_vars:
                raise ParseError(f"literal {lit} exceeds n_vars={n_vars}", lineno)
            if not current:
                current_line = lineno
                if pending_streamline:
                    clause_origin = Origin.STREAMLINING
            current.append(lit)
    if n_vars is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        raise ParseError("last clause is not terminated by 0", current_line)
    if len(clauses) != n_decl:
        raise ParseError(f"header declares {n_decl} clauses, found {len(clauses)}")
    return Formula(n_vars, tuple(clauses))


def emit_dimacs(formula: Formula, comments: Sequence[str] = ()) -> str:
    out = [f"c {c}" for c in comments]
    out.append(f"p cnf {formula.n_vars} {formula.n_clauses}")
    for clause in formula.clauses:
        if clause.origin is Origin.STREAMLINING:
            out.append(STREAMLINE_MARKER)
        out.append(" ".join(str(x) for x in clause.to_ints()) + " 0")
    return "\n".join(out) + "\n"


def read_dimacs(path) -> Formula:
    with open(path, "rb") as fh:
        return parse_dimacs(fh.read())


def write_dimacs(formula: Formula, path, comments: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(emit_dimacs(formula, comments))
