"""Seeded random k-SAT and 2-XORSAT instances."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .cnf import Clause, Formula, Literal
from .oracle import XorSystem
from .rng import SplitMix64


class Kind(enum.Enum):
    KSAT = "ksat"
    XOR2SAT = "xor2sat"


def n_constraints(alpha, n):
    """``round(alpha * n)`` with ties rounded away from zero."""
    x = alpha * n
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


@dataclass(frozen=True)
class GenSpec:
    n: int
    alpha: float
    k: int = 3
    seed: int = 0
    kind: Kind = Kind.KSAT

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", Kind(self.kind))
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.kind is Kind.KSAT and not (self.k >= 2 and self.n >= self.k):
            raise ValueError(f"k-SAT needs n >= k >= 2, got n={self.n}, k={self.k}")
        if self.kind is Kind.XOR2SAT and self.n < 2:
            raise ValueError(f"2-XORSAT needs n >= 2, got n={self.n}")

    @property
    def m(self):
        return n_constraints(self.alpha, self.n)


def _distinct_vars(rng, n, k):
    chosen = []
    while len(chosen) < k:
        v = rng.below(n) + 1
        if v not in chosen:
            chosen.append(v)
    return chosen


def gen_ksat(spec: GenSpec) -> Formula:
    """Uniform random k-SAT: per clause, k distinct variables then k sign coins."""
    if spec.kind is not Kind.KSAT:
        raise ValueError("spec kind must be KSAT")
    rng = SplitMix64(spec.seed)
    clauses = []
    for _ in range(spec.m):
        vs = _distinct_vars(rng, spec.n, spec.k)
        clauses.append(Clause(tuple(Literal(v, bool(rng.coin())) for v in vs)))
    return Formula(spec.n, tuple(clauses))


def xor_clauses(i, j, parity):
    """CNF of ``x_i XOR x_j = parity`` as two 2-clauses."""
    if parity:
        return [Clause((Literal(i, True), Literal(j, True))),
                Clause((Literal(i, False), Literal(j, False)))]
    return [Clause((Literal(i, False), Literal(j, True))),
            Clause((Literal(i, True), Literal(j, False)))]


def xor_to_cnf(system: XorSystem) -> Formula:
    clauses = []
    for i, j, p in system.constraints:
        clauses.extend(xor_clauses(i, j, p))
    return Formula(system.n_vars, tuple(clauses))


def gen_2xorsat(spec: GenSpec):
    """Random 2-XORSAT system and its CNF encoding.

    Each constraint draws two distinct variables and then one parity coin.
    """
    if spec.kind is not Kind.XOR2SAT:
        raise ValueError("spec kind must be XOR2SAT")
    rng = SplitMix64(spec.seed)
    constraints = []
    for _ in range(spec.m):
        i, j = _distinct_vars(rng, spec.n, 2)
        constraints.append((i, j, int(rng.coin())))
    system = XorSystem(spec.n, tuple(constraints))
    return xor_to_cnf(system), system


def generate(spec: GenSpec):
    """Dispatch on ``spec.kind``; XOR specs return ``(formula, system)``."""
    if spec.kind is Kind.KSAT:
        return gen_ksat(spec)
    return gen_2xorsat(spec)
