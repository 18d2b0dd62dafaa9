"""WalkSAT local search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from . import _kernels
from .cnf import Formula, evaluate
from .validation import check_formula


@dataclass(frozen=True)
class WalkSatParams:
    """``max_flips=None`` means ``100 * n_vars`` of the formula being searched."""

    noise: float = 0.5
    max_flips: int | None = None
    tries: int = 10
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError("noise must lie in [0, 1]")
        if self.max_flips is not None and self.max_flips < 1:
            raise ValueError("max_flips must be >= 1")
        if self.tries < 1:
            raise ValueError("tries must be >= 1")

    def flips_for(self, n_vars):
        return self.max_flips if self.max_flips is not None else max(1, 100 * n_vars)


@dataclass
class WalkSatResult:
    found: bool
    assignment: dict | None
    flips: int

    def __bool__(self):
        return self.found


def occurrence_lists(formula: Formula):
    """Variable-side CSR: ``(var_start, occ_clause, occ_neg)``."""
    starts, vars0, negs = formula.csr
    clause_of = np.repeat(np.arange(formula.n_clauses, dtype=np.int64), np.diff(starts))
    order = np.argsort(vars0, kind="stable")
    counts = np.bincount(vars0, minlength=formula.n_vars)
    var_start = np.zeros(formula.n_vars + 1, dtype=np.int64)
    np.cumsum(counts, out=var_start[1:])
    return var_start, clause_of[order], negs[order]


def walksat(formula: Formula, params: WalkSatParams = WalkSatParams()) -> WalkSatResult:
    """Search for a satisfying assignment; a ``found`` result is always verified."""
    n = formula.n_vars
    if formula.n_clauses == 0:
        return WalkSatResult(True, {v: 0 for v in range(1, n + 1)}, 0)
    starts, vars0, negs = formula.csr
    var_start, occ_clause, occ_neg = occurrence_lists(formula)
    state = np.array([params.seed % (1 << 64)], dtype=np.uint64)
    found, assign, flips = _kernels.walksat(
        starts, vars0, negs, var_start, occ_clause, occ_neg, n,
        float(params.noise), int(params.flips_for(n)), int(params.tries), state)
    if not found:
        return WalkSatResult(False, None, int(flips))
    values = {v + 1: int(assign[v]) for v in range(n)}
    if not evaluate(formula, values).satisfied:
        raise AssertionError("walksat returned an assignment that does not verify")
    return WalkSatResult(True, values, int(flips))


class WalkSAT(BaseEstimator):
    """Estimator wrapper: ``fit`` searches, ``predict`` returns a 0/1 vector."""

    def __init__(self, noise=0.5, max_flips=None, tries=10, random_state=0):
        self.noise = noise
        self.max_flips = max_flips
        self.tries = tries
        self.random_state = random_state

    def fit(self, X, y=None):
        formula = check_formula(X)
        params = WalkSatParams(self.noise, self.max_flips, self.tries, self.random_state)
        result = walksat(formula, params)
        self.found_ = result.found
        self.n_flips_ = result.flips
        self.assignment_ = (np.array([result.assignment[v] for v in range(1, formula.n_vars + 1)],
                                     dtype=np.int8) if result.found else None)
        return self

    def predict(self, X):
        return self.fit(X).assignment_
