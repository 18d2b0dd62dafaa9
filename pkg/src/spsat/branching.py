"""Candidate ranking, decimation fixes and streamlining disjunctions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .cnf import Clause, Literal, Origin
from .gen import n_constraints

PAIRINGS = ("outer", "block")


class Candidate(NamedTuple):
    var: int
    value: int
    magnetization: float

    @property
    def literal(self) -> Literal:
        return Literal(self.var, self.value == 0)


@dataclass
class StreamlineCounters:
    """How many streamlining clauses each variable already sits in."""

    threshold: int = 2
    count: dict = field(default_factory=dict)
    added: set = field(default_factory=set)

    def eligible(self, var):
        return self.count.get(var, 0) < self.threshold

    def bump(self, var):
        self.count[var] = self.count.get(var, 0) + 1
        if self.count[var] > self.threshold:
            raise AssertionError(f"x{var} exceeded the streamlining threshold")


def n_branch(n, r_frac):
    """Branching width ``max(1, round(r_frac * n))``."""
    return max(1, n_constraints(r_frac, n))


def rank_candidates(marginals, counters=None, limit=None):
    """Live variables by descending magnetization, ties by lower variable id.

    Variables whose streamlining counter has reached the threshold are left out.
    """
    mags = marginals.magnetization
    live = np.flatnonzero(marginals.live)
    if counters is not None and counters.count:
        keep = [v for v in live if counters.eligible(int(v) + 1)]
        live = np.asarray(keep, dtype=np.int64)
    order = live[np.lexsort((live, -mags[live]))]
    if limit is not None:
        order = order[:limit]
    preferred = marginals.preferred
    return [Candidate(int(v) + 1, int(preferred[v]), float(mags[v])) for v in order]


def decimate_step(graph, marginals, R):
    """Top-``R`` ``(var, value)`` fixes; empty when no live variable remains."""
    if R < 1:
        raise ValueError("R must be >= 1")
    return [(c.var, c.value) for c in rank_candidates(marginals, limit=R)]


def pair_indices(size, pairing="outer"):
    """Index pairs into a candidate list of length ``size``.

    ``outer`` matches most with least confident (first with last, and so on);
    ``block`` matches position ``i`` with ``i + size // 2``.  An odd middle
    element is dropped.
    """
    half = size // 2
    if pairing == "outer":
        return [(i, size - 1 - i) for i in range(half)]
    if pairing == "block":
        return [(i, i + half) for i in range(half)]
    raise ValueError(f"unknown pairing {pairing!r}")


def streamline_step(graph, marginals, R, counters, pairing="outer"):
    """Add up to ``R`` two-literal disjunctions over the top ``2R`` candidates.

    The clauses are appended to ``graph`` (when one is given) and the
    counters of every participating variable are incremented.  Returns the
    clauses actually added; an empty list means the caller should decimate.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    cands = rank_candidates(marginals, counters, limit=2 * R)
    if len(cands) < 2:
        return []
    added = []
    for i, j in pair_indices(len(cands), pairing):
        a, b = cands[i].literal, cands[j].literal
        key = frozenset((a, b))
        if key in counters.added:
            continue
        counters.added.add(key)
        counters.bump(a.var)
        counters.bump(b.var)
        added.append(Clause((a, b), Origin.STREAMLINING))
    if graph is not None and added:
        graph.add_clauses(added)
    return added
