"""Mutable factor graph with lazy deletion and clause insertion."""

from __future__ import annotations

import numpy as np

from . import _kernels
from .cnf import Clause, Formula, Literal, Origin


class Contradiction(Exception):
    """Raised when propagation empties a clause or forces conflicting values."""


class FactorGraph:
    """Bipartite variable/clause graph over a CNF formula.

    Deletion never compacts storage: dead clauses and edges are flagged and
    skipped, and new clauses are appended.  Messages indexed by edge id stay
    valid across both kinds of mutation.

    Attributes
    ----------
    n_vars : int
    edge_clause, edge_var, edge_neg : ndarray
        Edge endpoints (0-based variable) and literal sign.
    clause_start : ndarray
        ``clause_start[c]:clause_start[c + 1]`` is the edge range of clause ``c``.
    var_start, var_edges : ndarray
        Variable-side CSR index into edges.
    edge_live, clause_live, var_live : ndarray of bool
    clause_nlive : ndarray
        Live edge count per clause.
    assignment : ndarray of int8
        -1 for unassigned variables, else 0/1.
    """

    def __init__(self, formula: Formula):
        self.n_vars = formula.n_vars
        self.formula = formula
        starts, vars0, negs = formula.csr
        m = formula.n_clauses
        self.clause_start = starts.copy()
        self.edge_var = vars0.copy()
        self.edge_neg = negs.copy()
        self.edge_clause = np.repeat(np.arange(m, dtype=np.int64), np.diff(starts))
        self.clause_origin = [c.origin for c in formula.clauses]
        self.edge_live = np.ones(len(vars0), dtype=np.bool_)
        self.clause_live = np.ones(m, dtype=np.bool_)
        self.clause_nlive = np.diff(starts).astype(np.int64)
        self.var_live = np.ones(self.n_vars, dtype=np.bool_)
        self.assignment = np.full(self.n_vars, -1, dtype=np.int8)
        self._reindex_vars()

    def _reindex_vars(self):
        order = np.argsort(self.edge_var, kind="stable")
        counts = np.bincount(self.edge_var, minlength=self.n_vars)
        self.var_start = np.zeros(self.n_vars + 1, dtype=np.int64)
        np.cumsum(counts, out=self.var_start[1:])
        self.var_edges = order.astype(np.int64)

    @property
    def n_clauses(self):
        return len(self.clause_live)

    @property
    def n_edges(self):
        return len(self.edge_var)

    def live_edges(self):
        return np.flatnonzero(self.edge_live)

    def n_live_vars(self):
        return int(self.var_live.sum())

    def add_clauses(self, clauses):
        """Append clauses; literals on assigned variables are rejected."""
        clauses = list(clauses)
        if not clauses:
            return []
        new_ids = []
        lens, vs, ns = [], [], []
        for clause in clauses:
            for lit in clause.literals:
                if self.assignment[lit.var - 1] != -1:
                    raise ValueError(f"x{lit.var} is already assigned")
            new_ids.append(self.n_clauses + len(new_ids))
            lens.append(len(clause))
            vs.extend(lit.var - 1 for lit in clause.literals)
            ns.extend(lit.negated for lit in clause.literals)
            self.clause_origin.append(clause.origin)
        lens = np.asarray(lens, dtype=np.int64)
        base = self.clause_start[-1]
        self.clause_start = np.concatenate([self.clause_start, base + np.cumsum(lens)])
        self.edge_clause = np.concatenate(
            [self.edge_clause, np.repeat(np.asarray(new_ids, dtype=np.int64), lens)])
        self.edge_var = np.concatenate([self.edge_var, np.asarray(vs, dtype=np.int64)])
        self.edge_neg = np.concatenate([self.edge_neg, np.asarray(ns, dtype=np.bool_)])
        self.edge_live = np.concatenate([self.edge_live, np.ones(len(vs), dtype=np.bool_)])
        self.clause_live = np.concatenate([self.clause_live, np.ones(len(lens), dtype=np.bool_)])
        self.clause_nlive = np.concatenate([self.clause_nlive, lens])
        self._reindex_vars()
        return new_ids

    def var_adj(self, var):
        """Live ``(clause id, negated)`` pairs of a 1-based variable."""
        v = var - 1
        out = []
        for e in self.var_edges[self.var_start[v]:self.var_start[v + 1]]:
            if self.edge_live[e]:
                out.append((int(self.edge_clause[e]), bool(self.edge_neg[e])))
        return out

    def clause_adj(self, clause_id):
        """Live ``(1-based variable, negated)`` pairs of a clause."""
        out = []
        for e in range(self.clause_start[clause_id], self.clause_start[clause_id + 1]):
            if self.edge_live[e]:
                out.append((int(self.edge_var[e]) + 1, bool(self.edge_neg[e])))
        return out

    def check_invariants(self):
        """Assert structural consistency; used by tests."""
        live = self.edge_live
        assert not np.any(live & ~self.clause_live[self.edge_clause]), "live edge on dead clause"
        assert not np.any(live & ~self.var_live[self.edge_var]), "live edge on dead variable"
        counts = np.bincount(self.edge_clause[live], minlength=self.n_clauses)
        assert np.array_equal(counts, self.clause_nlive), "clause live counts out of sync"
        assigned = self.assignment != -1
        assert not np.any(assigned & self.var_live), "assigned variable still live"
        for v in range(self.n_vars):
            for e in self.var_edges[self.var_start[v]:self.var_start[v + 1]]:
                assert self.edge_var[e] == v
        return True

    def residual(self) -> Formula:
        """Live clauses restricted to live literals, over the same variables."""
        clauses = []
        for c in np.flatnonzero(self.clause_live):
            lits = [Literal(int(self.edge_var[e]) + 1, bool(self.edge_neg[e]))
                    for e in range(self.clause_start[c], self.clause_start[c + 1])
                    if self.edge_live[e]]
            clauses.append(Clause(tuple(lits), self.clause_origin[c]))
        return Formula(self.n_vars, tuple(clauses))

    def current_formula(self) -> Formula:
        """Every stored clause (live or not) plus unit clauses for assignments.

        Its solution set equals the set of full assignments consistent with the
        graph's clause database and the fixes applied so far.
        """
        clauses = []
        for c in range(self.n_clauses):
            lits = tuple(Literal(int(self.edge_var[e]) + 1, bool(self.edge_neg[e]))
                         for e in range(self.clause_start[c], self.clause_start[c + 1]))
            clauses.append(Clause(lits, self.clause_origin[c]))
        for v in np.flatnonzero(self.assignment != -1):
            clauses.append(Clause((Literal(int(v) + 1, self.assignment[v] == 0),)))
        return Formula(self.n_vars, tuple(clauses))

    def assigned(self):
        """1-based ``{var: value}`` of the partial assignment."""
        return {int(v) + 1: int(self.assignment[v])
                for v in np.flatnonzero(self.assignment != -1)}

    def copy(self) -> "FactorGraph":
        other = object.__new__(FactorGraph)
        for key, value in self.__dict__.items():
            setattr(other, key, value.copy() if hasattr(value, "copy") else value)
        return other


def build_factor_graph(formula: Formula) -> FactorGraph:
    return FactorGraph(formula)


def unit_propagate(graph: FactorGraph, fixes) -> FactorGraph:
    """Fix ``(var, value)`` pairs (1-based) and simplify to fixpoint, in place.

    Returns the graph for chaining.  Raises :class:`Contradiction` when a
    clause loses every literal or two implied values clash; the graph is left
    partially simplified in that case.
    """
    fixes = list(fixes)
    fix_vars = np.asarray([v - 1 for v, _ in fixes], dtype=np.int64)
    fix_vals = np.asarray([val for _, val in fixes], dtype=np.int8)
    if np.any((fix_vars < 0) | (fix_vars >= graph.n_vars)):
        raise ValueError("fix refers to a variable outside the graph")
    if np.any((fix_vals != 0) & (fix_vals != 1)):
        raise ValueError("fix values must be 0 or 1")
    status, _, _ = _kernels.unit_propagate(
        fix_vars, fix_vals, graph.edge_clause, graph.edge_var, graph.edge_neg,
        graph.clause_start, graph.var_start, graph.var_edges,
        graph.edge_live, graph.clause_live, graph.clause_nlive,
        graph.var_live, graph.assignment)
    if status == _kernels.UP_CONTRADICTION:
        raise Contradiction("unit propagation emptied a clause")
    return graph
