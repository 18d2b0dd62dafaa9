import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spsat.cnf import Clause, Formula, Origin, evaluate
from spsat.graph import Contradiction, FactorGraph, build_factor_graph, unit_propagate

# variables i, j, k, l, m are 1..5
FIG1 = Formula.from_ints(5, [[-1, 3, -4], [1, 2, -3], [3, 4, -5]])


def test_fig1_counts():
    g = build_factor_graph(FIG1)
    assert (g.n_vars, g.n_clauses, g.n_edges) == (5, 3, 9)
    g.check_invariants()


def test_empty_formula_graph():
    g = build_factor_graph(Formula(4, ()))
    assert g.n_edges == 0
    assert g.n_live_vars() == 4
    assert all(g.var_adj(v) == [] for v in range(1, 5))


def test_adjacency_is_symmetric():
    g = build_factor_graph(FIG1)
    for c in range(g.n_clauses):
        for v, neg in g.clause_adj(c):
            assert (c, neg) in g.var_adj(v)
    assert sum(len(g.var_adj(v)) for v in range(1, 6)) == g.n_edges


def test_fix_k_zero_on_fig1():
    g = unit_propagate(build_factor_graph(FIG1), [(3, 0)])
    g.check_invariants()
    assert g.clause_adj(0) == [(1, True), (4, True)]
    assert not g.clause_live[1]
    assert g.clause_adj(2) == [(4, False), (5, True)]
    assert g.var_adj(2) == []
    assert g.assigned() == {3: 0}


def test_fix_isolated_variable():
    f = Formula.from_ints(3, [[1, 2]])
    g = unit_propagate(build_factor_graph(f), [(3, 1)])
    assert g.assigned() == {3: 1}
    assert g.edge_live.all() and g.clause_live.all()


def test_direct_conflict():
    g = build_factor_graph(Formula.from_ints(1, [[1], [-1]]))
    with pytest.raises(Contradiction):
        unit_propagate(g, [(1, 1)])


def test_conflicting_fixes():
    g = build_factor_graph(Formula.from_ints(2, [[1, 2]]))
    with pytest.raises(Contradiction):
        unit_propagate(g, [(1, 1), (1, 0)])


def test_chain_propagates():
    f = Formula.from_ints(4, [[-1, 2], [-2, 3], [-3, 4]])
    g = unit_propagate(build_factor_graph(f), [(1, 1)])
    assert g.assigned() == {1: 1, 2: 1, 3: 1, 4: 1}
    assert not g.clause_live.any()


def test_bad_fix_rejected():
    g = build_factor_graph(FIG1)
    with pytest.raises(ValueError):
        unit_propagate(g, [(6, 1)])
    with pytest.raises(ValueError):
        unit_propagate(g, [(1, 2)])


def test_add_clauses_keeps_edge_ids():
    g = build_factor_graph(FIG1)
    before = g.edge_var.copy()
    ids = g.add_clauses([Clause.from_ints([1, 5], Origin.STREAMLINING)])
    assert ids == [3]
    assert np.array_equal(g.edge_var[:9], before)
    assert g.clause_adj(3) == [(1, False), (5, False)]
    assert (3, False) in g.var_adj(5)
    assert g.current_formula().clauses[-1].origin is Origin.STREAMLINING
    g.check_invariants()


def test_add_clause_on_assigned_variable_rejected():
    g = unit_propagate(build_factor_graph(FIG1), [(3, 0)])
    with pytest.raises(ValueError):
        g.add_clauses([Clause.from_ints([3, 1], Origin.STREAMLINING)])


def test_copy_is_independent():
    g = build_factor_graph(FIG1)
    h = g.copy()
    unit_propagate(h, [(3, 0)])
    assert g.clause_live.all()
    assert g.assigned() == {}


def _solutions(formula):
    n = formula.n_vars
    out = set()
    for bits in itertools.product((0, 1), repeat=n):
        if evaluate(formula, dict(zip(range(1, n + 1), bits))).satisfied:
            out.add(bits)
    return out


clause_st = st.lists(st.integers(1, 7), min_size=1, max_size=3, unique=True).flatmap(
    lambda vs: st.tuples(*[st.sampled_from([v, -v]) for v in vs]))


@settings(max_examples=150, deadline=None)
@given(clauses=st.lists(clause_st, min_size=1, max_size=14),
       fixes=st.lists(st.tuples(st.integers(1, 7), st.integers(0, 1)), min_size=1, max_size=3,
                      unique_by=lambda p: p[0]))
def test_propagation_preserves_solution_set(clauses, fixes):
    f = Formula.from_ints(7, clauses)
    with_fixes = f.with_clauses([Clause.from_ints([v if b else -v]) for v, b in fixes])
    expected = _solutions(with_fixes)
    g = build_factor_graph(f)
    try:
        unit_propagate(g, fixes)
    except Contradiction:
        assert expected == set()
        return
    g.check_invariants()
    assigned = g.assigned()
    residual = g.residual()
    got = {bits for bits in _solutions(residual)
           if all(bits[v - 1] == val for v, val in assigned.items())}
    assert got == expected
    # no live clause may be satisfied or empty after propagation
    for c in np.flatnonzero(g.clause_live):
        assert len(g.clause_adj(c)) >= 1
