import pytest

from spsat.branching import (Candidate, StreamlineCounters, decimate_step, n_branch, pair_indices,
                             rank_candidates, streamline_step)
from spsat.cnf import Clause, Formula, Literal, Origin
from spsat.graph import FactorGraph
from spsat.sp import MarginalTable

TABLE = MarginalTable.from_rows({1: (0.9, 0.05, 0.05), 2: (0.1, 0.8, 0.1), 3: (0.5, 0.5, 0.0)})


def test_rank_golden():
    cands = rank_candidates(TABLE)
    assert [(c.var, c.value) for c in cands] == [(1, 0), (2, 1), (3, 0)]
    assert [c.magnetization for c in cands] == pytest.approx([0.85, 0.7, 0.0])


def test_rank_excludes_saturated_counter():
    counters = StreamlineCounters(threshold=2, count={1: 2})
    assert [c.var for c in rank_candidates(TABLE, counters)] == [2, 3]


def test_rank_ties_by_variable_id():
    table = MarginalTable.from_rows({v: (0.3, 0.3, 0.4) for v in (4, 2, 3, 1)})
    assert [c.var for c in rank_candidates(table)] == [1, 2, 3, 4]


def test_rank_skips_dead_variables():
    table = MarginalTable.from_rows({1: (0.9, 0.1, 0.0), 3: (0.2, 0.7, 0.1)}, n_vars=3)
    assert [c.var for c in rank_candidates(table)] == [1, 3]


def test_decimate_golden():
    assert decimate_step(None, TABLE, 1) == [(1, 0)]
    assert decimate_step(None, TABLE, 2) == [(1, 0), (2, 1)]
    assert decimate_step(None, TABLE, 10) == [(1, 0), (2, 1), (3, 0)]
    with pytest.raises(ValueError):
        decimate_step(None, TABLE, 0)


def test_candidate_literal():
    assert Candidate(4, 0, 0.5).literal == Literal(4, True)
    assert Candidate(4, 1, 0.5).literal == Literal(4, False)


def test_streamline_outer_pairing():
    table = MarginalTable.from_rows({1: (0.0, 0.9, 0.1), 2: (0.8, 0.0, 0.2),
                                     3: (0.0, 0.7, 0.3), 4: (0.6, 0.0, 0.4)})
    counters = StreamlineCounters()
    clauses = streamline_step(None, table, 2, counters)
    assert [c.to_ints() for c in clauses] == [[1, -4], [-2, 3]]
    assert all(c.origin is Origin.STREAMLINING for c in clauses)
    assert counters.count == {1: 1, 2: 1, 3: 1, 4: 1}


def test_streamline_single_pair():
    table = MarginalTable.from_rows({1: (0.1, 0.8, 0.1), 2: (0.2, 0.7, 0.1), 3: (0.3, 0.3, 0.4)})
    assert [c.to_ints() for c in streamline_step(None, table, 1, StreamlineCounters())] == [[1, 2]]


def test_streamline_odd_candidate_count():
    table = MarginalTable.from_rows({1: (0.9, 0.0, 0.1), 2: (0.0, 0.8, 0.2), 3: (0.7, 0.0, 0.3)})
    clauses = streamline_step(None, table, 2, StreamlineCounters())
    assert [c.to_ints() for c in clauses] == [[-1, -3]]


def test_streamline_respects_threshold_and_duplicates():
    table = MarginalTable.from_rows({1: (0.0, 0.9, 0.1), 2: (0.0, 0.8, 0.2), 3: (0.0, 0.1, 0.9)})
    counters = StreamlineCounters(threshold=1)
    assert len(streamline_step(None, table, 1, counters)) == 1
    # 1 and 2 are saturated; only x3 is eligible, so no pair forms
    assert streamline_step(None, table, 1, counters) == []

    counters = StreamlineCounters(threshold=5)
    first = streamline_step(None, table, 1, counters)
    again = streamline_step(None, table, 1, counters)
    assert first and again == []


def test_streamline_appends_to_graph():
    g = FactorGraph(Formula.from_ints(4, [[1, 2, 3], [-2, 3, 4]]))
    table = MarginalTable.from_rows({1: (0.0, 0.9, 0.1), 2: (0.8, 0.0, 0.2),
                                     3: (0.3, 0.3, 0.4), 4: (0.3, 0.3, 0.4)})
    streamline_step(g, table, 1, StreamlineCounters())
    assert g.n_clauses == 3
    assert g.clause_adj(2) == [(1, False), (2, True)]
    g.check_invariants()


def test_pair_indices():
    assert pair_indices(4, "outer") == [(0, 3), (1, 2)]
    assert pair_indices(4, "block") == [(0, 2), (1, 3)]
    assert pair_indices(5, "outer") == [(0, 4), (1, 3)]
    with pytest.raises(ValueError):
        pair_indices(4, "zigzag")


def test_n_branch():
    assert n_branch(5000, 0.01) == 50
    assert n_branch(24, 0.01) == 1
    assert n_branch(250, 0.01) == 3


def test_counter_overflow_guard():
    counters = StreamlineCounters(threshold=1)
    counters.bump(3)
    with pytest.raises(AssertionError):
        counters.bump(3)


def test_streamline_clause_type():
    clause = Clause((Literal(1, False), Literal(2, True)), Origin.STREAMLINING)
    assert clause.to_ints() == [1, -2]
