import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spsat.cnf import (Clause, Formula, Literal, Origin, ParseError, emit_dimacs, evaluate,
                       parse_dimacs, read_dimacs, write_dimacs)
from spsat.gen import GenSpec, gen_ksat


def test_parse_single_clause():
    f = parse_dimacs("p cnf 2 1\n1 -2 0")
    assert f.n_vars == 2
    assert f.to_ints() == [[1, -2]]
    assert f.clauses[0].literals == (Literal(1, False), Literal(2, True))


def test_parse_rejects_tautology():
    with pytest.raises(ParseError, match="tautolog"):
        parse_dimacs("p cnf 1 1\n1 -1 0")


@pytest.mark.parametrize("text, fragment", [
    ("p cnf 2 1\n1 3 0", "exceeds"),
    ("p cnf 2 2\n1 2 0", "declares 2 clauses"),
    ("1 2 0\np cnf 2 1", "before"),
    ("p cnf 2 1\n1 2", "not terminated"),
    ("p cnf 2 1\n0", "empty"),
    ("p cnf x 1\n1 0", "header"),
    ("p cnf 2 1\np cnf 2 1\n1 0", "header"),
    ("p cnf 2 1\n1 a 0", "line 2"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_dimacs(text)


def test_parse_accepts_bytes_comments_and_multiline_clauses():
    f = parse_dimacs(b"c hello\np cnf 3 2\n1 2\n 3 0 -1\nc mid\n-2 0\n")
    assert f.to_ints() == [[1, 2, 3], [-1, -2]]


def test_duplicate_literals_collapse():
    assert parse_dimacs("p cnf 2 1\n1 1 2 0").to_ints() == [[1, 2]]


def test_emit_single_clause():
    f = Formula.from_ints(2, [[1, -2]])
    assert emit_dimacs(f) == "p cnf 2 1\n1 -2 0\n"


def test_emit_empty():
    assert emit_dimacs(Formula(4, ())) == "p cnf 4 0\n"


def test_streamlining_origin_survives_round_trip(tmp_path):
    f = Formula.from_ints(3, [[1, 2, 3]]).with_clauses([Clause.from_ints([-1, 2], Origin.STREAMLINING)])
    path = tmp_path / "s.cnf"
    write_dimacs(f, path, comments=["note"])
    g = read_dimacs(path)
    assert g == f
    assert [c.origin for c in g.clauses] == [Origin.ORIGINAL, Origin.STREAMLINING]
    assert g.original() == Formula.from_ints(3, [[1, 2, 3]])


def test_streamlining_clause_length_limit():
    with pytest.raises(ValueError):
        Clause.from_ints([1, 2, 3], Origin.STREAMLINING)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(3, 40), alpha=st.floats(0.05, 5.0), seed=st.integers(0, 2**32))
def test_round_trip_generated(n, alpha, seed):
    f = gen_ksat(GenSpec(n, alpha, 3, seed))
    assert parse_dimacs(emit_dimacs(f)) == f


clause_strategy = st.lists(st.integers(1, 6), min_size=1, max_size=4, unique=True).flatmap(
    lambda vs: st.tuples(*[st.sampled_from([v, -v]) for v in vs]))


@settings(max_examples=100, deadline=None)
@given(clauses=st.lists(clause_strategy, max_size=12))
def test_round_trip_arbitrary(clauses):
    f = Formula.from_ints(6, clauses)
    again = parse_dimacs(emit_dimacs(f))
    assert again == f
    assert emit_dimacs(again) == emit_dimacs(f)


def test_evaluate_examples():
    assert evaluate(Formula.from_ints(2, [[1, 2]]), {1: 0, 2: 1}).satisfied
    ev = evaluate(Formula.from_ints(2, [[1], [-1, 2]]), {1: 1, 2: 0})
    assert not ev.satisfied
    assert ev.violated == (2,)
    assert evaluate(Formula(3, ()), {1: 0, 2: 0, 3: 1}).satisfied


def test_evaluate_accepts_vector_and_rejects_partial():
    f = Formula.from_ints(2, [[1, 2]])
    assert evaluate(f, np.array([0, 1])).satisfied
    with pytest.raises(ValueError):
        evaluate(f, {1: 1})


def test_literal_and_clause_validation():
    assert -Literal(3, False) == Literal(3, True)
    assert Literal.from_int(-4).to_int() == -4
    with pytest.raises(ValueError):
        Literal.from_int(0)
    with pytest.raises(ValueError):
        Clause.from_ints([])
    with pytest.raises(ValueError):
        Formula.from_ints(2, [[3]])


def test_csr_layout():
    f = Formula.from_ints(3, [[1, -2], [3], [-1, 2, -3]])
    starts, vars0, negs = f.csr
    assert starts.tolist() == [0, 2, 3, 6]
    assert vars0.tolist() == [0, 1, 2, 0, 1, 2]
    assert negs.tolist() == [0, 1, 0, 1, 0, 1]
