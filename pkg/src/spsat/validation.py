"""Input coercion shared by the estimators and the CLI."""

import os

from .cnf import Formula, parse_dimacs, read_dimacs


def check_formula(X) -> Formula:
    """Coerce ``X`` to a :class:`Formula`.

    Accepted inputs: a ``Formula``; DIMACS text as ``str``/``bytes``; a path
    to a DIMACS file; a list of integer clauses (``n_vars`` inferred); or an
    ``(n_vars, clauses)`` pair.
    """
    if isinstance(X, Formula):
        return X
    if isinstance(X, (bytes, bytearray)):
        return parse_dimacs(X)
    if isinstance(X, os.PathLike):
        return read_dimacs(X)
    if isinstance(X, str):
        if "\n" not in X and os.path.exists(X):
            return read_dimacs(X)
        return parse_dimacs(X)
    if isinstance(X, tuple) and len(X) == 2 and isinstance(X[0], int):
        return Formula.from_ints(X[0], X[1])
    try:
        clauses = [[int(x) for x in c] for c in X]
    except TypeError:
        raise TypeError(f"cannot interpret {type(X).__name__} as a CNF formula") from None
    n = max((abs(x) for c in clauses for x in c), default=0)
    return Formula.from_ints(n, clauses)


def check_graph(X):
    from .graph import FactorGraph

    if isinstance(X, FactorGraph):
        return X
    return FactorGraph(check_formula(X))
