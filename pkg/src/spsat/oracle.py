"""Exact ground truth for small instances."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import _kernels

DEFAULT_CAP_N = 26
XOR_COMMENT = re.compile(r"^c\s+x\s+(\d+)\s+(\d+)\s+([01])\s*$")


class OracleRefused(ValueError):
    pass


@dataclass(frozen=True)
class XorSystem:
    """Constraints ``x_i XOR x_j = parity`` over variables ``1..n_vars``."""

    n_vars: int
    constraints: tuple = ()

    def __post_init__(self):
        cons = tuple((int(i), int(j), int(p)) for i, j, p in self.constraints)
        object.__setattr__(self, "constraints", cons)
        for i, j, p in cons:
            if i == j:
                raise ValueError(f"XOR constraint over a single variable x{i}")
            if not (1 <= i <= self.n_vars and 1 <= j <= self.n_vars):
                raise ValueError(f"XOR constraint ({i}, {j}) outside 1..{self.n_vars}")
            if p not in (0, 1):
                raise ValueError(f"parity must be 0 or 1, got {p}")

    def comments(self):
        """DIMACS comment bodies (without the leading ``c``)."""
        return [f"x {i} {j} {p}" for i, j, p in self.constraints]

    @classmethod
    def from_dimacs_comments(cls, text, n_vars):
        if isinstance(text, (bytes, bytearray)):
            text = text.decode()
        cons = []
        for line in text.splitlines():
            match = XOR_COMMENT.match(line.strip())
            if match:
                cons.append(tuple(int(g) for g in match.groups()))
        return cls(n_vars, tuple(cons))


@dataclass
class EnumerationResult:
    n_vars: int
    count: int
    ones: np.ndarray
    solutions: np.ndarray
    sampled: bool = False

    @property
    def exact_marginals(self):
        """``P(x_i = 1)`` per variable (index 0 is variable 1)."""
        if self.count == 0:
            raise ValueError("marginals are undefined without solutions")
        return self.ones / self.count


def _unpack(codes, n):
    if n == 0:
        return np.zeros((len(codes), 0), dtype=np.uint8)
    bits = (codes[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1
    return bits.astype(np.uint8)


def enumerate_solutions(formula, cap_n=DEFAULT_CAP_N, max_solutions=4096, seed=0):
    """Count every satisfying assignment by checking all ``2**n`` of them.

    At most ``max_solutions`` solutions are kept, as a uniform reservoir
    sample when there are more; ``sampled`` tells which case applies.
    Solution rows are 0/1 arrays indexed from variable 1.
    """
    n = formula.n_vars
    if n > cap_n:
        raise OracleRefused(f"n_vars={n} exceeds the enumeration cap {cap_n}")
    starts, vars0, negs = formula.csr
    state = np.array([seed], dtype=np.uint64)
    count, ones, sample, kept = _kernels.enumerate_all(
        n, starts, vars0, negs, int(max_solutions), state)
    return EnumerationResult(n, int(count), ones.astype(np.int64),
                             _unpack(sample[:kept], n), sampled=count > max_solutions)


def xor2_satisfiable(system: XorSystem) -> bool:
    """Union-find with parity offsets; unsatisfiable iff a cycle has odd parity."""
    parent = list(range(system.n_vars + 1))
    offset = [0] * (system.n_vars + 1)  # parity of node relative to its parent

    def find(x):
        path = []
        while parent[x] != x:
            path.append(x)
            x = parent[x]
        root, acc = x, 0
        for node in reversed(path):
            acc ^= offset[node]
            offset[node] = acc
            parent[node] = root
        return root

    for i, j, p in system.constraints:
        ri, rj = find(i), find(j)
        if ri == rj:
            if offset[i] ^ offset[j] != p:
                return False
        else:
            parent[ri] = rj
            offset[ri] = offset[i] ^ offset[j] ^ p
    return True


def mean_pairwise_hamming(solutions) -> float:
    """Mean normalized Hamming distance over unordered pairs of solutions."""
    sols = np.asarray([list(s.values()) if isinstance(s, dict) else list(s)
                       for s in solutions], dtype=np.int64)
    s = len(sols)
    if s < 2:
        raise ValueError("need at least two solutions")
    n = sols.shape[1]
    if n == 0:
        return 0.0
    ones = sols.sum(axis=0)
    differing = float(np.sum(ones * (s - ones)))
    return differing / (s * (s - 1) / 2) / n


def calibration(marginals, result: EnumerationResult, bar=0.9) -> float:
    """Fraction of confident variables whose exact marginal meets the prediction.

    A variable is confident when its magnetization is at least ``bar``; it
    is calibrated when the exact probability of its preferred value is at
    least the predicted ``mu`` of that value.  No confident variable gives 1.0.
    """
    if result.count == 0:
        raise ValueError("calibration needs a satisfiable formula")
    table = marginals.table
    p_one = result.exact_marginals
    hits = total = 0
    for v in range(table.shape[0]):
        mu0, mu1 = table[v, 0], table[v, 1]
        if np.isnan(mu0) or abs(mu0 - mu1) < bar:
            continue
        total += 1
        if mu1 > mu0:
            hits += p_one[v] >= mu1
        else:
            hits += (1.0 - p_one[v]) >= mu0
    return 1.0 if total == 0 else hits / total
