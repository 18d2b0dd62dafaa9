"""Survey propagation on a :class:`~spsat.graph.FactorGraph`."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from . import _kernels
from .graph import FactorGraph
from .rng import derive_seed
from .validation import check_graph


@dataclass(frozen=True)
class SpConfig:
    """Convergence controls for message passing.

    ``restarts`` counts attempts in total: the first run plus re-initialized
    retries.  ``schedule`` is ``"edge"`` (uniform random edge order each
    sweep) or ``"clause"`` (random clause order, all edges of a clause
    refreshed together).  ``swap_polarity`` flips which occurrence sign pushes
    a variable toward 1 when forming marginals; it exists for diagnostics only.
    """

    msg_tol: float = 1e-3
    max_sweeps: int = 1000
    restarts: int = 3
    damping: float = 0.0
    schedule: str = "clause"
    swap_polarity: bool = False

    def __post_init__(self):
        if not self.msg_tol > 0:
            raise ValueError("msg_tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must lie in [0, 1)")
        if self.schedule not in ("edge", "clause"):
            raise ValueError("schedule must be 'edge' or 'clause'")


@dataclass
class MessageState:
    """Surveys indexed by graph edge id; only live edges are meaningful."""

    eta: np.ndarray
    rng: np.ndarray
    contradiction: bool = False

    def as_dict(self, graph: FactorGraph):
        """``{(clause id, 1-based var): eta}`` over live edges."""
        return {(int(graph.edge_clause[e]), int(graph.edge_var[e]) + 1): float(self.eta[e])
                for e in graph.live_edges()}

    def live_values(self, graph: FactorGraph):
        return self.eta[graph.edge_live]

    def copy(self):
        return MessageState(self.eta.copy(), self.rng.copy(), self.contradiction)

    def sync(self, graph: FactorGraph):
        """Grow to cover edges appended since the last call; new surveys are uniform."""
        old = len(self.eta)
        if graph.n_edges > old:
            grown = np.zeros(graph.n_edges)
            grown[:old] = self.eta
            _kernels.fill_uniform(grown, np.arange(old, graph.n_edges), self.rng)
            self.eta = grown
        return self


def _rng_state(seed):
    return np.array([np.uint64(seed % (1 << 64))], dtype=np.uint64)


def init_messages(graph: FactorGraph, seed=0) -> MessageState:
    eta = np.zeros(graph.n_edges)
    state = _rng_state(seed)
    _kernels.fill_uniform(eta, graph.live_edges(), state)
    return MessageState(eta, state)


def _schedule_order(graph, schedule):
    if schedule == "clause":
        return np.flatnonzero(graph.clause_live & (graph.clause_nlive > 0))
    return graph.live_edges()


def sp_update_sweep(graph: FactorGraph, msgs: MessageState, damping=0.0, schedule="edge"):
    """One asynchronous pass over the live edges in a fresh random order.

    Updates ``msgs`` in place and returns ``(msgs, max_delta)``.  A zero
    normalizer sets that survey to 0 and raises ``msgs.contradiction``.
    """
    msgs.sync(graph)
    sweep = _kernels.sp_sweep_clauses if schedule == "clause" else _kernels.sp_sweep
    delta, contra = sweep(
        _schedule_order(graph, schedule), msgs.eta, graph.edge_clause, graph.edge_var,
        graph.edge_neg, graph.clause_start, graph.var_start, graph.var_edges,
        graph.edge_live, float(damping), msgs.rng)
    msgs.contradiction = msgs.contradiction or bool(contra)
    return msgs, float(delta)


class SpStatus(enum.Enum):
    CONVERGED = "converged"
    UNCONVERGED = "unconverged"
    CONTRADICTION = "contradiction"


@dataclass
class SpResult:
    status: SpStatus
    messages: MessageState
    sweeps: int = 0
    attempts: int = 0

    @property
    def converged(self):
        return self.status is SpStatus.CONVERGED


def run_sp(graph: FactorGraph, cfg: SpConfig = SpConfig(), seed=0, messages=None) -> SpResult:
    """Iterate sweeps to convergence, re-initializing on failure.

    When ``messages`` is given the first attempt starts from them (warm start)
    and they are updated in place; later attempts draw fresh surveys from
    seeds derived from ``seed``.  An attempt fails if it hits the sweep cap
    or raises the contradiction flag.  ``CONTRADICTION`` is returned when no
    attempt succeeds and at least one of them was contradictory.
    """
    msgs = messages.sync(graph) if messages is not None else init_messages(graph, seed)
    order = _schedule_order(graph, cfg.schedule)
    total = 0
    contradicted = False
    for attempt in range(cfg.restarts):
        if attempt > 0:
            fresh = init_messages(graph, derive_seed(seed, "restart", attempt))
            msgs.eta[:] = fresh.eta
            msgs.rng[:] = fresh.rng
        if len(order) == 0:
            return SpResult(SpStatus.CONVERGED, msgs, total, attempt + 1)
        converged, sweeps, contra, _ = _kernels.sp_run(
            order, cfg.schedule == "clause", msgs.eta, graph.edge_clause, graph.edge_var, graph.edge_neg,
            graph.clause_start, graph.var_start, graph.var_edges, graph.edge_live,
            float(cfg.damping), float(cfg.msg_tol), int(cfg.max_sweeps), msgs.rng)
        total += int(sweeps)
        # a contradiction fails this attempt only: transients from a random
        # start can round a survey to exactly 1 and trip the flag spuriously
        contradicted = contradicted or bool(contra)
        if converged and not contra:
            msgs.contradiction = False
            return SpResult(SpStatus.CONVERGED, msgs, total, attempt + 1)
    if contradicted:
        msgs.contradiction = True
        return SpResult(SpStatus.CONTRADICTION, msgs, total, cfg.restarts)
    return SpResult(SpStatus.UNCONVERGED, msgs, total, cfg.restarts)


@dataclass
class MarginalTable:
    """Per-variable ``(mu0, mu1, mu_star)``; rows of dead variables are NaN.

    Row ``v`` is variable ``v + 1``.
    """

    table: np.ndarray
    contradictions: np.ndarray = field(default=None)

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=float)
        if self.contradictions is None:
            self.contradictions = np.zeros(len(self.table), dtype=bool)

    @classmethod
    def from_rows(cls, rows, n_vars=None):
        """Build from ``{var: (mu0, mu1, mu_star)}`` with 1-based keys."""
        n_vars = n_vars or max(rows)
        table = np.full((n_vars, 3), np.nan)
        for var, row in rows.items():
            table[var - 1] = row
        return cls(table)

    @property
    def live(self):
        return ~np.isnan(self.table[:, 0])

    @property
    def magnetization(self):
        return np.abs(self.table[:, 0] - self.table[:, 1])

    @property
    def preferred(self):
        """Value with the larger marginal; ties go to 0."""
        return (self.table[:, 1] > self.table[:, 0]).astype(np.int8)

    @property
    def total_bias(self):
        return float(np.nansum(self.magnetization))

    @property
    def has_contradiction(self):
        return bool(self.contradictions.any())

    def row(self, var):
        return tuple(self.table[var - 1])

    def histogram(self, bins=20):
        """Counts of live magnetizations in ``bins`` uniform bins on [0, 1]."""
        mags = self.magnetization[self.live]
        counts, _ = np.histogram(mags, bins=bins, range=(0.0, 1.0))
        return counts


def marginalize(graph: FactorGraph, msgs: MessageState, swap_polarity=False) -> MarginalTable:
    msgs.sync(graph)
    table, bad = _kernels.marginals(msgs.eta, graph.edge_neg, graph.var_start,
                                    graph.var_edges, graph.edge_live, graph.var_live,
                                    bool(swap_polarity))
    ok = graph.var_live & ~bad
    sums = table[ok].sum(axis=1)
    if sums.size and np.max(np.abs(sums - 1.0)) > 1e-9:
        raise AssertionError("marginal rows are not normalized")
    return MarginalTable(table, bad)


class SurveyPropagation(BaseEstimator):
    """Survey propagation as an estimator.

    ``fit`` accepts a formula (or anything :func:`spsat.validation.check_formula`
    takes) or a factor graph and stores ``messages_``, ``marginals_``,
    ``status_`` and ``n_sweeps_``.  ``transform`` returns the marginal table
    as an ``(n_vars, 3)`` array.
    """

    def __init__(self, msg_tol=1e-3, max_sweeps=1000, restarts=3, damping=0.0,
                 schedule="clause", swap_polarity=False, random_state=0):
        self.msg_tol = msg_tol
        self.max_sweeps = max_sweeps
        self.restarts = restarts
        self.damping = damping
        self.schedule = schedule
        self.swap_polarity = swap_polarity
        self.random_state = random_state

    def _config(self):
        return SpConfig(self.msg_tol, self.max_sweeps, self.restarts, self.damping,
                        self.schedule, self.swap_polarity)

    def fit(self, X, y=None):
        graph = check_graph(X)
        result = run_sp(graph, self._config(), seed=self.random_state)
        self.graph_ = graph
        self.status_ = result.status
        self.messages_ = result.messages
        self.n_sweeps_ = result.sweeps
        self.marginals_ = marginalize(graph, result.messages, self.swap_polarity)
        return self

    def transform(self, X):
        """Marginal table of ``X`` computed with this estimator's settings."""
        graph = check_graph(X)
        result = run_sp(graph, self._config(), seed=self.random_state)
        return marginalize(graph, result.messages, self.swap_polarity).table

    def fit_transform(self, X, y=None):
        return self.fit(X).marginals_.table
