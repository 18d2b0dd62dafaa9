"""Survey inspired decimation and streamlining.

Both algorithms share one loop.  Each round runs survey propagation on the
current graph (warm-started from the previous round's surveys), stops once
the summed magnetization falls to ``epsilon_frac * live variables``, and
otherwise either adds streamlining disjunctions (rounds ``t < T``) or fixes
the top-``R`` variables and unit-propagates.  What is left goes to WalkSAT.

An ``UNSAT_CLAIM`` is heuristic.  It is only issued when message passing or
marginalization finds a contradiction on the untouched input formula, and it
is not a proof of unsatisfiability.
"""

from __future__ import annotations

import enum
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .branching import PAIRINGS, StreamlineCounters, decimate_step, n_branch, streamline_step
from .cnf import Formula, evaluate
from .graph import Contradiction, FactorGraph, unit_propagate
from .rng import derive_seed
from .sp import SpConfig, SpStatus, init_messages, marginalize, run_sp
from .validation import check_formula
from .walksat import WalkSatParams, walksat


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT_CLAIM = "UNSAT_CLAIM"
    FAILURE = "FAILURE"


class FailureKind(enum.Enum):
    NON_CONVERGENCE = "NonConvergence"
    LOCAL_SEARCH_TIMEOUT = "LocalSearchTimeout"
    CONTRADICTION = "Contradiction"


@dataclass(frozen=True)
class SolverConfig:
    r_frac: float = 0.01
    T: int = 0
    counter_threshold: int = 2
    epsilon_frac: float = 0.01
    sp: SpConfig = field(default_factory=SpConfig)
    ws: WalkSatParams = field(default_factory=WalkSatParams)
    pairing: str = "outer"
    r_base: str = "original"
    seed: int = 0
    time_budget: float | None = None

    def __post_init__(self):
        if self.T < 0:
            raise ValueError("T must be >= 0")
        if not 0.0 < self.r_frac <= 1.0:
            raise ValueError("r_frac must lie in (0, 1]")
        if not self.epsilon_frac > 0:
            raise ValueError("epsilon_frac must be positive")
        if self.counter_threshold < 1:
            raise ValueError("counter_threshold must be >= 1")
        if self.pairing not in PAIRINGS:
            raise ValueError(f"pairing must be one of {PAIRINGS}")
        if self.r_base not in ("original", "live"):
            raise ValueError("r_base must be 'original' or 'live'")


@dataclass
class SolveStats:
    rounds: int = 0
    streamline_rounds: int = 0
    streamline_clauses: int = 0
    fixed: int = 0
    sweeps: int = 0
    flips: int = 0
    wall_time: float = 0.0
    live_trace: list = field(default_factory=list)


@dataclass
class SolveOutcome:
    status: Status
    assignment: dict | None = None
    kind: FailureKind | None = None
    stats: SolveStats = field(default_factory=SolveStats)
    added: list = field(default_factory=list)

    @property
    def sat(self):
        return self.status is Status.SAT

    @property
    def label(self):
        """``SAT``, ``UNSAT_CLAIM`` or the failure kind name."""
        return self.kind.value if self.status is Status.FAILURE else self.status.value

    def trace(self):
        """Comparable summary used for determinism checks."""
        s = self.stats
        return (self.label, s.rounds, s.streamline_clauses, s.fixed, s.sweeps, s.flips,
                tuple(s.live_trace),
                None if self.assignment is None else tuple(sorted(self.assignment.items())))


def _fail(kind, stats, added):
    return SolveOutcome(Status.FAILURE, kind=kind, stats=stats, added=added)


def _survey_inspired(formula: Formula, cfg: SolverConfig, T: int, observer=None) -> SolveOutcome:
    start = time.perf_counter()
    stats = SolveStats()
    graph = FactorGraph(formula)
    msgs = init_messages(graph, derive_seed(cfg.seed, "init"))
    counters = StreamlineCounters(cfg.counter_threshold)
    added = []
    branched = False
    t = 0

    def finish(outcome):
        stats.wall_time = time.perf_counter() - start
        return outcome

    while True:
        if cfg.time_budget is not None and time.perf_counter() - start > cfg.time_budget:
            return finish(_fail(FailureKind.NON_CONVERGENCE, stats, added))
        result = run_sp(graph, cfg.sp, seed=derive_seed(cfg.seed, "sp", t), messages=msgs)
        stats.sweeps += result.sweeps
        if result.status is SpStatus.CONTRADICTION:
            return finish(_contradiction(branched, stats, added))
        if result.status is SpStatus.UNCONVERGED:
            return finish(_fail(FailureKind.NON_CONVERGENCE, stats, added))
        marg = marginalize(graph, msgs, cfg.sp.swap_polarity)
        if marg.has_contradiction:
            return finish(_contradiction(branched, stats, added))
        n_live = graph.n_live_vars()
        stats.live_trace.append(n_live)
        if observer is not None:
            observer(t, graph, marg)
        if marg.total_bias <= cfg.epsilon_frac * n_live:
            break
        R = n_branch(formula.n_vars if cfg.r_base == "original" else n_live, cfg.r_frac)
        if t < T:
            clauses = streamline_step(graph, marg, R, counters, cfg.pairing)
            if clauses:
                added.extend(clauses)
                stats.streamline_clauses += len(clauses)
                stats.streamline_rounds += 1
                stats.rounds += 1
                branched = True
                t += 1
                continue
        fixes = decimate_step(graph, marg, R)
        if not fixes:
            break
        before = int((graph.assignment != -1).sum())
        try:
            unit_propagate(graph, fixes)
        except Contradiction:
            return finish(_fail(FailureKind.CONTRADICTION, stats, added))
        stats.fixed += int((graph.assignment != -1).sum()) - before
        stats.rounds += 1
        branched = True
        t += 1

    residual = graph.residual()
    ws = replace(cfg.ws, seed=derive_seed(cfg.seed, "walksat", cfg.ws.seed))
    found = walksat(residual, ws)
    stats.flips = found.flips
    if not found:
        return finish(_fail(FailureKind.LOCAL_SEARCH_TIMEOUT, stats, added))
    values = dict(found.assignment)
    values.update(graph.assigned())
    if not evaluate(formula, values).satisfied:
        # propagation is sound, so this signals a bug rather than a search failure
        return finish(_fail(FailureKind.CONTRADICTION, stats, added))
    return finish(SolveOutcome(Status.SAT, values, stats=stats, added=added))


def _contradiction(branched, stats, added):
    if branched:
        return _fail(FailureKind.CONTRADICTION, stats, added)
    return SolveOutcome(Status.UNSAT_CLAIM, stats=stats, added=added)


def solve_sid(formula: Formula, cfg: SolverConfig = SolverConfig(), observer=None) -> SolveOutcome:
    """Survey inspired decimation (streamlining never used, ``cfg.T`` ignored)."""
    return _survey_inspired(formula, cfg, 0, observer)


def solve_sis(formula: Formula, cfg: SolverConfig = SolverConfig(), observer=None) -> SolveOutcome:
    """Survey inspired streamlining for the first ``cfg.T`` rounds, then decimation."""
    return _survey_inspired(formula, cfg, cfg.T, observer)


def solve(formula, alg="sis", cfg: SolverConfig = SolverConfig(), observer=None):
    if alg.lower() == "sid":
        return solve_sid(formula, cfg, observer)
    if alg.lower() == "sis":
        return solve_sis(formula, cfg, observer)
    raise ValueError(f"unknown algorithm {alg!r}")


@dataclass
class Preprocessed:
    formula: Formula
    rounds_run: int
    converged: bool

    def __iter__(self):
        return iter((self.formula, self.converged))


def streamline_preprocess(formula: Formula, cfg: SolverConfig = SolverConfig(), rounds=1) -> Preprocessed:
    """Run ``rounds`` of message passing plus streamlining and return the augmented formula.

    Nothing is fixed.  If message passing fails to converge the clauses
    gathered so far are returned with ``converged=False`` and a warning.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    graph = FactorGraph(formula)
    msgs = init_messages(graph, derive_seed(cfg.seed, "init"))
    counters = StreamlineCounters(cfg.counter_threshold)
    added = []
    R = n_branch(formula.n_vars, cfg.r_frac)
    done = 0
    converged = True
    for r in range(rounds):
        result = run_sp(graph, cfg.sp, seed=derive_seed(cfg.seed, "sp", r), messages=msgs)
        if result.status is not SpStatus.CONVERGED:
            converged = False
            warnings.warn(f"message passing failed ({result.status.value}) in round {r}; "
                          "returning the clauses added so far", RuntimeWarning, stacklevel=2)
            break
        marg = marginalize(graph, msgs, cfg.sp.swap_polarity)
        clauses = streamline_step(graph, marg, R, counters, cfg.pairing)
        done += 1
        if not clauses:
            break
        added.extend(clauses)
    return Preprocessed(formula.with_clauses(added), done, converged)


class SurveyInspiredDecimation(BaseEstimator):
    """Decimation solver with an estimator interface.

    ``fit(X)`` solves ``X`` and stores ``outcome_``, ``status_`` and
    ``assignment_`` (a 0/1 vector indexed from variable 1, or ``None``).
    ``predict(X)`` returns that vector.
    """

    _alg = "sid"

    def __init__(self, r_frac=0.01, epsilon_frac=0.01, msg_tol=1e-3, max_sweeps=1000,
                 restarts=3, damping=0.0, noise=0.5, max_flips=None, tries=10,
                 r_base="original", time_budget=None, random_state=0):
        self.r_frac = r_frac
        self.epsilon_frac = epsilon_frac
        self.msg_tol = msg_tol
        self.max_sweeps = max_sweeps
        self.restarts = restarts
        self.damping = damping
        self.noise = noise
        self.max_flips = max_flips
        self.tries = tries
        self.r_base = r_base
        self.time_budget = time_budget
        self.random_state = random_state

    def _config(self, **extra):
        return SolverConfig(
            r_frac=self.r_frac, epsilon_frac=self.epsilon_frac,
            sp=SpConfig(self.msg_tol, self.max_sweeps, self.restarts, self.damping),
            ws=WalkSatParams(self.noise, self.max_flips, self.tries),
            r_base=self.r_base, seed=self.random_state, time_budget=self.time_budget,
            **extra)

    def fit(self, X, y=None):
        formula = check_formula(X)
        self.outcome_ = solve(formula, self._alg, self._config())
        self.status_ = self.outcome_.status
        self.assignment_ = None
        if self.outcome_.sat:
            a = self.outcome_.assignment
            self.assignment_ = np.array([a[v] for v in range(1, formula.n_vars + 1)], dtype=np.int8)
        return self

    def predict(self, X):
        return self.fit(X).assignment_


class SurveyInspiredStreamlining(SurveyInspiredDecimation):
    _alg = "sis"

    def __init__(self, T=10, counter_threshold=2, pairing="outer", r_frac=0.01,
                 epsilon_frac=0.01, msg_tol=1e-3, max_sweeps=1000, restarts=3, damping=0.0,
                 noise=0.5, max_flips=None, tries=10, r_base="original", time_budget=None,
                 random_state=0):
        super().__init__(r_frac=r_frac, epsilon_frac=epsilon_frac, msg_tol=msg_tol,
                         max_sweeps=max_sweeps, restarts=restarts, damping=damping,
                         noise=noise, max_flips=max_flips, tries=tries, r_base=r_base,
                         time_budget=time_budget, random_state=random_state)
        self.T = T
        self.counter_threshold = counter_threshold
        self.pairing = pairing

    def _config(self, **extra):
        return super()._config(T=self.T, counter_threshold=self.counter_threshold,
                               pairing=self.pairing, **extra)


class StreamlinePreprocessor(TransformerMixin, BaseEstimator):
    """``transform(X)`` returns ``X`` plus streamlining clauses for any downstream solver."""

    def __init__(self, rounds=10, r_frac=0.01, counter_threshold=2, pairing="outer",
                 msg_tol=1e-3, max_sweeps=1000, restarts=3, damping=0.0, random_state=0):
        self.rounds = rounds
        self.r_frac = r_frac
        self.counter_threshold = counter_threshold
        self.pairing = pairing
        self.msg_tol = msg_tol
        self.max_sweeps = max_sweeps
        self.restarts = restarts
        self.damping = damping
        self.random_state = random_state

    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        cfg = SolverConfig(r_frac=self.r_frac, counter_threshold=self.counter_threshold,
                           pairing=self.pairing,
                           sp=SpConfig(self.msg_tol, self.max_sweeps, self.restarts, self.damping),
                           seed=self.random_state)
        result = streamline_preprocess(check_formula(X), cfg, self.rounds)
        self.converged_ = result.converged
        self.rounds_run_ = result.rounds_run
        return result.formula
