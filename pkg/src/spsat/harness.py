"""Success-rate sweeps, T tuning, thresholds and calibration traces."""

from __future__ import annotations

import csv
import io
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .gen import GenSpec, gen_ksat
from .oracle import DEFAULT_CAP_N, OracleRefused, calibration, enumerate_solutions, mean_pairwise_hamming
from .rng import derive_seed
from .solver import FailureKind, SolverConfig, Status, solve
from .sp import SpConfig
from .walksat import WalkSatParams

ALGS = ("SID", "SIS")
SUCCESS_FLOOR = 0.05
HIST_BINS = 20

SWEEP_COLUMNS = [
    "alg", "k", "n", "alpha", "T_used", "successes", "trials", "rate", "ci_low", "ci_high",
    "fail_nonconvergence", "fail_local_search_timeout", "fail_contradiction", "unsat_claims",
    "mean_wall_time", "time_budget",
]
TRACE_COLUMNS = (["instance", "round", "phase", "live_vars", "n_clauses", "solutions", "calibration",
                  "mean_hamming", "top_bin_mass", "truncated"]
                 + [f"hist_{i:02d}" for i in range(HIST_BINS)])


def wilson_interval(successes, trials, z=1.96):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass
class SweepSpec:
    k: int = 3
    n: int = 5000
    alphas: tuple = (4.2,)
    instances_per_alpha: int = 100
    algs: tuple = ALGS
    T_grid: tuple = tuple(range(10, 101, 10))
    train_instances: int = 20
    base_seed: int = 0
    parallelism: int = 1
    time_budget: float | None = 60.0
    T: int | None = None
    r_frac: float = 0.01
    epsilon_frac: float = 0.01
    counter_threshold: int = 2
    pairing: str = "outer"
    msg_tol: float = 1e-3
    max_sweeps: int = 1000
    restarts: int = 3
    schedule: str = "clause"
    noise: float = 0.5
    max_flips: int | None = None
    tries: int = 10

    def __post_init__(self):
        self.alphas = tuple(float(a) for a in self.alphas)
        self.algs = tuple(a.upper() for a in self.algs)
        self.T_grid = tuple(int(t) for t in self.T_grid)
        if self.instances_per_alpha < 1:
            raise ValueError("instances_per_alpha must be >= 1")
        if not self.alphas:
            raise ValueError("alphas must be nonempty")
        if any(a not in ALGS for a in self.algs):
            raise ValueError(f"algs must be drawn from {ALGS}")

    def solver_config(self, T=0, seed=0):
        return SolverConfig(
            r_frac=self.r_frac, T=T, counter_threshold=self.counter_threshold,
            epsilon_frac=self.epsilon_frac,
            sp=SpConfig(self.msg_tol, self.max_sweeps, self.restarts, schedule=self.schedule),
            ws=WalkSatParams(self.noise, self.max_flips, self.tries),
            pairing=self.pairing, seed=seed, time_budget=self.time_budget)

    def instance_seed(self, alpha, index, split="test"):
        # no algorithm in the hash: SID and SIS see identical instances
        return derive_seed(self.base_seed, split, self.k, self.n, float(alpha), index)

    def solver_seed(self, alg, alpha, index, split="test"):
        return derive_seed(self.base_seed, split, alg, float(alpha), index)

    @classmethod
    def from_config(cls, cfg: dict):
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in cfg.items():
            if key not in known:
                raise ValueError(f"unknown sweep option {key!r}")
            kwargs[key] = _coerce(key, raw, known[key].default)
        return cls(**kwargs)


@dataclass
class SweepRow:
    alg: str
    k: int
    n: int
    alpha: float
    T_used: int
    successes: int
    trials: int
    rate: float
    ci_low: float
    ci_high: float
    fail_nonconvergence: int = 0
    fail_local_search_timeout: int = 0
    fail_contradiction: int = 0
    unsat_claims: int = 0
    mean_wall_time: float = 0.0
    time_budget: float | None = None
    outcomes: list = field(default_factory=list, repr=False)

    def as_csv_dict(self):
        d = asdict(self)
        d.pop("outcomes")
        d["time_budget"] = "" if self.time_budget is None else self.time_budget
        return d


def _coerce(key, raw, default):
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    if key in ("alphas", "algs", "T_grid"):
        parts = [p.strip() for p in raw.replace(";", ",").split(",") if p.strip()]
        if key == "alphas":
            return tuple(float(p) for p in parts)
        if key == "T_grid":
            return tuple(int(p) for p in parts)
        return tuple(parts)
    if raw.lower() in ("none", ""):
        return None
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(default, int) or key in ("T", "max_flips"):
        return int(raw)
    if isinstance(default, float) or key == "time_budget":
        return float(raw)
    return raw


def load_config(path_or_text) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    text = path_or_text
    if "\n" not in path_or_text and "=" not in path_or_text:
        with open(path_or_text) as fh:
            text = fh.read()
    cfg = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        cfg[key.strip()] = value.strip()
    return cfg


def _run_job(job):
    spec, alg, alpha, index, T, split = job
    formula = gen_ksat(GenSpec(spec.n, alpha, spec.k, spec.instance_seed(alpha, index, split)))
    cfg = spec.solver_config(T=T if alg == "SIS" else 0,
                             seed=spec.solver_seed(alg, alpha, index, split))
    start = time.perf_counter()
    outcome = solve(formula, alg, cfg)
    return outcome.label, time.perf_counter() - start


def _map_jobs(jobs, parallelism):
    if parallelism <= 1 or len(jobs) <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_run_job, jobs, chunksize=1))


def tune_T(spec: SweepSpec, log=None):
    """Best streamlining depth per ``(k, alpha)`` on separate training instances.

    Ties go to the smaller T.  Training instances use their own seed stream.
    """
    if "SIS" not in spec.algs:
        raise ValueError("tuning needs SIS in algs")
    best = {}
    for alpha in spec.alphas:
        scores = {}
        for T in sorted(spec.T_grid):
            jobs = [(spec, "SIS", alpha, i, T, "train") for i in range(spec.train_instances)]
            results = _map_jobs(jobs, spec.parallelism)
            scores[T] = sum(label == "SAT" for label, _ in results)
            if log:
                log(f"tune k={spec.k} alpha={alpha} T={T}: {scores[T]}/{spec.train_instances}")
        top = max(scores.values())
        best[(spec.k, alpha)] = min(T for T, s in scores.items() if s == top)
    return best


def run_sweep(spec: SweepSpec, tuned=None, log=None):
    """Solve ``instances_per_alpha`` paired instances per alpha with each algorithm."""
    if "SIS" in spec.algs and spec.T is None and tuned is None:
        tuned = tune_T(spec, log)
    rows = []
    for alpha in spec.alphas:
        for alg in spec.algs:
            T = 0
            if alg == "SIS":
                T = spec.T if spec.T is not None else tuned[(spec.k, alpha)]
            jobs = [(spec, alg, alpha, i, T, "test") for i in range(spec.instances_per_alpha)]
            results = _map_jobs(jobs, spec.parallelism)
            rows.append(make_row(spec, alg, alpha, T, results))
            if log:
                r = rows[-1]
                log(f"{alg} alpha={alpha} T={T}: {r.successes}/{r.trials}")
    return rows


def make_row(spec, alg, alpha, T, results):
    labels = [label for label, _ in results]
    tally = Counter(labels)
    trials = len(labels)
    successes = tally[Status.SAT.value]
    lo, hi = wilson_interval(successes, trials)
    return SweepRow(
        alg=alg, k=spec.k, n=spec.n, alpha=alpha, T_used=T,
        successes=successes, trials=trials, rate=successes / trials, ci_low=lo, ci_high=hi,
        fail_nonconvergence=tally[FailureKind.NON_CONVERGENCE.value],
        fail_local_search_timeout=tally[FailureKind.LOCAL_SEARCH_TIMEOUT.value],
        fail_contradiction=tally[FailureKind.CONTRADICTION.value],
        unsat_claims=tally[Status.UNSAT_CLAIM.value],
        mean_wall_time=float(np.mean([w for _, w in results])),
        time_budget=spec.time_budget, outcomes=labels)


def algorithmic_threshold(rows, floor=SUCCESS_FLOOR):
    """Largest alpha with success rate above ``floor``, per algorithm.

    ``None`` marks an algorithm that clears the floor nowhere on the grid.
    """
    out = {}
    for row in rows:
        out.setdefault(row.alg, None)
        if row.rate > floor and (out[row.alg] is None or row.alpha > out[row.alg]):
            out[row.alg] = row.alpha
    return out


def write_rows(rows, fh=None):
    own = fh is None
    fh = fh or io.StringIO()
    writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_csv_dict())
    return fh.getvalue() if own else None


def read_rows(fh):
    rows = []
    for rec in csv.DictReader(fh):
        rows.append(SweepRow(
            alg=rec["alg"], k=int(rec["k"]), n=int(rec["n"]), alpha=float(rec["alpha"]),
            T_used=int(rec["T_used"]), successes=int(rec["successes"]), trials=int(rec["trials"]),
            rate=float(rec["rate"]), ci_low=float(rec["ci_low"]), ci_high=float(rec["ci_high"]),
            fail_nonconvergence=int(rec["fail_nonconvergence"]),
            fail_local_search_timeout=int(rec["fail_local_search_timeout"]),
            fail_contradiction=int(rec["fail_contradiction"]),
            unsat_claims=int(rec["unsat_claims"]), mean_wall_time=float(rec["mean_wall_time"]),
            time_budget=float(rec["time_budget"]) if rec["time_budget"] else None))
    return rows


@dataclass
class TraceRow:
    round: int
    live_vars: int
    n_clauses: int
    solutions: int
    calibration: float
    mean_hamming: float
    histogram: np.ndarray
    truncated: bool = False
    phase: str = "streamline"

    @property
    def top_bin_mass(self):
        total = self.histogram.sum()
        return float(self.histogram[-1] / total) if total else 0.0


class _StopTrace(Exception):
    pass


def calibration_trace(formula, cfg: SolverConfig, sample=100, cap_n=DEFAULT_CAP_N, bar=0.9):
    """Run SIS and score every round against exact enumeration.

    ``phase`` says what the round's marginals were used for: ``streamline``,
    ``decimate``, or ``handoff`` for the last run, whose marginals were
    paramagnetic enough to pass the residual formula to WalkSAT.

    Each round's marginals are compared with the exact marginals of the
    formula survey propagation just ran on (original clauses, streamlining
    clauses so far, and fixed variables).  Hamming distances use a uniform
    sample of at most ``sample`` solutions.  If a round's formula has no
    solutions the trace stops there and that row is flagged ``truncated``.
    """
    if formula.n_vars > cap_n:
        raise OracleRefused(f"n_vars={formula.n_vars} exceeds the oracle cap {cap_n}")
    rows = []

    def observe(t, graph, marg):
        current = graph.current_formula()
        res = enumerate_solutions(current, cap_n, max_solutions=sample,
                                  seed=derive_seed(cfg.seed, "trace", t))
        hist = marg.histogram(HIST_BINS)
        n_live = graph.n_live_vars()
        if marg.total_bias <= cfg.epsilon_frac * n_live:
            phase = "handoff"
        else:
            phase = "streamline" if t < cfg.T else "decimate"
        if res.count == 0:
            rows.append(TraceRow(t, n_live, graph.n_clauses, 0, float("nan"), float("nan"),
                                 hist, truncated=True, phase=phase))
            raise _StopTrace
        ham = mean_pairwise_hamming(res.solutions) if len(res.solutions) >= 2 else 0.0
        rows.append(TraceRow(t, n_live, graph.n_clauses, res.count,
                             calibration(marg, res, bar), ham, hist, phase=phase))

    try:
        outcome = solve(formula, "sis", cfg, observer=observe)
    except _StopTrace:
        outcome = None
    return rows, outcome


def write_trace(traces, fh=None):
    """``traces`` maps an instance label to its list of :class:`TraceRow`."""
    own = fh is None
    fh = fh or io.StringIO()
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for label, rows in traces.items():
        for r in rows:
            writer.writerow([label, r.round, r.phase, r.live_vars, r.n_clauses, r.solutions,
                             f"{r.calibration:.6g}", f"{r.mean_hamming:.6g}",
                             f"{r.top_bin_mass:.6g}", int(r.truncated)]
                            + [int(c) for c in r.histogram])
    return fh.getvalue() if own else None


@dataclass
class CalibrateSpec:
    n: int = 24
    alpha: float = 4.0
    k: int = 3
    instances: int = 20
    base_seed: int = 0
    T: int = 10
    r_frac: float = 0.01
    sample: int = 100
    satisfiable_only: bool = True
    schedule: str = "clause"

    @classmethod
    def from_config(cls, cfg: dict):
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in cfg.items():
            if key not in known:
                raise ValueError(f"unknown calibrate option {key!r}")
            kwargs[key] = _coerce(key, raw, known[key].default)
        return cls(**kwargs)


def calibration_runs(spec: CalibrateSpec):
    """Traces for ``spec.instances`` generated instances (satisfiable ones only by default)."""
    traces = {}
    index = 0
    attempts = 0
    while len(traces) < spec.instances:
        seed = derive_seed(spec.base_seed, "calibrate", spec.k, spec.n, spec.alpha, index)
        index += 1
        attempts += 1
        if attempts > 50 * spec.instances:
            raise RuntimeError("could not find enough satisfiable instances")
        formula = gen_ksat(GenSpec(spec.n, spec.alpha, spec.k, seed))
        if spec.satisfiable_only and enumerate_solutions(formula, max_solutions=0).count == 0:
            continue
        cfg = SolverConfig(r_frac=spec.r_frac, T=spec.T, seed=seed,
                           sp=replace(SpConfig(), schedule=spec.schedule))
        rows, _ = calibration_trace(formula, cfg, sample=spec.sample)
        traces[f"seed{seed}"] = rows
    return traces
