import itertools
import warnings

import numpy as np
import pytest

from spsat.cnf import Formula, Origin, evaluate
from spsat.gen import GenSpec, gen_ksat
from spsat.oracle import enumerate_solutions
from spsat.solver import (FailureKind, SolverConfig, Status, StreamlinePreprocessor,
                          SurveyInspiredDecimation, SurveyInspiredStreamlining, solve, solve_sid,
                          solve_sis, streamline_preprocess)
from spsat.sp import SpConfig
from spsat.walksat import WalkSAT, WalkSatParams, walksat


def test_walksat_unique_solution():
    res = walksat(Formula.from_ints(2, [[1], [-1, 2]]))
    assert res.found and res.assignment == {1: 1, 2: 1}


def test_walksat_empty_formula():
    res = walksat(Formula(3, ()))
    assert res.found and set(res.assignment) == {1, 2, 3}


def test_walksat_times_out_on_unsat():
    f = Formula.from_ints(3, [list(s) for s in itertools.product(*[(v, -v) for v in (1, 2, 3)])])
    res = walksat(f, WalkSatParams(max_flips=200, tries=2))
    assert not res.found and res.assignment is None
    assert res.flips == 400


def test_walksat_deterministic_and_verified():
    f = gen_ksat(GenSpec(300, 3.5, 3, 8))
    a = walksat(f, WalkSatParams(seed=3))
    b = walksat(f, WalkSatParams(seed=3))
    assert a.found and a.assignment == b.assignment and a.flips == b.flips
    assert evaluate(f, a.assignment).satisfied


def test_walksat_params_validation():
    with pytest.raises(ValueError):
        WalkSatParams(noise=1.5)
    with pytest.raises(ValueError):
        WalkSatParams(tries=0)
    assert WalkSatParams().flips_for(30) == 3000


def test_walksat_estimator():
    est = WalkSAT(random_state=1)
    vec = est.fit([[1, 2], [-1], [2, 3]]).assignment_
    assert vec.tolist()[:2] == [0, 1]
    assert est.get_params()["noise"] == 0.5


TRIVIAL = Formula.from_ints(3, [[1, 2], [2, 3]])
COMPLETE = Formula.from_ints(3, [list(s) for s in itertools.product(*[(v, -v) for v in (1, 2, 3)])])


@pytest.mark.parametrize("alg", ["sid", "sis"])
def test_trivial_instance_sat(alg):
    out = solve(TRIVIAL, alg, SolverConfig(T=3))
    assert out.status is Status.SAT
    assert evaluate(TRIVIAL, out.assignment).satisfied


@pytest.mark.parametrize("alg", ["sid", "sis"])
def test_complete_clause_set_not_sat(alg):
    out = solve(COMPLETE, alg, SolverConfig(T=3, ws=WalkSatParams(max_flips=100, tries=1)))
    assert out.status is not Status.SAT


def test_direct_contradiction_is_unsat_claim():
    out = solve_sid(Formula.from_ints(2, [[1], [-1], [1, 2]]))
    assert out.status is Status.UNSAT_CLAIM
    assert out.label == "UNSAT_CLAIM"


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_T_zero_equals_sid(seed):
    f = gen_ksat(GenSpec(400, 4.0, 3, seed))
    cfg = SolverConfig(T=0, seed=seed)
    assert solve_sis(f, cfg).trace() == solve_sid(f, cfg).trace()


def test_sid_ignores_T():
    f = gen_ksat(GenSpec(300, 3.9, 3, 4))
    assert solve_sid(f, SolverConfig(T=5)).trace() == solve_sid(f, SolverConfig(T=0)).trace()


def test_sis_adds_streamlining_and_stays_verified():
    f = gen_ksat(GenSpec(500, 4.1, 3, 6))
    out = solve_sis(f, SolverConfig(T=5, seed=2))
    assert out.stats.streamline_rounds <= 5
    assert all(c.origin is Origin.STREAMLINING and len(c) == 2 for c in out.added)
    if out.sat:
        assert evaluate(f, out.assignment).satisfied
        assert set(out.assignment) == set(range(1, 501))


def test_solver_is_reproducible():
    f = gen_ksat(GenSpec(500, 4.1, 3, 7))
    cfg = SolverConfig(T=4, seed=9)
    assert solve_sis(f, cfg).trace() == solve_sis(f, cfg).trace()


def test_non_convergence_reported():
    f = gen_ksat(GenSpec(300, 4.2, 3, 1))
    cfg = SolverConfig(sp=SpConfig(max_sweeps=1, restarts=1, msg_tol=1e-12))
    out = solve_sid(f, cfg)
    assert out.status is Status.FAILURE and out.kind is FailureKind.NON_CONVERGENCE


def test_local_search_timeout_reported():
    # low density is paramagnetic from the start; one flip cannot finish the job
    f = gen_ksat(GenSpec(200, 2.0, 3, 5))
    out = solve_sid(f, SolverConfig(ws=WalkSatParams(max_flips=1, tries=1)))
    assert out.stats.rounds == 0
    assert out.status is Status.FAILURE
    assert out.kind is FailureKind.LOCAL_SEARCH_TIMEOUT


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(T=-1)
    with pytest.raises(ValueError):
        SolverConfig(r_frac=0)
    with pytest.raises(ValueError):
        SolverConfig(pairing="middle")


def test_streamline_preprocess_counts_and_subset():
    f = gen_ksat(GenSpec(20, 3.6, 3, 11))
    with pytest.raises(ValueError):
        streamline_preprocess(f, rounds=0)
    out = streamline_preprocess(f, SolverConfig(r_frac=0.1), rounds=1)
    added = out.formula.clauses[f.n_clauses:]
    assert out.formula.clauses[:f.n_clauses] == f.clauses
    assert 1 <= len(added) <= 2
    assert all(c.origin is Origin.STREAMLINING for c in added)
    before = enumerate_solutions(f, max_solutions=1 << 20)
    after = enumerate_solutions(out.formula, max_solutions=1 << 20)
    assert {tuple(r) for r in after.solutions} <= {tuple(r) for r in before.solutions}
    formula, converged = out
    assert converged and formula is out.formula


def test_streamline_preprocess_warns_on_failure():
    f = gen_ksat(GenSpec(300, 4.2, 3, 1))
    cfg = SolverConfig(sp=SpConfig(max_sweeps=1, restarts=1, msg_tol=1e-12))
    with pytest.warns(RuntimeWarning):
        out = streamline_preprocess(f, cfg, rounds=3)
    assert not out.converged and out.formula == f


def test_estimators():
    f = gen_ksat(GenSpec(300, 3.8, 3, 2))
    sid = SurveyInspiredDecimation(random_state=4).fit(f)
    sis = SurveyInspiredStreamlining(T=5, random_state=4)
    assert set(sis.get_params()) >= {"T", "counter_threshold", "pairing", "r_frac"}
    vec = sis.predict(f)
    for est, v in ((sid, sid.assignment_), (sis, vec)):
        if est.status_ is Status.SAT:
            assert evaluate(f, np.asarray(v)).satisfied
    pre = StreamlinePreprocessor(rounds=2, r_frac=0.02)
    g = pre.fit_transform(f)
    assert g.n_clauses > f.n_clauses and pre.rounds_run_ >= 1


def test_time_budget_counts_as_non_convergence():
    f = gen_ksat(GenSpec(2000, 4.2, 3, 1))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        out = solve_sid(f, SolverConfig(time_budget=0.0))
    assert out.kind is FailureKind.NON_CONVERGENCE
