"""Command line entry point (``spsat``).

Exit codes follow the SAT-solver convention: 10 satisfiable, 20 UNSAT
claim, 30 unknown or failure.  Malformed input exits with 2.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import sys

from .cnf import ParseError, emit_dimacs, parse_dimacs, read_dimacs
from .gen import GenSpec, Kind, generate
from .graph import FactorGraph
from .harness import (CalibrateSpec, SweepSpec, algorithmic_threshold, calibration_runs,
                      load_config, run_sweep, write_rows, write_trace)
from .oracle import OracleRefused, XorSystem, enumerate_solutions, xor2_satisfiable
from .rng import derive_seed
from .solver import SolverConfig, Status, solve, streamline_preprocess
from .sp import SpConfig, init_messages, run_sp
from .walksat import WalkSatParams, walksat

EXIT_SAT, EXIT_UNSAT, EXIT_UNKNOWN, EXIT_USAGE = 10, 20, 30, 2

log = logging.getLogger("spsat")


@contextlib.contextmanager
def _out(path):
    if path in (None, "-"):
        yield sys.stdout
        return
    with open(path, "w", newline="") as fh:
        yield fh


def _read(path):
    if path == "-":
        return parse_dimacs(sys.stdin.read())
    return read_dimacs(path)


def _print_model(values, fh=None):
    fh = fh or sys.stdout
    lits = [v if values[v] else -v for v in sorted(values)]
    for i in range(0, len(lits), 20):
        fh.write("v " + " ".join(map(str, lits[i:i + 20])) + "\n")
    fh.write("v 0\n")


def cmd_gen(args):
    spec = GenSpec(args.n, args.alpha, args.k, args.seed, Kind(args.kind))
    made = generate(spec)
    comments = [f"random {spec.kind.value} n={spec.n} alpha={spec.alpha} k={spec.k} seed={spec.seed}"]
    if spec.kind is Kind.XOR2SAT:
        made, system = made
        comments += system.comments()
    formula = made
    with _out(args.output) as fh:
        fh.write(emit_dimacs(formula, comments))
    return 0


def _solver_config(args):
    sp = SpConfig(msg_tol=args.msg_tol, max_sweeps=args.max_sweeps, restarts=args.restarts,
                  damping=args.damping, schedule=args.schedule)
    return SolverConfig(r_frac=args.r_frac, T=args.T, epsilon_frac=args.epsilon_frac,
                        counter_threshold=args.counter_threshold, pairing=args.pairing, sp=sp,
                        ws=WalkSatParams(args.noise, args.max_flips, args.tries),
                        seed=args.seed, time_budget=args.time_budget)


def _dump_messages(formula, cfg, path):
    graph = FactorGraph(formula)
    msgs = init_messages(graph, derive_seed(cfg.seed, "init"))
    result = run_sp(graph, cfg.sp, seed=derive_seed(cfg.seed, "sp", 0), messages=msgs)
    with _out(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["edge", "clause", "var", "negated", "eta"])
        for e in range(graph.n_edges):
            if graph.edge_live[e]:
                writer.writerow([e, int(graph.edge_clause[e]) + 1, int(graph.edge_var[e]) + 1,
                                 int(graph.edge_neg[e]), repr(float(msgs.eta[e]))])
    log.info("message dump: %s after %d sweeps", result.status.value, result.sweeps)


def cmd_solve(args):
    formula = _read(args.file)
    cfg = _solver_config(args)
    if args.dump_messages:
        _dump_messages(formula, cfg, args.dump_messages)
    outcome = solve(formula, args.alg, cfg)
    s = outcome.stats
    print(f"c rounds={s.rounds} streamline_clauses={s.streamline_clauses} fixed={s.fixed} "
          f"sweeps={s.sweeps} flips={s.flips} time={s.wall_time:.3f}")
    if outcome.status is Status.SAT:
        print("s SATISFIABLE")
        _print_model(outcome.assignment)
        return EXIT_SAT
    if outcome.status is Status.UNSAT_CLAIM:
        print("c heuristic claim from a contradiction in message passing, not a proof")
        print("s UNSATISFIABLE")
        return EXIT_UNSAT
    print(f"c failure: {outcome.kind.value}")
    print("s UNKNOWN")
    return EXIT_UNKNOWN


def cmd_streamline(args):
    formula = _read(args.file)
    cfg = _solver_config(args)
    result = streamline_preprocess(formula, cfg, args.rounds)
    added = result.formula.n_clauses - formula.n_clauses
    comments = [f"preprocess rounds={result.rounds_run} added={added} converged={int(result.converged)}"]
    with _out(args.output) as fh:
        fh.write(emit_dimacs(result.formula, comments))
    return 0 if result.converged else EXIT_UNKNOWN


def cmd_walksat(args):
    formula = _read(args.file)
    res = walksat(formula, WalkSatParams(args.noise, args.max_flips, args.tries, args.seed))
    print(f"c flips={res.flips}")
    if res.found:
        print("s SATISFIABLE")
        _print_model(res.assignment)
        return EXIT_SAT
    print("s UNKNOWN")
    return EXIT_UNKNOWN


def cmd_oracle(args):
    if args.mode == "xor":
        with open(args.file) as fh:
            text = fh.read()
        formula = parse_dimacs(text)
        system = XorSystem.from_dimacs_comments(text, formula.n_vars)
        sat = xor2_satisfiable(system)
        print(f"c xor constraints={len(system.constraints)}")
        if formula.n_vars <= args.cap_n:
            count = enumerate_solutions(formula, args.cap_n, max_solutions=0).count
            print(f"c enumeration count={count} agrees={int((count > 0) == sat)}")
        print("s SATISFIABLE" if sat else "s UNSATISFIABLE")
        return EXIT_SAT if sat else EXIT_UNSAT
    formula = _read(args.file)
    res = enumerate_solutions(formula, args.cap_n, max_solutions=0)
    if args.mode == "count":
        print(f"count,{res.count}")
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["var", "p_one"])
        marg = res.exact_marginals
        for v in range(formula.n_vars):
            writer.writerow([v + 1, "" if res.count == 0 else f"{marg[v]:.6g}"])
    return EXIT_SAT if res.count else EXIT_UNSAT


def cmd_sweep(args):
    spec = SweepSpec.from_config(load_config(args.config))
    rows = run_sweep(spec, log=log.info)
    with _out(args.output) as fh:
        write_rows(rows, fh)
    for alg, alpha in algorithmic_threshold(rows).items():
        log.info("threshold %s: %s", alg, "below-grid" if alpha is None else alpha)
    return 0


def cmd_calibrate(args):
    spec = CalibrateSpec.from_config(load_config(args.config))
    traces = calibration_runs(spec)
    with _out(args.output) as fh:
        write_trace(traces, fh)
    return 0


def _solver_options(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--T", type=int, default=0, help="streamlining rounds (SIS only)")
    p.add_argument("--r-frac", type=float, default=0.01)
    p.add_argument("--epsilon-frac", type=float, default=0.01)
    p.add_argument("--counter-threshold", type=int, default=2)
    p.add_argument("--pairing", choices=("outer", "block"), default="outer")
    p.add_argument("--msg-tol", type=float, default=1e-3)
    p.add_argument("--max-sweeps", type=int, default=1000)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--damping", type=float, default=0.0)
    p.add_argument("--schedule", choices=("clause", "edge"), default="clause")
    p.add_argument("--time-budget", type=float, default=None, help="seconds")
    _walksat_options(p, seed=False)


def _walksat_options(p, seed=True):
    p.add_argument("--noise", type=float, default=0.5)
    p.add_argument("--max-flips", type=int, default=None)
    p.add_argument("--tries", type=int, default=10)
    if seed:
        p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="spsat", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="random k-SAT or 2-XORSAT instance as DIMACS")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=[k.value for k in Kind], default=Kind.KSAT.value)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="SID or SIS on a DIMACS file")
    p.add_argument("--alg", choices=("sid", "sis"), default="sis")
    _solver_options(p)
    p.add_argument("--dump-messages", metavar="CSV", help="write first-round surveys")
    p.add_argument("file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("streamline", help="append streamlining clauses without solving")
    p.add_argument("--rounds", type=int, default=1)
    _solver_options(p)
    p.add_argument("-o", "--output", default="-")
    p.add_argument("file")
    p.set_defaults(func=cmd_streamline)

    p = sub.add_parser("walksat", help="plain WalkSAT")
    _walksat_options(p)
    p.add_argument("file")
    p.set_defaults(func=cmd_walksat)

    p = sub.add_parser("oracle", help="exact enumeration or XOR parity check")
    p.add_argument("mode", choices=("count", "marginals", "xor"))
    p.add_argument("--cap-n", type=int, default=26)
    p.add_argument("file")
    p.set_defaults(func=cmd_oracle)

    for name, func, text in (("sweep", cmd_sweep, "success-rate sweep"),
                             ("calibrate", cmd_calibrate, "calibration traces")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True)
        p.add_argument("-o", "--output", default="-")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ParseError, OracleRefused, ValueError, OSError) as exc:
        print(f"spsat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
