"""Survey propagation with streamlining constraints for random k-SAT."""

from .cnf import Clause, Formula, Literal, Origin, ParseError, emit_dimacs, evaluate, parse_dimacs
from .gen import GenSpec, Kind, gen_2xorsat, gen_ksat, generate
from .graph import Contradiction, FactorGraph, build_factor_graph, unit_propagate
from .harness import SweepRow, SweepSpec, algorithmic_threshold, calibration_trace, run_sweep, tune_T, wilson_interval
from .oracle import XorSystem, enumerate_solutions, xor2_satisfiable
from .solver import (FailureKind, SolverConfig, SolveOutcome, Status, StreamlinePreprocessor,
                     SurveyInspiredDecimation, SurveyInspiredStreamlining, solve, solve_sid, solve_sis,
                     streamline_preprocess)
from .sp import SpConfig, SurveyPropagation, marginalize, run_sp
from .walksat import WalkSAT, WalkSatParams, walksat

__version__ = "0.1.0"

__all__ = [
    "Clause", "Contradiction", "FactorGraph", "FailureKind", "Formula", "GenSpec", "Kind",
    "Literal", "Origin", "ParseError", "SolveOutcome", "SolverConfig", "SpConfig", "Status",
    "StreamlinePreprocessor", "SurveyInspiredDecimation", "SurveyInspiredStreamlining",
    "SurveyPropagation", "SweepRow", "SweepSpec", "WalkSAT", "WalkSatParams", "XorSystem",
    "algorithmic_threshold", "build_factor_graph", "calibration_trace", "emit_dimacs",
    "enumerate_solutions", "evaluate", "gen_2xorsat", "gen_ksat", "generate", "marginalize",
    "parse_dimacs", "run_sp", "run_sweep", "solve", "solve_sid", "solve_sis",
    "streamline_preprocess", "tune_T", "unit_propagate", "walksat", "wilson_interval",
    "xor2_satisfiable",
]
