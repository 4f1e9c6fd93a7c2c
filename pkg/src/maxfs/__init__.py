"""Heuristic solvers for the maximum feasible subsystem problem on dense
constraint matrices: elastic-programming removal heuristics, a sparse
recovery front end, infeasible-point classification, and a seeded
benchmark harness."""

from .changepoint import ScoreSeries, best_cut, first_mean_change
from .classify import (
    ClassificationReport,
    Dataset,
    Hyperplane,
    build_constraints,
    classify,
    classify_2e1,
    classify_2inf,
    classify_2k1,
    load_csv,
)
from .core import (
    Candidate,
    CandidateKind,
    ExitReason,
    MaxFsResult,
    RemovalLedger,
    StrategyConfig,
    build_candidates_alg1,
    build_candidates_alg2,
    build_candidates_alg3,
    solve_maxfs,
)
from .bench import BenchRecord, SweepSpec, gen_instance, run_sweep, summarize
from .recovery import (
    RecoveryProblem,
    RecoveryResult,
    basis_pursuit,
    jokar_pfetsch,
    method_b,
    method_c,
    method_m,
    method_me1e2,
    postprocess,
)
from .simplex import (
    BasisToken,
    LpProblem,
    LpSolution,
    LpStatus,
    Sense,
    SimplexSolver,
    SolverError,
    SolverOptions,
    make_problem,
    write_lp_text,
)
from .systems import (
    ElasticMode,
    ElasticModel,
    LinearSystem,
    elasticize,
    read_matrix,
    read_system,
    read_vector,
    system,
    write_matrix,
    write_system,
    write_vector,
)

__all__ = [
    "BasisToken",
    "BenchRecord",
    "Candidate",
    "CandidateKind",
    "ClassificationReport",
    "Dataset",
    "ElasticMode",
    "ElasticModel",
    "ExitReason",
    "Hyperplane",
    "LinearSystem",
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "MaxFsResult",
    "RecoveryProblem",
    "RecoveryResult",
    "RemovalLedger",
    "ScoreSeries",
    "Sense",
    "SimplexSolver",
    "SolverError",
    "SolverOptions",
    "StrategyConfig",
    "SweepSpec",
    "basis_pursuit",
    "best_cut",
    "build_candidates_alg1",
    "build_candidates_alg2",
    "build_candidates_alg3",
    "build_constraints",
    "classify",
    "classify_2e1",
    "classify_2inf",
    "classify_2k1",
    "elasticize",
    "first_mean_change",
    "gen_instance",
    "jokar_pfetsch",
    "load_csv",
    "make_problem",
    "method_b",
    "method_c",
    "method_m",
    "method_me1e2",
    "postprocess",
    "read_matrix",
    "read_system",
    "read_vector",
    "run_sweep",
    "solve_maxfs",
    "summarize",
    "system",
    "write_lp_text",
    "write_matrix",
    "write_system",
    "write_vector",
]

__version__ = "0.1.0"
