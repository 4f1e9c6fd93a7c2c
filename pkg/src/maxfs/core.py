"""Row-deletion search for maximum feasible subsystems.

An infeasible linear system is repaired by deleting rows until what
remains is feasible; we want to delete as few as possible.  The exact
problem is NP-hard, so the solver here is a greedy search over the
elastic relaxation: the elastic objective Z measures total constraint
violation, Z == 0 certifies feasibility, and each round deletes the row
whose (tentative) removal shrinks Z the most.

Two loop drivers are provided and shared with the sparse-recovery
module, which runs the same search over variable pairs instead of rows:

`run_probing_loop`
    One candidate list per round.  Every candidate is probed: its
    elastic costs are zeroed, the LP is re-solved warm, and Z is
    recorded; the engine state is restored after each probe.  The best
    prober is deleted for real by adopting its probe end-state, so the
    adoption costs no extra LP solve.  If the whole candidate pool has
    shrunk to one row, that row is the unique remaining cause and is
    deleted without probing.

`run_batch_loop`
    No probing.  Each round solves once, ranks candidates by score, and
    deletes the head group of the ranking, cut where the score sequence
    first changes mean level (see `changepoint`).  One LP per round.

Both drivers support an early bulk-exit: when the candidate list has at
most `e2_ell` entries, delete all of them and stop.  That step is a
heuristic extrapolation and can overshoot, so it is off by default and,
when enabled for the batch driver, usually restricted to the first
round, where the list is still dominated by genuinely bad rows.

Candidate rankings come in three flavours, all computed from the
current elastic solution:

1. active rows ranked by |dual price|,
2. violated rows ranked by violation x |dual price|,
3. the union of list 2 and the satisfied rows ranked by |dual price|.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import Protocol, Sequence

import numpy as np

from .changepoint import first_mean_change
from .simplex import LpSolution, LpStatus, SimplexSolver, SolverError
from .systems import ElasticModel, LinearSystem, elasticize

__all__ = [
    "Candidate",
    "CandidateKind",
    "ExitReason",
    "LoopTelemetry",
    "MaxFsResult",
    "RemovalEntry",
    "RemovalLedger",
    "StrategyConfig",
    "build_candidates_alg1",
    "build_candidates_alg2",
    "build_candidates_alg3",
    "run_batch_loop",
    "run_probing_loop",
    "solve_maxfs",
]


class CandidateKind(Enum):
    """Which ranking produced a candidate."""

    DUAL = "dual"
    VIOLATION_PRODUCT = "violation_product"
    SATISFIED_DUAL = "satisfied_dual"
    VALUE = "value"


@dataclass(frozen=True)
class Candidate:
    entity: int
    score: float
    kind: CandidateKind


def _ranked(pairs: list[tuple[int, float]], kind: CandidateKind) -> list[Candidate]:
    # stable order: score descending, entity ascending on ties
    pairs.sort(key=lambda t: (-t[1], t[0]))
    return [Candidate(entity=e, score=s, kind=kind) for e, s in pairs]


def build_candidates_alg1(
    sol: LpSolution,
    model: ElasticModel,
    k: int | None = None,
    dual_tol: float = 1e-8,
) -> list[Candidate]:
    """Active rows with a nonzero dual price, ranked by |dual|."""
    duals = model.row_duals(sol)
    pairs = [
        (i, abs(duals[i]))
        for i in range(model.base.m)
        if i not in model.removed_rows and abs(duals[i]) > dual_tol
    ]
    out = _ranked(pairs, CandidateKind.DUAL)
    return out if k is None else out[:k]


def build_candidates_alg2(
    sol: LpSolution,
    model: ElasticModel,
    k: int | None = None,
    violation_tol: float = 1e-8,
) -> list[Candidate]:
    """Violated rows ranked by violation x |dual price|."""
    v = model.violations(sol)
    duals = model.row_duals(sol)
    pairs = [
        (i, v[i] * abs(duals[i]))
        for i in range(model.base.m)
        if i not in model.removed_rows and v[i] > violation_tol
    ]
    out = _ranked(pairs, CandidateKind.VIOLATION_PRODUCT)
    return out if k is None else out[:k]


def _alg3_lists(
    sol: LpSolution,
    model: ElasticModel,
    violation_tol: float,
    dual_tol: float,
) -> tuple[list[Candidate], list[Candidate]]:
    v = model.violations(sol)
    duals = model.row_duals(sol)
    vio: list[tuple[int, float]] = []
    sat: list[tuple[int, float]] = []
    for i in range(model.base.m):
        if i in model.removed_rows:
            continue
        if v[i] > violation_tol:
            vio.append((i, v[i] * abs(duals[i])))
        elif abs(duals[i]) > dual_tol:
            sat.append((i, abs(duals[i])))
    return (
        _ranked(vio, CandidateKind.VIOLATION_PRODUCT),
        _ranked(sat, CandidateKind.SATISFIED_DUAL),
    )


def build_candidates_alg3(
    sol: LpSolution,
    model: ElasticModel,
    k: int | None = None,
    violation_tol: float = 1e-8,
    dual_tol: float = 1e-8,
) -> list[Candidate]:
    """Top violated rows by violation x |dual| plus top satisfied rows
    by |dual|; `k` truncates each list separately."""
    vio, sat = _alg3_lists(sol, model, violation_tol, dual_tol)
    if k is not None:
        vio, sat = vio[:k], sat[:k]
    return vio + sat


@dataclass(frozen=True)
class StrategyConfig:
    """Knobs for the greedy search.

    algorithm   candidate ranking (1, 2, or 3)
    k           list truncation; None keeps every nonzero entry
    use_e1      batch driver instead of per-candidate probing
    e2_ell      bulk-exit threshold; None disables the step
    e2_first_iteration_only
                apply the bulk exit only on the first round
    beta        mean-change sensitivity for the batch cut
    ztol        Z at or below this certifies feasibility
    max_iterations
                outer-round cap; None means 10 * m
    """

    algorithm: int = 2
    k: int | None = None
    use_e1: bool = False
    e2_ell: int | None = None
    e2_first_iteration_only: bool = False
    beta: float = 1.0
    ztol: float = 1e-6
    violation_tol: float = 1e-8
    dual_tol: float = 1e-8
    max_iterations: int | None = None

    def __post_init__(self) -> None:
        if self.algorithm not in (1, 2, 3):
            raise ValueError("algorithm must be 1, 2, or 3")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be at least 1")
        if self.e2_ell is not None and self.e2_ell < 1:
            raise ValueError("e2_ell must be at least 1")
        if self.beta < 0.0:
            raise ValueError("beta must be nonnegative")
        if self.ztol < 0.0:
            raise ValueError("ztol must be nonnegative")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True)
class RemovalEntry:
    entity: int
    iteration: int
    z_after: float


class RemovalLedger:
    """Ordered record of deletions: unique entities, nondecreasing rounds."""

    def __init__(self) -> None:
        self.entries: list[RemovalEntry] = []
        self._seen: set[int] = set()

    def add(self, entity: int, iteration: int, z_after: float) -> None:
        if entity in self._seen:
            raise ValueError(f"entity {entity} recorded twice")
        if self.entries and iteration < self.entries[-1].iteration:
            raise ValueError("iteration numbers must not decrease")
        self._seen.add(entity)
        self.entries.append(RemovalEntry(entity, iteration, z_after))

    def entities(self) -> list[int]:
        return [e.entity for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


class ExitReason(Enum):
    FEASIBLE = "feasible"
    EMPTY_CANDIDATES = "empty_candidates"
    SINGLETON = "singleton"
    BULK_E2 = "bulk_e2"


class SearchEnv(Protocol):
    """What a loop driver needs from the problem being searched.

    Entities are row indices here and variable-pair indices in the
    recovery module; the drivers never look inside them.
    """

    lp_count: int

    def solve_current(self) -> LpSolution: ...

    def candidates(self, sol: LpSolution) -> tuple[int, list[Candidate]]:
        """(untruncated pool size, ranked and truncated list)."""
        ...

    def probe(self, entity: int) -> tuple[float, LpSolution, object]:
        """Tentatively delete `entity`: re-solve warm, put the engine
        back, and return (z, solution, end-state for adoption)."""
        ...

    def adopt(self, entity: int, state: object) -> None:
        """Delete `entity` for real and install the probe end-state."""
        ...

    def remove_batch(self, entities: Sequence[int]) -> None:
        """Delete entities without solving."""
        ...


@dataclass
class LoopTelemetry:
    exit_reason: ExitReason
    iterations: int
    ledger: RemovalLedger
    z_history: list[float]
    removal_sizes: list[int]
    last_solution: LpSolution | None
    probes: int


def _patch_pending(ledger: RemovalLedger, pending: list[int], z: float) -> None:
    # batch deletions learn their z only at the next solve
    for idx in pending:
        e = ledger.entries[idx]
        ledger.entries[idx] = replace(e, z_after=z)
    pending.clear()


def run_probing_loop(
    env: SearchEnv,
    *,
    ztol: float,
    exit_on_empty: bool = False,
    e2_ell: int | None = None,
    e2_first_iteration_only: bool = False,
    singleton_shortcut: bool = True,
    max_iterations: int,
) -> LoopTelemetry:
    """Greedy probe-everything-delete-the-best loop.

    With `exit_on_empty` the loop runs until no candidates remain and a
    positive final Z is acceptable; otherwise Z <= ztol is the goal and
    an empty candidate list while Z > ztol is an error.
    """
    ledger = RemovalLedger()
    pending: list[int] = []
    z_history: list[float] = []
    removal_sizes: list[int] = []
    probes = 0

    sol = env.solve_current()
    z = sol.z
    z_history.append(z)
    if not exit_on_empty and z <= ztol:
        return LoopTelemetry(ExitReason.FEASIBLE, 0, ledger, z_history, removal_sizes, sol, probes)

    iteration = 0
    while True:
        iteration += 1
        if iteration > max_iterations:
            raise SolverError(f"no convergence within {max_iterations} rounds")

        pool_size, cands = env.candidates(sol)
        if not cands:
            if exit_on_empty:
                return LoopTelemetry(
                    ExitReason.EMPTY_CANDIDATES, iteration - 1, ledger,
                    z_history, removal_sizes, sol, probes,
                )
            raise SolverError("objective positive but no candidate rows")

        if singleton_shortcut and pool_size == 1:
            # the sole candidate is the only remaining cause; deleting it
            # leaves the incumbent point feasible, so no probe is needed
            env.remove_batch([cands[0].entity])
            ledger.add(cands[0].entity, iteration, z_after=np.nan)
            pending.append(len(ledger.entries) - 1)
            removal_sizes.append(1)
            return LoopTelemetry(
                ExitReason.SINGLETON, iteration, ledger,
                z_history, removal_sizes, sol, probes,
            )

        if (
            e2_ell is not None
            and (iteration == 1 or not e2_first_iteration_only)
            and len(cands) <= e2_ell
        ):
            ents = [c.entity for c in cands]
            env.remove_batch(ents)
            for e in ents:
                ledger.add(e, iteration, z_after=np.nan)
                pending.append(len(ledger.entries) - 1)
            removal_sizes.append(len(ents))
            return LoopTelemetry(
                ExitReason.BULK_E2, iteration, ledger,
                z_history, removal_sizes, sol, probes,
            )

        best: Candidate | None = None
        best_z = np.inf
        best_sol: LpSolution | None = None
        best_state: object | None = None
        adopted_early = False
        for c in cands:
            pz, psol, pstate = env.probe(c.entity)
            probes += 1
            if not exit_on_empty and pz <= ztol:
                env.adopt(c.entity, pstate)
                ledger.add(c.entity, iteration, z_after=pz)
                removal_sizes.append(1)
                z_history.append(pz)
                sol = psol
                adopted_early = True
                break
            if pz < best_z:
                best, best_z, best_sol, best_state = c, pz, psol, pstate
        if adopted_early:
            return LoopTelemetry(
                ExitReason.FEASIBLE, iteration, ledger,
                z_history, removal_sizes, sol, probes,
            )

        assert best is not None and best_sol is not None
        env.adopt(best.entity, best_state)
        ledger.add(best.entity, iteration, z_after=best_z)
        _patch_pending(ledger, pending, best_z)
        removal_sizes.append(1)
        z_history.append(best_z)
        sol = best_sol
        if not exit_on_empty and best_z <= ztol:
            return LoopTelemetry(
                ExitReason.FEASIBLE, iteration, ledger,
                z_history, removal_sizes, sol, probes,
            )


def run_batch_loop(
    env: SearchEnv,
    *,
    ztol: float,
    beta: float = 1.0,
    exit_on_empty: bool = False,
    e2_ell: int | None = None,
    e2_first_iteration_only: bool = True,
    singleton_shortcut: bool = False,
    max_iterations: int,
) -> LoopTelemetry:
    """One solve per round; delete the leading score group wholesale.

    No singleton shortcut by default: a one-entry pool falls through to
    the mean-change cut, which removes it and lets the next solve decide
    whether the search is done. Same LP count, more robust exit."""
    ledger = RemovalLedger()
    pending: list[int] = []
    z_history: list[float] = []
    removal_sizes: list[int] = []

    iteration = 0
    while True:
        if iteration >= max_iterations:
            raise SolverError(f"no convergence within {max_iterations} rounds")
        sol = env.solve_current()
        z = sol.z
        z_history.append(z)
        _patch_pending(ledger, pending, z)
        if not exit_on_empty and z <= ztol:
            return LoopTelemetry(
                ExitReason.FEASIBLE, iteration, ledger,
                z_history, removal_sizes, sol, 0,
            )
        iteration += 1

        pool_size, cands = env.candidates(sol)
        if not cands:
            if exit_on_empty:
                return LoopTelemetry(
                    ExitReason.EMPTY_CANDIDATES, iteration - 1, ledger,
                    z_history, removal_sizes, sol, 0,
                )
            raise SolverError("objective positive but no candidate rows")

        if singleton_shortcut and pool_size == 1:
            env.remove_batch([cands[0].entity])
            ledger.add(cands[0].entity, iteration, z_after=np.nan)
            pending.append(len(ledger.entries) - 1)
            removal_sizes.append(1)
            return LoopTelemetry(
                ExitReason.SINGLETON, iteration, ledger,
                z_history, removal_sizes, sol, 0,
            )

        if (
            e2_ell is not None
            and (iteration == 1 or not e2_first_iteration_only)
            and len(cands) <= e2_ell
        ):
            ents = [c.entity for c in cands]
            env.remove_batch(ents)
            for e in ents:
                ledger.add(e, iteration, z_after=np.nan)
                pending.append(len(ledger.entries) - 1)
            removal_sizes.append(len(ents))
            return LoopTelemetry(
                ExitReason.BULK_E2, iteration, ledger,
                z_history, removal_sizes, sol, 0,
            )

        scores = np.array([c.score for c in cands])
        p = first_mean_change(scores, beta=beta)
        ents = [c.entity for c in cands[:p]]
        env.remove_batch(ents)
        for e in ents:
            ledger.add(e, iteration, z_after=np.nan)
            pending.append(len(ledger.entries) - 1)
        removal_sizes.append(len(ents))


class _RowEnv:
    """Search environment whose entities are rows of an elastic model."""

    def __init__(self, model: ElasticModel, engine: SimplexSolver, cfg: StrategyConfig):
        self.model = model
        self.engine = engine
        self.cfg = cfg
        self.lp_count = 0

    def _checked(self, sol: LpSolution) -> LpSolution:
        if sol.status is not LpStatus.OPTIMAL:
            raise SolverError(f"elastic subproblem ended {sol.status.name}")
        return sol

    def solve_current(self) -> LpSolution:
        self.lp_count += 1
        return self._checked(self.engine.solve(self.model.lp_problem()))

    def candidates(self, sol: LpSolution) -> tuple[int, list[Candidate]]:
        cfg = self.cfg
        if cfg.algorithm == 1:
            pool = build_candidates_alg1(sol, self.model, None, cfg.dual_tol)
            return len(pool), pool[: cfg.k] if cfg.k is not None else pool
        if cfg.algorithm == 2:
            pool = build_candidates_alg2(sol, self.model, None, cfg.violation_tol)
            return len(pool), pool[: cfg.k] if cfg.k is not None else pool
        vio, sat = _alg3_lists(sol, self.model, cfg.violation_tol, cfg.dual_tol)
        merged = (
            vio + sat if cfg.k is None else vio[: cfg.k] + sat[: cfg.k]
        )
        return len(vio) + len(sat), merged

    def probe(self, entity: int) -> tuple[float, LpSolution, object]:
        trial = self.model.remove_row(entity)
        pre = self.engine.save_state()
        sol = self._checked(self.engine.solve(trial.lp_problem()))
        post = self.engine.save_state()
        self.engine.load_state(pre)
        self.lp_count += 1
        return sol.z, sol, post

    def adopt(self, entity: int, state: object) -> None:
        self.model = self.model.remove_row(entity)
        self.engine.load_state(state)

    def remove_batch(self, entities: Sequence[int]) -> None:
        for e in entities:
            self.model = self.model.remove_row(e)


@dataclass
class MaxFsResult:
    """Outcome of the greedy search on one elastic model.

    `removed_rows` lists deletions in order; the surviving rows form a
    feasible subsystem whenever `final_z <= ztol` held at exit.
    `lp_count` counts every LP solved, probes and the finishing solve
    included.
    """

    ledger: RemovalLedger
    final_z: float
    final_solution: LpSolution
    model: ElasticModel
    lp_count: int
    iterations: int
    probes: int
    seconds: float
    exit_reason: ExitReason
    z_history: list[float]
    removal_sizes: list[int]

    @property
    def removed_rows(self) -> list[int]:
        return self.ledger.entities()


def solve_maxfs(
    source: LinearSystem | ElasticModel,
    config: StrategyConfig | None = None,
    engine: SimplexSolver | None = None,
) -> MaxFsResult:
    """Delete rows greedily until the elastic objective reaches zero.

    Accepts a plain system (elasticised in standard mode) or a prebuilt
    elastic model when full elasticity or prior removals are wanted.
    """
    cfg = config or StrategyConfig()
    model = source if isinstance(source, ElasticModel) else elasticize(source)
    if engine is None:
        engine = SimplexSolver()
    env = _RowEnv(model, engine, cfg)
    cap = cfg.max_iterations if cfg.max_iterations is not None else 10 * model.base.m

    t0 = time.perf_counter()
    if cfg.use_e1:
        tel = run_batch_loop(
            env,
            ztol=cfg.ztol,
            beta=cfg.beta,
            e2_ell=cfg.e2_ell,
            e2_first_iteration_only=cfg.e2_first_iteration_only,
            max_iterations=cap,
        )
    else:
        tel = run_probing_loop(
            env,
            ztol=cfg.ztol,
            e2_ell=cfg.e2_ell,
            e2_first_iteration_only=cfg.e2_first_iteration_only,
            max_iterations=cap,
        )

    if tel.exit_reason in (ExitReason.SINGLETON, ExitReason.BULK_E2):
        # those exits delete without solving; one finishing solve yields
        # the surviving system's solution and the definitive Z
        fsol = env.solve_current()
        tel.z_history.append(fsol.z)
        _patch_pending_tail(tel.ledger, fsol.z)
        final_sol, final_z = fsol, fsol.z
    else:
        assert tel.last_solution is not None
        final_sol, final_z = tel.last_solution, tel.z_history[-1]
    seconds = time.perf_counter() - t0

    if tel.exit_reason is not ExitReason.BULK_E2 and final_z > cfg.ztol:
        raise SolverError(f"search ended with Z={final_z:.3e} above tolerance")

    return MaxFsResult(
        ledger=tel.ledger,
        final_z=final_z,
        final_solution=final_sol,
        model=env.model,
        lp_count=env.lp_count,
        iterations=tel.iterations,
        probes=tel.probes,
        seconds=seconds,
        exit_reason=tel.exit_reason,
        z_history=tel.z_history,
        removal_sizes=tel.removal_sizes,
    )


def _patch_pending_tail(ledger: RemovalLedger, z: float) -> None:
    for idx, e in enumerate(ledger.entries):
        if np.isnan(e.z_after):
            ledger.entries[idx] = replace(e, z_after=z)
