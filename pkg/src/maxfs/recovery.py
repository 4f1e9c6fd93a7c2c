"""Sparse solutions of underdetermined linear systems via LP.

Given A (m x n, m < n) and b, we want the vector y with the fewest
nonzeros satisfying A y = b.  The convex workhorse is l1 minimization
(basis pursuit): split y into nonnegative parts, y = u - v, and solve

    min sum(u + v)  s.t.  A u - A v = b,  u, v >= 0.

Past the sparsity level where a single l1 solve stops recovering the
planted signal, iterative variants keep going: treat "variable j is
allowed to be nonzero" as a deletion decision and run the greedy
deletion search from `core` over variables instead of rows.  Deleting a
variable means dropping (or shrinking) its objective coefficients so
its magnitude is no longer penalised.  Two LP shapes support this:

  split form      the basis-pursuit LP above; deleting j rescales the
                  costs of the pair (u_j, v_j)
  zeroing form    x free with explicit rows x_j + e_j^+ - e_j^- = 0 and
                  penalty costs on e^+/e^-; deleting j zeroes the costs
                  of its e pair, freeing x_j

Methods, named by their selection rule:

  basis_pursuit   one split-form solve
  method_b        probing loop on the split form; candidate variables
                  ranked by |u_j - v_j|; deleted pairs keep a residual
                  cost of 0.1; stops when no undeleted variable is
                  nonzero
  method_c        probing loop on the zeroing form with two candidate
                  lists (|x_j| and the zeroing-row dual price); deleted
                  pairs cost 0; stops when the penalty objective hits 0
  method_m        basis pursuit first; if its support is already small
                  (fewer than m - 3 nonzeros) keep it, otherwise fall
                  back to method_b
  method_me1e2    batch loop on the split form: one solve per round,
                  delete the leading group of the |u_j - v_j| ranking at
                  the first mean change; on the first round only, if at
                  most `ell` variables are nonzero, delete them all and
                  stop (so easy instances cost exactly one LP)
  jokar_pfetsch   reference variant of method_b whose deleted pairs
                  cost 0 and which stops at objective zero

`postprocess` prunes a support set: a variable is dropped when the
remaining support columns still reproduce b without it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Candidate, CandidateKind, run_batch_loop, run_probing_loop
from .simplex import (
    LpProblem,
    LpSolution,
    LpStatus,
    Sense,
    SimplexSolver,
    SolverError,
    make_problem,
)

__all__ = [
    "RecoveryProblem",
    "RecoveryResult",
    "basis_pursuit",
    "jokar_pfetsch",
    "method_b",
    "method_c",
    "method_m",
    "method_me1e2",
    "postprocess",
]

ZERO_TOL = 1e-7     # |value| above this counts as a nonzero
RESIDUAL_TOL = 1e-6  # every returned y must satisfy ||A y - b||_inf <= this


@dataclass(frozen=True)
class RecoveryProblem:
    """An underdetermined dense system A y = b with m < n."""

    A: np.ndarray
    b: np.ndarray
    zero_tol: float = ZERO_TOL
    ztol: float = 1e-6

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2:
            raise ValueError("A must be 2-d")
        m, n = A.shape
        if m < 1:
            raise ValueError("A needs at least one row")
        if m >= n:
            raise ValueError(f"need more columns than rows, got {m}x{n}")
        if b.shape != (m,):
            raise ValueError("b length must match row count of A")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("A and b must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class RecoveryResult:
    """A recovered vector and its support.

    The support is the set of entries of `y` larger than the zero
    threshold; off-support entries are below it but may carry solver
    noise. Every result is checked to reproduce b within RESIDUAL_TOL.
    """

    method: str
    y: np.ndarray
    support: frozenset
    lp_count: int
    iterations: int
    seconds: float
    bp_shortcut_taken: bool = False

    @property
    def T(self) -> int:
        return len(self.support)


def _finish(
    method: str,
    prob: RecoveryProblem,
    y: np.ndarray,
    lp_count: int,
    iterations: int,
    t0: float,
    bp_shortcut_taken: bool = False,
) -> RecoveryResult:
    # y keeps its sub-threshold noise: zeroing it could break A y = b
    # at tight tolerance; the support ignores it instead
    resid = float(np.max(np.abs(prob.A @ y - prob.b)))
    if resid > RESIDUAL_TOL:
        raise SolverError(f"{method}: recovered vector misses b by {resid:.3e}")
    support = frozenset(int(j) for j in np.flatnonzero(np.abs(y) > prob.zero_tol))
    return RecoveryResult(
        method=method,
        y=y,
        support=support,
        lp_count=lp_count,
        iterations=iterations,
        seconds=time.perf_counter() - t0,
        bp_shortcut_taken=bp_shortcut_taken,
    )


class _SplitEnv:
    """Split-form LP with per-pair deletable costs."""

    def __init__(self, prob: RecoveryProblem, k: int | None, reset_cost: float):
        self.prob = prob
        self.k = k
        self.reset_cost = reset_cost
        n = prob.n
        A_lp = np.hstack([prob.A, -prob.A])
        senses = np.full(prob.m, Sense.EQ, dtype=np.int8)
        lower = np.zeros(2 * n)
        self.base = make_problem(np.ones(2 * n), A_lp, senses, prob.b, lower=lower)
        self.costs = np.ones(2 * n)
        self.removed: set[int] = set()
        self.engine = SimplexSolver()
        self.lp_count = 0

    def _problem(self, costs: np.ndarray) -> LpProblem:
        return self.base.with_costs(costs.copy())

    def _solve(self, costs: np.ndarray) -> LpSolution:
        sol = self.engine.solve(self._problem(costs))
        self.lp_count += 1
        if sol.status is LpStatus.INFEASIBLE:
            raise ValueError("b is not in the range of A: nothing to recover")
        if sol.status is not LpStatus.OPTIMAL:
            raise SolverError(f"recovery subproblem ended {sol.status.name}")
        return sol

    def solve_current(self) -> LpSolution:
        return self._solve(self.costs)

    def y_of(self, sol: LpSolution) -> np.ndarray:
        n = self.prob.n
        return sol.x[:n] - sol.x[n : 2 * n]

    def candidates(self, sol: LpSolution) -> tuple[int, list[Candidate]]:
        y = self.y_of(sol)
        pairs = [
            (j, abs(float(y[j])))
            for j in range(self.prob.n)
            if j not in self.removed and abs(y[j]) > self.prob.zero_tol
        ]
        pairs.sort(key=lambda t: (-t[1], t[0]))
        pool = [Candidate(j, s, CandidateKind.VALUE) for j, s in pairs]
        return len(pool), pool if self.k is None else pool[: self.k]

    def _pair_costs(self, costs: np.ndarray, j: int) -> None:
        costs[j] = self.reset_cost
        costs[self.prob.n + j] = self.reset_cost

    def probe(self, j: int) -> tuple[float, LpSolution, object]:
        trial = self.costs.copy()
        self._pair_costs(trial, j)
        pre = self.engine.save_state()
        sol = self._solve(trial)
        post = self.engine.save_state()
        self.engine.load_state(pre)
        return sol.z, sol, post

    def adopt(self, j: int, state: object) -> None:
        self._pair_costs(self.costs, j)
        self.removed.add(j)
        self.engine.load_state(state)

    def remove_batch(self, js: Sequence[int]) -> None:
        for j in js:
            self._pair_costs(self.costs, j)
            self.removed.add(j)


class _ZeroEnv:
    """Zeroing-form LP: x free, rows x_j + e_j^+ - e_j^- = 0 carry the
    penalties. Deleting j zeroes the costs of its e pair."""

    def __init__(self, prob: RecoveryProblem, k: int | None, dual_tol: float = 1e-8):
        self.prob = prob
        self.k = k
        self.dual_tol = dual_tol
        m, n = prob.m, prob.n
        ncols = 3 * n
        A_lp = np.zeros((m + n, ncols))
        A_lp[:m, :n] = prob.A
        A_lp[m:, :n] = np.eye(n)
        A_lp[m:, n : 2 * n] = np.eye(n)
        A_lp[m:, 2 * n :] = -np.eye(n)
        senses = np.full(m + n, Sense.EQ, dtype=np.int8)
        b_lp = np.concatenate([prob.b, np.zeros(n)])
        lower = np.concatenate([np.full(n, -np.inf), np.zeros(2 * n)])
        costs = np.concatenate([np.zeros(n), np.ones(2 * n)])
        self.base = make_problem(costs, A_lp, senses, b_lp, lower=lower)
        self.costs = costs.copy()
        self.removed: set[int] = set()
        self.engine = SimplexSolver()
        self.lp_count = 0

    def _solve(self, costs: np.ndarray) -> LpSolution:
        sol = self.engine.solve(self.base.with_costs(costs.copy()))
        self.lp_count += 1
        if sol.status is LpStatus.INFEASIBLE:
            raise ValueError("b is not in the range of A: nothing to recover")
        if sol.status is not LpStatus.OPTIMAL:
            raise SolverError(f"recovery subproblem ended {sol.status.name}")
        return sol

    def solve_current(self) -> LpSolution:
        return self._solve(self.costs)

    def y_of(self, sol: LpSolution) -> np.ndarray:
        return sol.x[: self.prob.n].copy()

    def candidates(self, sol: LpSolution) -> tuple[int, list[Candidate]]:
        n, m = self.prob.n, self.prob.m
        x = sol.x[:n]
        zero_duals = sol.duals[m : m + n]
        vals: list[tuple[int, float]] = []
        duals: list[tuple[int, float]] = []
        for j in range(n):
            if j in self.removed:
                continue
            if abs(x[j]) > self.prob.zero_tol:
                vals.append((j, abs(float(x[j]))))
            if abs(zero_duals[j]) > self.dual_tol:
                duals.append((j, abs(float(zero_duals[j]))))
        vals.sort(key=lambda t: (-t[1], t[0]))
        duals.sort(key=lambda t: (-t[1], t[0]))
        l1 = [Candidate(j, s, CandidateKind.VALUE) for j, s in vals]
        l2 = [Candidate(j, s, CandidateKind.DUAL) for j, s in duals]
        if self.k is not None:
            l1, l2 = l1[: self.k], l2[: self.k]
        seen = {c.entity for c in l1}
        merged = l1 + [c for c in l2 if c.entity not in seen]
        pool = len({j for j, _ in vals} | {j for j, _ in duals})
        return pool, merged

    def _pair_costs(self, costs: np.ndarray, j: int) -> None:
        n = self.prob.n
        costs[n + j] = 0.0
        costs[2 * n + j] = 0.0

    def probe(self, j: int) -> tuple[float, LpSolution, object]:
        trial = self.costs.copy()
        self._pair_costs(trial, j)
        pre = self.engine.save_state()
        sol = self._solve(trial)
        post = self.engine.save_state()
        self.engine.load_state(pre)
        return sol.z, sol, post

    def adopt(self, j: int, state: object) -> None:
        self._pair_costs(self.costs, j)
        self.removed.add(j)
        self.engine.load_state(state)

    def remove_batch(self, js: Sequence[int]) -> None:
        for j in js:
            self._pair_costs(self.costs, j)
            self.removed.add(j)


def basis_pursuit(prob: RecoveryProblem) -> RecoveryResult:
    """Single minimum-l1 solve."""
    t0 = time.perf_counter()
    env = _SplitEnv(prob, k=None, reset_cost=1.0)
    sol = env.solve_current()
    return _finish("bp", prob, env.y_of(sol), env.lp_count, 0, t0)


def _cap(prob: RecoveryProblem) -> int:
    return 10 * prob.n


def method_b(prob: RecoveryProblem, k: int | None = 2) -> RecoveryResult:
    """Greedy probing over split-form pairs, deleted pairs cost 0.1."""
    t0 = time.perf_counter()
    env = _SplitEnv(prob, k=k, reset_cost=0.1)
    tel = run_probing_loop(
        env, ztol=prob.ztol, exit_on_empty=True, max_iterations=_cap(prob)
    )
    assert tel.last_solution is not None
    return _finish("b", prob, env.y_of(tel.last_solution), env.lp_count, tel.iterations, t0)


def jokar_pfetsch(prob: RecoveryProblem, k: int | None = None) -> RecoveryResult:
    """Reference probing variant: deleted pairs cost 0, stop at Z = 0."""
    t0 = time.perf_counter()
    env = _SplitEnv(prob, k=k, reset_cost=0.0)
    tel = run_probing_loop(
        env, ztol=prob.ztol, exit_on_empty=False, max_iterations=_cap(prob)
    )
    assert tel.last_solution is not None
    return _finish("jp", prob, env.y_of(tel.last_solution), env.lp_count, tel.iterations, t0)


def method_c(prob: RecoveryProblem, k: int | None = 2) -> RecoveryResult:
    """Greedy probing over the zeroing form, stop at penalty zero."""
    t0 = time.perf_counter()
    env = _ZeroEnv(prob, k=k)
    tel = run_probing_loop(
        env, ztol=prob.ztol, exit_on_empty=False, max_iterations=_cap(prob)
    )
    assert tel.last_solution is not None
    return _finish("c", prob, env.y_of(tel.last_solution), env.lp_count, tel.iterations, t0)


def method_m(prob: RecoveryProblem, k: int | None = 2) -> RecoveryResult:
    """Basis pursuit when its support is already sparse, method_b otherwise.

    The cheap solve is kept whenever it has fewer than m - 3 nonzeros;
    denser first solutions usually mean l1 failed and the full search is
    worth its cost.
    """
    t0 = time.perf_counter()
    bp = basis_pursuit(prob)
    if bp.T < prob.m - 3:
        return _finish("m", prob, bp.y, 1, 0, t0, bp_shortcut_taken=True)
    b = method_b(prob, k=k)
    return _finish("m", prob, b.y, 1 + b.lp_count, b.iterations, t0)


def method_me1e2(prob: RecoveryProblem, ell: int | None = None) -> RecoveryResult:
    """Batch-removal loop on the split form.

    One LP per round; the leading group of the |u_j - v_j| ranking is
    deleted wholesale at the first mean change. A first-round bulk exit
    fires when at most `ell` variables are nonzero (default m - 3),
    which collapses every basis-pursuit-recoverable instance to one LP.
    """
    t0 = time.perf_counter()
    if ell is None:
        ell = prob.m - 3
    e2 = ell if ell >= 1 else None
    env = _SplitEnv(prob, k=None, reset_cost=0.1)
    tel = run_batch_loop(
        env,
        ztol=prob.ztol,
        exit_on_empty=True,
        e2_ell=e2,
        e2_first_iteration_only=True,
        max_iterations=_cap(prob),
    )
    assert tel.last_solution is not None
    return _finish(
        "me1e2", prob, env.y_of(tel.last_solution), env.lp_count, tel.iterations, t0
    )


def postprocess(prob: RecoveryProblem, support) -> frozenset:
    """Drop support variables whose removal keeps A y = b solvable.

    Variables are tested in ascending order; each drop is kept before
    testing the next, so the result is a (possibly non-unique) minimal
    subset under sequential pruning.
    """
    keep = sorted(int(j) for j in support)
    tol = RESIDUAL_TOL * (1.0 + float(np.max(np.abs(prob.b))))
    for j in list(keep):
        trial = [c for c in keep if c != j]
        if _solvable_on(prob, trial, tol):
            keep = trial
    return frozenset(keep)


def _solvable_on(prob: RecoveryProblem, cols: list[int], tol: float) -> bool:
    if not cols:
        return bool(np.all(np.abs(prob.b) <= tol))
    sub = prob.A[:, cols]
    x, *_ = np.linalg.lstsq(sub, prob.b, rcond=None)
    return bool(np.max(np.abs(sub @ x - prob.b)) <= tol)
