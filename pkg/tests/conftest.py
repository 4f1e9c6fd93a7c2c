"""Shared oracles and generators.

The oracles here deliberately avoid the package's own machinery:
feasibility questions go to scipy's HiGHS LP solver, minimum covers and
IIS families come from explicit subset enumeration, and the changepoint
reference recomputes segment errors directly. Tests compare the
package's answers against these independent implementations.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest
from scipy.optimize import linprog

from maxfs.systems import LinearSystem, system

# ---------------------------------------------------------------------------
# scipy-based LP feasibility / reference solves


def scipy_feasible(sys_: LinearSystem, rows=None) -> bool:
    """Feasibility of (a row subset of) a system, by HiGHS."""
    if rows is None:
        rows = range(sys_.m)
    rows = sorted(rows)
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for i in rows:
        a, s, b = sys_.coeffs[i], int(sys_.senses[i]), sys_.rhs[i]
        if s == 0:
            A_eq.append(a)
            b_eq.append(b)
        elif s > 0:
            A_ub.append(-a)
            b_ub.append(-b)
        else:
            A_ub.append(a)
            b_ub.append(b)
    bounds = list(zip(
        [None if not np.isfinite(l) else l for l in sys_.lower],
        [None if not np.isfinite(u) else u for u in sys_.upper],
    ))
    res = linprog(
        c=np.zeros(sys_.n),
        A_ub=np.array(A_ub) if A_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(A_eq) if A_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds,
        method="highs",
    )
    return res.status == 0


def scipy_lp(c, A, senses, b, lower, upper):
    """Reference solve of the package's LP form. Returns (status, z):
    status 0 optimal, 2 infeasible, 3 unbounded."""
    A = np.asarray(A, dtype=float)
    senses = np.asarray(senses)
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for i in range(A.shape[0]):
        if senses[i] == 0:
            A_eq.append(A[i])
            b_eq.append(b[i])
        elif senses[i] > 0:
            A_ub.append(-A[i])
            b_ub.append(-b[i])
        else:
            A_ub.append(A[i])
            b_ub.append(b[i])
    bounds = list(zip(
        [None if not np.isfinite(l) else l for l in lower],
        [None if not np.isfinite(u) else u for u in upper],
    ))
    res = linprog(
        c=c,
        A_ub=np.array(A_ub) if A_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(A_eq) if A_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds,
        method="highs",
    )
    return res.status, (res.fun if res.status == 0 else None)


# ---------------------------------------------------------------------------
# brute-force structure oracles (small systems only)


def min_cover_size(sys_: LinearSystem) -> int:
    """Smallest number of rows whose removal leaves a feasible system."""
    m = sys_.m
    if scipy_feasible(sys_):
        return 0
    for r in range(1, m + 1):
        for drop in combinations(range(m), r):
            keep = [i for i in range(m) if i not in drop]
            if scipy_feasible(sys_, keep):
                return r
    raise AssertionError("unreachable: dropping all rows is always feasible")


def all_iises(sys_: LinearSystem) -> list[frozenset]:
    """Every irreducible infeasible subset, by full enumeration."""
    m = sys_.m
    infeasible = {}
    for r in range(1, m + 1):
        for rows in combinations(range(m), r):
            infeasible[rows] = not scipy_feasible(sys_, rows)
    out = []
    for rows, bad in infeasible.items():
        if not bad:
            continue
        proper_subsets_ok = all(
            not infeasible[tuple(sorted(set(rows) - {i}))] for i in rows
        ) if len(rows) > 1 else True
        if proper_subsets_ok:
            out.append(frozenset(rows))
    return out


def brute_force_cut(s: np.ndarray, beta: float = 1.0) -> int:
    """Reference mean-change rule: direct two-segment search plus the
    variance-relative significance test and the flat guard."""
    s = np.asarray(s, dtype=float)
    if s[0] - s[-1] <= 1e-12 * max(1.0, abs(s[0])):
        return 1
    best_p, best_sse = 1, np.inf
    for p in range(1, s.size):
        head, tail = s[:p], s[p:]
        sse = float(np.sum((head - head.mean()) ** 2) + np.sum((tail - tail.mean()) ** 2))
        if sse < best_sse:
            best_p, best_sse = p, sse
    if best_sse < beta * float(np.var(s)):
        return best_p
    return 1


# ---------------------------------------------------------------------------
# generators


def random_feasible_system(rng, m=None, n=None) -> LinearSystem:
    m = m or int(rng.integers(2, 21))
    n = n or int(rng.integers(1, 6))
    x0 = rng.normal(size=n)
    A = rng.uniform(-5, 5, size=(m, n))
    while np.any(~A.any(axis=1)):
        A = rng.uniform(-5, 5, size=(m, n))
    slack = rng.uniform(0.0, 2.0, size=m)
    senses = rng.choice([">=", "<=", "="], size=m, p=[0.4, 0.4, 0.2])
    b = A @ x0
    b = np.where(senses == ">=", b - slack, b)
    b = np.where(senses == "<=", b + slack, b)
    return system(A, senses, b)


def random_infeasible_system(rng, m_extra=3, n=None) -> LinearSystem:
    """A feasible core plus directly contradicting row pairs."""
    n = n or int(rng.integers(1, 5))
    base = random_feasible_system(rng, m=int(rng.integers(2, 6)), n=n)
    coeffs = list(base.coeffs)
    sens = [{-1: "<=", 0: "=", 1: ">="}[int(s)] for s in base.senses]
    b = list(base.rhs)
    for _ in range(m_extra):
        a = rng.uniform(-5, 5, size=n)
        while not a.any():
            a = rng.uniform(-5, 5, size=n)
        t = rng.uniform(1.0, 3.0)
        c = rng.uniform(-2.0, 2.0)
        coeffs.extend([a, a])
        sens.extend([">=", "<="])
        b.extend([c + t, c - t])
    return system(np.array(coeffs), sens, np.array(b))


def planted_instance(rng_or_seed, m, n, S):
    rng = (
        rng_or_seed
        if isinstance(rng_or_seed, np.random.Generator)
        else np.random.default_rng(rng_or_seed)
    )
    A = rng.uniform(-10, 10, size=(m, n))
    x = np.zeros(n)
    if S:
        x[rng.choice(n, size=S, replace=False)] = rng.standard_normal(S)
    return A, x, A @ x


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
