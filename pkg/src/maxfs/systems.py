"""Dense linear constraint systems and their elastic relaxations.

A system is rows `a_i . x (<=|=|>=) b_i` plus optional variable bounds.
Elasticisation appends one nonnegative penalty column per inequality row
(a pair for equality rows) so that the relaxed LP is always feasible and
its objective measures total constraint violation; in full mode each
finite variable bound is lifted into a penalised row of its own.

Row removal never rebuilds the LP: a removed row keeps its penalty
columns but their objective coefficients drop to zero, which makes the
row freely violable at no cost. That is exactly equivalent to deleting
the constraint and lets the simplex engine restart from the incumbent
basis after every removal.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .simplex import LpProblem, LpSolution, Sense, SENSE_TOKENS, TOKEN_SENSES, make_problem

ZTOL_DEFAULT = 1e-6


def _as_sense(s) -> Sense:
    """Accept Sense values, their integer codes, or tokens like \">=\"."""
    text = str(s)
    if text in TOKEN_SENSES:
        return TOKEN_SENSES[text]
    return Sense(int(s))


@dataclass(frozen=True)
class LinearSystem:
    coeffs: np.ndarray   # (m, n)
    senses: np.ndarray   # (m,) of Sense values
    rhs: np.ndarray      # (m,)
    lower: np.ndarray    # (n,) -inf allowed
    upper: np.ndarray    # (n,) +inf allowed

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 2:
            raise ValueError("coefficient matrix must be 2-d")
        m, n = coeffs.shape
        if m < 1 or n < 1:
            raise ValueError("system needs at least one row and one column")
        senses = np.asarray([_as_sense(s) for s in np.asarray(self.senses).ravel()],
                            dtype=np.int8)
        rhs = np.asarray(self.rhs, dtype=float)
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if senses.shape != (m,) or rhs.shape != (m,):
            raise ValueError("senses/rhs length must match row count")
        if lower.shape != (n,) or upper.shape != (n,):
            raise ValueError("bound vectors must match column count")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        if not np.all(np.isfinite(rhs)):
            raise ValueError("right-hand sides must be finite")
        if np.any(lower > upper):
            raise ValueError("lower bound exceeds upper bound")
        if np.any(~coeffs.any(axis=1)):
            raise ValueError("every row needs at least one nonzero coefficient")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def m(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]


def system(coeffs, senses, rhs, lower=None, upper=None) -> LinearSystem:
    """Convenience constructor with free default bounds."""
    coeffs = np.asarray(coeffs, dtype=float)
    n = coeffs.shape[1] if coeffs.ndim == 2 else 0
    if lower is None:
        lower = np.full(n, -np.inf)
    if upper is None:
        upper = np.full(n, np.inf)
    return LinearSystem(coeffs=coeffs, senses=np.asarray(senses), rhs=np.asarray(rhs),
                        lower=np.asarray(lower, dtype=float),
                        upper=np.asarray(upper, dtype=float))


class ElasticMode(Enum):
    STANDARD = "standard"   # rows only
    FULL = "full"           # rows plus finite variable bounds


@dataclass(frozen=True)
class ElasticModel:
    """An elastic LP wrapped around a base system.

    `problem` holds the LP with every penalty column priced at 1; the
    live objective for the current removal state comes from
    `lp_costs()`. Removal state is immutable: `remove_row` /
    `reinstate_row` return new models sharing all large arrays.
    """

    base: LinearSystem
    mode: ElasticMode
    problem: LpProblem
    row_elastics: tuple            # per base row: tuple of LP column ids
    bound_rows: tuple              # (var, side, lp_row, elastic_col) per lifted bound
    removed_rows: frozenset = field(default_factory=frozenset)

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def active_rows(self) -> list:
        return [i for i in range(self.base.m) if i not in self.removed_rows]

    def lp_costs(self) -> np.ndarray:
        c = self.problem.c.copy()
        for r in self.removed_rows:
            for col in self.row_elastics[r]:
                c[col] = 0.0
        return c

    def lp_problem(self) -> LpProblem:
        return self.problem.with_costs(self.lp_costs())

    def remove_row(self, row: int) -> "ElasticModel":
        if not 0 <= row < self.base.m:
            raise ValueError(f"row {row} out of range")
        if row in self.removed_rows:
            raise ValueError(f"row {row} already removed")
        return replace(self, removed_rows=self.removed_rows | {row})

    def reinstate_row(self, row: int) -> "ElasticModel":
        if row not in self.removed_rows:
            raise ValueError(f"row {row} is not removed")
        return replace(self, removed_rows=self.removed_rows - {row})

    def violations(self, sol: LpSolution) -> np.ndarray:
        """Per-row violation magnitude: the largest penalty column value
        attached to the row (equality rows carry a pair)."""
        out = np.zeros(self.base.m)
        for i, cols in enumerate(self.row_elastics):
            out[i] = max(float(sol.x[c]) for c in cols)
        return out

    def row_duals(self, sol: LpSolution) -> np.ndarray:
        return sol.duals[: self.base.m]

    def z_of(self, sol: LpSolution) -> float:
        """Objective under the current removal state (penalties of
        removed rows do not count)."""
        return float(self.lp_costs() @ sol.x)


def elasticize(base: LinearSystem, mode: ElasticMode = ElasticMode.STANDARD) -> ElasticModel:
    m, n = base.m, base.n
    full = mode is ElasticMode.FULL
    n_pairs = int(np.sum(base.senses == Sense.EQ))
    n_row_elastic = m + n_pairs
    fin_lo = np.isfinite(base.lower) if full else np.zeros(n, dtype=bool)
    fin_hi = np.isfinite(base.upper) if full else np.zeros(n, dtype=bool)
    n_bound_rows = int(fin_lo.sum() + fin_hi.sum())

    ncols = n + n_row_elastic + n_bound_rows
    nrows = m + n_bound_rows
    A = np.zeros((nrows, ncols))
    A[:m, :n] = base.coeffs
    senses = np.empty(nrows, dtype=np.int8)
    senses[:m] = base.senses
    b = np.empty(nrows)
    b[:m] = base.rhs

    col = n
    row_elastics = []
    for i in range(m):
        s = Sense(int(base.senses[i]))
        if s is Sense.GE:
            A[i, col] = 1.0
            row_elastics.append((col,))
            col += 1
        elif s is Sense.LE:
            A[i, col] = -1.0
            row_elastics.append((col,))
            col += 1
        else:
            A[i, col] = 1.0
            A[i, col + 1] = -1.0
            row_elastics.append((col, col + 1))
            col += 2

    lower = np.full(ncols, 0.0)
    upper = np.full(ncols, np.inf)
    lower[:n] = base.lower
    upper[:n] = base.upper

    bound_rows = []
    lp_row = m
    for j in range(n):
        if fin_lo[j]:
            A[lp_row, j] = 1.0
            A[lp_row, col] = 1.0
            senses[lp_row] = Sense.GE
            b[lp_row] = base.lower[j]
            lower[j] = -np.inf
            bound_rows.append((j, "lower", lp_row, col))
            col += 1
            lp_row += 1
        if fin_hi[j]:
            A[lp_row, j] = 1.0
            A[lp_row, col] = -1.0
            senses[lp_row] = Sense.LE
            b[lp_row] = base.upper[j]
            upper[j] = np.inf
            bound_rows.append((j, "upper", lp_row, col))
            col += 1
            lp_row += 1

    costs = np.zeros(ncols)
    costs[n:] = 1.0
    problem = make_problem(costs, A, senses, b, lower, upper)
    return ElasticModel(base=base, mode=mode, problem=problem,
                        row_elastics=tuple(row_elastics), bound_rows=tuple(bound_rows))


# ----------------------------------------------------------------------
# text interchange format
#
#   m n
#   a_i1 ... a_in sense rhs      (m lines, sense in {<=, =, >=})
#   l_j u_j                      (optional n lines; -inf/inf literals)


def _fmt(v: float) -> str:
    v = float(v)
    if v == np.inf:
        return "inf"
    if v == -np.inf:
        return "-inf"
    return repr(v)


def format_system(sys_: LinearSystem) -> str:
    out = io.StringIO()
    out.write(f"{sys_.m} {sys_.n}\n")
    for i in range(sys_.m):
        coeffs = " ".join(_fmt(v) for v in sys_.coeffs[i])
        tok = SENSE_TOKENS[Sense(int(sys_.senses[i]))]
        out.write(f"{coeffs} {tok} {_fmt(sys_.rhs[i])}\n")
    if np.any(np.isfinite(sys_.lower)) or np.any(np.isfinite(sys_.upper)):
        for j in range(sys_.n):
            out.write(f"{_fmt(sys_.lower[j])} {_fmt(sys_.upper[j])}\n")
    return out.getvalue()


def parse_system(text: str) -> LinearSystem:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ValueError("empty system file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"header must be 'm n', got {lines[0]!r}")
    m, n = int(head[0]), int(head[1])
    if len(lines) - 1 not in (m, m + n):
        raise ValueError(f"expected {m} rows plus optional {n} bound lines, "
                         f"found {len(lines) - 1} data lines")
    coeffs = np.empty((m, n))
    senses = np.empty(m, dtype=np.int8)
    rhs = np.empty(m)
    for i in range(m):
        toks = lines[1 + i].split()
        if len(toks) != n + 2:
            raise ValueError(f"row {i}: expected {n} coefficients, sense and rhs")
        try:
            coeffs[i] = [float(t) for t in toks[:n]]
            rhs[i] = float(toks[n + 1])
        except ValueError as exc:
            raise ValueError(f"row {i}: bad number: {exc}") from None
        if toks[n] not in TOKEN_SENSES:
            raise ValueError(f"row {i}: unknown sense {toks[n]!r}")
        senses[i] = TOKEN_SENSES[toks[n]]
    if len(lines) - 1 == m + n:
        lower = np.empty(n)
        upper = np.empty(n)
        for j in range(n):
            toks = lines[1 + m + j].split()
            if len(toks) != 2:
                raise ValueError(f"bound line {j}: expected 'l u'")
            lower[j] = float(toks[0])
            upper[j] = float(toks[1])
    else:
        lower = np.full(n, -np.inf)
        upper = np.full(n, np.inf)
    return LinearSystem(coeffs=coeffs, senses=senses, rhs=rhs, lower=lower, upper=upper)


def write_system(sys_: LinearSystem, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_system(sys_))


def read_system(path) -> LinearSystem:
    with open(path) as fh:
        return parse_system(fh.read())


# ----------------------------------------------------------------------
# dense matrix/vector files used by the recovery front end


def write_matrix(A: np.ndarray, path) -> None:
    A = np.asarray(A, dtype=float)
    with open(path, "w") as fh:
        fh.write(f"{A.shape[0]} {A.shape[1]}\n")
        for row in A:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    if not lines:
        raise ValueError("empty matrix file")
    m, n = (int(t) for t in lines[0].split())
    if len(lines) - 1 != m:
        raise ValueError(f"expected {m} matrix rows, found {len(lines) - 1}")
    A = np.empty((m, n))
    for i in range(m):
        toks = lines[1 + i].split()
        if len(toks) != n:
            raise ValueError(f"matrix row {i}: expected {n} entries")
        A[i] = [float(t) for t in toks]
    return A


def write_vector(v: np.ndarray, path) -> None:
    with open(path, "w") as fh:
        for x in np.asarray(v, dtype=float).ravel():
            fh.write(_fmt(x) + "\n")


def read_vector(path) -> np.ndarray:
    with open(path) as fh:
        vals = [float(ln.strip()) for ln in fh if ln.strip()]
    return np.asarray(vals, dtype=float)
