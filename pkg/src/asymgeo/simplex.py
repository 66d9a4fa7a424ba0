"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Sized for desk-scale feasibility problems (a few dozen variables); every
solve builds its own tableau, so concurrent calls share nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LPCyclingError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

PIVOT_TOL = 1e-11  # reduced-cost threshold
ENTRY_TOL = 1e-9  # smallest admissible pivot element in the ratio test
FEAS_TOL = 1e-9
DRIVE_OUT_TOL = 1e-9
RHS_SNAP = 1e-12  # smaller entries mark a redundant row rather than a pivot


@dataclass(frozen=True)
class LPResult:
    status: str
    x: np.ndarray | None = None
    fun: float | None = None
    pivots: int = 0

    @property
    def success(self) -> bool:
        return self.status == OPTIMAL


REFACTOR_EVERY = 25  # pivots between rebuilds of the tableau from the original data


def _pivot(T: np.ndarray, basis: list, row: int, col: int) -> None:
    T[row] /= T[row, col]
    column = T[:, col].copy()
    column[row] = 0.0
    T -= np.outer(column, T[row])
    # round-off in a degenerate right-hand side lets Bland's rule cycle; snap it to zero
    rhs = T[:-1, -1]
    rhs[np.abs(rhs) < RHS_SNAP] = 0.0
    basis[row] = col


def _tableau(A: np.ndarray, b: np.ndarray, cost: np.ndarray, basis: list) -> np.ndarray:
    """Tableau [B^-1 A, B^-1 b; reduced costs, -objective] rebuilt from scratch for a basis."""
    m, n = A.shape
    T = np.zeros((m + 1, n + 1))
    if m:
        B = A[:, basis]
        T[:m, :n] = np.linalg.solve(B, A)
        T[:m, -1] = np.linalg.solve(B, b)
        T[:m, basis] = np.eye(m)
        rhs = T[:m, -1]
        rhs[np.abs(rhs) < RHS_SNAP] = 0.0
    y = cost[basis]
    T[-1, :n] = cost - y @ T[:m, :n]
    T[-1, basis] = 0.0
    T[-1, -1] = -(y @ T[:m, -1])
    return T


def _entering(T: np.ndarray, n_cols: int, bounded: bool):
    """Bland's choice: the lowest-index improving column with an admissible pivot.

    Returns (column, rows with admissible pivots), or (None, None) at
    optimality and (-1, None) along an unbounded ray. When the objective is
    known to be bounded, columns without an admissible pivot are skipped as
    round-off.
    """
    m = T.shape[0] - 1
    for col in np.flatnonzero(T[-1, :n_cols] < -PIVOT_TOL):
        positive = np.flatnonzero(T[:m, col] > ENTRY_TOL)
        if positive.size:
            return int(col), positive
        if not bounded:
            return -1, None
    return None, None


def _iterate(T: np.ndarray, basis: list, n_cols: int, budget: list, rebuild, bounded: bool = False) -> tuple:
    """Run Bland pivots on T (objective in the last row) until optimal or unbounded.

    ``rebuild(basis)`` returns a fresh tableau; it is applied every
    REFACTOR_EVERY pivots and once more before a final status is accepted.
    Returns (status, tableau).
    """
    since = 0
    while True:
        col, positive = _entering(T, n_cols, bounded)
        if col is None or col < 0:
            if since == 0:
                return (OPTIMAL if col is None else UNBOUNDED), T
            T, since = rebuild(basis), 0
            continue
        column = T[:, col]
        ratios = np.maximum(T[positive, -1], 0.0) / column[positive]
        best = ratios.min()
        ties = positive[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        budget[0] -= 1
        if budget[0] < 0:
            raise LPCyclingError("simplex pivot budget exhausted")
        _pivot(T, basis, row, col)
        since += 1
        if since >= REFACTOR_EVERY:
            T, since = rebuild(basis), 0


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, max_pivots: int | None = None) -> LPResult:
    """Minimize ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x == b_eq``, ``x >= 0``."""
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    n_struct = n + m_ub  # original variables plus slacks

    A = np.zeros((m, n_struct))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    b = np.concatenate([b_ub, b_eq])
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1

    if max_pivots is None:
        max_pivots = 50 * (m + n_struct + 1)
    budget = [max_pivots]

    # phase 1: one artificial per row
    A1 = np.hstack([A, np.eye(m)])
    cost1 = np.concatenate([np.zeros(n_struct), np.ones(m)])
    basis = list(range(n_struct, n_struct + m))
    _, T = _iterate(_tableau(A1, b, cost1, basis), basis, n_struct + m, budget,
                    lambda B: _tableau(A1, b, cost1, B), bounded=True)
    # each artificial still carrying value is the residual of its own row
    for r, j in enumerate(basis):
        if j >= n_struct and T[r, -1] > FEAS_TOL * max(1.0, abs(b[j - n_struct])):
            return LPResult(INFEASIBLE, pivots=max_pivots - budget[0])

    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n_struct:
            row = np.abs(T[r, :n_struct])
            col = int(np.argmax(row))
            if row[col] <= DRIVE_OUT_TOL:
                continue
            _pivot(T, basis, r, col)
        keep.append(r)
    basis = [basis[r] for r in keep]
    A2, b2 = A[keep], b[keep]

    # phase 2
    cost = np.concatenate([c, np.zeros(m_ub)])
    status, T = _iterate(_tableau(A2, b2, cost, basis), basis, n_struct, budget,
                         lambda B: _tableau(A2, b2, cost, B))
    pivots = max_pivots - budget[0]
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, pivots=pivots)
    x = np.zeros(n_struct)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    x = np.maximum(x[:n], 0.0)
    return LPResult(OPTIMAL, x, float(c @ x), pivots)
