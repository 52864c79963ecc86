"""Dense two-phase simplex for small linear programs.

Solves::

    minimize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                x >= 0

with Bland's rule for both entering and leaving variables, so it terminates
on degenerate problems. Redundant equality rows are detected at the end of
phase one and dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class LPStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class IterationLimitError(RuntimeError):
    pass


@dataclass
class SimplexResult:
    status: LPStatus
    x: np.ndarray | None
    fun: float | None
    iterations: int


class _Tableau:
    """Rows 0..m-1 are constraints, row m holds reduced costs; last column is the RHS."""

    def __init__(self, T: np.ndarray, basis: list[int], pivot_tol: float):
        self.T = T
        self.basis = basis
        self.pivot_tol = pivot_tol
        self.iterations = 0

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        self.basis[row] = col
        self.iterations += 1

    def run(self, allowed: int, cost_tol: float, max_iter: int) -> LPStatus:
        """Iterate until optimal or unbounded, entering only columns < ``allowed``."""
        T = self.T
        while True:
            if self.iterations >= max_iter:
                raise IterationLimitError(f"simplex exceeded {max_iter} pivots")
            reduced = T[-1, :allowed]
            candidates = np.nonzero(reduced < -cost_tol)[0]
            if candidates.size == 0:
                return LPStatus.OPTIMAL
            col = int(candidates[0])
            column = T[:-1, col]
            rows = np.nonzero(column > self.pivot_tol)[0]
            if rows.size == 0:
                return LPStatus.UNBOUNDED
            ratios = T[rows, -1] / column[rows]
            best = ratios.min()
            tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            row = int(min(tied, key=lambda r: self.basis[r]))
            self.pivot(row, col)


def solve_lp(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    *,
    feas_tol: float = 1e-9,
    cost_tol: float = 1e-11,
    pivot_tol: float = 1e-11,
    max_iter: int = 50_000,
) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if A_ub.shape != (b_ub.size, n) or A_eq.shape != (b_eq.size, n):
        raise ValueError("constraint matrix and right-hand side shapes disagree")

    m_ub, m_eq = b_ub.size, b_eq.size
    m = m_ub + m_eq
    n_struct = n + m_ub  # structural + slack columns

    A = np.zeros((m, n_struct))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # slack can start basic on <= rows with b >= 0; everything else gets an artificial
    needs_art = [i for i in range(m) if i >= m_ub or neg[i]]
    n_art = len(needs_art)
    T = np.zeros((m + 1, n_struct + n_art + 1))
    T[:m, :n_struct] = A
    T[:m, -1] = b
    basis = [n + i if i < m_ub else -1 for i in range(m)]
    for j, i in enumerate(needs_art):
        T[i, n_struct + j] = 1.0
        basis[i] = n_struct + j

    tab = _Tableau(T, basis, pivot_tol)

    if n_art:
        T[-1, n_struct:n_struct + n_art] = 1.0
        for i in needs_art:
            T[-1] -= T[i]
        tab.run(n_struct + n_art, cost_tol, max_iter)
        if -T[-1, -1] > feas_tol * max(1.0, np.abs(b).max(initial=0.0)):
            return SimplexResult(LPStatus.INFEASIBLE, None, None, tab.iterations)
        # drive remaining (zero-level) artificials out of the basis
        keep = []
        for r in range(tab.m):
            if tab.basis[r] >= n_struct:
                row = T[r, :n_struct]
                cols = np.nonzero(np.abs(row) > 1e-9)[0]
                if cols.size == 0:
                    continue  # redundant equality
                tab.pivot(r, int(cols[0]))
            keep.append(r)
        T = np.vstack([T[keep, :n_struct], T[-1:, :n_struct]])
        T = np.hstack([T, np.concatenate([tab.T[keep, -1], [0.0]])[:, None]])
        tab = _Tableau(T, [tab.basis[r] for r in keep], pivot_tol)
        tab.iterations = 0

    # phase two objective row: reduced costs c_j - c_B B^-1 A_j
    T = tab.T
    T[-1, :] = 0.0
    T[-1, :n] = c
    for r, j in enumerate(tab.basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    status = tab.run(n_struct, cost_tol, max_iter)
    if status is LPStatus.UNBOUNDED:
        return SimplexResult(status, None, None, tab.iterations)

    x_full = np.zeros(n_struct)
    for r, j in enumerate(tab.basis):
        x_full[j] = T[r, -1]
    x = np.clip(x_full[:n], 0.0, None)
    return SimplexResult(LPStatus.OPTIMAL, x, float(c @ x), tab.iterations)
