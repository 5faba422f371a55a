"""A small dense linear-program solver (two-phase simplex, Bland's rule).

Problem form: maximize ``c @ x`` subject to equality rows ``a @ x == b``,
inequality rows ``a @ x <= b``, and per-variable lower bounds that are
either 0 or -inf (free).  Sizes here are tiny (tens of variables), so a
dense tableau with Bland's anti-cycling rule is the robust choice; rows
are scaled to unit sup-norm before solving and all tolerances below are
absolute on the scaled data.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DomainError, NonterminationError

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
MAX_PIVOTS = 10 ** 6
SIZE_CAP = 10 ** 4


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LinearProgram:
    """Dense LP data: maximize ``objective @ x``.

    ``eq_rows`` and ``ineq_rows`` are sequences of ``(coefficients, rhs)``
    pairs meaning ``a @ x == b`` and ``a @ x <= b``.  ``lower_bounds``
    gives each variable's lower bound, one of ``0.0`` or ``-inf``
    (default: all zero).
    """

    def __init__(self, objective, eq_rows=(), ineq_rows=(), lower_bounds=None):
        self.objective = np.asarray(objective, dtype=float)
        if self.objective.ndim != 1 or self.objective.size == 0:
            raise DomainError("objective must be a nonempty vector")
        n = self.objective.size
        self.eq_rows = tuple(
            (np.asarray(a, dtype=float), float(b)) for a, b in eq_rows
        )
        self.ineq_rows = tuple(
            (np.asarray(a, dtype=float), float(b)) for a, b in ineq_rows
        )
        for a, b in self.eq_rows + self.ineq_rows:
            if a.shape != (n,):
                raise DomainError("constraint row length must match objective")
            if not (np.all(np.isfinite(a)) and np.isfinite(b)):
                raise DomainError("constraint coefficients must be finite")
        if not np.all(np.isfinite(self.objective)):
            raise DomainError("objective coefficients must be finite")
        if lower_bounds is None:
            self.lower_bounds = np.zeros(n)
        else:
            self.lower_bounds = np.asarray(lower_bounds, dtype=float)
            if self.lower_bounds.shape != (n,):
                raise DomainError("lower_bounds length must match objective")
            ok = (self.lower_bounds == 0.0) | np.isneginf(self.lower_bounds)
            if not np.all(ok):
                raise DomainError("lower bounds must be 0 or -inf")
        m = len(self.eq_rows) + len(self.ineq_rows)
        if n > SIZE_CAP or m > SIZE_CAP:
            raise BudgetError(
                f"dense solver is guarded at {SIZE_CAP} variables/constraints"
            )

    @property
    def num_vars(self) -> int:
        return self.objective.size


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    value: float | None = None
    point: np.ndarray | None = None


class _Tableau:
    """Simplex tableau with Bland's rule; shared pivot budget."""

    def __init__(self, T, basis, num_struct):
        self.T = T                  # rows: constraints then objective (z - c)
        self.basis = basis          # basic column index per constraint row
        self.num_struct = num_struct
        self.pivots = 0

    def pivot(self, row, col):
        T = self.T
        T[row] /= T[row, col]
        for i in range(T.shape[0]):
            if i != row and T[i, col] != 0.0:
                T[i] -= T[i, col] * T[row]
        self.basis[row] = col
        self.pivots += 1
        if self.pivots > MAX_PIVOTS:
            raise NonterminationError("simplex exceeded the pivot cap")

    def run(self, allowed_cols) -> bool:
        """Iterate to optimality over ``allowed_cols``.

        Returns False if an unbounded ray was found.
        """
        T = self.T
        m = T.shape[0] - 1
        while True:
            red = T[-1, allowed_cols]
            neg = np.nonzero(red < -PIVOT_TOL)[0]
            if neg.size == 0:
                return True
            col = int(allowed_cols[neg[0]])   # Bland: smallest eligible index
            column = T[:m, col]
            rows = np.nonzero(column > PIVOT_TOL)[0]
            if rows.size == 0:
                return False
            ratios = T[rows, -1] / column[rows]
            best = np.min(ratios)
            ties = rows[ratios <= best + PIVOT_TOL]
            row = int(ties[np.argmin(self.basis[ties])])  # Bland on leaving
            self.pivot(row, col)


def solve_lp(program: LinearProgram) -> LpOutcome:
    """Solve with a two-phase dense simplex.

    Phase one installs an artificial variable on every row (equalities
    included) and drives their sum to zero; phase two optimizes the
    original objective over the structural columns.  Bland's rule makes
    the pivot sequence, and hence the outcome, deterministic.
    """
    n = program.num_vars
    free = np.isneginf(program.lower_bounds)

    # Structural columns: one per variable, plus a negated copy per free
    # variable so every structural unknown is nonnegative.
    minus_col = {}
    num_struct = n
    for j in range(n):
        if free[j]:
            minus_col[j] = num_struct
            num_struct += 1

    rows = [(a, b, True) for a, b in program.eq_rows]
    rows += [(a, b, False) for a, b in program.ineq_rows]
    m = len(rows)

    num_slack = sum(1 for _, _, is_eq in rows if not is_eq)
    total = num_struct + num_slack + m  # structural + slacks + artificials
    T = np.zeros((m + 1, total + 1))
    basis = np.empty(m, dtype=int)

    slack_at = num_struct
    art_at = num_struct + num_slack
    for i, (a, b, is_eq) in enumerate(rows):
        scale = max(1.0, float(np.max(np.abs(a))), abs(b))
        coef = a / scale
        rhs = b / scale
        row = np.zeros(total + 1)
        row[:n] = coef
        for j, col in minus_col.items():
            row[col] = -coef[j]
        slack_sign = 1.0
        if rhs < 0.0:
            row[:total] *= -1.0
            rhs = -rhs
            slack_sign = -1.0
        if not is_eq:
            row[slack_at] = slack_sign
            slack_at += 1
        row[art_at + i] = 1.0
        row[-1] = rhs
        T[i] = row
        basis[i] = art_at + i

    # Phase 1: maximize -(sum of artificials). With the artificial basis,
    # the reduced-cost row is minus the column sums of the constraint rows.
    T[-1, :] = -np.sum(T[:m, :], axis=0)
    T[-1, art_at:art_at + m] = 0.0

    tab = _Tableau(T, basis, num_struct)
    phase1_cols = np.arange(num_struct + num_slack)
    tab.run(phase1_cols)
    infeasibility = -T[-1, -1]
    if infeasibility > FEAS_TOL:
        return LpOutcome(LpStatus.INFEASIBLE)

    # Drive any leftover basic artificials out, dropping redundant rows.
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if tab.basis[i] >= art_at:
            candidates = np.nonzero(
                np.abs(T[i, : num_struct + num_slack]) > PIVOT_TOL
            )[0]
            if candidates.size:
                tab.pivot(i, int(candidates[0]))
            else:
                keep[i] = False
    if not np.all(keep):
        T = np.vstack([T[:m][keep], T[-1:]])
        basis = tab.basis[keep]
        m = int(np.sum(keep))
        tab = _Tableau(T, basis, num_struct)

    # Phase 2: original objective on structural columns only.
    c_std = np.zeros(total)
    c_std[:n] = program.objective
    for j, col in minus_col.items():
        c_std[col] = -program.objective[j]
    c_basis = c_std[tab.basis]
    T[-1, :-1] = (c_basis @ T[:m, :-1]) - c_std
    T[-1, -1] = c_basis @ T[:m, -1]

    # Artificial columns stay out of the candidate set, so they never
    # re-enter the basis.
    bounded = tab.run(phase1_cols)
    if not bounded:
        return LpOutcome(LpStatus.UNBOUNDED)

    values = np.zeros(total)
    values[tab.basis] = T[:m, -1]
    x = values[:n].copy()
    for j, col in minus_col.items():
        x[j] -= values[col]

    _check_feasible(program, x)
    return LpOutcome(LpStatus.OPTIMAL, float(program.objective @ x), x)


def _check_feasible(program: LinearProgram, x: np.ndarray) -> None:
    """Defensive post-check: the reported point satisfies every scaled row."""
    for a, b in program.eq_rows:
        scale = max(1.0, float(np.max(np.abs(a))), abs(b))
        if abs(a @ x - b) / scale > 10 * FEAS_TOL:
            raise ArithmeticError("simplex produced an infeasible point (eq)")
    for a, b in program.ineq_rows:
        scale = max(1.0, float(np.max(np.abs(a))), abs(b))
        if (a @ x - b) / scale > 10 * FEAS_TOL:
            raise ArithmeticError("simplex produced an infeasible point (ineq)")
    bounded = program.lower_bounds == 0.0
    if np.any(x[bounded] < -10 * FEAS_TOL):
        raise ArithmeticError("simplex produced an infeasible point (bound)")
