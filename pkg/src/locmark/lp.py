"""Two-phase dense tableau simplex with Bland's rule.

Works over ``Fraction`` (exact, zero tolerance) or ``float``. Problems here
are tiny (tens of variables), so clarity wins over speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

FLOAT_TOL = 1e-11


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list | None
    value: object | None


def _pivot(t, r, c):
    t[r] = t[r] / t[r, c]
    for i in range(t.shape[0]):
        if i != r and t[i, c] != 0:
            t[i] = t[i] - t[i, c] * t[r]


def _run(t, basis, allowed, tol):
    """Minimize the objective stored in the last row; columns ``allowed`` may enter."""
    m = t.shape[0] - 1
    while True:
        enter = None
        for j in allowed:
            if t[m, j] < -tol:
                enter = j
                break
        if enter is None:
            return "optimal"
        best = None
        leave = None
        for i in range(m):
            a = t[i, enter]
            if a > tol:
                ratio = t[i, -1] / a
                if best is None or ratio < best - tol or (abs(ratio - best) <= tol and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            return "unbounded"
        _pivot(t, leave, enter)
        basis[leave] = enter


def solve(c, a_eq, b_eq, exact: bool = False) -> LPResult:
    """Minimize ``c @ x`` subject to ``a_eq @ x == b_eq`` and ``x >= 0``."""
    num = Fraction if exact else float
    tol = 0 if exact else FLOAT_TOL
    dtype = object if exact else float
    a = np.array([[num(v) for v in row] for row in a_eq], dtype=dtype)
    b = np.array([num(v) for v in b_eq], dtype=dtype)
    m, n = a.shape
    for i in range(m):
        if b[i] < 0:
            a[i] = -a[i]
            b[i] = -b[i]
    zero, one = num(0), num(1)
    t = np.full((m + 1, n + m + 1), zero, dtype=dtype)
    t[:m, :n] = a
    for i in range(m):
        t[i, n + i] = one
    t[:m, -1] = b
    # phase 1 objective: sum of artificials, priced out
    for j in range(n + m + 1):
        t[m, j] = -sum((t[i, j] for i in range(m)), zero)
    for i in range(m):
        t[m, n + i] = zero
    basis = [n + i for i in range(m)]
    _run(t, basis, range(n), tol)
    infeas = -t[m, -1]
    feas_tol = 0 if exact else 1e-10
    if infeas > feas_tol:
        return LPResult("infeasible", None, None)
    # drive artificials out of the basis; drop redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if abs(t[i, j]) > tol), None)
            if col is None:
                continue
            _pivot(t, i, col)
            basis[i] = col
        keep.append(i)
    rows = [t[i, list(range(n)) + [n + m]] for i in keep]
    t2 = np.full((len(keep) + 1, n + 1), zero, dtype=dtype)
    for k, row in enumerate(rows):
        t2[k] = row
    basis2 = [basis[i] for i in keep]
    cost = [num(v) for v in c]
    for j in range(n):
        t2[-1, j] = cost[j]
    for k, bj in enumerate(basis2):
        if t2[-1, bj] != 0:
            t2[-1] = t2[-1] - t2[-1, bj] * t2[k]
    status = _run(t2, basis2, range(n), tol)
    if status == "unbounded":
        return LPResult("unbounded", None, None)
    x = [zero] * n
    for k, bj in enumerate(basis2):
        x[bj] = t2[k, -1]
    if not exact:
        x = [max(float(v), 0.0) for v in x]
    value = sum((cost[j] * x[j] for j in range(n)), zero)
    return LPResult("optimal", x, value)
