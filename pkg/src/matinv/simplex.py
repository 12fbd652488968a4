"""Two-phase tableau simplex with Bland's anti-cycling rule.

Solves   maximize c.x   s.t.  A x <= b,  lo <= x <= hi
with finite bounds. Small and dense on purpose: the LPs in this
package have a handful of variables and a few dozen rows.
"""

import numpy as np

_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LpResult:
    def __init__(self, status, x=None, value=None):
        self.status = status
        self.x = x
        self.value = value


def _pivot(tableau, basis, row, col):
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]
    basis[row] = col


def _run(tableau, basis, obj, eligible, max_iter=20000):
    m = tableau.shape[0]
    for _ in range(max_iter):
        reduced = obj - obj[basis] @ tableau[:, :-1]
        enter = -1
        for j in range(len(obj)):  # Bland: smallest eligible index
            if eligible[j] and reduced[j] > _TOL:
                enter = j
                break
        if enter < 0:
            return OPTIMAL
        leave = -1
        best = np.inf
        for i in range(m):
            a = tableau[i, enter]
            if a > _TOL:
                ratio = tableau[i, -1] / a
                if ratio < best - 1e-12 or (
                        abs(ratio - best) <= 1e-12
                        and (leave < 0 or basis[i] < basis[leave])):
                    best = ratio
                    leave = i
        if leave < 0:
            return UNBOUNDED
        _pivot(tableau, basis, leave, enter)
    raise RuntimeError("simplex iteration cap exceeded")


def solve_lp(c, a_ub, b_ub, bounds):
    """Maximize c.x subject to a_ub x <= b_ub and finite box bounds."""
    c = np.asarray(c, dtype=float)
    a_ub = np.asarray(a_ub, dtype=float).reshape(-1, c.size)
    b_ub = np.asarray(b_ub, dtype=float).ravel()
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(hi >= lo)):
        raise ValueError("bounds must be finite with hi >= lo")
    n = c.size
    # shift to z = x - lo >= 0; append rows z_i <= hi_i - lo_i
    rows = np.vstack([a_ub, np.eye(n)])
    rhs = np.concatenate([b_ub - a_ub @ lo, hi - lo])
    m = rows.shape[0]
    flip = rhs < 0
    rows = np.where(flip[:, None], -rows, rows)
    slack_sign = np.where(flip, -1.0, 1.0)
    rhs = np.abs(rhs)
    art_rows = np.flatnonzero(flip)
    k = art_rows.size
    ncols = n + m + k
    tableau = np.zeros((m, ncols + 1))
    tableau[:, :n] = rows
    tableau[np.arange(m), n + np.arange(m)] = slack_sign
    basis = np.empty(m, dtype=int)
    basis[:] = n + np.arange(m)
    for a_i, r in enumerate(art_rows):
        tableau[r, n + m + a_i] = 1.0
        basis[r] = n + m + a_i
    tableau[:, -1] = rhs
    eligible = np.ones(ncols, dtype=bool)

    if k:
        obj1 = np.zeros(ncols)
        obj1[n + m:] = -1.0
        status = _run(tableau, basis, obj1, eligible)
        value1 = obj1[basis] @ tableau[:, -1]
        if status != OPTIMAL or value1 < -1e-7:
            return LpResult(INFEASIBLE)
        # drive leftover (degenerate) artificials out of the basis
        for i in range(m):
            if basis[i] >= n + m:
                for j in range(n + m):
                    if abs(tableau[i, j]) > _TOL:
                        _pivot(tableau, basis, i, j)
                        break
        eligible[n + m:] = False

    obj2 = np.zeros(ncols)
    obj2[:n] = c
    status = _run(tableau, basis, obj2, eligible)
    if status != OPTIMAL:
        return LpResult(status)
    z = np.zeros(ncols)
    z[basis] = tableau[:, -1]
    x = z[:n] + lo
    return LpResult(OPTIMAL, x=x, value=float(c @ x))
