"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Problems in this package are tiny (tens of variables), so a dense
textbook tableau beats anything asymptotically clever and, with Bland's
pivoting rule, terminates without cycling.  The interface mirrors the
common ``linprog`` shape:

    minimize    c . x
    subject to  a_ub @ x <= b_ub
                a_eq @ x == b_eq
                lo_j <= x_j <= hi_j

Bounds default to free variables (None on both ends); callers always
state bounds explicitly at the call sites that need them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalInconsistency

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def _as_matrix(a, ncols):
    if a is None:
        return np.zeros((0, ncols))
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return a


def solve_lp(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None, bounds=None,
             tol: float = 1e-9, max_iter: int | None = None) -> LpResult:
    """Solve the LP above; status is "optimal", "infeasible" or "unbounded"."""
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    a_ub = _as_matrix(a_ub, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    a_eq = _as_matrix(a_eq, n)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if bounds is None:
        bounds = [(None, None)] * n

    # --- translate to standard form: min cs.z  s.t.  A z = b, z >= 0 ------
    # Each original variable contributes one or two standard columns plus a
    # constant offset:  x_j = offset_j + sum_k M[j, k] z_k.
    cols = []          # (orig_index, sign) per standard column
    offsets = np.zeros(n)
    extra_rows = []    # (std_col_index, rhs) for two-sided bounds
    for j, (lo, hi) in enumerate(bounds):
        if lo is None and hi is None:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
        elif lo is not None and hi is None:
            offsets[j] = lo
            cols.append((j, 1.0))
        elif lo is None and hi is not None:
            offsets[j] = hi
            cols.append((j, -1.0))
        else:
            if hi < lo:
                return LpResult(INFEASIBLE)
            offsets[j] = lo
            extra_rows.append((len(cols), hi - lo))
            cols.append((j, 1.0))

    ns = len(cols)
    trans = np.zeros((n, ns))
    for k, (j, sign) in enumerate(cols):
        trans[j, k] = sign

    a_ub_s = a_ub @ trans
    b_ub_s = b_ub - a_ub @ offsets
    a_eq_s = a_eq @ trans
    b_eq_s = b_eq - a_eq @ offsets
    for col, rhs in extra_rows:
        row = np.zeros(ns)
        row[col] = 1.0
        a_ub_s = np.vstack([a_ub_s, row])
        b_ub_s = np.append(b_ub_s, rhs)

    n_slack = a_ub_s.shape[0]
    big_a = np.block([
        [a_ub_s, np.eye(n_slack)],
        [a_eq_s, np.zeros((a_eq_s.shape[0], n_slack))],
    ]) if n_slack + a_eq_s.shape[0] > 0 else np.zeros((0, ns))
    big_b = np.concatenate([b_ub_s, b_eq_s])
    c_std = np.concatenate([c @ trans, np.zeros(n_slack)])

    m, total = big_a.shape
    if m == 0:
        # Unconstrained: bounded only if the (bound-reduced) cost is zero.
        if np.any(np.abs(c_std) > tol):
            return LpResult(UNBOUNDED)
        x = offsets.copy()
        return LpResult(OPTIMAL, x, float(c @ x))

    neg = big_b < 0
    big_a[neg] *= -1.0
    big_b[neg] *= -1.0

    # --- phase 1: artificial basis ----------------------------------------
    tableau = np.hstack([big_a, np.eye(m), big_b.reshape(-1, 1)])
    basis = list(range(total, total + m))
    cost1 = np.concatenate([np.zeros(total), np.ones(m)])
    if max_iter is None:
        max_iter = 200 * (m + total + 10)

    _pivot_until_optimal(tableau, basis, cost1, ncols=total + m,
                         tol=tol, max_iter=max_iter)
    infeas = sum(tableau[i, -1] for i, b in enumerate(basis) if b >= total)
    if infeas > 1e-8 * (1.0 + float(np.abs(big_b).sum())):
        return LpResult(INFEASIBLE)

    # Drive any remaining artificial variables out of the basis, pivoting on
    # the largest available element for stability.
    drop_rows = []
    for i, b in enumerate(basis):
        if b < total:
            continue
        row = np.abs(tableau[i, :total])
        pivot_col = int(np.argmax(row)) if row.size else 0
        if row.size == 0 or row[pivot_col] <= 1e-9:
            drop_rows.append(i)  # redundant row
        else:
            _pivot(tableau, basis, i, pivot_col)
    if drop_rows:
        keep = [i for i in range(m) if i not in drop_rows]
        tableau = tableau[keep]
        basis = [basis[i] for i in keep]
        m = len(basis)

    # --- phase 2 ------------------------------------------------------------
    tableau = np.hstack([tableau[:, :total], tableau[:, -1:]])
    cost2 = c_std
    status = _pivot_until_optimal(tableau, basis, cost2, ncols=total,
                                  tol=tol, max_iter=max_iter)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED)

    z = np.zeros(total)
    for i, b in enumerate(basis):
        if b < total:
            z[b] = tableau[i, -1]
    x = offsets + trans @ z[:ns]
    return LpResult(OPTIMAL, x, float(c @ x))


def _pivot(tableau, basis, row, col):
    tableau[row] /= tableau[row, col]
    piv = tableau[:, col].copy()
    piv[row] = 0.0
    tableau -= np.outer(piv, tableau[row])
    basis[row] = col


def _pivot_until_optimal(tableau, basis, cost, ncols, tol, max_iter):
    """Run Bland-rule pivots in place until optimal or unbounded."""
    for _ in range(max_iter):
        cb = cost[basis]
        reduced = cost[:ncols] - cb @ tableau[:, :ncols]
        entering = None
        for j in range(ncols):  # Bland: lowest eligible index
            if reduced[j] < -tol and j not in basis:
                entering = j
                break
        if entering is None:
            return OPTIMAL
        col = tableau[:, entering]
        rows = np.where(col > 1e-10)[0]
        if rows.size == 0:
            return UNBOUNDED
        # Two-pass ratio test: allow a 1e-9 feasibility slack so that among
        # near-minimal ratios we can pivot on a large element instead of a
        # barely-eligible one (tiny pivots amplify round-off by 1/|pivot|).
        rhs = np.maximum(tableau[rows, -1], 0.0)
        theta = np.min((rhs + 1e-9) / col[rows])
        candidates = rows[rhs / col[rows] <= theta]
        piv = col[candidates]
        solid = candidates[piv >= 0.5 * piv.max()]
        leave = min(solid, key=lambda i: basis[i])
        _pivot(tableau, basis, leave, entering)
    raise InternalInconsistency("simplex failed to terminate within iteration cap")
