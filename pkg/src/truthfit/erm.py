"""Empirical risk minimization mechanisms: least squares, weighted L1, quantile.

The L1 and quantile fits run in two stages.  Stage 1 minimizes the
piecewise-linear risk by LP (residuals split into positive and negative
parts).  Stage 2 resolves ties by picking, among all risk minimizers, the
coefficient vector of smallest Euclidean norm; this strictly convex
tie-break is what makes the L1 mechanism group strategyproof, so it is
computed exactly rather than left to whatever vertex the solver happens
to return.  The minimizer set is the polyhedron { beta : risk(beta) <=
r* + 1e-9 (1 + |r*|) }; a minimum-norm-point search over it (linear
minimization oracle + corrective steps over the current corral) finds the
tie-broken optimum, with a cheap subgradient interiority test skipping
the search whenever the stage-1 vertex is already provably unique.

Regularizers are restricted to the phantom family: absolute-value terms
|target - f(anchor)| with positive weights, plus one linear drift
coefficient multiplying the intercept (the finite encoding of phantom
terms whose target sits at +-infinity).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataSet, Hyperplane
from .errors import ConfigurationError, ContractViolation, InternalInconsistency
from .simplex import INFEASIBLE, UNBOUNDED, solve_lp


def fit_ols(data: DataSet) -> Hyperplane:
    """Least squares fit; rank-deficient designs get the minimum-norm solution."""
    beta, *_ = np.linalg.lstsq(data.xbar(), data.ys, rcond=None)
    return Hyperplane(beta[:-1], float(beta[-1]))


@dataclass(frozen=True)
class PhantomTerm:
    """One regularizer summand weight * |target - f(anchor)|."""

    anchor: np.ndarray
    target: float
    weight: float = 1.0

    def __post_init__(self):
        anchor = np.asarray(self.anchor, dtype=float).ravel()
        if not np.isfinite(anchor).all():
            raise ConfigurationError("phantom anchors must be finite")
        if not np.isfinite(self.target):
            raise ConfigurationError(
                "infinite phantom targets are encoded by the drift coefficient"
            )
        if not self.weight > 0:
            raise ConfigurationError("phantom weights must be positive")
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "target", float(self.target))
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True)
class L1Config:
    """Per-agent weights, phantom terms, and intercept drift.

    ``drift`` adds drift * beta0 to the risk: each phantom pinned at
    -infinity contributes +1 to it, each at +infinity contributes -1.
    Weights default to 1 and must be positive.
    """

    weights: tuple[float, ...] | None = None
    phantoms: tuple[PhantomTerm, ...] = ()
    drift: float = 0.0

    def __post_init__(self):
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if any(not np.isfinite(v) or v <= 0 for v in w):
                raise ConfigurationError("weights must be positive and finite")
            object.__setattr__(self, "weights", w)
        object.__setattr__(self, "phantoms", tuple(self.phantoms))
        if not np.isfinite(self.drift):
            raise ConfigurationError("drift must be finite")
        object.__setattr__(self, "drift", float(self.drift))


@dataclass(frozen=True)
class QuantileConfig:
    """Risk weight q on points on or above the line, 1-q below; 0 < q < 1."""

    q: float

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ConfigurationError("q must lie strictly between 0 and 1")
        object.__setattr__(self, "q", float(self.q))


class _PiecewiseLinearFit:
    """Shared machinery behind the L1 and quantile fits.

    Rows are the n data rows followed by the phantom rows.  Row i carries
    an asymmetric absolute-value cost: up_w on positive residuals, lo_w on
    negative ones (equal for plain L1).  ``drift`` multiplies beta0.
    """

    def __init__(self, xbar, rhs, up_w, lo_w, drift):
        self.xbar = np.asarray(xbar, dtype=float)
        self.rhs = np.asarray(rhs, dtype=float)
        self.up_w = np.asarray(up_w, dtype=float)
        self.lo_w = np.asarray(lo_w, dtype=float)
        self.drift = float(drift)
        self.m, self.p = self.xbar.shape
        self.scale = 1.0 + float(np.max(np.abs(self.rhs), initial=0.0))

    def risk(self, beta) -> float:
        r = self.rhs - self.xbar @ beta
        return float(self.up_w @ np.maximum(r, 0.0)
                     + self.lo_w @ np.maximum(-r, 0.0)
                     + self.drift * beta[-1])

    def _lp(self, extra_cost_beta=None, risk_cap=None, box=None):
        """LP over (beta, u, v): u - v = rhs - xbar @ beta, u, v >= 0."""
        p, m = self.p, self.m
        nvars = p + 2 * m
        cost = np.zeros(nvars)
        cost[p:p + m] = self.up_w
        cost[p + m:] = self.lo_w
        cost[p - 1] += self.drift
        a_eq = np.zeros((m, nvars))
        a_eq[:, :p] = self.xbar
        a_eq[:, p:p + m] = np.eye(m)
        a_eq[:, p + m:] = -np.eye(m)
        b_eq = self.rhs
        a_ub = b_ub = None
        objective = cost
        bounds = [(None, None)] * p + [(0.0, None)] * (2 * m)
        if risk_cap is not None:
            a_ub = cost.reshape(1, -1)
            b_ub = np.array([risk_cap])
            objective = np.zeros(nvars)
            objective[:p] = extra_cost_beta
            if box is None:
                box = 1e6 * (1.0 + self.scale)
            bounds = [(-box, box)] * p + [(0.0, None)] * (2 * m)
        return solve_lp(objective, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq,
                        bounds=bounds)

    def stage1(self) -> tuple[np.ndarray, float]:
        res = self._lp()
        if res.status == UNBOUNDED:
            raise ConfigurationError(
                "risk is unbounded below; the drift coefficient exceeds the "
                "total absolute weight available to oppose it"
            )
        if res.status == INFEASIBLE:
            raise InternalInconsistency("residual-splitting LP cannot be infeasible")
        beta = res.x[:self.p]
        return beta, self.risk(beta)

    # -- stage 2: minimum-norm point of the optimal face --------------------

    def _zero_rows(self, beta):
        r = self.rhs - self.xbar @ beta
        return np.flatnonzero(np.abs(r) <= 1e-9 * self.scale)

    def _provably_unique(self, beta) -> np.ndarray | None:
        """Interpolation snap when the optimum is provably unique.

        With exactly p zero-residual rows whose positions are independent,
        the optimum is unique iff the subgradient certificate sits strictly
        inside its box; then the exact interpolation through those rows is
        returned.
        """
        zeros = self._zero_rows(beta)
        if zeros.size != self.p:
            return None
        mat = self.xbar[zeros]
        if np.linalg.cond(mat) > 1e10:
            return None
        r = self.rhs - self.xbar @ beta
        tau_fixed = np.where(r > 0, self.up_w, -self.lo_w)
        tau_fixed[zeros] = 0.0
        g = -self.xbar.T @ tau_fixed
        g[-1] += self.drift
        tau_z = np.linalg.solve(mat.T, g)
        lo = -self.lo_w[zeros]
        hi = self.up_w[zeros]
        margin = 1e-7 * (self.up_w[zeros] + self.lo_w[zeros])
        if np.all(tau_z > lo + margin) and np.all(tau_z < hi - margin):
            return np.linalg.solve(mat, self.rhs[zeros])
        return None

    def _min_norm_over_face(self, beta, rstar) -> np.ndarray:
        eps = 1e-9 * (1.0 + abs(rstar))
        cap = rstar + eps
        # The minimum-norm point has norm at most ||beta||, so a tight box
        # keeps the oracle's vertices small and the corral well conditioned
        # even when the optimal face is unbounded.
        box = 10.0 * (1.0 + float(np.max(np.abs(beta))))

        def lmo(direction):
            res = self._lp(extra_cost_beta=direction, risk_cap=cap, box=box)
            if not res.ok:
                raise InternalInconsistency(
                    f"face linear-minimization oracle returned {res.status}"
                )
            return res.x[:self.p]

        # Vertices of the eps-thickened face wobble at the solver-tolerance
        # scale, so oracle answers within a comfortable multiple of it are
        # the same vertex; genuine vertices sit at data scale, far apart.
        return _min_norm_point(lmo, beta,
                               same_tol=3e-8 * (1.0 + float(np.max(np.abs(beta)))))

    def _snap(self, beta, rstar):
        """Pull beta onto the exact interpolation of its near-zero rows.

        Only applied when the interpolation is consistent, stays within the
        optimal-face tolerance and moves beta by a rounding-level amount, so
        it cannot change which face point was selected -- it just removes
        solver dust from coefficients that are exactly determined.
        """
        r = self.rhs - self.xbar @ beta
        active = np.flatnonzero(np.abs(r) <= 1e-7 * self.scale)
        if active.size < self.p:
            return beta
        mat = self.xbar[active]
        # Solve a square independent-row subsystem exactly; SVD-based
        # least squares leaves rounding dust even on consistent systems.
        sel: list[int] = []
        for i in range(active.size):
            trial = sel + [i]
            if np.linalg.matrix_rank(mat[trial]) == len(trial):
                sel = trial
            if len(sel) == self.p:
                break
        if len(sel) < self.p:
            return beta
        snapped = np.linalg.solve(mat[sel], self.rhs[active][sel])
        if np.max(np.abs(mat @ snapped - self.rhs[active])) > 1e-12 * self.scale:
            return beta
        if np.max(np.abs(snapped - beta)) > 1e-6 * (1.0 + np.max(np.abs(beta))):
            return beta
        if self.risk(snapped) > rstar + 1e-9 * (1.0 + abs(rstar)):
            return beta
        return snapped

    def fit(self) -> Hyperplane:
        beta, rstar = self.stage1()
        zero = np.zeros(self.p)
        if self.risk(zero) <= rstar + 1e-9 * (1.0 + abs(rstar)):
            # The all-zero vector has the smallest norm of any point, so if
            # it attains the optimal risk it is the exact tie-break winner.
            return Hyperplane(zero[:-1], 0.0)
        unique = self._provably_unique(beta)
        if unique is not None:
            beta = unique
        else:
            beta = self._min_norm_over_face(beta, rstar)
            beta = self._snap(beta, rstar)
        return Hyperplane(beta[:-1], float(beta[-1]))


def _min_norm_point(lmo, start, max_iter=200, same_tol=1e-13):
    """Minimum-norm point of a polytope given by a linear-minimization oracle.

    Maintains a corral of oracle points and its convex coefficients;
    alternates oracle calls with corrective steps that re-solve the
    affine minimum-norm problem over the corral and retreat along the
    segment when coefficients leave the simplex.
    """
    x = np.asarray(start, dtype=float).copy()
    corral = [x.copy()]
    seen = [x.copy()]  # every oracle answer, surviving corral retreats
    lam = np.array([1.0])
    for _ in range(max_iter):
        s = lmo(x)
        gap = float(x @ x - x @ s)
        if gap <= 1e-12 * (1.0 + float(x @ x)):
            return x
        if any(np.max(np.abs(s - p)) <= same_tol for p in seen):
            return x  # oracle cannot improve further at this tolerance
        corral.append(np.asarray(s, dtype=float))
        seen.append(np.asarray(s, dtype=float))
        lam = np.append(lam, 0.0)
        while True:
            v = np.stack(corral, axis=1)
            alpha = _affine_min_norm_coeffs(v)
            if np.all(alpha >= -1e-12):
                lam = np.clip(alpha, 0.0, None)
                lam /= lam.sum()
                x = v @ lam
                break
            shrink = lam - alpha
            steps = np.where(shrink > 1e-15, lam / shrink, np.inf)
            theta = float(np.min(steps))
            lam = lam + theta * (alpha - lam)
            keep = lam > 1e-12
            if keep.sum() == 0:
                keep[int(np.argmax(lam))] = True
            corral = [c for c, k in zip(corral, keep) if k]
            lam = lam[keep]
            lam /= lam.sum()
            x = np.stack(corral, axis=1) @ lam
    raise InternalInconsistency("minimum-norm search failed to converge")


def _affine_min_norm_coeffs(v):
    """argmin ||v @ a||^2 subject to sum(a) = 1 (a may leave the simplex)."""
    k = v.shape[1]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = v.T @ v
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    return sol[:k]


def _build_l1(data: DataSet, cfg: L1Config) -> _PiecewiseLinearFit:
    w = np.ones(data.n) if cfg.weights is None else np.asarray(cfg.weights, dtype=float)
    if w.shape[0] != data.n:
        raise ContractViolation(f"{w.shape[0]} weights for {data.n} agents")
    xbar = data.xbar()
    rhs = data.ys
    if cfg.phantoms:
        rows = []
        targets = []
        pw = []
        for term in cfg.phantoms:
            if term.anchor.shape[0] != data.d:
                raise ContractViolation("phantom anchor dimension mismatch")
            rows.append(np.append(term.anchor, 1.0))
            targets.append(term.target)
            pw.append(term.weight)
        xbar = np.vstack([xbar, np.array(rows)])
        rhs = np.concatenate([rhs, np.array(targets)])
        w = np.concatenate([w, np.array(pw)])
    return _PiecewiseLinearFit(xbar, rhs, w, w, cfg.drift)


def fit_l1erm(data: DataSet, cfg: L1Config | None = None) -> Hyperplane:
    """Weighted L1 fit with phantom regularizers and minimum-norm tie-break."""
    return _build_l1(data, cfg or L1Config()).fit()


def l1_risk(data: DataSet, cfg: L1Config, h: Hyperplane) -> float:
    """The regularized weighted absolute risk of a hyperplane."""
    return _build_l1(data, cfg).risk(h.coefficients())


def fit_quantile(data: DataSet, cfg: QuantileConfig) -> Hyperplane:
    """Quantile fit: weight q above the line, 1-q below, same tie-break."""
    xbar = data.xbar()
    up = np.full(data.n, cfg.q)
    lo = np.full(data.n, 1.0 - cfg.q)
    return _PiecewiseLinearFit(xbar, data.ys, up, lo, 0.0).fit()


def quantile_risk(data: DataSet, cfg: QuantileConfig, h: Hyperplane) -> float:
    r = data.ys - (data.xs @ h.beta1 + h.beta0)
    return float(cfg.q * np.maximum(r, 0.0).sum()
                 + (1.0 - cfg.q) * np.maximum(-r, 0.0).sum())
