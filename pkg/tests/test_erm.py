"""Least-squares, weighted L1, and quantile fits against external oracles.

Three independent routes check the two-stage fit: scipy's HiGHS solver
recomputes the optimal risk, a cvxopt quadratic program recomputes the
minimum-norm tie-break over the optimal slab, and a sorted-list weighted
median handles the d = 0 reduction exactly.
"""

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from truthfit import (
    ConfigurationError,
    ContractViolation,
    DataSet,
    Hyperplane,
    L1Config,
    PhantomTerm,
    QuantileConfig,
    builtin_instance,
    fit_l1erm,
    fit_ols,
    fit_quantile,
    l1_risk,
    quantile_risk,
    rss,
)

try:
    from cvxopt import matrix as cvx_matrix
    from cvxopt import solvers as cvx_solvers

    cvx_solvers.options["show_progress"] = False
    HAVE_CVXOPT = True
except ImportError:  # pragma: no cover
    HAVE_CVXOPT = False


# -- oracles -------------------------------------------------------------------


def scipy_optimal_risk(xbar, rhs, up, lo, drift):
    """Optimal piecewise-linear risk via HiGHS on the residual-split LP."""
    m, p = xbar.shape
    nv = p + 2 * m
    cost = np.zeros(nv)
    cost[p:p + m] = up
    cost[p + m:] = lo
    cost[p - 1] += drift
    a_eq = np.zeros((m, nv))
    a_eq[:, :p] = xbar
    a_eq[:, p:p + m] = np.eye(m)
    a_eq[:, p + m:] = -np.eye(m)
    res = linprog(cost, A_eq=a_eq, b_eq=rhs,
                  bounds=[(None, None)] * p + [(0, None)] * (2 * m),
                  method="highs")
    assert res.status == 0, res.message
    return float(res.fun)


def cvxopt_min_norm(xbar, rhs, up, lo, drift, cap):
    """Smallest-norm coefficient vector subject to risk <= cap, via QP.

    A 1e-9 ridge on the residual-split variables keeps the Hessian strictly
    positive definite (cvxopt is unreliable on singular P); it perturbs the
    minimizer well below the comparison tolerance.  Returns None when the
    interior-point method fails to certify optimality.
    """
    m, p = xbar.shape
    nv = p + 2 * m
    big_p = 2e-9 * np.eye(nv)
    big_p[:p, :p] = 2.0 * np.eye(p)
    g = np.zeros((2 * m + 1, nv))
    g[:m, p:p + m] = -np.eye(m)
    g[m:2 * m, p + m:] = -np.eye(m)
    g[2 * m, p:p + m] = up
    g[2 * m, p + m:] = lo
    g[2 * m, p - 1] += drift
    h = np.zeros(2 * m + 1)
    h[2 * m] = cap
    a = np.zeros((m, nv))
    a[:, :p] = xbar
    a[:, p:p + m] = np.eye(m)
    a[:, p + m:] = -np.eye(m)
    opts = {"show_progress": False, "abstol": 1e-10, "reltol": 1e-10,
            "feastol": 1e-9, "maxiters": 200}
    sol = cvx_solvers.qp(cvx_matrix(big_p), cvx_matrix(np.zeros(nv)),
                         cvx_matrix(g), cvx_matrix(h),
                         cvx_matrix(a), cvx_matrix(np.asarray(rhs, dtype=float)),
                         options=opts)
    if sol["status"] != "optimal":
        return None
    return np.asarray(sol["x"]).ravel()[:p]


def weighted_median_interval(values, weights):
    """[lo, hi] interval of minimizers of sum w |v - beta| (integer weights)."""
    pairs = sorted(zip(values, weights))
    total = float(sum(weights))
    cum = 0.0
    lo = None
    for v, w in pairs:
        cum += w
        if 2.0 * cum >= total:
            lo = v
            break
    cum = 0.0
    hi = None
    for v, w in reversed(pairs):
        cum += w
        if 2.0 * cum >= total:
            hi = v
            break
    return lo, hi


def l1_instances(draw, max_d=2):
    n = draw(st.integers(min_value=1, max_value=7))
    d = draw(st.integers(min_value=0, max_value=max_d))
    xs = np.array(
        draw(st.lists(st.tuples(*[st.integers(-5, 5)] * d), min_size=n, max_size=n)),
        dtype=float,
    ).reshape(n, d)
    # half-integer y's provoke plenty of exact ties
    ys = np.array(draw(st.lists(st.integers(-10, 10), min_size=n, max_size=n))) / 2.0
    weights = tuple(draw(st.lists(st.integers(1, 3), min_size=n, max_size=n)))
    return DataSet(xs, ys), L1Config(weights=weights)


l1_cases = st.composite(l1_instances)


# -- stage 1: optimal risk matches scipy ----------------------------------------


@given(l1_cases())
@settings(max_examples=120, deadline=None)
def test_l1_risk_is_globally_optimal(case):
    data, cfg = case
    h = fit_l1erm(data, cfg)
    ours = l1_risk(data, cfg, h)
    w = np.asarray(cfg.weights, dtype=float)
    ref = scipy_optimal_risk(data.xbar(), data.ys, w, w, 0.0)
    assert ours <= ref + 1e-7 * (1.0 + abs(ref))
    assert ours >= ref - 1e-7 * (1.0 + abs(ref))


@given(l1_cases(), st.floats(min_value=0.05, max_value=0.95))
@settings(max_examples=100, deadline=None)
def test_quantile_risk_is_globally_optimal(case, q):
    data, _ = case
    cfg = QuantileConfig(q)
    h = fit_quantile(data, cfg)
    ours = quantile_risk(data, cfg, h)
    up = np.full(data.n, q)
    lo = np.full(data.n, 1.0 - q)
    ref = scipy_optimal_risk(data.xbar(), data.ys, up, lo, 0.0)
    assert ours == pytest.approx(ref, rel=1e-7, abs=1e-7)


@given(l1_cases(), st.data())
@settings(max_examples=100, deadline=None)
def test_fit_beats_random_alternatives(case, rnd):
    data, cfg = case
    h = fit_l1erm(data, cfg)
    base = l1_risk(data, cfg, h)
    seed = rnd.draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    for _ in range(20):
        other = Hyperplane(h.beta1 + rng.normal(0, 1, data.d),
                           h.beta0 + rng.normal())
        # the tie-break slab lets the fit sit up to 1e-9*(1+r*) above the
        # exact optimum, so the alternative gets a slightly wider cushion
        assert l1_risk(data, cfg, other) >= base - 3e-9 * (1.0 + abs(base))


# -- stage 2: minimum-norm tie-break against the QP oracle ----------------------


@pytest.mark.skipif(not HAVE_CVXOPT, reason="cvxopt not installed")
@given(l1_cases())
@settings(max_examples=60, deadline=None)
def test_l1_tie_break_matches_qp_oracle(case):
    data, cfg = case
    h = fit_l1erm(data, cfg)
    w = np.asarray(cfg.weights, dtype=float)
    rstar = scipy_optimal_risk(data.xbar(), data.ys, w, w, 0.0)
    cap = rstar + 1e-9 * (1.0 + abs(rstar))
    ref = cvxopt_min_norm(data.xbar(), data.ys, w, w, 0.0, cap)
    assume(ref is not None)
    npt.assert_allclose(h.coefficients(), ref, atol=2e-4)


@pytest.mark.skipif(not HAVE_CVXOPT, reason="cvxopt not installed")
@given(l1_cases(), st.floats(min_value=0.1, max_value=0.9))
@settings(max_examples=40, deadline=None)
def test_quantile_tie_break_matches_qp_oracle(case, q):
    data, _ = case
    cfg = QuantileConfig(q)
    h = fit_quantile(data, cfg)
    up = np.full(data.n, q)
    lo = np.full(data.n, 1.0 - q)
    rstar = scipy_optimal_risk(data.xbar(), data.ys, up, lo, 0.0)
    cap = rstar + 1e-9 * (1.0 + abs(rstar))
    ref = cvxopt_min_norm(data.xbar(), data.ys, up, lo, 0.0, cap)
    assume(ref is not None)
    npt.assert_allclose(h.coefficients(), ref, atol=2e-4)


def test_single_point_returns_projection_of_origin():
    # among all lines through one point, the smallest-norm coefficients are
    # the projection onto the constraint beta1*x + beta0 = y
    h = fit_l1erm(DataSet(np.array([[2.0]]), np.array([3.0])))
    npt.assert_allclose(h.coefficients(), 3.0 / 5.0 * np.array([2.0, 1.0]), atol=1e-9)
    h2 = fit_l1erm(DataSet(np.array([[1.0, 2.0]]), np.array([6.0])))
    npt.assert_allclose(h2.coefficients(), np.array([1.0, 2.0, 1.0]), atol=1e-9)


# -- d = 0 reduction: exact weighted medians -------------------------------------


@given(
    st.lists(st.integers(-20, 20), min_size=1, max_size=15),
    st.data(),
)
@settings(max_examples=200, deadline=None)
def test_d0_equals_clamped_weighted_median_exactly(values, rnd):
    weights = rnd.draw(
        st.lists(st.integers(1, 4), min_size=len(values), max_size=len(values))
    )
    data = DataSet(np.empty((len(values), 0)), np.array(values, dtype=float))
    h = fit_l1erm(data, L1Config(weights=tuple(weights)))
    lo, hi = weighted_median_interval([float(v) for v in values], weights)
    expected = min(max(0.0, lo), hi)
    assert h.beta0 == expected  # bit-exact
    assert h.beta1.size == 0


@given(
    st.lists(st.integers(-20, 20), min_size=1, max_size=10),
    st.lists(st.integers(-20, 20), min_size=0, max_size=5),
)
@settings(max_examples=150, deadline=None)
def test_d0_phantoms_pool_into_the_median(values, targets):
    data = DataSet(np.empty((len(values), 0)), np.array(values, dtype=float))
    cfg = L1Config(phantoms=tuple(PhantomTerm(np.array([]), float(t)) for t in targets))
    h = fit_l1erm(data, cfg)
    pool = [float(v) for v in values] + [float(t) for t in targets]
    lo, hi = weighted_median_interval(pool, [1] * len(pool))
    assert h.beta0 == min(max(0.0, lo), hi)


@given(
    st.lists(st.integers(-20, 20), min_size=2, max_size=10),
    st.integers(min_value=-3, max_value=3),
)
@settings(max_examples=150, deadline=None)
def test_d0_drift_acts_like_mass_at_infinity(values, drift):
    assume(abs(drift) < len(values))
    data = DataSet(np.empty((len(values), 0)), np.array(values, dtype=float))
    h = fit_l1erm(data, L1Config(drift=float(drift)))
    # drift k is the finite form of k unit phantoms at -infinity (k > 0)
    # or |k| at +infinity (k < 0)
    anchor = -1e30 if drift > 0 else 1e30
    pool = [float(v) for v in values] + [anchor] * abs(drift)
    w = [1] * len(pool)
    lo, hi = weighted_median_interval(pool, w)
    assert h.beta0 == min(max(0.0, lo), hi)


def test_drift_exceeding_total_weight_is_unbounded():
    data = DataSet(np.empty((2, 0)), np.array([1.0, 2.0]))
    with pytest.raises(ConfigurationError):
        fit_l1erm(data, L1Config(drift=3.0))
    with pytest.raises(ConfigurationError):
        fit_l1erm(data, L1Config(drift=-2.5))


# -- equivalences ----------------------------------------------------------------


@given(l1_cases())
@settings(max_examples=80, deadline=None)
def test_quantile_half_equals_l1(case):
    data, _ = case
    a = fit_quantile(data, QuantileConfig(0.5))
    b = fit_l1erm(data)
    npt.assert_allclose(a.coefficients(), b.coefficients(), atol=1e-8)


@given(l1_cases())
@settings(max_examples=80, deadline=None)
def test_integer_weights_equal_row_duplication(case):
    data, cfg = case
    weighted = fit_l1erm(data, cfg)
    xs = np.repeat(data.xs, cfg.weights, axis=0)
    ys = np.repeat(data.ys, cfg.weights)
    duplicated = fit_l1erm(DataSet(xs, ys))
    npt.assert_allclose(weighted.coefficients(), duplicated.coefficients(), atol=1e-8)


def test_unit_phantom_equals_extra_row():
    data = DataSet(np.array([[0.0], [1.0], [3.0]]), np.array([0.0, 2.0, 1.0]))
    cfg = L1Config(phantoms=(PhantomTerm(np.array([2.0]), 5.0),))
    with_phantom = fit_l1erm(data, cfg)
    augmented = DataSet(np.array([[0.0], [1.0], [3.0], [2.0]]),
                        np.array([0.0, 2.0, 1.0, 5.0]))
    npt.assert_allclose(with_phantom.coefficients(),
                        fit_l1erm(augmented).coefficients(), atol=1e-10)


# -- pinned lines ------------------------------------------------------------------


def test_quantile_builtin_truthful_line_is_frozen():
    inst = builtin_instance("quantile04")
    h = fit_quantile(inst.data, inst.mechanism.params)
    npt.assert_allclose(
        h.coefficients(), [0.5518672199170125, -6.0929460580912895], atol=1e-12
    )


def test_quantile_builtin_documented_misreport_does_not_move_the_fit():
    # the documented overstatement keeps the reporting agent above the line,
    # which adds a constant to the risk on that region and leaves the
    # minimizer untouched
    inst = builtin_instance("quantile04")
    truthful = fit_quantile(inst.data, inst.mechanism.params)
    deviated = fit_quantile(
        inst.data.with_reports({inst.deviator: inst.misreport}),
        inst.mechanism.params,
    )
    npt.assert_allclose(truthful.coefficients(), deviated.coefficients(), atol=1e-9)


# -- least squares ------------------------------------------------------------------


def test_ols_matches_polyfit():
    rng = np.random.default_rng(5)
    xs = rng.uniform(-5, 5, 12)
    ys = 2.0 * xs - 1.0 + rng.normal(0, 0.3, 12)
    h = fit_ols(DataSet(xs.reshape(-1, 1), ys))
    ref = np.polyfit(xs, ys, 1)
    npt.assert_allclose([h.beta1[0], h.beta0], ref, atol=1e-9)


def test_ols_normal_equations_hold_in_d2():
    rng = np.random.default_rng(6)
    data = DataSet(rng.uniform(-3, 3, (20, 2)), rng.normal(0, 1, 20))
    h = fit_ols(data)
    r = data.ys - data.xbar() @ h.coefficients()
    npt.assert_allclose(data.xbar().T @ r, np.zeros(3), atol=1e-9)


def test_ols_rank_deficient_uses_minimum_norm():
    # all agents share one x: any slope fits equally; lstsq returns the
    # minimum-norm coefficient pair
    data = DataSet(np.array([[2.0], [2.0]]), np.array([1.0, 3.0]))
    h = fit_ols(data)
    npt.assert_allclose(h.coefficients(), 2.0 / 5.0 * np.array([2.0, 1.0]), atol=1e-12)


# -- configuration validation ---------------------------------------------------------


def test_config_validation():
    data = DataSet(np.array([[0.0], [1.0]]), np.array([0.0, 1.0]))
    with pytest.raises(ContractViolation):
        fit_l1erm(data, L1Config(weights=(1.0,)))
    with pytest.raises(ConfigurationError):
        L1Config(weights=(1.0, 0.0))
    with pytest.raises(ConfigurationError):
        L1Config(weights=(1.0, -2.0))
    with pytest.raises(ConfigurationError):
        L1Config(drift=np.inf)
    with pytest.raises(ConfigurationError):
        QuantileConfig(0.0)
    with pytest.raises(ConfigurationError):
        QuantileConfig(1.0)
    with pytest.raises(ConfigurationError):
        PhantomTerm(np.array([1.0]), np.inf)
    with pytest.raises(ConfigurationError):
        PhantomTerm(np.array([1.0]), 0.0, weight=0.0)
    with pytest.raises(ConfigurationError):
        PhantomTerm(np.array([np.nan]), 0.0)
    with pytest.raises(ContractViolation):
        fit_l1erm(data, L1Config(phantoms=(PhantomTerm(np.array([0.0, 1.0]), 0.0),)))


def test_risk_formulas_by_hand():
    data = DataSet(np.array([[0.0], [2.0]]), np.array([1.0, -1.0]))
    h = Hyperplane(np.array([0.0]), 0.0)
    assert l1_risk(data, L1Config(weights=(2.0, 3.0)), h) == pytest.approx(5.0)
    assert quantile_risk(data, QuantileConfig(0.25), h) == pytest.approx(
        0.25 * 1.0 + 0.75 * 1.0
    )
    cfg = L1Config(phantoms=(PhantomTerm(np.array([1.0]), 4.0, weight=2.0),),
                   drift=0.5)
    # residual terms |1-0| + |-1-0|, phantom 2*|4-0|, drift 0.5*0
    assert l1_risk(data, cfg, h) == pytest.approx(1.0 + 1.0 + 8.0)
    assert rss(data, h) == pytest.approx(2.0)
