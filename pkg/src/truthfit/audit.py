"""Manipulation audits, influence bounds, and efficiency benchmarks.

An audit probes a mechanism with misreports and reports a violation
certificate when some deviation pays off.  Outcomes are compared under
single-peaked preferences in the true residual: a deviation strictly
benefits an agent when the new prediction is strictly closer to their
true value, or when it crosses to the other side of it (some admissible
preference ranks any cross-side move higher); an agent is forced worse
only by a same-side move strictly away from their value.  Searches are
deterministic given the seed, and evaluation order breaks ties, so equal
seeds yield identical traces.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import DataSet, Hyperplane, predict, rss
from .crm import CrmConfig, fit_crm
from .erm import (
    L1Config,
    QuantileConfig,
    _PiecewiseLinearFit,
    _build_l1,
    fit_ols,
)
from .errors import (
    ConfigurationError,
    ContractViolation,
    InternalInconsistency,
    UnsupportedMechanism,
)
from .grh import _GrhSolver, preset_partition
from .impartial import ImpartialConfig, fit_impartial, generalized_median
from .separability import AgentPartition, is_publicly_separable

DEFAULT_MARGIN = 1e-9


class MechanismKind(Enum):
    OLS = "ols"
    L1ERM = "l1erm"
    QUANTILE = "quantile"
    CRM = "crm"
    GRL = "grl"
    GRH = "grh"
    IMPARTIAL = "impartial"
    GENERALIZED_MEDIAN = "generalized-median"


#: Kinds whose output is guaranteed to interpolate d+1 data points.
_TRAVERSAL_KINDS = {MechanismKind.CRM, MechanismKind.GRL, MechanismKind.GRH}


@dataclass(frozen=True)
class GrlParams:
    """Explicit resistant-line parameters (sets plus ranks)."""

    s: tuple[int, ...]
    sprime: tuple[int, ...]
    k: int
    kprime: int


@dataclass(frozen=True)
class GenMedParams:
    """Phantom multiset for the d = 0 generalized median."""

    phantoms: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "phantoms", tuple(float(v) for v in self.phantoms))


@dataclass(frozen=True)
class MechanismSpec:
    """A mechanism kind plus its configuration object.

    ``traversal_flag`` declares the d+1-point interpolation guarantee that
    influence-bound probing relies on; it defaults by kind and may be
    overridden for wrappers that earn the property another way.
    """

    kind: MechanismKind
    params: object = None
    traversal_flag: bool | None = None

    @property
    def traversal(self) -> bool:
        if self.traversal_flag is not None:
            return self.traversal_flag
        return self.kind in _TRAVERSAL_KINDS

    def bind(self, data: DataSet) -> "BoundMechanism":
        return BoundMechanism(self, data)


class BoundMechanism:
    """Mechanism specialized to fixed public information.

    Validation that depends only on positions and configuration happens
    once here; ``coefficients`` then maps any report vector to the fitted
    (beta1, beta0) without re-checking.
    """

    def __init__(self, spec: MechanismSpec, data: DataSet):
        self.spec = spec
        self.data = data
        self._solve = _make_solver(spec, data)

    def coefficients(self, ys=None) -> np.ndarray:
        ys = self.data.ys if ys is None else np.asarray(ys, dtype=float)
        return self._solve(ys)

    def hyperplane(self, ys=None) -> Hyperplane:
        coeffs = self.coefficients(ys)
        return Hyperplane(coeffs[:-1], float(coeffs[-1]))


def fit_mechanism(spec: MechanismSpec, data: DataSet) -> Hyperplane:
    """One-shot fit of any mechanism kind."""
    return spec.bind(data).hyperplane()


def _make_solver(spec: MechanismSpec, data: DataSet):
    kind, params = spec.kind, spec.params
    if kind is MechanismKind.OLS:
        pinv = np.linalg.pinv(data.xbar())
        return lambda ys: pinv @ ys

    if kind is MechanismKind.L1ERM:
        cfg = params or L1Config()
        template = _build_l1(data, cfg)
        tail = template.rhs[data.n:]

        def solve(ys, template=template, tail=tail, n=data.n):
            prob = _PiecewiseLinearFit(template.xbar, np.concatenate([ys, tail]),
                                       template.up_w, template.lo_w, template.drift)
            h = prob.fit()
            return h.coefficients()

        return solve

    if kind is MechanismKind.QUANTILE:
        if not isinstance(params, QuantileConfig):
            raise ConfigurationError("quantile mechanism needs a QuantileConfig")
        xbar = data.xbar()
        up = np.full(data.n, params.q)
        lo = np.full(data.n, 1.0 - params.q)

        def solve(ys, xbar=xbar, up=up, lo=lo):
            return _PiecewiseLinearFit(xbar, ys, up, lo, 0.0).fit().coefficients()

        return solve

    if kind is MechanismKind.CRM:
        if not isinstance(params, CrmConfig):
            raise ConfigurationError("clockwise-median mechanism needs a CrmConfig")
        fit_crm(data, params)  # surface configuration errors once
        xs = data.xs

        def solve(ys, xs=xs, cfg=params):
            return fit_crm(DataSet(xs, ys), cfg).coefficients()

        return solve

    if kind is MechanismKind.GRL:
        if not isinstance(params, GrlParams):
            raise ConfigurationError("resistant line needs GrlParams")
        if data.d != 1:
            raise ContractViolation("resistant lines require d = 1")
        part = AgentPartition((params.s, params.sprime), (params.k, params.kprime))
        part.validate_against(data)
        xs_s = data.xs[list(params.s), 0]
        xs_sp = data.xs[list(params.sprime), 0]
        if not (xs_s.max() < xs_sp.min() or xs_sp.max() < xs_s.min()):
            raise ContractViolation("S and S' are not separated by a vertical line")
        solver = _GrhSolver(data.xs, part)
        return lambda ys: solver.solve(ys)[0]

    if kind is MechanismKind.GRH:
        if not isinstance(params, AgentPartition):
            raise ConfigurationError("resistant hyperplane needs an AgentPartition")
        params.validate_against(data)
        if not is_publicly_separable(data, params):
            raise ContractViolation(
                "partition is not publicly separable; rejected before solving"
            )
        solver = _GrhSolver(data.xs, params)
        return lambda ys: solver.solve(ys)[0]

    if kind is MechanismKind.IMPARTIAL:
        if not isinstance(params, ImpartialConfig):
            raise ConfigurationError("impartial mechanism needs an ImpartialConfig")
        fit_impartial(data, params)  # validates shapes once
        xs = data.xs

        def solve(ys, xs=xs, cfg=params):
            return fit_impartial(DataSet(xs, ys), cfg).coefficients()

        return solve

    if kind is MechanismKind.GENERALIZED_MEDIAN:
        if not isinstance(params, GenMedParams):
            raise ConfigurationError("generalized median needs GenMedParams")
        if data.d != 0:
            raise ContractViolation("the generalized median is a d = 0 mechanism")
        phantoms = np.asarray(params.phantoms, dtype=float)
        if phantoms.size != data.n + 1:
            raise ConfigurationError(
                f"need exactly {data.n + 1} phantoms for {data.n} agents"
            )

        def solve(ys, phantoms=phantoms):
            med = generalized_median(ys, phantoms)
            if not math.isfinite(med):
                raise ConfigurationError("phantom choice pushes the median to infinity")
            return np.array([med])

        return solve

    raise ConfigurationError(f"unknown mechanism kind {kind!r}")


# --------------------------------------------------------------------------
# improvement semantics


def strictly_better(r_before: float, r_after: float, margin: float = DEFAULT_MARGIN) -> bool:
    """Can some single-peaked preference strictly prefer the new outcome?

    True when the prediction moved strictly closer to the agent's value, or
    jumped to the other side of it (cross-side moves are unordered by the
    preference class, so some admissible preference strictly gains).
    """
    if abs(r_after) < abs(r_before) - margin:
        return True
    crossed = (r_before > margin and r_after < -margin) or \
              (r_before < -margin and r_after > margin)
    return crossed and abs(r_after - r_before) > margin


def forced_worse(r_before: float, r_after: float, margin: float = DEFAULT_MARGIN) -> bool:
    """Does every single-peaked preference rank the new outcome strictly lower?

    Only a same-side move strictly away from the agent's value (or any move
    off an exactly attained value) is unanimously worse.
    """
    if abs(r_before) <= margin:
        return abs(r_after) > margin
    same_side = (r_before > 0) == (r_after > 0) and abs(r_after) > margin
    return same_side and abs(r_after) > abs(r_before) + margin


@dataclass(frozen=True)
class ViolationCertificate:
    """A replayable record of a profitable (coalition) misreport.

    ``before``/``after`` hold the coalition members' true absolute
    residuals under the truthful and deviated fits, in coalition order.
    """

    coalition: tuple[int, ...]
    misreports: dict[int, float]
    before: tuple[float, ...]
    after: tuple[float, ...]
    truthful: Hyperplane
    deviated: Hyperplane

    def __post_init__(self):
        coalition = tuple(int(i) for i in self.coalition)
        if len(coalition) != len(set(coalition)):
            raise ContractViolation("coalition repeats an agent")
        if sorted(coalition) != list(coalition):
            raise ContractViolation("coalition indices must be ascending")
        if set(self.misreports) != set(coalition):
            raise ContractViolation("misreports must cover exactly the coalition")
        if not (len(self.before) == len(self.after) == len(coalition)):
            raise ContractViolation("one before/after residual per member")
        object.__setattr__(self, "coalition", coalition)
        object.__setattr__(self, "misreports",
                           {int(k): float(v) for k, v in self.misreports.items()})
        object.__setattr__(self, "before", tuple(float(v) for v in self.before))
        object.__setattr__(self, "after", tuple(float(v) for v in self.after))


def verify_certificate(spec: MechanismSpec, data: DataSet,
                       cert: ViolationCertificate,
                       margin: float = DEFAULT_MARGIN) -> bool:
    """Replay the certificate: recompute both fits and re-check the gain.

    The stated residuals must reproduce within 1e-12 (absolute plus
    relative) and the improvement conditions must hold as claimed.
    """
    bound = spec.bind(data)
    truthful = bound.hyperplane()
    deviated = bound.hyperplane(data.with_reports(cert.misreports).ys)
    ok = truthful.close_to(cert.truthful, 1e-12) and deviated.close_to(cert.deviated, 1e-12)
    # weak improvement is a componentwise requirement, so it is judged at
    # solver-noise scale regardless of how large a gain the caller demands
    noise = min(margin, DEFAULT_MARGIN)
    strict = False
    for pos, agent in enumerate(cert.coalition):
        x = data.xs[agent]
        r0 = data.ys[agent] - predict(truthful, x)
        r1 = data.ys[agent] - predict(deviated, x)
        for stated, actual in ((cert.before[pos], abs(r0)), (cert.after[pos], abs(r1))):
            if abs(stated - actual) > 1e-12 * (1.0 + abs(actual)):
                ok = False
        if forced_worse(r0, r1, noise):
            ok = False
        strict = strict or strictly_better(r0, r1, margin)
    return ok and strict


# --------------------------------------------------------------------------
# candidate generation


def hyperplanes_through_others(data: DataSet, agent: int) -> np.ndarray:
    """Coefficients of hyperplanes through each (d+1)-subset of other agents.

    Affinely dependent subsets pin no unique hyperplane and are skipped.
    Returns an array of shape (count, d+1); count may be zero.
    """
    others = [j for j in range(data.n) if j != agent]
    combos = list(itertools.combinations(others, data.d + 1))
    if not combos:
        return np.zeros((0, data.d + 1))
    idx = np.array(combos)
    mats = np.ones((idx.shape[0], data.d + 1, data.d + 1))
    mats[:, :, :data.d] = data.xs[idx]
    with np.errstate(all="ignore"):
        conds = np.linalg.cond(mats)
    good = np.isfinite(conds) & (conds < 1e12)
    if not good.any():
        return np.zeros((0, data.d + 1))
    return np.linalg.solve(mats[good], data.ys[idx[good]][..., None])[..., 0]


def default_candidates(data: DataSet, agent: int, grid_points: int = 41) -> list[float]:
    """Misreport candidates: an even grid over the stretched y-range plus the
    predictions at the agent's position of every hyperplane through d+1
    other agents (the values where a resistant mechanism can switch faces)."""
    lo, hi = float(data.ys.min()), float(data.ys.max())
    spread = (hi - lo) or 1.0
    grid = np.linspace(lo - spread, hi + spread, grid_points)
    betas = hyperplanes_through_others(data, agent)
    crossings = betas @ np.append(data.xs[agent], 1.0) if betas.size else []
    merged = list(dict.fromkeys([*map(float, grid), *map(float, crossings)]))
    return merged


# --------------------------------------------------------------------------
# audits


def _chunked(seq, size):
    for start in range(0, len(seq), size):
        yield seq[start:start + size]


def _first_hit(evaluate, items, threads: int):
    """First non-None evaluate(item) in ``items`` order, optionally threaded."""
    if threads <= 1:
        for item in items:
            out = evaluate(item)
            if out is not None:
                return out
        return None
    items = list(items)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for chunk in _chunked(items, 8 * threads):
            for out in pool.map(evaluate, chunk):
                if out is not None:
                    return out
    return None


def audit_sp(spec: MechanismSpec, data: DataSet, agent: int,
             candidates=None, margin: float = DEFAULT_MARGIN,
             threads: int = 1) -> ViolationCertificate | None:
    """Search one agent's misreports for a strictly profitable deviation.

    Candidates default to :func:`default_candidates`.  Returns the first
    certificate in candidate order, or None.  Probes where the mechanism
    itself becomes undefined (degenerate-tie errors) are skipped: they
    witness degeneracy, not manipulation.
    """
    if not 0 <= agent < data.n:
        raise ContractViolation(f"agent index {agent} out of range")
    bound = spec.bind(data)
    truthful = bound.hyperplane()
    x_agent = data.xs[agent]
    y_true = float(data.ys[agent])
    r0 = y_true - predict(truthful, x_agent)
    if candidates is None:
        candidates = default_candidates(data, agent)

    def evaluate(cand: float):
        cand = float(cand)
        if cand == y_true:
            return None
        ys2 = data.ys.copy()
        ys2[agent] = cand
        try:
            deviated = bound.hyperplane(ys2)
        except InternalInconsistency:
            return None
        r1 = y_true - predict(deviated, x_agent)
        if strictly_better(r0, r1, margin):
            return ViolationCertificate(
                coalition=(agent,), misreports={agent: cand},
                before=(abs(r0),), after=(abs(r1),),
                truthful=truthful, deviated=deviated,
            )
        return None

    return _first_hit(evaluate, list(candidates), threads)


def audit_gsp(spec: MechanismSpec, data: DataSet, max_coalition: int,
              candidates_per_agent: int = 41, seed: int = 0,
              margin: float = DEFAULT_MARGIN, max_evals: int | None = None,
              coalition_samples: int = 64,
              threads: int = 1) -> ViolationCertificate | None:
    """Coalition misreport search: weak improvement for all, strict for one.

    ``margin`` is the strict-gain threshold; the no-member-worse condition
    is always judged at solver-noise scale (never looser than the default
    margin).  Singleton coalitions are searched exhaustively first
    (identical to :func:`audit_sp` over the same candidate lists).  Larger coalitions are
    enumerated exhaustively for n <= 8 and sampled otherwise; each agent's
    candidate list is the default grid-plus-crossings set extended with the
    other agents' reported values.  When ``max_evals`` caps the budget, the
    joint-report product of each larger coalition is sampled with the given
    seed instead of fully enumerated.  Deterministic for fixed arguments.
    """
    n = data.n
    if not 1 <= max_coalition <= n:
        raise ContractViolation(f"max_coalition must lie in 1..{n}")
    bound = spec.bind(data)
    truthful = bound.hyperplane()
    xbar = data.xbar()
    preds0 = xbar @ truthful.coefficients()
    r0_all = data.ys - preds0
    # a member counting as "not worse off" is a componentwise requirement:
    # judge it at solver-noise scale even when the caller raises ``margin``
    # to demand a larger strict gain, or a real (if small) sacrifice by one
    # member would masquerade as indifference and fake a certificate
    noise = min(margin, DEFAULT_MARGIN)

    cand_lists: list[list[float]] = []
    for i in range(n):
        base = default_candidates(data, i, candidates_per_agent)
        peers = [float(v) for j, v in enumerate(data.ys) if j != i]
        cand_lists.append(list(dict.fromkeys([*base, *peers])))

    def try_joint(coalition: tuple[int, ...], reports) -> ViolationCertificate | None:
        members = list(coalition)
        ys2 = data.ys.copy()
        ys2[members] = reports
        if np.all(ys2[members] == data.ys[members]):
            return None
        try:
            coeffs = bound.coefficients(ys2)
        except InternalInconsistency:
            return None
        preds1 = xbar[members] @ coeffs
        r1 = data.ys[members] - preds1
        r0 = r0_all[members]
        strict = False
        for b, a in zip(r0, r1):
            if forced_worse(b, a, noise):
                return None
            strict = strict or strictly_better(b, a, margin)
        if not strict:
            return None
        deviated = Hyperplane(coeffs[:-1], float(coeffs[-1]))
        return ViolationCertificate(
            coalition=coalition,
            misreports={m: float(v) for m, v in zip(members, reports)},
            before=tuple(abs(v) for v in r0),
            after=tuple(abs(v) for v in r1),
            truthful=truthful, deviated=deviated,
        )

    # exhaustive singleton pass
    for agent in range(n):
        cert = _first_hit(
            lambda cand, agent=agent: try_joint((agent,), [cand]),
            cand_lists[agent], threads,
        )
        if cert is not None:
            return cert

    rng = np.random.default_rng(seed)
    for size in range(2, max_coalition + 1):
        if n <= 8:
            coalitions = list(itertools.combinations(range(n), size))
        else:
            count = min(coalition_samples, math.comb(n, size))
            seen: set[tuple[int, ...]] = set()
            while len(seen) < count:
                pick = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
                seen.add(pick)
            coalitions = sorted(seen)
        budget = None if max_evals is None else max(1, max_evals // max(1, len(coalitions)))
        for coalition in coalitions:
            lists = [cand_lists[i] for i in coalition]
            total = math.prod(len(lst) for lst in lists)
            if budget is None or total <= budget:
                joints = itertools.product(*lists)
            else:
                picks = [rng.integers(0, len(lst), size=budget) for lst in lists]
                joints = (tuple(lst[p[k]] for lst, p in zip(lists, picks))
                          for k in range(budget))
            cert = _first_hit(lambda rep, c=coalition: try_joint(c, list(rep)),
                              list(joints), threads)
            if cert is not None:
                return cert
    return None


# --------------------------------------------------------------------------
# influence bounds


@dataclass(frozen=True)
class InfluenceBounds:
    """Constants l <= h with the agent's prediction equal to med(y, l, h)."""

    lower: float
    upper: float

    def __post_init__(self):
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ContractViolation("bounds must be extended reals")
        if self.lower > self.upper:
            raise ContractViolation("lower bound exceeds upper bound")

    def clamp(self, y: float) -> float:
        """med(y, lower, upper) without arithmetic on infinities."""
        return float(min(max(y, self.lower), self.upper))


def influence_bounds(spec: MechanismSpec, data: DataSet, agent: int) -> InfluenceBounds:
    """Probe the envelope of one agent's influence on their own prediction.

    Requires the mechanism's interpolation guarantee (traversal flag): the
    prediction at the agent then moves inside the interval spanned by the
    hyperplanes through d+1 other agents.  Probing one unit beyond that
    interval on each side reveals whether the prediction tracks the report
    (no bound) or pins to a constant (the bound).
    """
    if not spec.traversal:
        raise UnsupportedMechanism(
            "influence bounds need the d+1-point interpolation guarantee"
        )
    if not 0 <= agent < data.n:
        raise ContractViolation(f"agent index {agent} out of range")
    if data.n - 1 < data.d + 1:
        raise ContractViolation(
            f"need at least {data.d + 1} other agents, have {data.n - 1}"
        )
    betas = hyperplanes_through_others(data, agent)
    if betas.shape[0] == 0:
        raise ContractViolation(
            "all (d+1)-subsets of the other agents are affinely dependent"
        )
    x_aug = np.append(data.xs[agent], 1.0)
    anchors = betas @ x_aug
    bound = spec.bind(data)

    def probe(report: float) -> float:
        ys2 = data.ys.copy()
        ys2[agent] = report
        return float(bound.coefficients(ys2) @ x_aug)

    low_probe = float(anchors.min()) - 1.0
    high_probe = float(anchors.max()) + 1.0
    v_low = probe(low_probe)
    v_high = probe(high_probe)
    lower = -math.inf if abs(v_low - low_probe) <= 1e-9 * (1.0 + abs(low_probe)) else v_low
    upper = math.inf if abs(v_high - high_probe) <= 1e-9 * (1.0 + abs(high_probe)) else v_high
    return InfluenceBounds(lower, upper)


# --------------------------------------------------------------------------
# efficiency


def efficiency_ratio(spec: MechanismSpec, data: DataSet) -> float:
    """Squared-loss ratio of the mechanism against the least-squares optimum.

    Returns +inf when least squares is exact but the mechanism is not, and
    1 when both are exact.
    """
    mech_rss = rss(data, fit_mechanism(spec, data))
    ols_rss = rss(data, fit_ols(data))
    zero = (1e-12 * (1.0 + float(np.max(np.abs(data.ys))))) ** 2 * data.n
    if ols_rss <= zero:
        return 1.0 if mech_rss <= zero else math.inf
    return mech_rss / ols_rss


def constrained_least_squares(data: DataSet, position, value: float) -> Hyperplane:
    """Least squares among hyperplanes pinned to pass through (position, value)."""
    a = data.xbar()
    g = np.append(np.asarray(position, dtype=float).ravel(), 1.0)
    if g.shape[0] != data.d + 1:
        raise ContractViolation("position dimension mismatch")
    k = data.d + 1
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = 2.0 * a.T @ a
    kkt[:k, k] = g
    kkt[k, :k] = g
    rhs = np.append(2.0 * a.T @ data.ys, float(value))
    sol = np.linalg.solve(kkt, rhs)
    return Hyperplane(sol[:data.d], float(sol[data.d]))


@dataclass(frozen=True)
class LowerBoundDiagnostics:
    """Numbers behind the two-fold efficiency floor for interpolating SP fits."""

    n: int
    x_extra: float
    t_value: float          # must equal 1 at the constructed x_extra
    probe: float            # the report/height h the checks are run at
    ols_rss: float          # unconstrained least-squares risk, = probe^2 / 2
    constrained_rss: float  # best risk through (x_extra, probe), = probe^2
    ratio: float            # constrained / unconstrained, = 2


def lowerbound_instance(n: int, probe: float = 1.0) -> tuple[DataSet, LowerBoundDiagnostics]:
    """The hard instance: agents at x = 1..n with value 0 plus one at x = X.

    X is the larger root of 6X^2 - 6(n+1)X + (1+3n+2n^2) - (n^3-n)/2 = 0,
    placed so that forcing the fit through (X, h) exactly doubles the
    achievable squared loss relative to the unconstrained optimum h^2/2.
    """
    if n < 3:
        raise ContractViolation("the construction needs n >= 3")
    b = -6.0 * (n + 1)
    c0 = (1.0 + 3.0 * n + 2.0 * n ** 2) - (n ** 3 - n) / 2.0
    disc = b * b - 24.0 * c0
    x_extra = (-b + math.sqrt(disc)) / 12.0
    t_value = (n ** 3 - n) / (
        2.0 * (1.0 + 3.0 * n + 2.0 * n ** 2
               + 6.0 * x_extra ** 2 - 6.0 * x_extra * n - 6.0 * x_extra)
    )
    xs = np.array([[float(i)] for i in range(1, n + 1)] + [[x_extra]])
    ys = np.concatenate([np.zeros(n), [float(probe)]])
    data = DataSet(xs, ys)
    ols_rss = rss(data, fit_ols(data))
    constrained = constrained_least_squares(data, [x_extra], probe)
    constrained_rss = rss(data, constrained)
    diag = LowerBoundDiagnostics(
        n=n, x_extra=float(x_extra), t_value=float(t_value), probe=float(probe),
        ols_rss=float(ols_rss), constrained_rss=float(constrained_rss),
        ratio=float(constrained_rss / ols_rss) if ols_rss > 0 else math.inf,
    )
    return data, diag


# --------------------------------------------------------------------------
# built-in counterexample instances


@dataclass(frozen=True)
class BuiltinInstance:
    """A named data set, its mechanism, and the documented deviation."""

    name: str
    data: DataSet
    mechanism: MechanismSpec
    deviator: int
    misreport: float
    reference_lines: dict[str, tuple[float, float]]
    notes: str = ""


_CRM_DISJOINT_POINTS = [
    (0.0, 1.0), (1.0, 0.0), (2.0, 2.0), (3.0, 1.0), (4.0, 3.0), (5.0, 1.9),
]

_CRM_SUBSET_POINTS = [
    (3.0, 12.0), (4.0, 8.0), (4.3, 12.0), (7.0, 6.5), (8.0, 7.5),
    (9.0, 9.5), (11.0, 9.0), (12.0, 11.0), (13.0, 4.5), (14.0, 11.0),
]

_QUANTILE04_POINTS = [
    (-79.3, -45.8), (-77.3, 89.5), (-74.8, -87.4), (-58.5, 14.3),
    (-33.2, -28.4), (-31.5, 5.2), (-8.0, -73.1), (-1.7, -52.8),
    (10.0, 88.6), (13.0, 13.3), (13.9, 7.4), (15.4, 39.4),
    (18.5, -2.0), (23.0, 6.6), (23.8, -33.0), (24.2, -60.3),
    (26.0, 49.5), (39.5, 49.5), (45.3, 88.9), (71.2, 33.2),
]


def _points_to_data(points) -> DataSet:
    xs = np.array([[p[0]] for p in points])
    ys = np.array([p[1] for p in points])
    return DataSet(xs, ys)


def builtin_instance(name: str) -> BuiltinInstance:
    """Named instances: "crm-disjoint", "crm-subset", "quantile04"."""
    if name == "crm-disjoint":
        return BuiltinInstance(
            name=name,
            data=_points_to_data(_CRM_DISJOINT_POINTS),
            mechanism=MechanismSpec(MechanismKind.CRM,
                                    CrmConfig(s=(1, 3, 5), sprime=(0, 2, 4))),
            deviator=4,
            misreport=1.8,
            reference_lines={
                "truthful": (0.0, 1.0),
                "deviated": (0.1, 1.4),
            },
            notes="Disjoint base/target sets; the agent at x=4 understates "
                  "to pull the line toward itself.",
        )
    if name == "crm-subset":
        return BuiltinInstance(
            name=name,
            data=_points_to_data(_CRM_SUBSET_POINTS),
            mechanism=MechanismSpec(
                MechanismKind.CRM,
                CrmConfig(s=(0, 5, 6, 8, 9), sprime=tuple(range(10))),
            ),
            deviator=7,
            misreport=0.0,
            reference_lines={
                "figure_truthful": (0.5, 3.5),
                "text_truthful": (2.0 / 3.0, 8.0 / 3.0),
                "figure_deviated": (7.0 / 12.0, 17.0 / 6.0),
            },
            notes="S is a subset of S'; the published text and figure "
                  "disagree on the truthful line, so both are recorded.",
        )
    if name == "quantile04":
        return BuiltinInstance(
            name=name,
            data=_points_to_data(_QUANTILE04_POINTS),
            mechanism=MechanismSpec(MechanismKind.QUANTILE, QuantileConfig(0.4)),
            deviator=10,
            misreport=2000.0,
            reference_lines={
                "figure_truthful": (0.5518, -6.0929),
                "figure_deviated": (0.5249, -4.1742),
            },
            notes="Quantile risk with q != 1/2; a gross overstatement drags "
                  "the fit toward the deviator's true value.",
        )
    raise ContractViolation(f"unknown builtin instance {name!r}")


def brown_mood_spec(data: DataSet) -> MechanismSpec:
    """Resistant line over the x-halves with median ranks."""
    part = preset_partition(data, "brown-mood")
    return MechanismSpec(MechanismKind.GRH, part)


def tukey_spec(data: DataSet) -> MechanismSpec:
    """Resistant line over the outer x-thirds with median ranks."""
    part = preset_partition(data, "tukey")
    return MechanismSpec(MechanismKind.GRH, part)
