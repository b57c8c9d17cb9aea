"""Four mirror-descent solver loops with m-weighted averaging, plus the
theoretical bound evaluators and stopping criteria they are tested against.

Every solver returns the weighted average

    x_hat = (sum_k gamma_k^{-m})^{-1} * sum_k gamma_k^{-m} * x^k

over the iterates it is allowed to average: all iterates for the
unconstrained solvers, productive iterates only for the constrained ones.
m = 0 gives the plain running mean, m = -1 weights by gamma_k itself, and
larger m shifts weight toward late iterates when steps shrink.

Solvers run any schedule, including the adaptive ones with no monotonicity
guarantee. The bound evaluators, by contrast, verify the non-increasing
hypothesis of the averaging theorem and refuse sequences that break it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import (
    FeasibleSet,
    ProxSetup,
    Regularizer,
    composite_mirror_step,
    mirror_step,
)
from .problems import AffineConstraints
from .schedules import ScheduleState, StationarySignal, is_nonincreasing_guaranteed
from .space import as_point, dual_norm_kind, norm

__all__ = [
    "SAFETY_CAP",
    "NoProductiveSteps",
    "StopReason",
    "RunConfig",
    "WeightedAverager",
    "Trace",
    "SolveResult",
    "mirror_descent",
    "mirror_c_descent",
    "constrained_md",
    "constrained_md_multi",
    "bound_main",
    "bound_corollaries",
    "bound_composite",
    "iteration_estimate",
    "ConstrainedBoundDiagnostic",
    "constrained_bound_diagnostic",
    "productive_inequality_sides",
]

# hard ceiling on criterion-driven runs so a desk-scale experiment cannot
# spin forever on an unreachable epsilon
SAFETY_CAP = 10_000_000


class NoProductiveSteps(RuntimeError):
    """A constrained run finished without one productive step, so there is
    no iterate the averaging theorem allows in the output."""


class StopReason(enum.Enum):
    MAX_ITERS = "MaxIters"
    EPSILON_CRITERION = "EpsilonCriterion"
    STATIONARY_POINT = "StationaryPoint"


@dataclass
class RunConfig:
    """Run parameters shared by all solvers.

    theta is the user-supplied bound on the Bregman distance from the start
    to the nearest minimizer; for the unit Euclidean ball the diameter gives
    theta = 2. At least one of iters/epsilon must be set; the constrained
    solvers need epsilon and the unconstrained ones need iters.
    """

    m: float
    iters: Optional[int] = None
    epsilon: Optional[float] = None
    theta: float = 2.0
    record_trace: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m >= -1.0):
            raise ValueError("weighting exponent m must be finite and >= -1")
        if self.iters is None and self.epsilon is None:
            raise ValueError("set at least one of iters and epsilon")
        if self.iters is not None and self.iters < 1:
            raise ValueError("iters must be at least 1")
        if self.epsilon is not None and not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if not self.theta > 0.0:
            raise ValueError("theta must be positive")


class WeightedAverager:
    """Running weighted average with weights gamma^{-m}."""

    def __init__(self, n: int, m: float):
        self.m = float(m)
        self.weighted_sum = np.zeros(n)
        self.weight_total = 0.0

    def update(self, x: np.ndarray, gamma: float) -> None:
        if not gamma > 0.0:
            raise ValueError("averaging weight needs gamma > 0")
        w = gamma ** (-self.m)
        self.weighted_sum += w * x
        self.weight_total += w

    @property
    def average(self) -> np.ndarray:
        if not self.weight_total > 0.0:
            raise RuntimeError("average requested before any update")
        return self.weighted_sum / self.weight_total


@dataclass
class Trace:
    """Per-iteration records. Solvers fill the columns that apply to them
    and leave the others empty; every filled column has one entry per
    iteration with k strictly increasing."""

    k: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    f_iterate: list = field(default_factory=list)
    f_avg: list = field(default_factory=list)
    g_iterate: list = field(default_factory=list)
    productive: list = field(default_factory=list)
    l_k: list = field(default_factory=list)
    bound: list = field(default_factory=list)
    constraint_evals: list = field(default_factory=list)

    def rows(self) -> int:
        return len(self.k)


@dataclass
class SolveResult:
    x_hat: np.ndarray
    f_hat: float
    iterations: int
    productive_count: int
    nonproductive_count: int
    stop_reason: StopReason
    trace: Optional[Trace]
    constraint_evals_total: Optional[int] = None


def _finish(avg, x, stop, objective, h=None):
    """Resolve the output point. The averaged point is the theorem's object;
    the only case without one is a stationary stop before the first fold,
    where the current iterate is itself optimal."""
    if avg.weight_total > 0.0:
        x_hat = avg.average
    elif stop is StopReason.STATIONARY_POINT:
        x_hat = np.array(x)
    else:
        raise NoProductiveSteps(
            "run ended with an empty averager and no stationarity certificate"
        )
    f_hat = objective.value(x_hat)
    if h is not None:
        f_hat += h.value(x_hat)
    return x_hat, f_hat


def _averaged_descent(objective, h, prox, feasible, state, config, x1):
    x = as_point(x1)
    if not feasible.contains(x):
        raise ValueError("initial point is not in the feasible set")
    if config.iters is None:
        raise ValueError("unconstrained solvers need config.iters")
    n_iter = min(config.iters, SAFETY_CAP)
    m = config.m
    dual = dual_norm_kind(prox.norm)
    avg = WeightedAverager(x.size, m)
    trace = Trace() if config.record_trace else None
    certified = is_nonincreasing_guaranteed(state.kind)

    wsum = 0.0  # sum of gamma^{-m}
    gsum = 0.0  # sum of ||grad||_*^2 / gamma^{m-1}
    h_term = 0.0  # h(x1) / gamma_1^m, fixed after the first step
    completed = 0
    stop = StopReason.MAX_ITERS
    for k in range(1, n_iter + 1):
        fx = objective.value(x)
        g = objective.subgrad(x)
        gn = norm(g, dual)
        if gn == 0.0:
            stop = StopReason.STATIONARY_POINT
            break
        try:
            gamma = state.step_size(
                k, f_val=fx, grad_dual_norm=gn, f_star=objective.known_fstar
            )
        except StationarySignal:
            stop = StopReason.STATIONARY_POINT
            break
        hv = h.value(x) if h is not None else 0.0
        if k == 1:
            h_term = hv / gamma**m
        avg.update(x, gamma)
        wsum += gamma ** (-m)
        gsum += gn * gn / gamma ** (m - 1.0)
        if trace is not None:
            trace.k.append(k)
            trace.gamma.append(gamma)
            trace.f_iterate.append(fx + hv)
            x_bar = avg.average
            fb = objective.value(x_bar) + (h.value(x_bar) if h is not None else 0.0)
            trace.f_avg.append(fb)
            if certified:
                trace.bound.append(
                    (config.theta / gamma ** (m + 1.0) + h_term + gsum / (2.0 * prox.sigma))
                    / wsum
                )
        if h is None:
            x = mirror_step(prox, feasible, x, g, gamma)
        else:
            x = composite_mirror_step(prox, feasible, x, g, gamma, h)
        completed = k

    x_hat, f_hat = _finish(avg, x, stop, objective, h)
    return SolveResult(
        x_hat=x_hat,
        f_hat=f_hat,
        iterations=completed,
        productive_count=completed,
        nonproductive_count=0,
        stop_reason=stop,
        trace=trace,
    )


def mirror_descent(objective, prox: ProxSetup, feasible: FeasibleSet,
                   state: ScheduleState, config: RunConfig, x1) -> SolveResult:
    """Plain mirror descent: subgradient, step size, mirror step, fold into
    the weighted average. Exits early with StationaryPoint on a zero
    subgradient (the point is optimal)."""
    return _averaged_descent(objective, None, prox, feasible, state, config, x1)


def mirror_c_descent(objective, h: Regularizer, prox: ProxSetup,
                     feasible: FeasibleSet, state: ScheduleState,
                     config: RunConfig, x1) -> SolveResult:
    """Composite mirror descent for F = f + h with h handled inside the
    step. The averaging guarantee for the composite method covers only
    -1 <= m <= 0, so other exponents are rejected."""
    if not -1.0 <= config.m <= 0.0:
        raise ValueError(
            "the composite averaging guarantee covers only -1 <= m <= 0; "
            f"got m={config.m}"
        )
    return _averaged_descent(objective, h, prox, feasible, state, config, x1)


def constrained_md(objective, constraints: AffineConstraints, prox: ProxSetup,
                   feasible: FeasibleSet, state_f: ScheduleState,
                   state_g: ScheduleState, config: RunConfig, x1,
                   use_criterion: bool = True) -> SolveResult:
    """Switching mirror descent for min f subject to g <= 0.

    An iterate with g(x^k) <= epsilon is productive: it takes an f-step
    with the f-schedule and is folded into the average. Otherwise the step
    follows a subgradient of g with the g-schedule and the point is not
    averaged. The run stops when

        eps * sum_{i<=k} gamma_i^{-m}
            >= theta / gamma_k^{m+1}
               + (1/2 sigma) * [ sum_I ||grad f||^2 / gamma_i^{m-1}
                                 + sum_J ||grad g||^2 / gamma_j^{m-1} ]

    holds (all sums over the realized steps, gamma_k the current step), or
    at the iteration cap. ``use_criterion=False`` disables the stopping
    rule for fixed-budget runs that rely on the a-priori iteration
    estimates instead. Output averages productive iterates only.
    """
    x = as_point(x1)
    if not feasible.contains(x):
        raise ValueError("initial point is not in the feasible set")
    if config.epsilon is None:
        raise ValueError("constrained solvers need config.epsilon")
    eps = config.epsilon
    m = config.m
    theta = config.theta
    sigma = prox.sigma
    n_iter = min(config.iters if config.iters is not None else SAFETY_CAP, SAFETY_CAP)
    dual = dual_norm_kind(prox.norm)
    avg = WeightedAverager(x.size, m)
    trace = Trace() if config.record_trace else None

    lhs_w = 0.0  # sum of gamma^{-m} over all steps
    rhs_sq = 0.0  # sum of ||grad||^2 / gamma^{m-1} over all steps
    n_prod = 0
    n_nonprod = 0
    completed = 0
    stop = StopReason.MAX_ITERS
    for k in range(1, n_iter + 1):
        gx = constraints.value(x)
        prod = gx <= eps
        if prod:
            fx = objective.value(x)
            grad = objective.subgrad(x)
            gn = norm(grad, dual)
            if gn == 0.0:
                stop = StopReason.STATIONARY_POINT
                break
            try:
                gamma = state_f.step_size(
                    k, f_val=fx, grad_dual_norm=gn, f_star=objective.known_fstar
                )
            except StationarySignal:
                stop = StopReason.STATIONARY_POINT
                break
            avg.update(x, gamma)
            n_prod += 1
        else:
            grad = constraints.subgrad(x)
            gn = norm(grad, dual)
            if gn == 0.0:
                raise NoProductiveSteps(
                    "constraint subgradient vanished while g > epsilon: the "
                    "epsilon-feasible region is empty"
                )
            gamma = state_g.step_size(k, grad_dual_norm=gn)
            n_nonprod += 1
        lhs_w += gamma ** (-m)
        rhs_sq += gn * gn / gamma ** (m - 1.0)
        completed = k
        if trace is not None:
            trace.k.append(k)
            trace.gamma.append(gamma)
            trace.f_iterate.append(fx if prod else objective.value(x))
            trace.f_avg.append(
                objective.value(avg.average) if avg.weight_total > 0.0 else math.nan
            )
            trace.g_iterate.append(gx)
            trace.productive.append(prod)
            trace.constraint_evals.append(constraints.p)
        if use_criterion and eps * lhs_w >= theta / gamma ** (m + 1.0) + rhs_sq / (
            2.0 * sigma
        ):
            stop = StopReason.EPSILON_CRITERION
            break
        x = mirror_step(prox, feasible, x, grad, gamma)

    if avg.weight_total == 0.0 and stop is StopReason.MAX_ITERS:
        raise NoProductiveSteps(
            f"no iterate satisfied g <= epsilon within {completed} iterations"
        )
    x_hat, f_hat = _finish(avg, x, stop, objective)
    return SolveResult(
        x_hat=x_hat,
        f_hat=f_hat,
        iterations=completed,
        productive_count=n_prod,
        nonproductive_count=n_nonprod,
        stop_reason=stop,
        trace=trace,
        constraint_evals_total=constraints.p * completed,
    )


def constrained_md_multi(objective, constraints: AffineConstraints,
                         prox: ProxSetup, feasible: FeasibleSet,
                         config: RunConfig, x1) -> SolveResult:
    """Switching mirror descent that checks constraints one at a time.

    A step is non-productive as soon as one constraint exceeds epsilon; the
    scan stops there, so non-productive iterations cost q(k) <= p
    evaluations instead of p. Step sizes are built in:

        gamma_k = sqrt(2 sigma) / (L_k sqrt(k)),

    with L_k the dual norm of the current subgradient (of f on productive
    steps, of the violated g_{q(k)} otherwise). Stops when

        eps * sum_{i<=k} (L_i sqrt(i)/sqrt(2 sigma))^m
            >= theta * (M sqrt(k)/sqrt(2 sigma))^{m+1}
               + sqrt(2 sigma)^{-(m+1)} * [ sum_I sqrt(i)^{m-1} ||grad f||^{m+1}
                                            + sum_J sqrt(j)^{m-1} ||grad g_q||^{m+1} ]

    holds, with M = max of the objective and constraint Lipschitz bounds.
    """
    x = as_point(x1)
    if not feasible.contains(x):
        raise ValueError("initial point is not in the feasible set")
    if config.epsilon is None:
        raise ValueError("constrained solvers need config.epsilon")
    eps = config.epsilon
    m = config.m
    theta = config.theta
    sigma = prox.sigma
    n_iter = min(config.iters if config.iters is not None else SAFETY_CAP, SAFETY_CAP)
    dual = dual_norm_kind(prox.norm)
    avg = WeightedAverager(x.size, m)
    trace = Trace() if config.record_trace else None
    root = math.sqrt(2.0 * sigma)
    m_big = max(objective.lipschitz_bound, constraints.lipschitz_bound)

    lhs_w = 0.0
    sum_f = 0.0
    sum_g = 0.0
    evals_total = 0
    n_prod = 0
    n_nonprod = 0
    completed = 0
    stop = StopReason.MAX_ITERS
    for k in range(1, n_iter + 1):
        q, evals, g_seen = constraints.first_violation(x, eps)
        evals_total += evals
        sk = math.sqrt(k)
        prod = q is None
        if prod:
            grad = objective.subgrad(x)
            lk = norm(grad, dual)
            if lk == 0.0:
                stop = StopReason.STATIONARY_POINT
                break
            gamma = root / (lk * sk)
            avg.update(x, gamma)
            n_prod += 1
            sum_f += sk ** (m - 1.0) * lk ** (m + 1.0)
        else:
            grad = constraints.subgrad_one(q, x)
            lk = norm(grad, dual)
            if lk == 0.0:
                raise NoProductiveSteps(
                    f"constraint {q} has a zero subgradient while above epsilon: "
                    "its epsilon-feasible region is empty"
                )
            gamma = root / (lk * sk)
            n_nonprod += 1
            sum_g += sk ** (m - 1.0) * lk ** (m + 1.0)
        lhs_w += (lk * sk / root) ** m
        completed = k
        if trace is not None:
            trace.k.append(k)
            trace.gamma.append(gamma)
            trace.f_iterate.append(objective.value(x))
            trace.f_avg.append(
                objective.value(avg.average) if avg.weight_total > 0.0 else math.nan
            )
            # g(x) is fully known only when the scan saw every constraint
            trace.g_iterate.append(g_seen if prod else math.nan)
            trace.productive.append(prod)
            trace.l_k.append(lk)
            trace.constraint_evals.append(evals)
        rhs = theta * (m_big * sk / root) ** (m + 1.0) + (sum_f + sum_g) / root ** (
            m + 1.0
        )
        if eps * lhs_w >= rhs:
            stop = StopReason.EPSILON_CRITERION
            break
        x = mirror_step(prox, feasible, x, grad, gamma)

    if avg.weight_total == 0.0 and stop is StopReason.MAX_ITERS:
        raise NoProductiveSteps(
            f"no iterate satisfied every constraint within {completed} iterations"
        )
    x_hat, f_hat = _finish(avg, x, stop, objective)
    return SolveResult(
        x_hat=x_hat,
        f_hat=f_hat,
        iterations=completed,
        productive_count=n_prod,
        nonproductive_count=n_nonprod,
        stop_reason=stop,
        trace=trace,
        constraint_evals_total=evals_total,
    )


def _bound_arrays(gammas, grad_dual_norms):
    g = np.asarray(gammas, dtype=np.float64)
    s = np.asarray(grad_dual_norms, dtype=np.float64)
    if g.size == 0:
        raise ValueError("bound evaluation needs at least one step")
    if g.shape != s.shape or g.ndim != 1:
        raise ValueError("step sizes and gradient norms must be 1-D of equal length")
    if not np.all(g > 0.0):
        raise ValueError("step sizes must be positive")
    if np.any(np.diff(g) > 0.0):
        raise ValueError(
            "theorem hypothesis violated: the step-size sequence must be "
            "positive and non-increasing"
        )
    return g, s


def bound_main(m: float, gammas, grad_dual_norms, theta: float, sigma: float) -> float:
    """Averaged-point gap bound along a realized trajectory:

        ( sum gamma_k^{-m} )^{-1} *
            [ theta / gamma_N^{m+1}
              + (1/2 sigma) * sum ||grad f(x^k)||_*^2 / gamma_k^{m-1} ].

    Requires the non-increasing step hypothesis and m >= -1.
    """
    if not m >= -1.0:
        raise ValueError("m must be >= -1")
    g, s = _bound_arrays(gammas, grad_dual_norms)
    w = float(np.sum(g ** (-m)))
    num = theta / g[-1] ** (m + 1.0) + float(np.sum(s * s / g ** (m - 1.0))) / (
        2.0 * sigma
    )
    return num / w


def bound_corollaries(m: float, n_iters: int, lipschitz: float, theta: float,
                      sigma: float) -> float:
    """Closed-form gap bounds for the step rule gamma_k = sqrt(2 sigma)/(M sqrt(k)):

        m = -1   M (theta + 1 + ln N) / (sqrt(sigma) sqrt(N))
        m = 0    M (2 + theta) / sqrt(2 sigma N)
        m >= 1   M (m + 2) (1 + theta) / (2 sqrt(2 sigma) sqrt(N))
    """
    if n_iters < 1:
        raise ValueError("N must be at least 1")
    n = float(n_iters)
    if m == -1.0:
        return lipschitz * (theta + 1.0 + math.log(n)) / (math.sqrt(sigma) * math.sqrt(n))
    if m == 0.0:
        return lipschitz * (2.0 + theta) / math.sqrt(2.0 * sigma * n)
    if m >= 1.0:
        return (
            lipschitz * (m + 2.0) * (1.0 + theta) / (2.0 * math.sqrt(2.0 * sigma) * math.sqrt(n))
        )
    raise ValueError("closed forms exist for m = -1, m = 0, and m >= 1 only")


def bound_composite(m: float, gammas, grad_dual_norms, h_at_x1: float,
                    theta: float, sigma: float) -> float:
    """Composite variant of bound_main: adds h(x^1)/gamma_1^m to the
    numerator. Valid for -1 <= m <= 0 only."""
    if not -1.0 <= m <= 0.0:
        raise ValueError("the composite bound covers only -1 <= m <= 0")
    if h_at_x1 < 0.0:
        raise ValueError("h must be nonnegative")
    g, s = _bound_arrays(gammas, grad_dual_norms)
    w = float(np.sum(g ** (-m)))
    num = (
        theta / g[-1] ** (m + 1.0)
        + h_at_x1 / g[0] ** m
        + float(np.sum(s * s / g ** (m - 1.0))) / (2.0 * sigma)
    )
    return num / w


def iteration_estimate(lipschitz: float, theta1: float, sigma: float,
                       epsilon: float, m: float) -> int:
    """A-priori iteration count sufficient for the constrained solver's
    stopping criterion: ceil(M^2 (1+theta1)^2 / (2 sigma eps^2)) for m >= 1
    and ceil(M^2 (2+theta1)^2 / (2 sigma eps^2)) for m = 0."""
    if not (lipschitz > 0.0 and sigma > 0.0 and epsilon > 0.0):
        raise ValueError("lipschitz, sigma, and epsilon must be positive")
    if not theta1 >= 0.0:
        raise ValueError("theta1 must be nonnegative")
    if m >= 1.0:
        c = (1.0 + theta1) ** 2
    elif m == 0.0:
        c = (2.0 + theta1) ** 2
    else:
        raise ValueError("iteration estimates cover m = 0 and m >= 1 only")
    return math.ceil(lipschitz**2 * c / (2.0 * sigma * epsilon**2))


@dataclass(frozen=True)
class ConstrainedBoundDiagnostic:
    """Both readings of the constrained run's gap bound: the underlying
    inequality carries a term -eps * sum_J (gamma_j^g)^{-m} that its own
    consequences drop; with_slack keeps it, without_slack does not."""

    with_slack: float
    without_slack: float


def constrained_bound_diagnostic(m: float, prod_gammas, prod_grad_norms,
                                 nonprod_gammas, nonprod_grad_norms,
                                 gamma_last: float, theta1: float, sigma: float,
                                 epsilon: float) -> ConstrainedBoundDiagnostic:
    """Evaluate the constrained gap bound along a realized trajectory.

    gamma_last is the step size of the final iteration regardless of phase.
    Inputs are the realized per-phase step and subgradient-norm sequences;
    only the productive weights enter the normalizer.
    """
    gp = np.asarray(prod_gammas, dtype=np.float64)
    sp = np.asarray(prod_grad_norms, dtype=np.float64)
    gq = np.asarray(nonprod_gammas, dtype=np.float64)
    sq = np.asarray(nonprod_grad_norms, dtype=np.float64)
    if gp.size == 0:
        raise ValueError("diagnostic needs at least one productive step")
    if gp.shape != sp.shape or gq.shape != sq.shape:
        raise ValueError("step sizes and gradient norms must pair up")
    if not gamma_last > 0.0:
        raise ValueError("gamma_last must be positive")
    w = float(np.sum(gp ** (-m)))
    num = theta1 / gamma_last ** (m + 1.0)
    num += float(np.sum(sp * sp / gp ** (m - 1.0))) / (2.0 * sigma)
    if gq.size:
        num += float(np.sum(sq * sq / gq ** (m - 1.0))) / (2.0 * sigma)
    without = num / w
    slack = epsilon * float(np.sum(gq ** (-m))) if gq.size else 0.0
    return ConstrainedBoundDiagnostic(
        with_slack=(num - slack) / w, without_slack=without
    )


def productive_inequality_sides(theta: float, m: float, lipschitz: float,
                                epsilon: float, sigma: float,
                                n_iters: int) -> tuple[float, float]:
    """Both sides of the schedule-level inequality behind the a-priori
    iteration estimates:

        lhs = (M/sqrt(2 sigma))^{m+1} * (theta N^{(m+1)/2} + sum_k k^{(m-1)/2})
        rhs = eps * (M/sqrt(2 sigma))^m * sum_k k^{m/2}

    Returns (lhs, rhs) with no claim about which dominates; the estimate is
    meaningful when rhs >= lhs at N.
    """
    if n_iters < 1:
        raise ValueError("N must be at least 1")
    root = math.sqrt(2.0 * sigma)
    ks = np.arange(1, n_iters + 1, dtype=np.float64)
    ratio = lipschitz / root
    lhs = ratio ** (m + 1.0) * (
        theta * float(n_iters) ** ((m + 1.0) / 2.0) + float(np.sum(ks ** ((m - 1.0) / 2.0)))
    )
    rhs = epsilon * ratio**m * float(np.sum(ks ** (m / 2.0)))
    return lhs, rhs
