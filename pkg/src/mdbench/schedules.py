"""Step-size rules for subgradient-type methods.

Nine named rules. Each produces gamma_k from the iteration counter and, for
the adaptive rules, the current objective value and dual norm of the current
subgradient. ``is_nonincreasing_guaranteed`` marks the rules whose step
sequence is non-increasing for every input stream; only those runs carry
trajectory bound certificates.

Rules and defaults:

    constant-step            gamma = c                      c = 0.1
    fixed-length             gamma = c / ||g||              c = 0.2
    nonsum                   gamma = c / sqrt(k)            c = 0.1
    sqrsum-nonsum            gamma = c / k                  c = 0.5
    quad-grad                gamma = c / ||g||^2            c = 0.2
    adagrad                  gamma = theta0 / sqrt(S_k + alpha),
                             S_k = sum_{j<=k} ||g_j||^2,    theta0 = sqrt(2),
                                                            alpha = 1e-8
    polyak                   gamma = (f(x_k) - f*) / ||g||^2
    time-varying             gamma = sqrt(2 sigma) / (M sqrt(k))
    adaptive-time-varying    gamma = sqrt(2 sigma) / (||g|| sqrt(k))

``||g||`` is always the dual norm of the subgradient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

__all__ = [
    "TABLE_TAGS",
    "ScheduleKind",
    "ScheduleState",
    "StationarySignal",
    "schedule",
    "is_nonincreasing_guaranteed",
]

TAG_CONSTANT = "constant-step"
TAG_FIXED_LENGTH = "fixed-length"
TAG_NONSUM = "nonsum"
TAG_SQRSUM = "sqrsum-nonsum"
TAG_QUAD_GRAD = "quad-grad"
TAG_ADAGRAD = "adagrad"
TAG_POLYAK = "polyak"
TAG_TIME_VARYING = "time-varying"
TAG_ADAPTIVE_TV = "adaptive-time-varying"

TABLE_TAGS = (
    TAG_CONSTANT,
    TAG_FIXED_LENGTH,
    TAG_NONSUM,
    TAG_SQRSUM,
    TAG_QUAD_GRAD,
    TAG_ADAGRAD,
    TAG_POLYAK,
    TAG_TIME_VARYING,
    TAG_ADAPTIVE_TV,
)

_DEFAULT_C = {
    TAG_CONSTANT: 0.1,
    TAG_FIXED_LENGTH: 0.2,
    TAG_NONSUM: 0.1,
    TAG_SQRSUM: 0.5,
    TAG_QUAD_GRAD: 0.2,
}

# rules whose entire step sequence is non-increasing no matter what the
# objective feeds them; the others depend on realized gradient norms
_CERTIFIED = frozenset(
    {TAG_CONSTANT, TAG_NONSUM, TAG_SQRSUM, TAG_ADAGRAD, TAG_TIME_VARYING}
)

_NEEDS_GRAD = frozenset(
    {TAG_FIXED_LENGTH, TAG_QUAD_GRAD, TAG_ADAGRAD, TAG_POLYAK, TAG_ADAPTIVE_TV}
)

_ALLOWED_PARAMS = {
    TAG_CONSTANT: {"c"},
    TAG_FIXED_LENGTH: {"c"},
    TAG_NONSUM: {"c"},
    TAG_SQRSUM: {"c"},
    TAG_QUAD_GRAD: {"c"},
    TAG_ADAGRAD: {"theta0", "alpha"},
    TAG_POLYAK: set(),
    TAG_TIME_VARYING: {"m_lipschitz"},
    TAG_ADAPTIVE_TV: set(),
}


class StationarySignal(Exception):
    """The rule cannot produce a positive finite step at the current point,
    which for these rules means the point is already optimal."""


@dataclass(frozen=True)
class ScheduleKind:
    tag: str
    c: Optional[float] = None
    theta0: Optional[float] = None
    alpha: Optional[float] = None
    m_lipschitz: Optional[float] = None


def schedule(
    tag: str,
    *,
    c: Optional[float] = None,
    theta0: Optional[float] = None,
    alpha: Optional[float] = None,
    m_lipschitz: Optional[float] = None,
) -> ScheduleKind:
    """Build a ScheduleKind for ``tag``, filling table defaults.

    ``time-varying`` requires ``m_lipschitz`` (the Lipschitz constant of the
    objective in the chosen norm). Parameters that a rule does not use are
    rejected rather than silently ignored.
    """
    if tag not in TABLE_TAGS:
        raise ValueError(f"unknown schedule tag: {tag!r}")
    allowed = _ALLOWED_PARAMS[tag]
    given = {"c": c, "theta0": theta0, "alpha": alpha, "m_lipschitz": m_lipschitz}
    for name, val in given.items():
        if val is not None and name not in allowed:
            raise ValueError(f"schedule {tag!r} does not take parameter {name!r}")
    if tag in _DEFAULT_C:
        cc = _DEFAULT_C[tag] if c is None else float(c)
        if not cc > 0.0:
            raise ValueError("schedule constant c must be positive")
        return ScheduleKind(tag, c=cc)
    if tag == TAG_ADAGRAD:
        t0 = math.sqrt(2.0) if theta0 is None else float(theta0)
        al = 1e-8 if alpha is None else float(alpha)
        if not t0 > 0.0:
            raise ValueError("adagrad theta0 must be positive")
        if not al > 0.0:
            raise ValueError("adagrad alpha must be positive")
        return ScheduleKind(tag, theta0=t0, alpha=al)
    if tag == TAG_TIME_VARYING:
        if m_lipschitz is None:
            raise ValueError("time-varying schedule needs m_lipschitz")
        ml = float(m_lipschitz)
        if not ml > 0.0:
            raise ValueError("m_lipschitz must be positive")
        return ScheduleKind(tag, m_lipschitz=ml)
    return ScheduleKind(tag)


def is_nonincreasing_guaranteed(kind: ScheduleKind) -> bool:
    return kind.tag in _CERTIFIED


class ScheduleState:
    """Stateful evaluator of one rule along one run.

    ``step_size`` must be called with strictly increasing k; the counter may
    skip values, which happens when two rules share the global iteration
    counter of a constrained run. AdaGrad accumulates the squared dual norms
    it has been shown, current one included.
    """

    def __init__(self, kind: ScheduleKind, sigma: float):
        if kind.tag not in TABLE_TAGS:
            raise ValueError(f"unknown schedule tag: {kind.tag!r}")
        if not (sigma > 0.0 and math.isfinite(sigma)):
            raise ValueError("sigma must be positive and finite")
        if kind.tag in _DEFAULT_C and not (kind.c is not None and kind.c > 0.0):
            raise ValueError(f"schedule {kind.tag!r} needs a positive constant c")
        if kind.tag == TAG_ADAGRAD:
            if not (kind.theta0 is not None and kind.theta0 > 0.0):
                raise ValueError("adagrad needs a positive theta0")
            if not (kind.alpha is not None and kind.alpha > 0.0):
                raise ValueError("adagrad needs a positive alpha")
        if kind.tag == TAG_TIME_VARYING and not (
            kind.m_lipschitz is not None and kind.m_lipschitz > 0.0
        ):
            raise ValueError("time-varying schedule needs a positive m_lipschitz")
        self.kind = kind
        self.sigma = float(sigma)
        self.grad_sq_accum = 0.0
        self._k_last = 0

    def step_size(
        self,
        k: int,
        f_val: Optional[float] = None,
        grad_dual_norm: Optional[float] = None,
        f_star: Optional[float] = None,
    ) -> float:
        if k <= self._k_last:
            raise ValueError(
                f"iteration counter must increase: got k={k} after k={self._k_last}"
            )
        tag = self.kind.tag
        gn = grad_dual_norm
        if tag in _NEEDS_GRAD:
            if gn is None:
                raise ValueError(f"schedule {tag!r} needs the subgradient dual norm")
            if gn < 0.0 or not math.isfinite(gn):
                raise ValueError("subgradient dual norm must be finite and nonnegative")
        self._k_last = k

        if tag == TAG_CONSTANT:
            return self.kind.c
        if tag == TAG_FIXED_LENGTH:
            if gn == 0.0:
                raise StationarySignal
            return self.kind.c / gn
        if tag == TAG_NONSUM:
            return self.kind.c / math.sqrt(k)
        if tag == TAG_SQRSUM:
            return self.kind.c / k
        if tag == TAG_QUAD_GRAD:
            if gn == 0.0:
                raise StationarySignal
            return self.kind.c / (gn * gn)
        if tag == TAG_ADAGRAD:
            self.grad_sq_accum += gn * gn
            return self.kind.theta0 / math.sqrt(self.grad_sq_accum + self.kind.alpha)
        if tag == TAG_POLYAK:
            if f_val is None or f_star is None:
                raise ValueError(
                    "Polyak requires known f*: pass both the current objective "
                    "value and the optimal value"
                )
            if gn == 0.0:
                raise StationarySignal
            gap = f_val - f_star
            if gap <= 0.0:
                raise StationarySignal
            return gap / (gn * gn)
        if tag == TAG_TIME_VARYING:
            return math.sqrt(2.0 * self.sigma) / (self.kind.m_lipschitz * math.sqrt(k))
        if tag == TAG_ADAPTIVE_TV:
            if gn == 0.0:
                raise StationarySignal
            return math.sqrt(2.0 * self.sigma) / (gn * math.sqrt(k))
        raise ValueError(f"unknown schedule tag: {tag!r}")
