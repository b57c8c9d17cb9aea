"""Experiment harness: reference solutions, plan execution, and
deterministic CSV/JSON export.

Conventions shared by all experiments:

* unconstrained runs start at x1 = (1/sqrt(n), ..., 1/sqrt(n)) projected
  onto the feasible set, which on the unit ball is the point itself and on
  the simplex is the barycenter;
* constrained runs start at x1 = 0 on the ball;
* theta defaults to half the squared feasible-set diameter (2 r^2 for a
  ball of radius r, 1 for the simplex), a bound on the Bregman distance to
  any minimizer;
* CSV files use '.' decimals, 17 significant digits, comma delimiters, a
  header row, and LF line endings, so the same plan and seed reproduce the
  same bytes;
* wall-clock time goes to the comparison table and stderr only, never into
  per-iteration files.

The environment variable MDBENCH_THREADS caps how many (schedule, m) cells
of a plan run in parallel; the default is the logical processor count.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import Ball, FeasibleSet, ProxSetup, Simplex, euclidean_setup, entropy_setup, unit_ball
from .problems import InstanceSpec, KIND_BEST_APPROX, build_constraints, build_objective, serialize_instance
from .schedules import TABLE_TAGS, TAG_ADAPTIVE_TV, TAG_POLYAK, TAG_TIME_VARYING, ScheduleState, schedule
from .solvers import (
    RunConfig,
    SolveResult,
    StopReason,
    bound_corollaries,
    constrained_md,
    constrained_md_multi,
    iteration_estimate,
    mirror_descent,
)

__all__ = [
    "METHOD_ANALYTIC",
    "METHOD_GRID",
    "METHOD_LONGRUN",
    "ReferenceSolution",
    "ExperimentPlan",
    "theta_for",
    "default_start",
    "constrained_start",
    "grid_refine_minimize",
    "reference_solution",
    "constrained_reference",
    "write_trace_csv",
    "summarize_cell_csv",
    "run_single_cell",
    "run_experiment",
    "sweep_m",
    "run_constrained_comparison",
    "write_instance_json",
]

METHOD_ANALYTIC = "Analytic"
METHOD_GRID = "GridRefine"
METHOD_LONGRUN = "LongRun"

_PROX_NAMES = ("euclidean", "entropy")


@dataclass(frozen=True)
class ReferenceSolution:
    """A best-known minimal value and how far it can be trusted. Gap
    reports derived from it are meaningful only beyond ``tolerance``."""

    f_min: float
    method: str
    tolerance: float


@dataclass(frozen=True)
class ExperimentPlan:
    """A deterministic batch of (schedule, m) solver runs on one instance.

    ``seed`` is the experiment seed and should match ``instance.seed``;
    ``prox`` selects the geometry ("euclidean" on the unit ball or
    "entropy" on the simplex). Plans serialize losslessly to dicts.
    """

    instance: InstanceSpec
    schedules: tuple = ()
    m_values: tuple = ()
    iters: int = 1000
    epsilon: Optional[float] = None
    output_dir: str = "."
    seed: int = 0
    prox: str = "euclidean"

    def __post_init__(self):
        object.__setattr__(self, "schedules", tuple(self.schedules))
        object.__setattr__(self, "m_values", tuple(float(v) for v in self.m_values))
        if not self.schedules:
            raise ValueError("plan needs at least one schedule tag")
        for tag in self.schedules:
            if tag not in TABLE_TAGS:
                raise ValueError(f"unknown schedule tag: {tag!r}")
        if not self.m_values:
            raise ValueError("plan needs at least one m value")
        for m in self.m_values:
            if not (math.isfinite(m) and m >= -1.0):
                raise ValueError("every m must be finite and >= -1")
        if self.iters < 1:
            raise ValueError("iters must be at least 1")
        if self.epsilon is not None and not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if self.prox not in _PROX_NAMES:
            raise ValueError(f"unknown prox name: {self.prox!r}")

    def to_dict(self) -> dict:
        return {
            "instance": {
                "kind": self.instance.kind,
                "n": self.instance.n,
                "t": self.instance.t,
                "p": self.instance.p,
                "seed": self.instance.seed,
                "distribution": self.instance.distribution,
            },
            "schedules": list(self.schedules),
            "m_values": list(self.m_values),
            "iters": self.iters,
            "epsilon": self.epsilon,
            "output_dir": self.output_dir,
            "seed": self.seed,
            "prox": self.prox,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentPlan":
        inst = doc["instance"]
        return cls(
            instance=InstanceSpec(
                kind=inst["kind"],
                n=int(inst["n"]),
                t=int(inst["t"]),
                p=int(inst["p"]),
                seed=int(inst["seed"]),
                distribution=inst["distribution"],
            ),
            schedules=tuple(doc["schedules"]),
            m_values=tuple(doc["m_values"]),
            iters=int(doc["iters"]),
            epsilon=doc.get("epsilon"),
            output_dir=doc["output_dir"],
            seed=int(doc["seed"]),
            prox=doc.get("prox", "euclidean"),
        )


def theta_for(feasible: FeasibleSet) -> float:
    """Half the squared diameter of the set: a valid Bregman-distance bound
    from any feasible start to any minimizer."""
    if isinstance(feasible, Ball):
        return 2.0 * feasible.radius**2
    return 1.0


def default_start(feasible: FeasibleSet) -> np.ndarray:
    if isinstance(feasible, Ball):
        n = feasible.n
        return feasible.project(np.full(n, 1.0 / math.sqrt(n)))
    return np.full(feasible.n, 1.0 / feasible.n)


def constrained_start(feasible: FeasibleSet) -> np.ndarray:
    if isinstance(feasible, Ball):
        return feasible.project(np.zeros(feasible.n))
    return np.full(feasible.n, 1.0 / feasible.n)


def _geometry(prox_name: str, n: int):
    if prox_name == "euclidean":
        return euclidean_setup(), unit_ball(n)
    if prox_name == "entropy":
        return entropy_setup(), Simplex(n)
    raise ValueError(f"unknown prox name: {prox_name!r}")


def _prepare_problem(instance: InstanceSpec, prox_name: str):
    """Build (objective, prox, feasible, start). Off the unit ball the
    analytic optimal value of the best-approximation family no longer
    applies, so known_fstar is cleared there."""
    prox, feasible = _geometry(prox_name, instance.n)
    objective = build_objective(instance)
    if isinstance(feasible, Simplex) and objective.known_fstar is not None:
        objective.known_fstar = None
    return objective, prox, feasible, default_start(feasible)


def grid_refine_minimize(value_fn, feasible: FeasibleSet, tol: float = 1e-6,
                         lipschitz: float = 1.0, points_per_axis: int = 9,
                         max_rounds: int = 120):
    """Derivative-free minimizer for n <= 3 by nested grid refinement.

    Evaluates the function on a projected axis grid, keeps the sublevel
    region that can still contain the minimum given the Lipschitz bound,
    and shrinks the box around it until lipschitz * spacing * sqrt(n) <= tol.
    Returns (x_best, f_best, achieved_tolerance).
    """
    n = feasible.n
    if n > 3:
        raise ValueError("grid refinement is limited to n <= 3")
    if isinstance(feasible, Ball):
        lo0 = feasible.center - feasible.radius
        hi0 = feasible.center + feasible.radius
    else:
        lo0 = np.zeros(n)
        hi0 = np.ones(n)
    lo, hi = lo0.copy(), hi0.copy()
    ppa = max(3, points_per_axis)
    best_x = None
    best_v = math.inf
    slack = math.inf
    for _ in range(max_rounds):
        axes = [np.linspace(lo[i], hi[i], ppa) for i in range(n)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        delta = float(np.max((hi - lo) / (ppa - 1)))
        slack = lipschitz * delta * math.sqrt(n)
        vals = np.empty(mesh.shape[0])
        for i, row in enumerate(mesh):
            vals[i] = value_fn(feasible.project(row))
        i_best = int(np.argmin(vals))
        if vals[i_best] < best_v:
            best_v = float(vals[i_best])
            best_x = feasible.project(mesh[i_best])
        if slack <= tol:
            break
        keep = mesh[vals <= best_v + slack]
        new_lo = np.maximum(keep.min(axis=0) - delta, lo0)
        new_hi = np.minimum(keep.max(axis=0) + delta, hi0)
        # guarantee progress even on flat regions: if the box barely
        # shrank, double the resolution instead
        if float(np.max(new_hi - new_lo)) > 0.75 * float(np.max(hi - lo)):
            ppa = min(2 * ppa - 1, 129)
        lo, hi = new_lo, new_hi
    return best_x, best_v, slack


def reference_solution(objective, feasible: FeasibleSet,
                       iters_budget: int = 10_000) -> ReferenceSolution:
    """Best-known minimum of an unconstrained objective over the set.

    Distance-to-point objectives on a ball have the exact answer; tiny
    dimensions are gridded to 1e-6; everything else gets a long reference
    solve (m = 5, time-varying steps, 50x the experiment budget) whose
    corollary bound is reported as the tolerance.
    """
    if objective.kind == KIND_BEST_APPROX and isinstance(feasible, Ball):
        d = objective.a - feasible.center
        f_min = max(0.0, math.sqrt(float(np.dot(d, d))) - feasible.radius)
        return ReferenceSolution(f_min, METHOD_ANALYTIC, 0.0)
    if feasible.n <= 3:
        _, f_min, achieved = grid_refine_minimize(
            objective.value, feasible, tol=1e-6, lipschitz=objective.lipschitz_bound
        )
        return ReferenceSolution(f_min, METHOD_GRID, max(achieved, 1e-6))
    prox = euclidean_setup()
    n_long = 50 * iters_budget
    theta = theta_for(feasible)
    m_lip = objective.lipschitz_bound
    state = ScheduleState(schedule(TAG_TIME_VARYING, m_lipschitz=m_lip), prox.sigma)
    config = RunConfig(m=5.0, iters=n_long, theta=theta, record_trace=False)
    res = mirror_descent(objective, prox, feasible, state, config, default_start(feasible))
    tol = bound_corollaries(5.0, n_long, m_lip, theta, prox.sigma)
    return ReferenceSolution(res.f_hat, METHOD_LONGRUN, tol)


def constrained_reference(objective, constraints, feasible: FeasibleSet,
                          epsilon_ref: float = 6e-3, m: float = 1.0,
                          theta1: Optional[float] = None) -> ReferenceSolution:
    """Reference value for a constrained instance from one long certified
    run at accuracy epsilon_ref.

    The returned point is only epsilon_ref-feasible, so its objective value
    can undershoot the true constrained minimum; the tolerance widens by a
    bound on that undershoot derived from the realized violation and the
    smallest constraint gradient norm.
    """
    prox = euclidean_setup()
    if theta1 is None:
        theta1 = theta_for(feasible)
    m_big = max(objective.lipschitz_bound, constraints.lipschitz_bound)
    est = iteration_estimate(m_big, theta1, prox.sigma, epsilon_ref, m)
    cap = min(3 * est + 1000, 10_000_000)
    state_f = ScheduleState(
        schedule(TAG_TIME_VARYING, m_lipschitz=objective.lipschitz_bound), prox.sigma
    )
    state_g = ScheduleState(
        schedule(TAG_TIME_VARYING, m_lipschitz=constraints.lipschitz_bound), prox.sigma
    )
    config = RunConfig(
        m=m, iters=cap, epsilon=epsilon_ref, theta=theta1, record_trace=False
    )
    res = constrained_md(
        objective, constraints, prox, feasible, state_f, state_g, config,
        constrained_start(feasible),
    )
    if res.stop_reason is not StopReason.EPSILON_CRITERION:
        raise RuntimeError(
            "constrained reference run did not reach its stopping criterion "
            f"within {cap} iterations"
        )
    violation = max(0.0, constraints.value(res.x_hat))
    row_norms = np.sqrt((constraints.alphas * constraints.alphas).sum(axis=1))
    min_row = float(row_norms.min())
    tol = epsilon_ref
    if violation > 0.0 and min_row > 0.0:
        tol += 2.0 * objective.lipschitz_bound * violation / min_row
    return ReferenceSolution(res.f_hat, METHOD_LONGRUN, tol)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if math.isnan(f):
        return ""
    return format(f, ".17g")


def write_trace_csv(path: str, trace, reference: Optional[ReferenceSolution] = None,
                    include_productive: bool = False,
                    include_evals: bool = False) -> None:
    """One row per iteration; empty cells where a value is undefined
    (bound for uncertified schedules, averages before the first productive
    step, gaps without a reference)."""
    with open(path, "w", newline="") as fh:
        fh.write(_trace_csv_text(trace, reference, include_productive, include_evals))


def _trace_csv_text(trace, reference, include_productive, include_evals) -> str:
    rows = trace.rows()
    has_bound = len(trace.bound) == rows and rows > 0
    header = ["k", "gamma", "f_iterate", "f_avg", "f_best_so_far", "gap_avg", "gap_best", "bound"]
    if include_productive:
        header.append("productive")
    if include_evals:
        header.append("constraint_evals")
    f_min = reference.f_min if reference is not None else None
    lines = [",".join(header)]
    best = math.inf
    for i in range(rows):
        fi = trace.f_iterate[i]
        counts = (not include_productive) or trace.productive[i]
        if counts and fi < best:
            best = fi
        f_best = best if best < math.inf else None
        f_avg = trace.f_avg[i]
        gap_avg = None
        gap_best = None
        if f_min is not None:
            if not math.isnan(f_avg):
                gap_avg = f_avg - f_min
            if f_best is not None:
                gap_best = f_best - f_min
        cells = [
            str(trace.k[i]),
            _fmt(trace.gamma[i]),
            _fmt(fi),
            _fmt(f_avg),
            _fmt(f_best),
            _fmt(gap_avg),
            _fmt(gap_best),
            _fmt(trace.bound[i]) if has_bound else "",
        ]
        if include_productive:
            cells.append(_fmt(bool(trace.productive[i])))
        if include_evals:
            cells.append(str(int(trace.constraint_evals[i])))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _parse_cell(s: str) -> Optional[float]:
    return None if s == "" else float(s)


def summarize_cell_csv(path: str) -> dict:
    """Final-row numbers of one per-iteration CSV, parsed back from the
    written text so they match the summary JSON bit for bit."""
    with open(path, "r", newline="") as fh:
        content = fh.read()
    lines = content.strip("\n").split("\n")
    header = lines[0].split(",")
    if len(lines) < 2:
        return {"final_k": None, "final_f_avg": None, "final_gap_avg": None,
                "final_f_best": None, "final_gap_best": None, "final_bound": None}
    last = lines[-1].split(",")
    row = dict(zip(header, last))
    return {
        "final_k": int(row["k"]),
        "final_f_avg": _parse_cell(row["f_avg"]),
        "final_gap_avg": _parse_cell(row["gap_avg"]),
        "final_f_best": _parse_cell(row["f_best_so_far"]),
        "final_gap_best": _parse_cell(row["gap_best"]),
        "final_bound": _parse_cell(row["bound"]),
    }


def _schedule_state(tag: str, objective, prox: ProxSetup) -> ScheduleState:
    if tag == TAG_TIME_VARYING:
        kind = schedule(tag, m_lipschitz=objective.lipschitz_bound)
    else:
        kind = schedule(tag)
    return ScheduleState(kind, prox.sigma)


def _m_token(m: float) -> str:
    return format(float(m), "g")


def _max_workers() -> int:
    raw = os.environ.get("MDBENCH_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _execute_cell(objective, prox, feasible, x1, tag, m, iters, theta,
                  reference) -> tuple[str, SolveResult]:
    state = _schedule_state(tag, objective, prox)
    config = RunConfig(m=m, iters=iters, theta=theta, record_trace=True)
    result = mirror_descent(objective, prox, feasible, state, config, x1)
    text = _trace_csv_text(result.trace, reference, False, False)
    return text, result


def _check_unconstrained(plan: ExperimentPlan) -> None:
    if plan.instance.p != 0:
        raise ValueError(
            "plan runs are unconstrained; use the constrained comparison for p > 0"
        )


def _require_polyak_fstar(objective, schedules) -> None:
    if TAG_POLYAK in schedules and objective.known_fstar is None:
        raise ValueError("Polyak requires known f*")


def run_single_cell(instance: InstanceSpec, prox_name: str, tag: str, m: float,
                    iters: int, out_path: str) -> dict:
    """One (schedule, m) run written to ``out_path``; returns its summary
    cell. Shares every code path with run_experiment, so a matching plan
    cell produces identical bytes."""
    if tag not in TABLE_TAGS:
        raise ValueError(f"unknown schedule tag: {tag!r}")
    objective, prox, feasible, x1 = _prepare_problem(instance, prox_name)
    _require_polyak_fstar(objective, [tag])
    reference = reference_solution(objective, feasible, iters_budget=iters)
    text, result = _execute_cell(
        objective, prox, feasible, x1, tag, m, iters, theta_for(feasible), reference
    )
    with open(out_path, "w", newline="") as fh:
        fh.write(text)
    cell = {
        "schedule": tag,
        "m": float(m),
        "file": os.path.basename(out_path),
        "iterations": result.iterations,
        "stop_reason": result.stop_reason.value,
    }
    cell.update(summarize_cell_csv(out_path))
    cell["reference"] = {
        "f_min": reference.f_min,
        "method": reference.method,
        "tolerance": reference.tolerance,
    }
    return cell


def run_experiment(plan: ExperimentPlan) -> dict:
    """Run every (schedule, m) cell of the plan, write one CSV per cell and
    a summary JSON into plan.output_dir, and return the summary dict.

    Cells run in parallel up to MDBENCH_THREADS workers; outputs and the
    summary ordering depend only on the plan, never on scheduling.
    """
    _check_unconstrained(plan)
    objective, prox, feasible, x1 = _prepare_problem(plan.instance, plan.prox)
    _require_polyak_fstar(objective, plan.schedules)
    reference = reference_solution(objective, feasible, iters_budget=plan.iters)
    theta = theta_for(feasible)
    os.makedirs(plan.output_dir, exist_ok=True)

    cells = [(tag, m) for tag in plan.schedules for m in plan.m_values]

    def job(cell):
        tag, m = cell
        return _execute_cell(objective, prox, feasible, x1, tag, m, plan.iters, theta, reference)

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        outcomes = list(pool.map(job, cells))

    summary_cells = []
    for (tag, m), (text, result) in zip(cells, outcomes):
        fname = f"{tag}_m{_m_token(m)}.csv"
        fpath = os.path.join(plan.output_dir, fname)
        with open(fpath, "w", newline="") as fh:
            fh.write(text)
        cell = {
            "schedule": tag,
            "m": m,
            "file": fname,
            "iterations": result.iterations,
            "stop_reason": result.stop_reason.value,
        }
        cell.update(summarize_cell_csv(fpath))
        summary_cells.append(cell)

    summary = {
        "plan": plan.to_dict(),
        "reference": {
            "f_min": reference.f_min,
            "method": reference.method,
            "tolerance": reference.tolerance,
        },
        "cells": summary_cells,
    }
    spath = os.path.join(plan.output_dir, "summary.json")
    with open(spath, "w", newline="") as fh:
        fh.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def sweep_m(plan: ExperimentPlan, out_path: Optional[str] = None) -> str:
    """Long-format m sweep (columns m, k, gap_avg) for one schedule.

    Every series is produced by the same cell runner as run_experiment, so
    a sweep row agrees bit for bit with the matching plan cell.
    """
    _check_unconstrained(plan)
    if len(plan.m_values) < 2:
        raise ValueError("an m sweep needs at least two m values")
    if len(plan.schedules) != 1:
        raise ValueError("an m sweep uses exactly one schedule")
    tag = plan.schedules[0]
    objective, prox, feasible, x1 = _prepare_problem(plan.instance, plan.prox)
    _require_polyak_fstar(objective, plan.schedules)
    reference = reference_solution(objective, feasible, iters_budget=plan.iters)
    theta = theta_for(feasible)

    def job(m):
        return _execute_cell(objective, prox, feasible, x1, tag, m, plan.iters, theta, reference)

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        outcomes = list(pool.map(job, plan.m_values))

    lines = ["m,k,gap_avg"]
    for m, (text, _result) in zip(plan.m_values, outcomes):
        rows = text.strip("\n").split("\n")
        header = rows[0].split(",")
        k_col = header.index("k")
        gap_col = header.index("gap_avg")
        m_tok = _fmt(m)
        for row in rows[1:]:
            parts = row.split(",")
            lines.append(f"{m_tok},{parts[k_col]},{parts[gap_col]}")
    if out_path is None:
        os.makedirs(plan.output_dir, exist_ok=True)
        out_path = os.path.join(plan.output_dir, "sweep_m.csv")
    with open(out_path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return out_path


_COMPARISON_HEADER = (
    "algorithm,epsilon,m,iterations,productive,nonproductive,"
    "constraint_evals,wall_seconds,f_hat,g_hat,stop_reason"
)


def run_constrained_comparison(instance: InstanceSpec, epsilons: Sequence[float],
                               m: float, out_path: str, theta1: float = 2.0,
                               schedule_mode: str = TAG_ADAPTIVE_TV,
                               iters_cap: Optional[int] = None,
                               trace_dir: Optional[str] = None) -> list:
    """Head-to-head of the two constrained solvers on one instance, one row
    per (epsilon, algorithm), on the unit ball with Euclidean prox from
    x1 = 0.

    schedule_mode picks the two-phase steps of the first solver:
    "time-varying" uses the certified Lipschitz-based pair, and
    "adaptive-time-varying" divides by the realized subgradient norm. The
    one-constraint-at-a-time solver always uses its built-in adaptive rule.
    wall_seconds is machine-dependent by nature; every other column is
    deterministic. With trace_dir set, per-iteration CSVs are written too.
    """
    if instance.p < 1:
        raise ValueError("constrained comparison needs p >= 1")
    if schedule_mode not in (TAG_TIME_VARYING, TAG_ADAPTIVE_TV):
        raise ValueError(
            "schedule_mode must be 'time-varying' or 'adaptive-time-varying'"
        )
    objective = build_objective(instance)
    constraints = build_constraints(instance)
    prox = euclidean_setup()
    feasible = unit_ball(instance.n)
    x1 = constrained_start(feasible)
    record = trace_dir is not None
    if record:
        os.makedirs(trace_dir, exist_ok=True)

    rows = []
    for eps in epsilons:
        if not eps > 0.0:
            raise ValueError("epsilon must be positive")
        config = RunConfig(
            m=m, iters=iters_cap, epsilon=float(eps), theta=theta1, record_trace=record
        )

        if schedule_mode == TAG_TIME_VARYING:
            state_f = ScheduleState(
                schedule(TAG_TIME_VARYING, m_lipschitz=objective.lipschitz_bound),
                prox.sigma,
            )
            state_g = ScheduleState(
                schedule(TAG_TIME_VARYING, m_lipschitz=constraints.lipschitz_bound),
                prox.sigma,
            )
        else:
            state_f = ScheduleState(schedule(TAG_ADAPTIVE_TV), prox.sigma)
            state_g = ScheduleState(schedule(TAG_ADAPTIVE_TV), prox.sigma)

        t0 = time.perf_counter()
        res3 = constrained_md(
            objective, constraints, prox, feasible, state_f, state_g, config, x1
        )
        wall3 = time.perf_counter() - t0
        t0 = time.perf_counter()
        res4 = constrained_md_multi(objective, constraints, prox, feasible, config, x1)
        wall4 = time.perf_counter() - t0

        for name, res, wall in (("alg3", res3, wall3), ("alg4", res4, wall4)):
            rows.append(
                {
                    "algorithm": name,
                    "epsilon": float(eps),
                    "m": float(m),
                    "iterations": res.iterations,
                    "productive": res.productive_count,
                    "nonproductive": res.nonproductive_count,
                    "constraint_evals": res.constraint_evals_total,
                    "wall_seconds": wall,
                    "f_hat": res.f_hat,
                    "g_hat": float(constraints.value(res.x_hat)),
                    "stop_reason": res.stop_reason.value,
                }
            )
            if record:
                tname = f"{name}_eps{_m_token(eps)}_m{_m_token(m)}.csv"
                write_trace_csv(
                    os.path.join(trace_dir, tname),
                    res.trace,
                    None,
                    include_productive=True,
                    include_evals=True,
                )

    lines = [_COMPARISON_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    r["algorithm"],
                    _fmt(r["epsilon"]),
                    _fmt(r["m"]),
                    str(r["iterations"]),
                    str(r["productive"]),
                    str(r["nonproductive"]),
                    str(r["constraint_evals"]),
                    _fmt(r["wall_seconds"]),
                    _fmt(r["f_hat"]),
                    _fmt(r["g_hat"]),
                    r["stop_reason"],
                ]
            )
        )
    with open(out_path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return rows


def write_instance_json(instance: InstanceSpec, out_path: str) -> None:
    doc = serialize_instance(instance)
    with open(out_path, "w", newline="") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
