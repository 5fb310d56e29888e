"""Dual annealing (generalized simulated annealing) for noisy objectives.

Components: heavy-tailed visiting moves (distorted Cauchy-Lorentz), Tsallis
acceptance, an annealed visiting temperature, restarts with a terminal
derivative-free local search, and an optional shot schedule that keeps the
sample-mean deviation below a multiple of the temperature.  Also houses the
two-state noisy Metropolis chain that demonstrates how fresh-sampled noise
flattens the stationary distribution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
from scipy.special import gammaln

from .trajectory import OptimizeResult, Trajectory
from .util import Bounds, validate_bounds, wrap_to_bounds

DEFAULT_BOUNDS: Bounds = ((0.0, math.pi), (0.0, math.pi))

# cap on a single visiting displacement; |y| near zero would otherwise
# produce non-finite jumps.  Oversized components are redrawn uniformly at
# the cap scale (they wrap into the box anyway, so this only avoids inf).
_TAIL_LIMIT = 1e8


@dataclass
class GelfandSchedule:
    """Noise-aware shot scheduling: keep sigma/sqrt(N) <= c * T at each step.

    sigma_source "bound" uses the fixed sigma_value supplied by the caller
    (e.g. the analytic variance bound); "empirical" uses a running standard
    deviation of the values observed so far.  With tighten=True the
    constant decays as c/log(1+t), so the per-step bound strengthens over
    time instead of staying a fixed multiple.
    """

    c: float = 1.0
    sigma_source: str = "empirical"
    sigma_value: float | None = None
    tighten: bool = False

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.sigma_source not in ("bound", "empirical"):
            raise ValueError(f"unknown sigma_source {self.sigma_source!r}")
        if self.sigma_source == "bound" and self.sigma_value is None:
            raise ValueError("sigma_source 'bound' requires sigma_value")


@dataclass
class AnnealConfig:
    q_v: float = 2.62
    q_a: float = -5.0
    t1_temperature: float = 5230.0
    restart_temp_ratio: float = 2e-5
    max_restarts: int = 10
    eval_budget: int = 400
    bounds: Bounds = DEFAULT_BOUNDS
    local_search: bool = True
    local_search_max_evals: int = 50
    acceptance_cooling: str = "visiting-over-t"  # or "same-as-visiting"
    shot_schedule: GelfandSchedule | None = None

    def __post_init__(self):
        if not 1.0 < self.q_v < 3.0:
            raise ValueError(f"q_v must lie in (1, 3), got {self.q_v}")
        if self.q_a >= 1.0:
            raise ValueError(f"q_a must be < 1, got {self.q_a}")
        if self.t1_temperature <= 0:
            raise ValueError("t1_temperature must be positive")
        if self.restart_temp_ratio <= 0:
            raise ValueError("restart_temp_ratio must be positive")
        if self.max_restarts < 0:
            raise ValueError("max_restarts must be >= 0")
        if self.eval_budget < 1:
            raise ValueError("eval_budget must be >= 1")
        if self.acceptance_cooling not in ("visiting-over-t", "same-as-visiting"):
            raise ValueError(
                f"unknown acceptance_cooling {self.acceptance_cooling!r}"
            )
        self.bounds = validate_bounds(self.bounds)


def visiting_temperature(t: int, cfg: AnnealConfig) -> float:
    """Annealed visiting temperature at step t >= 1 (equals T1 at t = 1)."""
    if t < 1:
        raise ValueError(f"step must be >= 1, got {t}")
    e = cfg.q_v - 1.0
    return cfg.t1_temperature * (2.0 ** e - 1.0) / ((1.0 + t) ** e - 1.0)


def _visit_scale(temperature: float, q_v: float) -> float:
    # closed-form scale of the distorted Cauchy-Lorentz visiting density;
    # valid on the configured range 1 < q_v < 3
    f2 = math.exp((4.0 - q_v) * math.log(q_v - 1.0))
    f3 = math.exp((2.0 - q_v) * math.log(2.0) / (q_v - 1.0))
    f4p = math.sqrt(math.pi) * f2 / (f3 * (3.0 - q_v))
    f5 = 1.0 / (q_v - 1.0) - 0.5
    f6 = math.pi * (1.0 - f5) / math.sin(math.pi * (1.0 - f5)) \
        / math.exp(gammaln(2.0 - f5))
    f4 = f4p * math.exp(math.log(temperature) / (q_v - 1.0))
    return math.exp(-(q_v - 1.0) * math.log(f6 / f4) / (3.0 - q_v))


def sample_visit(temperature: float, dim: int, rng, q_v: float = 2.62) -> np.ndarray:
    """Heavy-tailed random displacement from the visiting distribution.

    Per dimension: dx = s * x / |y|^((q_v-1)/(3-q_v)) with x, y independent
    standard normals and s the closed-form function of temperature and q_v.
    Tail exponent of the resulting density is 1/(q_v-1) + (dim-1)/2.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    x = rng.standard_normal(dim)
    y = rng.standard_normal(dim)
    s = _visit_scale(temperature, q_v)
    with np.errstate(divide="ignore", over="ignore"):
        step = s * x / np.abs(y) ** ((q_v - 1.0) / (3.0 - q_v))
    step = np.nan_to_num(step, nan=0.0, posinf=_TAIL_LIMIT, neginf=-_TAIL_LIMIT)
    oversized = np.abs(step) > _TAIL_LIMIT
    if np.any(oversized):
        redraw = _TAIL_LIMIT * rng.uniform(size=int(oversized.sum()))
        step[oversized] = np.sign(step[oversized]) * redraw
    return step


def acceptance_probability(delta: float, t_accept: float, q_a: float) -> float:
    """Tsallis acceptance for a proposal that is worse by delta.

    delta = (current objective - proposed objective) under maximization, so
    delta <= 0 (improvement) is always accepted.  Worse proposals get
    max(0, 1 + (q_a - 1) * delta / T) ** (1 / (1 - q_a)), which recovers
    exp(-delta/T) as q_a -> 1 and is non-increasing in delta.
    """
    if t_accept <= 0:
        raise ValueError(f"acceptance temperature must be positive, got {t_accept}")
    if q_a >= 1.0:
        raise ValueError(f"q_a must be < 1, got {q_a}")
    if delta <= 0:
        return 1.0
    base = 1.0 + (q_a - 1.0) * delta / t_accept
    if base <= 0.0:
        return 0.0
    return float(base ** (1.0 / (1.0 - q_a)))


def shot_schedule(t_k: float, sigma_hat: float, c: float) -> int:
    """Shots needed so the sample-mean deviation sigma/sqrt(N) <= c * T."""
    if t_k <= 0:
        raise ValueError(f"temperature must be positive, got {t_k}")
    if sigma_hat < 0:
        raise ValueError(f"sigma_hat must be >= 0, got {sigma_hat}")
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    if sigma_hat == 0.0:
        return 1
    return max(1, math.ceil((sigma_hat / (c * t_k)) ** 2))


class _BudgetExhausted(Exception):
    pass


class _Loop:
    """Budget-guarded evaluation with best-so-far tracking."""

    def __init__(self, obj, budget: int):
        self.obj = obj
        self.budget = budget
        self.used = 0
        self.best_x: np.ndarray | None = None
        self.best_value = -math.inf

    def spend(self, x: np.ndarray, phase: str, **extra) -> float:
        if self.used >= self.budget:
            raise _BudgetExhausted
        value = self.obj.evaluate(x, phase=phase, **extra)
        self.used += 1
        # ties go to the later observation: with few-shot noise the sampler
        # concentrates over time, so later equal draws sit in better regions
        if value >= self.best_value:
            self.best_value = value
            self.best_x = np.array(x, dtype=float)
        return value


def anneal_run(obj, cfg: AnnealConfig, rng, x0=None) -> tuple[OptimizeResult, Trajectory]:
    """Run dual annealing against a shot-limited evaluator.

    obj must expose evaluate(x, shots=..., phase=..., **extra) -> float
    (maximized), an eval-ordered trajectory, and optionally exact_cost(x).
    The evaluator should be fresh: its trajectory is returned as the run
    log.  Evaluation accounting is exact; the run stops when the budget is
    consumed or when the last permitted re-anneal finishes.
    """
    bounds = cfg.bounds
    dim = len(bounds)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    threshold = cfg.t1_temperature * cfg.restart_temp_ratio
    loop = _Loop(obj, cfg.eval_budget)
    restarts_used = 0
    local_searches = 0

    if x0 is None:
        x_cur = lo + rng.uniform(size=dim) * (hi - lo)
    else:
        x_cur = wrap_to_bounds(x0, bounds)

    try:
        v_cur = loop.spend(x_cur, "anneal", temperature=cfg.t1_temperature,
                           step=0)
        for attempt in range(cfg.max_restarts + 1):
            phase = "anneal" if attempt == 0 else "restart-anneal"
            if attempt > 0:
                restarts_used += 1
                # re-anneal from the best point seen, with a fresh draw as
                # the chain value so a lucky past draw cannot freeze the chain
                x_cur = loop.best_x.copy()
                v_cur = loop.spend(x_cur, phase,
                                   temperature=cfg.t1_temperature, step=0)
            t = 1
            while True:
                temperature = visiting_temperature(t, cfg)
                if temperature < threshold:
                    break
                if cfg.acceptance_cooling == "visiting-over-t":
                    t_accept = temperature / t
                else:
                    t_accept = temperature
                shots = _scheduled_shots(cfg, loop, t, t_accept)
                x_prop = wrap_to_bounds(
                    x_cur + sample_visit(temperature, dim, rng, cfg.q_v), bounds
                )
                kwargs = {"temperature": temperature, "step": t}
                if shots is not None:
                    kwargs["shots"] = shots
                v_prop = loop.spend(x_prop, phase, **kwargs)
                delta = v_cur - v_prop
                if rng.random() <= acceptance_probability(delta, t_accept, cfg.q_a):
                    x_cur, v_cur = x_prop, v_prop
                t += 1
            if cfg.local_search:
                _local_search(loop, cfg, temperature)
                local_searches += 1
                x_cur = loop.best_x.copy()
                v_cur = loop.best_value
    except _BudgetExhausted:
        pass  # normal termination mid-phase

    best_x = loop.best_x
    exact = obj.exact_cost(best_x) if hasattr(obj, "exact_cost") else None
    result = OptimizeResult(
        best_x=best_x,
        best_value=loop.best_value,
        best_value_x=best_x.copy(),
        exact_cost=exact,
        num_evals=loop.used,
        details={
            "restarts_used": restarts_used,
            "local_searches": local_searches,
            "final_x": [float(v) for v in obj.trajectory[-1].x],
        },
    )
    return result, obj.trajectory


def _scheduled_shots(cfg: AnnealConfig, loop: _Loop, t: int,
                     t_accept: float) -> int | None:
    sched = cfg.shot_schedule
    if sched is None:
        return None
    if sched.sigma_source == "bound":
        sigma_hat = float(sched.sigma_value)
    else:
        values = loop.obj.trajectory.values
        sigma_hat = float(np.std(values, ddof=1)) if len(values) >= 2 else 0.0
    c = sched.c / math.log(1.0 + t) if (sched.tighten and t >= 2) else sched.c
    return shot_schedule(t_accept, sigma_hat, c)


def _local_search(loop: _Loop, cfg: AnnealConfig, temperature: float) -> None:
    """Terminal Nelder-Mead refinement on the same noisy objective."""
    remaining = loop.budget - loop.used
    if remaining <= 0:
        raise _BudgetExhausted
    cap = min(cfg.local_search_max_evals, remaining)
    x0 = loop.best_x.copy()

    def negated(z):
        x = wrap_to_bounds(z, cfg.bounds)
        return -loop.spend(x, "local", temperature=temperature)

    try:
        scipy.optimize.minimize(
            negated, x0, method="Nelder-Mead",
            options={"maxfev": cap, "xatol": 1e-4, "fatol": 1e-4},
        )
    except _BudgetExhausted:
        raise
    except StopIteration:  # pragma: no cover - scipy internals
        pass


def two_state_noisy_chain(temperature: float, steps: int, noisy: bool,
                          rng) -> float:
    """Occupancy of the true minimum in a two-state Metropolis chain.

    State i1 has energy 0.  State i2 evaluates to 2 or -1 with equal
    probability when noisy (mean 0.5), or to the fixed mean 0.5 when
    noiseless.  Every proposal re-evaluates both endpoints; acceptance is
    min(1, exp(-dE/T)).  With fresh noise the chain's stationary
    distribution flattens toward uniform even though i1 is the minimum.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")

    def measure(state: int) -> float:
        if state == 1:
            return 0.0
        if noisy:
            return 2.0 if rng.random() < 0.5 else -1.0
        return 0.5

    state = 1
    in_i1 = 0
    for _ in range(steps):
        other = 2 if state == 1 else 1
        delta = measure(other) - measure(state)
        if delta <= 0 or rng.random() < math.exp(-delta / temperature):
            state = other
        if state == 1:
            in_i1 += 1
    return in_i1 / steps
