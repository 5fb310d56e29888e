"""Natural evolution strategies with a population-and-shots gradient estimator.

A fixed isotropic Gaussian search distribution is moved by plain gradient
ascent on the estimator (1/(sigma*N*M)) * sum_i sum_j f_j(x_i) * Z_i, which
stays informative even when each member is evaluated with a single shot:
exchanging the order of the shot and population sums averages the noise
across the population instead of per point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .anneal import DEFAULT_BOUNDS
from .trajectory import OptimizeResult, Trajectory
from .util import Bounds, validate_bounds, wrap_to_bounds


@dataclass
class NesConfig:
    # learning_rate is sized for unit-scale landscapes on a [0, pi]^2 box:
    # ascent is only stable for eta below ~2/curvature, and the standardized
    # gradient has near-constant magnitude ~1/(sigma sqrt(M)), so 0.05
    # traverses the box within 30 generations yet settles inside a basin
    population_size: int = 10
    generations: int = 30
    sigma: float = 0.25
    learning_rate: float = 0.05
    bounds: Bounds = DEFAULT_BOUNDS
    shots_per_member: int = 1
    fitness_shaping: str = "standardize"  # or "none"
    antithetic: bool = True

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError(f"population_size must be >= 2, got {self.population_size}")
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.shots_per_member < 1:
            raise ValueError(f"shots_per_member must be >= 1, got {self.shots_per_member}")
        if self.fitness_shaping not in ("none", "standardize"):
            raise ValueError(f"unknown fitness_shaping {self.fitness_shaping!r}")
        self.bounds = validate_bounds(self.bounds)


@dataclass
class PopulationSample:
    """One generation's draws: members[k] = mu + sigma * zs[k].

    zs keeps the raw standard-normal perturbations; members are wrapped
    into the search box for evaluation when bounds are given.
    """

    mu: np.ndarray
    sigma: float
    zs: np.ndarray
    members: np.ndarray
    fitnesses: np.ndarray | None = None


def sample_population(mu, sigma: float, m: int, rng, bounds: Bounds | None = None,
                      antithetic: bool = True) -> PopulationSample:
    """Draw M members around mu; antithetic +/- pairing when M is even."""
    if m < 2:
        raise ValueError(f"population size must be >= 2, got {m}")
    mu = np.asarray(mu, dtype=float)
    dim = mu.size
    if antithetic and m % 2 == 0:
        half = rng.standard_normal((m // 2, dim))
        zs = np.empty((m, dim))
        zs[0::2] = half
        zs[1::2] = -half
    else:
        zs = rng.standard_normal((m, dim))
    members = mu[None, :] + sigma * zs
    if bounds is not None:
        members = np.vstack([wrap_to_bounds(row, bounds) for row in members])
    return PopulationSample(mu=mu.copy(), sigma=float(sigma), zs=zs,
                            members=members)


def estimate_gradient(sample: PopulationSample, sigma: float | None = None,
                      fitness_shaping: str = "none") -> np.ndarray:
    """Gradient of expected fitness w.r.t. mu from population fitnesses.

    Each fitness must already be the mean of that member's shots, so
    (1/(sigma*M)) * sum_i fitness_i * Z_i equals the double-sum estimator
    over individual shots.  "standardize" rescales fitnesses to zero mean
    and unit variance first, falling back to the unshaped form when the
    population variance is zero.
    """
    if sample.fitnesses is None:
        raise ValueError("population has no fitnesses yet")
    sigma = sample.sigma if sigma is None else float(sigma)
    fits = np.asarray(sample.fitnesses, dtype=float)
    m = len(fits)
    if fits.shape != (sample.zs.shape[0],):
        raise ValueError("fitnesses length must match population size")
    if fitness_shaping == "standardize":
        std = float(np.std(fits))
        if std > 0.0:
            fits = (fits - fits.mean()) / std
    elif fitness_shaping != "none":
        raise ValueError(f"unknown fitness_shaping {fitness_shaping!r}")
    return (fits[:, None] * sample.zs).sum(axis=0) / (sigma * m)


def nes_run(obj, cfg: NesConfig, rng, initial_mu=None) -> tuple[OptimizeResult, Trajectory]:
    """Evolve the search mean for cfg.generations generations.

    Each member costs exactly one objective evaluation of
    cfg.shots_per_member shots, so the trajectory has population_size *
    generations records.  Returns the final mean as the answer, plus the
    best sampled value and its location.
    """
    bounds = cfg.bounds
    dim = len(bounds)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    if initial_mu is None:
        mu = lo + rng.uniform(size=dim) * (hi - lo)
    else:
        mu = wrap_to_bounds(initial_mu, bounds)

    best_value = -math.inf
    best_value_x = mu.copy()
    generations_log = []
    for gen in range(1, cfg.generations + 1):
        pop = sample_population(mu, cfg.sigma, cfg.population_size, rng,
                                bounds=bounds, antithetic=cfg.antithetic)
        fits = np.empty(cfg.population_size)
        for i in range(cfg.population_size):
            fits[i] = obj.evaluate(
                pop.members[i], shots=cfg.shots_per_member, phase="nes",
                generation=gen, member=i, z=[float(v) for v in pop.zs[i]],
            )
            if fits[i] > best_value:
                best_value = float(fits[i])
                best_value_x = pop.members[i].copy()
        pop.fitnesses = fits
        grad = estimate_gradient(pop, cfg.sigma, cfg.fitness_shaping)
        mu = wrap_to_bounds(mu + cfg.learning_rate * grad, bounds)
        generations_log.append({
            "generation": gen,
            "mu": [float(v) for v in mu],
            "grad": [float(v) for v in grad],
        })

    exact = obj.exact_cost(mu) if hasattr(obj, "exact_cost") else None
    result = OptimizeResult(
        best_x=mu,
        best_value=best_value,
        best_value_x=best_value_x,
        exact_cost=exact,
        num_evals=cfg.population_size * cfg.generations,
        details={"generations": generations_log},
    )
    return result, obj.trajectory
