"""Post-hoc analysis: kernel density estimates of sampled parameters, the
single-shot variance bound, and trajectory summaries against exact oracles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .anneal import DEFAULT_BOUNDS
from .qaoa import DiagonalEnergies, Landscape, QaoaParams, exact_expectation, landscape_grid
from .trajectory import Trajectory


@dataclass(frozen=True)
class KdeEstimate:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    sample_count: int
    dimension: int = 1

    def to_dict(self) -> dict:
        return {
            "grid": [float(v) for v in self.grid],
            "density": [float(v) for v in self.density],
            "bandwidth": float(self.bandwidth),
            "n": int(self.sample_count),
            "d": int(self.dimension),
        }


def kde(samples, grid, conventional: bool = False) -> KdeEstimate:
    """1-D kernel density estimate with bandwidth h = n^(-1/5).

    The default evaluates f(x) = (1/(n h)) * sum_i exp(-(x - x_i)^2 / h^2):
    no 1/2 in the exponent and no 1/sqrt(2 pi), so it integrates to
    sqrt(pi) rather than 1.  That is fine for relative peak finding.  With
    conventional=True the textbook Gaussian estimator is used instead
    (h scaled by the sample standard deviation, unit integral).
    """
    samples = np.asarray(samples, dtype=float).ravel()
    grid = np.asarray(grid, dtype=float).ravel()
    n = samples.size
    if n < 1:
        raise ValueError("kde needs at least one sample")
    h = n ** (-1.0 / 5.0)
    sq = (grid[:, None] - samples[None, :]) ** 2
    if conventional:
        spread = float(np.std(samples, ddof=1)) if n > 1 else 1.0
        h *= spread if spread > 0 else 1.0
        density = np.exp(-sq / (2.0 * h * h)).sum(axis=1) / (n * h * math.sqrt(2.0 * math.pi))
    else:
        density = np.exp(-sq / (h * h)).sum(axis=1) / (n * h)
    return KdeEstimate(grid=grid, density=density, bandwidth=h, sample_count=n)


def variance_bound(num_edges: int, num_vertices: int, depth: int = 1,
                   shots: int = 1) -> tuple[float, float]:
    """Upper bound on the single-shot cost variance and on the sample mean.

    Returns (sigma2_bound, sigma2_bound / shots) with
    sigma2_bound = 2 e ((v-1)^(2p+2) - 1) / ((v-1) - 1).  Whether v counts
    all vertices or only active ones is the caller's choice; both
    conventions are in circulation.
    """
    if num_vertices < 3:
        raise ValueError(
            f"bound needs v >= 3 (the geometric-series denominator vanishes), got {num_vertices}"
        )
    if num_edges < 0:
        raise ValueError(f"num_edges must be >= 0, got {num_edges}")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    v1 = num_vertices - 1
    sigma2 = 2.0 * num_edges * (float(v1) ** (2 * depth + 2) - 1.0) / (v1 - 1.0)
    return sigma2, sigma2 / shots


def _normalized_gap(cost: float, landscape: Landscape) -> float:
    span = landscape.max_cost - landscape.min_cost
    if span <= 0.0:
        return 0.0
    return (cost - landscape.min_cost) / span


def summarize(traj: Trajectory, diag: DiagonalEnergies, oracle=None, *,
              landscape: Landscape | None = None, bounds=DEFAULT_BOUNDS,
              grid_resolution: int = 101, kde_points: int = 201) -> dict:
    """Summary record for a finished run.

    Reports exact cost at the final and at the best-sampled point, their
    gaps to the grid-scan optimum normalized by the landscape range,
    per-phase evaluation counts, and marginal KDEs of the sampled angles.
    oracle, when given, is the (max_cut, argmax, min_energy) triple from
    the brute-force solver.
    """
    if len(traj) == 0:
        raise ValueError("trajectory is empty")
    if landscape is None:
        landscape = landscape_grid(diag, bounds[0], bounds[1], grid_resolution)
    points = traj.points
    values = traj.values
    best_idx = int(np.argmax(values))
    final_x = points[-1]
    best_x = points[best_idx]
    cost_final = exact_expectation(diag, QaoaParams.from_vector(final_x))
    cost_best = exact_expectation(diag, QaoaParams.from_vector(best_x))

    gamma_grid = np.linspace(bounds[0][0], bounds[0][1], kde_points)
    beta_grid = np.linspace(bounds[1][0], bounds[1][1], kde_points)
    kde_gamma = kde(points[:, 0], gamma_grid)
    kde_beta = kde(points[:, 1], beta_grid)

    summary = {
        "evals": len(traj),
        "total_shots": traj.total_shots(),
        "phase_counts": traj.phase_counts(),
        "best_sampled_value": float(values[best_idx]),
        "best_sampled_x": [float(v) for v in best_x],
        "exact_C_at_best": cost_best,
        "final_x": [float(v) for v in final_x],
        "exact_C_at_final": cost_final,
        "normalized_gap": _normalized_gap(cost_final, landscape),
        "normalized_gap_best": _normalized_gap(cost_best, landscape),
        "landscape_min_C": landscape.min_cost,
        "landscape_max_C": landscape.max_cost,
        "kde": {"gamma": kde_gamma.to_dict(), "beta": kde_beta.to_dict()},
    }
    if oracle is not None:
        max_cut, argmax, min_energy = oracle
        summary["oracle"] = {
            "max_cut": float(max_cut),
            "argmax": str(argmax),
            "min_energy": float(min_energy),
        }
    return summary
