import math

import numpy as np
import pytest

from qaoabench import (
    QaoaParams,
    Trajectory,
    TrajectoryRecord,
    brute_force_max_cut,
    diagonal_energies,
    exact_expectation,
    generate_graph,
    kde,
    landscape_grid,
    summarize,
    variance_bound,
)


# ----------------------------------------------------------------------- kde

def test_kde_bandwidth_at_326_samples():
    est = kde(np.zeros(326), np.linspace(-1, 1, 11))
    assert est.bandwidth == pytest.approx(326 ** (-0.2), rel=1e-14)
    assert est.bandwidth == pytest.approx(0.31440, abs=5e-4)


def test_kde_single_sample_peak_value():
    est = kde([0.0], [0.0])
    # n = 1, h = 1: peak density is 1/(n*h) = 1/h
    assert est.density[0] == pytest.approx(1.0 / est.bandwidth, rel=1e-12)


def test_kde_decays_far_from_samples():
    est = kde([0.0], [50.0])
    assert est.density[0] < 1e-10 / est.bandwidth


def test_kde_integral_independent_of_samples():
    # the literal kernel integrates to the same constant for any sample set
    grid = np.linspace(-30, 30, 20_001)
    single = np.trapezoid(kde([0.0], grid).density, grid)
    rng = np.random.default_rng(0)
    multi = np.trapezoid(kde(rng.normal(size=250), grid).density, grid)
    assert multi == pytest.approx(single, rel=0.01)
    assert single == pytest.approx(math.sqrt(math.pi), rel=1e-3)


def test_kde_conventional_flag_normalizes():
    rng = np.random.default_rng(1)
    samples = rng.normal(size=400)
    grid = np.linspace(-12, 12, 4001)
    est = kde(samples, grid, conventional=True)
    assert np.trapezoid(est.density, grid) == pytest.approx(1.0, abs=1e-3)
    assert est.bandwidth == pytest.approx(
        np.std(samples, ddof=1) * 400 ** (-0.2), rel=1e-12
    )


def test_kde_density_nonnegative_and_validated():
    est = kde([0.5, 1.5], np.linspace(0, 2, 55))
    assert np.all(est.density >= 0.0)
    with pytest.raises(ValueError):
        kde([], [0.0])


# -------------------------------------------------------------- variance bound

def test_variance_bound_small_case():
    sigma2, mean_bound = variance_bound(3, 3, depth=1, shots=1)
    assert sigma2 == pytest.approx(90.0)  # 2*3*(2^4 - 1)/1
    assert mean_bound == pytest.approx(90.0)


def test_variance_bound_reference_instance():
    sigma2, mean_bound = variance_bound(12, 16, depth=1, shots=1)
    assert sigma2 == pytest.approx(86_784.0)  # 24*(15^4 - 1)/14
    assert mean_bound == pytest.approx(86_784.0)


def test_variance_bound_shots_scaling():
    sigma2, mean_bound = variance_bound(12, 16, depth=1, shots=4)
    assert mean_bound == pytest.approx(sigma2 / 4)


def test_variance_bound_monotone():
    base = variance_bound(10, 10, 1, 1)[0]
    assert variance_bound(11, 10, 1, 1)[0] > base
    assert variance_bound(10, 11, 1, 1)[0] > base
    assert variance_bound(10, 10, 2, 1)[0] > base
    assert variance_bound(10, 10, 1, 2)[1] < base


def test_variance_bound_domain():
    with pytest.raises(ValueError):
        variance_bound(3, 2)
    with pytest.raises(ValueError):
        variance_bound(-1, 5)
    with pytest.raises(ValueError):
        variance_bound(3, 5, depth=0)
    with pytest.raises(ValueError):
        variance_bound(3, 5, shots=0)


# ----------------------------------------------------------------- summarize

def _toy_trajectory(points, values, shots=1, phase="anneal"):
    traj = Trajectory()
    for k, (x, v) in enumerate(zip(points, values), start=1):
        traj.append(TrajectoryRecord(
            eval_index=k, x=tuple(x), value=float(v), shots=shots, phase=phase,
        ))
    return traj


def test_summarize_gap_zero_at_grid_argmax():
    g = generate_graph(8, 3)
    diag = diagonal_energies(g)
    scape = landscape_grid(diag, (0, math.pi), (0, math.pi), 41)
    i, j = np.unravel_index(np.argmin(scape.values), scape.values.shape)
    best = (scape.gammas[i], scape.betas[j])
    traj = _toy_trajectory([(0.3, 0.4), best], [0.0, 1.0])
    summary = summarize(traj, diag, landscape=scape, grid_resolution=41)
    assert summary["normalized_gap"] == pytest.approx(0.0, abs=1e-12)
    assert summary["normalized_gap_best"] == pytest.approx(0.0, abs=1e-12)
    assert summary["evals"] == 2


def test_summarize_single_record():
    g = generate_graph(6, 1)
    diag = diagonal_energies(g)
    traj = _toy_trajectory([(0.5, 0.5)], [0.25])
    summary = summarize(traj, diag, grid_resolution=21)
    assert summary["evals"] == 1
    assert summary["best_sampled_value"] == 0.25
    expected = exact_expectation(diag, QaoaParams((0.5,), (0.5,)))
    assert summary["exact_C_at_final"] == pytest.approx(expected)
    assert summary["exact_C_at_best"] == pytest.approx(expected)


def test_summarize_reports_phases_shots_and_oracle():
    g = generate_graph(8, 5)
    diag = diagonal_energies(g)
    oracle = brute_force_max_cut(g)
    traj = Trajectory()
    traj.append(TrajectoryRecord(1, (0.1, 0.2), 0.0, 1, "anneal"))
    traj.append(TrajectoryRecord(2, (0.2, 0.3), 0.5, 2, "anneal"))
    traj.append(TrajectoryRecord(3, (0.3, 0.4), -0.5, 4, "local"))
    summary = summarize(traj, diag, oracle, grid_resolution=21)
    assert summary["phase_counts"] == {"anneal": 2, "local": 1}
    assert summary["total_shots"] == 7
    assert summary["oracle"]["max_cut"] == pytest.approx(oracle[0])
    assert summary["oracle"]["min_energy"] == pytest.approx(oracle[2])
    assert summary["kde"]["gamma"]["bandwidth"] == pytest.approx(3 ** (-0.2))
    assert len(summary["kde"]["beta"]["density"]) == len(summary["kde"]["beta"]["grid"])


def test_summarize_gap_normalization():
    g = generate_graph(8, 7)
    diag = diagonal_energies(g)
    scape = landscape_grid(diag, (0, math.pi), (0, math.pi), 41)
    traj = _toy_trajectory([(1.0, 1.0)], [0.2])
    summary = summarize(traj, diag, landscape=scape)
    c = exact_expectation(diag, QaoaParams((1.0,), (1.0,)))
    expected = (c - scape.min_cost) / (scape.max_cost - scape.min_cost)
    assert summary["normalized_gap"] == pytest.approx(expected, abs=1e-12)
    assert 0.0 <= summary["normalized_gap"] <= 1.0


def test_summarize_empty_trajectory_rejected():
    g = generate_graph(6, 1)
    diag = diagonal_energies(g)
    with pytest.raises(ValueError):
        summarize(Trajectory(), diag)


# ---------------------------------------------------------------- trajectory

def test_trajectory_jsonl_round_trip(tmp_path):
    traj = Trajectory()
    traj.append(TrajectoryRecord(1, (0.1, 0.2), -0.5, 1, "anneal",
                                 extra={"temperature": 10.0, "step": 1}))
    traj.append(TrajectoryRecord(2, (0.3, 0.4), 0.5, 3, "nes",
                                 extra={"generation": 1, "member": 0, "z": [0.1, -0.2]}))
    path = tmp_path / "traj.jsonl"
    traj.to_jsonl(path)
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 2
    loaded = Trajectory.from_jsonl(path)
    assert len(loaded) == 2
    assert loaded[0].x == (0.1, 0.2)
    assert loaded[0].extra["temperature"] == 10.0
    assert loaded[1].extra["member"] == 0
    assert loaded[1].shots == 3


def test_trajectory_enforces_order():
    traj = Trajectory()
    traj.append(TrajectoryRecord(1, (0.0,), 0.0, 1, "eval"))
    with pytest.raises(ValueError):
        traj.append(TrajectoryRecord(3, (0.0,), 0.0, 1, "eval"))
