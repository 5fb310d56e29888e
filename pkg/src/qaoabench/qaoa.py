"""Exact statevector simulation of the alternating-layer MAX-CUT circuit.

The cost Hamiltonian is diagonal, so a layer is one elementwise phase
multiply followed by mixer kernels swept over the qubits; no gate-level
circuit representation is needed.  Basis convention everywhere: bit k of
the basis index is qubit k.

The ShotObjective emulates a shot-limited quantum computer: every call
prepares the state for the requested angles, draws N computational-basis
samples, and returns the sample mean of minus the energy (the maximized
objective).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Assignment, WeightedGraph
from .trajectory import Trajectory, TrajectoryRecord
from .util import ResourceLimitError

STATEVECTOR_MAX_QUBITS = 26

# mixer kernels are applied to blocks of qubits at once: fewer passes over
# the state, and each pass is one contiguous matmul
_MIXER_BLOCK = 4

# structured landscape evaluation extracts pair couplings from the diagonal,
# which costs O(n^2 2^n) once; past this size fall back to direct evaluation
_FAST_GRID_MAX_QUBITS = 20


@dataclass(frozen=True)
class QaoaParams:
    """Angle vectors (radians) for a depth-p alternating ansatz."""

    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        gammas = tuple(float(g) for g in self.gammas)
        betas = tuple(float(b) for b in self.betas)
        if len(gammas) != len(betas) or not gammas:
            raise ValueError("gammas and betas must share a length p >= 1")
        if not all(math.isfinite(v) for v in gammas + betas):
            raise ValueError("angles must be finite")
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "betas", betas)

    @property
    def p(self) -> int:
        return len(self.gammas)

    @classmethod
    def from_vector(cls, x) -> "QaoaParams":
        """Build from the flat layout [gamma_1..gamma_p, beta_1..beta_p]."""
        x = np.asarray(x, dtype=float).ravel()
        if len(x) % 2 != 0 or len(x) == 0:
            raise ValueError(f"parameter vector must have even length, got {len(x)}")
        p = len(x) // 2
        return cls(gammas=tuple(x[:p]), betas=tuple(x[p:]))

    def to_vector(self) -> np.ndarray:
        return np.array(self.gammas + self.betas, dtype=float)


@dataclass(frozen=True)
class DiagonalEnergies:
    """Energies of every computational basis state for one graph."""

    values: np.ndarray
    num_qubits: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"need 2^{self.num_qubits} values, got shape {values.shape}"
            )
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_phase_table", None)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def _phases(self, gamma: float) -> np.ndarray:
        """exp(-i*gamma*E) via a table of distinct energies.

        Graph spectra repeat heavily (at most 2^edges distinct values), so
        exponentiating the distinct values and gathering is much cheaper
        than a full-length complex exp.
        """
        if self._phase_table is None:
            unique, inverse = np.unique(self.values, return_inverse=True)
            if unique.size > self.dim // 4:
                unique, inverse = None, None  # no repetition worth exploiting
            object.__setattr__(self, "_phase_table", (unique, inverse))
        unique, inverse = self._phase_table
        if unique is None:
            return np.exp(-1j * gamma * self.values)
        return np.exp(-1j * gamma * unique)[inverse]


def diagonal_energies(g: WeightedGraph) -> DiagonalEnergies:
    """Evaluate the cost Hamiltonian on every basis state."""
    n = g.num_qubits
    if n > STATEVECTOR_MAX_QUBITS:
        raise ResourceLimitError(
            f"statevector limited to {STATEVECTOR_MAX_QUBITS} qubits, graph has {n}"
        )
    idx = np.arange(1 << n, dtype=np.int64)
    values = np.zeros(1 << n)
    for qi, qj, w in g.qubit_edges():
        same = ((idx >> qi) & 1) == ((idx >> qj) & 1)
        values += w * same  # w*(1 + z_i z_j)/2 is w when bits agree, else 0
    return DiagonalEnergies(values=values, num_qubits=n)


def _mixer_kernel(beta: float, block: int) -> np.ndarray:
    c, s = math.cos(beta), math.sin(beta)
    k1 = np.array([[c, -1j * s], [-1j * s, c]])
    kernel = np.array([[1.0 + 0j]])
    for _ in range(block):
        kernel = np.kron(kernel, k1)
    return kernel


def _apply_mixer(psi: np.ndarray, n: int, beta: float) -> np.ndarray:
    """Apply exp(-i*beta*X) to every qubit.

    Works in blocks: apply the block kernel to the low bits (a contiguous
    matmul), then rotate those bits to the top.  The rotations sum to n, so
    the original bit order is restored after the last block.
    """
    remaining = n
    while remaining > 0:
        block = min(_MIXER_BLOCK, remaining)
        kernel = _mixer_kernel(beta, block)
        m = psi.reshape(-1, 1 << block) @ kernel.T
        psi = np.ascontiguousarray(m.T).reshape(-1)
        remaining -= block
    return psi


def evolve(diag: DiagonalEnergies, params: QaoaParams) -> np.ndarray:
    """Apply the alternating circuit to the uniform superposition.

    Per layer: multiply amplitude b by exp(-i*gamma*E_b), then apply the
    single-qubit mixer kernel [[cos b, -i sin b], [-i sin b, cos b]] to
    every qubit.  Returns the complex amplitude vector (unit norm).
    """
    n = diag.num_qubits
    dim = diag.dim
    psi = np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)
    for gamma, beta in zip(params.gammas, params.betas):
        psi = psi * diag._phases(gamma)
        psi = _apply_mixer(psi, n, beta)
    return psi


def exact_expectation(diag: DiagonalEnergies, params: QaoaParams) -> float:
    """Exact cost <psi|H|psi> for the prepared state."""
    psi = evolve(diag, params)
    probs = np.abs(psi) ** 2
    return float(np.dot(probs, diag.values))


@dataclass(frozen=True)
class Landscape:
    """Exact cost on an inclusive grid; values[i][j] pairs gammas[i], betas[j]."""

    gammas: np.ndarray
    betas: np.ndarray
    values: np.ndarray

    def to_dict(self) -> dict:
        return {
            "gammas": [float(v) for v in self.gammas],
            "betas": [float(v) for v in self.betas],
            "values": [[float(v) for v in row] for row in self.values],
        }

    @property
    def min_cost(self) -> float:
        return float(self.values.min())

    @property
    def max_cost(self) -> float:
        return float(self.values.max())


def landscape_grid(diag: DiagonalEnergies, gamma_range, beta_range,
                   resolution: int, p: int = 1) -> Landscape:
    """Exact cost over an inclusive 2-D grid (depth-1 circuits only)."""
    if p != 1:
        raise ValueError("landscape grid is 2-D by construction and needs p = 1")
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    gammas = np.linspace(float(gamma_range[0]), float(gamma_range[1]), resolution)
    betas = np.linspace(float(beta_range[0]), float(beta_range[1]), resolution)
    values = _grid_structured(diag, gammas, betas)
    if values is None:
        values = np.empty((resolution, resolution))
        for i, gamma in enumerate(gammas):
            for j, beta in enumerate(betas):
                values[i, j] = exact_expectation(
                    diag, QaoaParams(gammas=(gamma,), betas=(beta,))
                )
    return Landscape(gammas=gammas, betas=betas, values=values)


def _grid_structured(diag: DiagonalEnergies, gammas: np.ndarray,
                     betas: np.ndarray) -> np.ndarray | None:
    """Whole-grid evaluation using the 2-local structure of the diagonal.

    For H = c0 + sum c_ij Z_i Z_j, pushing the mixer through each term gives

        C(gamma, beta) = c0 + sin(4 beta)/2 * P1(gamma) + sin(2 beta)^2 * P2(gamma)

    where P1 and P2 are fixed gamma-profiles assembled from single- and
    double-flip phase differences of the diagonal (<Z_i Y_j>, <Y_i Z_j> and
    <Y_i Y_j> in the phase-separated state; <Z_i Z_j> vanishes there).
    Returns None when the diagonal is not of 2-local form, or too large to
    decompose; callers then evaluate the grid directly.
    """
    n = diag.num_qubits
    if n < 2 or n > _FAST_GRID_MAX_QUBITS:
        return None
    energies = diag.values
    dim = diag.dim
    scale = max(1.0, float(np.max(np.abs(energies))))
    z = np.empty((n, dim))
    idx = np.arange(dim, dtype=np.int64)
    for k in range(n):
        z[k] = 1.0 - 2.0 * ((idx >> k) & 1)

    c0 = float(energies.mean())
    pairs = []
    for qj in range(n):
        for qi in range(qj):
            coeff = float(np.dot(energies, z[qi] * z[qj])) / dim
            if abs(coeff) > 1e-12 * scale:
                pairs.append((qi, qj, coeff))

    recon = np.full(dim, c0)
    for qi, qj, coeff in pairs:
        recon += coeff * z[qi] * z[qj]
    if float(np.max(np.abs(recon - energies))) > 1e-9 * scale:
        return None  # constant or higher than 2-local content present

    def flip(arr: np.ndarray, qubit: int) -> np.ndarray:
        return arr.reshape(-1, 2, 1 << qubit)[:, ::-1, :].reshape(-1)

    def profile(delta: np.ndarray, signs: np.ndarray) -> np.ndarray:
        # sum_b signs_b * exp(i*gamma*delta_b), grouped by distinct delta
        unique, inverse = np.unique(delta, return_inverse=True)
        weights = np.bincount(inverse, weights=signs, minlength=unique.size)
        return np.exp(1j * np.outer(gammas, unique)) @ weights

    p1 = np.zeros(gammas.size)
    p2 = np.zeros(gammas.size)
    for qi, qj, coeff in pairs:
        signs = z[qi] * z[qj]
        d_i = energies - flip(energies, qi)
        d_j = energies - flip(energies, qj)
        d_ij = energies - flip(flip(energies, qi), qj)
        t_zy = np.imag(profile(d_j, signs)) / dim
        t_yz = np.imag(profile(d_i, signs)) / dim
        t_yy = -np.real(profile(d_ij, signs)) / dim
        p1 += coeff * (t_zy + t_yz)
        p2 += coeff * t_yy
    sin4b = np.sin(4.0 * betas) / 2.0
    sin2b_sq = np.sin(2.0 * betas) ** 2
    return c0 + np.outer(p1, sin4b) + np.outer(p2, sin2b_sq)


class ShotObjective:
    """Stateful shot-limited evaluator: params -> sample mean of -energy.

    Owns the evaluation counter, the RNG stream, and the trajectory sink.
    Identical seed plus call sequence reproduces identical outputs.  The
    state is re-evolved on every call, exactly as hardware would re-prepare
    it.  Not thread-safe; parallel trials each construct their own.
    """

    def __init__(self, diag: DiagonalEnergies, shots_per_eval: int = 1,
                 rng=None, seed=None):
        if shots_per_eval < 1:
            raise ValueError(f"shots_per_eval must be >= 1, got {shots_per_eval}")
        self.diag = diag
        self.shots_per_eval = int(shots_per_eval)
        if rng is None:
            rng = np.random.default_rng(seed)
        self.rng = rng
        self.eval_count = 0
        self.trajectory = Trajectory()

    def sample(self, params: QaoaParams, *, shots: int | None = None,
               phase: str = "eval", **extra) -> tuple[float, list[Assignment]]:
        """Draw shots from |psi|^2 and return (mean of -energy, outcomes)."""
        n = self.shots_per_eval if shots is None else int(shots)
        if n < 1:
            raise ValueError(f"shots must be >= 1, got {n}")
        psi = evolve(self.diag, params)
        cdf = np.cumsum(np.abs(psi) ** 2)
        cdf[-1] = 1.0
        draws = self.rng.random(n)
        indices = np.searchsorted(cdf, draws, side="right")
        indices = np.minimum(indices, self.diag.dim - 1)
        mean_value = float(np.mean(-self.diag.values[indices]))
        outcomes = [Assignment.from_index(int(b), self.diag.num_qubits)
                    for b in indices]
        self.eval_count += 1
        self.trajectory.append(TrajectoryRecord(
            eval_index=self.eval_count,
            x=tuple(params.to_vector()),
            value=mean_value,
            shots=n,
            phase=phase,
            extra=dict(extra),
        ))
        return mean_value, outcomes

    def evaluate(self, x, *, shots: int | None = None, phase: str = "eval",
                 **extra) -> float:
        """Optimizer entry point over the flat [gammas, betas] vector."""
        params = QaoaParams.from_vector(x)
        mean_value, _ = self.sample(params, shots=shots, phase=phase, **extra)
        return mean_value

    def exact_cost(self, x) -> float:
        return exact_expectation(self.diag, QaoaParams.from_vector(x))


def sample_shots(obj: ShotObjective, params: QaoaParams,
                 **kwargs) -> tuple[float, list[Assignment]]:
    """Functional alias for ShotObjective.sample."""
    return obj.sample(params, **kwargs)
