"""Evaluation logging shared by every optimizer and the analysis tools.

A Trajectory is the ordered record of every objective evaluation in a run
(the "one line per shot batch" artifact written as JSON lines).  The
FunctionObjective adapter gives plain test functions the same evaluate /
count / log surface as the quantum sampling objective.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

_CORE_KEYS = ("eval", "phase", "x", "value", "shots")


@dataclass
class TrajectoryRecord:
    eval_index: int  # 1-based, strictly increasing
    x: tuple[float, ...]
    value: float  # sample mean of the maximized objective at x
    shots: int
    phase: str
    extra: dict[str, Any] = field(default_factory=dict)

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "eval": self.eval_index,
            "phase": self.phase,
            "x": [float(v) for v in self.x],
            "value": float(self.value),
            "shots": int(self.shots),
        }
        for key, val in self.extra.items():
            if key not in out:
                out[key] = val
        return out

    @classmethod
    def from_json_dict(cls, d: dict[str, Any]) -> "TrajectoryRecord":
        extra = {k: v for k, v in d.items() if k not in _CORE_KEYS}
        return cls(
            eval_index=int(d["eval"]),
            x=tuple(float(v) for v in d["x"]),
            value=float(d["value"]),
            shots=int(d.get("shots", 1)),
            phase=str(d.get("phase", "eval")),
            extra=extra,
        )


class Trajectory:
    """Append-only log of evaluations with strictly increasing indices."""

    def __init__(self, records=None):
        self.records: list[TrajectoryRecord] = []
        for rec in records or ():
            self.append(rec)

    def append(self, record: TrajectoryRecord) -> None:
        expected = len(self.records) + 1
        if record.eval_index != expected:
            raise ValueError(
                f"eval index {record.eval_index} out of order, expected {expected}"
            )
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, idx):
        return self.records[idx]

    @property
    def points(self) -> np.ndarray:
        return np.array([r.x for r in self.records], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records], dtype=float)

    def total_shots(self) -> int:
        return sum(r.shots for r in self.records)

    def phase_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for rec in self.records:
            counts[rec.phase] = counts.get(rec.phase, 0) + 1
        return counts

    def to_jsonl(self, path) -> None:
        path = Path(path)
        with path.open("w") as fh:
            for rec in self.records:
                fh.write(json.dumps(rec.to_json_dict()) + "\n")

    @classmethod
    def from_jsonl(cls, path) -> "Trajectory":
        traj = cls()
        with Path(path).open() as fh:
            for line in fh:
                line = line.strip()
                if line:
                    traj.append(TrajectoryRecord.from_json_dict(json.loads(line)))
        return traj


@dataclass
class OptimizeResult:
    """Outcome of an optimizer run.

    best_x is the answer the optimizer stands behind (annealing: the best
    sampled point; NES: the final population mean).  best_value /
    best_value_x track the single best sampled objective value seen
    anywhere in the run, which may differ for NES.
    """

    best_x: np.ndarray
    best_value: float
    best_value_x: np.ndarray
    exact_cost: float | None
    num_evals: int
    details: dict[str, Any] = field(default_factory=dict)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "best_x": [float(v) for v in np.atleast_1d(self.best_x)],
            "best_value": float(self.best_value),
            "best_value_x": [float(v) for v in np.atleast_1d(self.best_value_x)],
            "exact_cost": None if self.exact_cost is None else float(self.exact_cost),
            "num_evals": int(self.num_evals),
            "details": self.details,
        }


class FunctionObjective:
    """Evaluator over a plain function with the standard logging surface.

    Used for optimizer sanity checks on known landscapes.  ``fn`` is
    maximized.  With ``noise_sigma > 0`` each evaluation returns the true
    value plus Gaussian noise of standard deviation noise_sigma/sqrt(shots),
    emulating a sample mean.
    """

    def __init__(self, fn: Callable[[np.ndarray], float], shots_per_eval: int = 1,
                 noise_sigma: float = 0.0, rng=None):
        self.fn = fn
        self.shots_per_eval = int(shots_per_eval)
        self.noise_sigma = float(noise_sigma)
        self.rng = rng if rng is not None else np.random.default_rng()
        self.eval_count = 0
        self.trajectory = Trajectory()

    def evaluate(self, x, *, shots: int | None = None, phase: str = "eval",
                 **extra) -> float:
        x = np.asarray(x, dtype=float)
        n = self.shots_per_eval if shots is None else int(shots)
        value = float(self.fn(x))
        if self.noise_sigma > 0.0:
            value += self.noise_sigma / np.sqrt(n) * self.rng.standard_normal()
        self.eval_count += 1
        self.trajectory.append(TrajectoryRecord(
            eval_index=self.eval_count,
            x=tuple(float(v) for v in x),
            value=value,
            shots=n,
            phase=phase,
            extra=dict(extra),
        ))
        return value

    def exact_cost(self, x) -> float:
        # cost convention: the minimized quantity is the negative of fn
        return -float(self.fn(np.asarray(x, dtype=float)))
