"""Small shared helpers: periodic box wrapping and resource guards."""
from __future__ import annotations

import numpy as np

Bounds = tuple[tuple[float, float], ...]


class ResourceLimitError(RuntimeError):
    """An operation would exceed a hard size guard (qubit count, etc.)."""


def wrap_to_bounds(x, bounds: Bounds) -> np.ndarray:
    """Wrap a point into the box, treating every dimension as periodic.

    The cost landscape is periodic in the angles, so proposals that leave
    the box re-enter from the opposite side instead of piling up at the
    boundary.
    """
    x = np.asarray(x, dtype=float)
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    return lo + np.mod(x - lo, hi - lo)


def validate_bounds(bounds) -> Bounds:
    out = []
    for dim, pair in enumerate(bounds):
        lo, hi = float(pair[0]), float(pair[1])
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError(f"bounds[{dim}] must satisfy lo < hi, got ({lo}, {hi})")
        out.append((lo, hi))
    if not out:
        raise ValueError("bounds must have at least one dimension")
    return tuple(out)
