"""Signed weighted graphs for MAX-CUT: generation, evaluation, exact oracles.

The random family draws e = floor(3v/5) distinct edges uniformly from all
vertex pairs, with weights i.i.d. uniform on [-1, 1].  Vertices that end up
with no edges are dropped from the qubit register, so a graph on v vertices
acts on n <= v qubits.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .util import ResourceLimitError

BRUTE_FORCE_MAX_QUBITS = 28
_BRUTE_FORCE_CHUNK = 1 << 20


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected signed weighted graph with a derived qubit register.

    Edges are stored normalized as (i, j, weight) with i < j.  Only
    vertices with degree >= 1 occupy a qubit; qubit_of_vertex maps each
    active vertex to its index in [0, n).
    """

    num_vertices: int
    edges: tuple[tuple[int, int, float], ...]
    active_vertices: tuple[int, ...] = field(init=False)
    qubit_of_vertex: dict[int, int] = field(init=False)

    def __post_init__(self):
        v = self.num_vertices
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"num_vertices must be a positive integer, got {v!r}")
        seen: set[tuple[int, int]] = set()
        normalized = []
        for pos, edge in enumerate(self.edges):
            if len(edge) != 3:
                raise ValueError(f"edge {pos}: expected (i, j, weight), got {edge!r}")
            i, j, w = int(edge[0]), int(edge[1]), float(edge[2])
            if i == j:
                raise ValueError(f"edge {pos}: self-loop ({i}, {j}) is not allowed")
            if i > j:
                i, j = j, i
            if not (0 <= i < j < v):
                raise ValueError(
                    f"edge {pos}: endpoints ({i}, {j}) outside [0, {v})"
                )
            if (i, j) in seen:
                raise ValueError(f"edge {pos}: duplicate edge ({i}, {j})")
            if not math.isfinite(w):
                raise ValueError(f"edge {pos}: weight must be finite, got {w!r}")
            seen.add((i, j))
            normalized.append((i, j, w))
        object.__setattr__(self, "edges", tuple(normalized))
        active = sorted({u for i, j, _ in normalized for u in (i, j)})
        object.__setattr__(self, "active_vertices", tuple(active))
        object.__setattr__(
            self, "qubit_of_vertex", {vert: q for q, vert in enumerate(active)}
        )

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_qubits(self) -> int:
        return len(self.active_vertices)

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def qubit_edges(self) -> list[tuple[int, int, float]]:
        """Edges re-indexed by qubit instead of vertex."""
        q = self.qubit_of_vertex
        return [(q[i], q[j], w) for i, j, w in self.edges]

    def to_dict(self) -> dict:
        return {
            "num_vertices": self.num_vertices,
            "edges": [[i, j, w] for i, j, w in self.edges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WeightedGraph":
        try:
            v = d["num_vertices"]
            edges = d["edges"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"graph document missing field: {exc}") from exc
        if not isinstance(edges, list):
            raise ValueError("'edges' must be a list of [i, j, weight] triples")
        return cls(num_vertices=int(v), edges=tuple(tuple(e) for e in edges))


@dataclass(frozen=True)
class Assignment:
    """Computational-basis outcome: one bit per qubit, indexed by qubit."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"bits must be 0/1, got {self.bits!r}")

    @classmethod
    def from_string(cls, s: str) -> "Assignment":
        return cls(tuple(int(ch) for ch in s))

    @classmethod
    def from_index(cls, index: int, num_qubits: int) -> "Assignment":
        # bit k of the basis index is qubit k
        return cls(tuple((index >> k) & 1 for k in range(num_qubits)))

    def to_index(self) -> int:
        return sum(b << k for k, b in enumerate(self.bits))

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def generate_graph(v: int, seed: int) -> WeightedGraph:
    """Draw a random graph with floor(3v/5) edges and weights in [-1, 1].

    Edges are a uniform random subset of all v(v-1)/2 pairs (Floyd's
    sampling algorithm, O(e) memory); the result is deterministic for a
    fixed seed.
    """
    if not isinstance(v, int) or v < 2:
        raise ValueError(f"need v >= 2 vertices, got {v!r}")
    num_pairs = v * (v - 1) // 2
    num_edges = (3 * v) // 5
    if num_edges > num_pairs:
        raise ValueError(
            f"edge quota {num_edges} exceeds available pairs {num_pairs}"
        )
    rng = np.random.default_rng(seed)
    chosen: set[int] = set()
    for j in range(num_pairs - num_edges, num_pairs):
        t = int(rng.integers(0, j + 1))
        chosen.add(j if t in chosen else t)
    pair_indices = sorted(chosen)
    weights = rng.uniform(-1.0, 1.0, size=num_edges)
    edges = []
    for k, w in zip(pair_indices, weights):
        i, j = _decode_pair(k)
        edges.append((i, j, float(w)))
    return WeightedGraph(num_vertices=v, edges=tuple(edges))


def _decode_pair(k: int) -> tuple[int, int]:
    # colexicographic order: pair (i, j), i < j, has index j(j-1)/2 + i
    j = (1 + math.isqrt(1 + 8 * k)) // 2
    while j * (j - 1) // 2 > k:
        j -= 1
    while (j + 1) * j // 2 <= k:
        j += 1
    i = k - j * (j - 1) // 2
    return i, j


def _check_assignment(g: WeightedGraph, a: Assignment) -> None:
    if len(a) != g.num_qubits:
        raise ValueError(
            f"assignment has {len(a)} bits, graph has {g.num_qubits} qubits"
        )


def cut_value(g: WeightedGraph, a: Assignment) -> float:
    """Total weight of edges whose endpoints land on different sides."""
    _check_assignment(g, a)
    total = 0.0
    for qi, qj, w in g.qubit_edges():
        if a.bits[qi] != a.bits[qj]:
            total += w
    return total


def energy(g: WeightedGraph, a: Assignment) -> float:
    """Sum over edges of w*(1 + z_i z_j)/2 with z = +1 for bit 0, -1 for bit 1.

    Equals the total weight of UNCUT edges; minimizing it maximizes the cut.
    """
    _check_assignment(g, a)
    total = 0.0
    for qi, qj, w in g.qubit_edges():
        zi = 1.0 - 2.0 * a.bits[qi]
        zj = 1.0 - 2.0 * a.bits[qj]
        total += w * (1.0 + zi * zj) / 2.0
    return total


def brute_force_max_cut(g: WeightedGraph) -> tuple[float, Assignment, float]:
    """Exact MAX-CUT by enumeration.

    Fixes the first qubit's bit to 0 (global spin flip leaves the cut
    unchanged), so 2^(n-1) assignments are scanned.  Returns
    (max_cut, argmax assignment, min_energy).
    """
    n = g.num_qubits
    if n > BRUTE_FORCE_MAX_QUBITS:
        raise ResourceLimitError(
            f"brute force limited to {BRUTE_FORCE_MAX_QUBITS} qubits, graph has {n}"
        )
    total = g.total_weight
    if n == 0:
        return 0.0, Assignment(()), total
    qedges = g.qubit_edges()
    half = 1 << (n - 1)
    best_val = -math.inf
    best_rest = 0
    for start in range(0, half, _BRUTE_FORCE_CHUNK):
        stop = min(start + _BRUTE_FORCE_CHUNK, half)
        rest = np.arange(start, stop, dtype=np.int64)
        full = rest << 1  # qubit 0 (bit 0) fixed to 0
        cuts = np.zeros(stop - start)
        for qi, qj, w in qedges:
            differ = ((full >> qi) & 1) != ((full >> qj) & 1)
            cuts += w * differ
        k = int(np.argmax(cuts))
        if cuts[k] > best_val:
            best_val = float(cuts[k])
            best_rest = start + k
    assignment = Assignment.from_index(best_rest << 1, n)
    return best_val, assignment, total - best_val


def positive_cover_number(g: WeightedGraph) -> int:
    """Minimum vertex cover of the strictly-positive-weight subgraph.

    Exhaustive search over subset sizes, ascending from a matching lower
    bound, so the first hit is optimal.
    """
    if g.num_qubits > BRUTE_FORCE_MAX_QUBITS:
        raise ResourceLimitError(
            f"cover search limited to {BRUTE_FORCE_MAX_QUBITS} qubits"
        )
    pos_edges = [(i, j) for i, j, w in g.edges if w > 0.0]
    if not pos_edges:
        return 0
    candidates = sorted({u for e in pos_edges for u in e})
    # greedy maximal matching: cover must include one endpoint per matched edge
    matched: set[int] = set()
    lower = 0
    for i, j in pos_edges:
        if i not in matched and j not in matched:
            matched.update((i, j))
            lower += 1
    for size in range(lower, len(candidates) + 1):
        for subset in combinations(candidates, size):
            chosen = set(subset)
            if all(i in chosen or j in chosen for i, j in pos_edges):
                return size
    return len(candidates)  # unreachable: the full set always covers


def save_graph(g: WeightedGraph, path) -> None:
    Path(path).write_text(json.dumps(g.to_dict(), indent=2) + "\n")


def load_graph(path) -> WeightedGraph:
    """Load and validate the canonical JSON graph format."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    try:
        return WeightedGraph.from_dict(doc)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc
