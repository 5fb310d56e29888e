import json
import math

import numpy as np
import pytest

from qaoabench import (
    Assignment,
    ResourceLimitError,
    WeightedGraph,
    brute_force_max_cut,
    cut_value,
    energy,
    generate_graph,
    load_graph,
    positive_cover_number,
    save_graph,
)

from oracles import exhaustive_max_cut


def triangle(w=1.0):
    return WeightedGraph(num_vertices=3, edges=((0, 1, w), (0, 2, w), (1, 2, w)))


def single_edge(w=1.0):
    return WeightedGraph(num_vertices=2, edges=((0, 1, w),))


# ---------------------------------------------------------------- generation

def test_generate_graph_paper_scale():
    g = generate_graph(20, seed=3)
    assert g.num_edges == 12  # floor(3*20/5)
    assert all(-1.0 <= w <= 1.0 for _, _, w in g.edges)
    assert all(0 <= i < j < 20 for i, j, _ in g.edges)


def test_generate_graph_small_counts():
    assert generate_graph(5, seed=1).num_edges == 3  # floor(15/5)
    g2 = generate_graph(2, seed=1)
    assert g2.num_edges == 1
    assert g2.edges[0][:2] == (0, 1)  # only possible pair


def test_generate_graph_deterministic():
    a = generate_graph(20, seed=99)
    b = generate_graph(20, seed=99)
    assert a.edges == b.edges
    c = generate_graph(20, seed=98)
    assert c.edges != a.edges


def test_generate_graph_no_duplicate_edges():
    for seed in range(25):
        g = generate_graph(17, seed)
        pairs = [(i, j) for i, j, _ in g.edges]
        assert len(set(pairs)) == len(pairs)


def test_generate_graph_invalid_args():
    with pytest.raises(ValueError):
        generate_graph(1, seed=0)
    with pytest.raises(ValueError):
        generate_graph(0, seed=0)


def test_generate_graph_edge_sampling_uniform():
    # every pair of a K4 should appear with roughly equal frequency
    counts = {}
    trials = 3000
    for seed in range(trials):
        g = generate_graph(4, seed)  # 2 edges out of 6 pairs
        for i, j, _ in g.edges:
            counts[(i, j)] = counts.get((i, j), 0) + 1
    freqs = np.array([counts[p] for p in sorted(counts)])
    assert len(freqs) == 6
    expected = 2 * trials / 6
    assert np.all(np.abs(freqs - expected) < 5 * math.sqrt(expected))


# -------------------------------------------------------------- construction

def test_graph_normalizes_and_validates():
    g = WeightedGraph(num_vertices=4, edges=((2, 0, 0.5),))
    assert g.edges == ((0, 2, 0.5),)
    assert g.active_vertices == (0, 2)
    assert g.qubit_of_vertex == {0: 0, 2: 1}
    assert g.num_qubits == 2
    with pytest.raises(ValueError):
        WeightedGraph(num_vertices=3, edges=((1, 1, 1.0),))
    with pytest.raises(ValueError):
        WeightedGraph(num_vertices=3, edges=((0, 3, 1.0),))
    with pytest.raises(ValueError):
        WeightedGraph(num_vertices=3, edges=((0, 1, 1.0), (1, 0, 2.0)))
    with pytest.raises(ValueError):
        WeightedGraph(num_vertices=3, edges=((0, 1, math.inf),))


def test_isolated_vertices_dropped():
    g = WeightedGraph(num_vertices=10, edges=((3, 7, 1.0),))
    assert g.num_qubits == 2
    assert g.active_vertices == (3, 7)


def test_assignment_round_trip():
    a = Assignment.from_string("0110")
    assert str(a) == "0110"
    assert len(a) == 4
    # bit k of the index is qubit k
    assert Assignment.from_index(a.to_index(), 4) == a
    assert Assignment.from_index(1, 2).bits == (1, 0)


# ------------------------------------------------------------------- energy

def test_cut_and_energy_single_edge():
    g = single_edge(w=0.7)
    assert cut_value(g, Assignment.from_string("01")) == pytest.approx(0.7)
    assert cut_value(g, Assignment.from_string("00")) == 0.0
    assert energy(g, Assignment.from_string("00")) == pytest.approx(0.7)
    assert energy(g, Assignment.from_string("01")) == 0.0


def test_energy_triangle_example():
    # unit triangle, bits "001": edges (0,1) uncut, (0,2) and (1,2) cut
    assert energy(triangle(), Assignment.from_string("001")) == pytest.approx(1.0)


def test_cut_plus_energy_is_total_weight():
    rng = np.random.default_rng(5)
    for seed in range(10):
        g = generate_graph(12, seed)
        for _ in range(20):
            bits = tuple(rng.integers(0, 2, g.num_qubits))
            a = Assignment(bits)
            assert cut_value(g, a) + energy(g, a) == pytest.approx(
                g.total_weight, abs=1e-12
            )


def test_cut_complement_invariance():
    rng = np.random.default_rng(6)
    g = generate_graph(15, 4)
    for _ in range(50):
        bits = tuple(int(b) for b in rng.integers(0, 2, g.num_qubits))
        comp = tuple(1 - b for b in bits)
        assert cut_value(g, Assignment(bits)) == pytest.approx(
            cut_value(g, Assignment(comp)), abs=1e-12
        )


def test_length_mismatch_rejected():
    g = triangle()
    with pytest.raises(ValueError):
        cut_value(g, Assignment.from_string("01"))
    with pytest.raises(ValueError):
        energy(g, Assignment.from_string("0101"))


# -------------------------------------------------------------- brute force

def test_brute_force_examples():
    assert brute_force_max_cut(single_edge(1.0))[0] == pytest.approx(1.0)
    max_cut, argmax, min_energy = brute_force_max_cut(triangle())
    assert max_cut == pytest.approx(2.0)  # 4 partition classes: cuts 0,2,2,2
    assert min_energy == pytest.approx(1.0)
    assert cut_value(triangle(), argmax) == pytest.approx(2.0)
    # negative edge: best is not to cut
    max_cut, argmax, min_energy = brute_force_max_cut(single_edge(-0.5))
    assert max_cut == 0.0
    assert min_energy == pytest.approx(-0.5)


def test_brute_force_matches_plain_enumeration():
    for seed in range(8):
        g = generate_graph(10, seed)
        expected = exhaustive_max_cut(g.qubit_edges(), g.num_qubits)
        got, argmax, min_e = brute_force_max_cut(g)
        assert got == pytest.approx(expected, abs=1e-12)
        assert min_e == pytest.approx(g.total_weight - expected, abs=1e-12)
        assert cut_value(g, argmax) == pytest.approx(expected, abs=1e-12)


def test_brute_force_dominates_random_assignments():
    g = generate_graph(20, 11)
    best, _, _ = brute_force_max_cut(g)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        a = Assignment(tuple(int(b) for b in rng.integers(0, 2, g.num_qubits)))
        assert cut_value(g, a) <= best + 1e-12


def test_brute_force_size_guard():
    g = WeightedGraph(
        num_vertices=40,
        edges=tuple((i, i + 1, 1.0) for i in range(29)),  # path on 30 vertices
    )
    with pytest.raises(ResourceLimitError):
        brute_force_max_cut(g)


# -------------------------------------------------------------- cover number

def test_cover_number_examples():
    all_negative = WeightedGraph(
        num_vertices=4, edges=((0, 1, -0.2), (1, 2, -0.9))
    )
    assert positive_cover_number(all_negative) == 0
    assert positive_cover_number(single_edge(0.3)) == 1
    star = WeightedGraph(
        num_vertices=5, edges=tuple((0, k, 1.0) for k in range(1, 5))
    )
    assert positive_cover_number(star) == 1


def test_cover_number_zero_iff_no_positive_edge():
    for seed in range(12):
        g = generate_graph(10, seed)
        has_positive = any(w > 0 for _, _, w in g.edges)
        assert (positive_cover_number(g) == 0) == (not has_positive)


def test_cover_number_covers_every_positive_edge():
    # cross-check smallest size by brute force over all subsets
    from itertools import combinations

    for seed in range(6):
        g = generate_graph(10, seed)
        pos = [(i, j) for i, j, w in g.edges if w > 0]
        verts = sorted({u for e in pos for u in e})
        expected = 0
        if pos:
            expected = None
            for size in range(len(verts) + 1):
                for sub in combinations(verts, size):
                    s = set(sub)
                    if all(i in s or j in s for i, j in pos):
                        expected = size
                        break
                if expected is not None:
                    break
        assert positive_cover_number(g) == expected


# --------------------------------------------------------------------- files

def test_graph_json_round_trip(tmp_path):
    g = generate_graph(20, 17)
    path = tmp_path / "graph.json"
    save_graph(g, path)
    loaded = load_graph(path)
    assert loaded == g


def test_loader_rejects_bad_documents(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"num_vertices": 3, "edges": [[0, 0, 1.0]]}')
    with pytest.raises(ValueError, match="self-loop"):
        load_graph(path)
    path.write_text('{"num_vertices": 3, "edges": [[0, 1, 1.0], [1, 0, 2.0]]}')
    with pytest.raises(ValueError, match="edge 1.*duplicate"):
        load_graph(path)
    path.write_text('{"num_vertices": 3}')
    with pytest.raises(ValueError, match="missing"):
        load_graph(path)
    path.write_text("{not json")
    with pytest.raises(ValueError, match="invalid JSON"):
        load_graph(path)


def test_loader_reports_edge_position(tmp_path):
    path = tmp_path / "bad.json"
    doc = {"num_vertices": 5, "edges": [[0, 1, 0.5], [1, 2, 0.5], [2, 7, 0.5]]}
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="edge 2"):
        load_graph(path)
