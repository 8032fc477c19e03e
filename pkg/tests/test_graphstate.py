import math

import numpy as np
import pytest

from wgstate.geometry import (
    Cutoff,
    EdgeProfile,
    Lattice,
    PhaseProfile,
    PowerLaw,
    centered_block,
)
from wgstate.graphstate import (
    BinaryMatrix,
    NotAGraphStateError,
    adjacency_from_profile,
    analytic_block_entropy,
    block_adjacency,
    block_slice,
    connected_vertex_count,
    gf2_rank,
    graph_block_entropy,
    read_edge_list,
    write_edge_list,
)


def dense_gf2_rank(a):
    """Plain dense elimination mod 2, as an independent check."""
    a = (np.asarray(a) % 2).astype(np.uint8).copy()
    rank = 0
    for col in range(a.shape[1]):
        rows = np.nonzero(a[rank:, col])[0]
        if rows.size == 0:
            continue
        pivot = rank + rows[0]
        a[[rank, pivot]] = a[[pivot, rank]]
        hits = np.nonzero(a[:, col])[0]
        a[hits[hits != rank]] ^= a[rank]
        rank += 1
        if rank == a.shape[0]:
            break
    return rank


def test_binary_matrix_roundtrip():
    rng = np.random.default_rng(41)
    for n_cols in (1, 7, 64, 65, 130):
        dense = rng.integers(0, 2, size=(5, n_cols))
        mat = BinaryMatrix.from_dense(dense)
        assert mat.n_rows == 5 and mat.n_cols == n_cols
        assert np.array_equal(mat.to_dense(), dense)


def test_binary_matrix_get_set():
    mat = BinaryMatrix.zeros(3, 100)
    mat.set(1, 0)
    mat.set(1, 63)
    mat.set(2, 64)
    mat.set(2, 99)
    assert mat.get(1, 0) == 1 and mat.get(1, 63) == 1
    assert mat.get(1, 64) == 0
    assert mat.get(2, 64) == 1 and mat.get(2, 99) == 1
    mat.set(1, 63, 0)
    assert mat.get(1, 63) == 0
    assert np.array_equal(mat.row_any(), [False, True, True])


def test_binary_matrix_validates():
    with pytest.raises(ValueError):
        BinaryMatrix(np.zeros((2, 1), dtype=np.uint64), n_cols=65)
    with pytest.raises(ValueError):
        BinaryMatrix.from_dense(np.zeros(4))


def test_gf2_rank_small_cases():
    assert gf2_rank(np.eye(5)) == 5
    assert gf2_rank(np.ones((2, 2))) == 1
    assert gf2_rank(np.zeros((3, 4))) == 0
    # over GF(2), [[1,1],[1,1],[0,0]] has a single independent row
    assert gf2_rank(np.array([[1, 1], [1, 1], [0, 0]])) == 1
    # XOR dependency: row3 = row1 ^ row2
    m = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert gf2_rank(m) == 2


def test_gf2_rank_matches_dense_elimination():
    rng = np.random.default_rng(43)
    for _ in range(25):
        shape = (int(rng.integers(1, 12)), int(rng.integers(1, 150)))
        dense = rng.integers(0, 2, size=shape)
        assert gf2_rank(dense) == dense_gf2_rank(dense)


def test_gf2_rank_transpose_invariant():
    rng = np.random.default_rng(45)
    for _ in range(15):
        dense = rng.integers(0, 2, size=(int(rng.integers(1, 10)),
                                         int(rng.integers(1, 90))))
        assert gf2_rank(dense) == gf2_rank(dense.T)


def test_adjacency_from_nearest_neighbor_profile():
    lat = Lattice(5)
    prof = PhaseProfile(lat, Cutoff(reach=1.0), time=math.pi)
    dense = adjacency_from_profile(prof).to_dense()
    expected = np.zeros((5, 5), dtype=int)
    for k in range(4):
        expected[k, k + 1] = expected[k + 1, k] = 1
    assert np.array_equal(dense, expected)


def test_adjacency_band_width_follows_reach():
    lat = Lattice(9)
    prof = PhaseProfile(lat, Cutoff(reach=2.0), time=math.pi)
    dense = adjacency_from_profile(prof).to_dense()
    assert np.array_equal(dense, dense.T)
    assert not dense.diagonal().any()
    assert dense[4].sum() == 4  # two neighbors on each side


def test_adjacency_rejects_generic_phases():
    lat = Lattice(6)
    prof = PhaseProfile(lat, PowerLaw(alpha=3.0), time=0.3 * math.pi)
    with pytest.raises(NotAGraphStateError):
        adjacency_from_profile(prof)
    with pytest.raises(NotAGraphStateError):
        block_adjacency(prof, [2, 3])


def test_adjacency_from_edge_profile():
    prof = EdgeProfile.from_edges(5, [(0, 4), (1, 2)])
    dense = adjacency_from_profile(prof).to_dense()
    expected = np.zeros((5, 5), dtype=int)
    expected[0, 4] = expected[4, 0] = 1
    expected[1, 2] = expected[2, 1] = 1
    assert np.array_equal(dense, expected)


def test_block_adjacency_equals_full_slice():
    rng = np.random.default_rng(47)
    for _ in range(8):
        n = int(rng.integers(6, 30))
        lat = Lattice(n, str(rng.choice(["open", "periodic"])))
        prof = PhaseProfile(lat, Cutoff(reach=float(rng.integers(1, 4))),
                            time=math.pi)
        size = int(rng.integers(1, 5))
        block = rng.choice(n, size=size, replace=False)
        direct = block_adjacency(prof, block)
        sliced = block_slice(adjacency_from_profile(prof), block)
        assert np.array_equal(direct.to_dense(), sliced.to_dense())


def test_block_adjacency_validates():
    lat = Lattice(10)
    prof = PhaseProfile(lat, Cutoff(reach=1.0), time=math.pi)
    with pytest.raises(ValueError):
        block_adjacency(prof, [])
    with pytest.raises(ValueError):
        block_adjacency(prof, [3, 3])
    with pytest.raises(ValueError):
        block_adjacency(prof, [10])
    with pytest.raises(ValueError):
        block_slice(block_adjacency(prof, [0, 1]), [0])


def test_graph_block_entropy_isolated_block():
    prof = EdgeProfile.from_edges(6, [(0, 1)])
    adj = adjacency_from_profile(prof)
    assert graph_block_entropy(adj, [3, 4]) == 0


def test_graph_block_entropy_interior_chain_block():
    lat = Lattice(40)
    prof = PhaseProfile(lat, Cutoff(reach=1.0), time=math.pi)
    adj = adjacency_from_profile(prof)
    gamma = block_slice(adj, np.arange(10, 20))
    assert graph_block_entropy(adj, np.arange(10, 20)) == 2
    assert connected_vertex_count(gamma) == 2


def test_graph_block_entropy_wide_band():
    lat = Lattice(40)
    prof = PhaseProfile(lat, Cutoff(reach=3.0), time=math.pi)
    adj = adjacency_from_profile(prof)
    assert graph_block_entropy(adj, np.arange(15, 25)) == 6


def test_graph_block_entropy_square_block():
    lat = Lattice((12, 12))
    prof = PhaseProfile(lat, Cutoff(reach=1.0), time=math.pi)
    block = centered_block(lat, 3)
    rank = gf2_rank(block_adjacency(prof, block))
    assert rank == 8
    assert rank == analytic_block_entropy(2, 3, 1.0)


def test_rank_degenerate_below_vertex_count():
    # two block sites with identical edge patterns: 2 connected vertices
    # but only 1 independent row
    prof = EdgeProfile.from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    gamma = block_adjacency(prof, [0, 1])
    assert connected_vertex_count(gamma) == 2
    assert gf2_rank(gamma) == 1


def test_analytic_block_entropy_values():
    assert analytic_block_entropy(1, 10, 2.0) == 4
    assert analytic_block_entropy(2, 4, 1.0) == 12
    assert analytic_block_entropy(3, 4, 1.0) == 56
    assert analytic_block_entropy(2, 4, 0.0) == 0
    # reach covering the whole box: every site counts
    assert analytic_block_entropy(2, 3, 5.0) == 9
    with pytest.raises(ValueError):
        analytic_block_entropy(0, 4, 1.0)
    with pytest.raises(ValueError):
        analytic_block_entropy(2, 4, -1.0)


def test_rank_matches_analytic_across_dimensions():
    rng = np.random.default_rng(49)
    for dim in (1, 2, 3):
        for reach in (1, 2, 3):
            side = int(rng.integers(2, 5))
            extent = side + 2 * reach + 2
            lat = Lattice((extent,) * dim)
            prof = PhaseProfile(lat, Cutoff(reach=float(reach)), time=math.pi)
            block = centered_block(lat, side)
            rank = gf2_rank(block_adjacency(prof, block))
            assert rank == analytic_block_entropy(dim, side, reach)


def test_rank_matches_analytic_on_periodic_lattice():
    lat = Lattice((6, 6), "periodic")
    prof = PhaseProfile(lat, Cutoff(reach=1.0), time=math.pi)
    block = centered_block(lat, 2)
    assert gf2_rank(block_adjacency(prof, block)) == analytic_block_entropy(
        2, 2, 1.0)


def test_edge_list_roundtrip(tmp_path):
    path = tmp_path / "edges.txt"
    edges = [(0, 1), (3, 7), (2, 5)]
    write_edge_list(path, edges)
    assert read_edge_list(path) == edges


def test_edge_list_comments_and_errors(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("# a comment\n\n0 1  # trailing note\n2 3\n")
    assert read_edge_list(path) == [(0, 1), (2, 3)]
    path.write_text("0 1 2\n")
    with pytest.raises(ValueError, match="expected 'site site'"):
        read_edge_list(path)
