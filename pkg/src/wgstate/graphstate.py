"""Graph-state specialization: GF(2) linear algebra on the coupling graph.

When every interaction phase is 0 or pi (mod 2*pi) the evolved state is a
graph state, and the entanglement entropy of a block equals the GF(2) rank
of the block-to-environment slice of the adjacency matrix -- an integer
count of independent edge patterns, computed here without touching any
amplitudes.  Rows are bit-packed into 64-bit words so the rank of an
m x (N - m) slice costs O(m^2 * N / 64) word operations.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import TWO_PI


class NotAGraphStateError(ValueError):
    """Some interaction phase is neither 0 nor pi within tolerance."""


# ---------------------------------------------------------------------------
# Bit-packed binary matrices
# ---------------------------------------------------------------------------

class BinaryMatrix:
    """Matrix over GF(2), rows packed little-endian into uint64 words.

    Column c lives in word c >> 6 at bit c & 63.
    """

    def __init__(self, words: np.ndarray, n_cols: int):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.ndim != 2:
            raise ValueError("words must be a 2-d array")
        if words.shape[1] != (n_cols + 63) // 64:
            raise ValueError(
                f"{n_cols} columns need {(n_cols + 63) // 64} words per row, "
                f"got {words.shape[1]}")
        self.words = words
        self.n_rows = words.shape[0]
        self.n_cols = int(n_cols)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BinaryMatrix":
        return cls(np.zeros((n_rows, (n_cols + 63) // 64), dtype=np.uint64), n_cols)

    @classmethod
    def from_dense(cls, dense) -> "BinaryMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise ValueError("dense matrix must be 2-d")
        bits = (dense != 0).astype(np.uint8)
        n_rows, n_cols = bits.shape
        n_words = (n_cols + 63) // 64
        padded = np.zeros((n_rows, n_words * 64), dtype=np.uint8)
        padded[:, :n_cols] = bits
        packed = np.packbits(padded, axis=1, bitorder="little")
        return cls(packed.view("<u8"), n_cols)

    def to_dense(self) -> np.ndarray:
        flat = np.unpackbits(self.words.view(np.uint8).reshape(self.n_rows, -1),
                             axis=1, bitorder="little")
        return flat[:, :self.n_cols]

    def get(self, row: int, col: int) -> int:
        return int((self.words[row, col >> 6] >> np.uint64(col & 63)) & np.uint64(1))

    def set(self, row: int, col: int, value: int = 1) -> None:
        bit = np.uint64(1) << np.uint64(col & 63)
        if value:
            self.words[row, col >> 6] |= bit
        else:
            self.words[row, col >> 6] &= ~bit

    def row_any(self) -> np.ndarray:
        """Boolean mask of rows holding at least one set bit."""
        return self.words.any(axis=1)


def _leading_bit(row: np.ndarray) -> int:
    """Index of the lowest set bit, or -1 for an all-zero row."""
    nz = np.nonzero(row)[0]
    if nz.size == 0:
        return -1
    word = int(row[nz[0]])
    return int(nz[0]) * 64 + ((word & -word).bit_length() - 1)


def gf2_rank(matrix) -> int:
    """Rank over GF(2) by row reduction against stored pivots.

    Each reduction XORs a full packed row, and a row's leading bit moves
    strictly right with every XOR, so the sweep terminates after at most
    n_cols reductions per row.
    """
    if not isinstance(matrix, BinaryMatrix):
        matrix = BinaryMatrix.from_dense(matrix)
    pivots: dict[int, np.ndarray] = {}
    for i in range(matrix.n_rows):
        row = matrix.words[i].copy()
        while True:
            lead = _leading_bit(row)
            if lead < 0:
                break
            if lead in pivots:
                row ^= pivots[lead]
            else:
                pivots[lead] = row
                break
    return len(pivots)


# ---------------------------------------------------------------------------
# Adjacency extraction from interaction phases
# ---------------------------------------------------------------------------

def _edge_row(profile, k: int, ls: np.ndarray, tol: float) -> np.ndarray:
    phi = profile.phase_row(k, ls)
    edge = np.abs(phi - math.pi) <= tol
    trivial = (phi <= tol) | (phi >= TWO_PI - tol)
    bad = ~(edge | trivial)
    if bad.any():
        j = int(np.argmax(bad))
        raise NotAGraphStateError(
            f"phase {phi[j]!r} between sites {k} and {int(ls[j])} is neither "
            f"0 nor pi (tolerance {tol})")
    return edge


def adjacency_from_profile(profile, tol: float = 1e-9) -> BinaryMatrix:
    """Full N x N adjacency matrix of the interaction graph.

    Every pair's phase must be 0 or pi within ``tol``.  Quadratic in N;
    use :func:`block_adjacency` when only one block's edges matter.
    """
    n = profile.n_sites
    adj = BinaryMatrix.zeros(n, n)
    for k in range(n):
        others = np.concatenate([np.arange(k), np.arange(k + 1, n)])
        edge = _edge_row(profile, k, others, tol)
        for l in others[edge]:
            adj.set(k, int(l))
    return adj


def block_adjacency(profile, block, tol: float = 1e-9) -> BinaryMatrix:
    """Block-to-environment edge matrix, one packed row per block site.

    Columns run over the environment sites in ascending order.  Only the
    block rows are inspected, so the cost is O(|block| * N) even when the
    full graph would not fit.
    """
    n = profile.n_sites
    block = np.asarray(block, dtype=np.intp).ravel()
    if block.size == 0 or len(set(block.tolist())) != block.size:
        raise ValueError("block must be a non-empty list of distinct sites")
    if block.min() < 0 or block.max() >= n:
        raise ValueError(f"site index out of range 0..{n - 1}")
    mask = np.ones(n, dtype=bool)
    mask[block] = False
    env = np.flatnonzero(mask)
    n_words = (env.size + 63) // 64
    words = np.zeros((block.size, max(n_words, 1)), dtype=np.uint64)
    for i, k in enumerate(block):
        edge = _edge_row(profile, int(k), env, tol)
        padded = np.zeros(max(n_words, 1) * 64, dtype=np.uint8)
        padded[:env.size] = edge
        words[i] = np.packbits(padded, bitorder="little").view("<u8")
    return BinaryMatrix(words, max(env.size, 1) if env.size else 1)


def block_slice(adjacency: BinaryMatrix, block) -> BinaryMatrix:
    """Block-vs-rest submatrix of a full adjacency matrix.

    Rows are the block sites (in the given order), columns the remaining
    sites in ascending order.
    """
    if adjacency.n_rows != adjacency.n_cols:
        raise ValueError("adjacency matrix must be square")
    n = adjacency.n_rows
    block = np.asarray(block, dtype=np.intp).ravel()
    if block.size == 0 or len(set(block.tolist())) != block.size:
        raise ValueError("block must be a non-empty list of distinct sites")
    if block.min() < 0 or block.max() >= n:
        raise ValueError(f"site index out of range 0..{n - 1}")
    mask = np.ones(n, dtype=bool)
    mask[block] = False
    dense = adjacency.to_dense()
    return BinaryMatrix.from_dense(dense[block][:, mask])


def graph_block_entropy(adjacency: BinaryMatrix, block) -> int:
    """Entanglement entropy (in bits) of a block of a graph state.

    Equals the GF(2) rank of the block-vs-rest adjacency slice, an exact
    integer -- no amplitudes, no eigenvalues, no block-size ceiling.  For
    lattices too large to hold the full adjacency, build the slice
    directly with :func:`block_adjacency` and call :func:`gf2_rank`.
    """
    return gf2_rank(block_slice(adjacency, block))


def connected_vertex_count(gamma: BinaryMatrix) -> int:
    """Number of block sites with at least one edge into the environment.

    Takes the block-vs-rest slice (from :func:`block_slice` or
    :func:`block_adjacency`).  Always an upper bound on the GF(2) rank;
    the gap counts linear dependencies among the rows' edge patterns.
    """
    return int(gamma.row_any().sum())


def analytic_block_entropy(dimension: int, side: int, reach: float) -> int:
    """Closed-form block entropy for a cutoff coupling on a hypercubic box.

    For a box of linear size ``side`` in a ``dimension``-dimensional
    lattice with edges up to distance ``reach``, and at least ``reach``
    margin between the box and any open boundary, the rank of the edge
    matrix counts the sites within ``reach`` of the box surface:

        side**dimension - (side - min(2*reach, side))**dimension

    For dimension 1 this reduces to min(2*reach, side).  The margin is the
    caller's obligation; without it (or off the cutoff law entirely) the
    formula does not apply -- rank the actual edge matrix instead.
    """
    side = int(side)
    dimension = int(dimension)
    if side < 1 or dimension < 1:
        raise ValueError("side and dimension must be positive")
    if reach < 0:
        raise ValueError("reach must be non-negative")
    core = side - min(int(2 * reach), side)
    return side ** dimension - core ** dimension


# ---------------------------------------------------------------------------
# Edge-list files
# ---------------------------------------------------------------------------

def write_edge_list(path, edges) -> None:
    """One 'k l' pair per line; lines starting with '#' are comments."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# edge list: one 'site site' pair per line\n")
        for k, l in edges:
            fh.write(f"{int(k)} {int(l)}\n")


def read_edge_list(path) -> list[tuple[int, int]]:
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'site site', got {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
    return edges
