"""Entanglement and correlation measures on reduced density matrices.

Dense-matrix quantities (entropy, concurrence, trace distance) operate on
explicit arrays from :func:`wgstate.rdm.reduced_density`.  Block entropies
beyond the exact-diagonalization ceiling are bracketed instead of computed:
an upper bound from subadditivity over a sliding chain of small sub-blocks,
and a lower bound from truncating the environment to a finite interaction
radius (dropping environment couplings can only make the reduced spectrum
more ordered, never less).

All entropies are in bits (log base 2), so a block of L spins maxes out at
L and a maximally mixed pair of levels gives exactly 1.
"""

from __future__ import annotations

import numpy as np

from .rdm import A_MAX, ProductInput, SubsetTooLargeError, reduced_density

_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
_PAULIS = (_SX, _SY, _SZ)

# sigma_y (x) sigma_y, the spin-flip kernel of the concurrence
_YY = np.array([[0.0, 0.0, 0.0, -1.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0, 0.0]], dtype=np.complex128)


class NotPositiveSemidefiniteError(ValueError):
    """Matrix has a negative eigenvalue beyond numerical tolerance."""


def entropy(rho: np.ndarray, tol: float = 1e-8) -> float:
    """Von Neumann entropy in bits, -sum p log2 p over the spectrum."""
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -tol:
        raise NotPositiveSemidefiniteError(
            f"eigenvalue {evals.min()!r} below -{tol}; not a density matrix")
    p = evals[evals > 0.0]
    return float(-(p * np.log2(p)).sum())


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """(1/2) * trace norm of rho - sigma."""
    evals = np.linalg.eigvalsh(rho - sigma)
    return 0.5 * float(np.abs(evals).sum())


def purity(rho: np.ndarray) -> float:
    return float(np.einsum("ij,ji->", rho, rho).real)


# ---------------------------------------------------------------------------
# Block entropies
# ---------------------------------------------------------------------------

def block_entropy(profile, state: ProductInput, sites, a_max: int = A_MAX) -> float:
    """Exact entanglement entropy of the block, in bits.

    Phases internal to the block are a diagonal unitary and drop out of the
    spectrum, so they are skipped.  Blocks above ``a_max`` sites raise; use
    :func:`block_entropy_upper` / :func:`block_entropy_lower` there.
    """
    rho = reduced_density(profile, state, sites, include_internal=False, a_max=a_max)
    return entropy(rho)


def block_entropy_upper(profile, state: ProductInput, sites, m: int = 4,
                        a_max: int = A_MAX) -> float:
    """Upper bound on the block entropy from a chain of sub-blocks.

    Split the block into consecutive sub-blocks L_1..L_n of ``m`` sites
    (the last one absorbs any remainder).  Strong subadditivity telescopes
    to

        S(block) <= sum_i S(L_i, L_{i+1}) - sum of interior S(L_i),

    which costs n exact diagonalizations of at most 2m-ish sites instead of
    one of len(sites).  The bound is exact whenever correlations do not
    reach beyond adjacent sub-blocks, and is clipped to the trivial range
    [0, len(sites)].
    """
    sites = np.asarray(sites, dtype=np.intp).ravel()
    total = sites.size
    if m < 1:
        raise ValueError("sub-block size m must be at least 1")
    n = total // m
    if n <= 1:
        return min(block_entropy(profile, state, sites, a_max), float(total))
    blocks = [sites[i * m:(i + 1) * m] for i in range(n - 1)]
    blocks.append(sites[(n - 1) * m:])
    if blocks[-1].size + m > a_max:
        raise SubsetTooLargeError(
            f"adjacent sub-blocks span {blocks[-1].size + m} sites, over the "
            f"limit of {a_max}; pick m so that 3*m - 1 <= {a_max}")
    bound = 0.0
    for left, right in zip(blocks[:-1], blocks[1:]):
        bound += block_entropy(profile, state, np.concatenate([left, right]), a_max)
    for inner in blocks[1:-1]:
        bound -= block_entropy(profile, state, inner, a_max)
    return min(max(bound, 0.0), float(total))


def block_entropy_lower(profile, state: ProductInput, sites, radius: float,
                        a_max: int = A_MAX) -> float:
    """Lower bound on the block entropy from a truncated environment.

    Only environment sites within ``radius`` of the block are kept;
    couplings to everything farther out are dropped.  Dropping environment
    couplings makes the reduced spectrum majorize the true one, so the
    entropy of the truncated state never exceeds the true value.  The bound
    is exact once ``radius`` covers every site that is actually coupled.

    The truncated global state is pure on (block + kept environment), so
    both sides of that cut carry the same spectrum.  Whichever side fits
    the exact-diagonalization ceiling is diagonalized -- for a big block
    with a small radius that is the kept environment, which is what makes
    the bound affordable exactly where the exact entropy is not.
    """
    lattice = getattr(profile, "lattice", None)
    if lattice is None:
        raise TypeError("profile has no lattice geometry; the finite-radius "
                        "bound needs distances")
    sites = np.asarray(sites, dtype=np.intp).ravel()
    mask = np.ones(profile.n_sites, dtype=bool)
    mask[sites] = False
    rest = np.flatnonzero(mask)
    if rest.size:
        min_dist = np.full(rest.size, np.inf)
        for k in sites:
            np.minimum(min_dist, lattice.distances(int(k), rest), out=min_dist)
        near = rest[min_dist <= radius]
    else:
        near = rest
    if near.size == 0:
        return 0.0
    if sites.size <= a_max:
        rho = reduced_density(profile, state, sites, include_internal=False,
                              environment=near, a_max=a_max)
    elif near.size <= a_max:
        rho = reduced_density(profile, state, near, include_internal=False,
                              environment=sites, a_max=a_max)
    else:
        raise SubsetTooLargeError(
            f"both the block ({sites.size} sites) and the kept environment "
            f"({near.size} sites) exceed the limit of {a_max}; shrink radius")
    return entropy(rho)


# ---------------------------------------------------------------------------
# Two-site correlations and pair entanglement
# ---------------------------------------------------------------------------

def _pauli_expectations(rho: np.ndarray) -> np.ndarray:
    return np.array([np.trace(rho @ s) for s in _PAULIS])


def correlation_matrix(profile, state: ProductInput, k: int, l: int) -> np.ndarray:
    """Connected correlation matrix Q[a, b] = <s_a s_b> - <s_a><s_b>.

    Rows index Pauli x, y, z on site k; columns the same on site l.  The
    entries of a Hermitian observable's expectation are real; anything
    beyond rounding noise in the imaginary part is an internal error.
    """
    rho = reduced_density(profile, state, [k, l])
    t = rho.reshape(2, 2, 2, 2)
    rho_k = np.einsum("ajbj->ab", t)
    rho_l = np.einsum("jajb->ab", t)
    ev_k = _pauli_expectations(rho_k)
    ev_l = _pauli_expectations(rho_l)
    joint = np.empty((3, 3), dtype=np.complex128)
    for a, sa in enumerate(_PAULIS):
        for b, sb in enumerate(_PAULIS):
            joint[a, b] = np.trace(rho @ np.kron(sa, sb))
    q = joint - np.outer(ev_k, ev_l)
    assert np.abs(q.imag).max() < 1e-9, "correlation matrix came out complex"
    return q.real


def max_correlation(q: np.ndarray) -> float:
    """Largest singular value of a (real) correlation matrix."""
    q = np.asarray(q, dtype=np.float64)
    s2 = np.linalg.eigvalsh(q.T @ q)
    return float(np.sqrt(max(float(s2[-1]), 0.0)))


def _spin_flip_spectrum(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a two-site 4 x 4 matrix, got {rho.shape}")
    r = rho @ _YY @ rho.conj() @ _YY
    lam = np.sqrt(np.clip(np.linalg.eigvals(r).real, 0.0, None))
    lam.sort()
    return lam[::-1]


def concurrence(rho: np.ndarray) -> float:
    """Two-qubit concurrence, max(0, l1 - l2 - l3 - l4)."""
    lam = _spin_flip_spectrum(rho)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_of_assistance(rho: np.ndarray) -> float:
    """Best average pair concurrence over measurements on the rest, l1+l2+l3+l4."""
    return float(_spin_flip_spectrum(rho).sum())


def assistance_and_localizable_bounds(profile, state: ProductInput, k: int,
                                      l: int) -> tuple[float, float]:
    """(lower, upper) bracket on the entanglement localizable on sites k, l.

    Lower: the largest singular value of the connected correlation matrix.
    Upper: the concurrence of assistance of the pair's reduced state.
    The localizable entanglement itself (an optimization over measurement
    strategies on all other sites) is never computed, only bracketed.
    """
    lower = max_correlation(correlation_matrix(profile, state, k, l))
    upper = concurrence_of_assistance(reduced_density(profile, state, [k, l]))
    return lower, upper


# ---------------------------------------------------------------------------
# Global entanglement
# ---------------------------------------------------------------------------

def meyer_wallach(profile, state: ProductInput, sites=None) -> float:
    """Average single-site mixedness, 2 * (1 - mean_k tr rho_k^2).

    0 for any product state, 1 when every site is maximally mixed.  Each
    site's purity comes from the closed form of its 2 x 2 reduced state,
    so the cost is one environment sweep per site (O(N^2) overall).
    """
    if sites is None:
        sites = np.arange(profile.n_sites)
    sites = np.asarray(sites, dtype=np.intp).ravel()
    amps = state.amplitudes
    purities = np.empty(sites.size)
    for i, k in enumerate(sites):
        others = np.concatenate([np.arange(k), np.arange(k + 1, profile.n_sites)])
        off = amps[k, 0] * np.conj(amps[k, 1])
        for start in range(0, others.size, 262144):
            ls = others[start:start + 262144]
            phi = profile.phase_row(int(k), ls)
            p0 = np.abs(amps[ls, 0]) ** 2
            p1 = np.abs(amps[ls, 1]) ** 2
            off *= np.prod(p0 + p1 * np.exp(1j * phi))
        p0k = abs(amps[k, 0]) ** 2
        p1k = abs(amps[k, 1]) ** 2
        purities[i] = p0k ** 2 + p1k ** 2 + 2.0 * abs(off) ** 2
    return float(2.0 * (1.0 - purities.mean()))
