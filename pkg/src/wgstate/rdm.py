"""Exact reduced density matrices after pairwise controlled-phase evolution.

A product state evolved under commuting pairwise ZZ-type couplings stays a
"phase-decorated" product state: the amplitude of a configuration x in
{0,1}^N picks up exp(-i * sum_{k<l} phi_kl x_k x_l) on top of the product
of single-site amplitudes.  Tracing out all but a subset A of m sites then
has closed form: each environment site l contributes an independent factor

    E_l(d) = p0_l + p1_l * exp(-i * sum_{k in A} phi_kl d_k)

to the matrix element rho[x, y], where d = x - y in {-1, 0, 1}^m and
p0_l, p1_l are the environment site's populations.  The element therefore
depends on the environment only through the difference class d, so one
sweep over the environment fills a table of 3^m numbers and the full
2^m x 2^m matrix is assembled from it.  Total cost is O(N * 3^m) time and
O(3^m + 4^m) memory -- linear in system size, never a 2^N statevector.

Couplings internal to A contribute pure phases exp(-i theta(x)) on the
left index and the conjugate on the right; they never change the spectrum,
so spectral quantities (entropies, eigenvalues) may skip them via
``include_internal=False``.

Bit convention: the first site listed in ``sites`` is the most significant
bit of the row/column index, matching the statevector layout used by the
brute-force cross-check in :mod:`wgstate.oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Hard ceiling on subset size: 3^10 difference classes and a 1024 x 1024
# matrix are fine; a few sites more and the 3^m table stops fitting in cache
# long before the 4^m matrix stops fitting in RAM.
A_MAX = 10

# Environment sites processed per sweep chunk, scaled so the working set
# (chunk x 3^m complex entries) stays around a few tens of MB.
_CHUNK_BUDGET = 2_000_000


class SubsetTooLargeError(ValueError):
    """Requested subset exceeds the exact-diagonalization ceiling."""


@dataclass(frozen=True)
class ProductInput:
    """Initial product state, one normalized amplitude pair per site."""

    amplitudes: np.ndarray  # (n_sites, 2) complex

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != 2 or amps.shape[0] < 1:
            raise ValueError(f"amplitudes must have shape (n, 2), got {amps.shape}")
        norms = np.abs(amps[:, 0]) ** 2 + np.abs(amps[:, 1]) ** 2
        bad = np.abs(norms - 1.0) > 1e-12
        if np.any(bad):
            site = int(np.argmax(bad))
            raise ValueError(
                f"site {site} amplitudes not normalized (|a0|^2 + |a1|^2 = {norms[site]!r})")
        object.__setattr__(self, "amplitudes", amps)
        amps.setflags(write=False)

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def plus(cls, n_sites: int) -> "ProductInput":
        """Every site in (|0> + |1>) / sqrt(2)."""
        amps = np.full((n_sites, 2), 1.0 / math.sqrt(2.0), dtype=np.complex128)
        return cls(amps)

    @classmethod
    def random(cls, n_sites: int, rng: np.random.Generator) -> "ProductInput":
        """Haar-random single-qubit state at every site."""
        raw = rng.standard_normal((n_sites, 2)) + 1j * rng.standard_normal((n_sites, 2))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        return cls(raw)

    def populations(self, sites) -> tuple[np.ndarray, np.ndarray]:
        """(p0, p1) occupation probabilities at the given sites."""
        a = self.amplitudes[np.asarray(sites, dtype=np.intp)]
        return np.abs(a[:, 0]) ** 2, np.abs(a[:, 1]) ** 2


def _check_subset(n_sites: int, sites, a_max: int) -> np.ndarray:
    sites = np.asarray(sites, dtype=np.intp).ravel()
    if sites.size == 0:
        raise ValueError("subset must contain at least one site")
    if sites.size > a_max:
        raise SubsetTooLargeError(
            f"subset of {sites.size} sites exceeds the limit of {a_max}; "
            "cost grows as 3^m, use the entropy bounds for larger blocks")
    if sites.min() < 0 or sites.max() >= n_sites:
        raise ValueError(f"site index out of range 0..{n_sites - 1}")
    if len(set(sites.tolist())) != sites.size:
        raise ValueError(f"subset contains repeated sites: {sites.tolist()}")
    return sites


def _resolve_environment(n_sites: int, sites: np.ndarray, environment) -> np.ndarray:
    if environment is None:
        mask = np.ones(n_sites, dtype=bool)
        mask[sites] = False
        return np.flatnonzero(mask)
    environment = np.asarray(environment, dtype=np.intp).ravel()
    if environment.size:
        if environment.min() < 0 or environment.max() >= n_sites:
            raise ValueError(f"environment site out of range 0..{n_sites - 1}")
        if len(set(environment.tolist())) != environment.size:
            raise ValueError("environment contains repeated sites")
        if np.isin(environment, sites).any():
            raise ValueError("environment overlaps the subset")
    return environment


def _bit_table(m: int) -> np.ndarray:
    """(2^m, m) matrix of bits, first column most significant."""
    x = np.arange(2 ** m, dtype=np.int64)[:, None]
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    return (x >> shifts) & 1


def environment_product(profile, state: ProductInput, sites, environment=None,
                        a_max: int = A_MAX) -> np.ndarray:
    """Accumulated environment factor for every difference class.

    Returns a complex array of length 3^m indexed by the base-3 code
    sum_k (d_k + 1) * 3^(m-1-k) of d in {-1, 0, 1}^m (first site in
    ``sites`` most significant).  Entry d holds

        prod_{l in environment} [ p0_l + p1_l * exp(-i sum_k phi(site_k, l) d_k) ].

    ``environment`` defaults to every site outside the subset; passing an
    explicit list restricts the trace to those sites (the rest are treated
    as uncoupled), which is what the finite-range entropy lower bound uses.
    """
    sites = _check_subset(profile.n_sites, sites, a_max)
    env = _resolve_environment(profile.n_sites, sites, environment)
    m = sites.size
    n_classes = 3 ** m
    out = np.ones(n_classes, dtype=np.complex128)
    if env.size == 0:
        return out
    p0, p1 = state.populations(env)
    chunk = max(1, _CHUNK_BUDGET // n_classes)
    for start in range(0, env.size, chunk):
        ls = env[start:start + chunk]
        c = ls.size
        phi = np.empty((c, m), dtype=np.float64)
        for j, k in enumerate(sites):
            phi[:, j] = profile.phase_row(int(k), ls)
        z = np.exp(-1j * phi)
        # Staged Kronecker sweep: after step j, w[:, code] holds
        # exp(-i sum_{k<=j} phi_kl d_k) for every partial difference code.
        w = np.ones((c, 1), dtype=np.complex128)
        for j in range(m):
            col = z[:, j]
            tri = np.stack([col.conj(), np.ones_like(col), col], axis=1)
            w = (w[:, :, None] * tri[:, None, :]).reshape(c, -1)
        factors = p0[start:start + chunk, None] + p1[start:start + chunk, None] * w
        out *= factors.prod(axis=0)
    return out


def environment_factor(profile, state: ProductInput, sites, x, y,
                       environment=None) -> complex:
    """Environment factor for one matrix element, without the 3^m table.

    ``x`` and ``y`` are bit sequences over ``sites`` (first site most
    significant).  Mainly a cross-check for :func:`environment_product`,
    also usable when only a few elements of a large-subset matrix are
    needed.
    """
    sites = np.asarray(sites, dtype=np.intp).ravel()
    sites = _check_subset(profile.n_sites, sites, a_max=64)
    env = _resolve_environment(profile.n_sites, sites, environment)
    d = np.asarray(x, dtype=np.int64) - np.asarray(y, dtype=np.int64)
    if d.shape != (sites.size,):
        raise ValueError(f"x and y must each hold {sites.size} bits")
    out = 1.0 + 0.0j
    if env.size == 0:
        return out
    p0, p1 = state.populations(env)
    active = np.flatnonzero(d)
    for start in range(0, env.size, 262144):
        ls = env[start:start + 262144]
        delta = np.zeros(ls.size, dtype=np.float64)
        for j in active:
            delta += d[j] * profile.phase_row(int(sites[j]), ls)
        vals = p0[start:start + 262144] + p1[start:start + 262144] * np.exp(-1j * delta)
        out *= complex(vals.prod())
    return out


def _internal_phases(profile, sites: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """theta(x) = sum_{j < j'} phi(site_j, site_j') x_j x_j' for every x."""
    theta = np.zeros(bits.shape[0], dtype=np.float64)
    for j in range(sites.size - 1):
        phis = profile.phase_row(int(sites[j]), sites[j + 1:])
        theta += bits[:, j] * (bits[:, j + 1:] @ phis)
    return theta


def reduced_density(profile, state: ProductInput, sites, include_internal=True,
                    environment=None, a_max: int = A_MAX) -> np.ndarray:
    """Exact reduced density matrix of the subset ``sites``.

    Rows/columns are indexed by the subset bitstring with the first listed
    site as the most significant bit.  With ``include_internal=False`` the
    phases from couplings inside the subset are dropped; that is a unitary
    diagonal conjugation, so the returned matrix is different but has the
    same spectrum (cheaper when only eigenvalues are needed).
    """
    sites = _check_subset(profile.n_sites, sites, a_max)
    env = environment_product(profile, state, sites, environment, a_max)
    m = sites.size
    bits = _bit_table(m)
    amps = state.amplitudes[sites]
    amp = np.where(bits.astype(bool), amps[None, :, 1], amps[None, :, 0]).prod(axis=1)
    pow3 = 3 ** np.arange(m - 1, -1, -1, dtype=np.int64)
    u = bits @ pow3
    center = (3 ** m - 1) // 2
    rho = np.outer(amp, amp.conj()) * env[u[:, None] - u[None, :] + center]
    if include_internal and m > 1:
        phase = np.exp(-1j * _internal_phases(profile, sites, bits))
        rho *= phase[:, None] * phase.conj()[None, :]
    trace = rho.trace().real
    if not trace > 0:
        raise ValueError(f"reduced matrix has non-positive trace {trace!r}")
    rho /= trace
    return rho


def single_site_coherence(profile, k: int) -> complex:
    """Closed-form off-diagonal element of a single site's reduced state.

    For the uniform-superposition input, site k's 2 x 2 reduced matrix has
    diagonal 1/2, 1/2 and off-diagonal rho[0, 1] = c / 2 with

        c = prod_{l != k} cos(phi_kl / 2) * exp(+i/2 * sum_{l != k} phi_kl).

    The phase sum uses compensated summation so the returned argument is
    reliable even when N is large and |c| has decayed to the noise floor.
    """
    n = profile.n_sites
    if not 0 <= k < n:
        raise ValueError(f"site index out of range 0..{n - 1}")
    others = np.concatenate([np.arange(k), np.arange(k + 1, n)])
    mag = 1.0
    half_sum = 0.0
    for start in range(0, others.size, 262144):
        phi = profile.phase_row(k, others[start:start + 262144])
        mag *= float(np.prod(np.cos(0.5 * phi)))
        half_sum += 0.5 * math.fsum(phi.tolist())
    return complex(mag * np.exp(1j * half_sum))
