"""Lattice geometry, coupling laws, and interaction phase profiles.

Sites live on a d-dimensional rectangular lattice and are addressed by a
linear index in row-major order, axis 0 slowest: for extents (E0, .., Ed-1)
the site at coordinates (c0, .., cd-1) has index ((c0*E1 + c1)*E2 + ..).
A coupling law maps the distance between two sites to an interaction
strength f(r); a :class:`PhaseProfile` combines lattice, law, and evolution
time into the controlled-phase angles phi(k,l) = f(r_kl) * t that drive
everything downstream.

Phases are computed on demand and reduced mod 2*pi at query time; no N x N
table is ever materialized, so memory stays O(N).  All objects here are
immutable after construction and safe to query from any number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence, Union

import numpy as np

TWO_PI = 2.0 * math.pi

_BOUNDARIES = ("open", "periodic")


class ConfigError(ValueError):
    """Malformed configuration input (bad key, value, or combination)."""


# ---------------------------------------------------------------------------
# Lattice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    """Rectangular lattice with per-axis open or periodic boundaries."""

    extents: tuple[int, ...]
    boundary: tuple[str, ...]

    def __init__(self, extents, boundary="open"):
        if isinstance(extents, int):
            extents = (extents,)
        extents = tuple(int(e) for e in extents)
        if not extents or any(e < 1 for e in extents):
            raise ValueError(f"extents must be positive, got {extents}")
        if isinstance(boundary, str):
            boundary = (boundary,) * len(extents)
        boundary = tuple(boundary)
        if len(boundary) != len(extents):
            raise ValueError("need one boundary condition per axis")
        for b in boundary:
            if b not in _BOUNDARIES:
                raise ValueError(f"boundary must be one of {_BOUNDARIES}, got {b!r}")
        n = math.prod(extents)
        if n < 2:
            raise ValueError("lattice must contain at least 2 sites")
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "boundary", boundary)

    @property
    def dimension(self) -> int:
        return len(self.extents)

    @property
    def n_sites(self) -> int:
        return math.prod(self.extents)

    @cached_property
    def _coords(self) -> np.ndarray:
        """(n_sites, d) integer coordinates in row-major site order."""
        idx = np.arange(self.n_sites)
        out = np.empty((self.n_sites, self.dimension), dtype=np.int64)
        for axis in range(self.dimension - 1, -1, -1):
            idx, out[:, axis] = np.divmod(idx, self.extents[axis])
        return out

    def coords(self, sites) -> np.ndarray:
        sites = self._check_sites(sites)
        return self._coords[sites]

    def site_index(self, coords: Sequence[int]) -> int:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.dimension:
            raise ValueError(f"expected {self.dimension} coordinates, got {coords}")
        idx = 0
        for c, e in zip(coords, self.extents):
            if not 0 <= c < e:
                raise ValueError(f"coordinate {coords} outside extents {self.extents}")
            idx = idx * e + c
        return idx

    def _check_sites(self, sites) -> np.ndarray:
        sites = np.asarray(sites, dtype=np.intp)
        if sites.size and (sites.min() < 0 or sites.max() >= self.n_sites):
            raise ValueError(f"site index out of range 0..{self.n_sites - 1}")
        return sites

    def distances(self, k: int, ls) -> np.ndarray:
        """Euclidean distances from site k to each site in ls."""
        (k,) = self._check_sites([k])
        ls = self._check_sites(ls)
        delta = np.abs(self._coords[ls] - self._coords[k])
        for axis, (extent, bound) in enumerate(zip(self.extents, self.boundary)):
            if bound == "periodic":
                np.minimum(delta[:, axis], extent - delta[:, axis], out=delta[:, axis])
        if self.dimension == 1:
            return delta[:, 0].astype(np.float64)
        return np.sqrt(np.einsum("ij,ij->i", delta, delta).astype(np.float64))

    def distance(self, k: int, l: int) -> float:
        return float(self.distances(k, [l])[0])

    def diameter(self) -> float:
        """Upper bound on any pairwise distance."""
        spans = [e - 1 if b == "open" else e // 2
                 for e, b in zip(self.extents, self.boundary)]
        return math.sqrt(sum(s * s for s in spans))


def centered_block(lattice: Lattice, shape) -> np.ndarray:
    """Linear site indices of an axis-aligned block centered in the lattice.

    ``shape`` is a side length (applied to every axis) or one length per
    axis.  Returned indices are ascending.
    """
    if isinstance(shape, (int, np.integer)):
        shape = (int(shape),) * lattice.dimension
    shape = tuple(int(s) for s in shape)
    if len(shape) != lattice.dimension:
        raise ValueError("block shape must give one side length per axis")
    ranges = []
    for side, extent in zip(shape, lattice.extents):
        if not 1 <= side <= extent:
            raise ValueError(f"block side {side} does not fit extent {extent}")
        start = (extent - side) // 2
        ranges.append(np.arange(start, start + side))
    grids = np.meshgrid(*ranges, indexing="ij")
    idx = np.zeros_like(grids[0])
    for g, extent in zip(grids, lattice.extents):
        idx = idx * extent + g
    return np.sort(idx.ravel())


# ---------------------------------------------------------------------------
# Coupling laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerLaw:
    """f(r) = r**(-alpha), alpha > 0."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    def strengths(self, r: np.ndarray, k=None, ls=None) -> np.ndarray:
        return r ** (-self.alpha)


@dataclass(frozen=True)
class Exponential:
    """f(r) = exp(-kappa * r), kappa > 0."""

    kappa: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")

    def strengths(self, r: np.ndarray, k=None, ls=None) -> np.ndarray:
        return np.exp(-self.kappa * r)


@dataclass(frozen=True)
class Cutoff:
    """f(r) = 1 for r <= reach, else 0."""

    reach: float

    def __post_init__(self):
        if self.reach < 0:
            raise ValueError("reach must be non-negative")

    def strengths(self, r: np.ndarray, k=None, ls=None) -> np.ndarray:
        return np.where(r <= self.reach, 1.0, 0.0)


class Table:
    """Explicit distance -> strength lookup.

    Every queried distance must match a table entry within ``tolerance``;
    anything else is an error rather than an implicit zero.
    """

    def __init__(self, entries: Mapping[float, float], tolerance: float = 1e-9):
        if not entries:
            raise ValueError("table law needs at least one entry")
        items = sorted((float(r), float(f)) for r, f in entries.items())
        self._r = np.array([r for r, _ in items])
        self._f = np.array([f for _, f in items])
        self.tolerance = float(tolerance)

    def strengths(self, r: np.ndarray, k=None, ls=None) -> np.ndarray:
        pos = np.searchsorted(self._r, r)
        lo = np.clip(pos - 1, 0, len(self._r) - 1)
        hi = np.clip(pos, 0, len(self._r) - 1)
        use_hi = np.abs(self._r[hi] - r) <= np.abs(self._r[lo] - r)
        best = np.where(use_hi, hi, lo)
        if np.any(np.abs(self._r[best] - r) > self.tolerance):
            missing = np.asarray(r)[np.abs(self._r[best] - r) > self.tolerance]
            raise ValueError(f"distance {missing[0]} not in coupling table")
        return self._f[best]

    def __repr__(self):
        pairs = ", ".join(f"{r:g}: {f:g}" for r, f in zip(self._r, self._f))
        return f"Table({{{pairs}}})"


def _splitmix64(z: np.ndarray) -> np.ndarray:
    # wrapping uint64 arithmetic is the point; silence the overflow warning
    with np.errstate(over="ignore"):
        z = z + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1DF4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def pair_uniform(seed: int, k, ls) -> np.ndarray:
    """Deterministic uniform(0,1) draw per unordered site pair.

    Counter-based (stateless): the value depends only on
    (seed, min(k,l), max(k,l)), so both argument orders agree and no table
    is stored.
    """
    k = np.asarray(k, dtype=np.uint64)
    ls = np.asarray(ls, dtype=np.uint64)
    i = np.minimum(k, ls)
    j = np.maximum(k, ls)
    h = _splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ np.uint64(0))
    h = _splitmix64(h ^ i)
    h = _splitmix64(h ^ j)
    return (h >> np.uint64(11)) * 2.0 ** -53


@dataclass(frozen=True)
class Disordered:
    """Base law modulated by a random per-pair amplitude.

    The amplitude is uniform on [low, high), drawn deterministically from
    (seed, pair) so repeated queries and both site orders give identical
    values without storing an N x N table.
    """

    base: Union[PowerLaw, Exponential, Cutoff, Table]
    seed: int
    amplitude: tuple[float, float] = (0.0, 1.0)

    def strengths(self, r: np.ndarray, k=None, ls=None) -> np.ndarray:
        if k is None or ls is None:
            raise ValueError("disordered law needs site identities, not just distances")
        low, high = self.amplitude
        u = pair_uniform(self.seed, k, ls)
        return self.base.strengths(r, k, ls) * (low + (high - low) * u)


CouplingLaw = Union[PowerLaw, Exponential, Cutoff, Table, Disordered]


# ---------------------------------------------------------------------------
# Phase profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseProfile:
    """Bundle of lattice + coupling law + evolution time.

    phase(k, l) = f(r_kl) * t, reduced mod 2*pi at query time (after the
    multiplication by t, so no reduction error accumulates across a sweep
    over t).
    """

    lattice: Lattice
    law: CouplingLaw
    time: float

    def __post_init__(self):
        if self.time < 0:
            raise ValueError("time must be non-negative")

    @property
    def n_sites(self) -> int:
        return self.lattice.n_sites

    def phase_row(self, k: int, ls) -> np.ndarray:
        """Phases phi(k, l) for every l in ls, each in [0, 2*pi)."""
        ls = np.asarray(ls, dtype=np.intp)
        r = self.lattice.distances(k, ls)
        if r.size and r.min() == 0.0:
            raise ValueError(f"phase(k, k) is undefined (site {k} paired with itself)")
        f = self.law.strengths(r, k, ls)
        return np.mod(f * self.time, TWO_PI)

    def phase(self, k: int, l: int) -> float:
        if k == l:
            raise ValueError(f"phase(k, k) is undefined (got k = l = {k})")
        return float(self.phase_row(k, np.array([l]))[0])


class EdgeProfile:
    """Phases listed explicitly per site pair; unlisted pairs have phase 0.

    Drop-in replacement for :class:`PhaseProfile` wherever only
    ``n_sites`` / ``phase`` / ``phase_row`` are consumed.  Useful for
    interaction patterns that no distance law produces.
    """

    def __init__(self, n_sites: int, phases: Mapping[tuple[int, int], float]):
        if n_sites < 2:
            raise ValueError("need at least 2 sites")
        self._n = int(n_sites)
        self._adj: list[dict[int, float]] = [dict() for _ in range(self._n)]
        for (k, l), phi in phases.items():
            k, l = int(k), int(l)
            if k == l:
                raise ValueError(f"self-pair ({k}, {k}) has no phase")
            if not (0 <= k < self._n and 0 <= l < self._n):
                raise ValueError(f"site pair ({k}, {l}) out of range")
            phi = float(np.mod(phi, TWO_PI))
            self._adj[k][l] = phi
            self._adj[l][k] = phi

    @classmethod
    def from_edges(cls, n_sites: int, edges, phase: float = math.pi) -> "EdgeProfile":
        """Uniform phase on the given edges (pi by default: a graph state)."""
        return cls(n_sites, {(k, l): phase for k, l in edges})

    @property
    def n_sites(self) -> int:
        return self._n

    def phase(self, k: int, l: int) -> float:
        if k == l:
            raise ValueError(f"phase(k, k) is undefined (got k = l = {k})")
        if not (0 <= k < self._n and 0 <= l < self._n):
            raise ValueError(f"site pair ({k}, {l}) out of range")
        return self._adj[k].get(l, 0.0)

    def phase_row(self, k: int, ls) -> np.ndarray:
        ls = np.asarray(ls, dtype=np.intp)
        if ls.size and (ls.min() < 0 or ls.max() >= self._n):
            raise ValueError(f"site index out of range 0..{self._n - 1}")
        row = self._adj[k]
        out = np.zeros(ls.shape, dtype=np.float64)
        for i, l in enumerate(ls):
            if l == k:
                raise ValueError(f"phase(k, k) is undefined (site {k} paired with itself)")
            out[i] = row.get(int(l), 0.0)
        return out


# ---------------------------------------------------------------------------
# Config parsing (documented schema: see README)
# ---------------------------------------------------------------------------

def _require(items: Mapping[str, str], key: str, section: str) -> str:
    if key not in items:
        raise ConfigError(f"missing key '{key}' in section [{section}]")
    return items[key]


def _parse_float(value: str, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"key '{key}': expected a number, got {value!r}") from None


def _parse_int(value: str, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"key '{key}': expected an integer, got {value!r}") from None


def parse_lattice(items: Mapping[str, str]) -> Lattice:
    """Build a Lattice from the [lattice] section of a config file.

    Keys: ``extents`` (comma list of positive integers), optional
    ``dimension`` (cross-checked), optional ``boundary`` (single value or
    comma list of open|periodic, default open).
    """
    extents_raw = _require(items, "extents", "lattice")
    try:
        extents = tuple(int(tok) for tok in extents_raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"key 'extents': expected integers, got {extents_raw!r}") from None
    if "dimension" in items:
        d = _parse_int(items["dimension"], "dimension")
        if d != len(extents):
            raise ConfigError(
                f"key 'dimension': {d} does not match {len(extents)} extents")
    boundary_raw = items.get("boundary", "open")
    boundary_toks = [tok.strip() for tok in boundary_raw.split(",")]
    boundary = boundary_toks[0] if len(boundary_toks) == 1 else tuple(boundary_toks)
    try:
        return Lattice(extents, boundary)
    except ValueError as exc:
        raise ConfigError(f"section [lattice]: {exc}") from None


def _parse_amplitude(value: str) -> tuple[float, float]:
    text = value.strip()
    if text.startswith("uniform(") and text.endswith(")"):
        text = text[len("uniform("):-1]
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(
            f"key 'amplitude': expected 'uniform(low, high)', got {value!r}")
    return (_parse_float(parts[0], "amplitude"), _parse_float(parts[1], "amplitude"))


def _parse_table(value: str) -> Table:
    entries = {}
    for tok in value.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ":" not in tok:
            raise ConfigError(f"key 'table': expected 'r:strength' pairs, got {tok!r}")
        r, f = tok.split(":", 1)
        entries[_parse_float(r, "table")] = _parse_float(f, "table")
    if not entries:
        raise ConfigError("key 'table': no entries")
    return Table(entries)


def _parse_base_law(variant: str, items: Mapping[str, str]) -> CouplingLaw:
    if variant == "power":
        return PowerLaw(_parse_float(_require(items, "alpha", "law"), "alpha"))
    if variant == "exponential":
        return Exponential(_parse_float(_require(items, "kappa", "law"), "kappa"))
    if variant == "cutoff":
        return Cutoff(_parse_float(_require(items, "lambda", "law"), "lambda"))
    if variant == "table":
        return _parse_table(_require(items, "table", "law"))
    raise ConfigError(
        f"key 'variant': unknown coupling law {variant!r} "
        "(expected power|exponential|cutoff|table|disordered)")


def parse_law(items: Mapping[str, str]) -> CouplingLaw:
    """Build a coupling law from the [law] section of a config file.

    Keys: ``variant`` = power|exponential|cutoff|table|disordered plus the
    variant's parameter (``alpha`` | ``kappa`` | ``lambda`` | ``table``).
    Disordered adds ``base`` (a non-disordered variant name, with its
    parameter in the same section), ``seed``, and optional ``amplitude`` =
    uniform(low, high).
    """
    variant = _require(items, "variant", "law").strip().lower()
    if variant != "disordered":
        return _parse_base_law(variant, items)
    base = _parse_base_law(_require(items, "base", "law").strip().lower(), items)
    seed = _parse_int(_require(items, "seed", "law"), "seed")
    amplitude = (0.0, 1.0)
    if "amplitude" in items:
        amplitude = _parse_amplitude(items["amplitude"])
    return Disordered(base=base, seed=seed, amplitude=amplitude)
