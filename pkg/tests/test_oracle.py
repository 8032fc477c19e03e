import math

import numpy as np
import pytest

from wgstate.geometry import EdgeProfile, Lattice, PhaseProfile, PowerLaw
from wgstate.oracle import evolve, partial_trace, random_instance
from wgstate.rdm import ProductInput


def gate_by_gate(profile, state):
    """Second reference: literally apply each controlled-phase gate."""
    n = profile.n_sites
    amps = state.amplitudes
    psi = np.array([1.0 + 0.0j])
    for k in range(n):
        psi = np.kron(psi, amps[k])
    idx = np.arange(2 ** n)
    for k in range(n):
        for l in range(k + 1, n):
            phi = profile.phase(k, l)
            bit_k = (idx >> (n - 1 - k)) & 1
            bit_l = (idx >> (n - 1 - l)) & 1
            mask = (bit_k & bit_l).astype(bool)
            psi = psi.copy()
            psi[mask] *= np.exp(-1j * phi)
    return psi


def test_no_evolution_is_product_state():
    lat = Lattice(5)
    prof = PhaseProfile(lat, PowerLaw(alpha=2.0), time=0.0)
    rng = np.random.default_rng(1)
    state = ProductInput.random(5, rng)
    psi = evolve(prof, state)
    expected = np.array([1.0 + 0.0j])
    for k in range(5):
        expected = np.kron(expected, state.amplitudes[k])
    assert np.abs(psi - expected).max() < 1e-15


def test_single_controlled_phase():
    prof = EdgeProfile(2, {(0, 1): math.pi})
    psi = evolve(prof, ProductInput.plus(2))
    expected = 0.5 * np.array([1, 1, 1, -1], dtype=complex)
    assert np.abs(psi - expected).max() < 1e-15


def test_matches_gate_by_gate_application():
    rng = np.random.default_rng(7)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        phases = {(k, l): float(rng.uniform(0, 2 * math.pi))
                  for k in range(n) for l in range(k + 1, n)}
        prof = EdgeProfile(n, phases)
        state = ProductInput.random(n, rng)
        assert np.abs(evolve(prof, state) - gate_by_gate(prof, state)).max() < 1e-13


def test_norm_preserved():
    rng = np.random.default_rng(3)
    for _ in range(10):
        prof, state, _ = random_instance(rng, n_max=10, a_max=3)
        psi = evolve(prof, state)
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-12


def test_too_many_sites_rejected():
    lat = Lattice(21)
    prof = PhaseProfile(lat, PowerLaw(alpha=2.0), time=1.0)
    with pytest.raises(ValueError):
        evolve(prof, ProductInput.plus(21))


def test_partial_trace_bell_state():
    psi = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    rho = partial_trace(psi, [0])
    assert np.abs(rho - 0.5 * np.eye(2)).max() < 1e-15


def test_partial_trace_all_sites_is_projector():
    rng = np.random.default_rng(11)
    psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    psi /= np.linalg.norm(psi)
    rho = partial_trace(psi, [0, 1, 2])
    assert np.abs(rho - np.outer(psi, psi.conj())).max() < 1e-15


def test_partial_trace_properties():
    rng = np.random.default_rng(5)
    prof, state, _ = random_instance(rng, n_max=10, a_max=3)
    psi = evolve(prof, state)
    sites = rng.choice(prof.n_sites, size=3, replace=False)
    rho = partial_trace(psi, sites)
    assert np.abs(rho - rho.conj().T).max() < 1e-12
    assert abs(np.trace(rho).real - 1.0) < 1e-12
    assert np.linalg.eigvalsh(rho).min() > -1e-10


def test_partial_trace_bit_order():
    # first listed site is the most significant bit of the subset index
    prof = EdgeProfile(3, {(0, 1): 0.0})
    amps = np.zeros((3, 2), dtype=complex)
    amps[0] = [1, 0]   # site 0 in |0>
    amps[1] = [0, 1]   # site 1 in |1>
    amps[2] = [1, 0]
    psi = evolve(prof, ProductInput(amps))
    rho01 = partial_trace(psi, [0, 1])
    assert abs(rho01[0b01, 0b01] - 1.0) < 1e-15
    rho10 = partial_trace(psi, [1, 0])
    assert abs(rho10[0b10, 0b10] - 1.0) < 1e-15


def test_partial_trace_validates():
    psi = np.ones(4, dtype=complex) / 2.0
    with pytest.raises(ValueError):
        partial_trace(psi[:3], [0])
    with pytest.raises(ValueError):
        partial_trace(psi, [0, 0])
    with pytest.raises(ValueError):
        partial_trace(psi, [2])
