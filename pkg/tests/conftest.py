"""Shared fixtures: standard machines and random-machine generators."""

import pytest

import thermoneuron as tn


@pytest.fixture
def small_collector():
    """Single-input neuron with modest gaps (eps = 2, 1; target gap 1)."""
    return tn.build_neuron((2.0, 1.0), (0, 1), 1.0, 1.0, mu=1e-4)


@pytest.fixture
def fig2_inverter():
    """The steep inverter: input gap 20, beta0 = 0.5, target gap 0.1."""
    return tn.inverter(20.0, 0.5, 0.1)


def random_neuron(rng, n_max=3, mu=1e-4):
    """Random calibrated neuron with rails (0, 1)."""
    n = int(rng.integers(1, n_max + 1))
    h_tail = tuple(int(b) for b in rng.integers(0, 2, n))
    eps_tail = tuple(float(e) for e in rng.uniform(0.5, 4.0, n))
    # Reference qubit closes the resonance at a positive target gap.
    eps_z = float(rng.uniform(0.2, 2.0))
    tail_sum = sum(e if b == 0 else -e for b, e in zip(h_tail, eps_tail))
    ref = eps_z - tail_sum
    h = ((0,) if ref >= 0 else (1,)) + h_tail
    eps = (abs(ref),) + eps_tail
    if abs(ref) < 1e-6:
        eps = (eps[0] + 1.0,) + eps_tail
        eps_z += 1.0 if h[0] == 0 else -1.0
        if eps_z <= 0.05:
            return random_neuron(rng, n_max=n_max, mu=mu)
    beta0 = float(rng.uniform(0.0, 1.5))
    return tn.build_neuron(eps, h, beta0, eps_z, mu=mu)


def random_inputs(rng, spec):
    return tuple(float(b) for b in rng.uniform(0.0, 1.0, spec.n))
