import numpy as np
import pytest

from rotgate.pulses import gate_params, synthesize
from rotgate.rotor import NACS, RotationalBasis, dipole_element
from rotgate.synthesis import named_gate

TABLE_GATES = ("Z", "H", "S", "T")


def fidelity(U, target):
    m = target.conj().T @ U[:2, :2]
    return (np.trace(m @ m.conj().T).real + abs(np.trace(m)) ** 2) / 6


@pytest.fixture(scope="session")
def spec():
    return NACS


@pytest.fixture(scope="session")
def basis(spec):
    return RotationalBasis.from_spec(spec)


@pytest.fixture(scope="session")
def mu01(spec):
    return dipole_element(spec, 0, 0)


@pytest.fixture(scope="session")
def gate_waveform(spec, mu01):
    """Default-timing waveform for a named gate, cached per session."""
    cache = {}

    def make(name, **kw):
        key = (name, tuple(sorted(kw.items())))
        if key not in cache:
            p, alpha = gate_params(named_gate(name), spec, **kw)
            cache[key] = (p, alpha, synthesize(p, mu01))
        return cache[key]

    return make
