import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rotgate.errors import OutOfRangeError, ValidationError
from rotgate.rotor import (NACS, RotationalBasis, RotorSpec, dipole_element, hamiltonian_at,
                           load_molecule, revival_time, rotational_energy, transition_frequency)
from rotgate.units import UNITS

C_CM = 2.99792458e10  # speed of light in cm/s


def spec_with_B_rad(B_rad, j_max=10):
    return RotorSpec(rotational_constant_B=B_rad / (2 * np.pi * C_CM), j_max=j_max)


def test_energies(spec):
    assert rotational_energy(spec, 0) == 0
    assert rotational_energy(spec, 1) == pytest.approx(2 * spec.B, rel=1e-15)
    assert rotational_energy(spec, 3) == pytest.approx(12 * spec.B, rel=1e-15)
    with pytest.raises(OutOfRangeError):
        rotational_energy(spec, spec.j_max + 1)
    with pytest.raises(OutOfRangeError):
        rotational_energy(spec, -1)


def test_transition_frequency(spec):
    # hand conversion: 2 * 0.0631 cm^-1 * 2 pi c
    hand = 2 * 0.0631 * 2 * np.pi * C_CM
    assert transition_frequency(spec, 0) == pytest.approx(hand, rel=1e-12)
    assert transition_frequency(spec, 0) == pytest.approx(2.3775e10, rel=1e-3)
    assert transition_frequency(spec, 0) / (2 * np.pi) == pytest.approx(3.7836e9, rel=1e-3)
    # 0.1 omega01 is the ~378 MHz bandwidth
    assert 0.1 * transition_frequency(spec, 0) / (2 * np.pi) == pytest.approx(378e6, rel=2e-3)
    assert transition_frequency(spec, 1) == pytest.approx(4 * spec.B, rel=1e-15)
    assert transition_frequency(spec_with_B_rad(1.0), 0) == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(OutOfRangeError):
        transition_frequency(spec, spec.j_max)


def test_dipole_elements(spec):
    mu0 = spec.dipole_moment_mu0
    assert dipole_element(spec, 0, 0) == pytest.approx(mu0 / np.sqrt(3), rel=1e-15)
    assert dipole_element(spec, 1, 0) == pytest.approx(mu0 * np.sqrt(4 / 15), rel=1e-15)
    assert dipole_element(spec, 1, 1) == pytest.approx(mu0 * np.sqrt(3 / 15), rel=1e-15)
    with pytest.raises(ValidationError):
        dipole_element(spec, 1, 2)
    with pytest.raises(OutOfRangeError):
        dipole_element(spec, spec.j_max, 0)


def test_dipole_monotone_in_M():
    spec = RotorSpec(j_max=21)
    for J in range(21):
        vals = [dipole_element(spec, J, M) for M in range(J + 1)]
        assert all(v > 0 for v in vals)
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert dipole_element(spec, J, -J) == dipole_element(spec, J, J)


def test_revival_time(spec):
    hand = np.pi / (2 * np.pi * C_CM * 0.0631)
    assert revival_time(spec) == pytest.approx(hand, rel=1e-12)
    assert revival_time(spec) == pytest.approx(264.3e-12, rel=2e-4)
    assert revival_time(spec_with_B_rad(np.pi)) == pytest.approx(1.0, rel=1e-12)
    doubled = RotorSpec(rotational_constant_B=2 * spec.rotational_constant_B)
    assert revival_time(doubled) == pytest.approx(revival_time(spec) / 2, rel=1e-14)


def test_hamiltonian_examples(spec, basis):
    H0 = hamiltonian_at(spec, basis, 0.0)
    assert np.array_equal(H0, np.diag(np.diag(H0)))
    assert np.allclose(np.diag(H0), [rotational_energy(spec, J) for J in range(spec.j_max + 1)])
    two = RotationalBasis(1)
    E = 1234.5
    H = hamiltonian_at(spec, two, E)
    c = spec.mu0 / np.sqrt(3) * E
    assert H.shape == (2, 2)
    assert H[0, 0] == 0 and H[1, 1] == pytest.approx(2 * spec.B, rel=1e-15)
    assert H[0, 1] == pytest.approx(-c, rel=1e-14) and H[1, 0] == H[0, 1]


@given(st.floats(-1e7, 1e7, allow_nan=False))
def test_hamiltonian_hermitian_tridiagonal(field):
    spec = NACS
    basis = RotationalBasis(10)
    H = hamiltonian_at(spec, basis, field)
    assert np.abs(H - H.conj().T).max() == 0
    assert np.all(np.triu(H, 2) == 0) and np.all(np.tril(H, -2) == 0)


def test_ladder_anharmonic(spec):
    gaps = np.diff([rotational_energy(spec, J) for J in range(spec.j_max + 1)])
    assert np.allclose(np.diff(gaps), 2 * spec.B, rtol=1e-12)
    # leakage transitions sit at least 2B away from the qubit carrier
    assert np.all(np.abs(gaps[1:] - gaps[0]) >= 2 * spec.B * (1 - 1e-12))


def test_basis_shape():
    b = RotationalBasis(4)
    assert b.dimension == 5
    assert b.states == tuple((J, 0) for J in range(5))


def test_spec_validation():
    for kw in ({"rotational_constant_B": 0}, {"dipole_moment_mu0": -1}, {"j_max": 1},
               {"j_max": 2.5}):
        with pytest.raises(ValidationError):
            RotorSpec(**kw)


@given(st.floats(1e-6, 1e6))
def test_unit_round_trips(x):
    assert UNITS.angular_to_wavenumber(UNITS.wavenumber_to_angular(x)) == pytest.approx(x, rel=1e-12)
    assert UNITS.dipole_to_debye(UNITS.dipole_to_internal(x)) == pytest.approx(x, rel=1e-12)
    assert UNITS.field_to_v_per_m(UNITS.field_from_v_per_m(x)) == pytest.approx(x, rel=1e-12)
    assert UNITS.time_to_s(UNITS.time_from_s(x)) == pytest.approx(x, rel=1e-12)


def test_load_molecule(tmp_path):
    p = tmp_path / "kRb.yaml"
    p.write_text("name: KRb\nB_cm1: 0.0371\nmu0_debye: 0.57\nj_max: 6\n")
    spec = load_molecule(p)
    assert (spec.molecule_name, spec.rotational_constant_B, spec.dipole_moment_mu0, spec.j_max) == \
        ("KRb", 0.0371, 0.57, 6)
    q = tmp_path / "m.json"
    q.write_text(json.dumps({"molecule": NACS.to_dict()}))
    assert load_molecule(q) == NACS
    with pytest.raises(ValidationError):
        load_molecule({"name": "x", "B_cm1": -1, "mu0_debye": 1})
