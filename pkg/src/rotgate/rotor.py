"""Rigid-rotor model of a linear polar molecule driven by a z-polarized field."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import OutOfRangeError, ValidationError
from .units import UNITS


@dataclass(frozen=True)
class RotorSpec:
    """Molecular constants and default basis cutoff.

    Parameters
    ----------
    rotational_constant_B : float
        Rotational constant in cm^-1.
    dipole_moment_mu0 : float
        Permanent dipole moment in Debye.
    j_max : int
        Highest rotational level kept in the default basis.
    molecule_name : str
    """

    rotational_constant_B: float = 0.0631
    dipole_moment_mu0: float = 4.6
    j_max: int = 10
    molecule_name: str = "NaCs"

    def __post_init__(self):
        if not self.rotational_constant_B > 0:
            raise ValidationError("rotational constant must be positive")
        if not self.dipole_moment_mu0 > 0:
            raise ValidationError("dipole moment must be positive")
        if int(self.j_max) != self.j_max or self.j_max < 2:
            raise ValidationError("j_max must be an integer >= 2")

    @property
    def B(self) -> float:
        """Rotational constant in rad/s."""
        return float(UNITS.wavenumber_to_angular(self.rotational_constant_B))

    @property
    def mu0(self) -> float:
        """Dipole moment in internal units, (rad/s)/(V/m)."""
        return float(UNITS.dipole_to_internal(self.dipole_moment_mu0))

    @property
    def omega01(self) -> float:
        return 2.0 * self.B

    @property
    def tau0(self) -> float:
        return revival_time(self)

    @property
    def mu01(self) -> float:
        """|0,0> <-> |1,0> transition dipole in internal units."""
        return float(UNITS.dipole_to_internal(dipole_element(self, 0, 0)))

    def to_dict(self) -> dict:
        return {
            "name": self.molecule_name,
            "B_cm1": self.rotational_constant_B,
            "mu0_debye": self.dipole_moment_mu0,
            "j_max": self.j_max,
        }


NACS = RotorSpec()


def load_molecule(source) -> RotorSpec:
    """Build a RotorSpec from a mapping or a YAML/JSON file.

    Recognised keys: ``name``, ``B_cm1``, ``mu0_debye``, ``j_max``.
    """
    if isinstance(source, (str, Path)):
        import yaml

        with open(source) as fh:
            data = yaml.safe_load(fh)
        if "molecule" in data and isinstance(data["molecule"], dict):
            data = data["molecule"]
    else:
        data = dict(source)
    unknown = set(data) - {"name", "B_cm1", "mu0_debye", "j_max"}
    if unknown:
        raise ValidationError(f"unknown molecule keys: {sorted(unknown)}")
    return RotorSpec(
        rotational_constant_B=float(data.get("B_cm1", NACS.rotational_constant_B)),
        dipole_moment_mu0=float(data.get("mu0_debye", NACS.dipole_moment_mu0)),
        j_max=int(data.get("j_max", NACS.j_max)),
        molecule_name=str(data.get("name", "custom")),
    )


@dataclass(frozen=True)
class RotationalBasis:
    """States |J, M=0> for J = 0..j_max in ascending order.

    ``j_max`` may be lowered to 1 here (two-level truncation) even though a
    RotorSpec always carries at least one leakage level.
    """

    j_max: int
    states: tuple = field(init=False)

    def __post_init__(self):
        if int(self.j_max) != self.j_max or self.j_max < 1:
            raise ValidationError("basis needs j_max >= 1")
        object.__setattr__(self, "states", tuple((j, 0) for j in range(self.j_max + 1)))

    @classmethod
    def from_spec(cls, spec: RotorSpec, j_max: int | None = None) -> "RotationalBasis":
        return cls(spec.j_max if j_max is None else j_max)

    @property
    def dimension(self) -> int:
        return self.j_max + 1

    def energies(self, spec: RotorSpec) -> np.ndarray:
        J = np.arange(self.dimension, dtype=float)
        return spec.B * J * (J + 1.0)

    def couplings(self, spec: RotorSpec) -> np.ndarray:
        """mu_{J,J+1} for M = 0, internal units, length j_max."""
        J = np.arange(self.j_max, dtype=float)
        return spec.mu0 * np.sqrt((J + 1.0) ** 2 / ((2 * J + 3.0) * (2 * J + 1.0)))


def rotational_energy(spec: RotorSpec, J: int) -> float:
    if not 0 <= J <= spec.j_max:
        raise OutOfRangeError(f"J={J} outside basis 0..{spec.j_max}")
    return spec.B * J * (J + 1)


def transition_frequency(spec: RotorSpec, J: int = 0) -> float:
    if not 0 <= J < spec.j_max:
        raise OutOfRangeError(f"no J+1 level above J={J} in basis 0..{spec.j_max}")
    return rotational_energy(spec, J + 1) - rotational_energy(spec, J)


def dipole_element(spec: RotorSpec, J: int, M: int = 0) -> float:
    """<J+1, M| mu0 cos(theta) |J, M> in Debye."""
    if abs(M) > J:
        raise ValidationError(f"|M|={abs(M)} exceeds J={J}")
    if not 0 <= J < spec.j_max:
        raise OutOfRangeError(f"no J+1 level above J={J} in basis 0..{spec.j_max}")
    return spec.dipole_moment_mu0 * np.sqrt(((J + 1) ** 2 - M**2) / ((2 * J + 3) * (2 * J + 1)))


def revival_time(spec: RotorSpec) -> float:
    """Full revival time pi/B in seconds."""
    return np.pi / spec.B


def hamiltonian_at(spec: RotorSpec, basis: RotationalBasis, field_value: float) -> np.ndarray:
    """Lab-frame Hamiltonian (rad/s) for an instantaneous field in V/m."""
    E = basis.energies(spec)
    off = -basis.couplings(spec) * UNITS.field_from_v_per_m(field_value)
    return np.diag(E) + np.diag(off, 1) + np.diag(off, -1)
