"""Unit conversions between spectroscopic/SI quantities and internal units.

Internal units use hbar = 1 with SI time:

* time: s
* energy / frequency: rad/s
* dipole moment: (rad/s) per (V/m), i.e. mu / hbar
* electric field: V/m
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants

DEBYE_SI = 1e-21 / constants.c  # C*m


@dataclass(frozen=True)
class UnitSystem:
    cm1_to_rad_s: float = 2.0 * np.pi * constants.c * 100.0
    debye_to_internal: float = DEBYE_SI / constants.hbar
    field_internal_to_v_per_m: float = 1.0
    time_internal_to_s: float = 1.0

    def wavenumber_to_angular(self, cm1):
        return np.multiply(cm1, self.cm1_to_rad_s)

    def angular_to_wavenumber(self, omega):
        return np.divide(omega, self.cm1_to_rad_s)

    def dipole_to_internal(self, debye):
        return np.multiply(debye, self.debye_to_internal)

    def dipole_to_debye(self, internal):
        return np.divide(internal, self.debye_to_internal)

    def field_to_v_per_m(self, internal):
        return np.multiply(internal, self.field_internal_to_v_per_m)

    def field_from_v_per_m(self, v_per_m):
        return np.divide(v_per_m, self.field_internal_to_v_per_m)

    def time_to_s(self, internal):
        return np.multiply(internal, self.time_internal_to_s)

    def time_from_s(self, seconds):
        return np.divide(seconds, self.time_internal_to_s)


UNITS = UnitSystem()

PS = 1e-12
NS = 1e-9
