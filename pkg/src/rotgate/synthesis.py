"""Two-pulse gate synthesis and first-order Magnus algebra."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import trapezoid

from .errors import TruncationWarning, ValidationError
from .units import UNITS

HALF_PI = np.pi / 2
_TIE = 1e-12


def wrap_phase(phi):
    """Map angles into (-pi, pi]."""
    out = np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), 2 * np.pi)
    return float(out) if np.ndim(out) == 0 else out


def _check_unitary(matrix, tol=1e-12, what="gate"):
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{what} must be a square matrix")
    err = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
    if err >= tol:
        raise ValidationError(f"{what} is not unitary (|U^dag U - I|_max = {err:.3g})")
    return m


@dataclass(frozen=True)
class TargetGate:
    matrix: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValidationError("target gate must be 2x2")
        object.__setattr__(self, "matrix", _check_unitary(m))

    @classmethod
    def from_reals(cls, values, name="custom") -> "TargetGate":
        """Eight reals: row-major (re, im) pairs."""
        v = np.asarray(values, dtype=float)
        if v.shape != (8,):
            raise ValidationError("need exactly 8 real numbers")
        return cls((v[0::2] + 1j * v[1::2]).reshape(2, 2), name)


_S2 = 1 / np.sqrt(2)
NAMED_GATES = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
    "H": np.array([[_S2, _S2], [_S2, -_S2]]),
    "S": np.diag([1, 1j]),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
}


def named_gate(name: str) -> TargetGate:
    key = name.strip().upper()
    if key not in NAMED_GATES:
        raise ValidationError(f"unknown gate {name!r}; built-ins: {', '.join(NAMED_GATES)}")
    return TargetGate(NAMED_GATES[key], key)


@dataclass(frozen=True)
class TwoPulseParams:
    """Areas/phases of the two pulses plus timing and spectral settings.

    ``solve_two_pulse`` always returns ``theta1 = pi/2``; other values of
    ``theta1`` are accepted for the general forward product and zero-area runs.
    Times in s, frequencies in rad/s.
    """

    theta1: float = HALF_PI
    phi1: float = 0.0
    theta2: float = 0.0
    phi2: float = 0.0
    tau: float = 1e-9
    bandwidth: float = 1e9
    carrier: float = 1e10

    def __post_init__(self):
        if not self.tau > 0:
            raise ValidationError("delay tau must be positive")
        if not self.bandwidth > 0:
            raise ValidationError("bandwidth must be positive")
        if not self.carrier > 0:
            raise ValidationError("carrier must be positive")
        if not self.theta1 >= 0:
            raise ValidationError("theta1 is a pulse-area modulus and must be >= 0")

    @property
    def sigma_t(self) -> float:
        return 1.0 / self.bandwidth

    @property
    def is_reference(self) -> bool:
        return self.theta1 == HALF_PI

    def with_timing(self, tau=None, bandwidth=None, carrier=None) -> "TwoPulseParams":
        kw = {}
        if tau is not None:
            kw["tau"] = tau
        if bandwidth is not None:
            kw["bandwidth"] = bandwidth
        if carrier is not None:
            kw["carrier"] = carrier
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in
                ("theta1", "phi1", "theta2", "phi2", "tau", "bandwidth", "carrier")}


def rz(angle):
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


def ry(angle):
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def zy_decompose(gate) -> tuple:
    """Return (alpha, beta, gamma, delta) with U = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta).

    ``gamma`` lies in [0, pi]. When gamma is 0 or pi only one combination of
    beta and delta is fixed and delta is set to 0.
    """
    U = gate.matrix if isinstance(gate, TargetGate) else _check_unitary(np.asarray(gate, complex))
    alpha = 0.5 * np.angle(np.linalg.det(U))
    V = np.exp(-1j * alpha) * U
    a, b = V[0, 0], V[1, 0]
    gamma = 2 * np.arctan2(abs(b), abs(a))
    if abs(b) < _TIE:
        beta, delta = -2 * np.angle(a), 0.0
    elif abs(a) < _TIE:
        beta, delta = 2 * np.angle(b), 0.0
    else:
        beta = np.angle(b) - np.angle(a)
        delta = -np.angle(a) - np.angle(b)
    return float(alpha), float(beta), float(gamma), float(delta)


def zy_compose(alpha, beta, gamma, delta) -> np.ndarray:
    return np.exp(1j * alpha) * rz(beta) @ ry(gamma) @ rz(delta)


def magnus_single_pulse(theta, phi) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 1j * s * np.exp(-1j * phi)],
                     [1j * s * np.exp(1j * phi), c]], dtype=complex)


def magnus_two_pulse(params: TwoPulseParams) -> np.ndarray:
    """Second pulse after first: U(theta2, phi2) @ U(theta1, phi1)."""
    return magnus_single_pulse(params.theta2, params.phi2) @ magnus_single_pulse(
        params.theta1, params.phi1)


def magnus_two_pulse_closed_form(theta2, phi1, phi2) -> np.ndarray:
    """Closed form of the product for a pi/2 reference pulse."""
    x = theta2 + HALF_PI
    d = phi2 - phi1
    return np.array(
        [[np.cos(x) * np.exp(-1j * d), -np.sin(x) * np.exp(-1j * (phi1 + HALF_PI))],
         [np.sin(x) * np.exp(1j * (phi1 + HALF_PI)), np.cos(x) * np.exp(1j * d)]])


def solve_two_pulse(gate, tau=1e-9, bandwidth=1e9, carrier=1e10):
    """Invert the two-pulse product for a target gate.

    Returns ``(params, alpha)`` where ``magnus_two_pulse(params)`` equals
    ``exp(-1j*alpha) * gate``. Of the two global-phase branches (V and -V)
    the one putting the reference phase in (-3pi/2, -pi/2] is kept; the
    second area is taken in [0, pi/2]. Degenerate cases set phi2 = 0.
    """
    U = gate.matrix if isinstance(gate, TargetGate) else TargetGate(gate).matrix
    alpha = 0.5 * np.angle(np.linalg.det(U))
    V = np.exp(-1j * alpha) * U
    a, b = V[0, 0], V[1, 0]
    # x = theta2 + pi/2 on the cos(x) <= 0 branch
    x = np.arctan2(abs(b), -abs(a))
    phi1 = np.angle(-a) if abs(b) < _TIE else np.angle(b) - HALF_PI
    phi2 = 0.0 if abs(a) < _TIE else phi1 - np.angle(-a)
    # pick the branch with phi1 + pi in (-pi/2, pi/2]
    shifted = wrap_phase(phi1 + np.pi)
    if not (-HALF_PI + _TIE < shifted <= HALF_PI + _TIE):
        alpha += np.pi
        phi1 += np.pi
    params = TwoPulseParams(
        theta1=HALF_PI,
        phi1=wrap_phase(phi1),
        theta2=float(x - HALF_PI),
        phi2=wrap_phase(phi2),
        tau=tau,
        bandwidth=bandwidth,
        carrier=carrier,
    )
    return params, wrap_phase(alpha)


def complex_pulse_area(waveform, window=None, carrier=None, mu01=None, points_per_period=256):
    """Quadrature of mu01 * int E(t) exp(i w t) dt over ``window``.

    ``mu01`` is the transition dipole in Debye; ``carrier`` is the
    transition frequency in rad/s. Returns ``(|Theta|, arg Theta)``.
    """
    t0, t1 = waveform.window if window is None else window
    if carrier is None or mu01 is None:
        raise ValidationError("carrier and mu01 are required")
    if t1 <= t0:
        raise ValidationError("empty integration window")
    _check_support(waveform, t0, t1)
    period = 2 * np.pi / carrier
    n = max(int(np.ceil((t1 - t0) / period * points_per_period)), 64)
    t = np.linspace(t0, t1, n + 1)
    y = waveform(t) * np.exp(1j * carrier * t)
    area = UNITS.dipole_to_internal(mu01) * trapezoid(y, t)
    if abs(area) == 0.0:
        return 0.0, 0.0
    return float(abs(area)), float(np.angle(area))


def _check_support(waveform, t0, t1):
    from scipy.special import erf

    for seg in getattr(waveform, "segments", ()):
        if seg.amplitude == 0:
            continue
        s = np.sqrt(2) * seg.sigma_t
        frac = 0.5 * (erf((t1 - seg.center_time) / s) - erf((t0 - seg.center_time) / s))
        if frac < 0.9999:
            warnings.warn(
                f"window holds only {frac:.6f} of the envelope centred at {seg.center_time:.4g} s",
                TruncationWarning,
                stacklevel=3,
            )
