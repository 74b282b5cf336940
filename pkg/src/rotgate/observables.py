"""Orientation readout, phase extraction, angular distributions and the magic angle."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_legendre

from .errors import ValidationError
from .propagator import QuantumState
from .rotor import NACS, RotorSpec
from .synthesis import wrap_phase

A_MAX = 1.0 / np.sqrt(3.0)
MIN_PERIODS = 2.0
_A_FLOOR = 1e-6


def orientation_factors(n: int) -> np.ndarray:
    """Geometric factors <J+1,0|cos|J,0> for J = 0..n-2."""
    J = np.arange(n - 1, dtype=float)
    return (J + 1) / np.sqrt((2 * J + 1) * (2 * J + 3))


def orientation(state) -> float:
    """<cos theta> for a lab-frame state (or a raw amplitude vector)."""
    if isinstance(state, QuantumState):
        if state.frame != "lab":
            raise ValidationError("orientation needs a lab-frame state")
        c = state.amplitudes
    else:
        c = np.asarray(state, dtype=complex)
    g = orientation_factors(c.size)
    return float(2.0 * np.sum(g * (np.conj(c[:-1]) * c[1:]).real))


@dataclass(frozen=True)
class OrientationTrace:
    t: np.ndarray  # s
    values: np.ndarray
    omega01: float

    def __post_init__(self):
        if np.any(np.abs(self.values) > 1 + 1e-12):
            raise ValidationError("orientation outside [-1, 1]")


def free_evolution(state: QuantumState, spec: RotorSpec, times) -> np.ndarray:
    """Lab-frame amplitudes after field-free evolution to each time (rows)."""
    c = state.amplitudes
    J = np.arange(c.size)
    E = spec.B * J * (J + 1)
    if state.frame == "interaction":
        # c_lab(t) = exp(-i E t) c_I
        ref = 0.0
    else:
        ref = state.time
    dt = np.asarray(times, dtype=float)[:, None] - ref
    return c[None, :] * np.exp(-1j * E[None, :] * dt)


def orientation_trace(state: QuantumState, spec: RotorSpec = NACS, t_start=None, span=None,
                      step=None, times=None) -> OrientationTrace:
    """Field-free <cos theta>(t) following ``state``.

    Default sampling is tau0/64 over four revival periods starting at the
    state's time.
    """
    if times is None:
        t_start = state.time if t_start is None else t_start
        span = 4 * spec.tau0 if span is None else span
        step = spec.tau0 / 64 if step is None else step
        times = t_start + step * np.arange(int(round(span / step)) + 1)
    times = np.asarray(times, dtype=float)
    amps = free_evolution(state, spec, times)
    g = orientation_factors(amps.shape[1])
    vals = 2.0 * np.sum(g[None, :] * (np.conj(amps[:, :-1]) * amps[:, 1:]).real, axis=1)
    return OrientationTrace(times, vals, spec.omega01)


def two_level_model(c0, c1) -> tuple:
    """Amplitude and phase of A cos(w01 t - phi01) for c0|0> + c1|1>."""
    c0, c1 = complex(c0), complex(c1)
    norm = abs(c0) ** 2 + abs(c1) ** 2
    if abs(norm - 1.0) > 1e-8:
        raise ValidationError(f"|c0|^2 + |c1|^2 = {norm:.12f}, expected 1")
    A = 2.0 / np.sqrt(3.0) * abs(c0) * abs(c1)
    phi = wrap_phase(np.angle(c1) - np.angle(c0)) if A > 0 else 0.0
    return float(A), float(phi)


@dataclass(frozen=True)
class PhaseFit:
    amplitude: float
    phase: float
    residual_rms: float
    phase_defined: bool

    def to_dict(self) -> dict:
        return {"amplitude": self.amplitude, "phase": self.phase,
                "residual_rms": self.residual_rms, "phase_defined": self.phase_defined}


def extract_phase(trace: OrientationTrace) -> PhaseFit:
    """Least-squares fit of A cos(w01 t - phi) with w01 held fixed."""
    t = np.asarray(trace.t, dtype=float)
    w = trace.omega01
    if t.size < 4 or (t.max() - t.min()) * w / (2 * np.pi) < MIN_PERIODS:
        raise ValidationError(f"trace must span at least {MIN_PERIODS:g} periods of omega01")
    X = np.column_stack([np.cos(w * t), np.sin(w * t)])
    (a, b), *_ = np.linalg.lstsq(X, trace.values, rcond=None)
    resid = trace.values - X @ np.array([a, b])
    A = float(np.hypot(a, b))
    defined = A >= _A_FLOOR
    if not defined:
        warnings.warn("fitted amplitude below 1e-6; phase undefined", RuntimeWarning, stacklevel=2)
    phase = float(wrap_phase(np.arctan2(b, a))) if defined else float("nan")
    return PhaseFit(A, phase, float(np.sqrt(np.mean(resid**2))), defined)


def fitted_period(trace: OrientationTrace) -> float:
    """Oscillation period from a free-frequency sinusoid fit (s)."""
    from scipy.optimize import curve_fit

    t = trace.t - trace.t[0]
    base = extract_phase(trace)

    def model(tt, A, w, phi):
        return A * np.cos(w * tt - phi)

    p0 = (base.amplitude, trace.omega01, base.phase - trace.omega01 * trace.t[0])
    (A, w, _), _ = curve_fit(model, t, trace.values, p0=p0)
    return float(2 * np.pi / abs(w))


def angular_distribution(state, theta_grid) -> np.ndarray:
    """|sum_J c_J Y_J0(theta)|^2 per steradian on ``theta_grid`` (rad)."""
    theta = np.asarray(theta_grid, dtype=float)
    if np.any(theta < -1e-12) or np.any(theta > np.pi + 1e-12):
        raise ValidationError("theta grid must lie in [0, pi]")
    c = state.amplitudes if isinstance(state, QuantumState) else np.asarray(state, dtype=complex)
    x = np.cos(theta)
    psi = np.zeros(theta.shape, dtype=complex)
    for J, cJ in enumerate(c):
        if cJ != 0:
            psi += cJ * np.sqrt((2 * J + 1) / (4 * np.pi)) * eval_legendre(J, x)
    return np.abs(psi) ** 2


def solid_angle_moment(state, power=0, nodes=64) -> float:
    """2 pi int cos^power(theta) rho(theta) sin(theta) d theta by Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    rho = angular_distribution(state, np.arccos(x))
    return float(2 * np.pi * np.sum(w * x**power * rho))


def tensor_shift_factor(theta_prime) -> float:
    """P2(cos theta'), the polarization dependence of the tensor light shift."""
    return eval_legendre(2, np.cos(theta_prime))


def magic_angle() -> float:
    return float(np.arccos(1.0 / np.sqrt(3.0)))
