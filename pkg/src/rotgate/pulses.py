"""Gaussian two-pulse fields: time domain, spectrum, and imperfection models."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import OverlapWarning, UndersamplingWarning, ValidationError
from .rotor import NACS, RotorSpec, dipole_element
from .synthesis import TwoPulseParams, solve_two_pulse
from .units import UNITS

WINDOW_SIGMAS = 5.0
_AMP = np.sqrt(2.0 / np.pi)


@dataclass(frozen=True)
class Segment:
    amplitude: float  # V/m, >= 0
    center_time: float  # s
    sigma_t: float  # s
    carrier: float  # rad/s
    carrier_phase: float  # rad
    support: tuple = (-np.inf, np.inf)  # s, field is zero outside

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        x = (t - self.center_time) / self.sigma_t
        val = self.amplitude * np.exp(-0.5 * x * x) * np.cos(self.carrier * t - self.carrier_phase)
        lo, hi = self.support
        if np.isfinite(lo) or np.isfinite(hi):
            val = np.where((t >= lo) & (t <= hi), val, 0.0)
        return val

    def to_dict(self) -> dict:
        out = {k: float(getattr(self, k)) for k in
               ("amplitude", "center_time", "sigma_t", "carrier", "carrier_phase")}
        out["support"] = [float(v) for v in self.support]
        return out


@dataclass(frozen=True)
class Waveform:
    """Real field E(t) = sum of Gaussian segments, zero outside ``window``.

    Carrier phases refer to the global clock: each segment is
    A exp(-(t-c)^2 / 2 sigma^2) cos(w t - phase).
    """

    segments: tuple = ()
    window: tuple = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        t0, t1 = (float(w) for w in self.window)
        if t1 < t0:
            raise ValidationError("window end precedes start")
        object.__setattr__(self, "window", (t0, t1))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for seg in self.segments:
            out = out + seg(t)
        inside = (t >= self.window[0]) & (t <= self.window[1])
        return np.where(inside, out, 0.0)

    @property
    def duration(self) -> float:
        return self.window[1] - self.window[0]

    @property
    def carrier(self) -> float | None:
        active = [s.carrier for s in self.segments if s.amplitude != 0]
        return max(active) if active else None

    def segment(self, index: int) -> "Waveform":
        """Single segment with the same window."""
        return Waveform((self.segments[index],), self.window)

    def shifted(self, delta: float) -> "Waveform":
        return Waveform(
            tuple(replace(s, center_time=s.center_time + delta,
                          support=(s.support[0] + delta, s.support[1] + delta))
                  for s in self.segments),
            (self.window[0] + delta, self.window[1] + delta),
        )

    def translated(self, delta: float) -> "Waveform":
        """E(t - delta): envelope and carrier both move, unlike ``shifted``."""
        moved = self.shifted(delta)
        return Waveform(
            tuple(replace(s, carrier_phase=s.carrier_phase + s.carrier * delta) for s in moved.segments),
            moved.window,
        )

    def scaled(self, factor: float) -> "Waveform":
        if factor < 0:
            segs = tuple(replace(s, amplitude=-factor * s.amplitude,
                                 carrier_phase=s.carrier_phase + np.pi) for s in self.segments)
        else:
            segs = tuple(replace(s, amplitude=factor * s.amplitude) for s in self.segments)
        return Waveform(segs, self.window)

    def to_dict(self) -> dict:
        return {"window": list(self.window), "segments": [s.to_dict() for s in self.segments]}

    @classmethod
    def from_dict(cls, data) -> "Waveform":
        segs = []
        for s in data["segments"]:
            s = dict(s)
            s["support"] = tuple(s.get("support", (-np.inf, np.inf)))
            segs.append(Segment(**s))
        return cls(tuple(segs), tuple(data["window"]))


def zero_waveform(t0=0.0, t1=0.0) -> Waveform:
    return Waveform((), (t0, t1))


@dataclass(frozen=True)
class ErrorModel:
    """Perturbations applied equally to both pulses.

    bandwidth_error is fractional, common_phase_error in rad, detuning in
    rad/s, delay_error in s.
    """

    bandwidth_error: float = 0.0
    common_phase_error: float = 0.0
    detuning: float = 0.0
    delay_error: float = 0.0

    FIELDS = ("bandwidth_error", "common_phase_error", "detuning", "delay_error")

    def to_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in self.FIELDS}


def _area_to_amplitude(theta, mu01, sigma_t):
    return _AMP * theta / (mu01 * sigma_t)


def synthesize(params: TwoPulseParams, mu01: float, t_offset: float = 0.0) -> Waveform:
    """Build the two-pulse field for ``params``.

    ``mu01`` is the 0-1 transition dipole in Debye. The first pulse is
    centred at ``t_offset`` (0 for a standalone gate), the second ``tau``
    later; carrier phases stay referenced to t = 0.
    """
    if not mu01 > 0:
        raise ValidationError("mu01 must be positive")
    mu = float(UNITS.dipole_to_internal(mu01))
    sig = params.sigma_t
    if params.tau < 6 * sig:
        warnings.warn(
            f"pulses overlap: tau = {params.tau:.4g} s < 6 sigma_t = {6 * sig:.4g} s",
            OverlapWarning,
            stacklevel=2,
        )
    window = (t_offset - WINDOW_SIGMAS * sig, t_offset + params.tau + WINDOW_SIGMAS * sig)
    segs = []
    for theta, phi, center in ((params.theta1, params.phi1, 0.0),
                               (params.theta2, params.phi2, params.tau)):
        if theta < 0:
            theta, phi = -theta, phi + np.pi
        segs.append(Segment(_area_to_amplitude(theta, mu, sig), t_offset + center, sig,
                            params.carrier, phi, window))
    return Waveform(tuple(segs), window)


def spectral_field(params: TwoPulseParams, omega, mu01: float = None):
    """Positive-frequency spectrum of the synthesized field.

    Gaussian amplitudes a_i = theta_i/mu01 with spectral phases -phi1 and
    w0*tau - phi2; the second term carries the delay factor exp(-i w tau).
    This is the Fourier transform int E(t) exp(-i w t) dt of ``synthesize``
    up to the negligible negative-frequency image. Units: (V/m)*s.
    """
    if mu01 is None:
        mu01 = dipole_element(NACS, 0, 0)
    mu = float(UNITS.dipole_to_internal(mu01))
    w = np.asarray(omega, dtype=float)
    w0, dw, tau = params.carrier, params.bandwidth, params.tau
    gauss = np.exp(-((w - w0) ** 2) / (2 * dw**2))
    a1, a2 = params.theta1 / mu, params.theta2 / mu
    return (a1 * gauss * np.exp(-1j * params.phi1)
            + a2 * gauss * np.exp(1j * (w0 * tau - params.phi2)) * np.exp(-1j * w * tau))


def field_fourier_transform(params: TwoPulseParams, omega, mu01: float = None):
    """Full two-sided transform of the real field (both frequency images)."""
    w = np.asarray(omega, dtype=float)
    return spectral_field(params, w, mu01) + np.conj(spectral_field(params, -w, mu01))


def apply_errors(params: TwoPulseParams, err: ErrorModel) -> TwoPulseParams:
    bw = params.bandwidth * (1.0 + err.bandwidth_error)
    tau = params.tau + err.delay_error
    carrier = params.carrier + err.detuning
    if bw <= 0 or tau <= 0 or carrier <= 0:
        raise ValidationError(
            f"error model gives non-positive bandwidth/delay/carrier ({bw:.3g}, {tau:.3g}, {carrier:.3g})")
    return replace(
        params,
        phi1=params.phi1 + err.common_phase_error,
        phi2=params.phi2 + err.common_phase_error,
        tau=tau,
        bandwidth=bw,
        carrier=carrier,
    )


def sample(waveform: Waveform, dt: float):
    """Uniform samples over the window, both end points included."""
    if not dt > 0:
        raise ValidationError("dt must be positive")
    w = waveform.carrier
    if w is not None and dt > 2 * np.pi / w / 10:
        warnings.warn(f"dt = {dt:.3g} s undersamples the carrier", UndersamplingWarning, stacklevel=2)
    t0, t1 = waveform.window
    n = int(np.ceil((t1 - t0) / dt - 1e-9))
    t = t0 + dt * np.arange(n + 1)
    return t, waveform(t)


def gate_params(gate, spec: RotorSpec = NACS, bandwidth_ratio: float = 0.1,
                delay_revivals: float = 11.2):
    """Solve ``gate`` and attach the nominal timing for ``spec``.

    Bandwidth is ``bandwidth_ratio * omega01``, delay ``delay_revivals * tau0``,
    carrier on resonance. Returns ``(params, alpha)``.
    """
    return solve_two_pulse(
        gate,
        tau=delay_revivals * spec.tau0,
        bandwidth=bandwidth_ratio * spec.omega01,
        carrier=spec.omega01,
    )
