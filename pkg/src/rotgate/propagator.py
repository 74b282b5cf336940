"""Time-ordered propagation of the driven rotor with unitary exponential steps."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NumericalError, OutOfRangeError, ValidationError
from .rotor import RotationalBasis, RotorSpec

STEPS_PER_PERIOD = 64
MIN_STEPS_PER_PERIOD = 40
UNITARITY_TOL = 1e-8
DT_TOL = 1e-8
BASIS_TOL = 1e-10
# field samples whose coupling phase per step is below this are treated as zero
_NEGLIGIBLE_PHASE = 1e-17

_SQ3 = np.sqrt(3.0)
# fourth-order commutator-free scheme: Gauss nodes and weights
_CF4_NODES = (0.5 - _SQ3 / 6, 0.5 + _SQ3 / 6)
_CF4_A1 = (3 - 2 * _SQ3) / 12
_CF4_A2 = (3 + 2 * _SQ3) / 12
SCHEMES = {"midpoint": 2, "cf4": 4}


@dataclass(frozen=True)
class QuantumState:
    amplitudes: np.ndarray
    time: float = 0.0
    frame: str = "lab"

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if self.frame not in ("lab", "interaction"):
            raise ValidationError(f"unknown frame {self.frame!r}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise ValidationError(f"state norm {norm:.15f} differs from 1")
        object.__setattr__(self, "amplitudes", amps)

    def to_frame(self, frame: str, energies) -> "QuantumState":
        """Switch between lab and interaction frames (c_I = exp(i E t) c_lab)."""
        if frame == self.frame:
            return self
        sign = 1.0 if frame == "interaction" else -1.0
        phase = np.exp(sign * 1j * np.asarray(energies)[: self.amplitudes.size] * self.time)
        return QuantumState(self.amplitudes * phase, self.time, frame)

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def basis_state(basis: RotationalBasis, J: int = 0, time: float = 0.0) -> QuantumState:
    if not 0 <= J < basis.dimension:
        raise OutOfRangeError(f"J={J} outside basis")
    amps = np.zeros(basis.dimension, dtype=complex)
    amps[J] = 1.0
    return QuantumState(amps, time, "lab")


def superposition(basis: RotationalBasis, c0, c1, time: float = 0.0, frame: str = "lab") -> QuantumState:
    amps = np.zeros(basis.dimension, dtype=complex)
    amps[0], amps[1] = c0, c1
    return QuantumState(amps, time, frame)


@dataclass
class PropagationResult:
    unitary_lab: np.ndarray
    unitary_interaction: np.ndarray
    t0: float
    tf: float
    snapshot_times: np.ndarray
    snapshots_lab: np.ndarray
    leakage_max: float
    dt_used: float
    n_steps: int
    scheme: str
    j_max: int
    backend: str
    converged: bool = False
    convergence: dict = field(default_factory=dict)

    @property
    def leakage_final(self) -> float:
        """Population left outside J <= 1 at tf, worst of the two qubit inputs."""
        pops = np.sum(np.abs(self.unitary_lab[:2, :2]) ** 2, axis=0)
        return float(max(1.0 - pops.min(), 0.0))

    @property
    def trajectory(self) -> list:
        """Lab-frame states evolved from |0,0> at t0, at every snapshot."""
        out = [QuantumState(np.eye(self.unitary_lab.shape[0])[:, 0], self.t0)]
        for t, U in zip(self.snapshot_times, self.snapshots_lab):
            col = U[:, 0]
            out.append(QuantumState(col / np.linalg.norm(col), float(t)))
        if out[-1].time < self.tf - 0.5 * self.dt_used:
            col = self.unitary_lab[:, 0]
            out.append(QuantumState(col / np.linalg.norm(col), self.tf))
        return out

    def metadata(self) -> dict:
        return {
            "t0": self.t0, "tf": self.tf, "dt": self.dt_used, "n_steps": self.n_steps,
            "scheme": self.scheme, "j_max": self.j_max, "backend": self.backend,
            "leakage_max": self.leakage_max, "leakage_final": self.leakage_final,
            "converged": self.converged,
            **{k: v for k, v in self.convergence.items()},
        }


def _default_dt(spec, waveform):
    carrier = waveform.carrier or spec.omega01
    return 2 * np.pi / carrier / STEPS_PER_PERIOD


def _check_dt(spec, waveform, dt):
    carrier = waveform.carrier or spec.omega01
    limit = 2 * np.pi / carrier / MIN_STEPS_PER_PERIOD
    if not 0 < dt <= limit * (1 + 1e-12):
        raise ValidationError(f"dt = {dt:.4g} s exceeds carrier period/{MIN_STEPS_PER_PERIOD}")


def _step_fields(waveform, t0, dt, n, scheme, couplings):
    if scheme == "midpoint":
        fields = waveform(t0 + (np.arange(n) + 0.5) * dt)[:, None]
        h = np.array([1.0])
    elif scheme == "cf4":
        start = t0 + np.arange(n) * dt
        f1 = waveform(start + _CF4_NODES[0] * dt)
        f2 = waveform(start + _CF4_NODES[1] * dt)
        fields = np.stack([_CF4_A2 * f1 + _CF4_A1 * f2, _CF4_A1 * f1 + _CF4_A2 * f2], axis=1)
        h = np.array([0.5, 0.5])
    else:
        raise ValidationError(f"unknown scheme {scheme!r}; choose from {sorted(SCHEMES)}")
    cmax = couplings.max() if couplings.size else 0.0
    fields = np.where(np.abs(fields) * cmax * dt < _NEGLIGIBLE_PHASE, 0.0, fields)
    return np.ascontiguousarray(fields), h


def _advance(energies, couplings, waveform, t_start, t_end, dt, scheme, Y, stride, n_track, backend):
    n = max(int(np.ceil((t_end - t_start) / dt - 1e-9)), 1) if t_end > t_start else 0
    if n == 0:
        return np.empty((0,) + Y.shape, complex), 0.0, 0, dt
    h_dt = (t_end - t_start) / n
    fields, h = _step_fields(waveform, t_start, h_dt, n, scheme, couplings)
    snaps, leak = kernels.propagate_steps(energies, couplings, fields, h, h_dt, Y, stride, n_track,
                                          backend=backend)
    return snaps, leak, n, h_dt


def interaction_frame(U_lab, energies, t0, tf):
    return np.exp(1j * energies * tf)[:, None] * U_lab * np.exp(-1j * energies * t0)[None, :]


def propagate(spec: RotorSpec, basis: RotationalBasis, waveform, dt=None, t0=None, tf=None,
              scheme="midpoint", snapshots=256, backend=None) -> PropagationResult:
    """Propagate the full evolution operator over [t0, tf].

    ``t0``/``tf`` default to the waveform window and must contain it. About
    ``snapshots`` intermediate operators are stored for the trajectory.
    """
    w0, w1 = waveform.window
    t0 = w0 if t0 is None else float(t0)
    tf = w1 if tf is None else float(tf)
    if waveform.segments and (t0 > w0 + 1e-18 or tf < w1 - 1e-18):
        raise ValidationError(f"[{t0:.4g}, {tf:.4g}] does not contain the window [{w0:.4g}, {w1:.4g}]")
    if tf < t0:
        raise ValidationError("tf precedes t0")
    dt = _default_dt(spec, waveform) if dt is None else float(dt)
    _check_dt(spec, waveform, dt)
    energies = basis.energies(spec)
    couplings = basis.couplings(spec)
    Y = np.eye(basis.dimension, dtype=complex)
    n_est = max(int(np.ceil((tf - t0) / dt - 1e-9)), 1)
    stride = max(n_est // snapshots, 1) if snapshots else 0
    backend = backend or kernels.BACKEND
    # leakage is tracked along the |0,0> column, i.e. the trajectory
    snaps, leak, n, h_dt = _advance(energies, couplings, waveform, t0, tf, dt, scheme, Y, stride,
                                    1, backend)
    drift = np.abs(Y.conj().T @ Y - np.eye(basis.dimension)).max()
    if not drift < UNITARITY_TOL:
        raise NumericalError(f"unitarity drift {drift:.3g} exceeds {UNITARITY_TOL}")
    times = t0 + h_dt * stride * np.arange(1, len(snaps) + 1) if stride else np.empty(0)
    return PropagationResult(
        unitary_lab=Y,
        unitary_interaction=interaction_frame(Y, energies, t0, tf),
        t0=t0, tf=tf,
        snapshot_times=times,
        snapshots_lab=snaps,
        leakage_max=max(float(leak), 0.0),
        dt_used=h_dt, n_steps=n, scheme=scheme, j_max=basis.j_max, backend=backend,
    )


def evolve_state(spec: RotorSpec, basis: RotationalBasis, waveform, initial: QuantumState,
                 snapshot_times, dt=None, scheme="midpoint", tf=None, backend=None) -> list:
    """Lab-frame states at each requested time, starting from ``initial``.

    Times must lie in [initial.time, tf]; ``tf`` defaults to the end of the
    waveform window (or the last requested time if that is later and
    ``tf`` was not given explicitly it is an error).
    """
    if initial.amplitudes.size != basis.dimension:
        raise ValidationError("initial state does not match basis dimension")
    energies = basis.energies(spec)
    couplings = basis.couplings(spec)
    state = initial.to_frame("lab", energies)
    times = np.asarray(snapshot_times, dtype=float).ravel()
    t_start = state.time
    t_end = max(waveform.window[1], t_start) if tf is None else float(tf)
    if times.size and (times.min() < t_start - 1e-18 or times.max() > t_end + 1e-18):
        raise OutOfRangeError(f"snapshot times must lie in [{t_start:.4g}, {t_end:.4g}] s")
    dt = _default_dt(spec, waveform) if dt is None else float(dt)
    _check_dt(spec, waveform, dt)
    backend = backend or kernels.BACKEND
    order = np.argsort(times, kind="stable")
    Y = state.amplitudes.reshape(-1, 1).copy()
    out = [None] * times.size
    t = t_start
    for idx in order:
        target = times[idx]
        if target > t:
            _advance(energies, couplings, waveform, t, target, dt, scheme, Y, 0, 0, backend)
            t = target
        amps = Y[:, 0]
        drift = abs(np.linalg.norm(amps) - 1.0)
        if drift > UNITARITY_TOL:
            raise NumericalError(f"norm drift {drift:.3g}")
        out[idx] = QuantumState(amps / np.linalg.norm(amps), float(target), "lab")
    return out


def leakage_of(result) -> float:
    """Largest population outside J = 0, 1 along a trajectory."""
    if isinstance(result, PropagationResult):
        return result.leakage_max
    states = list(result)
    if not states:
        raise ValidationError("empty trajectory")
    return float(max(max(1.0 - s.populations()[:2].sum(), 0.0) for s in states))


def _qubit_block(U):
    return U[:2, :2]


def check_convergence(result_dt: PropagationResult, result_half: PropagationResult,
                      result_j: PropagationResult | None = None,
                      result_j2: PropagationResult | None = None,
                      dt_tol=DT_TOL, basis_tol=BASIS_TOL) -> dict:
    """Compare step-halved and basis-enlarged runs.

    The dt check uses the full interaction-frame operator; the basis check
    compares the qubit block, since rows near the cutoff necessarily change
    when levels are added.
    """
    dt_error = float(np.abs(result_dt.unitary_interaction - result_half.unitary_interaction).max())
    report = {"dt_error": dt_error, "dt_ok": dt_error < dt_tol}
    if result_j is not None and result_j2 is not None:
        basis_error = float(np.abs(_qubit_block(result_j.unitary_interaction)
                                   - _qubit_block(result_j2.unitary_interaction)).max())
        report.update(basis_error=basis_error, basis_ok=basis_error < basis_tol)
    report["converged"] = bool(report["dt_ok"] and report.get("basis_ok", True))
    return report


def propagate_converged(spec: RotorSpec, basis: RotationalBasis, waveform, dt=None,
                        scheme="midpoint", dt_tol=DT_TOL, basis_tol=BASIS_TOL,
                        max_halvings=14, check_basis=True, backend=None, **kw) -> PropagationResult:
    """Refine dt until successive halvings agree to ``dt_tol``, then check j_max + 2.

    After the first pair of runs the number of further halvings is predicted
    from the scheme order, so the ladder is usually climbed in one jump.
    """
    order = SCHEMES.get(scheme)
    if order is None:
        raise ValidationError(f"unknown scheme {scheme!r}")
    dt = _default_dt(spec, waveform) if dt is None else float(dt)
    coarse = propagate(spec, basis, waveform, dt=dt, scheme=scheme, backend=backend, **kw)
    fine = propagate(spec, basis, waveform, dt=dt / 2, scheme=scheme, backend=backend, **kw)
    report = check_convergence(coarse, fine, dt_tol=dt_tol)
    halvings = 1
    while not report["dt_ok"] and halvings < max_halvings:
        err = report["dt_error"]
        jump = int(np.ceil(np.log(err / (0.9 * dt_tol)) / (order * np.log(2.0))))
        jump = min(max(jump, 1), max_halvings - halvings)
        dt = dt / 2**jump
        halvings += jump
        coarse = propagate(spec, basis, waveform, dt=dt, scheme=scheme, backend=backend, **kw)
        fine = propagate(spec, basis, waveform, dt=dt / 2, scheme=scheme, backend=backend, **kw)
        report = check_convergence(coarse, fine, dt_tol=dt_tol)
    if check_basis:
        bigger = RotationalBasis(basis.j_max + 2)
        wide = propagate(spec, bigger, waveform, dt=coarse.dt_used, scheme=scheme,
                         backend=backend, **kw)
        report = check_convergence(coarse, fine, coarse, wide, dt_tol=dt_tol, basis_tol=basis_tol)
    fine.converged = report["converged"]
    fine.convergence = report
    return fine
