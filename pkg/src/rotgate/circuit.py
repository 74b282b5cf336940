"""Phase-locked gate sequences: compile to one pulse train and run end to end."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .metrics import average_gate_fidelity, density_matrix
from .propagator import QuantumState, basis_state, propagate
from .pulses import WINDOW_SIGMAS, Waveform, synthesize
from .rotor import NACS, RotationalBasis, RotorSpec, dipole_element
from .synthesis import TargetGate, named_gate, solve_two_pulse


@dataclass(frozen=True)
class PulseTemplate:
    """Timing shared by every gate of a circuit (s, rad/s, rad/s)."""

    tau: float
    bandwidth: float
    carrier: float

    @classmethod
    def for_spec(cls, spec: RotorSpec = NACS, bandwidth_ratio=0.1, delay_revivals=11.2):
        return cls(delay_revivals * spec.tau0, bandwidth_ratio * spec.omega01, spec.omega01)

    @property
    def sigma_t(self) -> float:
        return 1.0 / self.bandwidth

    def to_dict(self) -> dict:
        return {"tau": self.tau, "bandwidth": self.bandwidth, "carrier": self.carrier}


def _as_gate(g) -> TargetGate:
    if isinstance(g, TargetGate):
        return g
    if isinstance(g, str):
        return named_gate(g)
    return TargetGate(np.asarray(g, dtype=complex))


@dataclass
class CircuitSpec:
    gates: list
    inter_gate_gap: float | None = None  # s; None means 2 sigma_t
    initial_state: QuantumState | None = None

    def __post_init__(self):
        self.gates = [_as_gate(g) for g in self.gates]
        if self.inter_gate_gap is not None and self.inter_gate_gap < 0:
            raise ValidationError("inter-gate gap must be >= 0")

    @classmethod
    def from_names(cls, names, **kw) -> "CircuitSpec":
        if isinstance(names, str):
            names = [n for n in names.replace(" ", "").split(",") if n]
        return cls(list(names), **kw)

    @property
    def names(self) -> list:
        return [g.name for g in self.gates]


@dataclass
class CompiledCircuit:
    waveform: Waveform
    gate_waveforms: list
    boundaries: list
    params: list
    alphas: list


def compile_circuit(circuit: CircuitSpec, template: PulseTemplate, spec: RotorSpec = NACS) -> CompiledCircuit:
    """Lay the gates out on one global clock.

    Gate k starts (first-pulse centre) ``5 sigma_t + gap`` after the end of
    gate k-1's window; carrier phases are never re-referenced.
    """
    mu01 = dipole_element(spec, 0, 0)
    sig = template.sigma_t
    gap = 2 * sig if circuit.inter_gate_gap is None else circuit.inter_gate_gap
    waves, bounds, params, alphas = [], [], [], []
    center = 0.0
    for gate in circuit.gates:
        p, alpha = solve_two_pulse(gate, template.tau, template.bandwidth, template.carrier)
        w = synthesize(p, mu01, t_offset=center)
        if waves and w.window[0] < waves[-1].window[1]:
            raise ValidationError(f"gate {gate.name!r} window overlaps the previous gate")
        waves.append(w)
        bounds.append(w.window[1])
        params.append(p)
        alphas.append(alpha)
        center = w.window[1] + gap + WINDOW_SIGMAS * sig
    if not waves:
        return CompiledCircuit(Waveform((), (0.0, 0.0)), [], [], [], [])
    segs = tuple(s for w in waves for s in w.segments)
    return CompiledCircuit(Waveform(segs, (waves[0].window[0], waves[-1].window[1])), waves, bounds,
                           params, alphas)


@dataclass
class CircuitResult:
    compiled: CompiledCircuit
    states: list  # interaction-frame states at each boundary
    rhos: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    leakage: list = field(default_factory=list)
    unitaries: list = field(default_factory=list)  # cumulative, interaction frame
    dt_used: float = 0.0

    @property
    def boundaries(self) -> list:
        return self.compiled.boundaries

    def phase_increments(self) -> list:
        """Change in arg rho_10 across each gate, wrapped to (-pi, pi]."""
        phases = [r.coherence_phase for r in self.rhos]
        return [float(np.angle(np.exp(1j * (b - a)))) for a, b in zip(phases, phases[1:])]

    def snapshot_dict(self, names) -> list:
        out = []
        for name, t, rho, rep in zip(names, self.boundaries, self.rhos, self.reports):
            out.append({"after": name, "t_ps": t * 1e12, "rho": rho.to_dict(),
                        "cumulative_f_av": rep.f_av, "leakage": rho.leakage})
        return out


def run_circuit(circuit: CircuitSpec, spec: RotorSpec = NACS, basis: RotationalBasis | None = None,
                template: PulseTemplate | None = None, dt=None, scheme="midpoint",
                backend=None) -> CircuitResult:
    """Propagate gate by gate and score every prefix against the ideal product."""
    basis = basis or RotationalBasis.from_spec(spec)
    template = template or PulseTemplate.for_spec(spec)
    compiled = compile_circuit(circuit, template, spec)
    energies = basis.energies(spec)
    if not compiled.gate_waveforms:
        return CircuitResult(compiled, [])
    t_start = compiled.waveform.window[0]
    init = circuit.initial_state or basis_state(basis, 0, t_start)
    if init.amplitudes.size != basis.dimension:
        raise ValidationError("initial state does not match basis")
    # the initial state is taken to sit at the start of the train
    psi0 = QuantumState(init.amplitudes, t_start, init.frame).to_frame("interaction", energies)
    U = np.eye(basis.dimension, dtype=complex)
    ideal = np.eye(2, dtype=complex)
    result = CircuitResult(compiled, [])
    t_prev = t_start
    for gate, w, t_b in zip(circuit.gates, compiled.gate_waveforms, compiled.boundaries):
        r = propagate(spec, basis, w, dt=dt, t0=t_prev, tf=t_b, scheme=scheme, snapshots=0,
                      backend=backend)
        U = r.unitary_interaction @ U
        ideal = gate.matrix @ ideal
        psi = QuantumState(U @ psi0.amplitudes, t_b, "interaction")
        result.states.append(psi)
        result.rhos.append(density_matrix(psi))
        result.reports.append(average_gate_fidelity(U, ideal, gate_name="*".join(
            g.name for g in circuit.gates[: len(result.states)])))
        result.leakage.append(result.rhos[-1].leakage)
        result.unitaries.append(U.copy())
        result.dt_used = r.dt_used
        t_prev = t_b
    return result
