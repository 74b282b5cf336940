"""Two-pulse single-qubit gates on rotational molecular qubits."""
__version__ = "0.1.0"

from .rotor import NACS, RotationalBasis, RotorSpec, dipole_element, revival_time  # noqa: E402
from .synthesis import TargetGate, TwoPulseParams, named_gate, solve_two_pulse  # noqa: E402
from .pulses import ErrorModel, Waveform, apply_errors, synthesize  # noqa: E402
from .propagator import propagate, propagate_converged  # noqa: E402
from .metrics import average_gate_fidelity  # noqa: E402

__all__ = [
    "NACS", "RotationalBasis", "RotorSpec", "dipole_element", "revival_time",
    "TargetGate", "TwoPulseParams", "named_gate", "solve_two_pulse",
    "ErrorModel", "Waveform", "apply_errors", "synthesize",
    "propagate", "propagate_converged", "average_gate_fidelity",
]
