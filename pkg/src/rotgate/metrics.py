"""Gate scoring and computational-subspace density matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .synthesis import wrap_phase

phase_wrap = wrap_phase


def _as_unitary(u, what, tol=1e-8):
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValidationError(f"{what} must be a square matrix")
    dev = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if dev > tol:
        raise ValidationError(f"{what} is not unitary (deviation {dev:.3g})")
    return u


@dataclass
class FidelityReport:
    f_av: float
    m_rel: np.ndarray
    leakage: float = 0.0
    gate_name: str = ""
    params_used: object = None
    error_model: object = None

    def __post_init__(self):
        if not -1e-12 <= self.f_av <= 1 + 1e-12:
            raise ValidationError(f"fidelity {self.f_av} outside [0, 1]")

    @property
    def infidelity(self) -> float:
        return 1.0 - self.f_av

    def to_dict(self) -> dict:
        out = {
            "gate": self.gate_name,
            "f_av": float(self.f_av),
            "infidelity": float(1.0 - self.f_av),
            "leakage": float(self.leakage),
            "m_rel": {"re": self.m_rel.real.tolist(), "im": self.m_rel.imag.tolist()},
        }
        if self.params_used is not None:
            out["params"] = self.params_used.to_dict()
        if self.error_model is not None:
            out["error_model"] = self.error_model.to_dict()
        return out


def fidelity_from_block(block, u_target) -> tuple:
    """F_av and M_rel for a 2x2 computational block (no unitarity check)."""
    m = np.asarray(u_target, dtype=complex).conj().T @ np.asarray(block, dtype=complex)
    f = (np.trace(m @ m.conj().T).real + abs(np.trace(m)) ** 2) / 6.0
    return float(f), m


def average_gate_fidelity(u_impl, u_target, gate_name="", params=None, error_model=None,
                          leakage=None) -> FidelityReport:
    """Average gate fidelity of the top-left 2x2 block of ``u_impl`` against ``u_target``.

    Leakage out of the block is not renormalised; it lowers F directly.
    """
    u_impl = _as_unitary(u_impl, "implemented unitary")
    gate_name = gate_name or getattr(u_target, "name", "")
    u_target = _as_unitary(getattr(u_target, "matrix", u_target), "target", tol=1e-10)
    if u_target.shape != (2, 2):
        raise ValidationError("target must be 2x2")
    if u_impl.shape[0] < 2:
        raise ValidationError("implemented unitary must span the qubit pair")
    block = u_impl[:2, :2]
    f, m = fidelity_from_block(block, u_target)
    if leakage is None:
        # worst population lost from the two computational inputs
        leakage = float(1.0 - np.sum(np.abs(block) ** 2, axis=0).min())
    return FidelityReport(min(max(f, 0.0), 1.0), m, max(leakage, 0.0), gate_name, params,
                          error_model)


@dataclass(frozen=True)
class DensityMatrix:
    rho: np.ndarray
    leakage: float

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.rho)

    @property
    def phases(self) -> np.ndarray:
        return wrap_phase(np.angle(self.rho))

    @property
    def coherence_phase(self) -> float:
        """arg rho_10, the relative phase of |1> against |0>."""
        return float(wrap_phase(np.angle(self.rho[1, 0])))

    def to_dict(self) -> dict:
        return {"magnitude": self.magnitudes.tolist(), "phase": self.phases.tolist(),
                "leakage": float(self.leakage)}


def density_matrix(state, energies=None) -> DensityMatrix:
    """Computational-subspace rho of ``state`` in the interaction frame.

    Lab-frame states need ``energies`` for the frame change.
    """
    if state.frame != "interaction":
        if energies is None:
            raise ValidationError("lab-frame state needs basis energies for the frame change")
        state = state.to_frame("interaction", energies)
    c = state.amplitudes[:2]
    rho = np.outer(c, c.conj())
    leak = max(1.0 - float(np.sum(np.abs(state.amplitudes[:2]) ** 2)), 0.0)
    return DensityMatrix(rho, leak)
