"""Two-parameter robustness sweeps over the error model."""
from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from .errors import OffGridWarning, ValidationError
from .metrics import average_gate_fidelity
from .propagator import STEPS_PER_PERIOD, propagate
from .pulses import ErrorModel, apply_errors, synthesize
from .rotor import NACS, RotationalBasis, RotorSpec, dipole_element
from .synthesis import TargetGate, TwoPulseParams, named_gate, solve_two_pulse

PARAMETERS = ErrorModel.FIELDS
SCAN_SCHEME = "cf4"


@dataclass(frozen=True)
class ScanAxis:
    parameter: str
    values: tuple
    # plotting units (e.g. bandwidth in omega01, delay in tau); defaults to values
    display: tuple | None = None
    label: str = ""

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise ValidationError(f"unknown scan parameter {self.parameter!r}; choose from {PARAMETERS}")
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.size < 2:
            raise ValidationError("scan axis needs at least two values")
        d = np.diff(vals)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValidationError("scan axis values must be strictly monotonic")
        object.__setattr__(self, "values", tuple(float(v) for v in vals))
        disp = vals if self.display is None else np.asarray(self.display, dtype=float).ravel()
        if disp.size != vals.size:
            raise ValidationError("display values must match axis length")
        object.__setattr__(self, "display", tuple(float(v) for v in disp))
        if not self.label:
            object.__setattr__(self, "label", self.parameter)

    def __len__(self):
        return len(self.values)

    def to_dict(self) -> dict:
        return {"parameter": self.parameter, "label": self.label, "values": list(self.values),
                "display": list(self.display)}


@dataclass
class ScanResult:
    axes: tuple
    f_av: np.ndarray
    leakage: np.ndarray
    gate: str
    nominal: TwoPulseParams
    cells: list = field(default_factory=list)  # per-cell provenance, row-major
    runtime_s: float = 0.0

    @property
    def shape(self) -> tuple:
        return self.f_av.shape

    @property
    def failures(self) -> list:
        return [c for c in self.cells if c.get("error")]

    def to_dict(self) -> dict:
        return {"gate": self.gate, "axes": [a.to_dict() for a in self.axes],
                "nominal": self.nominal.to_dict(), "runtime_s": self.runtime_s,
                "n_failures": len(self.failures)}


def _run_cell(job):
    spec, j_max, params, err, target, dt_per_period, scheme = job
    cell = {"error_model": err.to_dict(), "j_max": j_max, "scheme": scheme}
    try:
        p = apply_errors(params, err)
        cell["params"] = p.to_dict()
        w = synthesize(p, dipole_element(spec, 0, 0))
        basis = RotationalBasis(j_max)
        dt = 2 * np.pi / p.carrier / dt_per_period
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r = propagate(spec, basis, w, dt=dt, scheme=scheme, snapshots=0)
        rep = average_gate_fidelity(r.unitary_interaction, target)
        cell.update(f_av=rep.f_av, leakage=rep.leakage, leakage_peak=r.leakage_max, dt=r.dt_used,
                    error="")
    except Exception as exc:  # recorded in-cell; the scan carries on
        cell.update(f_av=float("nan"), leakage=float("nan"), dt=float("nan"),
                    error=f"{type(exc).__name__}: {exc}")
    return cell


def scan_2d(gate, axis1: ScanAxis, axis2: ScanAxis, nominal: TwoPulseParams,
            spec: RotorSpec = NACS, j_max=None, base_error: ErrorModel | None = None,
            steps_per_period=STEPS_PER_PERIOD, scheme=SCAN_SCHEME, workers=1) -> ScanResult:
    """Fidelity over the grid axis1 x axis2; rows follow axis1.

    Cells are independent; results are assembled in grid order so the output
    does not depend on ``workers``.
    """
    if axis1.parameter == axis2.parameter:
        raise ValidationError("scan axes must target distinct parameters")
    gate = gate if isinstance(gate, TargetGate) else named_gate(gate)
    j_max = spec.j_max if j_max is None else j_max
    base = base_error or ErrorModel()
    jobs = []
    for v1 in axis1.values:
        for v2 in axis2.values:
            kw = base.to_dict()
            kw[axis1.parameter] = v1
            kw[axis2.parameter] = v2
            jobs.append((spec, j_max, nominal, ErrorModel(**kw), gate.matrix, steps_per_period, scheme))
    t0 = time.perf_counter()
    if workers and workers > 1:
        with Pool(workers) as pool:
            cells = pool.map(_run_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers)))
    else:
        cells = [_run_cell(j) for j in jobs]
    shape = (len(axis1), len(axis2))
    f = np.array([c["f_av"] for c in cells]).reshape(shape)
    leak = np.array([c["leakage"] for c in cells]).reshape(shape)
    return ScanResult((axis1, axis2), f, leak, gate.name, nominal, cells,
                      time.perf_counter() - t0)


def line_cut(result: ScanResult, axis_index: int, fixed_value: float, display=False) -> list:
    """(value, F) pairs along axis ``axis_index`` with the other axis held at ``fixed_value``.

    ``fixed_value`` is in raw axis units, or display units if ``display``.
    Off-grid values snap to the nearest cell with a warning.
    """
    if axis_index not in (0, 1):
        raise ValidationError("axis_index must be 0 or 1")
    other = result.axes[1 - axis_index]
    grid = np.asarray(other.display if display else other.values)
    k = int(np.argmin(np.abs(grid - fixed_value)))
    if not np.isclose(grid[k], fixed_value, rtol=1e-9, atol=1e-12):
        warnings.warn(f"{fixed_value} is not on the {other.label} grid; using {grid[k]}",
                      OffGridWarning, stacklevel=2)
    f = result.f_av[:, k] if axis_index == 0 else result.f_av[k, :]
    axis = result.axes[axis_index]
    xs = axis.display if display else axis.values
    return [(float(x), float(v)) for x, v in zip(xs, f)]


# figure presets -------------------------------------------------------------

FIG2_DELAY_REVIVALS = 112.0
FIG3_DELAY_REVIVALS = 11.2
NOMINAL_BANDWIDTH_RATIO = 0.1


def nominal_params(gate, spec: RotorSpec = NACS, bandwidth_ratio=NOMINAL_BANDWIDTH_RATIO,
                   delay_revivals=FIG3_DELAY_REVIVALS) -> TwoPulseParams:
    gate = gate if isinstance(gate, TargetGate) else named_gate(gate)
    p, _ = solve_two_pulse(gate, delay_revivals * spec.tau0, bandwidth_ratio * spec.omega01,
                           spec.omega01)
    return p


def fig2_axes(n_bandwidth=20, n_phase=41, bw_range=(0.02, 0.4)):
    """Bandwidth (in omega01) versus common phase error (rad)."""
    ratios = np.linspace(*bw_range, n_bandwidth)
    bw = ScanAxis("bandwidth_error", ratios / NOMINAL_BANDWIDTH_RATIO - 1.0, ratios,
                  "bandwidth_over_omega01")
    ph = ScanAxis("common_phase_error", np.linspace(-np.pi, np.pi, n_phase), label="phase_error_rad")
    return bw, ph


def fig3_axes(spec: RotorSpec = NACS, n_detuning=41, n_delay=21, detuning_range=(-0.02, 0.02),
              delay_range=(-0.1, 0.1), delay_revivals=FIG3_DELAY_REVIVALS):
    """Detuning (in omega01) versus delay error (in tau)."""
    d = np.linspace(*detuning_range, n_detuning)
    tau = delay_revivals * spec.tau0
    r = np.linspace(*delay_range, n_delay)
    return (ScanAxis("detuning", d * spec.omega01, d, "detuning_over_omega01"),
            ScanAxis("delay_error", r * tau, r, "delay_over_tau"))


PRESETS = {
    "fig2": {"delay_revivals": FIG2_DELAY_REVIVALS, "axes": lambda spec: fig2_axes()},
    "fig3": {"delay_revivals": FIG3_DELAY_REVIVALS, "axes": lambda spec: fig3_axes(spec)},
}


def preset_scan(name: str, gate, spec: RotorSpec = NACS, workers=1, **kw) -> ScanResult:
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    pre = PRESETS[name]
    ax1, ax2 = pre["axes"](spec)
    nominal = nominal_params(gate, spec, delay_revivals=pre["delay_revivals"])
    return scan_2d(gate, ax1, ax2, nominal, spec, workers=workers, **kw)
