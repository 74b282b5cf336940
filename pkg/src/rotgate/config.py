"""Run configuration: one YAML/JSON file per run, overridable from the command line."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import yaml

from .angles import parse_angle
from .errors import ValidationError
from .pulses import ErrorModel
from .rotor import NACS, RotorSpec, load_molecule
from .scan import PARAMETERS
from .synthesis import TargetGate, TwoPulseParams, named_gate


@dataclass
class RunConfig:
    molecule: object = None  # None (NaCs), a mapping, or a path
    j_max: int | None = None
    gate: str | None = None
    matrix: list | None = None  # 8 reals, row-major re/im pairs
    params: list | None = None  # custom (theta1, phi1, theta2, phi2)
    gates: list = field(default_factory=list)
    bandwidth_ratio: float = 0.1  # in omega01
    delay_revivals: float = 11.2  # in tau0
    carrier_ratio: float = 1.0  # in omega01
    errors: dict = field(default_factory=dict)
    scan: dict = field(default_factory=dict)
    gap: float | None = None  # s
    after: list = field(default_factory=list)
    dt: float | None = None  # s
    scheme: str = "midpoint"
    converge: bool = True
    workers: int = 1
    out: str = "out"

    def __post_init__(self):
        if self.bandwidth_ratio <= 0 or self.delay_revivals <= 0 or self.carrier_ratio <= 0:
            raise ValidationError("bandwidth_ratio, delay_revivals and carrier_ratio must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ValidationError("dt must be positive")
        if isinstance(self.molecule, str) and not Path(self.molecule).exists():
            raise ValidationError(f"molecule file {self.molecule!r} not found")
        if isinstance(self.gates, str):
            self.gates = [g for g in self.gates.replace(" ", "").split(",") if g]
        if isinstance(self.after, str):
            self.after = [g for g in self.after.replace(" ", "").split(",") if g]
        unknown = set(self.errors) - {"bandwidth_error", "common_phase_error", "detuning_ratio", "delay_ratio"}
        if unknown:
            raise ValidationError(f"unknown error-model keys {sorted(unknown)}")
        if self.matrix is not None and len(self.matrix) != 8:
            raise ValidationError("matrix needs 8 reals")
        if self.params is not None:
            if len(self.params) != 4:
                raise ValidationError("params needs theta1 phi1 theta2 phi2")
            self.params = [parse_angle(p) for p in self.params]

    # resolution -------------------------------------------------------------

    def rotor(self) -> RotorSpec:
        spec = NACS if self.molecule is None else load_molecule(self.molecule)
        if self.j_max is not None:
            spec = replace(spec, j_max=int(self.j_max))
        return spec

    def target(self) -> TargetGate:
        if self.matrix is not None:
            return TargetGate.from_reals(self.matrix)
        if self.gate is not None:
            return named_gate(self.gate)
        if self.params is not None:
            # custom pulses are scored against their own first-order design
            from .synthesis import magnus_two_pulse

            return TargetGate(magnus_two_pulse(self.custom_params(self.rotor())), "custom")
        raise ValidationError("no gate given")

    def timing(self, spec: RotorSpec) -> dict:
        return {"tau": self.delay_revivals * spec.tau0,
                "bandwidth": self.bandwidth_ratio * spec.omega01,
                "carrier": self.carrier_ratio * spec.omega01}

    def custom_params(self, spec: RotorSpec) -> TwoPulseParams:
        t1, p1, t2, p2 = self.params
        return TwoPulseParams(theta1=t1, phi1=p1, theta2=t2, phi2=p2, **self.timing(spec))

    def error_model(self, spec: RotorSpec) -> ErrorModel:
        e = self.errors
        return ErrorModel(
            bandwidth_error=float(e.get("bandwidth_error", 0.0)),
            common_phase_error=parse_angle(e.get("common_phase_error", 0.0)),
            detuning=float(e.get("detuning_ratio", 0.0)) * spec.omega01,
            delay_error=float(e.get("delay_ratio", 0.0)) * self.delay_revivals * spec.tau0,
        )

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config {path} not found")
    data = yaml.safe_load(path.read_text()) or {}
    if not isinstance(data, dict):
        raise ValidationError("config must be a mapping")
    mol = data.get("molecule")
    if isinstance(mol, str) and not Path(mol).is_absolute():
        data["molecule"] = str(path.parent / mol)
    return from_mapping(data)


def from_mapping(data: dict) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    extra = set(data) - known
    if extra:
        raise ValidationError(f"unknown config keys {sorted(extra)}")
    scan = data.get("scan") or {}
    for ax in scan.get("axes", []):
        if ax.get("parameter") not in PARAMETERS:
            raise ValidationError(f"scan axis parameter must be one of {PARAMETERS}")
    return RunConfig(**data)


def merge(config: RunConfig, overrides: dict) -> RunConfig:
    """Apply non-None overrides (CLI flags win over file keys)."""
    data = config.to_dict()
    for k, v in overrides.items():
        if v is None:
            continue
        if k == "errors":
            data["errors"] = {**data["errors"], **{a: b for a, b in v.items() if b is not None}}
        elif k == "scan":
            data["scan"] = {**data["scan"], **{a: b for a, b in v.items() if b is not None}}
        else:
            data[k] = v
    return from_mapping(data)
